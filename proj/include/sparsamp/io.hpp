#pragma once

// JSON / CSV exchange formats.  Numbers are written with the shortest
// round-trip decimal form, independent of the locale.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "sparsamp/branching.hpp"
#include "sparsamp/predictor.hpp"
#include "sparsamp/recovery.hpp"
#include "sparsamp/spectral.hpp"

namespace sparsamp::io {

using json = nlohmann::ordered_json;

std::string fmt(double v);

json to_json(const sequence& x);
sequence sequence_from_json(const json& j);

json to_json(const branching_process& bp);
branching_process process_from_json(const json& j);

json kernel_meta(const predictor_kernel& h);

// leading comment line carrying the resolved configuration
void write_config_comment(std::ostream& os, const json& config);

void write_spectrum_csv(std::ostream& os, const spectrum& X);
void write_kernel_csv(std::ostream& os, const predictor_kernel& h);
void write_observations_csv(std::ostream& os, const observations& obs);
observations read_observations_csv(std::istream& is, int m);
void write_recovery_csv(std::ostream& os, const recovery_report& rep);

sequence read_sequence_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace sparsamp::io
