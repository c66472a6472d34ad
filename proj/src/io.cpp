#include "sparsamp/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace sparsamp::io {

std::string fmt(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

json to_json(const sequence& x) {
    json re = json::array(), im = json::array();
    for (const auto& v : x.values) {
        re.push_back(v.real());
        im.push_back(v.imag());
    }
    return json{{"origin", x.origin}, {"re", re}, {"im", im}};
}

sequence sequence_from_json(const json& j) {
    if (!j.is_object() || !j.contains("origin") || !j.contains("re"))
        throw std::invalid_argument("sequence json: expected {origin, re, im}");
    sequence x;
    x.origin = j.at("origin").get<index_t>();
    const auto& re = j.at("re");
    const json im = j.contains("im") ? j.at("im") : json::array();
    if (!im.empty() && im.size() != re.size()) throw std::invalid_argument("sequence json: re/im length mismatch");
    for (std::size_t i = 0; i < re.size(); ++i)
        x.values.emplace_back(re[i].get<double>(), im.empty() ? 0.0 : im[i].get<double>());
    return x;
}

json to_json(const branching_process& bp) {
    json branches = json::array();
    for (int d = -bp.m + 1; d <= bp.m - 1; ++d) branches.push_back(json{{"d", d}, {"seq", to_json(bp.branch(d))}});
    return json{{"m", bp.m}, {"branches", branches}};
}

branching_process process_from_json(const json& j) {
    branching_process bp;
    bp.m = j.at("m").get<int>();
    if (bp.m < 1) throw std::invalid_argument("process json: m must be >= 1");
    bp.branches.resize(static_cast<std::size_t>(2 * bp.m - 1));
    std::vector<char> seen(bp.branches.size(), 0);
    for (const auto& b : j.at("branches")) {
        const int d = b.at("d").get<int>();
        if (d < -bp.m + 1 || d > bp.m - 1) throw std::invalid_argument("process json: branch index out of range");
        bp.branch(d) = sequence_from_json(b.at("seq"));
        seen[static_cast<std::size_t>(d + bp.m - 1)] = 1;
    }
    for (char s : seen)
        if (!s) throw std::invalid_argument("process json: missing branch");
    return bp;
}

json kernel_meta(const predictor_kernel& h) {
    return json{{"gamma", h.params.gamma},
                {"r", h.params.r},
                {"n", h.params.n},
                {"nu", h.params.nu},
                {"m", h.params.m},
                {"alpha", h.params.alpha()},
                {"kappa", h.kappa},
                {"N", h.N},
                {"K", h.K},
                {"leakage", h.leakage},
                {"coarse_leakage", h.coarse_leakage},
                {"imag_residue", h.imag_residue},
                {"tail_l1", h.tail_l1},
                {"taps", h.taps.size()}};
}

void write_config_comment(std::ostream& os, const json& config) { os << "# config: " << config.dump() << '\n'; }

void write_spectrum_csv(std::ostream& os, const spectrum& X) {
    os << "omega,re,im\n";
    for (std::size_t j : ascending_bins(X.size()))
        os << fmt(grid_omega(j, X.size())) << ',' << fmt(X.bins[j].real()) << ',' << fmt(X.bins[j].imag()) << '\n';
}

void write_kernel_csv(std::ostream& os, const predictor_kernel& h) {
    os << "k,h\n";
    for (std::size_t i = 0; i < h.taps.size(); ++i) os << h.index[i] << ',' << fmt(h.taps[i]) << '\n';
}

void write_observations_csv(std::ostream& os, const observations& obs) {
    os << "k,re,im\n";
    for (index_t k = obs.k_lo; k <= obs.k_hi; ++k)
        os << k << ',' << fmt(obs.at(k).real()) << ',' << fmt(obs.at(k).imag()) << '\n';
}

observations read_observations_csv(std::istream& is, int m) {
    observations obs;
    obs.m = m;
    std::string line;
    bool header = false;
    std::vector<std::pair<index_t, cplx>> rows;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        if (!header) {
            if (line.rfind("k,re,im", 0) != 0) throw std::invalid_argument("observations csv: expected header k,re,im");
            header = true;
            continue;
        }
        std::istringstream ls(line);
        std::string a, b, c;
        if (!std::getline(ls, a, ',') || !std::getline(ls, b, ',') || !std::getline(ls, c))
            throw std::invalid_argument("observations csv: malformed row " + std::to_string(lineno));
        try {
            rows.emplace_back(std::stoll(a), cplx(std::stod(b), std::stod(c)));
        } catch (const std::exception&) {
            throw std::invalid_argument("observations csv: unparsable row " + std::to_string(lineno));
        }
    }
    if (rows.empty()) throw std::invalid_argument("observations csv: no samples");
    obs.k_lo = rows.front().first;
    obs.k_hi = rows.back().first;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].first != obs.k_lo + static_cast<index_t>(i))
            throw std::invalid_argument("observations csv: indices must be contiguous and ascending");
        obs.samples.push_back(rows[i].second);
    }
    obs.validate();
    return obs;
}

void write_recovery_csv(std::ostream& os, const recovery_report& rep) {
    os << "n,d,p,horizon,estimate_re,estimate_im,truth_re,truth_im,abs_error,eta_bound,gamma,kappa,coverage_warnings\n";
    for (const auto& r : rep.records) {
        os << r.n << ',' << r.d << ',' << r.p << ',' << r.horizon << ',' << fmt(r.estimate.real()) << ','
           << fmt(r.estimate.imag()) << ',';
        if (r.truth)
            os << fmt(r.truth->real()) << ',' << fmt(r.truth->imag()) << ',' << fmt(r.abs_error) << ',';
        else
            os << ",,,";
        os << fmt(r.eta_bound) << ',' << fmt(r.gamma) << ',' << fmt(r.kappa) << ',' << r.coverage_warnings << '\n';
    }
}

sequence read_sequence_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw std::invalid_argument(path + ": " + e.what());
    }
    return sequence_from_json(j);
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

}  // namespace sparsamp::io
