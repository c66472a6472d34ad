#pragma once

// Recovery of a representative branch from every m-th sample: on-lattice
// read-off, sparse-kernel prediction of the off-lattice points, noise sweeps.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sparsamp/predictor.hpp"
#include "sparsamp/sequence.hpp"

namespace sparsamp {

// samples[k - k_lo] = x~(m k) (+ noise), k over a contiguous range containing 0
struct observations {
    int m = 1;
    index_t k_lo = 0;
    index_t k_hi = -1;
    std::vector<cplx> samples;

    bool observed(index_t k) const { return k >= k_lo && k <= k_hi; }
    cplx at(index_t k) const { return observed(k) ? samples[static_cast<std::size_t>(k - k_lo)] : cplx{}; }
    void validate() const;
};

observations decimate(const sequence& x, int m, index_range k);

// time reversal k -> -k
observations reversed(const observations& obs);

// unique (d, p) with n = p m - d, d in [0, m-1] for n >= 0 and [-m+1, 0] for n < 0
std::pair<int, index_t> branch_index(index_t n, int m);

struct recovery_config {
    std::vector<long long> zeta;        // per-branch multipliers; empty selects the default plan
    double gamma = 8.0;                 // used when the schedule is empty
    std::vector<double> gamma_schedule; // non-empty: pick per target by backtesting
    std::map<index_t, double> gamma_fixed;  // per-target override (takes precedence)
    double r = 0.01;
    std::size_t N = 8192;               // kernel grid
    long long K = 0;                    // 0 = automatic truncation
    index_t offset = 0;                 // only samples with k <= offset (forward side) are used, offset <= 0
    int backtest_points = 8;
    double sigma = 0;                   // radius used for the eta_bound column

    long long zeta_of(int d, int m) const;
};

struct recovery_record {
    index_t n = 0;
    int d = 0;
    index_t p = 0;
    long long horizon = 0;  // 0 for read-off
    long long nu = 0;
    cplx estimate{};
    bool read_off = false;
    double gamma = 0;
    double kappa = 0;
    double eta_bound = 0;
    std::size_t coverage_warnings = 0;
    double backtest = 0;    // worst backtest residual of the chosen kernel
    std::optional<cplx> truth;
    double abs_error = 0;
};

struct recovery_report {
    std::vector<recovery_record> records;
    std::size_t coverage_warnings = 0;
    std::optional<double> max_error;
};

double eta_bound(double kappa, double sigma);
double eta_bound(const predictor_kernel& h, double sigma);

recovery_record recover_point(const observations& obs, index_t n, const recovery_config& cfg);
recovery_report recover_range(const observations& obs, index_t M, const recovery_config& cfg);

// one-step-ahead prediction on the lattice, feeding each estimate back;
// covers the M lattice points beyond each end of the observed range
recovery_report iterated_recovery(const observations& obs, index_t M, const recovery_config& cfg);

// direct multi-horizon estimates of the same lattice points, for comparison
recovery_report direct_lattice_recovery(const observations& obs, index_t M, const recovery_config& cfg);

void attach_truth(recovery_report& rep, const sequence& truth);

// white complex noise on the range, rescaled to l2 norm sigma; the raw draw at
// each k depends only on (seed, k), so nested ranges share their samples
std::vector<cplx> white_noise(index_range k, double sigma, std::uint64_t seed);
observations add_noise(const observations& obs, double sigma, std::uint64_t seed);

struct sweep_cell {
    double sigma = 0;
    index_t n_obs = 0;
    double max_error = 0;
    double noiseless_error = 0;
    double kappa_max = 0;
    double eta_bound = 0;       // sigma (kappa_max + 1)
    bool within_bound = true;   // per target: error <= noiseless + sigma (kappa + 1)(1 + 1e-6)
    std::size_t coverage_warnings = 0;
};

std::vector<sweep_cell> noise_sweep(const sequence& truth, int m, const std::vector<double>& sigmas,
                                    const std::vector<index_t>& n_obs, const recovery_config& cfg, index_t M,
                                    std::uint64_t seed);

struct gamma_cell {
    double gamma = 0;
    double max_error = 0;
    double noiseless_error = 0;
    double kappa_max = 0;
};

std::vector<gamma_cell> gamma_sweep(const sequence& truth, int m, double sigma, index_t n_obs,
                                    const std::vector<double>& gammas, const recovery_config& cfg, index_t M,
                                    std::uint64_t seed);

}  // namespace sparsamp
