#pragma once

// Band-limited functions generated by sequences through the cardinal series,
// frequency truncation of general spectra, and the sub-critical sampling demo.

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "sparsamp/recovery.hpp"
#include "sparsamp/sequence.hpp"

namespace sparsamp {

struct sampled_bandlimited {
    double tau = 1.0;
    sequence coeffs;  // f(tau k)
};

struct spectrum_ct {
    std::vector<double> omega;  // uniform, covering [-pi/tau, pi/tau]
    std::vector<cplx> values;   // tau * X(e^{i tau omega})
};

double sinc(double u);

sampled_bandlimited lift_to_ct(const sequence& x, double tau);

struct ct_value {
    cplx value{};
    double tail_bound = 0;  // bound on the dropped terms of the series
};

ct_value evaluate(const sampled_bandlimited& f, double t, index_t K);

// f at t = tau * i / density for i in [i_lo, i_hi], every coefficient included
// (fast path through per-residue convolutions)
std::vector<cplx> cardinal_on_grid(const sequence& c, int density, index_t i_lo, index_t i_hi);

// evaluate with every stored coefficient
cplx evaluate_full(const sampled_bandlimited& f, double t);

// sum_k x(k) e^{-i w k} at an arbitrary angle
cplx dtft(const sequence& x, double w);

spectrum_ct ct_spectrum(const sampled_bandlimited& f, std::size_t points);

using spectrum_fn = std::function<cplx(double)>;

// samples of f_Omega = inverse transform of F restricted to [-Omega, Omega],
// taken at the critical step pi/Omega, for k in the range
sequence bandlimit(const spectrum_fn& F, double Omega, index_range k, int panels = 256);

// same, from F tabulated on a uniform grid that must cover [-Omega, Omega]
sequence bandlimit(const std::vector<double>& omega, const std::vector<cplx>& F, double Omega, index_range k);

// (1/2pi) * integral over |w| > Omega of |F|, by quadrature out to w_max
double spectral_tail(const spectrum_fn& F, double Omega, double w_max, int panels = 512);

struct ct_report {
    double tau = 0;
    int m = 1;
    double Omega = 0;
    double eps = 0;
    double l2_seq = 0;      // ||x~ - x||
    double l2_ct = 0;       // sqrt(tau) ||x~ - x||
    double l2_ct_quad = 0;  // spectral quadrature of the same norm
    double l2_ct_window = 0;  // time-domain quadrature over [-T, T]
    double linf_ct = 0;     // sup over the dense time grid of |f~ - f|
    double bound_C = 0;
    double window_T = 0;
    std::size_t quad_points = 0;
};

// plancherel-normalised norms: ||F||^2 = (1/2pi) * integral of |F|^2, which equals ||f||^2
ct_report error_report(const sequence& x, const sequence& xt, double tau, int m, double eps, double Omega,
                       int density = 16);

struct demo_config {
    double Delta = 1.0;
    double eps = 0.05;
    int m_cap = 4;
    index_t half_length = 512;  // coefficient range |k| <= half_length
    std::size_t N = 0;          // approximation grid, 0 = automatic
    double w_max = 0;           // spectral tail integration limit, 0 = automatic
    index_t recover_M = 8;
    index_t n_obs = 0;          // 0 = whole coefficient range
    recovery_config recovery;
    int density = 16;
};

struct demo_report {
    int m = 1;
    double Omega = 0;
    double tau = 0;
    double tail = 0;            // (1/2pi) * integral over |w| > Omega of |F|
    double eps_sequence = 0;    // eps handed to the sequence approximation
    double achieved_delta = 0;
    ct_report gaps;             // f_Omega vs f~
    double sup_f_vs_tilde = 0;  // sup |f - f~| on the dense grid
    double sup_f_vs_recovered = 0;
    double recovery_error = 0;  // max |x~(n) - estimate| over |n| <= M
    double recovery_gap = 0;    // sup |f~ - f~ rebuilt from the recovered samples|
    std::vector<recovery_record> recovered;
    sequence tilde;
    std::vector<std::string> notes;
};

demo_report sparse_ct_demo(const spectrum_fn& F, const std::function<cplx(double)>& f, const demo_config& cfg);

}  // namespace sparsamp
