#pragma once

// Sparse linear predictor: transfer function V, the horizon-n shift
// approximation H(z) = z^n V(z^{nu m})^n, its real tap sequence on the lattice
// {j nu m - n : j >= n}, and the convolution estimator.

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sparsamp/sequence.hpp"
#include "sparsamp/spectral.hpp"

namespace sparsamp {

struct predictor_params {
    double gamma = 4.0;
    double r = 0.4;
    long long n = 1;   // horizon
    long long nu = 1;
    long long m = 1;

    double alpha() const;
    long long stride() const { return nu * m; }
    void validate() const;
};

class kernel_leakage : public std::runtime_error {
public:
    kernel_leakage(const std::string& what, double leakage) : std::runtime_error(what), leakage_(leakage) {}
    double leakage() const { return leakage_; }

private:
    double leakage_;
};

template <class Real>
std::complex<Real> eval_V_as(Real omega, double gamma, double r);

// log V(e^{i omega}); stays finite where |V| itself would overflow
template <class Real>
std::complex<Real> log_V_as(Real omega, double gamma, double r);

template <class Real>
std::complex<Real> eval_H_as(Real omega, const predictor_params& p);

std::complex<double> eval_V(double omega, double gamma, double r);
std::complex<double> eval_V_at(std::complex<double> z, double gamma, double r);
std::complex<double> eval_H(double omega, const predictor_params& p);

// coefficients of V(z) = sum_k v(k) z^{-k}, from an N-point circle grid,
// indexed k = -N/2 .. N/2-1 (v[k + N/2])
std::vector<double> v_coefficients(double gamma, double r, std::size_t N);

template <class Real>
struct basic_predictor_kernel {
    predictor_params params;
    std::vector<long long> index;  // ascending lattice positions j*nu*m - n
    std::vector<Real> taps;
    double kappa = 0;              // max |H| over the grid
    std::size_t N = 0;
    long long K = 0;
    double leakage = 0;            // max off-lattice |h| / max tap
    double imag_residue = 0;       // max |Im h| on the lattice / max tap
    double tail_l1 = 0;            // sum of |h| over lattice taps beyond K (truncation error per unit sup|x|)
    double coarse_leakage = 0;     // max |h| off {k : (k+n)/m integral, k >= mn-n} / max tap

    double tap(long long k) const;
};

using predictor_kernel = basic_predictor_kernel<double>;
using predictor_kernel_q = basic_predictor_kernel<quad>;

// K = 0 selects the smallest lattice cut whose dropped taps sum (in absolute
// value) to at most tail_tol, or are all at the roundoff level; capped at N/4
template <class Real>
basic_predictor_kernel<Real> extract_kernel_as(const predictor_params& p, std::size_t N, long long K = 0,
                                               double tail_tol = 1e-12, double leakage_tol = 1e-8);

predictor_kernel extract_kernel(const predictor_params& p, std::size_t N, long long K = 0, double tail_tol = 1e-12,
                                double leakage_tol = 1e-8);

template <class Real>
struct basic_prediction {
    std::complex<Real> value{};
    std::size_t missing = 0;  // taps whose history sample lay outside the window
};

// estimate of x(k + n) from x(k - t), t over the retained taps
template <class Real>
basic_prediction<Real> predict(const basic_predictor_kernel<Real>& h, const basic_sequence<Real>& history, index_t k);

double kappa(const predictor_params& p, std::size_t N);
double log_kappa(const predictor_params& p, std::size_t N);

// (omega, |H - e^{i omega n}|) ascending in omega
std::vector<std::pair<double, double>> error_curve(const predictor_params& p, std::size_t N);

struct tune_result {
    double gamma = 0;
    double achieved = 0;      // sup over the mask complement of |H - e^{i omega n}|
    double achieved_l2 = 0;   // root mean square of the same residual over the complement
    bool met = false;
    std::vector<std::pair<double, double>> trace;  // (gamma, achieved) per scheduled value
};

tune_result tune_gamma(double delta, long long nu, long long m, long long n, double target,
                       const std::vector<double>& schedule, double r = 0.4, std::size_t N = 4096);

std::vector<double> doubling_schedule(double first, double last);

}  // namespace sparsamp
