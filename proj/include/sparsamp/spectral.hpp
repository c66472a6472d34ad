#pragma once

// Unit-circle traces of finitely supported sequences on a uniform grid, plus the
// degeneracy-point / mask machinery.

#include <complex>
#include <cstddef>
#include <vector>

#include "sparsamp/sequence.hpp"

namespace sparsamp {

// N samples of X(e^{iw}); bin j sits at w_j = 2*pi*j/N reduced into (-pi, pi]
template <class Real>
struct basic_spectrum {
    std::vector<std::complex<Real>> bins;

    basic_spectrum() = default;
    explicit basic_spectrum(std::size_t n) : bins(n) {}
    std::size_t size() const { return bins.size(); }
};

using spectrum = basic_spectrum<double>;

double grid_omega(std::size_t j, std::size_t N);

template <class Real>
Real grid_omega_as(std::size_t j, std::size_t N) {
    const auto n = static_cast<long long>(N);
    long long jj = static_cast<long long>(j);
    if (2 * jj > n) jj -= n;
    return Real(2) * num<Real>::pi() * Real(jj) / Real(n);
}

// bin indices ordered by ascending omega
std::vector<std::size_t> ascending_bins(std::size_t N);

// Unnormalized in-place DFT: sign -1 forward (e^{-i...}), +1 backward.
template <class Real>
void fft_inplace(std::vector<std::complex<Real>>& a, int sign);

template <class Real>
basic_spectrum<Real> analyze(const basic_sequence<Real>& x, std::size_t N);

template <class Real>
basic_sequence<Real> synthesize(const basic_spectrum<Real>& X, index_range window);

// |a - b| measured around the circle, in [0, pi]
double circular_distance(double a, double b);

// odd multiples of pi/n reduced into (-pi, pi], ascending
std::vector<double> degeneracy_points(long long n);

struct frequency_mask {
    long long order = 1;
    double half_width = 0;
    std::size_t grid = 0;
    std::vector<std::size_t> bins;  // ascending bin index

    bool contains(std::size_t j) const;
    // masked measure, counting one grid step per bin
    double measure() const;
};

frequency_mask build_mask(long long n, double delta, std::size_t N);

enum class mask_mode { zero_inside, zero_outside };

template <class Real>
basic_spectrum<Real> apply_mask(const basic_spectrum<Real>& X, const frequency_mask& mask, mask_mode mode);

struct membership_result {
    bool member = false;
    double residual = 0;  // max |X| over masked bins
    double scale = 0;     // 1 + max |X| over all bins
    double relative() const { return residual / scale; }
};

template <class Real>
membership_result membership_V(const basic_sequence<Real>& x, double delta, long long n, std::size_t N,
                               double tol = 1e-10);

// Per-branch multipliers zeta(d), mu(m, d) = m * zeta(d), d = -m+1 .. m-1.
struct degeneracy_plan {
    int m = 1;
    double delta = 0;
    std::vector<long long> zeta;  // zeta[d + m - 1]

    int d_min() const { return -m + 1; }
    int d_max() const { return m - 1; }
    long long zeta_of(int d) const;
    long long mu(int d) const { return m * zeta_of(d); }
    long long max_mu() const;
};

// Example multipliers zeta(d) = 2^d (d >= 0), 2^{2m+d-1} (d < 0); delta left unset
degeneracy_plan plan_multipliers(int m);

// validated plan: rejects delta when masks of distinct branches would overlap
degeneracy_plan plan_default(int m, double delta);
degeneracy_plan make_plan(int m, std::vector<long long> zeta, double delta);

// smallest circular distance between centers belonging to distinct orders
// (same-order spacing included, since each arc must stay separate too)
double min_center_gap(const degeneracy_plan& plan);
double max_disjoint_delta(const degeneracy_plan& plan);

// N divisible by 2 * max mu so every center lands on a bin
void check_plan_grid(const degeneracy_plan& plan, std::size_t N);
std::size_t default_grid(const degeneracy_plan& plan);

}  // namespace sparsamp
