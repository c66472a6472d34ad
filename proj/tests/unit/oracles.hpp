#pragma once

// Independent reference computations for the tests: direct O(N^2) sums and
// exhaustive scans, deliberately free of the library's fast paths.

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "sparsamp/sequence.hpp"

namespace oracle {

using cplx = std::complex<double>;
constexpr double pi = std::numbers::pi;

inline double omega(std::size_t j, std::size_t N) {
    double w = 2.0 * pi * static_cast<double>(j) / static_cast<double>(N);
    if (w > pi) w -= 2.0 * pi;
    return w;
}

// X_j = sum_k x(k) e^{-i w_j k}
inline std::vector<cplx> dft(const sparsamp::sequence& x, std::size_t N) {
    std::vector<cplx> X(N);
    for (std::size_t j = 0; j < N; ++j) {
        cplx s{};
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double k = static_cast<double>(x.origin + static_cast<long long>(i));
            s += x.values[i] * std::polar(1.0, -omega(j, N) * k);
        }
        X[j] = s;
    }
    return X;
}

// x(k) = (1/N) sum_j X_j e^{i w_j k}
inline cplx idft_at(const std::vector<cplx>& X, long long k) {
    cplx s{};
    const std::size_t N = X.size();
    for (std::size_t j = 0; j < N; ++j) s += X[j] * std::polar(1.0, omega(j, N) * static_cast<double>(k));
    return s / static_cast<double>(N);
}

inline sparsamp::sequence random_sequence(long long origin, std::size_t len, std::uint64_t seed) {
    std::mt19937_64 g(seed);
    std::normal_distribution<double> nd;
    sparsamp::sequence x;
    x.origin = origin;
    for (std::size_t i = 0; i < len; ++i) {
        const double re = nd(g);
        const double im = nd(g);
        x.values.emplace_back(re, im);
    }
    return x;
}

inline sparsamp::sequence impulse(long long at) { return sparsamp::sequence(at, {cplx(1.0, 0.0)}); }

inline double circ(double a, double b) {
    double d = std::fabs(a - b);
    while (d > 2 * pi) d -= 2 * pi;
    return std::min(d, 2 * pi - d);
}

// all bins within delta of an odd multiple of pi/n, by scanning every bin
// against every center; a bin sitting on the boundary counts as inside
inline std::vector<std::size_t> mask_scan(long long n, double delta, std::size_t N) {
    std::vector<std::size_t> out;
    for (std::size_t j = 0; j < N; ++j) {
        bool in = false;
        for (long long k = 0; k < n; ++k) {
            const double s = (2.0 * static_cast<double>(k) - 1.0) * pi / static_cast<double>(n);
            if (circ(omega(j, N), s) <= delta * (1 + 1e-12)) in = true;
        }
        if (in) out.push_back(j);
    }
    return out;
}

}  // namespace oracle
