#pragma once

// Scalar helpers shared by the double and binary128 code paths.  libstdc++'s
// generic std::complex<T> routes abs/exp through unqualified calls that do not
// resolve for __float128, so everything complex goes through these helpers.

#include <cmath>
#include <complex>
#include <limits>
#include <numbers>

#include <quadmath.h>

namespace sparsamp {

using quad = __float128;

template <class Real>
struct num;

template <>
struct num<double> {
    static double exp(double x) { return std::exp(x); }
    static double log(double x) { return std::log(x); }
    static double sin(double x) { return std::sin(x); }
    static double cos(double x) { return std::cos(x); }
    static double sqrt(double x) { return std::sqrt(x); }
    static double pow(double x, double y) { return std::pow(x, y); }
    static double hypot(double x, double y) { return std::hypot(x, y); }
    static double atan2(double y, double x) { return std::atan2(y, x); }
    static double fabs(double x) { return std::fabs(x); }
    static bool finite(double x) { return std::isfinite(x); }
    static double pi() { return std::numbers::pi; }
    static double epsilon() { return std::numeric_limits<double>::epsilon(); }
};

template <>
struct num<quad> {
    static quad exp(quad x) { return expq(x); }
    static quad log(quad x) { return logq(x); }
    static quad sin(quad x) { return sinq(x); }
    static quad cos(quad x) { return cosq(x); }
    static quad sqrt(quad x) { return sqrtq(x); }
    static quad pow(quad x, quad y) { return powq(x, y); }
    static quad hypot(quad x, quad y) { return hypotq(x, y); }
    static quad atan2(quad y, quad x) { return atan2q(y, x); }
    static quad fabs(quad x) { return fabsq(x); }
    static bool finite(quad x) { return finiteq(x) != 0; }
    static quad pi() { return M_PIq; }
    static quad epsilon() { return FLT128_EPSILON; }
};

template <class Real>
inline Real cabs(const std::complex<Real>& z) {
    return num<Real>::hypot(z.real(), z.imag());
}

template <class Real>
inline Real norm2(const std::complex<Real>& z) {
    return z.real() * z.real() + z.imag() * z.imag();
}

// e^{i theta}
template <class Real>
inline std::complex<Real> unit(Real theta) {
    return {num<Real>::cos(theta), num<Real>::sin(theta)};
}

template <class Real>
inline std::complex<Real> cexp(const std::complex<Real>& z) {
    const Real a = num<Real>::exp(z.real());
    return {a * num<Real>::cos(z.imag()), a * num<Real>::sin(z.imag())};
}

// principal branch
template <class Real>
inline std::complex<Real> clog(const std::complex<Real>& z) {
    return {num<Real>::log(cabs(z)), num<Real>::atan2(z.imag(), z.real())};
}

template <class Real>
inline bool cfinite(const std::complex<Real>& z) {
    return num<Real>::finite(z.real()) && num<Real>::finite(z.imag());
}

template <class To, class From>
inline std::complex<To> ccast(const std::complex<From>& z) {
    return {static_cast<To>(z.real()), static_cast<To>(z.imag())};
}

}  // namespace sparsamp
