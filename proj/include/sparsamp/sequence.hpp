#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "sparsamp/numeric.hpp"

namespace sparsamp {

using index_t = std::int64_t;

// inclusive integer range [lo, hi]; empty when hi < lo
struct index_range {
    index_t lo = 0;
    index_t hi = -1;

    index_t length() const { return hi >= lo ? hi - lo + 1 : 0; }
    bool contains(index_t k) const { return k >= lo && k <= hi; }
};

// Finitely supported sequence: values[k - origin] inside the window, exact
// zero everywhere else.
template <class Real>
struct basic_sequence {
    using value_type = std::complex<Real>;

    index_t origin = 0;
    std::vector<value_type> values;

    basic_sequence() = default;
    basic_sequence(index_t origin_, std::vector<value_type> values_)
        : origin(origin_), values(std::move(values_)) {}

    static basic_sequence zeros(index_range w) {
        return basic_sequence(w.lo, std::vector<value_type>(static_cast<std::size_t>(w.length())));
    }

    std::size_t size() const { return values.size(); }
    bool empty() const { return values.empty(); }
    index_t first() const { return origin; }
    index_t last() const { return origin + static_cast<index_t>(values.size()) - 1; }
    index_range window() const { return {first(), last()}; }
    bool in_window(index_t k) const { return k >= first() && k <= last(); }

    value_type at(index_t k) const {
        return in_window(k) ? values[static_cast<std::size_t>(k - origin)] : value_type{};
    }
    value_type& ref(index_t k) {
        if (!in_window(k)) throw std::out_of_range("sequence: index outside window");
        return values[static_cast<std::size_t>(k - origin)];
    }

    Real norm_squared() const {
        Real s = 0;
        for (const auto& v : values) s += norm2(v);
        return s;
    }
    Real norm() const { return num<Real>::sqrt(norm_squared()); }
    Real sup_norm() const {
        Real s = 0;
        for (const auto& v : values) {
            const Real a = cabs(v);
            if (a > s) s = a;
        }
        return s;
    }
    bool is_zero() const {
        for (const auto& v : values)
            if (v != value_type{}) return false;
        return true;
    }

    // same values on a (possibly larger or smaller) window
    basic_sequence rewindow(index_range w) const {
        basic_sequence out = zeros(w);
        for (index_t k = w.lo; k <= w.hi; ++k) out.values[static_cast<std::size_t>(k - w.lo)] = at(k);
        return out;
    }
};

using sequence = basic_sequence<double>;
using cplx = std::complex<double>;

// x - y over the union of both windows
template <class Real>
basic_sequence<Real> difference(const basic_sequence<Real>& x, const basic_sequence<Real>& y) {
    if (x.empty() && y.empty()) return {};
    index_range w{x.empty() ? y.first() : x.first(), x.empty() ? y.last() : x.last()};
    if (!y.empty()) {
        w.lo = std::min(w.lo, y.first());
        w.hi = std::max(w.hi, y.last());
    }
    auto out = basic_sequence<Real>::zeros(w);
    for (index_t k = w.lo; k <= w.hi; ++k) out.values[static_cast<std::size_t>(k - w.lo)] = x.at(k) - y.at(k);
    return out;
}

template <class Real>
Real distance(const basic_sequence<Real>& x, const basic_sequence<Real>& y) {
    return difference(x, y).norm();
}

}  // namespace sparsamp
