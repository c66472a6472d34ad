#include "sparsamp/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace sparsamp {

namespace {

constexpr double two_pi = 2.0 * std::numbers::pi;

std::size_t wrap(long long j, std::size_t N) {
    const auto n = static_cast<long long>(N);
    long long r = j % n;
    if (r < 0) r += n;
    return static_cast<std::size_t>(r);
}

void require_even(std::size_t N, const char* who) {
    if (N == 0 || N % 2 != 0) throw std::invalid_argument(std::string(who) + ": grid size must be even and positive");
}

}  // namespace

double grid_omega(std::size_t j, std::size_t N) { return grid_omega_as<double>(j, N); }

std::vector<std::size_t> ascending_bins(std::size_t N) {
    // w_j ascending: j = N/2+1 .. N-1 (negative side), then 0 .. N/2
    std::vector<std::size_t> out;
    out.reserve(N);
    for (std::size_t j = N / 2 + 1; j < N; ++j) out.push_back(j);
    for (std::size_t j = 0; j <= N / 2 && j < N; ++j) out.push_back(j);
    return out;
}

template <class Real>
basic_spectrum<Real> analyze(const basic_sequence<Real>& x, std::size_t N) {
    require_even(N, "analyze");
    if (x.size() > N) {
        std::ostringstream msg;
        msg << "analyze: window of length " << x.size() << " does not fit a grid of " << N << " bins";
        throw std::invalid_argument(msg.str());
    }
    basic_spectrum<Real> X(N);
    // bin j only depends on k mod N, so the true index is honoured by placing
    // x(k) at slot k mod N
    for (std::size_t i = 0; i < x.size(); ++i) X.bins[wrap(x.origin + static_cast<long long>(i), N)] = x.values[i];
    fft_inplace(X.bins, -1);
    return X;
}

template <class Real>
basic_sequence<Real> synthesize(const basic_spectrum<Real>& X, index_range window) {
    const std::size_t N = X.size();
    require_even(N, "synthesize");
    if (static_cast<std::size_t>(window.length()) > N)
        throw std::invalid_argument("synthesize: window longer than the grid");
    std::vector<std::complex<Real>> a = X.bins;
    fft_inplace(a, +1);
    auto out = basic_sequence<Real>::zeros(window);
    const Real scale = Real(1) / Real(static_cast<long long>(N));
    for (index_t k = window.lo; k <= window.hi; ++k)
        out.values[static_cast<std::size_t>(k - window.lo)] = a[wrap(k, N)] * scale;
    return out;
}

double circular_distance(double a, double b) {
    double d = std::fmod(std::fabs(a - b), two_pi);
    return std::min(d, two_pi - d);
}

std::vector<double> degeneracy_points(long long n) {
    if (n < 1) throw std::invalid_argument("degeneracy_points: order must be >= 1");
    std::vector<double> pts;
    pts.reserve(static_cast<std::size_t>(n));
    for (long long k = 0; k < n; ++k) {
        // (2k - 1) pi / n, folded into (-pi, pi] with exact integer arithmetic
        long long odd = 2 * k - 1;  // numerator in units of pi/n
        const long long period = 2 * n;
        odd %= period;
        if (odd <= -n) odd += period;
        if (odd > n) odd -= period;
        pts.push_back(std::numbers::pi * static_cast<double>(odd) / static_cast<double>(n));
    }
    std::sort(pts.begin(), pts.end());
    return pts;
}

bool frequency_mask::contains(std::size_t j) const { return std::binary_search(bins.begin(), bins.end(), j); }

double frequency_mask::measure() const {
    return grid == 0 ? 0.0 : static_cast<double>(bins.size()) * two_pi / static_cast<double>(grid);
}

frequency_mask build_mask(long long n, double delta, std::size_t N) {
    require_even(N, "build_mask");
    if (n < 1) throw std::invalid_argument("build_mask: order must be >= 1");
    if (!(delta > 0)) throw std::invalid_argument("build_mask: half width must be positive");
    if (delta >= std::numbers::pi / static_cast<double>(n))
        throw std::invalid_argument("build_mask: half width must stay below pi/n");
    frequency_mask mask;
    mask.order = n;
    mask.half_width = delta;
    mask.grid = N;
    // Bin j sits at 2 pi j / N, centre k at (2k - 1) pi / n; in units of
    // pi / (n N) their offset is the integer |2 n j - (2k - 1) N|, so only the
    // comparison with delta is inexact.  Bins on the boundary are kept.
    const auto NN = static_cast<long long>(N);
    const long long period = 2 * n * NN;
    const double limit = delta / std::numbers::pi * static_cast<double>(n) * static_cast<double>(N) * (1 + 1e-12);
    const double step = two_pi / static_cast<double>(N);
    for (long long k = 0; k < n; ++k) {
        const long long centre = (2 * k - 1) * NN;  // 2 n * (bin position of the centre)
        const long long reach = static_cast<long long>(std::ceil(delta / step)) + 1;
        const long long c0 = centre >= 0 ? centre / (2 * n) : -((-centre) / (2 * n));
        for (long long j = c0 - reach - 1; j <= c0 + reach + 1; ++j) {
            long long off = (2 * n * j - centre) % period;
            if (off < 0) off += period;
            off = std::min(off, period - off);
            if (static_cast<double>(off) <= limit) mask.bins.push_back(wrap(j, N));
        }
    }
    std::sort(mask.bins.begin(), mask.bins.end());
    mask.bins.erase(std::unique(mask.bins.begin(), mask.bins.end()), mask.bins.end());
    return mask;
}

template <class Real>
basic_spectrum<Real> apply_mask(const basic_spectrum<Real>& X, const frequency_mask& mask, mask_mode mode) {
    if (X.size() != mask.grid) throw std::invalid_argument("apply_mask: mask built on a different grid");
    basic_spectrum<Real> out = X;
    if (mode == mask_mode::zero_inside) {
        for (std::size_t j : mask.bins) out.bins[j] = {};
    } else {
        std::vector<char> keep(X.size(), 0);
        for (std::size_t j : mask.bins) keep[j] = 1;
        for (std::size_t j = 0; j < out.size(); ++j)
            if (!keep[j]) out.bins[j] = {};
    }
    return out;
}

template <class Real>
membership_result membership_V(const basic_sequence<Real>& x, double delta, long long n, std::size_t N, double tol) {
    const auto X = analyze(x, N);
    const auto mask = build_mask(n, delta, N);
    Real peak = 0, inside = 0;
    for (const auto& v : X.bins) peak = std::max(peak, cabs(v));
    for (std::size_t j : mask.bins) inside = std::max(inside, cabs(X.bins[j]));
    membership_result r;
    r.residual = static_cast<double>(inside);
    r.scale = 1.0 + static_cast<double>(peak);
    r.member = r.residual <= tol * r.scale;
    return r;
}

long long degeneracy_plan::zeta_of(int d) const {
    if (d < d_min() || d > d_max()) throw std::out_of_range("degeneracy_plan: branch index out of range");
    return zeta[static_cast<std::size_t>(d + m - 1)];
}

long long degeneracy_plan::max_mu() const {
    long long best = 0;
    for (long long z : zeta) best = std::max(best, m * z);
    return best;
}

degeneracy_plan plan_multipliers(int m) {
    if (m < 1) throw std::invalid_argument("plan: m must be >= 1");
    if (m > 8) throw std::invalid_argument("plan: m > 8 gives multipliers beyond any practical grid");
    degeneracy_plan p;
    p.m = m;
    for (int d = -m + 1; d <= m - 1; ++d) {
        const int e = d >= 0 ? d : 2 * m + d - 1;
        p.zeta.push_back(1LL << e);
    }
    return p;
}

double min_center_gap(const degeneracy_plan& plan) {
    struct center {
        double w;
        int d;
    };
    std::vector<center> cs;
    for (int d = plan.d_min(); d <= plan.d_max(); ++d)
        for (double w : degeneracy_points(plan.mu(d))) cs.push_back({w, d});
    double gap = two_pi;
    for (std::size_t a = 0; a < cs.size(); ++a)
        for (std::size_t b = a + 1; b < cs.size(); ++b) gap = std::min(gap, circular_distance(cs[a].w, cs[b].w));
    return gap;
}

double max_disjoint_delta(const degeneracy_plan& plan) { return 0.5 * min_center_gap(plan); }

degeneracy_plan make_plan(int m, std::vector<long long> zeta, double delta) {
    if (m < 1) throw std::invalid_argument("plan: m must be >= 1");
    if (zeta.size() != static_cast<std::size_t>(2 * m - 1))
        throw std::invalid_argument("plan: need one multiplier per branch");
    for (long long z : zeta)
        if (z < 1) throw std::invalid_argument("plan: multipliers must be positive");
    if (!(delta > 0)) throw std::invalid_argument("plan: delta must be positive");
    degeneracy_plan p;
    p.m = m;
    p.zeta = std::move(zeta);
    p.delta = delta;
    const double gap = min_center_gap(p);
    // touching arcs (2 delta == gap) are accepted; anything wider overlaps
    if (2.0 * delta > gap * (1.0 + 1e-12)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "plan: masks overlap at delta=" << delta << " (minimum center gap " << gap << ", largest admissible delta "
            << gap / 2 << ")";
        throw std::invalid_argument(msg.str());
    }
    return p;
}

degeneracy_plan plan_default(int m, double delta) {
    auto base = plan_multipliers(m);
    return make_plan(m, base.zeta, delta);
}

void check_plan_grid(const degeneracy_plan& plan, std::size_t N) {
    require_even(N, "plan grid");
    const auto need = static_cast<std::size_t>(2 * plan.max_mu());
    if (N % need != 0) {
        std::ostringstream msg;
        msg << "plan grid: N=" << N << " must be divisible by " << need << " so every degeneracy point is a bin";
        throw std::invalid_argument(msg.str());
    }
}

std::size_t default_grid(const degeneracy_plan& plan) {
    const auto need = static_cast<std::size_t>(2 * plan.max_mu());
    return std::lcm(std::size_t{4096}, need);
}

template basic_spectrum<double> analyze(const basic_sequence<double>&, std::size_t);
template basic_spectrum<quad> analyze(const basic_sequence<quad>&, std::size_t);
template basic_sequence<double> synthesize(const basic_spectrum<double>&, index_range);
template basic_sequence<quad> synthesize(const basic_spectrum<quad>&, index_range);
template basic_spectrum<double> apply_mask(const basic_spectrum<double>&, const frequency_mask&, mask_mode);
template basic_spectrum<quad> apply_mask(const basic_spectrum<quad>&, const frequency_mask&, mask_mode);
template membership_result membership_V(const basic_sequence<double>&, double, long long, std::size_t, double);
template membership_result membership_V(const basic_sequence<quad>&, double, long long, std::size_t, double);

}  // namespace sparsamp
