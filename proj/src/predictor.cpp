#include "sparsamp/predictor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace sparsamp {

namespace {

std::size_t slot(long long k, std::size_t N) {
    const auto n = static_cast<long long>(N);
    long long r = k % n;
    if (r < 0) r += n;
    return static_cast<std::size_t>(r);
}

bool on_lattice(long long k, long long n, long long stride) {
    return k >= n * stride - n && (k + n) % stride == 0;
}

}  // namespace

double predictor_params::alpha() const { return 1.0 - std::pow(gamma, -r); }

void predictor_params::validate() const {
    if (!(gamma > 1.0)) throw std::invalid_argument("predictor: gamma must exceed 1 (pole of V reaches the circle)");
    if (!(r > 0.0)) throw std::invalid_argument("predictor: r must be positive");
    if (n < 1) throw std::invalid_argument("predictor: horizon must be >= 1");
    if (nu < 1 || m < 1) throw std::invalid_argument("predictor: nu and m must be >= 1");
}

template <class Real>
std::complex<Real> eval_V_as(Real omega, double gamma, double r) {
    if (!(gamma > 1.0)) throw std::invalid_argument("eval_V: gamma must exceed 1");
    if (!(r > 0.0)) throw std::invalid_argument("eval_V: r must be positive");
    const Real g = gamma;
    const Real alpha = Real(1) - num<Real>::pow(g, -Real(r));
    const std::complex<Real> w = unit(omega) + std::complex<Real>(alpha, 0);
    const Real w2 = norm2(w);
    const std::complex<Real> q(-g * w.real() / w2, g * w.imag() / w2);  // -gamma / w
    return std::complex<Real>(1, 0) - cexp(q);
}

template <class Real>
std::complex<Real> log_V_as(Real omega, double gamma, double r) {
    if (!(gamma > 1.0)) throw std::invalid_argument("eval_V: gamma must exceed 1");
    const Real g = gamma;
    const Real alpha = Real(1) - num<Real>::pow(g, -Real(r));
    const std::complex<Real> w = unit(omega) + std::complex<Real>(alpha, 0);
    const Real w2 = norm2(w);
    const std::complex<Real> q(-g * w.real() / w2, g * w.imag() / w2);
    if (q.real() < Real(30)) return clog(std::complex<Real>(1, 0) - cexp(q));
    // 1 - e^q = -e^q (1 - e^{-q})
    const std::complex<Real> mq(-q.real(), -q.imag());
    return q + std::complex<Real>(0, num<Real>::pi()) + clog(std::complex<Real>(1, 0) - cexp(mq));
}

template <class Real>
std::complex<Real> eval_H_as(Real omega, const predictor_params& p) {
    p.validate();
    const Real n = Real(p.n);
    const std::complex<Real> lv = log_V_as<Real>(Real(p.stride()) * omega, p.gamma, p.r);
    return cexp(std::complex<Real>(n * lv.real(), n * lv.imag() + n * omega));
}

std::complex<double> eval_V(double omega, double gamma, double r) { return eval_V_as<double>(omega, gamma, r); }

std::complex<double> eval_V_at(std::complex<double> z, double gamma, double r) {
    if (!(gamma > 1.0)) throw std::invalid_argument("eval_V: gamma must exceed 1");
    if (!(r > 0.0)) throw std::invalid_argument("eval_V: r must be positive");
    const double alpha = 1.0 - std::pow(gamma, -r);
    return 1.0 - std::exp(-gamma / (z + alpha));
}

std::complex<double> eval_H(double omega, const predictor_params& p) { return eval_H_as<double>(omega, p); }

std::vector<double> v_coefficients(double gamma, double r, std::size_t N) {
    if (N == 0 || N % 2) throw std::invalid_argument("v_coefficients: grid size must be even");
    std::vector<std::complex<double>> a(N);
    for (std::size_t j = 0; j < N; ++j) a[j] = eval_V(grid_omega(j, N), gamma, r);
    fft_inplace(a, +1);
    std::vector<double> v(N);
    const auto half = static_cast<long long>(N / 2);
    for (long long k = -half; k < half; ++k)
        v[static_cast<std::size_t>(k + half)] = a[slot(k, N)].real() / static_cast<double>(N);
    return v;
}

template <class Real>
double basic_predictor_kernel<Real>::tap(long long k) const {
    auto it = std::lower_bound(index.begin(), index.end(), k);
    if (it == index.end() || *it != k) return 0.0;
    return static_cast<double>(taps[static_cast<std::size_t>(it - index.begin())]);
}

template <class Real>
basic_predictor_kernel<Real> extract_kernel_as(const predictor_params& p, std::size_t N, long long K, double tail_tol,
                                               double leakage_tol) {
    p.validate();
    if (N == 0 || N % 2) throw std::invalid_argument("extract_kernel: grid size must be even");
    const long long stride = p.stride();
    const long long first = p.n * stride - p.n;
    if (K > 0) {
        if (K < stride * p.n) throw std::invalid_argument("extract_kernel: K must be >= nu*m*n");
        if (static_cast<long long>(N) < 4 * K) throw std::invalid_argument("extract_kernel: need N >= 4K");
    }
    if (first >= static_cast<long long>(N / 4))
        throw std::invalid_argument("extract_kernel: grid too small for the first lattice tap");

    std::vector<std::complex<Real>> a(N);
    Real peak = 0;
    for (std::size_t j = 0; j < N; ++j) {
        a[j] = eval_H_as<Real>(grid_omega_as<Real>(j, N), p);
        if (!cfinite(a[j]))
            throw std::range_error("extract_kernel: transfer gain exceeds the floating-point range (gamma too large)");
        peak = std::max(peak, cabs(a[j]));
    }
    fft_inplace(a, +1);
    const Real scale = Real(1) / Real(static_cast<long long>(N));
    for (auto& v : a) v *= scale;

    const auto half = static_cast<long long>(N / 2);
    Real max_tap = 0;
    std::vector<long long> lat;
    for (long long k = first; k < half; k += stride) {
        lat.push_back(k);
        max_tap = std::max(max_tap, cabs(a[slot(k, N)]));
    }
    basic_predictor_kernel<Real> h;
    h.params = p;
    h.N = N;
    h.kappa = static_cast<double>(peak);
    if (max_tap == Real(0)) throw std::runtime_error("extract_kernel: all lattice taps vanish");

    Real off = 0, coarse = 0;
    for (long long k = -half; k < half; ++k) {
        const Real mag = cabs(a[slot(k, N)]);
        if (!on_lattice(k, p.n, stride)) off = std::max(off, mag);
        if (!on_lattice(k, p.n, p.m)) coarse = std::max(coarse, mag);
    }
    h.leakage = static_cast<double>(off / max_tap);
    h.coarse_leakage = static_cast<double>(coarse / max_tap);

    // l1 tail along the lattice, accumulated from the far end
    // and the largest remaining tap; once that is at the roundoff level seen
    // off the lattice (exactly zero in exact arithmetic) nothing real is left
    std::vector<Real> tail(lat.size() + 1, Real(0)), rest(lat.size() + 1, Real(0));
    for (std::size_t i = lat.size(); i-- > 0;) {
        const Real mag = cabs(a[slot(lat[i], N)]);
        tail[i] = tail[i + 1] + mag;
        rest[i] = std::max(rest[i + 1], mag);
    }
    const Real noise = Real(8) * off;
    const long long cap = static_cast<long long>(N / 4);
    std::size_t keep = 0;  // number of lattice taps retained
    if (K > 0) {
        while (keep < lat.size() && lat[keep] <= K) ++keep;
    } else {
        keep = 1;
        while (keep < lat.size() && lat[keep] <= cap && tail[keep] > Real(tail_tol) && rest[keep] > noise) ++keep;
    }
    h.K = K > 0 ? K : lat[keep - 1];
    h.tail_l1 = static_cast<double>(tail[keep]);
    Real imag = 0;
    for (std::size_t i = 0; i < keep; ++i) {
        const auto v = a[slot(lat[i], N)];
        h.index.push_back(lat[i]);
        h.taps.push_back(v.real());
        imag = std::max(imag, num<Real>::fabs(v.imag()));
    }
    h.imag_residue = static_cast<double>(imag / max_tap);
    if (h.leakage > leakage_tol) {
        std::ostringstream msg;
        msg << "extract_kernel: off-lattice leakage " << h.leakage << " exceeds " << leakage_tol
            << "; the grid is too coarse for these parameters";
        throw kernel_leakage(msg.str(), h.leakage);
    }
    return h;
}

predictor_kernel extract_kernel(const predictor_params& p, std::size_t N, long long K, double tail_tol,
                                double leakage_tol) {
    return extract_kernel_as<double>(p, N, K, tail_tol, leakage_tol);
}

template <class Real>
basic_prediction<Real> predict(const basic_predictor_kernel<Real>& h, const basic_sequence<Real>& history, index_t k) {
    basic_prediction<Real> out;
    for (std::size_t i = 0; i < h.taps.size(); ++i) {
        const index_t at = k - h.index[i];
        if (!history.in_window(at)) {
            ++out.missing;
            continue;
        }
        out.value += h.taps[i] * history.values[static_cast<std::size_t>(at - history.origin)];
    }
    return out;
}

double log_kappa(const predictor_params& p, std::size_t N) {
    p.validate();
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < N; ++j) {
        const double w = grid_omega(j, N);
        best = std::max(best, static_cast<double>(p.n) * log_V_as<double>(static_cast<double>(p.stride()) * w, p.gamma,
                                                                           p.r)
                                                              .real());
    }
    return best;
}

double kappa(const predictor_params& p, std::size_t N) { return std::exp(log_kappa(p, N)); }

std::vector<std::pair<double, double>> error_curve(const predictor_params& p, std::size_t N) {
    p.validate();
    std::vector<std::pair<double, double>> out;
    out.reserve(N);
    for (std::size_t j : ascending_bins(N)) {
        const double w = grid_omega(j, N);
        const auto shift = unit(w * static_cast<double>(p.n));
        out.emplace_back(w, std::abs(eval_H(w, p) - shift));
    }
    return out;
}

tune_result tune_gamma(double delta, long long nu, long long m, long long n, double target,
                       const std::vector<double>& schedule, double r, std::size_t N) {
    if (schedule.empty()) throw std::invalid_argument("tune_gamma: empty schedule");
    for (std::size_t i = 1; i < schedule.size(); ++i)
        if (!(schedule[i] > schedule[i - 1])) throw std::invalid_argument("tune_gamma: schedule must increase");
    const auto mask = build_mask(nu * m, delta, N);
    std::vector<char> inside(N, 0);
    for (std::size_t j : mask.bins) inside[j] = 1;

    tune_result best;
    best.achieved = std::numeric_limits<double>::infinity();
    for (double g : schedule) {
        predictor_params p{g, r, n, nu, m};
        p.validate();
        double sup = 0, l2 = 0;
        std::size_t count = 0;
        for (std::size_t j = 0; j < N; ++j) {
            if (inside[j]) continue;
            const double w = grid_omega(j, N);
            const auto lv = log_V_as<double>(static_cast<double>(nu * m) * w, g, r);
            const double e = static_cast<double>(n) * lv.real();
            // |V^n - 1|, with overflow mapped to +inf
            const double res = e > 700 ? std::numeric_limits<double>::infinity()
                                       : std::abs(std::exp(std::complex<double>(e, static_cast<double>(n) * lv.imag())) -
                                                  1.0);
            sup = std::max(sup, res);
            l2 += res * res;
            ++count;
        }
        l2 = count ? std::sqrt(l2 / static_cast<double>(count)) : 0.0;
        best.trace.emplace_back(g, sup);
        if (best.gamma == 0 || sup < best.achieved) {
            best.gamma = g;
            best.achieved = sup;
            best.achieved_l2 = l2;
        }
        if (sup <= target) {
            best.gamma = g;
            best.achieved = sup;
            best.achieved_l2 = l2;
            best.met = true;
            return best;
        }
    }
    return best;
}

std::vector<double> doubling_schedule(double first, double last) {
    if (!(first > 0) || last < first) throw std::invalid_argument("doubling_schedule: bad range");
    std::vector<double> s;
    for (double g = first; g <= last * (1 + 1e-12); g *= 2) s.push_back(g);
    return s;
}

template std::complex<double> eval_V_as(double, double, double);
template std::complex<quad> eval_V_as(quad, double, double);
template std::complex<double> log_V_as(double, double, double);
template std::complex<quad> log_V_as(quad, double, double);
template std::complex<double> eval_H_as(double, const predictor_params&);
template std::complex<quad> eval_H_as(quad, const predictor_params&);
template struct basic_predictor_kernel<double>;
template struct basic_predictor_kernel<quad>;
template basic_predictor_kernel<double> extract_kernel_as(const predictor_params&, std::size_t, long long, double,
                                                          double);
template basic_predictor_kernel<quad> extract_kernel_as(const predictor_params&, std::size_t, long long, double,
                                                        double);
template basic_prediction<double> predict(const basic_predictor_kernel<double>&, const basic_sequence<double>&, index_t);
template basic_prediction<quad> predict(const basic_predictor_kernel<quad>&, const basic_sequence<quad>&, index_t);

}  // namespace sparsamp
