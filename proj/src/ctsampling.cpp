#include "sparsamp/ctsampling.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <sstream>

#include "sparsamp/branching.hpp"

namespace sparsamp {

namespace {

constexpr double pi = std::numbers::pi;

// 16-point Gauss-Legendre nodes/weights on [-1, 1] (positive half)
constexpr std::array<double, 8> gl_x = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                                        0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                                        0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> gl_w = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                                        0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                                        0.0622535239386479, 0.0271524594117541};

// nodes and weights of a composite rule on [a, b]
void gauss_panels(double a, double b, int panels, std::vector<double>& x, std::vector<double>& w) {
    x.clear();
    w.clear();
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h;
        for (std::size_t i = 0; i < gl_x.size(); ++i) {
            for (int s : {-1, 1}) {
                x.push_back(c + s * 0.5 * h * gl_x[i]);
                w.push_back(0.5 * h * gl_w[i]);
            }
        }
    }
}

// sup and trapezoid energy of |f~ - f| on a dense grid over [-T, T]
struct dense_stats {
    double sup = 0;
    double energy = 0;
    double T = 0;
    std::size_t points = 0;
};

dense_stats dense_difference(const sequence& dx, double tau, int density) {
    dense_stats s;
    if (dx.empty()) return s;
    const index_t reach = std::max(std::abs(dx.first()), std::abs(dx.last())) + 8;
    s.T = tau * static_cast<double>(reach);
    const double h = tau / density;
    const auto vals = cardinal_on_grid(dx, density, -reach * density, reach * density);
    for (std::size_t i = 0; i < vals.size(); ++i) {
        const double a = std::abs(vals[i]);
        s.sup = std::max(s.sup, a);
        s.energy += (i == 0 || i + 1 == vals.size() ? 0.5 : 1.0) * a * a * h;
    }
    s.points = vals.size();
    return s;
}

}  // namespace

std::vector<cplx> cardinal_on_grid(const sequence& c, int density, index_t i_lo, index_t i_hi) {
    if (density < 1) throw std::invalid_argument("cardinal_on_grid: density must be >= 1");
    std::vector<cplx> out(static_cast<std::size_t>(std::max<index_t>(0, i_hi - i_lo + 1)));
    if (c.empty() || out.empty()) return out;
    const index_t D = density;
    auto floor_div = [](index_t a, index_t b) { return a >= 0 ? a / b : -((-a + b - 1) / b); };
    // u = j + a with a = r/D: f(u) = (-1)^j sin(pi a)/pi * sum_k (-1)^k x(k) / (j - k + a)
    std::vector<cplx> alt(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) alt[i] = ((c.first() + static_cast<index_t>(i)) % 2 ? -1.0 : 1.0) * c.values[i];
    for (index_t r = 0; r < D; ++r) {
        const index_t j_lo = floor_div(i_lo - r + D - 1, D), j_hi = floor_div(i_hi - r, D);
        if (j_hi < j_lo) continue;
        if (r == 0) {
            for (index_t j = j_lo; j <= j_hi; ++j) out[static_cast<std::size_t>(j * D - i_lo)] = c.at(j);
            continue;
        }
        const double a = static_cast<double>(r) / static_cast<double>(D);
        // linear convolution of alt (k) with g(l) = 1/(l + a), l in [j_lo - k_hi, j_hi - k_lo]
        const index_t l_lo = j_lo - c.last();
        const auto n_c = static_cast<std::size_t>(c.size());
        const auto n_g = static_cast<std::size_t>(j_hi - c.first() - l_lo + 1);
        std::size_t P = 1;
        while (P < n_c + n_g) P <<= 1;
        std::vector<cplx> A(P), G(P);
        std::copy(alt.begin(), alt.end(), A.begin());
        for (std::size_t i = 0; i < n_g; ++i) G[i] = 1.0 / (static_cast<double>(l_lo + static_cast<index_t>(i)) + a);
        fft_inplace(A, -1);
        fft_inplace(G, -1);
        for (std::size_t i = 0; i < P; ++i) A[i] *= G[i];
        fft_inplace(A, +1);
        const double amp = std::sin(pi * a) / pi / static_cast<double>(P);
        for (index_t j = j_lo; j <= j_hi; ++j) {
            // conv index: (k - c.first) + (l - l_lo) with l = j - k
            const auto idx = static_cast<std::size_t>(j - c.first() - l_lo);
            out[static_cast<std::size_t>(j * D + r - i_lo)] = ((j % 2) ? -amp : amp) * A[idx];
        }
    }
    return out;
}

double sinc(double u) {
    if (std::fabs(u) < 1e-4) {
        const double u2 = u * u;
        return 1.0 - u2 / 6.0 + u2 * u2 / 120.0;
    }
    return std::sin(u) / u;
}

sampled_bandlimited lift_to_ct(const sequence& x, double tau) {
    if (!(tau > 0)) throw std::invalid_argument("lift_to_ct: tau must be positive");
    return {tau, x};
}

ct_value evaluate(const sampled_bandlimited& f, double t, index_t K) {
    if (K < 1) throw std::invalid_argument("evaluate: K must be >= 1");
    ct_value out;
    if (f.coeffs.empty()) return out;
    const double u = t / f.tau;
    const auto k0 = static_cast<index_t>(std::llround(u));
    for (index_t k = f.coeffs.first(); k <= f.coeffs.last(); ++k) {
        const cplx c = f.coeffs.at(k);
        if (std::abs(k - k0) <= K) {
            out.value += c * sinc(pi * (u - static_cast<double>(k)));
        } else {
            out.tail_bound += std::abs(c) / (pi * std::fabs(u - static_cast<double>(k)));
        }
    }
    return out;
}

cplx evaluate_full(const sampled_bandlimited& f, double t) {
    cplx s{};
    const double u = t / f.tau;
    for (index_t k = f.coeffs.first(); k <= f.coeffs.last(); ++k)
        s += f.coeffs.at(k) * sinc(pi * (u - static_cast<double>(k)));
    return s;
}

cplx dtft(const sequence& x, double w) {
    if (x.empty()) return {};
    const cplx step = std::polar(1.0, -w);
    cplx z = std::polar(1.0, -w * static_cast<double>(x.first()));
    cplx s{};
    for (std::size_t i = 0; i < x.size(); ++i) {
        s += x.values[i] * z;
        z *= step;
        // keep the recurrence on the circle
        if ((i & 63) == 63) z /= std::abs(z);
    }
    return s;
}

spectrum_ct ct_spectrum(const sampled_bandlimited& f, std::size_t points) {
    if (points < 2) throw std::invalid_argument("ct_spectrum: need at least two points");
    spectrum_ct out;
    const double edge = pi / f.tau;
    for (std::size_t i = 0; i < points; ++i) {
        const double w = -edge + 2.0 * edge * static_cast<double>(i) / static_cast<double>(points - 1);
        out.omega.push_back(w);
        out.values.push_back(f.tau * dtft(f.coeffs, f.tau * w));
    }
    return out;
}

sequence bandlimit(const spectrum_fn& F, double Omega, index_range k, int panels) {
    if (!(Omega > 0)) throw std::invalid_argument("bandlimit: Omega must be positive");
    const double tau = pi / Omega;
    const index_t kmax = std::max(std::abs(k.lo), std::abs(k.hi));
    panels = std::max<int>(panels, static_cast<int>(2 * kmax + 8));
    std::vector<double> x, w;
    gauss_panels(-Omega, Omega, panels, x, w);
    std::vector<cplx> Fw(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) Fw[i] = F(x[i]) * w[i];
    auto out = sequence::zeros(k);
    for (index_t q = k.lo; q <= k.hi; ++q) {
        cplx s{};
        for (std::size_t i = 0; i < x.size(); ++i) s += Fw[i] * std::polar(1.0, x[i] * tau * static_cast<double>(q));
        out.values[static_cast<std::size_t>(q - k.lo)] = s / (2.0 * pi);
    }
    return out;
}

sequence bandlimit(const std::vector<double>& omega, const std::vector<cplx>& F, double Omega, index_range k) {
    if (omega.size() != F.size() || omega.size() < 2) throw std::invalid_argument("bandlimit: malformed spectrum grid");
    if (!(Omega > 0)) throw std::invalid_argument("bandlimit: Omega must be positive");
    const double h = omega[1] - omega[0];
    for (std::size_t i = 1; i < omega.size(); ++i)
        if (std::fabs(omega[i] - omega[i - 1] - h) > 1e-9 * std::fabs(h))
            throw std::invalid_argument("bandlimit: spectrum grid must be uniform and ascending");
    if (omega.front() > -Omega + 1e-12 * Omega || omega.back() < Omega - 1e-12 * Omega) {
        std::ostringstream msg;
        msg << "bandlimit: grid [" << omega.front() << ", " << omega.back() << "] does not cover [-Omega, Omega] = ["
            << -Omega << ", " << Omega << "]";
        throw std::invalid_argument(msg.str());
    }
    const double tau = pi / Omega;
    auto out = sequence::zeros(k);
    // trapezoid over [-Omega, Omega], linear interpolation for the partial end cells
    auto lerp = [&](double w, double q) {
        const double pos = (w - omega.front()) / h;
        auto i = static_cast<std::size_t>(std::clamp(std::floor(pos), 0.0, static_cast<double>(omega.size() - 2)));
        const double a = pos - static_cast<double>(i);
        const cplx v = (1 - a) * F[i] + a * F[i + 1];
        return v * std::polar(1.0, w * tau * q);
    };
    for (index_t qi = k.lo; qi <= k.hi; ++qi) {
        const double q = static_cast<double>(qi);
        cplx s{};
        double prev_w = -Omega;
        cplx prev = lerp(-Omega, q);
        for (std::size_t i = 0; i < omega.size(); ++i) {
            if (omega[i] <= -Omega || omega[i] >= Omega) continue;
            const cplx cur = F[i] * std::polar(1.0, omega[i] * tau * q);
            s += 0.5 * (prev + cur) * (omega[i] - prev_w);
            prev = cur;
            prev_w = omega[i];
        }
        s += 0.5 * (prev + lerp(Omega, q)) * (Omega - prev_w);
        out.values[static_cast<std::size_t>(qi - k.lo)] = s / (2.0 * pi);
    }
    return out;
}

double spectral_tail(const spectrum_fn& F, double Omega, double w_max, int panels) {
    if (w_max <= Omega) return 0.0;
    std::vector<double> x, w;
    double s = 0;
    gauss_panels(Omega, w_max, panels, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::abs(F(x[i]));
    gauss_panels(-w_max, -Omega, panels, x, w);
    for (std::size_t i = 0; i < x.size(); ++i) s += w[i] * std::abs(F(x[i]));
    return s / (2.0 * pi);
}

ct_report error_report(const sequence& x, const sequence& xt, double tau, int m, double eps, double Omega,
                       int density) {
    if (!(tau > 0)) throw std::invalid_argument("error_report: tau must be positive");
    if (density < 2) throw std::invalid_argument("error_report: density must be >= 2");
    ct_report r;
    r.tau = tau;
    r.m = m;
    r.Omega = Omega;
    r.eps = eps;
    const sequence dx = difference(xt, x);
    r.l2_seq = dx.norm();
    r.l2_ct = std::sqrt(tau) * r.l2_seq;

    // (1/2pi) * integral over |w| <= pi/tau of |tau dX(e^{i tau w})|^2 by the
    // rectangle rule on P equispaced nodes, exact for a trigonometric
    // polynomial of degree < P; node values through the grid transform
    std::size_t P = 64;
    while (P < 2 * dx.size() + 2) P <<= 1;
    const auto dX = analyze(dx, P);
    double acc = 0;
    for (const auto& v : dX.bins) acc += std::norm(tau * v);
    acc *= (2.0 * pi / tau) / static_cast<double>(P);
    r.l2_ct_quad = std::sqrt(acc / (2.0 * pi));

    const auto ds = dense_difference(dx, tau, density);
    r.linf_ct = ds.sup;
    r.l2_ct_window = std::sqrt(ds.energy);
    r.window_T = ds.T;
    r.quad_points = ds.points;
    r.bound_C = 2.0 * pi * std::max(1.0, std::sqrt(2.0 * Omega)) * std::sqrt(tau) * (2 * m - 1);
    return r;
}

demo_report sparse_ct_demo(const spectrum_fn& F, const std::function<cplx(double)>& f, const demo_config& cfg) {
    if (!(cfg.Delta > 0)) throw std::invalid_argument("ctdemo: Delta must be positive");
    if (!(cfg.eps > 0)) throw std::invalid_argument("ctdemo: eps must be positive");
    if (cfg.m_cap < 1) throw std::invalid_argument("ctdemo: m cap must be >= 1");
    if (cfg.half_length < 1) throw std::invalid_argument("ctdemo: coefficient range must be positive");
    demo_report rep;
    const double w_max = cfg.w_max > 0 ? cfg.w_max : 10.0 * cfg.m_cap * pi / cfg.Delta;

    // Omega = m pi / Delta, smallest m whose spectral tail fits half the budget
    std::ostringstream tried;
    bool found = false;
    for (int m = 1; m <= cfg.m_cap; ++m) {
        const double Omega = m * pi / cfg.Delta;
        const double tail = spectral_tail(F, Omega, w_max);
        tried << " m=" << m << " tail=" << tail;
        if (tail <= cfg.eps / 2) {
            rep.m = m;
            rep.Omega = Omega;
            rep.tail = tail;
            found = true;
            break;
        }
    }
    if (!found) throw std::invalid_argument("ctdemo: no admissible (Omega, m) within the cap:" + tried.str());
    rep.tau = pi / rep.Omega;
    const int m = rep.m;

    const sequence x = bandlimit(F, rep.Omega, {-cfg.half_length, cfg.half_length});
    // sup |f_Omega - f~| <= ||x - x~||, so half the budget goes to the sequence
    rep.eps_sequence = cfg.eps / 2;
    const auto plan = plan_multipliers(m);
    std::size_t N = cfg.N;
    if (N == 0) {
        N = default_grid(plan);
        while (N / 2 < static_cast<std::size_t>(2 * cfg.half_length + 2 * m + 1)) N *= 2;
    }
    approximation ap;
    for (;;) {
        try {
            ap = approximate(x, m, rep.eps_sequence, N);
            break;
        } catch (const target_unmet&) {
            if (cfg.N != 0 || N >= (std::size_t{1} << 22)) throw;
            N *= 2;
        }
    }
    rep.notes.push_back("approximation grid N=" + std::to_string(N));
    rep.achieved_delta = ap.delta;
    rep.tilde = ap.tilde.value;
    rep.gaps = error_report(x, rep.tilde, rep.tau, m, ap.per_branch_target, rep.Omega, cfg.density);

    // decimated samples only: f~(theta_k) with theta_k = k Delta = (m k) tau
    recovery_config rc = cfg.recovery;
    const index_t n_obs = cfg.n_obs > 0 ? cfg.n_obs : cfg.half_length / m;
    const auto obs = decimate(rep.tilde, m, {-n_obs, n_obs});
    auto rr = recover_range(obs, cfg.recover_M, rc);
    attach_truth(rr, rep.tilde);
    rep.recovered = rr.records;
    rep.recovery_error = rr.max_error.value_or(0.0);
    sequence rebuilt = rep.tilde;
    for (const auto& r : rr.records)
        if (rebuilt.in_window(r.n)) rebuilt.ref(r.n) = r.estimate;

    // sup over a dense grid of the gaps against the true function
    const double h = rep.tau / cfg.density;
    const index_t I = cfg.half_length * cfg.density;
    const auto vt = cardinal_on_grid(rep.tilde, cfg.density, -I, I);
    const auto vr = cardinal_on_grid(rebuilt, cfg.density, -I, I);
    for (index_t i = -I; i <= I; ++i) {
        const auto at = static_cast<std::size_t>(i + I);
        const cplx v = f(static_cast<double>(i) * h);
        rep.sup_f_vs_tilde = std::max(rep.sup_f_vs_tilde, std::abs(v - vt[at]));
        rep.sup_f_vs_recovered = std::max(rep.sup_f_vs_recovered, std::abs(v - vr[at]));
        rep.recovery_gap = std::max(rep.recovery_gap, std::abs(vt[at] - vr[at]));
    }
    return rep;
}

}  // namespace sparsamp
