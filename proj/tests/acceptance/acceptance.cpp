// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "sparsamp/branching.hpp"
#include "sparsamp/ctsampling.hpp"
#include "sparsamp/predictor.hpp"
#include "sparsamp/recovery.hpp"

using namespace sparsamp;

namespace {

constexpr double pi = std::numbers::pi;
int failures = 0;

struct clock_ {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); }
};

void report(int id, bool pass, const std::string& detail) {
    if (!pass) ++failures;
    std::printf("C%d %s  %s\n", id, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
}

// seeded complex gaussian entries on [origin, origin + len)
sequence random_support(index_t origin, std::size_t len, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    std::normal_distribution<double> nd;
    std::vector<cplx> v(len);
    for (auto& z : v) {
        const double re = nd(gen);
        z = {re, nd(gen)};
    }
    return sequence(origin, std::move(v));
}

// smooth flat-top pulse, flat around k = 0
sequence flat_top() {
    auto x = sequence::zeros({-600, 600});
    for (index_t k = -600; k <= 600; ++k)
        x.ref(k) = 0.5 * (std::erf((k + 300) / 40.0) - std::erf((k - 300) / 40.0)) * cplx(0.8, 0.6);
    return x;
}

const std::vector<double> recovery_schedule{2, 3, 4, 5, 6, 7, 8, 10, 12, 16};

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

void criterion1() {
    const auto x = random_support(-32, 64, 1);
    const clock_ c;
    const auto plan = plan_default(2, 0.1);
    const auto out = degenerate(lift(x, 2), plan, 4096);
    const auto rep = verify(out, 1e-12, &plan, 4096);
    const double t = c.seconds();
    double worst_res = 0, worst_agree = 0;
    bool ok = rep.ok && rep.branches.size() == 3;
    for (const auto& b : rep.branches) {
        worst_agree = std::max(worst_agree, b.agreement);
        if (!b.residual) ok = false;
        else worst_res = std::max(worst_res, *b.residual);
    }
    for (int d = -1; d <= 1; ++d) ok = ok && membership_V(out.branch(d), 0.1, plan.mu(d), 4096).relative() <= 1e-10;
    ok = ok && worst_res <= 1e-10 && worst_agree <= 1e-12 && t < 1.0;
    report(1, ok, "residual " + fmt3(worst_res) + ", agreement " + fmt3(worst_agree) + ", " + fmt3(t) + " s");
}

void criterion2() {
    // delta 0.4 and 0.2 overlap the m = 2 masks (largest disjoint delta pi/16),
    // so m = 2 runs on the feasible part of the list
    const auto x = random_support(-32, 64, 2);
    bool ok = true;
    double worst = 0;
    std::ostringstream trail;
    for (auto [m, deltas] : {std::pair{1, std::vector<double>{0.4, 0.2, 0.1, 0.05}},
                             std::pair{2, std::vector<double>{0.1, 0.05}}}) {
        const std::size_t N = 4096;
        const auto bp = lift(x, m);
        std::vector<spectrum> spectra;
        for (const auto& b : bp.branches) spectra.push_back(analyze(b, N));
        double prev = INFINITY;
        trail << " m=" << m << ":";
        for (double delta : deltas) {
            const auto plan = plan_default(m, delta);
            const auto out = degenerate(bp, plan, N);
            const double rhs = masked_energy(spectra, plan_masks(plan, N), m);
            for (int d = -m + 1; d <= m - 1; ++d) {
                const double lhs = std::pow(distance(out.branch(d), bp.branch(d)), 2);
                const double rel = std::fabs(lhs - rhs) / rhs;
                worst = std::max(worst, rel);
                ok = ok && rel <= 1e-9;
            }
            ok = ok && rhs <= prev;
            prev = rhs;
            trail << " " << fmt3(rhs);
        }
    }
    report(2, ok, "worst relative gap " + fmt3(worst) + "; energies" + trail.str());
}

void criterion3() {
    bool ok = true;
    std::ostringstream msg;
    struct input {
        std::string name;
        sequence x;
        std::size_t N;
    };
    // the grid floor of an irregular input needs a fine grid; a smooth one does not
    for (auto& in : {input{"flat-top", flat_top(), 8192}, input{"random-64", random_support(-32, 64, 3), 4194304}}) {
        const double eps = 0.01 * in.x.norm();
        const clock_ c;
        const auto a = approximate(in.x, 2, eps, in.N);
        const double t = c.seconds();
        const auto plan = plan_default(2, a.delta);
        const bool member = verify(a.degenerate, 1e-10, &plan, in.N).ok;
        const double err = distance(in.x, a.tilde.value);
        ok = ok && err <= eps && member && t < 5.0;
        msg << in.name << " N=" << in.N << " err/eps " << fmt3(err / eps) << " member " << member << " " << fmt3(t)
            << " s; ";
    }
    report(3, ok, msg.str());
}

void criterion4() {
    const std::size_t N = 8192;
    const double gamma = 4, r = 0.4;
    bool ok = true;
    std::ostringstream msg;
    const auto v = v_coefficients(gamma, r, N);
    const double v0 = std::fabs(v[N / 2]);
    ok = ok && v0 <= 1e-10;
    msg << "v(0) " << fmt3(v0) << ";";
    for (auto [n, nu, m] : {std::tuple{1LL, 1LL, 2LL}, std::tuple{2LL, 1LL, 2LL}, std::tuple{1LL, 2LL, 2LL}}) {
        try {
            const auto h = extract_kernel({gamma, r, n, nu, m}, N);
            bool lattice = true;
            for (long long k : h.index) lattice = lattice && (k + n) % (nu * m) == 0 && k >= n * nu * m - n;
            ok = ok && lattice && h.imag_residue <= 1e-10 && h.leakage <= 1e-8;
            msg << " (" << n << "," << nu << "," << m << ") imag " << fmt3(h.imag_residue) << " leak " << fmt3(h.leakage);
        } catch (const kernel_leakage& e) {
            ok = false;
            msg << " (" << n << "," << nu << "," << m << ") leakage " << fmt3(e.leakage());
        }
    }
    report(4, ok, msg.str());
}

void criterion5() {
    // unit-norm x with spectrum on |omega| <= 0.5 (inside V(0.2, 2)), built and
    // predicted in binary128 so that kappa up to 1e28 stays usable
    const std::size_t N = 8192;
    const clock_ c;
    basic_spectrum<quad> X(N);
    std::mt19937_64 gen(5);
    std::normal_distribution<double> nd;
    for (std::size_t j = 0; j < N; ++j) {
        const double re = nd(gen), im = nd(gen);
        if (std::fabs(grid_omega(j, N)) <= 0.5) X.bins[j] = {quad(re), quad(im)};
    }
    auto x = synthesize(X, {-static_cast<index_t>(N / 2), static_cast<index_t>(N / 2) - 1});
    quad e = 0;
    for (index_t k = x.first(); k <= x.last(); ++k) e += norm2(x.at(k));
    const quad s = 1 / num<quad>::sqrt(e);
    for (index_t k = x.first(); k <= x.last(); ++k) x.ref(k) *= s;

    std::vector<double> errs;
    double best = INFINITY;
    std::ostringstream msg;
    for (double g : {2.0, 4.0, 8.0, 16.0, 32.0}) {
        const auto h = extract_kernel_as<quad>({g, 0.01, 2, 1, 2}, N);
        double worst = 0;
        for (index_t k = -64; k <= 64; ++k)
            worst = std::max(worst, static_cast<double>(cabs(predict(h, x, k).value - x.at(k + 2))));
        errs.push_back(worst);
        best = std::min(best, worst);
        msg << " g=" << g << ":" << fmt3(worst);
    }
    bool mono = true;
    for (std::size_t i = 1; i < errs.size(); ++i) mono = mono && errs[i] <= 1.1 * errs[i - 1];
    const double t = c.seconds();
    report(5, mono && best <= 1e-2 && t < 30.0, "sup errors" + msg.str() + "; " + fmt3(t) + " s");
}

const approximation& shared_tilde() {
    static const approximation a = [] {
        const auto x = flat_top();
        return approximate(x, 2, 0.01 * x.norm(), 8192);
    }();
    return a;
}

void criterion6() {
    const auto& xt = shared_tilde().tilde.value;
    const auto obs = decimate(xt, 2, {-1024, 1024});
    recovery_config cfg;
    cfg.gamma_schedule = recovery_schedule;
    auto rep = recover_range(obs, 4, cfg);
    attach_truth(rep, xt);
    bool exact = true;
    std::ostringstream msg;
    for (const auto& r : rep.records) {
        if (r.read_off) exact = exact && r.abs_error == 0.0;
        else msg << " n=" << r.n << "(g=" << r.gamma << "):" << fmt3(r.abs_error);
    }
    const double lim = 1e-2 * xt.sup_norm();
    report(6, exact && *rep.max_error <= lim,
           "N_obs " + std::to_string(obs.samples.size()) + ", max error " + fmt3(*rep.max_error) + " vs " + fmt3(lim) +
               ";" + msg.str());
}

void criterion7() {
    const auto& xt = shared_tilde().tilde.value;
    recovery_config cfg;
    cfg.gamma_schedule = recovery_schedule;
    const std::vector<double> sigmas{0, 1e-4, 1e-3};
    // half-widths for N_obs = 512, 1024, 2048 decimated samples
    const std::vector<index_t> halves{256, 512, 1024};
    const auto table = noise_sweep(xt, 2, sigmas, halves, cfg, 4, 0);
    bool ok = true;
    for (const auto& c : table) ok = ok && c.within_bound;
    for (std::size_t si = 0; si < sigmas.size(); ++si)
        for (std::size_t i = 1; i < halves.size(); ++i) {
            const auto& a = table[(i - 1) * sigmas.size() + si];
            const auto& b = table[i * sigmas.size() + si];
            ok = ok && b.max_error <= 1.1 * a.max_error;
        }
    // trade-off in gamma under noise: an interior minimum of the noisy error
    const std::vector<double> gammas{1.25, 1.5, 2, 2.5, 3, 4, 6, 8};
    const auto gs = gamma_sweep(xt, 2, 1e-3, 512, gammas, cfg, 4, 0);
    std::size_t arg = 0;
    for (std::size_t i = 1; i < gs.size(); ++i)
        if (gs[i].max_error < gs[arg].max_error) arg = i;
    const bool interior = arg > 0 && arg + 1 < gs.size();
    std::ostringstream msg;
    msg << "bound held in " << std::count_if(table.begin(), table.end(), [](const sweep_cell& c) { return c.within_bound; })
        << "/" << table.size() << " cells; sigma=1e-3 gamma sweep:";
    for (const auto& c : gs) msg << " " << c.gamma << ":" << fmt3(c.max_error);
    msg << " (noiseless at ends " << fmt3(gs.front().noiseless_error) << " -> " << fmt3(gs.back().noiseless_error)
        << "), minimum at gamma " << gs[arg].gamma;
    report(7, ok && interior, msg.str());
}

void criterion8() {
    const predictor_params p{4, 0.4, 1, 1, 4};
    const std::size_t N = 8192;
    const auto curve = error_curve(p, N);
    const auto h = extract_kernel(p, N);
    const auto centers = degeneracy_points(4);

    // local maxima on the circular grid, largest four
    std::vector<std::pair<double, double>> peaks;
    const std::size_t L = curve.size();
    for (std::size_t i = 0; i < L; ++i) {
        const double a = curve[(i + L - 1) % L].second, b = curve[i].second, c = curve[(i + 1) % L].second;
        if (b > a && b >= c) peaks.push_back({b, curve[i].first});
    }
    std::sort(peaks.rbegin(), peaks.rend());
    bool near = peaks.size() >= 4;
    for (std::size_t i = 0; i < std::min<std::size_t>(4, peaks.size()); ++i) {
        double dmin = INFINITY;
        for (double c : centers) dmin = std::min(dmin, circular_distance(peaks[i].second, c));
        near = near && dmin <= 0.1;
    }
    double outside = 0;
    for (const auto& [w, e] : curve) {
        bool in = false;
        for (double c : centers) in = in || circular_distance(w, c) <= 0.3;
        if (!in) outside = std::max(outside, e);
    }
    // symmetry: grid is ascending with omega = 0 at index L/2 - 1
    double asym = 0;
    const std::size_t z = L / 2 - 1;
    for (std::size_t i = 1; i < L / 2; ++i) asym = std::max(asym, std::fabs(curve[z + i].second - curve[z - i].second));
    const bool real = h.imag_residue <= 1e-10;
    report(8, near && outside < 0.2 && asym <= 1e-10 && real,
           std::string("peaks near centres ") + (near ? "yes" : "no") + ", max outside J(0.3,4) " + fmt3(outside) +
               " (limit 0.2), asymmetry " + fmt3(asym) + ", kernel imag " + fmt3(h.imag_residue));
}

void criterion9() {
    auto F = [](double w) { return cplx(std::sqrt(2 * pi) * std::exp(-0.5 * w * w), 0); };
    auto f = [](double t) { return cplx(std::exp(-0.5 * t * t), 0); };
    // Delta chosen so that the critical rate misses eps/2 and m = 2 is needed
    const double eps = 0.1;
    demo_config cfg;
    cfg.Delta = 1.9;
    cfg.eps = eps;
    cfg.half_length = 64;
    cfg.recover_M = 4;
    cfg.recovery.gamma_schedule = recovery_schedule;
    const auto rep = sparse_ct_demo(F, f, cfg);
    const auto& g = rep.gaps;
    const double parseval = std::fabs(g.l2_ct - g.l2_ct_quad) / g.l2_ct;
    const double bound = g.bound_C * g.eps;
    const bool ineq = g.linf_ct <= bound && g.l2_ct <= bound;

    const sampled_bandlimited fb = lift_to_ct(rep.tilde, rep.tau);
    double worst = 0;
    bool within = true;
    for (index_t k = -40; k <= 40; ++k) {
        const auto v = evaluate(fb, rep.tau * static_cast<double>(k), 16);
        const double gap = std::abs(v.value - rep.tilde.at(k));
        worst = std::max(worst, gap);
        within = within && gap <= v.tail_bound + 1e-12;
    }
    report(9, rep.m == 2 && parseval <= 1e-9 && ineq && within,
           "m=" + std::to_string(rep.m) + ", Parseval gap " + fmt3(parseval) + ", L2 " + fmt3(g.l2_ct) + " Linf " +
               fmt3(g.linf_ct) + " <= C*eps " + fmt3(bound) + ", grid evaluation gap " + fmt3(worst));
}

}  // namespace

int main() {
    const std::vector<std::function<void()>> all{criterion1, criterion2, criterion3, criterion4, criterion5,
                                                 criterion6, criterion7, criterion8, criterion9};
    for (std::size_t i = 0; i < all.size(); ++i) {
        try {
            all[i]();
        } catch (const std::exception& e) {
            report(static_cast<int>(i + 1), false, std::string("threw: ") + e.what());
        }
    }
    std::printf("%d of %zu criteria failed\n", failures, all.size());
    return failures == 0 ? 0 : 1;
}
