#include "sparsamp/branching.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sparsamp {

namespace {

index_range union_window(const branching_process& bp) {
    index_range w{0, -1};
    bool any = false;
    for (const auto& b : bp.branches) {
        if (b.empty()) continue;
        if (!any) {
            w = b.window();
            any = true;
        } else {
            w.lo = std::min(w.lo, b.first());
            w.hi = std::max(w.hi, b.last());
        }
    }
    return w;
}

double max_abs_diff_on(const sequence& a, const sequence& b, index_t lo, index_t hi) {
    double worst = 0;
    for (index_t k = lo; k <= hi; ++k) worst = std::max(worst, std::abs(a.at(k) - b.at(k)));
    return worst;
}

// the half line on which branch d must agree with the root, clipped to where
// either sequence is stored
std::pair<index_t, index_t> shared_half_line(const branching_process& bp, int d) {
    const auto& x0 = bp.root();
    const auto& xd = bp.branch(d);
    index_t lo = std::min(x0.empty() ? 0 : x0.first(), xd.empty() ? 0 : xd.first());
    index_t hi = std::max(x0.empty() ? 0 : x0.last(), xd.empty() ? 0 : xd.last());
    if (d > 0) hi = std::min<index_t>(hi, 0);
    if (d < 0) lo = std::max<index_t>(lo, 0);
    return {lo, hi};
}

}  // namespace

int branch_of(index_t k, int m) {
    if (m < 1) throw std::invalid_argument("branch_of: m must be >= 1");
    const index_t mm = m;
    const index_t r = ((k % mm) + mm) % mm;  // k mod m in [0, m)
    if (k >= 0) return static_cast<int>((mm - r) % mm);
    return -static_cast<int>(r);
}

branching_process lift(const sequence& x, int m) {
    if (m < 1) throw std::invalid_argument("lift: m must be >= 1");
    branching_process bp;
    bp.m = m;
    bp.branches.resize(static_cast<std::size_t>(2 * m - 1));
    bp.branch(0) = x;
    if (x.empty()) return bp;
    const index_t a = x.first(), b = x.last();
    const auto x0 = x.at(0);
    for (int d = 1; d <= m - 1; ++d) {
        // repeat x(0) on 0..d, then the shifted tail
        index_range w{std::min<index_t>(a, 0), std::max<index_t>(b + d, d)};
        auto s = sequence::zeros(w);
        for (index_t k = w.lo; k <= w.hi; ++k) {
            cplx v = k < 0 ? x.at(k) : (k <= d ? x0 : x.at(k - d));
            s.values[static_cast<std::size_t>(k - w.lo)] = v;
        }
        bp.branch(d) = std::move(s);
    }
    for (int d = -1; d >= -(m - 1); --d) {
        // mirror image: x(0) on d..0, then x(k - d) further left
        index_range w{std::min<index_t>(a + d, d), std::max<index_t>(b, 0)};
        auto s = sequence::zeros(w);
        for (index_t k = w.lo; k <= w.hi; ++k) {
            cplx v = k > 0 ? x.at(k) : (k >= d ? x0 : x.at(k - d));
            s.values[static_cast<std::size_t>(k - w.lo)] = v;
        }
        bp.branch(d) = std::move(s);
    }
    return bp;
}

std::optional<std::pair<int, index_t>> first_agreement_violation(const branching_process& bp, double tol) {
    for (int d = -bp.m + 1; d <= bp.m - 1; ++d) {
        if (d == 0) continue;
        const auto [lo, hi] = shared_half_line(bp, d);
        for (index_t k = lo; k <= hi; ++k)
            if (std::abs(bp.branch(d).at(k) - bp.root().at(k)) > tol) return std::make_pair(d, k);
    }
    return std::nullopt;
}

representative_branch representative(const branching_process& bp) {
    if (bp.branches.size() != static_cast<std::size_t>(2 * bp.m - 1))
        throw std::invalid_argument("representative: branch count does not match m");
    if (auto bad = first_agreement_violation(bp)) {
        std::ostringstream msg;
        msg << "representative: branch " << bad->first << " departs from the root at k=" << bad->second;
        throw std::invalid_argument(msg.str());
    }
    representative_branch out;
    const index_range u = union_window(bp);
    if (u.length() == 0) return out;
    // x~(k) reads x_d(k + d) with |d| < m
    index_range w{u.lo - (bp.m - 1), u.hi + (bp.m - 1)};
    out.value = sequence::zeros(w);
    out.branch.resize(static_cast<std::size_t>(w.length()));
    for (index_t k = w.lo; k <= w.hi; ++k) {
        const int d = branch_of(k, bp.m);
        const auto i = static_cast<std::size_t>(k - w.lo);
        out.value.values[i] = bp.branch(d).at(k + d);
        out.branch[i] = d;
    }
    return out;
}

std::vector<frequency_mask> plan_masks(const degeneracy_plan& plan, std::size_t N) {
    std::vector<frequency_mask> masks;
    for (int d = plan.d_min(); d <= plan.d_max(); ++d) masks.push_back(build_mask(plan.mu(d), plan.delta, N));
    return masks;
}

double masked_energy(const std::vector<spectrum>& spectra, const std::vector<frequency_mask>& masks, int m) {
    double s = 0;
    for (int d = -m + 1; d <= m - 1; ++d) {
        const auto i = static_cast<std::size_t>(d + m - 1);
        for (std::size_t j : masks[i].bins) s += std::norm(spectra[i].bins[j]);
    }
    return spectra.empty() ? 0.0 : s / static_cast<double>(spectra.front().size());
}

branching_process degenerate(const branching_process& bp, const degeneracy_plan& plan, std::size_t N) {
    if (plan.m != bp.m) throw std::invalid_argument("degenerate: plan and process disagree on m");
    check_plan_grid(plan, N);
    const int m = bp.m;
    const auto masks = plan_masks(plan, N);
    std::vector<char> owner(N, 0);
    for (const auto& mk : masks)
        for (std::size_t j : mk.bins) {
            if (owner[j]) throw std::invalid_argument("degenerate: masks of distinct branches share a bin");
            owner[j] = 1;
        }

    const index_range u = union_window(bp);
    branching_process out;
    out.m = m;
    out.branches.resize(bp.branches.size());
    if (u.length() == 0) return out;
    if (static_cast<std::size_t>(u.length()) > N / 2) {
        std::ostringstream msg;
        msg << "degenerate: support of length " << u.length() << " exceeds N/2=" << N / 2
            << "; enlarge the grid to keep wrap-around away";
        throw std::invalid_argument(msg.str());
    }
    const index_t c = u.lo + (u.hi - u.lo) / 2;
    const auto half = static_cast<index_t>(N / 2);
    const index_range w{c - half, c + half - 1};

    // y_d = x_0 - x_d in the time domain
    std::vector<sequence> y(bp.branches.size());
    for (int d = -m + 1; d <= m - 1; ++d) {
        auto& yd = y[static_cast<std::size_t>(d + m - 1)];
        yd = sequence::zeros(u);
        for (index_t k = u.lo; k <= u.hi; ++k)
            yd.values[static_cast<std::size_t>(k - u.lo)] = bp.root().at(k) - bp.branch(d).at(k);
    }

    spectrum hat0 = analyze(bp.root().rewindow(u), N);
    for (const auto& mk : masks)
        for (std::size_t j : mk.bins) hat0.bins[j] = {};
    for (int d = -m + 1; d <= m - 1; ++d) {
        if (d == 0) continue;
        const auto i = static_cast<std::size_t>(d + m - 1);
        const spectrum Yd = analyze(y[i], N);
        for (std::size_t j : masks[i].bins) hat0.bins[j] = Yd.bins[j];
    }
    const sequence xhat0 = synthesize(hat0, w);
    for (int d = -m + 1; d <= m - 1; ++d) {
        const auto i = static_cast<std::size_t>(d + m - 1);
        sequence s = xhat0;
        if (d != 0)
            for (index_t k = u.lo; k <= u.hi; ++k) s.ref(k) -= y[i].at(k);
        out.branches[i] = std::move(s);
    }
    return out;
}

approximation approximate(const sequence& x, int m, double eps, std::size_t N) {
    if (m < 1) throw std::invalid_argument("approximate: m must be >= 1");
    if (!(eps > 0)) throw std::invalid_argument("approximate: eps must be positive");
    auto plan = plan_multipliers(m);
    check_plan_grid(plan, N);
    const double delta0 = 0.5 * max_disjoint_delta(plan);

    approximation out;
    out.per_branch_target = eps / (2 * m - 1);
    out.lifted = lift(x, m);
    if (x.is_zero()) {
        out.delta = delta0;
        out.tilde.value = x;
        out.tilde.branch.assign(x.size(), 0);
        for (index_t k = x.first(); k <= x.last(); ++k)
            out.tilde.branch[static_cast<std::size_t>(k - x.first())] = branch_of(k, m);
        out.degenerate = out.lifted;
        out.branch_errors.assign(static_cast<std::size_t>(2 * m - 1), 0.0);
        return out;
    }
    const index_range u = union_window(out.lifted);
    if (static_cast<std::size_t>(u.length()) > N / 2)
        throw std::invalid_argument("approximate: lifted support exceeds N/2; enlarge the grid");

    std::vector<spectrum> spectra;
    for (const auto& b : out.lifted.branches) spectra.push_back(analyze(b, N));

    // the energy identity prices each delta without running the surgery
    double delta = delta0, predicted = 0;
    bool met = false;
    int h = 0;
    for (; h <= 40; ++h) {
        plan.delta = delta;
        predicted = std::sqrt(masked_energy(spectra, plan_masks(plan, N), m));
        if (predicted <= out.per_branch_target) {
            met = true;
            break;
        }
        delta *= 0.5;
    }
    if (!met) {
        std::ostringstream msg;
        msg.precision(6);
        msg << "approximate: per-branch error floor " << predicted << " on N=" << N << " exceeds eps/(2m-1)="
            << out.per_branch_target << "; a finer grid is required";
        throw target_unmet(msg.str(), predicted * (2 * m - 1));
    }
    plan = make_plan(m, plan.zeta, delta);
    out.delta = delta;
    out.halvings = h;
    out.predicted_branch_error = predicted;
    out.degenerate = degenerate(out.lifted, plan, N);
    out.tilde = representative(out.degenerate);
    for (int d = -m + 1; d <= m - 1; ++d) {
        const double e = distance(out.degenerate.branch(d), out.lifted.branch(d));
        out.branch_errors.push_back(e);
        out.summed_error += e;
    }
    out.total_error = distance(x, out.tilde.value);
    return out;
}

verify_report verify(const branching_process& bp, double tol, const degeneracy_plan* plan, std::size_t N) {
    verify_report rep;
    rep.first_violation = first_agreement_violation(bp, tol);
    if (rep.first_violation) rep.ok = false;
    for (int d = -bp.m + 1; d <= bp.m - 1; ++d) {
        branch_check c;
        c.d = d;
        if (d != 0) {
            const auto [lo, hi] = shared_half_line(bp, d);
            c.agreement = max_abs_diff_on(bp.branch(d), bp.root(), lo, hi);
        }
        if (plan) {
            const auto mr = membership_V(bp.branch(d), plan->delta, plan->mu(d), N, tol);
            c.residual = mr.relative();
            if (!mr.member) rep.ok = false;
        }
        rep.branches.push_back(c);
    }
    return rep;
}

}  // namespace sparsamp
