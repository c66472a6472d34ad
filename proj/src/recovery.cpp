#include "sparsamp/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <tuple>

#include "sparsamp/spectral.hpp"

namespace sparsamp {

namespace {

// kernels keyed by (gamma, horizon, nu); failures (overflow, leakage) cached as empty
class kernel_cache {
public:
    kernel_cache(const recovery_config& cfg, int m) : cfg_(cfg), m_(m) {}

    const predictor_kernel* get(double gamma, long long horizon, long long nu) {
        auto key = std::make_tuple(gamma, horizon, nu);
        auto it = store_.find(key);
        if (it == store_.end()) {
            std::optional<predictor_kernel> h;
            try {
                h = extract_kernel(predictor_params{gamma, cfg_.r, horizon, nu, m_}, cfg_.N, cfg_.K);
            } catch (const std::range_error&) {
            } catch (const kernel_leakage&) {
            }
            it = store_.emplace(key, std::move(h)).first;
        }
        return it->second ? &*it->second : nullptr;
    }

private:
    const recovery_config& cfg_;
    int m_;
    std::map<std::tuple<double, long long, long long>, std::optional<predictor_kernel>> store_;
};

struct estimate {
    cplx value{};
    std::size_t missing = 0;
};

// x^_d(anchor*m + H) from the lattice samples at or before the anchor
estimate lattice_estimate(const observations& obs, const predictor_kernel& h, index_t anchor) {
    estimate e;
    const index_t m = obs.m;
    for (std::size_t i = 0; i < h.taps.size(); ++i) {
        const index_t q = anchor - h.index[i] / m;
        if (!obs.observed(q)) {
            ++e.missing;
            continue;
        }
        e.value += h.taps[i] * obs.at(q);
    }
    return e;
}

std::vector<double> candidate_gammas(const recovery_config& cfg, index_t n) {
    auto it = cfg.gamma_fixed.find(n);
    if (it != cfg.gamma_fixed.end()) return {it->second};
    if (!cfg.gamma_schedule.empty()) return cfg.gamma_schedule;
    return {cfg.gamma};
}

// Forward prediction of the lattice point (anchor + H/m) of a branch whose
// samples coincide with the observations for k <= anchor.
void forward_solve(const observations& obs, long long horizon, long long nu, index_t anchor,
                   const recovery_config& cfg, kernel_cache& cache, recovery_record& rec) {
    const auto gammas = candidate_gammas(cfg, rec.n);
    const predictor_kernel* chosen = nullptr;
    double best = std::numeric_limits<double>::infinity();
    for (double g : gammas) {
        const predictor_kernel* h = cache.get(g, horizon, nu);
        if (!h) continue;
        double score = 0;
        if (gammas.size() > 1) {
            // predict already observed lattice points with the same kernel
            const index_t step = horizon / obs.m;
            int used = 0;
            for (int i = 0; i < cfg.backtest_points; ++i) {
                const index_t b = anchor - step - i;
                if (!obs.observed(b + step) || b < obs.k_lo) break;
                const auto e = lattice_estimate(obs, *h, b);
                score = std::max(score, std::abs(e.value - obs.at(b + step)));
                ++used;
            }
            if (used == 0) score = std::numeric_limits<double>::infinity();
            if (!std::isfinite(score)) score = std::numeric_limits<double>::max();
        }
        if (!chosen || score < best) {
            chosen = h;
            best = score;
        }
    }
    if (!chosen) {
        std::ostringstream msg;
        msg << "recover: no usable kernel for n=" << rec.n << " (every gamma overflowed or leaked)";
        throw std::runtime_error(msg.str());
    }
    const auto e = lattice_estimate(obs, *chosen, anchor);
    rec.horizon = horizon;
    rec.nu = nu;
    rec.estimate = e.value;
    rec.coverage_warnings = e.missing;
    rec.gamma = chosen->params.gamma;
    rec.kappa = chosen->kappa;
    rec.backtest = gammas.size() > 1 ? best : 0.0;
    rec.eta_bound = eta_bound(chosen->kappa, cfg.sigma);
}

recovery_record solve_point(const observations& obs, index_t n, const recovery_config& cfg, kernel_cache& fwd,
                            kernel_cache& bwd) {
    const int m = obs.m;
    recovery_record rec;
    rec.n = n;
    const auto [d, p] = branch_index(n, m);
    rec.d = d;
    rec.p = p;
    if (d == 0 && obs.observed(p)) {
        rec.read_off = true;
        rec.estimate = obs.at(p);
        rec.eta_bound = eta_bound(0.0, cfg.sigma);
        return rec;
    }
    if (cfg.offset > 0 || !obs.observed(cfg.offset))
        throw std::invalid_argument("recover: offset must lie in the observed range and be <= 0");
    if (n > 0) {
        if (d == 0)
            forward_solve(obs, (p - obs.k_hi) * m, cfg.zeta_of(0, m), obs.k_hi, cfg, fwd, rec);
        else
            forward_solve(obs, (p - cfg.offset) * m, cfg.zeta_of(d, m), cfg.offset, cfg, fwd, rec);
        return rec;
    }
    // mirrored problem: reverse the axis, recover -n with zeta(-d)
    const observations r = reversed(obs);
    if (d == 0)
        forward_solve(r, (-p - r.k_hi) * m, cfg.zeta_of(0, m), r.k_hi, cfg, bwd, rec);
    else
        forward_solve(r, (-p - cfg.offset) * m, cfg.zeta_of(d, m), cfg.offset, cfg, bwd, rec);
    return rec;
}

void summarize(recovery_report& rep) {
    std::sort(rep.records.begin(), rep.records.end(),
              [](const recovery_record& a, const recovery_record& b) { return a.n < b.n; });
    rep.coverage_warnings = 0;
    for (const auto& r : rep.records) rep.coverage_warnings += r.coverage_warnings;
}

}  // namespace

void observations::validate() const {
    if (m < 1) throw std::invalid_argument("observations: m must be >= 1");
    if (k_lo > 0 || k_hi < 0) throw std::invalid_argument("observations: index range must contain 0");
    if (samples.size() != static_cast<std::size_t>(k_hi - k_lo + 1))
        throw std::invalid_argument("observations: sample count does not match the index range");
}

long long recovery_config::zeta_of(int d, int m) const {
    if (zeta.empty()) return plan_multipliers(m).zeta_of(d);
    if (zeta.size() != static_cast<std::size_t>(2 * m - 1))
        throw std::invalid_argument("recover: multiplier table does not match m");
    return zeta[static_cast<std::size_t>(d + m - 1)];
}

observations decimate(const sequence& x, int m, index_range k) {
    if (m < 1) throw std::invalid_argument("decimate: m must be >= 1");
    observations obs;
    obs.m = m;
    obs.k_lo = k.lo;
    obs.k_hi = k.hi;
    for (index_t q = k.lo; q <= k.hi; ++q) obs.samples.push_back(x.at(static_cast<index_t>(m) * q));
    return obs;
}

observations reversed(const observations& obs) {
    observations r;
    r.m = obs.m;
    r.k_lo = -obs.k_hi;
    r.k_hi = -obs.k_lo;
    r.samples.assign(obs.samples.rbegin(), obs.samples.rend());
    return r;
}

std::pair<int, index_t> branch_index(index_t n, int m) {
    if (m < 1) throw std::invalid_argument("branch_index: m must be >= 1");
    const index_t mm = m;
    const index_t r = ((n % mm) + mm) % mm;
    const int d = n >= 0 ? static_cast<int>((mm - r) % mm) : -static_cast<int>(r);
    return {d, (n + d) / mm};
}

double eta_bound(double kappa, double sigma) {
    if (sigma < 0) throw std::invalid_argument("eta_bound: sigma must be >= 0");
    return sigma * (kappa + 1.0);
}

double eta_bound(const predictor_kernel& h, double sigma) { return eta_bound(h.kappa, sigma); }

recovery_record recover_point(const observations& obs, index_t n, const recovery_config& cfg) {
    obs.validate();
    kernel_cache fwd(cfg, obs.m), bwd(cfg, obs.m);
    return solve_point(obs, n, cfg, fwd, bwd);
}

recovery_report recover_range(const observations& obs, index_t M, const recovery_config& cfg) {
    obs.validate();
    if (M < 0) throw std::invalid_argument("recover_range: M must be >= 0");
    kernel_cache fwd(cfg, obs.m), bwd(cfg, obs.m);
    recovery_report rep;
    for (index_t n = -M; n <= M; ++n) rep.records.push_back(solve_point(obs, n, cfg, fwd, bwd));
    summarize(rep);
    return rep;
}

namespace {

void iterate_side(const observations& obs, index_t M, const recovery_config& cfg, int sign, recovery_report& rep) {
    observations ext = sign > 0 ? obs : reversed(obs);
    const int m = obs.m;
    kernel_cache cache(cfg, m);
    // the first step fixes the kernel; every later step reuses it
    recovery_record first;
    first.n = sign * m * (ext.k_hi + 1);
    forward_solve(ext, m, cfg.zeta_of(0, m), ext.k_hi, cfg, cache, first);
    const predictor_kernel* h = cache.get(first.gamma, m, cfg.zeta_of(0, m));
    for (index_t s = 1; s <= M; ++s) {
        const auto e = lattice_estimate(ext, *h, ext.k_hi);
        recovery_record rec = first;
        ext.samples.push_back(e.value);
        ++ext.k_hi;
        rec.n = sign * m * ext.k_hi;
        rec.p = sign * ext.k_hi;
        rec.estimate = e.value;
        rec.coverage_warnings = e.missing;
        rep.records.push_back(rec);
    }
}

}  // namespace

recovery_report iterated_recovery(const observations& obs, index_t M, const recovery_config& cfg) {
    obs.validate();
    recovery_report rep;
    iterate_side(obs, M, cfg, +1, rep);
    iterate_side(obs, M, cfg, -1, rep);
    summarize(rep);
    return rep;
}

recovery_report direct_lattice_recovery(const observations& obs, index_t M, const recovery_config& cfg) {
    obs.validate();
    kernel_cache fwd(cfg, obs.m), bwd(cfg, obs.m);
    recovery_report rep;
    for (index_t s = 1; s <= M; ++s) {
        rep.records.push_back(solve_point(obs, obs.m * (obs.k_hi + s), cfg, fwd, bwd));
        rep.records.push_back(solve_point(obs, obs.m * (obs.k_lo - s), cfg, fwd, bwd));
    }
    summarize(rep);
    return rep;
}

void attach_truth(recovery_report& rep, const sequence& truth) {
    double worst = 0;
    for (auto& r : rep.records) {
        r.truth = truth.at(r.n);
        r.abs_error = std::abs(r.estimate - *r.truth);
        worst = std::max(worst, r.abs_error);
    }
    rep.max_error = worst;
}

std::vector<cplx> white_noise(index_range k, double sigma, std::uint64_t seed) {
    if (sigma < 0) throw std::invalid_argument("white_noise: sigma must be >= 0");
    std::vector<cplx> xi(static_cast<std::size_t>(k.length()));
    if (sigma == 0 || xi.empty()) return xi;
    double energy = 0;
    for (index_t q = k.lo; q <= k.hi; ++q) {
        const auto uq = static_cast<std::uint64_t>(q);
        std::seed_seq sq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                         static_cast<std::uint32_t>(uq), static_cast<std::uint32_t>(uq >> 32)};
        std::mt19937_64 gen(sq);
        std::normal_distribution<double> nd;
        const double re = nd(gen);
        const double im = nd(gen);
        xi[static_cast<std::size_t>(q - k.lo)] = {re, im};
        energy += re * re + im * im;
    }
    const double scale = sigma / std::sqrt(energy);
    for (auto& v : xi) v *= scale;
    return xi;
}

observations add_noise(const observations& obs, double sigma, std::uint64_t seed) {
    observations out = obs;
    const auto xi = white_noise({obs.k_lo, obs.k_hi}, sigma, seed);
    for (std::size_t i = 0; i < xi.size(); ++i) out.samples[i] += xi[i];
    return out;
}

std::vector<sweep_cell> noise_sweep(const sequence& truth, int m, const std::vector<double>& sigmas,
                                    const std::vector<index_t>& n_obs, const recovery_config& cfg, index_t M,
                                    std::uint64_t seed) {
    std::vector<sweep_cell> table;
    for (index_t no : n_obs) {
        const auto clean = decimate(truth, m, {-no, no});
        auto base = recover_range(clean, M, cfg);
        attach_truth(base, truth);
        // the noisy runs reuse the kernels picked on the clean data, so that
        // the difference is exactly the kernel applied to the noise
        recovery_config frozen = cfg;
        for (const auto& r : base.records)
            if (!r.read_off) frozen.gamma_fixed[r.n] = r.gamma;
        for (double s : sigmas) {
            frozen.sigma = s;
            auto rep = recover_range(add_noise(clean, s, seed), M, frozen);
            attach_truth(rep, truth);
            sweep_cell c;
            c.sigma = s;
            c.n_obs = no;
            c.noiseless_error = *base.max_error;
            c.max_error = *rep.max_error;
            c.coverage_warnings = rep.coverage_warnings;
            for (std::size_t i = 0; i < rep.records.size(); ++i) {
                const auto& r = rep.records[i];
                c.kappa_max = std::max(c.kappa_max, r.kappa);
                if (r.abs_error > base.records[i].abs_error + eta_bound(r.kappa, s) * (1 + 1e-6)) c.within_bound = false;
            }
            c.eta_bound = eta_bound(c.kappa_max, s);
            table.push_back(c);
        }
    }
    return table;
}

std::vector<gamma_cell> gamma_sweep(const sequence& truth, int m, double sigma, index_t n_obs,
                                    const std::vector<double>& gammas, const recovery_config& cfg, index_t M,
                                    std::uint64_t seed) {
    const auto clean = decimate(truth, m, {-n_obs, n_obs});
    const auto noisy = add_noise(clean, sigma, seed);
    std::vector<gamma_cell> out;
    for (double g : gammas) {
        recovery_config c = cfg;
        c.gamma = g;
        c.gamma_schedule.clear();
        c.gamma_fixed.clear();
        c.sigma = sigma;
        gamma_cell cell;
        cell.gamma = g;
        try {
            auto rep = recover_range(noisy, M, c);
            attach_truth(rep, truth);
            auto ref = recover_range(clean, M, c);
            attach_truth(ref, truth);
            cell.max_error = *rep.max_error;
            cell.noiseless_error = *ref.max_error;
            for (const auto& r : rep.records) cell.kappa_max = std::max(cell.kappa_max, r.kappa);
        } catch (const std::runtime_error&) {
            cell.max_error = cell.noiseless_error = std::numeric_limits<double>::infinity();
            cell.kappa_max = std::numeric_limits<double>::infinity();
        }
        out.push_back(cell);
    }
    return out;
}

}  // namespace sparsamp
