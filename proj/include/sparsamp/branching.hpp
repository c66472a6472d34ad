#pragma once

// Branching processes, representative branches, the lift into a branching
// process, and the spectral surgery that makes every branch vanish on its own
// frequency mask.

#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "sparsamp/sequence.hpp"
#include "sparsamp/spectral.hpp"

namespace sparsamp {

// raised when a numerical target is out of reach; carries what was reachable
class target_unmet : public std::runtime_error {
public:
    target_unmet(const std::string& what, double achievable) : std::runtime_error(what), achievable_(achievable) {}
    double achievable() const { return achievable_; }

private:
    double achievable_;
};

// Family x_d, d = -m+1 .. m-1.  x_d agrees with x_0 on k <= 0 for d > 0 and on
// k >= 0 for d < 0.
struct branching_process {
    int m = 1;
    std::vector<sequence> branches;  // branches[d + m - 1]

    const sequence& branch(int d) const { return branches.at(static_cast<std::size_t>(d + m - 1)); }
    sequence& branch(int d) { return branches.at(static_cast<std::size_t>(d + m - 1)); }
    const sequence& root() const { return branch(0); }
};

struct representative_branch {
    sequence value;
    std::vector<int> branch;  // branch[k - value.origin] = d used at k
};

// unique d with (k + d) / m integral: d in [0, m-1] for k >= 0, [-m+1, 0] for k < 0
int branch_of(index_t k, int m);

branching_process lift(const sequence& x, int m);

representative_branch representative(const branching_process& bp);

// first (d, k) where the half-line agreement fails, if any
std::optional<std::pair<int, index_t>> first_agreement_violation(const branching_process& bp, double tol = 0.0);

branching_process degenerate(const branching_process& bp, const degeneracy_plan& plan, std::size_t N);

// Right-hand side of the error identity: (1/N)[sum over mask_0 of |X_0|^2 +
// sum over d != 0 of sum over mask_d of |X_d|^2].  spectra[d + m - 1] = X_d.
double masked_energy(const std::vector<spectrum>& spectra, const std::vector<frequency_mask>& masks, int m);

std::vector<frequency_mask> plan_masks(const degeneracy_plan& plan, std::size_t N);

struct approximation {
    representative_branch tilde;
    double delta = 0;
    int halvings = 0;
    branching_process lifted;
    branching_process degenerate;
    std::vector<double> branch_errors;  // ||xhat_d - x_d|| per d
    double per_branch_target = 0;       // eps / (2m - 1)
    double predicted_branch_error = 0;  // from the energy identity
    double total_error = 0;             // ||x - xtilde||
    double summed_error = 0;            // sum_d ||xhat_d - x_d||
};

approximation approximate(const sequence& x, int m, double eps, std::size_t N);

struct branch_check {
    int d = 0;
    double agreement = 0;             // max |x_d(k) - x_0(k)| on the shared half line
    std::optional<double> residual;   // relative masked residual when a plan is given
};

struct verify_report {
    std::vector<branch_check> branches;
    std::optional<std::pair<int, index_t>> first_violation;
    bool ok = true;
};

verify_report verify(const branching_process& bp, double tol, const degeneracy_plan* plan = nullptr,
                     std::size_t N = 0);

}  // namespace sparsamp
