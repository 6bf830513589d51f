#pragma once

// Nash equilibrium among growth-rate miners. Each miner i in I maximizes the
// Sharpe ratio of its per-stage return rate, whose best response to the
// others' mining assets M_-i is (Y'_i - M_-i) / 3 with Y'_i = B / (c_i + r).
// Exogenous hash Z (static players) enters every M_-i.

#include <optional>
#include <vector>

#include "minerkelly/types.hpp"

namespace minerkelly {

struct EquilibriumProblem {
    std::vector<double> growth_costs;  // c_i per unit of mining assets, i in I
    double exogenous_hash = 0.0;       // Z
    Environment env;

    void check() const;
    std::size_t size() const noexcept { return growth_costs.size(); }
};

// Y'_i = B / (c_i + r). Throws std::invalid_argument when c_i + r <= 0.
double riskfree_break_even(double cost_rate, const Environment& env);

// Sharpe ratio of W_i for homogeneous miners:
//   S_i = (1 - (c_i + r)(M_i + M_-i) / B) / sqrt(M_-i / M_i).
double sharpe_ratio(double mining_assets, double others_mining_assets, double cost_rate, const Environment& env);

// max(0, (Y'_i - M_-i) / 3). The clamp is the exit condition: a miner facing
// M_-i >= Y'_i holds nothing.
double best_response(double others_mining_assets, double cost_rate, const Environment& env);

// Closed form on a support set S (|S| = m):
//   M-hat_i = (1/(c_i+r) - (1/(m+2)) sum_{j in S} 1/(c_j+r)) B/2 - Z/(m+2),
//   H-hat   = (1/(m+2)) sum_{j in S} Y'_j + (2/(m+2)) Z.
// Players with negative holdings are removed one at a time (most negative
// first) and the closed form is recomputed on the survivors.
EquilibriumResult equilibrium_closed_form(const EquilibriumProblem& problem);

struct FixedPointOptions {
    double tolerance = 1e-12;   // max relative change between iterates
    int max_iterations = 1'000'000;
    // Relaxation weight on the new best response; default min(1, 6/(m+4)).
    // Undamped simultaneous iteration diverges for m >= 5.
    std::optional<double> damping;
};

// Iterated (damped) simultaneous best responses from M_i = Y'_i / 3. On
// convergence, players whose best response at the result is zero are set to
// zero. Throws NonConvergenceError carrying the last iterate.
EquilibriumResult equilibrium_fixed_point(const EquilibriumProblem& problem, const FixedPointOptions& options = {});

// M-hat_i / H-hat = (Y'_i / H-hat - 1) / 2, floored at 0.
double share_at_world_hash(double break_even_riskfree, double world_hash) noexcept;

struct ShareReport {
    std::vector<double> shares;
    std::vector<bool> dominant;  // share >= 1/2
    bool any_dominant = false;
};

inline constexpr double kDominanceThreshold = 0.5;

ShareReport share_and_dominance(const EquilibriumResult& result, const std::vector<double>& costs,
                                const Environment& env);

}  // namespace minerkelly
