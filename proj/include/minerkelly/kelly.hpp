#pragma once

// Growth-optimal (Kelly) leverage for a stage whose return rate on the
// risky position is a two-point law. With leverage f = M / E the return on
// equity is X = (1 - f) r + f W and the stage payoff is log(1 + X).

#include <cstddef>

#include "minerkelly/reward_process.hpp"
#include "minerkelly/types.hpp"

namespace minerkelly {

// E[log(1 + X)] = p log(1 + (1-f) r + f u) + (1-p) log(1 + (1-f) r + f d).
// Zero-probability branches are skipped. Throws InfeasibleLeverageError
// (branch "up" or "down") when a live branch has a non-positive log argument.
double expected_log_payoff(double leverage, const TwoPointReturn& ret, double riskfree_rate);

// Smallest positive leverage at which a branch's log argument reaches zero.
// Only branches below the riskfree rate bound the leverage; `bounded` is false otherwise.
struct LeverageBound {
    double upper = 0.0;
    bool bounded = false;
};
LeverageBound feasible_leverage_bound(const TwoPointReturn& ret, double riskfree_rate);

struct ExactLeverage {
    double value = 0.0;
    bool clamped = false;       // stationary point at/after the feasibility bound, value pulled inside
    bool unprofitable = false;  // stationary point <= 0, value = 0
    double upper_bound = 0.0;   // feasibility bound (f_ub)
};

// Relative distance kept from the feasibility bound when clamping.
inline constexpr double kBoundaryMargin = 1e-12;

// Unique stationary point of expected_log_payoff:
//   f = (1 + r)(mu - r) / ((u - r)(r - d)).
// Throws SingularConfigurationError when u = r or d >= r (no finite optimum).
ExactLeverage f_max_exact(const TwoPointReturn& ret, double riskfree_rate);

// Same optimum in mining parameters (homogeneous players):
//   f = M_i (r+1) ((M_i + M_-i)(c+r) - B) / ((M_-i + M_i)(r+c)(M_i (r+c) - B)).
// Throws SingularConfigurationError when M_i (r + c) = B or c + r = 0.
ExactLeverage f_max_exact(double mining_assets, double others_mining_assets, double block_reward,
                          double cost_rate, double riskfree_rate);

struct ApproxLeverage {
    double full = 0.0;    // (mu - r)(1 + r) / sigma^2
    double simple = 0.0;  // (mu - r) / sigma^2
};
// Throws DegenerateReturnError for sigma2 <= 0.
ApproxLeverage f_star_approx(double mean, double variance, double riskfree_rate);

// Quadratic growth approximation r - r^2/2 + f (mu - r) - f^2 sigma^2 / 2.
double g_infinity(double leverage, double mean, double variance, double riskfree_rate) noexcept;

struct LeverageSolution {
    double f_exact = 0.0;
    double f_approx = 0.0;
    double f_simple = 0.0;
    double expected_log_payoff_at_exact = 0.0;
    double sharpe = 0.0;
    bool clamped = false;
    bool unprofitable = false;
    // approximants disagree with f_exact by more than 10%: diagnostic only
    bool approximation_divergent = false;
};

LeverageSolution solve_leverage(const TwoPointReturn& ret, double riskfree_rate);

struct OptimalSheet {
    BalanceSheet sheet;
    LeverageSolution leverage;
    RewardMoments moments;
};

// Unique payoff-maximizing sheet holding mining assets M_i against the others'
// M_-i (homogeneous, cost per unit of M). The exact optimum is authoritative;
// f <= 0 gives the zero sheet and so does M_i = 0.
OptimalSheet optimal_balance_sheet_for_M(double mining_assets, double others_mining_assets, double cost_rate,
                                         const Environment& env);

// Same, with the return law read from a process state (any facility prices).
OptimalSheet optimal_balance_sheet(std::size_t i, const ProcessState& state);

// Two-point return of a homogeneous miner: up = B/M_i - c, down = -c, p = M_i / (M_i + M_-i).
TwoPointReturn mining_return(double mining_assets, double others_mining_assets, double cost_rate,
                             double block_reward);

}  // namespace minerkelly
