#pragma once

// Mining pools as synthetic players.
//
// Risk-sharing pool: members split the reward in proportion to mining assets,
// so the pool behaves like one player with M_P = sum M_j and the asset-weighted
// cost c_P = sum (M_j / M_P) c_j. Dividends are paid outside the game.
//
// Risk-free-reward pool: an operator pays collaborators a fixed rate c per unit
// of hash and keeps the block reward. To reach success probability p it must
// collect Phi = p / (1 - p) M_-i. Its return equals that of an ordinary player
// with the optimal sheet for M = Phi and cost c, plus interest r L per stage.

#include <span>
#include <string>
#include <vector>

#include "minerkelly/kelly.hpp"
#include "minerkelly/rng.hpp"
#include "minerkelly/types.hpp"

namespace minerkelly {

struct PoolMember {
    std::string id;
    double mining_assets = 0.0;
    double cost_rate = 0.0;  // per unit of mining assets
};

struct RiskSharingPool {
    std::vector<double> member_mining_assets;
    std::vector<double> member_cost_rates;
    double aggregate_mining_assets = 0.0;  // M_P
    double cost_mass = 0.0;                // sum M_j c_j
    double aggregate_cost_rate = 0.0;      // c_P = cost_mass / M_P

    std::vector<double> dividend_fractions() const;  // M_j / M_P
};

// Throws std::invalid_argument for an empty pool or a member with M_j <= 0.
RiskSharingPool aggregate_risk_sharing(std::span<const PoolMember> members);

// Pool of pools. Sums run in member order, so merging {A,B} with {C} equals
// aggregating {A,B,C} bit for bit.
RiskSharingPool merge_pools(const RiskSharingPool& a, const RiskSharingPool& b);

// E[W_P] = B/H - c_P, V[W_P] = B^2 (H - M_P) / (M_P H^2); H is the world hash including the pool.
RewardMoments pool_moments(const RiskSharingPool& pool, double world_hash, const Environment& env);

PlayerSpec as_player(const RiskSharingPool& pool, std::string id, Strategy strategy);

struct RiskFreeRewardPool {
    double offered_cost_rate = 0.0;  // c paid to collaborators
    double target_p = 0.0;
    double collected_hash = 0.0;  // Phi
    double others_mining_assets = 0.0;
    BalanceSheet sheet;
    LeverageSolution leverage;
    double extra_revenue = 0.0;  // r L per stage
    bool unprofitable = false;   // f <= 0: zero pool
};

// Phi = p / (1 - p) M_-i, sheet from optimal_balance_sheet_for_M(Phi, M_-i, c).
// Requires 0 < p < 1, c > 0, M_-i > 0.
RiskFreeRewardPool build_risk_free_pool(double target_p, double others_mining_assets, double offered_cost_rate,
                                        const Environment& env);

// Pool's own cash flow in a stage: reward if won, minus c Phi paid out, plus
// interest on the riskfree part of its reserve. The pool borrows nothing.
double pool_stage_cash_flow(const RiskFreeRewardPool& pool, bool won, const Environment& env) noexcept;

// log(1 + cash flow / E); throws InfeasibleLeverageError when the reserve is exhausted.
double pool_stage_log_payoff(const RiskFreeRewardPool& pool, bool won, const Environment& env);

}  // namespace minerkelly
