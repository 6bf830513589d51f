#pragma once

// Domain types shared by every module. Quantities:
//   currency      asset amounts (E, L, M, F), block reward B
//   time          block interval tau, horizon T (same unit, seconds in scenario files)
//   rates         r and c are per block interval tau
// Hash rate of a player is M / d. With homogeneous facility prices the
// analytics normalize d = 1, so M is the hash rate directly.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace minerkelly {

struct Environment {
    double block_reward = 0.0;    // B
    double block_interval = 0.0;  // tau
    double riskfree_rate = 0.0;   // r, per interval tau
    double difficulty = 0.0;      // D, hash * time; 0 until a scenario is resolved

    // Throws std::invalid_argument unless B > 0, tau > 0, r >= 0 and D >= 0.
    void check() const;
};

struct BalanceSheet {
    double equity = 0.0;           // E
    double liabilities = 0.0;      // L
    double mining_assets = 0.0;    // M
    double riskfree_assets = 0.0;  // F

    bool is_zero() const noexcept {
        return equity == 0.0 && liabilities == 0.0 && mining_assets == 0.0 && riskfree_assets == 0.0;
    }
    // M / E; 0 for an empty sheet.
    double leverage() const noexcept { return equity > 0.0 ? mining_assets / equity : 0.0; }

    friend bool operator==(const BalanceSheet&, const BalanceSheet&) = default;
};

enum class SheetViolation {
    NonFinite,
    Negative,
    AccountingIdentity,  // E + L != M + F
    Complementarity,     // L != 0 and F != 0
};

std::string_view to_string(SheetViolation v) noexcept;

// Relative tolerance of the accounting identity, scaled by max(E + L, M + F, 1).
inline constexpr double kAccountingTolerance = 1e-12;

// First violated invariant, or nullopt when the sheet is valid.
std::optional<SheetViolation> validate(const BalanceSheet& sheet) noexcept;

// Sheet with M / E = leverage. leverage > 1 borrows (F = 0, L = M - E),
// 0 < leverage <= 1 parks the rest riskfree (L = 0, F = E - M), and
// leverage <= 0 (unprofitable) yields the zero sheet.
// Throws std::invalid_argument for non-finite input or negative M.
BalanceSheet make_balance_sheet(double mining_assets, double leverage);

struct StaticStrategy {
    BalanceSheet sheet;
};

// Re-optimizes every stage. When mining_assets is set the hash is pinned and
// only the leverage is re-optimized (the "given success probability" miner);
// otherwise the mining assets follow the Sharpe-maximizing best response.
struct GrowthRateStrategy {
    std::optional<double> mining_assets;
};

using Strategy = std::variant<StaticStrategy, GrowthRateStrategy>;

struct PlayerSpec {
    std::string id;
    double facility_price = 1.0;  // d_i, currency per unit hash rate
    double cost_rate = 0.0;       // c_i, currency per unit hash rate per tau
    Strategy strategy = GrowthRateStrategy{};
    // Deterministic cash flow received each stage on top of R_i (r L for a risk-free-reward pool).
    double extra_revenue = 0.0;

    bool is_growth() const noexcept { return std::holds_alternative<GrowthRateStrategy>(strategy); }
    // c_i / d_i: cost per unit of mining assets per tau.
    double cost_per_asset() const noexcept { return cost_rate / facility_price; }
};

struct RiskSharingPoolSpec {
    std::string id;
    std::vector<std::string> members;
    bool growth_rate = false;
};

// Constant-elasticity hash supply Phi(c) = scale (c / reference_rate)^elasticity.
// Stand-in for the collaborator market, which is not modeled.
struct HashSupplyCurve {
    double scale = 0.0;
    double reference_rate = 1.0;
    double elasticity = 1.0;

    double hash_at(double offered_rate) const;
    double rate_for(double hash) const;
};

struct RiskFreePoolSpec {
    std::string id;
    double target_p = 0.0;
    double offered_cost_rate = 0.0;  // per unit hash per tau; derived from supply when 0
    std::optional<HashSupplyCurve> supply;
};

using PoolSpec = std::variant<RiskSharingPoolSpec, RiskFreePoolSpec>;

struct Scenario {
    Environment environment;
    std::vector<PlayerSpec> players;
    double exogenous_hash = 0.0;  // Z, mining assets held outside the modeled players
    double horizon = 0.0;         // T
    std::uint64_t seed = 0;
    std::vector<PoolSpec> pools;

    void check() const;
};

// Distribution of the per-stage return rate: up with probability p, down otherwise.
struct TwoPointReturn {
    double up = 0.0;
    double down = 0.0;
    double prob = 0.0;

    void check() const;
    double mean() const noexcept { return prob * up + (1.0 - prob) * down; }
    double variance() const noexcept {
        const double spread = up - down;
        return prob * (1.0 - prob) * spread * spread;
    }
};

struct RewardMoments {
    double mean = 0.0;
    double variance = 0.0;
    double sharpe = 0.0;  // (mean - r) / sqrt(variance); +-inf when variance = 0

    static RewardMoments from(double mean, double variance, double riskfree_rate);
};

struct EquilibriumResult {
    std::vector<double> holdings;   // M-hat per growth player, in problem order
    double world_hash = 0.0;        // H-hat = sum(holdings) + Z
    double exogenous_hash = 0.0;    // Z
    std::vector<double> shares;     // holdings / H-hat
    std::vector<bool> in_support;   // holdings > 0
    std::vector<double> payoff_per_stage;  // S_i^2 / 2 + r - r^2 / 2, log(1 + r) outside the support
    int iterations = 0;             // fixed-point solver only
};

}  // namespace minerkelly
