#pragma once

// Monte Carlo engine for the repeated Nakamoto Game and the two-outcome
// betting game.
//
// Stage sequence of the Nakamoto Game over [0, T]:
//   1. every player picks its balance sheet (static players keep theirs,
//      growth-rate players recompute the optimal one against the current
//      opponents),
//   2. wait for the next Poisson trigger, rate lambda = (sum_j M_j / d_j) / D,
//   3. one reward draw of the Nakamoto Reward Process,
//   4. interest r (L - F) is settled.
// Stage payoff is log(1 + (R_i - r (L_i - F_i)) / E_i).
//
// Trajectory k draws from its own stream Rng::stream(seed, k), so results
// do not depend on the number of worker threads.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "minerkelly/reward_process.hpp"
#include "minerkelly/stats.hpp"
#include "minerkelly/types.hpp"

namespace minerkelly {

inline constexpr std::size_t kExogenousWinner = std::numeric_limits<std::size_t>::max();

struct SimulationOptions {
    std::size_t trajectories = 1000;
    unsigned workers = 1;              // 0 = hardware concurrency
    bool record_paths = false;         // keep stage times, winners and equity series
    bool retarget_difficulty = false;  // recompute D = tau * H before every stage
};

struct Trajectory {
    std::vector<double> stage_times;
    std::vector<std::size_t> winners;             // player index, kExogenousWinner for Z
    std::vector<std::vector<double>> equity;      // per player, one entry per stage plus the start
    std::vector<double> cumulative_log_payoff;    // per player
    std::vector<double> total_return;             // per player, sum of R_i
    std::vector<double> total_revenue;            // per player, B times wins
    std::vector<bool> ruined;                     // a stage log argument went <= 0
    std::uint64_t stages = 0;
};

struct PlayerSummary {
    stats::Moments stage_log_payoff;  // pooled over all stages of all trajectories
    stats::Moments stage_return;      // R_i per stage
    stats::Moments final_log_wealth;  // cumulative log payoff per trajectory
    std::size_t ruined = 0;
};

struct SimulationResult {
    std::vector<Trajectory> trajectories;
    std::vector<PlayerSummary> players;
    stats::Moments stage_count;
    double arrival_rate = 0.0;   // lambda at the initial holdings
    double expected_stages = 0.0;  // T lambda
    std::vector<double> initial_holdings;
};

// Mining assets each player holds at t = 0: static sheets, pinned growth
// holdings, and the closed-form equilibrium for the remaining growth players
// (with everything else counted as exogenous hash).
std::vector<double> initial_holdings(const Scenario& scenario);

// Hash rate of the exogenous mining assets Z (priced at the common facility price).
double exogenous_hash_rate(const Scenario& scenario);

// Process state with the players at `holdings` followed by the exogenous
// hash as an extra cost-free entry (index players.size()).
ProcessState scenario_state(const Scenario& scenario, std::span<const double> holdings);

// Returns the scenario with D = tau * (sum_j M_j / d_j + Z / d) at the initial holdings.
Scenario with_difficulty(Scenario scenario);

// The sheet a growth-rate player picks against `holdings` (its own entry is
// ignored unless pinned). Pure function of its inputs.
BalanceSheet growth_rate_decision(const Scenario& scenario, std::size_t player, std::span<const double> holdings);

// Holdings every growth-rate player moves to given the previous stage's holdings.
std::vector<double> growth_rate_holdings(const Scenario& scenario, std::span<const double> previous);

SimulationResult run_nakamoto(const Scenario& scenario, const SimulationOptions& options);

struct CoinflipStats {
    std::vector<double> final_wealth;
    double median_wealth = 0.0;
    stats::Moments log_wealth;        // final log wealth per trajectory
    stats::Moments log_growth;        // per-round log growth, pooled
};

// wealth_t = wealth_0 prod (1 + f W_t). Throws InfeasibleLeverageError when
// 1 + f down <= 0.
CoinflipStats run_coinflip(const TwoPointReturn& ret, double leverage, std::size_t rounds, std::size_t trajectories,
                           double initial_wealth, std::uint64_t seed, unsigned workers = 1);

struct SweepPoint {
    double p = 0.0;
    double leverage = 0.0;
    double log_payoff = 0.0;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    bool has_zero_crossing = false;
    double zero_crossing_p = 0.0;  // first grid p at which f drops to 0
    double argmax_p = 0.0;         // grid p with the largest expected log payoff
};

// Entrant with success probability p against fixed others' mining assets:
// M_i = p / (1 - p) M_-i, f = f_max_exact, payoff E[log(1 + X)] at f.
SweepResult sweep_f_vs_p(double others_mining_assets, double cost_rate, const Environment& env,
                         std::span<const double> p_grid);

// k / n for k = 1 .. n - 1.
std::vector<double> uniform_p_grid(std::size_t n);

struct PoissonCheck {
    std::string player_id;
    stats::KsResult ks;
    double simulated_mean = 0.0;
    double poisson_mean = 0.0;
};

// Revenue of each player over the horizon from the simulator against direct
// sampling of the Poisson reward model (B times Poisson(T M_i / (D d_i))).
std::vector<PoissonCheck> verify_poisson(const Scenario& scenario, std::size_t samples, unsigned workers = 1);

}  // namespace minerkelly
