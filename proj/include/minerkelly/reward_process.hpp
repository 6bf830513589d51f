#pragma once

// One draw of the Nakamoto Reward Process: a single winner, chosen with
// probability proportional to hash rate M_j / d_j, earns B; every player pays
// its deterministic cost c_j M_j / d_j. Also the MGFs of a single draw, of
// the compound-Poisson sum over a horizon, and of the Poisson reward model.

#include <cstddef>
#include <span>
#include <vector>

#include "minerkelly/rng.hpp"
#include "minerkelly/types.hpp"

namespace minerkelly {

struct ProcessState {
    Environment env;
    std::vector<BalanceSheet> sheets;
    std::vector<double> facility_prices;  // d_j
    std::vector<double> cost_rates;       // c_j

    // d = 1 for everybody; sheets carry only mining assets.
    static ProcessState homogeneous(const Environment& env, std::span<const double> mining_assets,
                                    std::span<const double> cost_rates);

    std::size_t size() const noexcept { return sheets.size(); }
    double hash_rate(std::size_t i) const { return sheets[i].mining_assets / facility_prices[i]; }
    double total_hash_rate() const;
    // True when every d_j is equal, the precondition of the closed-form moments.
    bool is_homogeneous() const noexcept;
    // Throws std::invalid_argument on size mismatch, negative M, d <= 0 or c < 0.
    void check() const;
};

// p_i = (M_i / d_i) / sum_j M_j / d_j. Throws DegenerateStateError if all hash is zero.
std::vector<double> success_probabilities(const ProcessState& state);

// Inverse-CDF winner selection with one uniform u in [0, 1). A boundary tie
// goes to the lower index; zero-probability players are never selected.
std::size_t select_winner(std::span<const double> cumulative, double u) noexcept;

struct StageOutcome {
    std::size_t winner = 0;
    std::vector<double> returns;  // R_j
};

StageOutcome sample_returns(const ProcessState& state, Rng& rng);

// E[R_i] = p_i B - c_i M_i / d_i and V[R_i] = B^2 p_i (1 - p_i); any facility prices.
double expected_return(std::size_t i, const ProcessState& state);
double return_variance(std::size_t i, const ProcessState& state);

// Per-stage return rate W_i = R_i / M_i as a two-point law:
// up = B / M_i - c_i / d_i, down = -c_i / d_i, prob = p_i.
TwoPointReturn stage_return_rate(std::size_t i, const ProcessState& state);

// Moments of W_i for homogeneous players: mean B/H - c_i, variance
// B^2 M_{-i} / (M_i H^2), Sharpe against env.riskfree_rate.
// Throws UndefinedMomentsError for M_i = 0 or heterogeneous facility prices.
RewardMoments return_moments(std::size_t i, const ProcessState& state);

struct BreakEven {
    double hashrate = 0.0;        // Y = B / c (infinite when c = 0)
    double hashrate_riskfree = 0.0;  // Y' = B / (c + r)
    bool unbounded = false;       // c = 0
    bool unbounded_riskfree = false;  // c + r = 0
};

BreakEven break_even_hashrate(double cost_rate, const Environment& env);

// Single-draw MGF (p_i e^{uB} + 1 - p_i) e^{-u c_i M_i / d_i}. mgf_single throws
// OverflowError when the value is not representable; log_mgf_single never does.
double mgf_single(double u, std::size_t i, const ProcessState& state);
double log_mgf_single(double u, std::size_t i, const ProcessState& state);

// lambda = (sum_j M_j / d_j) / D. Throws DegenerateStateError when D = 0.
double arrival_rate(const ProcessState& state);

// MGF of the sum of returns over a horizon T: exp(T lambda (mgf_single(u) - 1)).
double mgf_compound(double u, std::size_t i, const ProcessState& state, double horizon);
double log_mgf_compound(double u, std::size_t i, const ProcessState& state, double horizon);

// Poisson reward model: revenue B at rate lambda_i = M_i / (D d_i),
// MGF exp(T lambda_i (e^{uB} - 1)).
double mgf_poisson_reward(double u, std::size_t i, const ProcessState& state, double horizon);
double log_mgf_poisson_reward(double u, std::size_t i, const ProcessState& state, double horizon);

}  // namespace minerkelly
