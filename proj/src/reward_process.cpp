#include "minerkelly/reward_process.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "minerkelly/errors.hpp"

namespace minerkelly {

namespace {

// Largest argument for which std::exp is finite.
constexpr double kMaxExpArg = 709.782712893384;

double checked_exp(double x, const char* what) {
    if (x > kMaxExpArg) throw OverflowError(std::string(what) + ": value overflows, use the log-domain variant");
    return std::exp(x);
}

// log(p e^x + 1 - p) without overflow for large x and without cancellation near 0.
double log_mixture(double p, double x) {
    if (p == 0.0) return 0.0;
    if (p == 1.0) return x;
    if (x < 30.0) return std::log1p(p * std::expm1(x));
    return x + std::log(p) + std::log1p((1.0 - p) / p * std::exp(-x));
}

void require_index(std::size_t i, const ProcessState& s) {
    if (i >= s.size()) throw std::out_of_range("player index " + std::to_string(i) + " out of range");
}

}  // namespace

ProcessState ProcessState::homogeneous(const Environment& env, std::span<const double> mining_assets,
                                       std::span<const double> cost_rates) {
    if (mining_assets.size() != cost_rates.size())
        throw std::invalid_argument("ProcessState::homogeneous: size mismatch");
    ProcessState s;
    s.env = env;
    s.sheets.reserve(mining_assets.size());
    for (double m : mining_assets) s.sheets.push_back(BalanceSheet{m, 0.0, m, 0.0});
    s.facility_prices.assign(mining_assets.size(), 1.0);
    s.cost_rates.assign(cost_rates.begin(), cost_rates.end());
    return s;
}

double ProcessState::total_hash_rate() const {
    double h = 0.0;
    for (std::size_t i = 0; i < size(); ++i) h += hash_rate(i);
    return h;
}

bool ProcessState::is_homogeneous() const noexcept {
    return std::adjacent_find(facility_prices.begin(), facility_prices.end(), std::not_equal_to<>()) ==
           facility_prices.end();
}

void ProcessState::check() const {
    if (facility_prices.size() != sheets.size() || cost_rates.size() != sheets.size())
        throw std::invalid_argument("ProcessState: per-player vectors differ in length");
    for (std::size_t i = 0; i < size(); ++i) {
        if (!(sheets[i].mining_assets >= 0.0) || !std::isfinite(sheets[i].mining_assets))
            throw std::invalid_argument("ProcessState: mining assets must be finite and >= 0");
        if (!(facility_prices[i] > 0.0)) throw std::invalid_argument("ProcessState: facility price must be > 0");
        if (!(cost_rates[i] >= 0.0)) throw std::invalid_argument("ProcessState: cost rate must be >= 0");
    }
}

std::vector<double> success_probabilities(const ProcessState& state) {
    state.check();
    const double total = state.total_hash_rate();
    if (!(total > 0.0)) throw DegenerateStateError("success_probabilities: total hash rate is zero");
    std::vector<double> p(state.size());
    for (std::size_t i = 0; i < state.size(); ++i) p[i] = state.hash_rate(i) / total;
    return p;
}

std::size_t select_winner(std::span<const double> cumulative, double u) noexcept {
    // first index with u < cumulative[i]; cumulative is nondecreasing with last == 1
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
    if (it == cumulative.end()) {
        // u >= every boundary: only possible through rounding; take the last positive-width slot
        std::size_t k = cumulative.size() - 1;
        while (k > 0 && cumulative[k] == cumulative[k - 1]) --k;
        return k;
    }
    return static_cast<std::size_t>(it - cumulative.begin());
}

StageOutcome sample_returns(const ProcessState& state, Rng& rng) {
    const auto p = success_probabilities(state);
    std::vector<double> cumulative(p.size());
    std::partial_sum(p.begin(), p.end(), cumulative.begin());
    cumulative.back() = 1.0;

    StageOutcome out;
    out.winner = select_winner(cumulative, rng.uniform());
    out.returns.resize(state.size());
    for (std::size_t j = 0; j < state.size(); ++j) {
        out.returns[j] = -state.cost_rates[j] * state.hash_rate(j);
    }
    out.returns[out.winner] += state.env.block_reward;
    return out;
}

double expected_return(std::size_t i, const ProcessState& state) {
    require_index(i, state);
    const auto p = success_probabilities(state);
    return p[i] * state.env.block_reward - state.cost_rates[i] * state.hash_rate(i);
}

double return_variance(std::size_t i, const ProcessState& state) {
    require_index(i, state);
    const auto p = success_probabilities(state);
    const double b = state.env.block_reward;
    return b * b * p[i] * (1.0 - p[i]);
}

TwoPointReturn stage_return_rate(std::size_t i, const ProcessState& state) {
    require_index(i, state);
    const double m = state.sheets[i].mining_assets;
    if (!(m > 0.0)) throw UndefinedMomentsError("stage_return_rate: mining assets of player are zero");
    const auto p = success_probabilities(state);
    const double cost = state.cost_rates[i] / state.facility_prices[i];
    return TwoPointReturn{state.env.block_reward / m - cost, -cost, p[i]};
}

RewardMoments return_moments(std::size_t i, const ProcessState& state) {
    require_index(i, state);
    state.check();
    if (!state.is_homogeneous())
        throw UndefinedMomentsError("return_moments: closed form needs homogeneous facility prices");
    const double d = state.facility_prices[i];
    const double mi = state.sheets[i].mining_assets;
    if (!(mi > 0.0)) throw UndefinedMomentsError("return_moments: M_i = 0");

    // with equal d, hash shares equal asset shares; c / d is the cost per unit of M
    double h = 0.0;
    for (const auto& s : state.sheets) h += s.mining_assets;
    const double m_minus = h - mi;
    const double b = state.env.block_reward;
    const double mean = b / h - state.cost_rates[i] / d;
    const double variance = b * b * m_minus / (mi * h * h);
    return RewardMoments::from(mean, variance, state.env.riskfree_rate);
}

BreakEven break_even_hashrate(double cost_rate, const Environment& env) {
    if (!(cost_rate >= 0.0) || !std::isfinite(cost_rate))
        throw std::invalid_argument("break_even_hashrate: cost rate must be finite and >= 0");
    constexpr double inf = std::numeric_limits<double>::infinity();
    BreakEven be;
    be.unbounded = cost_rate == 0.0;
    be.hashrate = be.unbounded ? inf : env.block_reward / cost_rate;
    const double c_r = cost_rate + env.riskfree_rate;
    be.unbounded_riskfree = c_r == 0.0;
    be.hashrate_riskfree = be.unbounded_riskfree ? inf : env.block_reward / c_r;
    return be;
}

double log_mgf_single(double u, std::size_t i, const ProcessState& state) {
    require_index(i, state);
    if (!std::isfinite(u)) throw std::invalid_argument("mgf: u must be finite");
    const auto p = success_probabilities(state);
    const double cost = state.cost_rates[i] * state.hash_rate(i);
    return log_mixture(p[i], u * state.env.block_reward) - u * cost;
}

double mgf_single(double u, std::size_t i, const ProcessState& state) {
    return checked_exp(log_mgf_single(u, i, state), "mgf_single");
}

double arrival_rate(const ProcessState& state) {
    if (!(state.env.difficulty > 0.0)) throw DegenerateStateError("arrival_rate: difficulty D must be > 0");
    return state.total_hash_rate() / state.env.difficulty;
}

double log_mgf_compound(double u, std::size_t i, const ProcessState& state, double horizon) {
    if (!(horizon >= 0.0)) throw std::invalid_argument("mgf_compound: horizon must be >= 0");
    const double log_single = log_mgf_single(u, i, state);
    if (log_single > kMaxExpArg) throw OverflowError("log_mgf_compound: exponent of the compound MGF overflows");
    return horizon * arrival_rate(state) * std::expm1(log_single);
}

double mgf_compound(double u, std::size_t i, const ProcessState& state, double horizon) {
    return checked_exp(log_mgf_compound(u, i, state, horizon), "mgf_compound");
}

double log_mgf_poisson_reward(double u, std::size_t i, const ProcessState& state, double horizon) {
    require_index(i, state);
    if (!std::isfinite(u)) throw std::invalid_argument("mgf: u must be finite");
    if (!(horizon >= 0.0)) throw std::invalid_argument("mgf_poisson_reward: horizon must be >= 0");
    if (!(state.env.difficulty > 0.0)) throw DegenerateStateError("mgf_poisson_reward: difficulty D must be > 0");
    const double x = u * state.env.block_reward;
    if (x > kMaxExpArg) throw OverflowError("log_mgf_poisson_reward: e^{uB} overflows");
    const double rate = state.hash_rate(i) / state.env.difficulty;
    return horizon * rate * std::expm1(x);
}

double mgf_poisson_reward(double u, std::size_t i, const ProcessState& state, double horizon) {
    return checked_exp(log_mgf_poisson_reward(u, i, state, horizon), "mgf_poisson_reward");
}

}  // namespace minerkelly
