#include "minerkelly/pools.hpp"

#include <cmath>
#include <stdexcept>

#include "minerkelly/errors.hpp"

namespace minerkelly {

std::vector<double> RiskSharingPool::dividend_fractions() const {
    std::vector<double> out;
    out.reserve(member_mining_assets.size());
    for (double m : member_mining_assets) out.push_back(m / aggregate_mining_assets);
    return out;
}

RiskSharingPool aggregate_risk_sharing(std::span<const PoolMember> members) {
    if (members.empty()) throw std::invalid_argument("aggregate_risk_sharing: empty pool");
    RiskSharingPool pool;
    for (const auto& mem : members) {
        if (!(mem.mining_assets > 0.0)) throw std::invalid_argument("aggregate_risk_sharing: member " + mem.id + " has M <= 0");
        if (!(mem.cost_rate >= 0.0)) throw std::invalid_argument("aggregate_risk_sharing: member " + mem.id + " has c < 0");
        pool.member_mining_assets.push_back(mem.mining_assets);
        pool.member_cost_rates.push_back(mem.cost_rate);
        pool.aggregate_mining_assets += mem.mining_assets;
        pool.cost_mass += mem.mining_assets * mem.cost_rate;
    }
    pool.aggregate_cost_rate = pool.cost_mass / pool.aggregate_mining_assets;
    return pool;
}

RiskSharingPool merge_pools(const RiskSharingPool& a, const RiskSharingPool& b) {
    RiskSharingPool pool = a;
    pool.member_mining_assets.insert(pool.member_mining_assets.end(), b.member_mining_assets.begin(),
                                     b.member_mining_assets.end());
    pool.member_cost_rates.insert(pool.member_cost_rates.end(), b.member_cost_rates.begin(), b.member_cost_rates.end());
    // continue a's left fold over b's members rather than adding b's totals
    for (std::size_t j = 0; j < b.member_mining_assets.size(); ++j) {
        pool.aggregate_mining_assets += b.member_mining_assets[j];
        pool.cost_mass += b.member_mining_assets[j] * b.member_cost_rates[j];
    }
    pool.aggregate_cost_rate = pool.cost_mass / pool.aggregate_mining_assets;
    return pool;
}

RewardMoments pool_moments(const RiskSharingPool& pool, double h, const Environment& env) {
    const double mp = pool.aggregate_mining_assets;
    if (!(h >= mp) || !(mp > 0.0)) throw std::invalid_argument("pool_moments: need 0 < M_P <= H");
    const double b = env.block_reward;
    return RewardMoments::from(b / h - pool.aggregate_cost_rate, b * b * (h - mp) / (mp * h * h), env.riskfree_rate);
}

PlayerSpec as_player(const RiskSharingPool& pool, std::string id, Strategy strategy) {
    PlayerSpec p;
    p.id = std::move(id);
    p.facility_price = 1.0;
    p.cost_rate = pool.aggregate_cost_rate;
    p.strategy = std::move(strategy);
    return p;
}

RiskFreeRewardPool build_risk_free_pool(double p, double m_minus, double c, const Environment& env) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("build_risk_free_pool: target_p must be in (0, 1)");
    if (!(c > 0.0)) throw std::invalid_argument("build_risk_free_pool: offered cost rate must be > 0");
    if (!(m_minus > 0.0)) throw std::invalid_argument("build_risk_free_pool: others' mining assets must be > 0");
    RiskFreeRewardPool pool;
    pool.offered_cost_rate = c;
    pool.target_p = p;
    pool.others_mining_assets = m_minus;
    pool.collected_hash = p / (1.0 - p) * m_minus;

    const auto opt = optimal_balance_sheet_for_M(pool.collected_hash, m_minus, c, env);
    pool.leverage = opt.leverage;
    pool.unprofitable = opt.leverage.unprofitable || opt.sheet.is_zero();
    if (!pool.unprofitable) {
        pool.sheet = opt.sheet;
        pool.extra_revenue = env.riskfree_rate * opt.sheet.liabilities;
    }
    return pool;
}

double pool_stage_cash_flow(const RiskFreeRewardPool& pool, bool won, const Environment& env) noexcept {
    if (pool.unprofitable) return 0.0;
    const double reward = won ? env.block_reward : 0.0;
    return reward - pool.offered_cost_rate * pool.collected_hash + env.riskfree_rate * pool.sheet.riskfree_assets;
}

double pool_stage_log_payoff(const RiskFreeRewardPool& pool, bool won, const Environment& env) {
    if (pool.unprofitable) return std::log1p(env.riskfree_rate);
    const double arg = 1.0 + pool_stage_cash_flow(pool, won, env) / pool.sheet.equity;
    if (!(arg > 0.0)) throw InfeasibleLeverageError("pool_stage_log_payoff: reserve exhausted", won ? "up" : "down");
    return std::log(arg);
}

double HashSupplyCurve::hash_at(double c) const {
    if (!(c >= 0.0)) throw std::invalid_argument("HashSupplyCurve: rate must be >= 0");
    return scale * std::pow(c / reference_rate, elasticity);
}

double HashSupplyCurve::rate_for(double hash) const {
    if (!(hash >= 0.0) || !(scale > 0.0) || elasticity == 0.0)
        throw std::invalid_argument("HashSupplyCurve: cannot invert");
    return reference_rate * std::pow(hash / scale, 1.0 / elasticity);
}

}  // namespace minerkelly
