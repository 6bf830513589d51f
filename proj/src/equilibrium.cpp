#include "minerkelly/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "minerkelly/errors.hpp"

namespace minerkelly {

namespace {

std::vector<double> break_evens(const EquilibriumProblem& p) {
    std::vector<double> y(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) y[i] = riskfree_break_even(p.growth_costs[i], p.env);
    return y;
}

// Fills world hash, shares, support and the approximate stage payoff S^2/2 + r - r^2/2.
void finalize(EquilibriumResult& res, const EquilibriumProblem& p) {
    const double r = p.env.riskfree_rate;
    res.exogenous_hash = p.exogenous_hash;
    res.world_hash = std::accumulate(res.holdings.begin(), res.holdings.end(), p.exogenous_hash);
    const std::size_t m = res.holdings.size();
    res.shares.assign(m, 0.0);
    res.in_support.assign(m, false);
    res.payoff_per_stage.assign(m, std::log1p(r));
    for (std::size_t i = 0; i < m; ++i) {
        const double mi = res.holdings[i];
        if (!(mi > 0.0)) continue;
        res.in_support[i] = true;
        res.shares[i] = mi / res.world_hash;
        const double s = sharpe_ratio(mi, res.world_hash - mi, p.growth_costs[i], p.env);
        res.payoff_per_stage[i] = s * s / 2.0 + r - r * r / 2.0;
    }
}

}  // namespace

void EquilibriumProblem::check() const {
    env.check();
    if (growth_costs.empty()) throw std::invalid_argument("EquilibriumProblem: need at least one growth player");
    for (double c : growth_costs)
        if (!(c >= 0.0) || !std::isfinite(c)) throw std::invalid_argument("EquilibriumProblem: costs must be >= 0");
    if (!(exogenous_hash >= 0.0) || !std::isfinite(exogenous_hash))
        throw std::invalid_argument("EquilibriumProblem: Z must be >= 0");
    for (double c : growth_costs)
        if (!(c + env.riskfree_rate > 0.0))
            throw std::invalid_argument("EquilibriumProblem: c + r must be > 0 (finite break-even)");
}

double riskfree_break_even(double c, const Environment& env) {
    const double cr = c + env.riskfree_rate;
    if (!(cr > 0.0)) throw std::invalid_argument("riskfree_break_even: c + r must be > 0");
    return env.block_reward / cr;
}

double sharpe_ratio(double m, double m_minus, double c, const Environment& env) {
    const double num = 1.0 - (c + env.riskfree_rate) / env.block_reward * (m + m_minus);
    return num / std::sqrt(m_minus / m);
}

double best_response(double m_minus, double c, const Environment& env) {
    if (!(m_minus >= 0.0)) throw std::invalid_argument("best_response: M_-i must be >= 0");
    return std::max(0.0, (riskfree_break_even(c, env) - m_minus) / 3.0);
}

EquilibriumResult equilibrium_closed_form(const EquilibriumProblem& p) {
    p.check();
    const double b = p.env.block_reward;
    const double z = p.exogenous_hash;
    std::vector<double> inv(p.size());  // 1 / (c_i + r)
    for (std::size_t i = 0; i < p.size(); ++i) inv[i] = 1.0 / (p.growth_costs[i] + p.env.riskfree_rate);

    std::vector<bool> active(p.size(), true);
    std::vector<double> holdings(p.size(), 0.0);
    for (;;) {
        const auto m = static_cast<double>(std::count(active.begin(), active.end(), true));
        if (m == 0.0) break;
        double inv_sum = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (active[i]) inv_sum += inv[i];

        std::size_t worst = p.size();
        double worst_value = 0.0;
        for (std::size_t i = 0; i < p.size(); ++i) {
            if (!active[i]) {
                holdings[i] = 0.0;
                continue;
            }
            holdings[i] = (inv[i] - inv_sum / (m + 2.0)) * b / 2.0 - z / (m + 2.0);
            if (holdings[i] < worst_value) {
                worst_value = holdings[i];
                worst = i;
            }
        }
        if (worst == p.size()) break;
        active[worst] = false;
        holdings[worst] = 0.0;
    }

    EquilibriumResult res;
    res.holdings = std::move(holdings);
    finalize(res, p);

    // removed players must not want to re-enter against the final aggregate
    for (std::size_t i = 0; i < p.size(); ++i) {
        if (active[i]) continue;
        const double br = best_response(res.world_hash, p.growth_costs[i], p.env);
        if (br > 1e-12 * res.world_hash)
            throw Error("equilibrium_closed_form: removed player " + std::to_string(i) + " has a positive best response");
    }
    return res;
}

EquilibriumResult equilibrium_fixed_point(const EquilibriumProblem& p, const FixedPointOptions& opt) {
    p.check();
    if (!(opt.tolerance > 0.0)) throw std::invalid_argument("equilibrium_fixed_point: tolerance must be > 0");
    const std::size_t m = p.size();
    const double alpha = opt.damping.value_or(std::min(1.0, 6.0 / (static_cast<double>(m) + 4.0)));
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("equilibrium_fixed_point: damping must be in (0, 1]");

    const auto y = break_evens(p);
    std::vector<double> cur(m), next(m);
    for (std::size_t i = 0; i < m; ++i) cur[i] = y[i] / 3.0;

    for (int it = 1; it <= opt.max_iterations; ++it) {
        const double total = std::accumulate(cur.begin(), cur.end(), p.exogenous_hash);
        double change = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double br = std::max(0.0, (y[i] - (total - cur[i])) / 3.0);
            next[i] = (1.0 - alpha) * cur[i] + alpha * br;
            // exiting players decay geometrically, so measure them against the world hash
            const double scale = br > 0.0 ? std::max(next[i], cur[i]) : total;
            if (scale > 0.0) change = std::max(change, std::abs(next[i] - cur[i]) / scale);
        }
        cur.swap(next);
        if (change < opt.tolerance) {
            // support: players whose best response at the converged point is positive
            const double world = std::accumulate(cur.begin(), cur.end(), p.exogenous_hash);
            for (std::size_t i = 0; i < m; ++i)
                if (!((y[i] - (world - cur[i])) / 3.0 > 0.0)) cur[i] = 0.0;
            EquilibriumResult res;
            res.holdings = cur;
            res.iterations = it;
            finalize(res, p);
            return res;
        }
    }
    throw NonConvergenceError("equilibrium_fixed_point: no convergence after " + std::to_string(opt.max_iterations) +
                                  " iterations",
                              cur, opt.max_iterations);
}

double share_at_world_hash(double y_prime, double world_hash) noexcept {
    return std::max(0.0, 0.5 * (y_prime / world_hash - 1.0));
}

ShareReport share_and_dominance(const EquilibriumResult& result, const std::vector<double>& costs,
                                const Environment& env) {
    if (costs.size() != result.holdings.size())
        throw std::invalid_argument("share_and_dominance: costs and holdings differ in length");
    ShareReport rep;
    rep.shares.assign(costs.size(), 0.0);
    rep.dominant.assign(costs.size(), false);
    for (std::size_t i = 0; i < costs.size(); ++i) {
        if (!(result.holdings[i] > 0.0)) continue;
        rep.shares[i] = share_at_world_hash(riskfree_break_even(costs[i], env), result.world_hash);
        rep.dominant[i] = rep.shares[i] >= kDominanceThreshold - 1e-12;
        rep.any_dominant = rep.any_dominant || rep.dominant[i];
    }
    return rep;
}

}  // namespace minerkelly
