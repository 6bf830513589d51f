#include "minerkelly/kelly.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "minerkelly/errors.hpp"

namespace minerkelly {

namespace {

ExactLeverage finish(double stationary, const LeverageBound& bound) {
    ExactLeverage out;
    out.upper_bound = bound.bounded ? bound.upper : std::numeric_limits<double>::infinity();
    if (!(stationary > 0.0)) {
        out.unprofitable = true;
        return out;
    }
    const double limit = bound.upper * (1.0 - kBoundaryMargin);
    if (bound.bounded && stationary >= limit) {
        out.value = limit;
        out.clamped = true;
    } else {
        out.value = stationary;
    }
    return out;
}

}  // namespace

double expected_log_payoff(double f, const TwoPointReturn& ret, double r) {
    ret.check();
    if (!std::isfinite(f)) throw std::invalid_argument("expected_log_payoff: leverage must be finite");
    const double base = 1.0 + (1.0 - f) * r;
    double total = 0.0;
    if (ret.prob > 0.0) {
        const double arg = base + f * ret.up;
        if (!(arg > 0.0)) throw InfeasibleLeverageError("expected_log_payoff: up branch log argument <= 0", "up");
        total += ret.prob * std::log(arg);
    }
    if (ret.prob < 1.0) {
        const double arg = base + f * ret.down;
        if (!(arg > 0.0))
            throw InfeasibleLeverageError("expected_log_payoff: down branch log argument <= 0", "down");
        total += (1.0 - ret.prob) * std::log(arg);
    }
    return total;
}

LeverageBound feasible_leverage_bound(const TwoPointReturn& ret, double r) {
    // 1 + r + f (x - r) = 0  =>  f = (1 + r) / (r - x), relevant when x < r
    LeverageBound b;
    for (double x : {ret.up, ret.down}) {
        if (x < r) {
            const double f = (1.0 + r) / (r - x);
            if (!b.bounded || f < b.upper) b.upper = f;
            b.bounded = true;
        }
    }
    return b;
}

ExactLeverage f_max_exact(const TwoPointReturn& ret, double r) {
    ret.check();
    if (ret.up == r) throw SingularConfigurationError("f_max_exact: up return equals the riskfree rate");
    if (ret.down >= r)
        throw SingularConfigurationError("f_max_exact: down return >= riskfree rate, leverage is unbounded");
    const double excess = ret.mean() - r;
    if (!(excess > 0.0)) return finish(0.0, feasible_leverage_bound(ret, r));
    const double stationary = (1.0 + r) * excess / ((ret.up - r) * (r - ret.down));
    return finish(stationary, feasible_leverage_bound(ret, r));
}

TwoPointReturn mining_return(double m, double m_minus, double c, double b) {
    if (!(m > 0.0)) throw UndefinedMomentsError("mining_return: mining assets must be > 0");
    if (!(m_minus >= 0.0)) throw std::invalid_argument("mining_return: others' mining assets must be >= 0");
    return TwoPointReturn{b / m - c, -c, m / (m + m_minus)};
}

ExactLeverage f_max_exact(double m, double m_minus, double b, double c, double r) {
    if (!(m > 0.0) || !(m_minus >= 0.0) || !(b > 0.0) || !(c >= 0.0) || !(r >= 0.0))
        throw std::invalid_argument("f_max_exact: need M_i > 0, M_-i >= 0, B > 0, c >= 0, r >= 0");
    const double cr = c + r;
    const double h = m + m_minus;
    const double den = h * cr * (m * cr - b);
    if (cr == 0.0 || den == 0.0)
        throw SingularConfigurationError("f_max_exact: singular configuration M_i (r + c) = B or c + r = 0");
    // mu - r = (B - H (c + r)) / H; beyond break-even the stationary point lies past the feasibility bound
    if (!(h * cr - b < 0.0)) return finish(0.0, LeverageBound{(1.0 + r) / cr, true});
    const double stationary = m * (r + 1.0) * (h * cr - b) / den;
    LeverageBound bound{(1.0 + r) / cr, true};  // down branch d = -c < r
    return finish(stationary, bound);
}

ApproxLeverage f_star_approx(double mean, double variance, double r) {
    if (!(variance > 0.0)) throw DegenerateReturnError("f_star_approx: variance must be > 0");
    const double simple = (mean - r) / variance;
    return ApproxLeverage{simple * (1.0 + r), simple};
}

double g_infinity(double f, double mean, double variance, double r) noexcept {
    return r - r * r / 2.0 + f * (mean - r) - f * f * variance / 2.0;
}

LeverageSolution solve_leverage(const TwoPointReturn& ret, double r) {
    const ExactLeverage exact = f_max_exact(ret, r);
    LeverageSolution s;
    s.f_exact = exact.value;
    s.clamped = exact.clamped;
    s.unprofitable = exact.unprofitable;
    s.expected_log_payoff_at_exact = expected_log_payoff(exact.value, ret, r);

    const auto moments = RewardMoments::from(ret.mean(), ret.variance(), r);
    s.sharpe = moments.sharpe;
    if (moments.variance > 0.0) {
        const auto approx = f_star_approx(moments.mean, moments.variance, r);
        s.f_approx = approx.full;
        s.f_simple = approx.simple;
    } else {
        s.f_approx = s.f_simple = s.f_exact;
    }
    const double tol = 0.1 * std::abs(s.f_exact);
    s.approximation_divergent =
        std::abs(s.f_approx - s.f_exact) > tol && std::abs(s.f_simple - s.f_exact) > tol;
    return s;
}

OptimalSheet optimal_balance_sheet_for_M(double m, double m_minus, double c, const Environment& env) {
    if (!(m >= 0.0) || !std::isfinite(m)) throw std::invalid_argument("optimal_balance_sheet_for_M: M_i must be >= 0");
    OptimalSheet out;
    if (m == 0.0) {
        out.leverage.unprofitable = true;
        out.leverage.expected_log_payoff_at_exact = std::log1p(env.riskfree_rate);
        return out;
    }
    const TwoPointReturn ret = mining_return(m, m_minus, c, env.block_reward);
    out.moments = RewardMoments::from(ret.mean(), ret.variance(), env.riskfree_rate);
    out.leverage = solve_leverage(ret, env.riskfree_rate);
    out.sheet = make_balance_sheet(m, out.leverage.f_exact);
    return out;
}

OptimalSheet optimal_balance_sheet(std::size_t i, const ProcessState& state) {
    OptimalSheet out;
    const double m = state.sheets.at(i).mining_assets;
    if (m == 0.0) {
        out.leverage.unprofitable = true;
        out.leverage.expected_log_payoff_at_exact = std::log1p(state.env.riskfree_rate);
        return out;
    }
    const TwoPointReturn ret = stage_return_rate(i, state);
    out.moments = RewardMoments::from(ret.mean(), ret.variance(), state.env.riskfree_rate);
    out.leverage = solve_leverage(ret, state.env.riskfree_rate);
    out.sheet = make_balance_sheet(m, out.leverage.f_exact);
    return out;
}

}  // namespace minerkelly
