#include "minerkelly/types.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace minerkelly {

void Environment::check() const {
    if (!std::isfinite(block_reward) || block_reward <= 0.0)
        throw std::invalid_argument("block_reward must be finite and > 0");
    if (!std::isfinite(block_interval) || block_interval <= 0.0)
        throw std::invalid_argument("block_interval must be finite and > 0");
    if (!std::isfinite(riskfree_rate) || riskfree_rate < 0.0)
        throw std::invalid_argument("riskfree_rate must be finite and >= 0");
    if (!std::isfinite(difficulty) || difficulty < 0.0)
        throw std::invalid_argument("difficulty must be finite and >= 0");
}

std::string_view to_string(SheetViolation v) noexcept {
    switch (v) {
        case SheetViolation::NonFinite: return "non-finite";
        case SheetViolation::Negative: return "negative";
        case SheetViolation::AccountingIdentity: return "accounting identity";
        case SheetViolation::Complementarity: return "complementarity";
    }
    return "unknown";
}

std::optional<SheetViolation> validate(const BalanceSheet& s) noexcept {
    const double fields[] = {s.equity, s.liabilities, s.mining_assets, s.riskfree_assets};
    for (double x : fields)
        if (!std::isfinite(x)) return SheetViolation::NonFinite;
    for (double x : fields)
        if (x < 0.0) return SheetViolation::Negative;

    const double lhs = s.equity + s.liabilities;
    const double rhs = s.mining_assets + s.riskfree_assets;
    const double scale = std::max({lhs, rhs, 1.0});
    if (std::abs(lhs - rhs) > kAccountingTolerance * scale) return SheetViolation::AccountingIdentity;

    if (s.liabilities != 0.0 && s.riskfree_assets != 0.0) return SheetViolation::Complementarity;
    return std::nullopt;
}

BalanceSheet make_balance_sheet(double mining_assets, double leverage) {
    if (!std::isfinite(mining_assets) || !std::isfinite(leverage))
        throw std::invalid_argument("make_balance_sheet: non-finite input");
    if (mining_assets < 0.0) throw std::invalid_argument("make_balance_sheet: mining_assets < 0");
    if (leverage <= 0.0 || mining_assets == 0.0) return {};

    BalanceSheet s;
    s.mining_assets = mining_assets;
    s.equity = mining_assets / leverage;
    if (leverage > 1.0) {
        s.liabilities = mining_assets - s.equity;
    } else {
        s.riskfree_assets = s.equity - mining_assets;
    }
    return s;
}

void Scenario::check() const {
    environment.check();
    if (players.empty()) throw std::invalid_argument("scenario needs at least one player");
    if (!std::isfinite(exogenous_hash) || exogenous_hash < 0.0)
        throw std::invalid_argument("exogenous_hash must be >= 0");
    if (!std::isfinite(horizon) || horizon <= 0.0) throw std::invalid_argument("horizon must be > 0");
    for (const auto& p : players) {
        if (!(p.facility_price > 0.0) || !std::isfinite(p.facility_price))
            throw std::invalid_argument("player " + p.id + ": facility_price must be > 0");
        if (!(p.cost_rate >= 0.0) || !std::isfinite(p.cost_rate))
            throw std::invalid_argument("player " + p.id + ": cost_rate must be >= 0");
    }
}

void TwoPointReturn::check() const {
    if (!std::isfinite(up) || !std::isfinite(down) || !std::isfinite(prob))
        throw std::invalid_argument("TwoPointReturn: non-finite field");
    if (prob < 0.0 || prob > 1.0) throw std::invalid_argument("TwoPointReturn: prob outside [0, 1]");
    if (!(up > down)) throw std::invalid_argument("TwoPointReturn: up must exceed down");
    if (!(down > -1.0)) throw std::invalid_argument("TwoPointReturn: down must exceed -1");
}

RewardMoments RewardMoments::from(double mean, double variance, double riskfree_rate) {
    RewardMoments m{mean, variance, 0.0};
    const double excess = mean - riskfree_rate;
    if (variance > 0.0) {
        m.sharpe = excess / std::sqrt(variance);
    } else if (excess != 0.0) {
        m.sharpe = std::copysign(std::numeric_limits<double>::infinity(), excess);
    }
    return m;
}

}  // namespace minerkelly
