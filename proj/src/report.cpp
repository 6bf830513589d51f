#include "minerkelly/report.hpp"

#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>

#include "minerkelly/equilibrium.hpp"
#include "minerkelly/kelly.hpp"
#include "minerkelly/scenario_io.hpp"

namespace minerkelly {

using nlohmann::json;

namespace {

struct CellText {
    std::string operator()(const std::string& s) const { return s; }
    std::string operator()(double x) const { return format_number(x); }
    std::string operator()(std::int64_t x) const { return std::to_string(x); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

json json_number(double x) {
    if (std::isfinite(x)) return x;
    return format_number(x);  // JSON has no inf / nan
}

std::optional<double> pinned(const PlayerSpec& p) {
    if (const auto* st = std::get_if<StaticStrategy>(&p.strategy)) return st->sheet.mining_assets;
    return std::get<GrowthRateStrategy>(p.strategy).mining_assets;
}

}  // namespace

std::string format_number(double x) {
    if (std::isnan(x)) return "nan";
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void write_csv(std::ostream& out, const Table& t) {
    for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << csv_field(t.columns[k]);
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t k = 0; k < row.size(); ++k) out << (k ? "," : "") << csv_field(std::visit(CellText{}, row[k]));
        out << '\n';
    }
}

json to_json(const Table& t) {
    json rows = json::array();
    for (const auto& row : t.rows) {
        json obj = json::object();
        for (std::size_t k = 0; k < row.size(); ++k) {
            std::visit(
                [&](const auto& v) {
                    using V = std::decay_t<decltype(v)>;
                    if constexpr (std::is_same_v<V, double>) {
                        obj[t.columns[k]] = json_number(v);
                    } else {
                        obj[t.columns[k]] = v;
                    }
                },
                row[k]);
        }
        rows.push_back(std::move(obj));
    }
    return rows;
}

Table optimize_report(const Scenario& s) {
    Table t{{"player_id", "f_exact", "f_approx", "E", "L", "M", "F", "sharpe", "log_payoff"}, {}};
    const auto holdings = initial_holdings(s);
    const auto state = scenario_state(s, holdings);
    for (std::size_t i = 0; i < s.players.size(); ++i) {
        if (!s.players[i].is_growth()) continue;
        const auto opt = optimal_balance_sheet(i, state);
        const auto& b = opt.sheet;
        t.rows.push_back({s.players[i].id, opt.leverage.f_exact, opt.leverage.f_approx, b.equity, b.liabilities,
                          b.mining_assets, b.riskfree_assets, opt.moments.sharpe,
                          opt.leverage.expected_log_payoff_at_exact});
    }
    return t;
}

Table equilibrium_report(const Scenario& s) {
    Table t{{"player_id", "M_hat", "share", "in_support", "dominant"}, {}};
    const auto holdings = initial_holdings(s);
    const double world = std::accumulate(holdings.begin(), holdings.end(), s.exogenous_hash);
    for (std::size_t i = 0; i < s.players.size(); ++i) {
        const double share = world > 0.0 ? holdings[i] / world : 0.0;
        t.rows.push_back({s.players[i].id, holdings[i], share, holdings[i] > 0.0,
                          share >= kDominanceThreshold - 1e-12});
    }
    return t;
}

SweepResult sweep_for_scenario(const Scenario& s, std::size_t grid) {
    std::size_t entrant = 0;
    for (std::size_t i = 0; i < s.players.size(); ++i) {
        if (s.players[i].is_growth()) {
            entrant = i;
            break;
        }
    }
    const auto holdings = initial_holdings(s);
    const double others = std::accumulate(holdings.begin(), holdings.end(), s.exogenous_hash) - holdings[entrant];
    const auto p_grid = uniform_p_grid(grid);
    return sweep_f_vs_p(others, s.players[entrant].cost_per_asset(), s.environment, p_grid);
}

Table sweep_report(const Scenario& s, std::size_t grid) {
    Table t{{"p", "f", "log_payoff"}, {}};
    for (const auto& pt : sweep_for_scenario(s, grid).points) t.rows.push_back({pt.p, pt.leverage, pt.log_payoff});
    return t;
}

Table simulate_report(const Scenario& s, const SimulationOptions& options) {
    Table t{{"trajectory", "player_id", "stages", "final_log_wealth"}, {}};
    if (options.trajectories == 0) return t;
    const auto sim = run_nakamoto(s, options);
    for (std::size_t k = 0; k < sim.trajectories.size(); ++k) {
        const auto& tr = sim.trajectories[k];
        for (std::size_t i = 0; i < s.players.size(); ++i)
            t.rows.push_back({static_cast<std::int64_t>(k), s.players[i].id, static_cast<std::int64_t>(tr.stages),
                              tr.cumulative_log_payoff[i]});
    }
    return t;
}

Table verify_poisson_report(const Scenario& s, std::size_t samples, double alpha, unsigned workers,
                            bool& any_rejected) {
    Table t{{"player_id", "ks_statistic", "p_value", "simulated_mean", "poisson_mean", "rejected"}, {}};
    any_rejected = false;
    for (const auto& chk : verify_poisson(s, samples, workers)) {
        const bool rejected = chk.ks.rejected(alpha);
        any_rejected = any_rejected || rejected;
        t.rows.push_back({chk.player_id, chk.ks.statistic, chk.ks.p_value, chk.simulated_mean, chk.poisson_mean, rejected});
    }
    return t;
}

Scenario bitcoin_scenario() {
    const double price = 9500.0, coins = 12.5;
    const double world_hash_th = 1.1e8;              // TH/s
    const double unit_price = 2200.0, unit_th = 73.0;  // one mining rig
    const double others = world_hash_th / unit_th * unit_price;
    const double p = 0.001;

    Scenario s;
    s.environment.block_reward = price * coins;
    s.environment.block_interval = 600.0;
    s.environment.riskfree_rate = 0.0;
    s.exogenous_hash = others;
    s.horizon = kSecondsPerYear;
    s.seed = 20200101;
    PlayerSpec miner;
    miner.id = "miner";
    miner.cost_rate = 0.8 * s.environment.block_reward / others;
    miner.strategy = GrowthRateStrategy{p / (1.0 - p) * others};
    s.players.push_back(miner);
    return with_difficulty(s);
}

Table bitcoin_example() {
    const Scenario s = bitcoin_scenario();
    const auto& env = s.environment;
    const double r = env.riskfree_rate;
    const double others = s.exogenous_hash;
    const double m = *pinned(s.players[0]);
    const double c = s.players[0].cost_per_asset();
    const TwoPointReturn ret = mining_return(m, others, c, env.block_reward);
    const auto approx = f_star_approx(ret.mean(), ret.variance(), r);
    const auto opt = optimal_balance_sheet_for_M(m, others, c, env);
    const auto at_simple = make_balance_sheet(m, approx.simple);
    const double g_simple = g_infinity(approx.simple, ret.mean(), ret.variance(), r);
    const double per_year = kSecondsPerYear / env.block_interval;
    const double log_exact = opt.leverage.expected_log_payoff_at_exact;

    Table t{{"quantity", "value"}, {}};
    auto row = [&](const char* name, double v) { t.rows.push_back({std::string(name), v}); };
    row("block_reward", env.block_reward);
    row("others_mining_assets", others);
    row("mining_assets", m);
    row("success_probability", m / (m + others));
    row("cost_rate", c);
    row("up_return", ret.up);
    row("down_return", ret.down);
    row("sharpe", opt.moments.sharpe);
    row("f_simple", approx.simple);
    row("f_approx", approx.full);
    row("f_exact", opt.leverage.f_exact);
    row("equity_at_f_simple", at_simple.equity);
    row("liabilities_at_f_simple", at_simple.liabilities);
    row("equity_at_f_exact", opt.sheet.equity);
    row("liabilities_at_f_exact", opt.sheet.liabilities);
    row("growth_rate_at_f_simple", g_simple);
    row("annualized_at_f_simple", std::expm1(per_year * g_simple));
    row("log_payoff_at_f_exact", log_exact);
    row("annualized_at_f_exact", std::expm1(per_year * log_exact));
    row("intervals_per_year", per_year);
    return t;
}

Table coinflip_example() {
    const TwoPointReturn ret{0.23, -0.20, 0.5};
    const auto sol = solve_leverage(ret, 0.0);
    const auto sim = run_coinflip(ret, 1.0, 90, 100000, 1000.0, 20200101);

    Table t{{"quantity", "value"}, {}};
    auto row = [&](const char* name, double v) { t.rows.push_back({std::string(name), v}); };
    row("f_exact", sol.f_exact);
    row("log_payoff_at_f_exact", sol.expected_log_payoff_at_exact);
    row("f_approx", sol.f_approx);
    row("growth_rate_at_f_approx", g_infinity(sol.f_approx, ret.mean(), ret.variance(), 0.0));
    row("log_payoff_full_bet", expected_log_payoff(1.0, ret, 0.0));
    row("median_wealth_full_bet_90_rounds", sim.median_wealth);
    return t;
}

}  // namespace minerkelly
