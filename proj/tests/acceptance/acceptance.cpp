// Acceptance suite: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "generators.hpp"
#include "minerkelly/equilibrium.hpp"
#include "minerkelly/errors.hpp"
#include "minerkelly/kelly.hpp"
#include "minerkelly/pools.hpp"
#include "minerkelly/report.hpp"
#include "minerkelly/reward_process.hpp"
#include "minerkelly/scenario_io.hpp"
#include "minerkelly/simulator.hpp"

using namespace minerkelly;
using testing_support::close_rel;
using testing_support::Gen;

namespace {

struct Outcome {
    bool pass = true;
    std::ostringstream detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail << " [failed: " << what << "]";
        }
    }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

Outcome coinflip_optimum() {
    Outcome o;
    const TwoPointReturn w{0.23, -0.20, 0.5};
    const auto t0 = Clock::now();
    const double f = f_max_exact(w, 0.0).value;
    const double g = expected_log_payoff(f, w, 0.0);
    const double secs = seconds_since(t0);
    o.detail << "f=" << f << " E[log]=" << g << " time=" << secs * 1e3 << "ms";
    o.require(std::abs(f - 0.32609) <= 1e-4, "f within 1e-4 of 0.32609");
    o.require(std::abs(g - 0.002439) <= 1e-5, "payoff within 1e-5 of 0.002439");
    o.require(secs < 1e-3, "runtime < 1 ms");
    return o;
}

Outcome all_in_ruin() {
    Outcome o;
    const auto t0 = Clock::now();
    const auto sim = run_coinflip(TwoPointReturn{0.23, -0.20, 0.5}, 1.0, 90, 100000, 1000.0, 20200101);
    const double secs = seconds_since(t0);
    o.detail << "median=" << sim.median_wealth << " time=" << secs << "s";
    o.require(sim.median_wealth >= 400.0 && sim.median_wealth <= 570.0, "median in [400, 570]");
    o.require(secs < 5.0, "runtime < 5 s");
    return o;
}

Outcome bitcoin_example_check() {
    Outcome o;
    const Scenario s = bitcoin_scenario();
    const auto& env = s.environment;
    const double m = *std::get<GrowthRateStrategy>(s.players[0].strategy).mining_assets;
    const double c = s.players[0].cost_per_asset();
    const auto ret = mining_return(m, s.exogenous_hash, c, env.block_reward);
    const auto approx = f_star_approx(ret.mean(), ret.variance(), env.riskfree_rate);
    const double g = g_infinity(approx.simple, ret.mean(), ret.variance(), env.riskfree_rate);
    const double per_year = kSecondsPerYear / env.block_interval;
    const double annual = std::expm1(per_year * g);
    const auto exact = optimal_balance_sheet_for_M(m, s.exogenous_hash, c, env);
    const double g_exact = exact.leverage.expected_log_payoff_at_exact;
    o.detail << "f*=" << approx.simple << " g=" << g << " annualized=" << annual * 100 << "%"
             << " | exact: f=" << exact.leverage.f_exact << " E[log]=" << g_exact
             << " annualized=" << std::expm1(per_year * g_exact) * 100 << "% E=" << exact.sheet.equity
             << " L=" << exact.sheet.liabilities;
    o.require(approx.simple >= 5.0 && approx.simple <= 6.0, "f* in [5, 6]");
    o.require(g >= 1.5e-5 && g <= 2.5e-5, "per-stage log payoff in [1.5e-5, 2.5e-5]");
    o.require(annual >= 1.2 && annual <= 2.2, "annualized return in [120%, 220%]");
    o.require(std::isfinite(exact.leverage.f_exact) && exact.leverage.f_exact > 0.0, "exact recomputation emitted");
    return o;
}

Outcome poisson_equivalence() {
    Outcome o;
    const auto t0 = Clock::now();
    Scenario s = load_scenario(MINERKELLY_SCENARIO_DIR "/poisson_check.json");
    s = resolve_scenario(s);
    const auto holdings = initial_holdings(s);
    const auto st = scenario_state(s, holdings);
    double worst = 0.0;
    for (int k = 0; k < 20; ++k) {
        const double u = -0.5 + k * (1.0 / 19.0);
        for (std::size_t i = 0; i < s.players.size(); ++i) {
            const double a = mgf_compound(u, i, st, s.horizon);
            const double b = mgf_poisson_reward(u, i, st, s.horizon);
            worst = std::max(worst, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
        }
    }
    const auto checks = verify_poisson(s, 100000);
    double min_p = 1.0;
    for (const auto& c : checks) min_p = std::min(min_p, c.ks.p_value);
    const double secs = seconds_since(t0);
    o.detail << "max rel MGF gap=" << worst << " min KS p=" << min_p << " time=" << secs << "s";
    o.require(worst <= 1e-12, "MGFs agree to 1e-12");
    o.require(min_p >= 0.01, "KS not rejected at 0.01");
    o.require(secs < 30.0, "runtime < 30 s");
    return o;
}

Outcome reward_moments() {
    Outcome o;
    const auto t0 = Clock::now();
    Gen g(505);
    int checks = 0, misses = 0;
    double worst_z = 0.0;
    for (int k = 0; k < 20; ++k) {
        Scenario s;
        s.environment = Environment{g.log_uniform(1.0, 100.0), 600.0, 0.0, 0.0};
        s.horizon = 600.0 * 1000.0;
        s.seed = g.engine()();
        s.exogenous_hash = g.coin() ? 0.0 : g.log_uniform(1.0, 100.0);
        const int n = g.integer(1, 5);
        for (int i = 0; i < n; ++i) {
            PlayerSpec p;
            p.id = "p" + std::to_string(i);
            p.cost_rate = g.log_uniform(1e-4, 1e-2);
            p.strategy = StaticStrategy{make_balance_sheet(g.log_uniform(1.0, 100.0), 1.0)};
            s.players.push_back(p);
        }
        SimulationOptions opt;
        opt.trajectories = 1000;  // about 1e6 stages
        const auto res = run_nakamoto(s, opt);
        const auto st = scenario_state(s, initial_holdings(s));
        const auto moments_ok = [&](double est, double truth, double se) {
            const double z = std::abs(est - truth) / se;
            worst_z = std::max(worst_z, z);
            ++checks;
            if (!(z < 4.0)) ++misses;
        };
        for (int i = 0; i < n; ++i) {
            const auto& m = res.players[i].stage_return;
            moments_ok(m.mean(), expected_return(i, st), m.standard_error());
            moments_ok(m.variance(), return_variance(i, st), m.variance_standard_error());
        }
    }
    const double secs = seconds_since(t0);
    o.detail << checks << " moment checks, worst |z|=" << worst_z << " time=" << secs << "s";
    o.require(misses == 0, "all within 4 SE");
    o.require(secs < 60.0, "runtime < 60 s");
    return o;
}

Outcome equilibrium_oracle() {
    Outcome o;
    const auto t0 = Clock::now();
    Gen g(606);
    double worst = 0.0;
    int support_mismatch = 0;
    for (int k = 0; k < 1000; ++k) {
        EquilibriumProblem p;
        p.env = Environment{g.log_uniform(1.0, 1e5), 600.0, g.coin(0.3) ? 0.0 : g.log_uniform(1e-8, 1e-3), 0.0};
        const int m = g.integer(1, 20);
        double y_max = 0.0;
        for (int i = 0; i < m; ++i) {
            p.growth_costs.push_back(g.log_uniform(1e-4, 1e-1));
            y_max = std::max(y_max, riskfree_break_even(p.growth_costs.back(), p.env));
        }
        p.exogenous_hash = g.uniform(0.0, y_max);
        const auto a = equilibrium_closed_form(p);
        const auto b = equilibrium_fixed_point(p);
        if (a.in_support != b.in_support) ++support_mismatch;
        for (int i = 0; i < m; ++i) {
            const double scale = std::max(std::abs(a.holdings[i]), std::abs(b.holdings[i]));
            if (scale > 0.0) worst = std::max(worst, std::abs(a.holdings[i] - b.holdings[i]) / scale);
        }
    }
    const double secs = seconds_since(t0);
    o.detail << "max rel holdings gap=" << worst << " support mismatches=" << support_mismatch << " time=" << secs << "s";
    o.require(worst <= 1e-8, "holdings agree to 1e-8");
    o.require(support_mismatch == 0, "supports identical");
    o.require(secs < 10.0, "runtime < 10 s");
    return o;
}

Outcome share_predictions() {
    Outcome o;
    const Environment env{1.0, 600.0, 0.0, 0.0};
    // homogeneous: m = 11, Z = 0.025 Y' gives H = 0.85 Y'; m = 6, Z = 0.2 Y' gives 0.80 Y'
    const auto at85 = equilibrium_closed_form(EquilibriumProblem{std::vector<double>(11, 1.0), 0.025, env});
    const auto at80 = equilibrium_closed_form(EquilibriumProblem{std::vector<double>(6, 1.0), 0.2, env});
    const double s85 = share_and_dominance(at85, std::vector<double>(11, 1.0), env).shares[0];
    const double s80 = share_and_dominance(at80, std::vector<double>(6, 1.0), env).shares[0];
    // efficient player, Y' = 1.7 against five with Y' = 1, Z = 0.05 gives H = 0.85
    std::vector<double> costs(6, 1.0);
    costs[0] = 1.0 / 1.7;
    const auto dom = equilibrium_closed_form(EquilibriumProblem{costs, 0.05, env});
    const auto rep = share_and_dominance(dom, costs, env);
    o.detail << "share@0.85=" << s85 * 100 << "% share@0.80=" << s80 * 100 << "% efficient share=" << rep.shares[0] * 100
             << "% H=" << dom.world_hash << " dominant=" << (rep.dominant[0] ? "yes" : "no");
    o.require(std::abs(s85 - 0.5 * (1.0 / 0.85 - 1.0)) <= 1e-10, "8.82% share");
    o.require(std::abs(s80 - 0.125) <= 1e-10, "12.5% share");
    o.require(std::abs(at85.shares[0] - s85) <= 1e-10 && std::abs(at80.shares[0] - s80) <= 1e-10,
              "realized shares equal the formula");
    o.require(std::abs(rep.shares[0] - 0.5) <= 1e-10, "efficient share 50%");
    o.require(rep.dominant[0] && rep.any_dominant, "dominance flagged");
    return o;
}

Outcome sweep_zero_crossing() {
    Outcome o;
    const auto res = sweep_for_scenario(bitcoin_scenario(), 1000);
    o.detail << "zero crossing p=" << res.zero_crossing_p << " argmax p=" << res.argmax_p;
    o.require(res.has_zero_crossing && std::abs(res.zero_crossing_p - 0.2) <= 1e-3 + 1e-12, "crossing at 0.200 +- 1e-3");
    o.require(std::abs(res.argmax_p - 0.07) <= 0.03, "maximum at 0.07 +- 0.03");
    return o;
}

Outcome property_suites() {
    Outcome o;
    Gen g(909);
    int failures = 0;
    auto tally = [&](bool ok, const char* what) {
        if (!ok) {
            ++failures;
            o.require(false, what);
        }
    };

    // balance-sheet invariants
    bool sheets_ok = true;
    for (int k = 0; k < 10000; ++k) {
        const double m = g.log_uniform(1e-6, 1e12), f = g.log_uniform(1e-6, 1e6);
        const auto s = make_balance_sheet(m, f);
        sheets_ok = sheets_ok && !validate(s) && close_rel(s.mining_assets / s.equity, f, 1e-12);
    }
    tally(sheets_ok, "balance-sheet invariants");

    // concavity of the expected log payoff and grid-oracle agreement for f_max
    bool concave = true, grid_ok = true;
    for (int k = 0; k < 100; ++k) {
        double r = g.coin(0.3) ? 0.0 : g.uniform(0.0, 0.02);
        TwoPointReturn w{};
        do {
            w = TwoPointReturn{g.uniform(0.02, 1.0), g.uniform(-0.5, -0.05), g.uniform(0.05, 0.95)};
        } while (!(w.mean() > r + 1e-4));
        const double ub = feasible_leverage_bound(w, r).upper;
        auto payoff = [&](double f) { return expected_log_payoff(f, w, r); };
        for (int j = 0; j < 10; ++j) {
            const double f = g.uniform(0.0, 0.95 * ub);
            concave = concave && testing_support::second_derivative(payoff, f, 1e-4 * ub) < 0.0;
        }
        const double f_star = f_max_exact(w, r).value;
        const auto [f_grid, y_grid] = testing_support::grid_argmax(payoff, 0.0, ub * (1 - 1e-9), 1e-5);
        grid_ok = grid_ok && std::abs(f_star - f_grid) <= 1e-5 && payoff(f_star) >= y_grid - 1e-12;
    }
    tally(concave, "concavity");
    tally(grid_ok, "f_max grid oracle");

    // best response against a grid of step Y' / 1e5
    bool br_ok = true;
    for (int k = 0; k < 100; ++k) {
        const Environment env{g.log_uniform(1.0, 1e4), 600.0, g.coin() ? 0.0 : g.log_uniform(1e-6, 1e-2), 0.0};
        const double c = g.log_uniform(1e-4, 1e-1);
        const double y = riskfree_break_even(c, env);
        const double m_minus = g.uniform(1e-3, 1.2) * y;
        const double step = y / 1e5;
        double best_m = 0.0, best_s = 0.0;
        for (long j = 1; j <= 100000; ++j) {
            const double s = sharpe_ratio(static_cast<double>(j) * step, m_minus, c, env);
            if (s > best_s) {
                best_s = s;
                best_m = static_cast<double>(j) * step;
            }
        }
        br_ok = br_ok && std::abs(best_response(m_minus, c, env) - best_m) <= step;
    }
    tally(br_ok, "best-response grid oracle");

    // pool associativity
    bool assoc = true;
    for (int k = 0; k < 1000; ++k) {
        const int n = g.integer(2, 10);
        std::vector<PoolMember> members;
        for (int j = 0; j < n; ++j) members.push_back({"m", g.log_uniform(1e-3, 1e6), g.log_uniform(1e-6, 1e-1)});
        const std::span<const PoolMember> all(members);
        const int split = g.integer(1, n - 1);
        const auto merged = merge_pools(aggregate_risk_sharing(all.subspan(0, split)), aggregate_risk_sharing(all.subspan(split)));
        const auto direct = aggregate_risk_sharing(all);
        assoc = assoc && merged.aggregate_mining_assets == direct.aggregate_mining_assets &&
                merged.aggregate_cost_rate == direct.aggregate_cost_rate;
    }
    tally(assoc, "pool associativity");

    // simulator determinism under varying worker counts
    Scenario s = resolve_scenario(load_scenario(MINERKELLY_SCENARIO_DIR "/pools.json"));
    SimulationOptions opt;
    opt.trajectories = 96;
    opt.record_paths = true;
    opt.workers = 1;
    const auto one = run_nakamoto(s, opt);
    bool det = true;
    for (unsigned w : {2u, 4u, 7u}) {
        opt.workers = w;
        const auto many = run_nakamoto(s, opt);
        for (std::size_t t = 0; t < one.trajectories.size(); ++t) {
            det = det && one.trajectories[t].winners == many.trajectories[t].winners &&
                  one.trajectories[t].cumulative_log_payoff == many.trajectories[t].cumulative_log_payoff;
        }
    }
    tally(det, "simulator determinism");

    o.detail << (failures == 0 ? "all six property suites hold" : "some property suites failed");
    return o;
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria{
        {"1 coin-flip optimum", coinflip_optimum},
        {"2 all-in ruin median", all_in_ruin},
        {"3 bitcoin example", bitcoin_example_check},
        {"4 compound/Poisson equivalence", poisson_equivalence},
        {"5 reward moments", reward_moments},
        {"6 equilibrium oracle", equilibrium_oracle},
        {"7 share predictions", share_predictions},
        {"8 sweep zero crossing", sweep_zero_crossing},
        {"9 property suites", property_suites},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail << "exception: " << e.what();
        }
        std::printf("%s  %-32s %s\n", o.pass ? "PASS" : "FAIL", c.name, o.detail.str().c_str());
        std::fflush(stdout);
        if (!o.pass) ++failed;
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed;
}
