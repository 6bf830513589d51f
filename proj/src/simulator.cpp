#include "minerkelly/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "minerkelly/equilibrium.hpp"
#include "minerkelly/errors.hpp"
#include "minerkelly/kelly.hpp"

namespace minerkelly {

namespace {

bool homogeneous_prices(const Scenario& s) {
    return std::all_of(s.players.begin(), s.players.end(),
                       [&](const PlayerSpec& p) { return p.facility_price == s.players.front().facility_price; });
}

double common_price(const Scenario& s) { return homogeneous_prices(s) ? s.players.front().facility_price : 1.0; }

std::optional<double> pinned_assets(const PlayerSpec& p) {
    if (const auto* st = std::get_if<StaticStrategy>(&p.strategy)) return st->sheet.mining_assets;
    return std::get<GrowthRateStrategy>(p.strategy).mining_assets;
}

template <class Fn>
void parallel_for(std::size_t count, unsigned workers, Fn&& fn) {
    if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(count, 1)));
    if (workers <= 1) {
        for (std::size_t k = 0; k < count; ++k) fn(k);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            try {
                for (std::size_t k = next++; k < count && !failed; k = next++) fn(k);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
}

struct TrajectoryRun {
    Trajectory traj;
    std::vector<PlayerSummary> partial;
};

}  // namespace

ProcessState scenario_state(const Scenario& s, std::span<const double> holdings) {
    ProcessState st;
    st.env = s.environment;
    const std::size_t n = s.players.size();
    st.sheets.resize(n + 1);
    st.facility_prices.resize(n + 1);
    st.cost_rates.resize(n + 1);
    for (std::size_t i = 0; i < n; ++i) {
        st.sheets[i].mining_assets = holdings[i];
        st.facility_prices[i] = s.players[i].facility_price;
        st.cost_rates[i] = s.players[i].cost_rate;
    }
    st.sheets[n].mining_assets = s.exogenous_hash;
    st.facility_prices[n] = common_price(s);
    st.cost_rates[n] = 0.0;
    return st;
}

double exogenous_hash_rate(const Scenario& s) { return s.exogenous_hash / common_price(s); }

std::vector<double> initial_holdings(const Scenario& s) {
    const std::size_t n = s.players.size();
    std::vector<double> holdings(n, 0.0);
    std::vector<std::size_t> free_players;
    double fixed = s.exogenous_hash;
    for (std::size_t i = 0; i < n; ++i) {
        if (auto m = pinned_assets(s.players[i])) {
            holdings[i] = *m;
            fixed += *m;
        } else {
            free_players.push_back(i);
        }
    }
    if (free_players.empty()) return holdings;
    if (!homogeneous_prices(s))
        throw std::invalid_argument("growth-rate players without pinned mining assets need homogeneous facility prices");

    EquilibriumProblem problem;
    problem.env = s.environment;
    problem.exogenous_hash = fixed;
    for (std::size_t i : free_players) problem.growth_costs.push_back(s.players[i].cost_per_asset());
    const auto eq = equilibrium_closed_form(problem);
    for (std::size_t k = 0; k < free_players.size(); ++k) holdings[free_players[k]] = eq.holdings[k];
    return holdings;
}

Scenario with_difficulty(Scenario s) {
    const auto holdings = initial_holdings(s);
    double hash = exogenous_hash_rate(s);
    for (std::size_t i = 0; i < s.players.size(); ++i) hash += holdings[i] / s.players[i].facility_price;
    s.environment.difficulty = s.environment.block_interval * hash;
    return s;
}

std::vector<double> growth_rate_holdings(const Scenario& s, std::span<const double> previous) {
    std::vector<double> next(previous.begin(), previous.end());
    const double total = std::accumulate(previous.begin(), previous.end(), s.exogenous_hash);
    for (std::size_t i = 0; i < s.players.size(); ++i) {
        const auto& p = s.players[i];
        if (auto m = pinned_assets(p)) {
            next[i] = *m;
        } else {
            next[i] = best_response(total - previous[i], p.cost_per_asset(), s.environment);
        }
    }
    return next;
}

BalanceSheet growth_rate_decision(const Scenario& s, std::size_t i, std::span<const double> holdings) {
    const auto& p = s.players.at(i);
    if (!p.is_growth()) throw std::invalid_argument("growth_rate_decision: player is static");
    std::vector<double> h(holdings.begin(), holdings.end());
    if (auto m = pinned_assets(p)) h[i] = *m;
    if (h[i] == 0.0) return {};
    return optimal_balance_sheet(i, scenario_state(s, h)).sheet;
}

SimulationResult run_nakamoto(const Scenario& input, const SimulationOptions& opt) {
    Scenario s = input.environment.difficulty > 0.0 ? input : with_difficulty(input);
    s.check();
    const std::size_t n = s.players.size();
    const auto start = initial_holdings(s);
    for (std::size_t i = 0; i < n; ++i) {
        if (const auto* st = std::get_if<StaticStrategy>(&s.players[i].strategy)) {
            if (auto v = validate(st->sheet)) throw std::invalid_argument("player " + s.players[i].id + ": invalid sheet (" + std::string(to_string(*v)) + ")");
            if (st->sheet.mining_assets > 0.0 && !(st->sheet.equity > 0.0))
                throw std::invalid_argument("player " + s.players[i].id + ": static sheet with M > 0 needs E > 0");
        }
    }
    const ProcessState initial_state = scenario_state(s, start);
    if (!(initial_state.total_hash_rate() > 0.0))
        throw DegenerateStateError("run_nakamoto: no hash in the scenario, no reward can be drawn");

    SimulationResult result;
    result.initial_holdings = start;
    result.arrival_rate = arrival_rate(initial_state);
    result.expected_stages = s.horizon * result.arrival_rate;

    const Environment& env = s.environment;
    const double r = env.riskfree_rate;
    const double tau = env.block_interval;

    std::vector<TrajectoryRun> runs(opt.trajectories);
    parallel_for(opt.trajectories, opt.workers, [&](std::size_t k) {
        Rng rng = Rng::stream(s.seed, k);
        TrajectoryRun run;
        Trajectory& tr = run.traj;
        run.partial.resize(n);
        tr.cumulative_log_payoff.assign(n, 0.0);
        tr.total_return.assign(n, 0.0);
        tr.total_revenue.assign(n, 0.0);
        tr.ruined.assign(n, false);
        if (opt.record_paths) tr.equity.assign(n, {});

        std::vector<double> holdings = start;  // mining assets in play this stage
        std::vector<double> targets;
        std::vector<double> decided_for;  // targets the cached sheets were computed against
        std::vector<BalanceSheet> sheets(n);
        std::vector<double> cumulative;
        std::vector<double> stage_cost(n);
        double hash = 0.0;
        double t = 0.0;

        for (;;) {
            // 1. choose balance sheets
            targets = growth_rate_holdings(s, holdings);
            if (targets != decided_for) {
                for (std::size_t i = 0; i < n; ++i) {
                    if (const auto* st = std::get_if<StaticStrategy>(&s.players[i].strategy)) {
                        sheets[i] = st->sheet;
                    } else {
                        sheets[i] = growth_rate_decision(s, i, targets);
                    }
                }
                // an unprofitable leverage decision means the zero sheet, so no mining
                holdings = targets;
                for (std::size_t i = 0; i < n; ++i)
                    if (s.players[i].is_growth()) holdings[i] = sheets[i].mining_assets;
                ProcessState state = scenario_state(s, holdings);
                hash = state.total_hash_rate();
                if (hash > 0.0) {
                    const auto p = success_probabilities(state);
                    cumulative.resize(p.size());
                    std::partial_sum(p.begin(), p.end(), cumulative.begin());
                    cumulative.back() = 1.0;
                }
                for (std::size_t i = 0; i < n; ++i) stage_cost[i] = s.players[i].cost_rate * state.hash_rate(i);
                decided_for = targets;
                if (opt.record_paths && tr.stages == 0)
                    for (std::size_t i = 0; i < n; ++i) tr.equity[i].push_back(sheets[i].equity);
            }
            if (!(hash > 0.0)) break;

            // 2. wait for the trigger
            const double difficulty = opt.retarget_difficulty ? tau * hash : env.difficulty;
            t += rng.exponential(hash / difficulty);
            if (t > s.horizon) break;

            // 3. reward draw
            const std::size_t w = select_winner(cumulative, rng.uniform());
            ++tr.stages;
            if (opt.record_paths) {
                tr.stage_times.push_back(t);
                tr.winners.push_back(w < n ? w : kExogenousWinner);
            }

            // 4. interest and payoff
            for (std::size_t i = 0; i < n; ++i) {
                const BalanceSheet& sh = sheets[i];
                const double revenue = w == i ? env.block_reward : 0.0;
                const double ret = revenue - stage_cost[i];
                double payoff = std::log1p(r);
                if (sh.equity > 0.0) {
                    const double arg =
                        1.0 + (ret - r * (sh.liabilities - sh.riskfree_assets) + s.players[i].extra_revenue) / sh.equity;
                    if (arg > 0.0) {
                        payoff = std::log(arg);
                    } else {
                        payoff = -std::numeric_limits<double>::infinity();
                        tr.ruined[i] = true;
                    }
                }
                tr.total_return[i] += ret;
                tr.total_revenue[i] += revenue;
                if (!tr.ruined[i]) {
                    tr.cumulative_log_payoff[i] += payoff;
                    run.partial[i].stage_log_payoff.add(payoff);
                } else {
                    tr.cumulative_log_payoff[i] = -std::numeric_limits<double>::infinity();
                }
                run.partial[i].stage_return.add(ret);
                if (opt.record_paths)
                    tr.equity[i].push_back(tr.equity[i].front() * std::exp(tr.cumulative_log_payoff[i]));
            }
        }
        if (opt.record_paths && tr.equity.front().empty())
            for (std::size_t i = 0; i < n; ++i) tr.equity[i].push_back(sheets[i].equity);
        runs[k] = std::move(run);
    });

    // reduction in trajectory order keeps the summary independent of scheduling
    result.players.resize(n);
    result.trajectories.reserve(runs.size());
    for (auto& run : runs) {
        result.stage_count.add(static_cast<double>(run.traj.stages));
        for (std::size_t i = 0; i < n; ++i) {
            auto& agg = result.players[i];
            agg.stage_log_payoff.merge(run.partial[i].stage_log_payoff);
            agg.stage_return.merge(run.partial[i].stage_return);
            if (run.traj.ruined[i]) {
                ++agg.ruined;
            } else {
                agg.final_log_wealth.add(run.traj.cumulative_log_payoff[i]);
            }
        }
        result.trajectories.push_back(std::move(run.traj));
    }
    return result;
}

CoinflipStats run_coinflip(const TwoPointReturn& ret, double f, std::size_t rounds, std::size_t trajectories,
                           double initial_wealth, std::uint64_t seed, unsigned workers) {
    ret.check();
    if (!std::isfinite(f)) throw std::invalid_argument("run_coinflip: leverage must be finite");
    const double up = 1.0 + f * ret.up;
    const double down = 1.0 + f * ret.down;
    if (ret.prob > 0.0 && !(up > 0.0)) throw InfeasibleLeverageError("run_coinflip: infeasible leverage", "up");
    if (ret.prob < 1.0 && !(down > 0.0)) throw InfeasibleLeverageError("run_coinflip: infeasible leverage", "down");
    if (!(initial_wealth > 0.0)) throw std::invalid_argument("run_coinflip: initial wealth must be > 0");
    const double log_up = ret.prob > 0.0 ? std::log(up) : 0.0;
    const double log_down = ret.prob < 1.0 ? std::log(down) : 0.0;

    std::vector<double> final_log(trajectories);
    std::vector<std::size_t> wins(trajectories);
    parallel_for(trajectories, workers, [&](std::size_t k) {
        Rng rng = Rng::stream(seed, k);
        std::size_t w = 0;
        for (std::size_t t = 0; t < rounds; ++t)
            if (rng.uniform() < ret.prob) ++w;
        wins[k] = w;
        final_log[k] = static_cast<double>(w) * log_up + static_cast<double>(rounds - w) * log_down;
    });

    CoinflipStats out;
    out.final_wealth.resize(trajectories);
    for (std::size_t k = 0; k < trajectories; ++k) {
        out.final_wealth[k] = initial_wealth * std::exp(final_log[k]);
        out.log_wealth.add(final_log[k]);
        // per-round growth pooled: wins[k] copies of log_up and the rest log_down
        for (std::size_t t = 0; t < rounds; ++t) out.log_growth.add(t < wins[k] ? log_up : log_down);
    }
    if (trajectories > 0) out.median_wealth = stats::median(out.final_wealth);
    return out;
}

std::vector<double> uniform_p_grid(std::size_t n) {
    if (n < 2) throw std::invalid_argument("uniform_p_grid: need at least 2 intervals");
    std::vector<double> grid;
    grid.reserve(n - 1);
    for (std::size_t k = 1; k < n; ++k) grid.push_back(static_cast<double>(k) / static_cast<double>(n));
    return grid;
}

SweepResult sweep_f_vs_p(double m_minus, double c, const Environment& env, std::span<const double> grid) {
    if (!(m_minus > 0.0)) throw std::invalid_argument("sweep_f_vs_p: others' mining assets must be > 0");
    SweepResult res;
    res.points.reserve(grid.size());
    double best = -std::numeric_limits<double>::infinity();
    bool seen_profitable = false;
    for (double p : grid) {
        if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("sweep_f_vs_p: grid values must lie in (0, 1)");
        const double m = p / (1.0 - p) * m_minus;
        SweepPoint pt{p, 0.0, std::log1p(env.riskfree_rate)};
        try {
            const auto lev = f_max_exact(m, m_minus, env.block_reward, c, env.riskfree_rate);
            pt.leverage = lev.value;
            if (lev.value > 0.0)
                pt.log_payoff = expected_log_payoff(lev.value, mining_return(m, m_minus, c, env.block_reward),
                                                    env.riskfree_rate);
        } catch (const SingularConfigurationError&) {
            // u = r exactly: no excess return, stays at the riskfree payoff
        }
        if (pt.leverage > 0.0) {
            seen_profitable = true;
        } else if (seen_profitable && !res.has_zero_crossing) {
            res.has_zero_crossing = true;
            res.zero_crossing_p = p;
        }
        if (pt.log_payoff > best) {
            best = pt.log_payoff;
            res.argmax_p = p;
        }
        res.points.push_back(pt);
    }
    return res;
}

std::vector<PoissonCheck> verify_poisson(const Scenario& input, std::size_t samples, unsigned workers) {
    const Scenario s = input.environment.difficulty > 0.0 ? input : with_difficulty(input);
    SimulationOptions opt;
    opt.trajectories = samples;
    opt.workers = workers;
    const auto sim = run_nakamoto(s, opt);

    std::vector<PoissonCheck> out;
    const double b = s.environment.block_reward;
    for (std::size_t i = 0; i < s.players.size(); ++i) {
        const double rate = sim.initial_holdings[i] / (s.environment.difficulty * s.players[i].facility_price);
        const double mean = rate * s.horizon;
        std::vector<double> simulated(samples), direct(samples);
        for (std::size_t k = 0; k < samples; ++k) simulated[k] = sim.trajectories[k].total_revenue[i];
        parallel_for(samples, workers, [&](std::size_t k) {
            Rng rng = Rng::stream(s.seed ^ 0x706f6973736f6eULL, k * s.players.size() + i);
            direct[k] = b * static_cast<double>(rng.poisson(mean));
        });
        PoissonCheck chk;
        chk.player_id = s.players[i].id;
        chk.ks = stats::ks_two_sample(simulated, direct);
        chk.simulated_mean = std::accumulate(simulated.begin(), simulated.end(), 0.0) / static_cast<double>(samples);
        chk.poisson_mean = b * mean;
        out.push_back(chk);
    }
    return out;
}

}  // namespace minerkelly
