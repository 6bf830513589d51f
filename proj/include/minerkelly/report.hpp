#pragma once

// Tabular reports behind the command-line tool and the python module.
// CSV numbers use 17 significant digits so they read back bit for bit.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "minerkelly/simulator.hpp"
#include "minerkelly/types.hpp"

namespace minerkelly {

using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;
};

std::string format_number(double x);
void write_csv(std::ostream& out, const Table& table);
nlohmann::json to_json(const Table& table);  // array of row objects

// Per growth-rate player at the initial holdings:
// player_id, f_exact, f_approx, E, L, M, F, sharpe, log_payoff.
Table optimize_report(const Scenario& resolved);

// player_id, M_hat, share, in_support, dominant. Growth players without
// pinned assets take their closed-form equilibrium holdings; everyone else
// keeps their fixed mining assets and counts towards Z.
Table equilibrium_report(const Scenario& resolved);

// p, f, log_payoff for an entrant with the first growth player's cost against
// every other holding (others and Z) held fixed.
Table sweep_report(const Scenario& resolved, std::size_t grid);
SweepResult sweep_for_scenario(const Scenario& resolved, std::size_t grid);

// trajectory, player_id, stages, final_log_wealth.
Table simulate_report(const Scenario& resolved, const SimulationOptions& options);

// player_id, ks_statistic, p_value, simulated_mean, poisson_mean, rejected.
Table verify_poisson_report(const Scenario& resolved, std::size_t samples, double alpha, unsigned workers,
                            bool& any_rejected);

// Reproductions of the two worked examples: quantity, value.
Table bitcoin_example();
Table coinflip_example();

// The small-miner scenario of the bitcoin example (10 minute blocks, one
// growth miner at success probability 0.001 against 3.315e9 USD of hash,
// cost at 80 % of break-even, zero riskfree rate).
Scenario bitcoin_scenario();

}  // namespace minerkelly
