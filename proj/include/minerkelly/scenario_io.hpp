#pragma once

// Scenario files (JSON).
//
//   {
//     "environment": {"block_reward": 118750, "block_interval": 600, "riskfree_rate": 0.02},
//     "players": [
//       {"id": "a", "facility_price": 1, "cost_rate": 1e-5, "strategy": "growth_rate"},
//       {"id": "b", "cost_rate": 1e-5, "strategy": "static",
//        "balance_sheet": {"equity": 10, "liabilities": 0, "mining_assets": 10, "riskfree_assets": 0}}
//     ],
//     "exogenous_hash": 0, "horizon": 86400, "seed": 1,
//     "pools": [
//       {"type": "risk_sharing", "id": "p", "members": ["a", "b"], "strategy": "static"},
//       {"type": "risk_free", "id": "q", "target_p": 0.01, "offered_cost_rate": 1e-5}
//     ]
//   }
//
// riskfree_rate is annual and converted to the block interval linearly,
// r_tau = r * tau / year with year = 365.25 days; block_interval and horizon
// are in seconds. cost_rate is per unit hash rate per block interval.
// A growth-rate player may carry a balance_sheet whose mining_assets pins its
// hash; the rest of that sheet is ignored. facility_price defaults to 1.

#include <filesystem>
#include <string>

#include <json.hpp>

#include "minerkelly/errors.hpp"
#include "minerkelly/types.hpp"

namespace minerkelly {

inline constexpr double kSecondsPerYear = 365.25 * 86400.0;

double per_interval_rate(double annual_rate, double block_interval) noexcept;

// Strict parse: unknown keys and wrong types raise ScenarioError with the
// JSON path of the offending field. Pools are kept unresolved.
Scenario parse_scenario(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

// Replaces risk-sharing pool members with one aggregate player and appends
// risk-free-reward pools as static players (sheet from the pool
// construction, extra revenue r L). Sets the difficulty. The result has no
// pools left.
Scenario resolve_scenario(Scenario scenario);

nlohmann::json to_json(const Scenario& scenario);

}  // namespace minerkelly
