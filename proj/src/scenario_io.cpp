#include "minerkelly/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>

#include "minerkelly/pools.hpp"
#include "minerkelly/simulator.hpp"

namespace minerkelly {

using nlohmann::json;

namespace {

// Object reader that remembers which keys were consumed.
class Fields {
public:
    Fields(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ScenarioError(path_, "expected an object");
    }

    std::string at(const std::string& key) const { return path_ + "." + key; }

    bool has(const std::string& key) const { return j_.contains(key); }

    const json& get(const std::string& key) {
        if (!j_.contains(key)) throw ScenarioError(at(key), "missing required field");
        seen_.insert(key);
        return j_.at(key);
    }

    double number(const std::string& key) {
        const json& v = get(key);
        if (!v.is_number()) throw ScenarioError(at(key), "expected a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ScenarioError(at(key), "must be finite");
        return x;
    }

    double number_or(const std::string& key, double fallback) { return has(key) ? number(key) : fallback; }

    std::string string(const std::string& key) {
        const json& v = get(key);
        if (!v.is_string()) throw ScenarioError(at(key), "expected a string");
        return v.get<std::string>();
    }

    void finish() const {
        for (const auto& item : j_.items())
            if (!seen_.count(item.key())) throw ScenarioError(at(item.key()), "unknown key");
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

Environment parse_environment(const json& j, const std::string& path) {
    Fields f(j, path);
    Environment env;
    env.block_reward = f.number("block_reward");
    env.block_interval = f.number("block_interval");
    const double annual = f.number("riskfree_rate");
    f.finish();
    if (!(env.block_reward > 0.0)) throw ScenarioError(f.at("block_reward"), "must be > 0");
    if (!(env.block_interval > 0.0)) throw ScenarioError(f.at("block_interval"), "must be > 0");
    if (!(annual >= 0.0)) throw ScenarioError(f.at("riskfree_rate"), "must be >= 0");
    env.riskfree_rate = per_interval_rate(annual, env.block_interval);
    return env;
}

BalanceSheet parse_sheet(const json& j, const std::string& path) {
    Fields f(j, path);
    BalanceSheet s;
    s.equity = f.number("equity");
    s.liabilities = f.number("liabilities");
    s.mining_assets = f.number("mining_assets");
    s.riskfree_assets = f.number("riskfree_assets");
    f.finish();
    if (auto v = validate(s)) throw ScenarioError(path, "invalid balance sheet (" + std::string(to_string(*v)) + ")");
    return s;
}

PlayerSpec parse_player(const json& j, const std::string& path) {
    Fields f(j, path);
    PlayerSpec p;
    p.id = f.string("id");
    p.facility_price = f.number_or("facility_price", 1.0);
    p.cost_rate = f.number("cost_rate");
    const std::string strategy = f.string("strategy");
    std::optional<BalanceSheet> sheet;
    if (f.has("balance_sheet")) sheet = parse_sheet(f.get("balance_sheet"), f.at("balance_sheet"));
    f.finish();
    if (p.id.empty()) throw ScenarioError(f.at("id"), "must not be empty");
    if (!(p.facility_price > 0.0)) throw ScenarioError(f.at("facility_price"), "must be > 0");
    if (!(p.cost_rate >= 0.0)) throw ScenarioError(f.at("cost_rate"), "must be >= 0");
    if (strategy == "static") {
        if (!sheet) throw ScenarioError(f.at("balance_sheet"), "required for a static player");
        if (sheet->mining_assets > 0.0 && !(sheet->equity > 0.0))
            throw ScenarioError(f.at("balance_sheet"), "mining without equity");
        p.strategy = StaticStrategy{*sheet};
    } else if (strategy == "growth_rate") {
        GrowthRateStrategy g;
        if (sheet) g.mining_assets = sheet->mining_assets;
        p.strategy = g;
    } else {
        throw ScenarioError(f.at("strategy"), "expected \"static\" or \"growth_rate\"");
    }
    return p;
}

PoolSpec parse_pool(const json& j, const std::string& path) {
    Fields f(j, path);
    const std::string type = f.string("type");
    if (type == "risk_sharing") {
        RiskSharingPoolSpec p;
        p.id = f.string("id");
        const json& members = f.get("members");
        if (!members.is_array() || members.empty()) throw ScenarioError(f.at("members"), "expected a non-empty array");
        for (std::size_t k = 0; k < members.size(); ++k) {
            if (!members[k].is_string())
                throw ScenarioError(f.at("members") + "[" + std::to_string(k) + "]", "expected a player id");
            p.members.push_back(members[k].get<std::string>());
        }
        const std::string strategy = f.has("strategy") ? f.string("strategy") : "static";
        if (strategy != "static" && strategy != "growth_rate")
            throw ScenarioError(f.at("strategy"), "expected \"static\" or \"growth_rate\"");
        p.growth_rate = strategy == "growth_rate";
        f.finish();
        return p;
    }
    if (type == "risk_free") {
        RiskFreePoolSpec p;
        p.id = f.string("id");
        p.target_p = f.number("target_p");
        p.offered_cost_rate = f.number_or("offered_cost_rate", 0.0);
        if (f.has("supply")) {
            Fields s(f.get("supply"), f.at("supply"));
            HashSupplyCurve curve;
            curve.scale = s.number("scale");
            curve.reference_rate = s.number("reference_rate");
            curve.elasticity = s.number("elasticity");
            s.finish();
            if (!(curve.scale > 0.0)) throw ScenarioError(s.at("scale"), "must be > 0");
            if (!(curve.reference_rate > 0.0)) throw ScenarioError(s.at("reference_rate"), "must be > 0");
            if (curve.elasticity == 0.0) throw ScenarioError(s.at("elasticity"), "must be nonzero");
            p.supply = curve;
        }
        f.finish();
        if (!(p.target_p > 0.0 && p.target_p < 1.0)) throw ScenarioError(f.at("target_p"), "must be in (0, 1)");
        if (p.offered_cost_rate < 0.0) throw ScenarioError(f.at("offered_cost_rate"), "must be > 0");
        if (p.offered_cost_rate == 0.0 && !p.supply)
            throw ScenarioError(f.at("offered_cost_rate"), "must be > 0 (or give a supply curve)");
        return p;
    }
    throw ScenarioError(f.at("type"), "expected \"risk_sharing\" or \"risk_free\"");
}

std::optional<double> known_mining_assets(const PlayerSpec& p) {
    if (const auto* st = std::get_if<StaticStrategy>(&p.strategy)) return st->sheet.mining_assets;
    return std::get<GrowthRateStrategy>(p.strategy).mining_assets;
}

// Sum of sheets with liabilities netted against riskfree assets.
BalanceSheet combine_sheets(const std::vector<BalanceSheet>& sheets) {
    BalanceSheet out;
    double net = 0.0;
    for (const auto& s : sheets) {
        out.equity += s.equity;
        out.mining_assets += s.mining_assets;
        net += s.riskfree_assets - s.liabilities;
    }
    if (net >= 0.0) {
        out.riskfree_assets = net;
    } else {
        out.liabilities = -net;
    }
    return out;
}

}  // namespace

double per_interval_rate(double annual_rate, double block_interval) noexcept {
    return annual_rate * block_interval / kSecondsPerYear;
}

Scenario parse_scenario(const json& doc) {
    Fields f(doc, "$");
    Scenario s;
    s.environment = parse_environment(f.get("environment"), f.at("environment"));

    const json& players = f.get("players");
    if (!players.is_array()) throw ScenarioError(f.at("players"), "expected an array");
    if (players.empty()) throw ScenarioError(f.at("players"), "at least one player required");
    std::set<std::string> ids;
    for (std::size_t k = 0; k < players.size(); ++k) {
        const std::string path = f.at("players") + "[" + std::to_string(k) + "]";
        s.players.push_back(parse_player(players[k], path));
        if (!ids.insert(s.players.back().id).second) throw ScenarioError(path + ".id", "duplicate player id");
    }

    s.exogenous_hash = f.number_or("exogenous_hash", 0.0);
    if (!(s.exogenous_hash >= 0.0)) throw ScenarioError(f.at("exogenous_hash"), "must be >= 0");
    s.horizon = f.number("horizon");
    if (!(s.horizon > 0.0)) throw ScenarioError(f.at("horizon"), "must be > 0");
    const json& seed = f.get("seed");
    if (!seed.is_number_unsigned()) throw ScenarioError(f.at("seed"), "expected an unsigned 64-bit integer");
    s.seed = seed.get<std::uint64_t>();

    if (f.has("pools")) {
        const json& pools = f.get("pools");
        if (!pools.is_array()) throw ScenarioError(f.at("pools"), "expected an array");
        for (std::size_t k = 0; k < pools.size(); ++k) {
            const std::string path = f.at("pools") + "[" + std::to_string(k) + "]";
            s.pools.push_back(parse_pool(pools[k], path));
            const std::string& id =
                std::visit([](const auto& p) -> const std::string& { return p.id; }, s.pools.back());
            if (!ids.insert(id).second) throw ScenarioError(path + ".id", "id already used");
        }
    }
    f.finish();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ScenarioError(path.string(), "cannot open file");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ScenarioError(path.string(), std::string("invalid JSON: ") + e.what());
    }
    return parse_scenario(doc);
}

Scenario resolve_scenario(Scenario s) {
    std::set<std::string> pooled;
    for (std::size_t k = 0; k < s.pools.size(); ++k) {
        const auto* spec = std::get_if<RiskSharingPoolSpec>(&s.pools[k]);
        if (!spec) continue;
        const std::string path = "$.pools[" + std::to_string(k) + "]";
        std::vector<PoolMember> members;
        std::vector<BalanceSheet> sheets;
        std::size_t first = s.players.size();
        double price = 0.0;
        for (const auto& id : spec->members) {
            auto it = std::find_if(s.players.begin(), s.players.end(), [&](const PlayerSpec& p) { return p.id == id; });
            if (it == s.players.end()) throw ScenarioError(path + ".members", "unknown player " + id);
            if (!pooled.insert(id).second) throw ScenarioError(path + ".members", "player " + id + " pooled twice");
            const auto m = known_mining_assets(*it);
            if (!m || !(*m > 0.0))
                throw ScenarioError(path + ".members", "player " + id + " needs mining assets to join a pool");
            if (price == 0.0) price = it->facility_price;
            if (it->facility_price != price)
                throw ScenarioError(path + ".members", "members must share one facility price");
            members.push_back({id, *m, it->cost_rate});
            if (const auto* st = std::get_if<StaticStrategy>(&it->strategy)) {
                sheets.push_back(st->sheet);
            } else {
                sheets.push_back(make_balance_sheet(*m, 1.0));
            }
            first = std::min(first, static_cast<std::size_t>(it - s.players.begin()));
        }
        const auto pool = aggregate_risk_sharing(members);
        PlayerSpec player;
        player.id = spec->id;
        player.facility_price = price;
        player.cost_rate = pool.aggregate_cost_rate;
        if (spec->growth_rate) {
            player.strategy = GrowthRateStrategy{pool.aggregate_mining_assets};
        } else {
            player.strategy = StaticStrategy{combine_sheets(sheets)};
        }
        std::vector<PlayerSpec> rest;
        for (std::size_t i = 0; i < s.players.size(); ++i) {
            if (i == first) rest.push_back(player);
            if (!std::count(spec->members.begin(), spec->members.end(), s.players[i].id)) rest.push_back(s.players[i]);
        }
        s.players = std::move(rest);
    }

    for (std::size_t k = 0; k < s.pools.size(); ++k) {
        const auto* spec = std::get_if<RiskFreePoolSpec>(&s.pools[k]);
        if (!spec) continue;
        const std::string path = "$.pools[" + std::to_string(k) + "]";
        const auto holdings = initial_holdings(s);
        const double others = std::accumulate(holdings.begin(), holdings.end(), s.exogenous_hash);
        if (!(others > 0.0)) throw ScenarioError(path, "risk-free pool needs other mining assets");
        const double price = s.players.empty() ? 1.0 : s.players.front().facility_price;
        double rate = spec->offered_cost_rate;
        if (rate == 0.0) rate = spec->supply->rate_for(spec->target_p / (1.0 - spec->target_p) * others);
        const auto pool = build_risk_free_pool(spec->target_p, others, rate / price, s.environment);
        PlayerSpec player;
        player.id = spec->id;
        player.facility_price = price;
        player.cost_rate = rate;
        player.strategy = StaticStrategy{pool.sheet};
        player.extra_revenue = pool.extra_revenue;
        s.players.push_back(player);
    }
    s.pools.clear();
    if (s.players.empty()) throw ScenarioError("$.players", "no players left after pooling");
    if (s.environment.difficulty == 0.0) s = with_difficulty(std::move(s));
    return s;
}

json to_json(const Scenario& s) {
    json doc;
    doc["environment"] = {
        {"block_reward", s.environment.block_reward},
        {"block_interval", s.environment.block_interval},
        {"riskfree_rate", s.environment.riskfree_rate * kSecondsPerYear / s.environment.block_interval},
    };
    json players = json::array();
    for (const auto& p : s.players) {
        json pj = {{"id", p.id}, {"facility_price", p.facility_price}, {"cost_rate", p.cost_rate}};
        if (const auto* st = std::get_if<StaticStrategy>(&p.strategy)) {
            pj["strategy"] = "static";
            pj["balance_sheet"] = {{"equity", st->sheet.equity},
                                   {"liabilities", st->sheet.liabilities},
                                   {"mining_assets", st->sheet.mining_assets},
                                   {"riskfree_assets", st->sheet.riskfree_assets}};
        } else {
            pj["strategy"] = "growth_rate";
            if (auto m = std::get<GrowthRateStrategy>(p.strategy).mining_assets)
                pj["balance_sheet"] = {{"equity", *m}, {"liabilities", 0.0}, {"mining_assets", *m}, {"riskfree_assets", 0.0}};
        }
        players.push_back(pj);
    }
    doc["players"] = players;
    doc["exogenous_hash"] = s.exogenous_hash;
    doc["horizon"] = s.horizon;
    doc["seed"] = s.seed;
    if (!s.pools.empty()) {
        json pools = json::array();
        for (const auto& pool : s.pools) {
            if (const auto* rs = std::get_if<RiskSharingPoolSpec>(&pool)) {
                pools.push_back({{"type", "risk_sharing"},
                                 {"id", rs->id},
                                 {"members", rs->members},
                                 {"strategy", rs->growth_rate ? "growth_rate" : "static"}});
            } else {
                const auto& rf = std::get<RiskFreePoolSpec>(pool);
                json pj = {{"type", "risk_free"}, {"id", rf.id}, {"target_p", rf.target_p}};
                if (rf.offered_cost_rate > 0.0) pj["offered_cost_rate"] = rf.offered_cost_rate;
                if (rf.supply)
                    pj["supply"] = {{"scale", rf.supply->scale},
                                    {"reference_rate", rf.supply->reference_rate},
                                    {"elasticity", rf.supply->elasticity}};
                pools.push_back(pj);
            }
        }
        doc["pools"] = pools;
    }
    return doc;
}

}  // namespace minerkelly
