#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "generators.hpp"
#include "minerkelly/equilibrium.hpp"
#include "minerkelly/errors.hpp"
#include "minerkelly/pools.hpp"
#include "minerkelly/report.hpp"
#include "minerkelly/stats.hpp"

using namespace minerkelly;
using testing_support::Gen;

namespace {

std::vector<PoolMember> random_members(Gen& g, int n) {
    std::vector<PoolMember> out;
    for (int k = 0; k < n; ++k)
        out.push_back({"m" + std::to_string(k), g.log_uniform(1e-3, 1e6), g.log_uniform(1e-6, 1e-1)});
    return out;
}

}  // namespace

TEST_CASE("risk-sharing aggregate: total assets and asset-weighted cost") {
    const std::vector<PoolMember> members{{"a", 1.0, 0.1}, {"b", 3.0, 0.2}};
    const auto pool = aggregate_risk_sharing(members);
    CHECK(pool.aggregate_mining_assets == 4.0);
    CHECK(pool.aggregate_cost_rate == doctest::Approx(0.175));
    const auto div = pool.dividend_fractions();
    CHECK(div[0] == doctest::Approx(0.25));
    CHECK(div[1] == doctest::Approx(0.75));
    CHECK_THROWS_AS(aggregate_risk_sharing({}), std::invalid_argument);
    const std::vector<PoolMember> bad{{"z", 0.0, 0.1}};
    CHECK_THROWS_AS(aggregate_risk_sharing(bad), std::invalid_argument);
}

TEST_CASE("property: pooling is associative bit for bit") {
    Gen g(41);
    for (int k = 0; k < 2000; ++k) {
        const int n = g.integer(2, 12);
        const auto members = random_members(g, n);
        const int split = g.integer(1, n - 1);
        const std::span<const PoolMember> all(members);
        const auto left = aggregate_risk_sharing(all.subspan(0, split));
        const auto right = aggregate_risk_sharing(all.subspan(split));
        const auto merged = merge_pools(left, right);
        const auto direct = aggregate_risk_sharing(all);
        CHECK(merged.aggregate_mining_assets == direct.aggregate_mining_assets);
        CHECK(merged.aggregate_cost_rate == direct.aggregate_cost_rate);
        CHECK(merged.member_mining_assets == direct.member_mining_assets);
        // ((A,B),C) against (A,(B,C)) is exact for the member data, and the
        // totals agree to rounding
        if (n >= 3) {
            const auto a = aggregate_risk_sharing(all.subspan(0, 1));
            const auto b = aggregate_risk_sharing(all.subspan(1, 1));
            const auto c = aggregate_risk_sharing(all.subspan(2));
            const auto ab_c = merge_pools(merge_pools(a, b), c);
            const auto a_bc = merge_pools(a, merge_pools(b, c));
            CHECK(ab_c.aggregate_mining_assets == a_bc.aggregate_mining_assets);
            CHECK(ab_c.aggregate_cost_rate == a_bc.aggregate_cost_rate);
        }
    }
}

TEST_CASE("pool moments equal those of one aggregated player") {
    const Environment env{1.0, 600.0, 0.0, 600.0};
    const std::vector<PoolMember> members{{"a", 1.0, 0.01}, {"b", 2.0, 0.02}};
    const auto pool = aggregate_risk_sharing(members);
    const double others = 7.0;
    const auto mom = pool_moments(pool, pool.aggregate_mining_assets + others, env);
    const std::vector<double> m{pool.aggregate_mining_assets, others}, c{pool.aggregate_cost_rate, 0.0};
    const auto direct = return_moments(0, ProcessState::homogeneous(env, m, c));
    CHECK(mom.mean == doctest::Approx(direct.mean).epsilon(1e-14));
    CHECK(mom.variance == doctest::Approx(direct.variance).epsilon(1e-14));
    CHECK_THROWS_AS(pool_moments(pool, 1.0, env), std::invalid_argument);
}

TEST_CASE("property: pooling raises the Sharpe ratio under homogeneous profitable costs") {
    Gen g(42);
    int checked = 0;
    for (int k = 0; k < 2000; ++k) {
        const Environment env{1.0, 600.0, g.coin(0.5) ? 0.0 : g.log_uniform(1e-8, 1e-4), 0.0};
        const double c = g.log_uniform(1e-4, 1e-1);
        const double y = riskfree_break_even(c, env);
        const int n = g.integer(2, 8);
        std::vector<PoolMember> members;
        for (int j = 0; j < n; ++j) members.push_back({"m", g.log_uniform(1e-3, 1.0) * y / n, c});
        const auto pool = aggregate_risk_sharing(members);
        const double others = g.uniform(0.0, 1.0) * (y - pool.aggregate_mining_assets);
        if (!(others > 0.0)) continue;
        const double h = pool.aggregate_mining_assets + others;
        const auto pooled = pool_moments(pool, h, env);
        for (const auto& mem : members) {
            const double s = sharpe_ratio(mem.mining_assets, h - mem.mining_assets, c, env);
            CHECK(pooled.sharpe >= s * (1 - 1e-12));
        }
        ++checked;
    }
    CHECK(checked > 1000);
}

TEST_CASE("risk-free pool sizing") {
    const Environment env{1.0, 600.0, 0.0, 0.0};
    const auto half = build_risk_free_pool(0.5, 40.0, 0.001, env);
    CHECK(half.collected_hash == doctest::Approx(40.0));

    const Scenario s = bitcoin_scenario();
    const double others = s.exogenous_hash;
    const double c = s.players[0].cost_per_asset();
    const auto pool = build_risk_free_pool(0.001, others, c, s.environment);
    CHECK(pool.collected_hash == doctest::Approx(3.3e6).epsilon(0.01));
    CHECK_FALSE(pool.unprofitable);
    CHECK(pool.sheet.mining_assets == pool.collected_hash);
    CHECK(pool.extra_revenue == s.environment.riskfree_rate * pool.sheet.liabilities);

    const auto late = build_risk_free_pool(0.25, others, c, s.environment);  // past the zero crossing at 0.2
    CHECK(late.unprofitable);
    CHECK(late.sheet.is_zero());
    CHECK(pool_stage_log_payoff(late, true, s.environment) == 0.0);

    CHECK_THROWS_AS(build_risk_free_pool(1.0, others, c, s.environment), std::invalid_argument);
    CHECK_THROWS_AS(build_risk_free_pool(0.1, others, 0.0, s.environment), std::invalid_argument);
}

TEST_CASE("risk-free pool replicates an ordinary levered player plus interest") {
    const Environment env{1.0, 600.0, 2e-4, 0.0};
    const double others = 90.0, c = 0.008, p = 0.05;
    const auto pool = build_risk_free_pool(p, others, c, env);
    REQUIRE_FALSE(pool.unprofitable);
    const auto opt = optimal_balance_sheet_for_M(pool.collected_hash, others, c, env);
    const auto& sh = opt.sheet;
    const double r = env.riskfree_rate;
    for (bool won : {true, false}) {
        const double rr = (won ? env.block_reward : 0.0) - c * sh.mining_assets;
        const double replica = std::log(1.0 + (rr - r * (sh.liabilities - sh.riskfree_assets) + r * sh.liabilities) / sh.equity);
        CHECK(pool_stage_log_payoff(pool, won, env) == doctest::Approx(replica).epsilon(1e-14));
    }

    // distribution check: KS on independent draws
    Rng a = Rng::stream(5, 0), b = Rng::stream(5, 1);
    const double prob = pool.collected_hash / (pool.collected_hash + others);
    std::vector<double> xs(100000), ys(100000);
    for (std::size_t k = 0; k < xs.size(); ++k) {
        xs[k] = pool_stage_log_payoff(pool, a.uniform() < prob, env);
        const bool won = b.uniform() < prob;
        const double rr = (won ? env.block_reward : 0.0) - c * sh.mining_assets;
        ys[k] = std::log(1.0 + (rr + r * sh.riskfree_assets) / sh.equity);
    }
    CHECK_FALSE(stats::ks_two_sample(xs, ys).rejected(0.01));
}

TEST_CASE("hash supply curve inverts") {
    const HashSupplyCurve curve{1e6, 0.01, 1.5};
    CHECK(curve.hash_at(0.01) == doctest::Approx(1e6));
    CHECK(curve.rate_for(curve.hash_at(0.023)) == doctest::Approx(0.023).epsilon(1e-13));
    CHECK_THROWS_AS(curve.hash_at(-1.0), std::invalid_argument);
}
