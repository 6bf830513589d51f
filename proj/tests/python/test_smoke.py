import math
import os
import pathlib

import pytest
import scipy.stats

import minerkelly as mk

SCENARIOS = pathlib.Path(os.environ.get("MINERKELLY_SCENARIO_DIR", pathlib.Path(__file__).parents[2] / "scenarios"))


def test_coinflip_optimum():
    ret = mk.TwoPointReturn(0.23, -0.20, 0.5)
    sol = mk.solve_leverage(ret)
    assert sol.f_exact == pytest.approx(0.32608696, abs=1e-8)
    assert sol.expected_log_payoff_at_exact == pytest.approx(0.00243969, abs=1e-8)
    # grid oracle
    best = max((mk.expected_log_payoff(k / 10000, ret), k / 10000) for k in range(1, 40000))
    assert best[1] == pytest.approx(sol.f_exact, abs=2e-4)


def test_all_in_median():
    ret = mk.TwoPointReturn(0.23, -0.20, 0.5)
    med = mk.coinflip_median(ret, 1.0, 90, 2001, 1000.0, seed=7)
    assert med == pytest.approx(1000 * (1.23 * 0.8) ** 45, rel=0.2)


def test_balance_sheet_identity():
    for f in (0.3, 1.0, 4.5):
        b = mk.make_balance_sheet(10.0, f)
        assert b.equity + b.liabilities == pytest.approx(b.mining_assets + b.riskfree_assets)
        assert b.leverage() == pytest.approx(f)


def test_equilibrium_solvers_agree():
    env = mk.Environment(block_reward=1.0, block_interval=1.0)
    costs = [0.01, 0.012, 0.02, 0.05]
    a = mk.equilibrium_closed_form(costs, 5.0, env)
    b = mk.equilibrium_fixed_point(costs, 5.0, env)
    assert a["in_support"] == b["in_support"]
    for x, y in zip(a["holdings"], b["holdings"]):
        assert x == pytest.approx(y, rel=1e-7, abs=1e-12)


def test_ks_p_value_matches_scipy():
    a = [math.sin(k) for k in range(300)]
    b = [math.cos(0.7 * k) * 1.1 for k in range(250)]
    d, p = mk.ks_two_sample(a, b)
    ref = scipy.stats.ks_2samp(a, b, method="asymp")
    assert d == pytest.approx(ref.statistic, abs=1e-12)
    assert p == pytest.approx(ref.pvalue, rel=0.05, abs=1e-3)
    assert mk.kolmogorov_survival(1.0) == pytest.approx(scipy.stats.kstwobign.sf(1.0), rel=1e-9)


def test_bitcoin_example():
    v = mk.example_values("bitcoin")
    assert v["f_simple"] == pytest.approx(5.5721, rel=1e-4)
    assert v["growth_rate_at_f_simple"] == pytest.approx(1.986e-5, rel=1e-3)


def test_scenario_reports():
    eq = mk.equilibrium(str(SCENARIOS / "homogeneous.json"))
    assert len(eq) == 10
    assert all(row["share"] == pytest.approx(0.1) for row in eq)
    sweep = mk.sweep(str(SCENARIOS / "bitcoin.json"), 100)
    assert len(sweep) == 99
    sim1 = mk.simulate(str(SCENARIOS / "pools.json"), 20, seed=3)
    sim2 = mk.simulate(str(SCENARIOS / "pools.json"), 20, seed=3, workers=2)
    assert sim1 == sim2


def test_malformed_scenario(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"environment": {"block_reward": 1, "block_interval": 1}, "players": [{"id": "a", "colour": 1}]}')
    with pytest.raises(mk.ScenarioError):
        mk.equilibrium(str(bad))
