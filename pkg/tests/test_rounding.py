import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jrplab.bench import monte_carlo
from jrplab.generate import fractional_battery
from jrplab.lp import build_lp, solve_lp
from jrplab.model import LinearCost, evaluate, make_instance
from jrplab.pace import MixtureParams, density_cdf
from jrplab.rounding import (
    ALGORITHMS,
    lps_deadlines,
    round_1srp,
    round_2srp,
    round_lps,
    round_mixture,
    rounding_for,
    sample_zeta,
)
from strategies import small_instances


@pytest.fixture(scope="module")
def fractional():
    _, inst = fractional_battery(1)[0]
    return solve_lp(build_lp(inst))


@settings(max_examples=40, deadline=None)
@given(small_instances(max_orders=6), st.sampled_from(ALGORITHMS), st.integers(0, 2**31))
def test_every_rounding_is_feasible_and_on_the_grid(inst, alg, seed):
    sol = solve_lp(build_lp(inst))
    f = rounding_for(alg)
    sched = f(sol, seed)
    evaluate(inst, sched)
    assert {s.time for s in sched.shipments} <= set(sol.times)
    assert f(sol, seed) == sched


@pytest.mark.parametrize("alg", ALGORITHMS)
def test_rounding_reproduces_an_integral_optimum(alg):
    inst = make_instance(2, {"A": 1, "B": 1}, [("A", 0, LinearCost()), ("B", 0, LinearCost()), ("A", 5, LinearCost())])
    sol = solve_lp(build_lp(inst))
    assert all(v.denominator == 1 for v in sol.x.values())
    if alg == "lps":
        # the deadline stand-in keeps the shipments of the integral solution
        costs = {evaluate(inst, round_lps(sol, seed=s)).total for s in range(20)}
        assert costs == {float(sol.objective)}
        return
    for s in range(20):
        assert evaluate(inst, rounding_for(alg)(sol, s)).total == pytest.approx(float(sol.objective))


def test_fractional_battery_is_really_fractional(fractional):
    assert any(v.denominator != 1 for v in fractional.x.values())
    assert len(fractional.times) == 8


def test_different_seeds_give_different_schedules(fractional):
    scheds = {round_2srp(fractional, s) for s in range(30)}
    assert len(scheds) > 1


def test_1srp_ships_retailers_only_with_the_warehouse(fractional):
    for s in range(20):
        sched = round_1srp(fractional, 1 / 3, s)
        assert all(sh.retailers for sh in sched.shipments)


def test_1srp_rejects_bad_shift_span(fractional):
    with pytest.raises(ValueError):
        round_1srp(fractional, 0.7, 0)


def test_unknown_algorithm():
    with pytest.raises(ValueError):
        rounding_for("3srp")


def test_mixture_rejects_a_foreign_instance(fractional):
    other = make_instance(1, {"A": 1}, [("A", 0, LinearCost())])
    with pytest.raises(ValueError):
        round_mixture(fractional, other, seed=0)


def test_zeta_sampler_matches_the_density():
    p = MixtureParams()
    zs = np.array([sample_zeta(p, s) for s in range(4000)])
    assert zs.min() >= 1 - p.b and zs.max() <= 1
    qs = np.linspace(1 - p.b, 1, 11)
    emp = np.array([(zs <= q).mean() for q in qs])
    model = np.array([density_cdf(p, q) for q in qs])
    # Dvoretzky-Kiefer-Wolfowitz band at 99.9%
    assert np.abs(emp - model).max() < np.sqrt(np.log(2 / 1e-3) / (2 * len(zs)))


def test_lps_deadlines_lie_in_the_order_window(fractional):
    inst = fractional.instance
    for zeta in (0.87, 0.95, 1.0):
        for o, d in zip(inst.orders, lps_deadlines(fractional, zeta)):
            assert d >= o.arrival and d in fractional.times


def test_lps_deadlines_move_earlier_as_zeta_shrinks(fractional):
    late = lps_deadlines(fractional, 1.0)
    early = lps_deadlines(fractional, 0.87)
    assert all(e <= l for e, l in zip(early, late))


def test_lps_memoizes_deadline_solves(fractional):
    fractional.jrpd_cache.clear()
    for s in range(50):
        round_lps(fractional, seed=s)
    assert 0 < len(fractional.jrpd_cache) < 50


def test_mixture_coin_extremes(fractional):
    only_2srp = MixtureParams(q_override=1.0)
    stats = monte_carlo(fractional, rounding_for("full", only_2srp), 200, 0)
    ref = monte_carlo(fractional, rounding_for("2srp"), 200, 10_000)
    assert stats.mean[3] == pytest.approx(ref.mean[3], abs=5 * (stats.se[3] + ref.se[3]) + 1e-9)


def test_2srp_short_run_contract(fractional):
    lp = fractional.cost_breakdown()
    st_ = monte_carlo(fractional, rounding_for("2srp"), 2000, 7)
    bound = np.array([1, 2, 2]) * np.array([lp.warehouse_ship, lp.retailer_ship, lp.waiting])
    assert (st_.mean[:3] <= bound + 3 * st_.se[:3] + 1e-9).all()
