from dataclasses import replace

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jrplab.exact import OracleLimitError, opt_single_phase, solve_exact, solve_exact_jrpd
from jrplab.lp import build_lp, solve_lp
from jrplab.model import (
    DeadlineCost,
    InfeasibleError,
    Instance,
    LinearCost,
    Order,
    Retailer,
    evaluate,
    make_instance,
)
from jrplab.online import AdversaryD, AdversaryL
from oracles import brute_force_exact
from strategies import small_instances


def test_joint_deadline_toy():
    inst = make_instance(2, {"A": 1, "B": 3}, [("A", 0, DeadlineCost(1)), ("B", 0, DeadlineCost(1))])
    res = solve_exact(inst)
    assert res.cost.total == 6 and len(res.schedule) == 1


def test_three_linear_orders():
    inst = make_instance(1, {"A": 0.4, "B": 0.4},
                         [("A", 0, LinearCost()), ("B", 1, LinearCost()), ("A", 2, LinearCost())])
    res = solve_exact(inst)
    assert res.cost.total == pytest.approx(4.2)
    assert res.cost.total == pytest.approx(brute_force_exact(inst))


def test_single_linear_order_ships_at_arrival():
    inst = make_instance(2, {"A": 1}, [("A", 0.5, LinearCost())])
    res = solve_exact(inst)
    assert res.cost.total == 3
    assert [s.time for s in res.schedule.shipments] == [0.5]


def test_result_cost_matches_evaluation():
    inst = make_instance(1, {"A": 0.4, "B": 0.4},
                         [("A", 0, LinearCost()), ("B", 1, LinearCost()), ("A", 2, LinearCost())])
    res = solve_exact(inst)
    assert evaluate(inst, res.schedule) == res.cost
    assert res.nodes_explored > 0


def test_ties_break_toward_earliest_times():
    # shipping at 0 or at 1 costs the same for a zero-weight order
    inst = make_instance(1, {"A": 1}, [("A", 0, LinearCost(0)), ("A", 1, LinearCost(0))])
    assert [s.time for s in solve_exact(inst).schedule.shipments] == [1]
    inst = make_instance(1, {"A": 1}, [("A", 0, DeadlineCost(1))])
    assert [s.time for s in solve_exact_jrpd(inst).schedule.shipments] == [0]


def test_deadline_game_with_two_followers_costs_three():
    assert solve_exact_jrpd(AdversaryD(2).instance()).cost.total == 3


def test_deadline_at_arrival_ships_then():
    res = solve_exact_jrpd(make_instance(1, {"A": 1}, [("A", 2, DeadlineCost(2))]))
    assert [s.time for s in res.schedule.shipments] == [2]


def test_disjoint_windows_need_two_shipments():
    inst = make_instance(10, {"A": 1, "B": 1}, [("A", 0, DeadlineCost(1)), ("B", 2, DeadlineCost(3))])
    res = solve_exact_jrpd(inst)
    assert res.cost.total == 22 and len(res.schedule) == 2
    assert res.cost.total == brute_force_exact(inst, {0, 1, 2, 3})


def test_grid_limit():
    inst = make_instance(1, {"A": 1}, [("A", float(i), LinearCost()) for i in range(5)])
    with pytest.raises(OracleLimitError):
        solve_exact(inst, limit=4)


def test_jrpd_rejects_other_variants():
    with pytest.raises(ValueError):
        solve_exact_jrpd(make_instance(1, {"A": 1}, [("A", 0, LinearCost())]))


def test_single_phase_optimum_examples():
    cfg = AdversaryL(5, 1e-3)
    inst = cfg.instance()
    omega = cfg.sigma0 / 2
    # only pi_0 carries weight 1; the rest are negligible
    assert opt_single_phase(inst, omega) == pytest.approx(float(omega), rel=1e-2)
    assert opt_single_phase(inst, 0) == 0
    for k in (0, 3, 7):
        assert opt_single_phase(AdversaryD(10).instance(), k) == k + 1


def test_single_phase_needs_zero_arrivals():
    with pytest.raises(ValueError):
        opt_single_phase(make_instance(1, {"A": 1}, [("A", 1, LinearCost())]), 2)


def test_single_phase_agrees_with_horizon_solver():
    inst = AdversaryD(4).instance()
    for theta in range(5):
        assert opt_single_phase(inst, theta) == solve_exact(inst, horizon=theta).cost.total


@settings(max_examples=80, deadline=None)
@given(small_instances(max_orders=5, max_retailers=3))
def test_matches_full_enumeration(inst):
    try:
        brute = brute_force_exact(inst)
    except Exception:
        brute = None
    if brute is None or brute == float("inf"):
        with pytest.raises(InfeasibleError):
            solve_exact(inst)
        return
    assert solve_exact(inst).cost.total == pytest.approx(brute, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(small_instances(max_orders=5), st.randoms(use_true_random=False))
def test_invariant_under_relabeling_and_idle_retailers(inst, rnd):
    base = solve_exact(inst).cost.total
    ids = list(inst.retailer_ids)
    shuffled = ids[:]
    rnd.shuffle(shuffled)
    rename = {a: f"x{b}" for a, b in zip(ids, shuffled)}
    relabeled = Instance(inst.C, tuple(Retailer(rename[r.id], r.cost) for r in reversed(inst.retailers)),
                         tuple(replace(o, retailer=rename[o.retailer]) for o in inst.orders), inst.variant)
    assert solve_exact(relabeled).cost.total == pytest.approx(base, abs=1e-12)
    idle = Instance(inst.C, inst.retailers + (Retailer("idle", 0.5),), inst.orders, inst.variant)
    assert solve_exact(idle).cost.total == pytest.approx(base, abs=1e-12)


@settings(max_examples=40, deadline=None)
@given(small_instances(variant="deadline", max_orders=4), st.integers(0, 3), st.sampled_from([0.25, 0.5, 1.0]))
def test_tightening_a_deadline_never_helps(inst, which, cut):
    k = which % len(inst.orders)
    o = inst.orders[k]
    tighter = DeadlineCost(max(o.arrival, o.deadline - cut))
    orders = tuple(Order(p.retailer, p.arrival, tighter, p.id) if i == k else p for i, p in enumerate(inst.orders))
    tight = Instance(inst.C, inst.retailers, orders, inst.variant)
    assert solve_exact_jrpd(tight).cost.total >= solve_exact_jrpd(inst).cost.total


@settings(max_examples=40, deadline=None)
@given(small_instances(max_orders=6))
def test_lp_is_a_lower_bound(inst):
    lp = solve_lp(build_lp(inst))
    assert float(lp.objective) <= solve_exact(inst).cost.total + 1e-9
