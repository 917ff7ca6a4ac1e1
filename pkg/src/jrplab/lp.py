"""The natural LP relaxation of JRP, its solution, and shipping-pace measurement.

Variables: ``x[t]`` warehouse shipments, ``x_r[(r, t)]`` retailer shipments and
``y[(k, t)]`` the fraction of order ``k`` served at ``t`` (only for ``t >= a_k``
with finite waiting cost). Constraints::

    x[t] - x_r[(r, t)] >= 0          for every time t and retailer r
    x_r[(r, t)] - y[(k, t)] >= 0     for every y variable
    sum_t y[(k, t)] >= 1             for every order k

The model is solved through its dual (``max 1.u`` s.t. ``A^T u <= cost``) whose
slack basis is feasible because all costs are nonnegative.
"""
from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Callable, Sequence

import numpy as np

from .model import INF, CostBreakdown, InfeasibleError, Instance, Order, Schedule, event_times
from .simplex import SimplexError, maximize

DUALITY_TOL = 1e-9


class LpCertificateError(RuntimeError):
    """Primal and dual objectives disagree beyond tolerance."""


def _exact(v) -> Fraction:
    return v if isinstance(v, Fraction) else Fraction(v)


@dataclass(frozen=True)
class LpModel:
    instance: Instance
    times: tuple
    variables: tuple  # ("x", t) | ("xr", r, t) | ("y", k, t)
    objective: tuple  # exact coefficients, aligned with variables
    rows: tuple  # sparse rows {var index: coefficient}
    rhs: tuple
    kinds: tuple  # "warehouse" | "retailer" | "cover" per row

    @cached_property
    def index(self) -> dict:
        return {v: i for i, v in enumerate(self.variables)}

    def count(self, kind: str) -> int:
        return sum(1 for v in self.variables if v[0] == kind)


def build_lp(instance: Instance) -> LpModel:
    times = tuple(event_times(instance))
    variables = [("x", t) for t in times]
    variables += [("xr", r, t) for r in instance.retailer_ids for t in times]
    cost = [_exact(instance.warehouse_cost)] * len(times)
    cost += [_exact(instance.retailer_cost[r]) for r in instance.retailer_ids for t in times]
    for k, o in enumerate(instance.orders):
        admissible = [t for t in times if t >= o.arrival and o.h(t) < INF]
        if not admissible:
            raise InfeasibleError(f"order {o.id} has no admissible event time", o.id)
        for t in admissible:
            variables.append(("y", k, t))
            cost.append(_exact(o.h(t)))
    index = {v: i for i, v in enumerate(variables)}

    rows, rhs, kinds = [], [], []
    one = Fraction(1)
    for r in instance.retailer_ids:
        for t in times:
            rows.append({index[("x", t)]: one, index[("xr", r, t)]: -one})
            rhs.append(Fraction(0))
            kinds.append("warehouse")
    for v, i in index.items():
        if v[0] == "y":
            _, k, t = v
            rows.append({index[("xr", instance.orders[k].retailer, t)]: one, i: -one})
            rhs.append(Fraction(0))
            kinds.append("retailer")
    for k in range(len(instance.orders)):
        rows.append({i: one for v, i in index.items() if v[0] == "y" and v[1] == k})
        rhs.append(one)
        kinds.append("cover")
    return LpModel(instance, times, tuple(variables), tuple(cost), tuple(rows), tuple(rhs), tuple(kinds))


@dataclass(frozen=True)
class FractionalSolution:
    instance: Instance
    times: tuple
    x: dict  # t -> value
    x_r: dict  # (retailer, t) -> value
    y: dict  # (order index, t) -> value
    objective: object
    dual_objective: object
    exact: bool = True
    jrpd_cache: dict = field(default_factory=dict, compare=False, repr=False)

    def cost_breakdown(self) -> CostBreakdown:
        inst = self.instance
        wship = inst.warehouse_cost * float(sum(self.x.values()))
        rship = sum(inst.retailer_cost[r] * float(v) for (r, t), v in self.x_r.items())
        wait = sum(float(inst.orders[k].h(t)) * float(v) for (k, t), v in self.y.items() if v)
        return CostBreakdown(wship, rship, wait)

    @property
    def gap(self):
        return self.objective - self.dual_objective

    @cached_property
    def cumulative(self) -> "Cumulative":
        return Cumulative.from_solution(self)

    def suffix_mass(self, k: int) -> list:
        """``[(t, sum_{t' >= t} y[k, t'])]`` over the times at or after arrival."""
        a = self.instance.orders[k].arrival
        out, acc = [], 0
        for t in reversed(self.times):
            if t < a:
                break
            acc = acc + self.y.get((k, t), 0)
            out.append((t, acc))
        return out[::-1]


@dataclass(frozen=True)
class Cumulative:
    """Float views of running sums used by the randomized roundings."""

    times: np.ndarray
    X: np.ndarray
    Y: dict  # retailer -> cumulative array

    @classmethod
    def from_solution(cls, sol: FractionalSolution) -> "Cumulative":
        def running(vals):
            acc, out = 0, []
            for v in vals:
                acc = acc + v
                out.append(float(acc))
            return np.array(out)

        X = running(sol.x[t] for t in sol.times)
        Y = {r: running(sol.x_r[(r, t)] for t in sol.times) for r in sol.instance.retailer_ids}
        return cls(np.array([float(t) for t in sol.times]), X, Y)


def _normalize(model: LpModel, values: list) -> dict:
    """Trim every order's y down to total mass exactly one, removing the latest
    mass first (the most expensive, since waiting costs are non-decreasing)."""
    y = {}
    for v, i in model.index.items():
        if v[0] == "y":
            y[(v[1], v[2])] = values[i]
    for k in range(len(model.instance.orders)):
        keys = sorted((key for key in y if key[0] == k), key=lambda key: key[1], reverse=True)
        excess = sum((y[key] for key in keys), 0) - 1
        for key in keys:
            if excess <= 0:
                break
            cut = min(excess, y[key])
            y[key] = y[key] - cut
            excess = excess - cut
    return y


def solve_lp(model: LpModel, mode: str = "exact") -> FractionalSolution:
    """Optimal fractional solution.

    ``mode="exact"`` pivots in rationals, so the duality gap is exactly zero.
    ``mode="float"`` pivots in floating point and is only accepted when the
    recovered primal/dual pair passes a feasibility and duality check; otherwise
    it falls back to the exact path.
    """
    if mode not in ("exact", "float"):
        raise ValueError(f"unknown LP mode {mode!r}")
    n = len(model.variables)
    m = len(model.rows)
    # dual: max rhs.u  s.t.  sum_i u_i A[i][j] <= cost_j
    cols = [dict() for _ in range(n)]
    for i, row in enumerate(model.rows):
        for j, a in row.items():
            cols[j][i] = a
    if mode == "float":
        res = maximize([float(v) for v in model.rhs], [{i: float(a) for i, a in col.items()} for col in cols],
                       [float(v) for v in model.objective], tol=1e-12)
        try:
            return _finish(model, res, exact=False)
        except LpCertificateError:
            mode = "exact"
    res = maximize(list(model.rhs), cols, list(model.objective), tol=0)
    return _finish(model, res, exact=True)


def _finish(model: LpModel, res, exact: bool) -> FractionalSolution:
    if res.status != "optimal":
        raise SimplexError("LP dual is unbounded although the model was checked feasible")
    primal = res.dual  # primal variables are the multipliers of the dual's rows
    dual = res.primal
    obj = sum((c * v for c, v in zip(model.objective, primal)), 0 * primal[0] if primal else 0)
    dual_obj = sum((b * u for b, u in zip(model.rhs, dual)), 0)
    if not exact:
        scale = 1 + abs(obj)
        if abs(obj - dual_obj) > DUALITY_TOL * scale or not _feasible(model, primal, 1e-9):
            raise LpCertificateError("float simplex failed the duality certificate")
    elif obj != dual_obj:
        raise LpCertificateError(f"exact primal {obj} != dual {dual_obj}")
    inst = model.instance
    x = {t: primal[model.index[("x", t)]] for t in model.times}
    x_r = {(r, t): primal[model.index[("xr", r, t)]] for r in inst.retailer_ids for t in model.times}
    y = _normalize(model, primal)
    objective = (sum((model.objective[model.index[("x", t)]] * v for t, v in x.items()), 0)
                 + sum((model.objective[model.index[("xr",) + key]] * v for key, v in x_r.items()), 0)
                 + sum((model.objective[model.index[("y",) + key]] * v for key, v in y.items()), 0))
    return FractionalSolution(inst, model.times, x, x_r, y, objective, dual_obj, exact)


def _feasible(model: LpModel, values, tol) -> bool:
    if any(v < -tol for v in values):
        return False
    for row, b in zip(model.rows, model.rhs):
        if sum(a * values[j] for j, a in row.items()) < b - tol:
            return False
    return True


def check_solution(sol: FractionalSolution, tol=0) -> None:
    """Assert constraints (1)-(3) and the normalization hold."""
    inst = sol.instance
    for (r, t), v in sol.x_r.items():
        assert v >= -tol and sol.x[t] - v >= -tol, (r, t)
    for (k, t), v in sol.y.items():
        assert v >= -tol and sol.x_r[(inst.orders[k].retailer, t)] - v >= -tol, (k, t)
    for k in range(len(inst.orders)):
        total = sum((v for (kk, t), v in sol.y.items() if kk == k), 0)
        assert abs(total - 1) <= tol, (k, total)


def ft_lp(sol: FractionalSolution, order, alpha) -> object:
    """First event time ``t >= a`` whose suffix mass ``sum_{t' >= t} y`` is at
    most ``1 - alpha``; ``inf`` when no event time qualifies (the order's last
    admissible time still carries more than ``1 - alpha``)."""
    k = order if isinstance(order, int) else sol.instance.orders.index(order)
    if not 0 <= alpha < 1:
        raise ValueError("alpha must lie in [0, 1)")
    for t, suffix in sol.suffix_mass(k):
        if suffix <= 1 - _as_exact(alpha, sol):
            return t
    return INF


def _as_exact(alpha, sol):
    return Fraction(alpha) if sol.exact and not isinstance(alpha, Fraction) else alpha


def first_service_times(instance: Instance, schedule: Schedule) -> list:
    """Per order, the first shipment time to its retailer at or after arrival (None if never)."""
    times = {}
    for s in schedule.shipments:
        for r in s.retailers:
            times.setdefault(r, []).append(s.time)
    out = []
    for o in instance.orders:
        ts = times.get(o.retailer, [])
        i = bisect.bisect_left(ts, o.arrival)
        out.append(ts[i] if i < len(ts) else None)
    return out


def empirical_pace(rounding: Callable, sol: FractionalSolution, trials: int, seed: int,
                   alpha_grid: Sequence) -> np.ndarray:
    """Fraction of trials in which ``rounding(sol, seed_i)`` ships to the order's
    retailer within ``[a, ft_lp(order, alpha)]``; shape ``(orders, len(alpha_grid))``.

    Trial ``i`` uses seed ``seed + i``."""
    if trials < 1:
        raise ValueError("trials must be positive")
    inst = sol.instance
    ft = np.array([[float(ft_lp(sol, k, a)) for a in alpha_grid] for k in range(len(inst.orders))])
    hits = np.zeros(ft.shape)
    for i in range(trials):
        sched = rounding(sol, seed + i)
        first = first_service_times(inst, sched)
        f = np.array([np.inf if t is None else float(t) for t in first])
        hits += np.isfinite(f)[:, None] & (f[:, None] <= ft)
    return hits / trials


def solution_to_dict(sol: FractionalSolution) -> dict:
    inst = sol.instance
    cb = sol.cost_breakdown()
    return {
        "objective": float(sol.objective),
        "objective_exact": str(sol.objective) if sol.exact else None,
        "dual_objective": float(sol.dual_objective),
        "components": cb.as_dict(),
        "x": {repr(float(t)): float(v) for t, v in sol.x.items()},
        "x_r": {r: {repr(float(t)): float(sol.x_r[(r, t)]) for t in sol.times} for r in inst.retailer_ids},
        "y": {
            inst.orders[k].id: {repr(float(t)): float(v) for (kk, t), v in sorted(sol.y.items()) if kk == k}
            for k in range(len(inst.orders))
        },
    }
