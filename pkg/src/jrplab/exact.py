"""Exact offline solvers, used as ground truth for every ratio measurement.

The search enumerates the set W of warehouse shipment times over a finite
grid (order arrivals, plus deadlines for deadline instances). For a fixed W
the retailers decouple, and each one runs a small DP choosing which times of W
it joins. Shipping at grid times only loses nothing: any shipment can slide
back to the latest arrival before it without changing which orders it serves.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .model import (
    INF,
    CostBreakdown,
    DeadlineCost,
    InfeasibleError,
    Instance,
    Schedule,
    Shipment,
    Variant,
    evaluate,
    evaluate_horizon,
    unserved_cost,
)

DEFAULT_LIMIT = 16


class OracleLimitError(ValueError):
    """The instance's grid is too large for exhaustive search."""


@dataclass(frozen=True)
class ExactResult:
    schedule: Schedule
    cost: CostBreakdown
    nodes_explored: int


class _RetailerTable:
    """Segment costs for one retailer over a fixed grid.

    ``seg[i][k]`` is the waiting cost of the retailer's orders arriving in
    ``(grid[i-1], grid[k]]`` when they are all served at ``grid[k]`` (row 0
    stands for "no earlier shipment"). ``tail[i]`` prices the orders arriving
    after ``grid[i-1]`` that are never served."""

    def __init__(self, orders, grid, cost, theta):
        n = len(grid)
        self.cost = cost
        bounds = [-INF] + list(grid)
        self.seg = [[INF] * n for _ in range(n + 1)]
        for i in range(n + 1):
            lo = bounds[i]
            for k in range(max(i, 0), n):
                t = grid[k]
                total = 0
                for o in orders:
                    if lo < o.arrival <= t:
                        total += o.h(t)
                        if total == INF:
                            break
                self.seg[i][k] = total
        self.tail = []
        for i in range(n + 1):
            lo = bounds[i]
            total = 0
            for o in orders:
                if o.arrival > lo:
                    total += INF if theta is None else unserved_cost(o, theta)
            self.tail.append(total)

    def best(self, W):
        """Cheapest way to serve this retailer using times in ``W`` (sorted grid
        indices). Returns ``(cost, chosen indices)``."""
        best_cost, best_end = self.tail[0], None
        g = {}
        prev = {}
        for pos, k in enumerate(W):
            cand, arg = self.seg[0][k], None
            for i in W[:pos]:
                v = g[i] + self.seg[i + 1][k]
                if v < cand:
                    cand, arg = v, i
            g[k] = cand + self.cost
            prev[k] = arg
            v = g[k] + self.tail[k + 1]
            if v < best_cost:
                best_cost, best_end = v, k
        chosen = []
        k = best_end
        while k is not None:
            chosen.append(k)
            k = prev[k]
        return best_cost, chosen[::-1]


def _check_grid(instance, grid, limit):
    if len(grid) > limit:
        raise OracleLimitError(f"grid has {len(grid)} times, exact search limit is {limit}")


def _solve_on_grid(instance: Instance, grid: list, theta=None) -> tuple[Schedule, int]:
    C = instance.warehouse_cost
    by_retailer = {r: [] for r in instance.retailer_ids}
    for o in instance.orders:
        by_retailer[o.retailer].append(o)
    for o in instance.orders:
        if theta is not None and unserved_cost(o, theta) < INF:
            continue
        if not any(t >= o.arrival and o.h(t) < INF for t in grid):
            raise InfeasibleError(f"order {o.id} has no finite-cost shipment time", o.id)
    tables = {r: _RetailerTable(os_, grid, instance.retailer_cost[r], theta)
              for r, os_ in by_retailer.items() if os_}

    best_key, best_plan = None, None
    nodes = 0
    n = len(grid)
    for size in range(0, n + 1):
        if best_key is not None and size * C > best_key[0]:
            break
        for W in itertools.combinations(range(n), size):
            nodes += 1
            total = size * C
            plan = {}
            for r, tab in tables.items():
                cost, chosen = tab.best(W)
                total += cost
                if total == INF or (best_key is not None and total > best_key[0]):
                    break
                plan[r] = chosen
            else:
                key = (total, tuple(grid[k] for k in W))
                if best_key is None or key < best_key:
                    best_key, best_plan = key, (W, plan)
    if best_key is None or best_key[0] == INF:
        raise InfeasibleError("no feasible schedule on the event grid")
    W, plan = best_plan
    ships = []
    for k in W:
        S = frozenset(r for r, chosen in plan.items() if k in chosen)
        if S:
            ships.append(Shipment(grid[k], S))
    return Schedule(tuple(ships)), nodes


def _result(instance, schedule, nodes, theta):
    cost = evaluate(instance, schedule) if theta is None else evaluate_horizon(instance, schedule, theta)
    return ExactResult(schedule, cost, nodes)


def solve_exact(instance: Instance, limit: int = DEFAULT_LIMIT, horizon=None) -> ExactResult:
    """Optimal schedule with shipments at arrival times.

    With ``horizon`` set, shipments are restricted to times at or before it and
    orders still pending then pay their expiry cost (see ``evaluate_horizon``).
    Deadline-kind orders additionally put their deadlines on the grid."""
    grid = {o.arrival for o in instance.orders}
    if any(isinstance(o.cost, DeadlineCost) for o in instance.orders):
        grid |= {o.deadline for o in instance.orders if o.deadline < INF}
    if horizon is not None:
        grid = {t for t in grid if t <= horizon}
    grid = sorted(grid)
    _check_grid(instance, grid, limit)
    schedule, nodes = _solve_on_grid(instance, grid, horizon)
    return _result(instance, schedule, nodes, horizon)


def solve_exact_jrpd(instance: Instance, limit: int = DEFAULT_LIMIT) -> ExactResult:
    """Cheapest schedule meeting every deadline; the grid is arrivals plus deadlines."""
    if instance.variant is not Variant.DEADLINE and instance.orders:
        raise ValueError("solve_exact_jrpd needs a deadline-only instance")
    grid = sorted({o.arrival for o in instance.orders} | {o.deadline for o in instance.orders})
    _check_grid(instance, grid, limit)
    schedule, nodes = _solve_on_grid(instance, grid)
    return _result(instance, schedule, nodes, None)


def opt_single_phase(instance: Instance, theta):
    """Offline optimum of a single-phase game that expires at ``theta``.

    All orders arrive at time 0, so whatever is served is served cheapest by
    one shipment at time 0. Each retailer then joins that shipment iff its
    charge is below the expiry cost of its orders (forced for binding
    deadlines), and the alternative is shipping nothing at all."""
    if any(o.arrival != 0 for o in instance.orders):
        raise ValueError("single-phase instances have every arrival at time 0")
    expire = {r: 0 for r in instance.retailer_ids}
    for o in instance.orders:
        expire[o.retailer] = expire[o.retailer] + unserved_cost(o, theta)
    nothing = sum(expire.values(), 0)
    one_shipment = instance.warehouse_cost + sum(
        (min(instance.retailer_cost[r], u) for r, u in expire.items()), 0)
    best = min(nothing, one_shipment)
    if best == INF or (isinstance(best, float) and math.isnan(best)):
        raise InfeasibleError("single-phase optimum is unbounded")
    return best
