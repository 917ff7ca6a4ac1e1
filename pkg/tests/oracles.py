"""Independent reference implementations used only by the tests.

Each one takes a different route from the library code it checks: exhaustive
schedule enumeration instead of the per-retailer DP, scipy's HiGHS instead of
the rational simplex, and scipy's adaptive quadrature instead of the closed form.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.integrate import quad
from scipy.optimize import linprog

from jrplab.model import INF
from jrplab.pace import density_D


def brute_force_exact(instance, grid=None):
    """Minimum total cost over every schedule with shipment times in ``grid``
    (default: arrival times), by enumerating one subset of the grid per retailer.

    The warehouse pays for the union of the retailer subsets, so this covers all
    (warehouse subset, per-retailer subset) combinations that ship anything."""
    times = sorted(grid if grid is not None else {o.arrival for o in instance.orders})
    n = len(times)
    per_retailer = []
    for r in instance.retailer_ids:
        orders = [o for o in instance.orders if o.retailer == r]
        costs = []
        for mask in range(1 << n):
            chosen = [times[i] for i in range(n) if mask >> i & 1]
            total = instance.retailer_cost[r] * len(chosen)
            for o in orders:
                t = next((s for s in chosen if s >= o.arrival), None)
                total = INF if t is None else total + o.h(t)
            costs.append(total)
        per_retailer.append(costs)
    best = INF
    for masks in itertools.product(range(1 << n), repeat=len(per_retailer)):
        union = 0
        for m in masks:
            union |= m
        total = instance.warehouse_cost * bin(union).count("1")
        total += sum(c[m] for c, m in zip(per_retailer, masks))
        best = min(best, total)
    return best


def linprog_objective(instance):
    """Optimal value of the LP relaxation built from scratch and solved with HiGHS."""
    times = sorted({o.arrival for o in instance.orders})
    rids = list(instance.retailer_ids)
    nt = len(times)
    col = {}
    cost = []
    for i, t in enumerate(times):
        col[("x", i)] = len(cost)
        cost.append(float(instance.warehouse_cost))
    for r in rids:
        for i in range(nt):
            col[("xr", r, i)] = len(cost)
            cost.append(float(instance.retailer_cost[r]))
    for k, o in enumerate(instance.orders):
        for i, t in enumerate(times):
            if t >= o.arrival and o.h(t) < INF:
                col[("y", k, i)] = len(cost)
                cost.append(float(o.h(t)))
    rows = []
    rhs = []

    def row(entries, b):
        v = np.zeros(len(cost))
        for j, a in entries:
            v[j] = a
        rows.append(v)
        rhs.append(b)

    # written as A_ub z <= b_ub
    for r in rids:
        for i in range(nt):
            row([(col[("xr", r, i)], 1), (col[("x", i)], -1)], 0)
    for key, j in col.items():
        if key[0] == "y":
            _, k, i = key
            row([(j, 1), (col[("xr", instance.orders[k].retailer, i)], -1)], 0)
    for k in range(len(instance.orders)):
        row([(j, -1) for key, j in col.items() if key[0] == "y" and key[1] == k], -1)
    res = linprog(cost, A_ub=np.array(rows), b_ub=rhs, bounds=(0, None), method="highs")
    assert res.status == 0, res.message
    return res.fun


def xi_quad(params):
    d = density_D(params)
    val, _ = quad(lambda z: float(d(z)) / z, 1 - params.b, 1, epsabs=1e-13, epsrel=1e-13)
    return val


def waiting_ratio_grid(pace, n=20001):
    """Supremum of ``(1/(1-w)) * int_w^1 pace`` over a fine grid of ``w``."""
    ws = np.linspace(0, 1, n)[:-1]
    return max(float(pace.integral(w, 1)) / (1 - w) for w in ws)


def one_srp_waiting_ratio_closed_form(c):
    """Maximizer ``w* = 1 - sqrt(1 - 2c(1-c))`` lies on the rising part of the trapezoid."""
    w = 1 - math.sqrt(1 - 2 * c * (1 - c))
    return w / (c * (1 - c))
