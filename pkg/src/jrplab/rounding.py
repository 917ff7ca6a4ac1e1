"""Randomized roundings of the fractional solution: 2SRP, 1SRP, LPS and mixtures.

Random draws come from one ``numpy.random.Generator`` per call, consumed in a
fixed order: mixture coins first (outer, then inner), then the chosen
algorithm's draws -- the warehouse shift, then one shift per retailer in
retailer-id order (1SRP/2SRP), or the single scaling factor (LPS).

Shifted thresholds are mapped to real times with "first event time at which
the running fractional mass reaches the threshold"; thresholds beyond the
final running mass produce no shipment.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

from .exact import solve_exact_jrpd
from .lp import FractionalSolution
from .model import DeadlineCost, Instance, Order, Schedule, Shipment, Variant
from .pace import MixtureParams, density_cdf

ALGORITHMS = ("2srp", "1srp", "lps", "1srp+lps", "full")


def _rng(seed) -> np.random.Generator:
    return np.random.default_rng(seed)


def _crossings(cum: np.ndarray, start: float, step: float) -> np.ndarray:
    """Indices where ``cum`` first reaches each of ``start, start+step, ...``."""
    total = cum[-1] if len(cum) else 0.0
    if start > total:
        return np.empty(0, dtype=int)
    k = int(np.floor((total - start) / step)) + 1
    thresholds = start + step * np.arange(k)
    thresholds = thresholds[thresholds <= total]
    return np.unique(np.searchsorted(cum, thresholds, side="left"))


def _assemble(sol: FractionalSolution, retailer_idx: dict) -> Schedule:
    """Turn per-retailer shipment indices into a schedule, then add a terminal
    shipment at the last event time for any retailer left with unserved orders."""
    inst, times = sol.instance, sol.times
    pending = set()
    for o in inst.orders:
        idx = retailer_idx.get(o.retailer)
        a = o.arrival
        if idx is None or not len(idx) or times[int(idx[-1])] < a:
            pending.add(o.retailer)
    at: dict[int, set] = {}
    for r, idx in retailer_idx.items():
        for i in idx:
            at.setdefault(int(i), set()).add(r)
    if pending:
        at.setdefault(len(times) - 1, set()).update(pending)
    return Schedule(tuple(Shipment(times[i], frozenset(S)) for i, S in sorted(at.items()) if S))


def _one_srp(sol: FractionalSolution, c: float, rng: np.random.Generator) -> Schedule:
    cum = sol.cumulative
    psi = rng.uniform(0.0, c)
    wh = _crossings(cum.X, psi, c)
    out = {}
    for r in sol.instance.retailer_ids:
        psi_r = rng.uniform(0.0, 1.0 - c)
        tent = _crossings(cum.Y[r], psi_r, 1.0 - c)
        pos = np.searchsorted(wh, tent, side="left")
        out[r] = np.unique(wh[pos[pos < len(wh)]])
    return _assemble(sol, out)


def _two_srp(sol: FractionalSolution, rng: np.random.Generator) -> Schedule:
    cum = sol.cumulative
    psi = 1.0 - rng.uniform(0.0, 1.0)  # (0, 1]
    wh = _crossings(cum.X, psi, 1.0)
    out = {}
    for r in sol.instance.retailer_ids:
        psi_r = 1.0 - rng.uniform(0.0, 1.0)
        tent = _crossings(cum.Y[r], psi_r, 1.0)
        if not len(wh) or not len(tent):
            out[r] = np.empty(0, dtype=int)
            continue
        nxt = np.searchsorted(wh, tent, side="left")
        prv = np.searchsorted(wh, tent, side="right") - 1
        picked = np.concatenate([wh[nxt[nxt < len(wh)]], wh[prv[prv >= 0]]])
        out[r] = np.unique(picked)
    return _assemble(sol, out)


def round_1srp(sol: FractionalSolution, c: float = 1 / 3, seed=None) -> Schedule:
    """One-sided retailer push with shift span ``c``.

    Warehouse shipments sit at running-mass thresholds ``psi + i*c``
    (``psi ~ U[0, c]``); each retailer gets tentative shipments at
    ``psi_r + i*(1-c)`` on its own running mass (``psi_r ~ U[0, 1-c]``), each
    realized at the first warehouse shipment at or after it."""
    if not 0 < c <= 0.5:
        raise ValueError("c must lie in (0, 1/2]")
    return _one_srp(sol, c, _rng(seed))


def round_2srp(sol: FractionalSolution, seed=None) -> Schedule:
    """Two-sided retailer push.

    Warehouse shipments at running-mass thresholds ``psi + i`` and retailer
    tentative shipments at ``psi_r + i`` (all shifts uniform on ``(0, 1]``).
    Each tentative shipment is pushed to both neighbouring warehouse shipments,
    the latest one at or before it and the earliest one at or after it."""
    return _two_srp(sol, _rng(seed))


def sample_zeta(params: MixtureParams, seed=None, tol: float = 1e-12) -> float:
    """Draw a scaling factor from the LPS density by inverting its CDF with bisection."""
    return _sample_zeta(params, _rng(seed), tol)


def _sample_zeta(params, rng, tol=1e-12) -> float:
    u = rng.uniform(0.0, 1.0)
    lo, hi = 1.0 - params.b, 1.0
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if density_cdf(params, mid) < u:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def lps_deadlines(sol: FractionalSolution, zeta) -> list:
    """Just-in-time deadlines of the scaled solution ``x_hat = min(1, x*/zeta)``.

    The order's serving mass ``y_hat`` is filled greedily, earliest time first,
    up to ``x_hat`` of its retailer; the deadline is the first time its
    cumulative ``y_hat`` reaches one. Exact when the LP solution is exact."""
    z = Fraction(zeta) if sol.exact else float(zeta)
    inst, times = sol.instance, sol.times
    out = []
    for o in inst.orders:
        need = 1
        deadline = None
        for t in times:
            if t < o.arrival:
                continue
            xr = sol.x_r[(o.retailer, t)]
            xhat = min(1, xr / z)
            take = min(xhat, need)
            need = need - take
            if need <= 0:
                deadline = t
                break
        if deadline is None:
            raise AssertionError(f"order {o.id} never completes in the scaled solution")
        out.append(deadline)
    return out


def _deadline_instance(inst: Instance, deadlines) -> Instance:
    orders = tuple(Order(o.retailer, o.arrival, DeadlineCost(d), o.id) for o, d in zip(inst.orders, deadlines))
    return Instance(inst.warehouse_cost, inst.retailers, orders, Variant.DEADLINE)


def _lps(sol: FractionalSolution, params: MixtureParams, rng) -> Schedule:
    zeta = _sample_zeta(params, rng)
    deadlines = tuple(lps_deadlines(sol, zeta))
    cache = sol.jrpd_cache
    sched = cache.get(deadlines)
    if sched is None:
        sched = solve_exact_jrpd(_deadline_instance(sol.instance, deadlines)).schedule
        cache[deadlines] = sched
    return sched


def round_lps(sol: FractionalSolution, instance: Instance | None = None, params: MixtureParams | None = None,
              seed=None) -> Schedule:
    """Scale by a random ``1/zeta``, derive deadlines, and solve the deadline instance.

    The deadline instance is solved exactly (memoized per deadline vector on the
    solution object)."""
    _check_instance(sol, instance)
    return _lps(sol, params or MixtureParams(), _rng(seed))


def round_mixture(sol: FractionalSolution, instance: Instance | None = None, params: MixtureParams | None = None,
                  seed=None) -> Schedule:
    """2SRP with probability ``q``, else 1SRP with probability ``p``, else LPS."""
    _check_instance(sol, instance)
    params = params or MixtureParams()
    rng = _rng(seed)
    if rng.uniform() < params.q:
        return _two_srp(sol, rng)
    return _inner_mixture(sol, params, rng)


def round_1srp_lps(sol: FractionalSolution, instance: Instance | None = None, params: MixtureParams | None = None,
                   seed=None) -> Schedule:
    """1SRP with probability ``p``, LPS otherwise."""
    _check_instance(sol, instance)
    params = params or MixtureParams()
    return _inner_mixture(sol, params, _rng(seed))


def _inner_mixture(sol, params, rng):
    if rng.uniform() < params.p:
        return _one_srp(sol, params.c, rng)
    return _lps(sol, params, rng)


def _check_instance(sol, instance):
    if instance is not None and instance is not sol.instance and instance != sol.instance:
        raise ValueError("solution was computed for a different instance")


def rounding_for(name: str, params: MixtureParams | None = None, c: float | None = None):
    """``f(sol, seed) -> Schedule`` for one of :data:`ALGORITHMS`."""
    params = params or MixtureParams()
    if name == "2srp":
        return lambda sol, seed: round_2srp(sol, seed)
    if name == "1srp":
        cc = params.c if c is None else c
        return lambda sol, seed: round_1srp(sol, cc, seed)
    if name == "lps":
        return lambda sol, seed: round_lps(sol, None, params, seed)
    if name == "1srp+lps":
        return lambda sol, seed: round_1srp_lps(sol, None, params, seed)
    if name == "full":
        return lambda sol, seed: round_mixture(sol, None, params, seed)
    raise ValueError(f"unknown algorithm {name!r}; expected one of {', '.join(ALGORITHMS)}")
