"""Single-phase adversaries for the online lower bounds.

All orders arrive at time 0 and the adversary only picks the expiry time
``theta`` by watching the policy's shipments. The linear-cost game runs in
exact rationals: its weights shrink geometrically and the policy's shipment
times grow accordingly, far beyond float range for a few hundred retailers.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from ..exact import opt_single_phase
from ..model import INF, DeadlineCost, InfeasibleError, Instance, LinearCost, Order, Retailer, Variant, evaluate_horizon
from ..pace import solve_lower_bound_constants
from .engine import GameTranscript, OnlinePolicy, forced_ratio, simulate


@dataclass(frozen=True)
class AdversaryL:
    """Linear-cost game: ``N + 1`` retailers, ``C = 1``, ``c_0 = 0`` and ``c_i = c``;
    retailer ``i`` holds one order of weight ``eps_w ** i``."""

    N: int = 200
    eps_w: float = 1e-3
    horizon: object = None  # cap on game time for policies that stall

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be at least 1")
        if not 0 < self.eps_w < 1:
            raise ValueError("eps_w must lie in (0, 1)")

    @property
    def constants(self):
        return solve_lower_bound_constants()

    @property
    def c(self) -> Fraction:
        return Fraction(self.constants[0])

    @property
    def sigma0(self) -> Fraction:
        return self.c ** 2

    @property
    def sigma(self) -> Fraction:
        return self.c ** 4

    @property
    def R(self) -> Fraction:
        return 2 + self.c

    def weight(self, i: int) -> Fraction:
        return Fraction(repr(self.eps_w)) ** i

    def instance(self) -> Instance:
        c = self.c
        retailers = tuple(Retailer(f"rho{i}", Fraction(0) if i == 0 else c) for i in range(self.N + 1))
        orders = tuple(Order(f"rho{i}", Fraction(0), LinearCost(self.weight(i)), f"pi{i}") for i in range(self.N + 1))
        return Instance(Fraction(1), retailers, orders, Variant.LINEAR)


@dataclass(frozen=True)
class AdversaryD:
    """Deadline game: ``C = 1``, ``c_0 = 0``, ``c_i = 1``; order ``i`` has deadline ``i``."""

    N: int = 100

    def __post_init__(self):
        if self.N < 1:
            raise ValueError("N must be at least 1")

    def instance(self) -> Instance:
        retailers = tuple(Retailer(f"rho{i}", 0 if i == 0 else 1) for i in range(self.N + 1))
        orders = tuple(Order(f"rho{i}", 0, DeadlineCost(i), f"pi{i}") for i in range(self.N + 1))
        return Instance(1, retailers, orders, Variant.DEADLINE)


def _index(order_id: str) -> int:
    return int(order_id[2:])


def adversary_single_phase_l(policy: OnlinePolicy, cfg: AdversaryL = AdversaryL()) -> GameTranscript:
    """Stop at the first shipment that serves two or more orders, serves ``pi_0``
    with waiting below ``sigma0``, or serves a later order with waiting below
    ``sigma``; otherwise the game ends when ``pi_N`` is served."""
    inst = cfg.instance()
    sigma0, sigma = cfg.sigma0, cfg.sigma
    pending = set(range(cfg.N + 1))
    state = {"reason": None, "omega": None, "monotone": True}

    def on_shipment(ev) -> bool:
        served = sorted(_index(k) for k in ev.served)
        if pending and min(pending) not in served:
            state["monotone"] = False
        pending.difference_update(served)
        if len(served) >= 2:
            state["reason"] = "batched"
            return True
        i = served[0]
        omega = cfg.weight(i) * ev.time
        state["omega"] = omega
        if omega < (sigma0 if i == 0 else sigma):
            state["reason"] = "cheap-first" if i == 0 else "cheap"
            return True
        if i == cfg.N:
            state["reason"] = "natural"
            return True
        return False

    horizon = INF if cfg.horizon is None else cfg.horizon
    tr = simulate(policy, inst, horizon, on_shipment)
    if state["reason"] is None:
        tr.stop_reason = "stalled"
        tr.theta = tr.events[-1].time if cfg.horizon is None and tr.events else (cfg.horizon or 0)
    else:
        tr.stop_reason = state["reason"]
    tr.normalized = state["monotone"]
    tr.alg = evaluate_horizon(inst, tr.schedule, tr.theta)
    tr.opt = opt_single_phase(inst, tr.theta)
    ratio = tr.ratio
    tr.extra = {
        "N": cfg.N,
        "eps_w": cfg.eps_w,
        "omega": state["omega"],
        "R": cfg.R,
        "slack": max(Fraction(0), cfg.R - ratio) if ratio != INF else Fraction(0),
    }
    return tr


def extrapolated_ratio_l(policy: OnlinePolicy, cfg: AdversaryL = AdversaryL()):
    """Marginal ratio ``(ALG(2N) - ALG(N)) / (OPT(2N) - OPT(N))``: the per-retailer
    rate at which the forced ratio converges as ``N`` grows."""
    a = adversary_single_phase_l(policy, cfg)
    b = adversary_single_phase_l(policy, AdversaryL(2 * cfg.N, cfg.eps_w, cfg.horizon))
    if a.stop_reason != "natural" or b.stop_reason != "natural":
        return min(a.ratio, b.ratio)
    return forced_ratio(b.alg.total - a.alg.total, b.opt - a.opt)


def adversary_single_phase_d(policy: OnlinePolicy, cfg: AdversaryD = AdversaryD()) -> GameTranscript:
    """Stop at the first shipment to two or more retailers; otherwise the game
    ends at the last deadline ``N``. A missed binding deadline forces an
    unbounded ratio."""
    inst = cfg.instance()
    state = {"reason": None}

    def on_shipment(ev) -> bool:
        if len(ev.retailers) >= 2:
            state["reason"] = "batched"
            return True
        return False

    tr = simulate(policy, inst, cfg.N, on_shipment)
    if state["reason"] is None:
        tr.theta = cfg.N
        tr.stop_reason = "natural"
    else:
        tr.stop_reason = "batched"
    tr.opt = opt_single_phase(inst, tr.theta)
    try:
        tr.alg = evaluate_horizon(inst, tr.schedule, tr.theta)
    except InfeasibleError:
        tr.alg = None
        tr.stop_reason = "missed-deadline"
    tr.extra = {"N": cfg.N}
    if tr.stop_reason == "batched":
        first = tr.events[-1]
        tr.extra["batch_time"] = first.time
        tr.extra["batch_size"] = len(first.retailers)
    return tr
