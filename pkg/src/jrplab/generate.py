"""Seeded random instance generation."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DeadlineCost, Instance, LinearCost, Order, Retailer, StepCost, Variant


@dataclass(frozen=True)
class GenSpec:
    variant: str = "general"
    retailers: int = 3
    orders: int = 8
    C: float = 1.0
    c_min: float = 0.25
    c_max: float = 1.5
    horizon: float = 8.0
    slack_min: float = 0.0
    slack_max: float = 3.0
    # quantization step for times and costs; None draws continuous values
    resolution: float | None = 0.125
    distinct: bool = True
    seed: int = 0

    def __post_init__(self):
        Variant(self.variant)
        if self.retailers < 1 or self.orders < 1:
            raise ValueError("retailer and order counts must be at least 1")
        if not (0 <= self.c_min <= self.c_max) or self.C < 0:
            raise ValueError("cost ranges must be nonnegative and nonempty")
        if self.horizon <= 0 or not (0 <= self.slack_min <= self.slack_max):
            raise ValueError("time ranges must be nonempty")
        if self.resolution is not None and self.resolution <= 0:
            raise ValueError("resolution must be positive")


def _q(x, res):
    return float(x) if res is None else float(np.round(x / res) * res)


def _arrivals(spec: GenSpec, rng) -> list:
    res = spec.resolution
    if res is None:
        return sorted(float(v) for v in rng.uniform(0.0, spec.horizon, spec.orders))
    grid = np.arange(0.0, spec.horizon, res)
    if spec.distinct:
        if len(grid) < spec.orders:
            raise ValueError("horizon/resolution too coarse for distinct arrivals")
        pick = rng.choice(len(grid), size=spec.orders, replace=False)
    else:
        pick = rng.integers(0, len(grid), size=spec.orders)
    return sorted(float(grid[i]) for i in pick)


def generate(spec: GenSpec) -> Instance:
    """Deterministic for a fixed GenSpec (including its seed).

    Arrivals are uniform on ``[0, horizon)``; with a resolution they are distinct
    grid points, without one they are continuous (hence distinct almost surely).
    Linear instances use unit weights; general instances mix weighted linear,
    step and deadline costs."""
    rng = np.random.default_rng(spec.seed)
    res = spec.resolution
    retailers = tuple(
        Retailer(f"r{i}", _q(rng.uniform(spec.c_min, spec.c_max), res)) for i in range(spec.retailers)
    )
    arrivals = _arrivals(spec, rng)
    owners = rng.integers(0, spec.retailers, size=spec.orders)
    orders = []
    for i, (a, who) in enumerate(zip(arrivals, owners)):
        if spec.variant == "linear":
            cost = LinearCost(1.0)
        elif spec.variant == "deadline":
            cost = DeadlineCost(a + _q(rng.uniform(spec.slack_min, spec.slack_max), res))
        else:
            kind = rng.integers(0, 3)
            if kind == 0:
                cost = LinearCost(max(_q(rng.uniform(0.25, 2.0), res), res or 0.25))
            elif kind == 1:
                gap = max(_q(rng.uniform(spec.slack_min, spec.slack_max), res), res or 0.0)
                cost = StepCost(((a + gap, _q(rng.uniform(0.5, 2.0), res)),
                                 (a + 2 * gap, _q(rng.uniform(2.0, 4.0), res))))
            else:
                cost = DeadlineCost(a + _q(rng.uniform(spec.slack_min, spec.slack_max), res))
        orders.append(Order(f"r{int(who)}", a, cost, f"o{i}"))
    return Instance(spec.C, retailers, tuple(orders), Variant(spec.variant))


def rounding_battery_spec(seed: int = 0) -> GenSpec:
    """Linear family on an 8-point grid whose LP optimum is often fractional."""
    return GenSpec(variant="linear", retailers=5, orders=20, C=2.0, c_min=0.5, c_max=1.0,
                   horizon=4.0, resolution=0.5, distinct=False, seed=seed)


def fractional_battery(count: int, base: GenSpec | None = None, events: int | None = 8,
                       max_seeds: int = 10_000) -> list:
    """The first ``count`` instances, scanning seeds upward from ``base.seed``,
    that have exactly ``events`` event times and a non-integral LP optimum.

    Random instances of this size almost always have integral LP optima, on
    which every rounding reproduces the LP schedule; this filter keeps the
    ones where rounding actually has work to do. Returns ``(seed, instance)``."""
    from dataclasses import replace

    from .lp import build_lp, solve_lp
    from .model import event_times

    base = base or rounding_battery_spec()
    out = []
    for seed in range(base.seed, base.seed + max_seeds):
        inst = generate(replace(base, seed=seed))
        if events is not None and len(event_times(inst)) != events:
            continue
        model = build_lp(inst)
        # cheap float screen, then confirm in exact arithmetic
        rough = solve_lp(model, mode="float")
        if all(abs(v - round(v)) <= 1e-7 for v in rough.x.values()):
            continue
        if any(v.denominator != 1 for v in solve_lp(model).x.values()):
            out.append((seed, inst))
            if len(out) == count:
                return out
    raise ValueError(f"only {len(out)} fractional instances among {max_seeds} seeds")
