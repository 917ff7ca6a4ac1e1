"""Instances, schedules, waiting-cost functions and cost evaluation.

Times and costs are plain Python numbers. Floats are the default, but every
routine here also works on :class:`fractions.Fraction` values, which the
lower-bound games rely on (their times span hundreds of orders of magnitude).
"""
from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence, Union

INF = math.inf


class InfeasibleError(ValueError):
    """Raised when a schedule (or an instance) cannot serve some order."""

    def __init__(self, message: str, order_id: str | None = None):
        super().__init__(message)
        self.order_id = order_id


class Variant(str, enum.Enum):
    GENERAL = "general"
    LINEAR = "linear"
    DEADLINE = "deadline"


# -- waiting costs -----------------------------------------------------------

@dataclass(frozen=True)
class LinearCost:
    weight: float = 1.0

    def __post_init__(self):
        if self.weight < 0:
            raise ValueError("linear waiting weight must be nonnegative")

    def at(self, arrival, t):
        if t < arrival:
            return INF
        return self.weight * (t - arrival)


@dataclass(frozen=True)
class DeadlineCost:
    deadline: float

    def at(self, arrival, t):
        if t < arrival or t > self.deadline:
            return INF
        return 0


@dataclass(frozen=True)
class StepCost:
    """Piecewise-constant cost: ``h(t)`` is the cost of the last breakpoint at or
    before ``t`` (zero before the first one). Breakpoint times are absolute."""

    breakpoints: tuple = ()

    def __post_init__(self):
        bps = tuple((t, v) for t, v in self.breakpoints)
        object.__setattr__(self, "breakpoints", bps)
        times = [t for t, _ in bps]
        costs = [v for _, v in bps]
        if times != sorted(times):
            raise ValueError("step breakpoints must be sorted by time")
        if any(v < 0 for v in costs) or costs != sorted(costs):
            raise ValueError("step costs must be nonnegative and non-decreasing")

    def at(self, arrival, t):
        if t < arrival:
            return INF
        i = bisect.bisect_right([bt for bt, _ in self.breakpoints], t)
        return self.breakpoints[i - 1][1] if i else 0


WaitingCost = Union[LinearCost, DeadlineCost, StepCost]


# -- instance ----------------------------------------------------------------

@dataclass(frozen=True)
class Retailer:
    id: str
    cost: float

    def __post_init__(self):
        if self.cost < 0:
            raise ValueError(f"retailer {self.id!r} has negative cost")


@dataclass(frozen=True)
class Order:
    retailer: str
    arrival: float
    cost: WaitingCost = field(default_factory=LinearCost)
    id: str = ""

    def h(self, t):
        return self.cost.at(self.arrival, t)

    @property
    def deadline(self):
        """Deadline for deadline-kind orders, +inf otherwise."""
        if isinstance(self.cost, DeadlineCost):
            return self.cost.deadline
        return INF


def _infer_variant(orders: Sequence[Order]) -> Variant:
    if orders and all(isinstance(o.cost, LinearCost) for o in orders):
        return Variant.LINEAR
    if orders and all(isinstance(o.cost, DeadlineCost) for o in orders):
        return Variant.DEADLINE
    return Variant.GENERAL


@dataclass(frozen=True)
class Instance:
    warehouse_cost: float
    retailers: tuple[Retailer, ...]
    orders: tuple[Order, ...]
    variant: Variant = None  # type: ignore[assignment]

    def __post_init__(self):
        retailers = tuple(self.retailers)
        orders = []
        for i, o in enumerate(self.orders):
            if not o.id:
                o = Order(o.retailer, o.arrival, o.cost, id=f"o{i}")
            orders.append(o)
        object.__setattr__(self, "retailers", retailers)
        object.__setattr__(self, "orders", tuple(orders))
        if self.variant is None:
            object.__setattr__(self, "variant", _infer_variant(orders))
        else:
            object.__setattr__(self, "variant", Variant(self.variant))

        if self.warehouse_cost < 0:
            raise ValueError("warehouse cost must be nonnegative")
        ids = [r.id for r in retailers]
        if len(set(ids)) != len(ids):
            raise ValueError("retailer ids must be unique")
        known = set(ids)
        order_ids = set()
        for o in self.orders:
            if o.retailer not in known:
                raise ValueError(f"order {o.id} refers to unknown retailer {o.retailer!r}")
            if o.arrival < 0:
                raise ValueError(f"order {o.id} has negative arrival")
            if o.id in order_ids:
                raise ValueError(f"duplicate order id {o.id!r}")
            order_ids.add(o.id)
            if isinstance(o.cost, DeadlineCost) and o.cost.deadline < o.arrival:
                raise ValueError(f"order {o.id} has deadline before arrival")
        if self.variant is Variant.LINEAR and not all(isinstance(o.cost, LinearCost) for o in self.orders):
            raise ValueError("linear instance contains non-linear waiting costs")
        if self.variant is Variant.DEADLINE and not all(isinstance(o.cost, DeadlineCost) for o in self.orders):
            raise ValueError("deadline instance contains non-deadline waiting costs")

    @property
    def C(self):
        return self.warehouse_cost

    @cached_property
    def retailer_cost(self) -> dict[str, float]:
        return {r.id: r.cost for r in self.retailers}

    @cached_property
    def retailer_ids(self) -> tuple[str, ...]:
        return tuple(r.id for r in self.retailers)

    def orders_of(self, retailer: str) -> list[Order]:
        return [o for o in self.orders if o.retailer == retailer]


# -- schedules ---------------------------------------------------------------

@dataclass(frozen=True)
class Shipment:
    time: float
    retailers: frozenset

    def __post_init__(self):
        object.__setattr__(self, "retailers", frozenset(self.retailers))
        if not self.retailers:
            raise ValueError("a shipment must go to at least one retailer")


@dataclass(frozen=True)
class Schedule:
    shipments: tuple[Shipment, ...] = ()

    def __post_init__(self):
        ships = tuple(sorted(self.shipments, key=lambda s: (s.time, sorted(s.retailers))))
        object.__setattr__(self, "shipments", ships)

    @classmethod
    def from_pairs(cls, pairs: Iterable[tuple[Iterable[str], float]]) -> "Schedule":
        return cls(tuple(Shipment(t, frozenset(S)) for S, t in pairs))

    def __len__(self):
        return len(self.shipments)

    def times_for(self, retailer: str) -> list:
        return [s.time for s in self.shipments if retailer in s.retailers]


@dataclass(frozen=True)
class CostBreakdown:
    warehouse_ship: float
    retailer_ship: float
    waiting: float

    @property
    def total(self):
        return self.warehouse_ship + self.retailer_ship + self.waiting

    @property
    def shipping(self):
        return self.warehouse_ship + self.retailer_ship

    def as_dict(self) -> dict:
        return {
            "warehouse_ship": float(self.warehouse_ship),
            "retailer_ship": float(self.retailer_ship),
            "waiting": float(self.waiting),
            "total": float(self.total),
        }


# -- operations --------------------------------------------------------------

def event_times(instance: Instance) -> list:
    return sorted({o.arrival for o in instance.orders})


def waiting_cost_at(order: Order, t):
    return order.h(t)


def _shipping_costs(instance: Instance, schedule: Schedule):
    cost = instance.retailer_cost
    for s in schedule.shipments:
        for r in s.retailers:
            if r not in cost:
                raise ValueError(f"shipment at {s.time} names unknown retailer {r!r}")
    wship = len(schedule.shipments) * instance.warehouse_cost
    rship = sum((cost[r] for s in schedule.shipments for r in sorted(s.retailers)), 0)
    return wship, rship


def _ship_times(schedule: Schedule) -> dict[str, list]:
    times: dict[str, list] = {}
    for s in schedule.shipments:
        for r in s.retailers:
            times.setdefault(r, []).append(s.time)
    return times


def serving_time(order: Order, times: Sequence):
    """Earliest time in the sorted ``times`` at or after the order's arrival.

    With a non-decreasing waiting cost this is also the cost-minimizing
    eligible shipment (ties go to the earliest one)."""
    i = bisect.bisect_left(times, order.arrival)
    return times[i] if i < len(times) else None


def evaluate(instance: Instance, schedule: Schedule) -> CostBreakdown:
    wship, rship = _shipping_costs(instance, schedule)
    times = _ship_times(schedule)
    waiting = 0
    for o in instance.orders:
        t = serving_time(o, times.get(o.retailer, ()))
        if t is None:
            raise InfeasibleError(f"order {o.id} (retailer {o.retailer}) is never served", o.id)
        h = o.h(t)
        if h == INF:
            raise InfeasibleError(f"order {o.id} is served at {t} with infinite waiting cost", o.id)
        waiting += h
    return CostBreakdown(wship, rship, waiting)


def unserved_cost(order: Order, theta):
    """Cost charged to an order still pending when the game expires at ``theta``.

    Deadline orders follow the binding-deadline convention: a deadline at or
    before ``theta`` must have been met, a later one expires for free."""
    if order.arrival > theta:
        return 0
    if isinstance(order.cost, DeadlineCost):
        return INF if order.cost.deadline <= theta else 0
    return order.h(theta)


def evaluate_horizon(instance: Instance, schedule: Schedule, theta) -> CostBreakdown:
    if theta == INF:
        return evaluate(instance, schedule)
    for s in schedule.shipments:
        if s.time > theta:
            raise ValueError(f"shipment at {s.time} lies after the horizon {theta}")
    wship, rship = _shipping_costs(instance, schedule)
    times = _ship_times(schedule)
    waiting = 0
    for o in instance.orders:
        if o.arrival > theta:
            continue
        t = serving_time(o, times.get(o.retailer, ()))
        h = o.h(t) if t is not None else unserved_cost(o, theta)
        if h == INF:
            raise InfeasibleError(f"order {o.id} misses a binding deadline before {theta}", o.id)
        waiting += h
    return CostBreakdown(wship, rship, waiting)


def perturb(instance: Instance, eps: float = 1e-9) -> Instance:
    """Shift arrivals and deadlines by index-scaled multiples of ``eps``.

    Order ``i`` moves its arrival by ``i*eps`` and its deadline by
    ``(n+i)*eps``, so equal event times become distinct while every window
    keeps ``deadline >= arrival``."""
    n = len(instance.orders)
    orders = []
    for i, o in enumerate(instance.orders):
        cost = o.cost
        if isinstance(cost, DeadlineCost):
            cost = DeadlineCost(cost.deadline + (n + i) * eps)
        elif isinstance(cost, StepCost):
            cost = StepCost(tuple((t + i * eps, v) for t, v in cost.breakpoints))
        orders.append(Order(o.retailer, o.arrival + i * eps, cost, o.id))
    return Instance(instance.warehouse_cost, instance.retailers, tuple(orders), instance.variant)


def make_instance(C, retailers: dict[str, float], orders: Iterable[tuple], variant=None) -> Instance:
    """Shorthand: ``orders`` holds ``(retailer, arrival, cost)`` triples."""
    rs = tuple(Retailer(r, c) for r, c in retailers.items())
    os_ = tuple(Order(r, a, h) for r, a, h in orders)
    return Instance(C, rs, os_, variant)
