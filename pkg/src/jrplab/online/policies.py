"""Deterministic online policies and the battery registry."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

from ..model import INF, Instance, LinearCost, Schedule, StepCost
from .engine import Decision, View

_FLOAT_SLACK = 1e-12


def _reached(value, target) -> bool:
    if isinstance(value, Fraction) and isinstance(target, (Fraction, int)):
        return value >= target
    return value >= target - _FLOAT_SLACK * max(1.0, abs(float(target)))


def time_to_reach(orders, target, now):
    """Earliest ``t >= now`` at which the summed waiting cost of ``orders`` reaches
    ``target``; None if it never does. Deadline orders contribute zero."""
    def total(t):
        return sum((o.h(t) for o in orders if not o.deadline < INF), 0 * t)

    slope = sum((o.cost.weight for o in orders if isinstance(o.cost, LinearCost)), 0)
    steps = sorted({bt for o in orders if isinstance(o.cost, StepCost) for bt, _ in o.cost.breakpoints if bt > now})
    start = now
    for nxt in steps + [None]:
        v = total(start)
        if _reached(v, target):
            return start
        if slope > 0:
            t = start + (target - v) / slope
            if nxt is None or t < nxt:
                return t
        if nxt is None:
            return None
        start = nxt
    return None


def _due(view: View, level_of) -> dict:
    """Retailer -> earliest time it must ship (deadline or waiting level)."""
    out = {}
    for r in view.pending_retailers:
        d = view.earliest_deadline(r)
        lvl = level_of(r)
        w = time_to_reach(view.pending[r], lvl, view.now) if lvl is not None else None
        out[r] = min(d, w) if w is not None else d
    return out


@dataclass(frozen=True)
class Immediate:
    """Ship every retailer with a pending order as soon as anything arrives."""
    name: str = "immediate"

    def decide(self, view: View) -> Decision:
        rs = view.pending_retailers
        return Decision((frozenset(rs),) if rs else ())


@dataclass(frozen=True)
class WaitingThreshold:
    """Ship a retailer once its pending waiting cost reaches its level, or at its
    earliest deadline. ``group`` ships every pending retailer together whenever
    some retailer is due; otherwise each due retailer ships alone."""

    levels: Callable[[str], object] | None = None  # None: rent-or-buy level C + c_r
    group: bool = False
    name: str = "solo"

    def _level(self, view):
        if self.levels is None:
            return lambda r: view.C + view.retailer_cost[r]
        return self.levels

    def decide(self, view: View) -> Decision:
        due = _due(view, self._level(view))
        now_due = sorted(r for r, t in due.items() if t <= view.now)
        later = [t for t in due.values() if t > view.now]
        wake = min(later) if later else None
        if not now_due:
            return Decision((), wake)
        if self.group:
            rs = view.pending_retailers
            return Decision((frozenset(rs),), None)
        # the retailers left pending keep their own due times
        rest = [t for r, t in due.items() if r not in now_due and t > view.now]
        return Decision(tuple(frozenset([r]) for r in now_due), min(rest) if rest else None)


def solo() -> WaitingThreshold:
    """Rent-or-buy per retailer (level ``C + c_r``), shipping alone; meets deadlines alone."""
    return WaitingThreshold(name="solo")


def waiting_threshold(levels: dict, default=None, group: bool = False, name: str = "threshold") -> WaitingThreshold:
    """Per-retailer waiting levels from a dict (``default`` for unlisted retailers)."""
    table = dict(levels)
    return WaitingThreshold(lambda r: table.get(r, default), group, name)


@dataclass(frozen=True)
class ThresholdBalance:
    """Ship when the pooled pending waiting cost reaches ``C`` or a deadline falls due.

    The batch holds every pending retailer whose own waiting has reached its
    cost ``c_r`` plus every retailer at its deadline; if that is empty, the
    retailer with the largest waiting cost ships (ties by id)."""
    name: str = "threshold-balance"

    def decide(self, view: View) -> Decision:
        rs = view.pending_retailers
        if not rs:
            return Decision()
        all_pending = [o for r in rs for o in view.pending[r]]
        pooled_at = time_to_reach(all_pending, view.C, view.now)
        deadlines = {r: view.earliest_deadline(r) for r in rs}
        fire = (pooled_at is not None and pooled_at <= view.now) or any(d <= view.now for d in deadlines.values())
        if not fire:
            cands = [t for t in [pooled_at, *deadlines.values()] if t is not None and t > view.now]
            return Decision((), min(cands) if cands else None)
        batch = {r for r in rs if deadlines[r] <= view.now or _reached(view.waiting(r), view.retailer_cost[r])}
        rest = [r for r in rs if r not in batch]
        # keep the leftover pooled waiting below C so the next crossing lies strictly ahead
        while rest and (not batch or _reached(sum((view.waiting(r) for r in rest), 0 * view.now), view.C)):
            top = max(rest, key=view.waiting)
            batch.add(top)
            rest.remove(top)
        left = [o for r in rest for o in view.pending[r]]
        cands = [deadlines[r] for r in rest if deadlines[r] < INF]
        t = time_to_reach(left, view.C, view.now) if left else None
        if t is not None:
            cands.append(t)
        return Decision((frozenset(batch),), min(cands) if cands else None)


@dataclass(frozen=True)
class AlgorithmG:
    """Deadline batching: at a retailer's earliest pending deadline, ship it together
    with the longest prefix of the other pending retailers, by increasing deadline,
    whose summed costs stay within ``C``."""
    name: str = "algorithm-g"

    def decide(self, view: View) -> Decision:
        dl = {r: view.earliest_deadline(r) for r in view.pending_retailers}
        batches, triggers = [], []
        shipped: set = set()
        while True:
            due = sorted((d, r) for r, d in dl.items() if r not in shipped and d <= view.now)
            if not due:
                break
            trigger = due[0][1]
            others = sorted((d, r) for r, d in dl.items() if r not in shipped and r != trigger)
            extra, spent = [], 0
            for _, r in others:
                c = view.retailer_cost[r]
                if spent + c > view.C:
                    break
                extra.append(r)
                spent = spent + c
            batch = frozenset([trigger, *extra])
            batches.append(batch)
            triggers.append(trigger)
            shipped |= batch
        later = [d for r, d in dl.items() if r not in shipped and d < INF]
        return Decision(tuple(batches), min(later) if later else None, tuple(triggers))


def algorithm_g() -> AlgorithmG:
    return AlgorithmG()


@dataclass(frozen=True)
class Replay:
    """Replays a fixed schedule, skipping retailers with nothing pending."""
    schedule: Schedule
    name: str = "replay"
    times: tuple = field(init=False, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(sorted({s.time for s in self.schedule.shipments})))

    def decide(self, view: View) -> Decision:
        batches, used = [], set()
        for s in self.schedule.shipments:
            if s.time == view.now:
                b = frozenset(r for r in s.retailers if view.pending.get(r) and r not in used)
                if b:
                    batches.append(b)
                    used |= b
        later = [t for t in self.times if t > view.now]
        return Decision(tuple(batches), later[0] if later else None)


def replay_optimal(instance: Instance) -> Replay:
    from ..exact import solve_exact, solve_exact_jrpd
    from ..model import Variant

    solve = solve_exact_jrpd if instance.variant is Variant.DEADLINE else solve_exact
    return Replay(solve(instance).schedule, name="replay-opt")


BATTERY = {
    "immediate": Immediate,
    "solo": solo,
    "threshold-balance": ThresholdBalance,
    "algorithm-g": algorithm_g,
}


def policy_by_name(name: str, instance: Instance | None = None):
    if name == "replay-opt":
        if instance is None:
            raise ValueError("replay-opt needs the instance")
        return replay_optimal(instance)
    try:
        return BATTERY[name]()
    except KeyError:
        raise ValueError(f"unknown policy {name!r}; expected one of {', '.join([*BATTERY, 'replay-opt'])}") from None
