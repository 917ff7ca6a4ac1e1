"""Event-driven simulation of an online policy.

The engine advances through arrivals, deadlines of pending orders and the
policy's own wake-up times. At each event it reveals newly arrived orders and
asks the policy for a :class:`Decision`. Each batch in the decision becomes one
shipment at the current time and serves every pending order of its retailers.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Protocol

from ..model import INF, CostBreakdown, Instance, Order, Schedule, Shipment, evaluate, evaluate_horizon
from ..serialize import num


class ProtocolError(RuntimeError):
    """The policy broke the engine contract."""


@dataclass(frozen=True)
class View:
    """What a policy may see: costs, the current time, revealed orders and its own past."""

    now: object
    C: object
    retailer_cost: dict
    revealed: tuple
    pending: dict  # retailer -> tuple of pending orders, by arrival
    shipments: tuple

    def waiting(self, retailer: str, t=None):
        t = self.now if t is None else t
        return sum((o.h(t) for o in self.pending.get(retailer, ())), 0 * t)

    def earliest_deadline(self, retailer: str):
        return min((o.deadline for o in self.pending.get(retailer, ())), default=INF)

    @property
    def pending_retailers(self) -> list:
        return sorted(r for r, orders in self.pending.items() if orders)


@dataclass(frozen=True)
class Decision:
    batches: tuple = ()
    wake: object = None
    # optional per-batch trigger retailer, for transcripts
    triggers: tuple = ()


class OnlinePolicy(Protocol):
    name: str

    def decide(self, view: View) -> Decision: ...


@dataclass(frozen=True)
class Event:
    time: object
    retailers: tuple
    served: tuple  # order ids
    trigger: str | None = None

    def to_dict(self) -> dict:
        d = {"t": num(self.time), "retailers": list(self.retailers), "served": list(self.served)}
        if self.trigger is not None:
            d["trigger"] = self.trigger
        return d


@dataclass
class GameTranscript:
    policy: str
    instance: Instance
    events: list = field(default_factory=list)
    theta: object = INF
    alg: CostBreakdown | None = None
    opt: object = None
    stop_reason: str = "end"
    normalized: bool = True
    extra: dict = field(default_factory=dict)

    @property
    def schedule(self) -> Schedule:
        return Schedule(tuple(Shipment(e.time, frozenset(e.retailers)) for e in self.events))

    @property
    def ratio(self):
        if self.alg is None:
            return INF
        return forced_ratio(self.alg.total, self.opt)

    def to_dict(self) -> dict:
        return {
            "policy": self.policy,
            "events": [e.to_dict() for e in self.events],
            "theta": num(self.theta),
            "alg": None if self.alg is None else {k: num(v) for k, v in _components(self.alg).items()},
            "opt": None if self.opt is None else num(self.opt),
            "ratio": num(self.ratio),
            "stop_reason": self.stop_reason,
            "normalized": self.normalized,
            **{k: num(v) if not isinstance(v, (str, bool, list, dict)) else v for k, v in self.extra.items()},
        }


def _components(cb: CostBreakdown) -> dict:
    return {"warehouse_ship": cb.warehouse_ship, "retailer_ship": cb.retailer_ship,
            "waiting": cb.waiting, "total": cb.total}


def forced_ratio(alg, opt):
    """``alg / opt`` with ``x/0 = inf`` for positive ``x`` and ``0/0 = 1``."""
    if opt is None:
        return INF
    if opt == 0:
        return 1 if alg == 0 else INF
    if alg == INF:
        return INF
    return alg / opt


def _check(decision, view: View):
    if not isinstance(decision, Decision):
        raise ProtocolError(f"policy returned {type(decision).__name__}, expected Decision")
    seen = set()
    for batch in decision.batches:
        if not batch:
            raise ProtocolError(f"empty batch at t={view.now}")
        for r in batch:
            if r not in view.retailer_cost:
                raise ProtocolError(f"batch at t={view.now} names unknown retailer {r!r}")
            if r in seen or not view.pending.get(r):
                raise ProtocolError(f"batch at t={view.now} ships to retailer {r!r} with no pending order")
            seen.add(r)
    if decision.triggers and len(decision.triggers) != len(decision.batches):
        raise ProtocolError("triggers must align with batches")
    if decision.wake is not None and not decision.wake > view.now:
        raise ProtocolError(f"wake-up {decision.wake} is not after the current time {view.now}")


def simulate(policy: OnlinePolicy, instance: Instance, horizon=INF,
             on_shipment: Callable[[Event], bool] | None = None, max_steps: int = 1_000_000) -> GameTranscript:
    """Run the event loop without evaluating costs.

    ``on_shipment`` sees every shipment as it happens; returning True stops the
    game at that shipment (``theta`` = its time, later batches are dropped)."""
    orders = sorted(instance.orders, key=lambda o: (o.arrival, o.id))
    tr = GameTranscript(getattr(policy, "name", type(policy).__name__), instance)
    pending: dict[str, list[Order]] = {r: [] for r in instance.retailer_ids}
    revealed: list[Order] = []
    shipments: list[Shipment] = []
    nxt_arrival = 0
    wake = None
    now = None
    for _ in range(max_steps):
        cands = []
        if nxt_arrival < len(orders):
            cands.append(orders[nxt_arrival].arrival)
        cands += [o.deadline for ps in pending.values() for o in ps if o.deadline < INF and (now is None or o.deadline > now)]
        if wake is not None:
            cands.append(wake)
        if not cands:
            break
        t = min(cands)
        if t > horizon:
            break
        now = t
        while nxt_arrival < len(orders) and orders[nxt_arrival].arrival <= now:
            o = orders[nxt_arrival]
            revealed.append(o)
            pending[o.retailer].append(o)
            nxt_arrival += 1
        view = View(now, instance.warehouse_cost, instance.retailer_cost, tuple(revealed),
                    {r: tuple(ps) for r, ps in pending.items()}, tuple(shipments))
        decision = policy.decide(view)
        _check(decision, view)
        for i, batch in enumerate(decision.batches):
            served = tuple(o.id for r in sorted(batch) for o in pending[r])
            for r in batch:
                pending[r] = []
            trigger = decision.triggers[i] if decision.triggers else None
            ev = Event(now, tuple(sorted(batch)), served, trigger)
            tr.events.append(ev)
            shipments.append(Shipment(now, frozenset(batch)))
            if on_shipment is not None and on_shipment(ev):
                tr.theta = now
                tr.stop_reason = "stopped"
                return tr
        wake = decision.wake
    else:
        raise ProtocolError(f"no quiescence after {max_steps} events")
    if any(pending.values()):
        tr.stop_reason = "stalled"
    tr.theta = horizon
    return tr


def run_online(policy: OnlinePolicy, instance: Instance, horizon=INF) -> tuple[Schedule, GameTranscript]:
    """Simulate ``policy`` on ``instance`` and cost the resulting schedule.

    Raises :class:`~jrplab.model.InfeasibleError` if some order is left
    unserved (or, under a horizon, misses a binding deadline)."""
    tr = simulate(policy, instance, horizon)
    sched = tr.schedule
    tr.alg = evaluate(instance, sched) if horizon == INF else evaluate_horizon(instance, sched, horizon)
    return sched, tr
