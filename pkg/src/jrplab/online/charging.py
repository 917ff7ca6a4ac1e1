"""Phase decomposition and the per-phase charging scheme for Algorithm G.

ALG shipments are indexed ``1..m`` at times ``t_1 <= ... <= t_m``; index 0 is
a free dummy shipment before everything (time ``-inf`` here, so adversary
shipments at time 0 count as lying after it). A new phase starts at ``j`` when
the adversary ships in ``(t_{j-1}, t_j]``.

Each phase ``[g, h]`` produces three kinds of charges:

* ``trigger``: ``c(chi_g)`` against the adversary's shipment to ``chi_g``;
* ``opening``: ``C + c(X_h)`` against the adversary's warehouse shipment in
  ``(t_{g-1}, t_g]``;
* ``link`` (``g <= j < h``): ``C + c(X_j) + c(chi_{j+1})`` against the adversary's
  shipments to the retailers of ``X_j`` and to ``chi_{j+1}``.

A retailer ``r`` shipped by ALG at ``t_j`` is matched to the adversary's latest
shipment to ``r`` in ``(t_{j'}, t_h]``, where ``j'`` is ALG's previous shipment
to ``r``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

from ..model import INF, Instance, Schedule, Shipment, serving_time
from ..serialize import num


class ChargingError(RuntimeError):
    """A charge found no adversary cost to land on, or landed on one twice."""


@dataclass(frozen=True)
class Charge:
    kind: str
    phase: tuple
    alg_cost: object
    adv_items: tuple  # ("W", k) warehouse of adversary shipment k, ("R", k, r) retailer r in it
    adv_cost: object

    @property
    def ratio(self):
        if self.adv_cost == 0:
            return 1 if self.alg_cost == 0 else INF
        return self.alg_cost / self.adv_cost

    def to_dict(self) -> dict:
        return {"kind": self.kind, "phase": list(self.phase), "alg_cost": num(self.alg_cost),
                "adv_cost": num(self.adv_cost), "ratio": num(self.ratio),
                "adv_items": [list(i) for i in self.adv_items]}


@dataclass
class ChargingReport:
    phases: list
    charges: list = field(default_factory=list)

    @property
    def max_ratio(self):
        return max((c.ratio for c in self.charges), default=1)

    @property
    def injective(self) -> bool:
        items = [i for c in self.charges for i in c.adv_items]
        return len(items) == len(set(items))


def _alg_shipments(alg) -> list:
    """ALG shipments in order, with the trigger retailer when recorded."""
    if isinstance(alg, Schedule):
        return [(s.time, s.retailers, None) for s in alg.shipments]
    return [(e.time, frozenset(e.retailers), e.trigger) for e in alg.events]


def phase_decomposition(alg, adversary: Schedule) -> list:
    """Maximal runs ``[g, h]`` (1-based) of ALG shipments with no adversary
    shipment in ``(t_g, t_h]``."""
    ships = _alg_shipments(alg)
    adv_times = sorted(s.time for s in adversary.shipments)
    phases = []
    prev = -INF
    for j, (t, _, _) in enumerate(ships, start=1):
        opens = j == 1 or any(prev < a <= t for a in adv_times)
        if opens:
            phases.append([j, j])
        else:
            phases[-1][1] = j
        prev = t
    return [tuple(p) for p in phases]


def normalize_to_deadlines(instance: Instance, schedule: Schedule) -> Schedule:
    """Move every adversary shipment to the earliest deadline among the orders it
    serves and drop retailers it serves nothing for. Cost never increases and
    the schedule stays feasible; afterwards shipments sit at deadlines only."""
    times: dict = {}
    for s in schedule.shipments:
        for r in s.retailers:
            times.setdefault(r, []).append(s.time)
    served: dict = {}
    for o in instance.orders:
        t = serving_time(o, times.get(o.retailer, ()))
        if t is None:
            continue
        key = (t, o.retailer)
        served.setdefault(key, []).append(o)
    out = []
    for s in schedule.shipments:
        members = {r: served[(s.time, r)] for r in s.retailers if (s.time, r) in served}
        if not members:
            continue
        t = min(o.deadline for os_ in members.values() for o in os_)
        out.append(Shipment(t, frozenset(members)))
    return Schedule(tuple(out))


def _triggers(instance: Instance, ships: list) -> list:
    """Trigger per ALG shipment: the recorded one, else the member whose earliest
    pending deadline equals the shipment time."""
    out = []
    last: dict = {}
    for t, batch, trig in ships:
        if trig is None:
            best = None
            for r in sorted(batch):
                prev = last.get(r, -INF)
                dl = min((o.deadline for o in instance.orders
                          if o.retailer == r and prev < o.arrival <= t), default=INF)
                if dl == t and best is None:
                    best = r
            trig = best if best is not None else min(batch)
        out.append(trig)
        for r in batch:
            last[r] = t
    return out


def charging_ratio(alg, adversary: Schedule, instance: Instance | None = None, normalize: bool = True) -> ChargingReport:
    """Charge ALG's shipping cost to the adversary's, phase by phase.

    ``alg`` is an Algorithm G transcript (or its schedule together with
    ``instance``). Raises :class:`ChargingError` when a charge has no matching
    adversary cost or two charges share one."""
    inst = instance if instance is not None else alg.instance
    if normalize:
        adversary = normalize_to_deadlines(inst, adversary)
    ships = _alg_shipments(alg)
    triggers = _triggers(inst, ships)
    phases = phase_decomposition(alg, adversary)
    C, cost = inst.warehouse_cost, inst.retailer_cost
    adv = list(adversary.shipments)
    times = [t for t, _, _ in ships]

    def t_of(j):  # 1-based, 0 is the dummy
        return -INF if j == 0 else times[j - 1]

    def prev_ship(r, j):
        for k in range(j - 1, 0, -1):
            if r in ships[k - 1][1]:
                return k
        return 0

    def retailer_item(r, j, h):
        lo, hi = t_of(prev_ship(r, j)), t_of(h)
        found = [k for k, s in enumerate(adv) if r in s.retailers and lo < s.time <= hi]
        if not found:
            raise ChargingError(f"no adversary shipment to {r} in ({lo}, {hi}] for ALG shipment {j}")
        return ("R", found[-1], r)

    report = ChargingReport(phases)
    for g, h in phases:
        X = {j: ships[j - 1][1] - {triggers[j - 1]} for j in range(g, h + 1)}
        chi_g = triggers[g - 1]
        item = retailer_item(chi_g, g, h)
        report.charges.append(Charge("trigger", (g, h), cost[chi_g], (item,), cost[chi_g]))

        lo, hi = t_of(g - 1), t_of(g)
        wh = [k for k, s in enumerate(adv) if lo < s.time <= hi]
        if not wh:
            raise ChargingError(f"no adversary warehouse shipment in ({lo}, {hi}] opening phase {(g, h)}")
        report.charges.append(Charge("opening", (g, h), C + sum((cost[r] for r in X[h]), 0), (("W", wh[-1]),), C))

        for j in range(g, h):
            chi_next = triggers[j]
            items = tuple(retailer_item(r, j, h) for r in sorted(X[j]))
            items += (retailer_item(chi_next, j + 1, h),)
            paid = sum((cost[r] for r in X[j]), 0) + cost[chi_next]
            report.charges.append(Charge("link", (g, h), C + paid, items, paid))

    if not report.injective:
        seen, dup = set(), None
        for c in report.charges:
            for i in c.adv_items:
                if i in seen:
                    dup = (c, i)
                seen.add(i)
        raise ChargingError(f"adversary cost item {dup[1]} charged twice (by {dup[0].kind} in phase {dup[0].phase})")
    return report


def trigger_structure_violations(alg, instance: Instance | None, adversary: Schedule, normalize: bool = True) -> list:
    """Within each phase, every non-initial trigger order must have been pending at
    the previous ALG shipment and be the earliest-deadline pending order outside
    the previous batch. Returns the ALG indices where that fails."""
    inst = instance if instance is not None else alg.instance
    if normalize:
        adversary = normalize_to_deadlines(inst, adversary)
    ships = _alg_shipments(alg)
    triggers = _triggers(inst, ships)
    bad = []
    for g, h in phase_decomposition(alg, adversary):
        for j in range(g + 1, h + 1):
            t_prev, batch_prev = ships[j - 2][0], ships[j - 2][1]
            pend = _pending_at(inst, ships[: j - 2], t_prev)
            outside = [o for o in pend if o.retailer not in batch_prev]
            trig = triggers[j - 1]
            t_j = ships[j - 1][0]
            trig_orders = [o for o in outside if o.retailer == trig and o.deadline == t_j]
            if not trig_orders or min(o.deadline for o in outside) != t_j:
                bad.append(j)
    return bad


def _pending_at(inst: Instance, earlier: list, t) -> list:
    """Orders arrived by ``t`` and not served by the shipments in ``earlier``."""
    last: dict = {}
    for s_t, batch, _ in earlier:
        for r in batch:
            last[r] = s_t
    return [o for o in inst.orders if o.arrival <= t and last.get(o.retailer, -INF) < o.arrival]
