"""JSON interchange for instances, schedules and fractional solutions."""
from __future__ import annotations

import json
import math
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

from .model import (
    DeadlineCost,
    Instance,
    LinearCost,
    Order,
    Retailer,
    Schedule,
    Shipment,
    StepCost,
)


def num(x):
    """JSON-friendly number. Huge rationals (beyond float range) become strings."""
    if isinstance(x, Fraction):
        try:
            return float(x)
        except OverflowError:
            return f"{Decimal(x.numerator) / Decimal(x.denominator):.12e}"
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def waiting_to_dict(cost) -> dict:
    if isinstance(cost, LinearCost):
        return {"kind": "linear", "weight": num(cost.weight)}
    if isinstance(cost, DeadlineCost):
        return {"kind": "deadline", "deadline": num(cost.deadline)}
    if isinstance(cost, StepCost):
        return {"kind": "step", "breakpoints": [[num(t), num(v)] for t, v in cost.breakpoints]}
    raise TypeError(f"unknown waiting cost {cost!r}")


def waiting_from_dict(d: dict):
    kind = d.get("kind")
    if kind == "linear":
        return LinearCost(float(d.get("weight", 1.0)))
    if kind == "deadline":
        return DeadlineCost(float(d["deadline"]))
    if kind == "step":
        return StepCost(tuple((float(t), float(v)) for t, v in d["breakpoints"]))
    raise ValueError(f"unknown waiting kind {kind!r}")


def instance_to_dict(inst: Instance) -> dict:
    return {
        "C": num(inst.warehouse_cost),
        "variant": inst.variant.value,
        "retailers": [{"id": r.id, "c": num(r.cost)} for r in inst.retailers],
        "orders": [
            {"id": o.id, "retailer": o.retailer, "arrival": num(o.arrival), "waiting": waiting_to_dict(o.cost)}
            for o in inst.orders
        ],
    }


def instance_from_dict(d: dict) -> Instance:
    try:
        retailers = tuple(Retailer(str(r["id"]), float(r["c"])) for r in d["retailers"])
        orders = tuple(
            Order(str(o["retailer"]), float(o["arrival"]), waiting_from_dict(o.get("waiting", {"kind": "linear"})),
                  str(o.get("id", "")))
            for o in d["orders"]
        )
        return Instance(float(d["C"]), retailers, orders, d.get("variant"))
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed instance: {e}") from e


def schedule_to_dict(schedule: Schedule) -> dict:
    return {"shipments": [{"t": num(s.time), "retailers": sorted(s.retailers)} for s in schedule.shipments]}


def schedule_from_dict(d: dict) -> Schedule:
    try:
        return Schedule(tuple(Shipment(float(s["t"]), frozenset(map(str, s["retailers"]))) for s in d["shipments"]))
    except (KeyError, TypeError) as e:
        raise ValueError(f"malformed schedule: {e}") from e


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def write_json(obj, path) -> None:
    Path(path).write_text(dumps(obj))


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise ValueError(f"{path}: invalid JSON ({e})") from e


def load_instance(path) -> Instance:
    return instance_from_dict(read_json(path))


def load_schedule(path) -> Schedule:
    return schedule_from_dict(read_json(path))
