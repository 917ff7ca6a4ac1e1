"""Competitive ratios of online policies against the exact offline optimum."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from ..exact import OracleLimitError, solve_exact, solve_exact_jrpd
from ..model import Instance, Variant
from .engine import OnlinePolicy, forced_ratio, run_online


@dataclass
class CompetitiveStats:
    ratios: list = field(default_factory=list)
    skipped: list = field(default_factory=list)  # (index, reason)

    @property
    def max(self):
        return max(self.ratios) if self.ratios else None

    @property
    def mean(self):
        return float(np.mean([float(r) for r in self.ratios])) if self.ratios else None

    def quantiles(self, qs=(0.5, 0.9, 1.0)) -> dict:
        vals = np.array([float(r) for r in self.ratios])
        return {q: float(np.quantile(vals, q)) for q in qs} if len(vals) else {}


def offline_optimum(instance: Instance):
    solve = solve_exact_jrpd if instance.variant is Variant.DEADLINE else solve_exact
    return solve(instance)


def measure_competitive(policy: OnlinePolicy | Callable[[Instance], OnlinePolicy],
                        instances: Iterable[Instance]) -> CompetitiveStats:
    """Run the policy on each instance and divide by the exact optimum.

    ``policy`` may be a policy object or a factory called per instance (for
    policies that depend on the instance, like a replay). Instances beyond the
    oracle's grid limit are skipped and listed."""
    stats = CompetitiveStats()
    for i, inst in enumerate(instances):
        try:
            opt = offline_optimum(inst).cost.total
        except OracleLimitError as e:
            stats.skipped.append((i, str(e)))
            continue
        p = policy if hasattr(policy, "decide") else policy(inst)
        _, tr = run_online(p, inst)
        tr.opt = opt
        stats.ratios.append(forced_ratio(tr.alg.total, opt))
    return stats
