"""Monte Carlo benchmark of the roundings against the LP and the exact optimum."""
from __future__ import annotations

import csv
import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .exact import OracleLimitError, solve_exact
from .lp import FractionalSolution, build_lp, solve_lp
from .model import InfeasibleError, Instance, evaluate
from .pace import MixtureParams
from .rounding import ALGORITHMS, rounding_for

COMPONENTS = ("warehouse_ship", "retailer_ship", "waiting", "total")


@dataclass(frozen=True)
class ComponentStats:
    """Per-trial cost samples of one rounding on one solution; shape ``(trials, 4)``."""
    samples: np.ndarray

    @property
    def mean(self) -> np.ndarray:
        return self.samples.mean(axis=0)

    @property
    def se(self) -> np.ndarray:
        n = len(self.samples)
        if n < 2:
            return np.zeros(self.samples.shape[1])
        return self.samples.std(axis=0, ddof=1) / np.sqrt(n)


def monte_carlo(sol: FractionalSolution, rounding, trials: int, seed: int = 0) -> ComponentStats:
    """Cost components of ``rounding(sol, seed + i)`` for ``i < trials``."""
    out = np.empty((trials, 4))
    for i in range(trials):
        cb = evaluate(sol.instance, rounding(sol, seed + i))
        out[i] = (cb.warehouse_ship, cb.retailer_ship, cb.waiting, cb.total)
    return ComponentStats(out)


def worker_count() -> int:
    """Parallelism cap from ``JRP_THREADS`` (default 1: run in-process)."""
    try:
        return max(1, int(os.environ.get("JRP_THREADS", "1")))
    except ValueError:
        return 1


@dataclass
class Report:
    rows: list = field(default_factory=list)  # one dict per (instance, algorithm, component)
    failures: list = field(default_factory=list)  # (instance label, message)

    COLUMNS = ("instance", "algorithm", "trials", "component", "lp", "exact", "mean", "se",
               "ratio_lp", "ratio_lp_se", "ratio_exact")

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.DictWriter(buf, fieldnames=self.COLUMNS, lineterminator="\n")
        w.writeheader()
        for row in self.rows:
            w.writerow({k: _fmt(row[k]) for k in self.COLUMNS})
        return buf.getvalue()

    def to_text(self) -> str:
        lines = [f"{'instance':<12}{'algorithm':<10}{'component':<16}{'mean/LP':>10}{'+-se':>10}{'mean/OPT':>10}"]
        for row in self.rows:
            lines.append(f"{row['instance']:<12}{row['algorithm']:<10}{row['component']:<16}"
                         f"{_fmt(row['ratio_lp']):>10}{_fmt(row['ratio_lp_se']):>10}{_fmt(row['ratio_exact']):>10}")
        for label, msg in self.failures:
            lines.append(f"{label}: FAILED {msg}")
        return "\n".join(lines) + "\n"

    def worst(self, algorithm: str, component: str) -> tuple:
        """Largest ``(ratio_lp, ratio_lp_se)`` over instances for one column."""
        rows = [r for r in self.rows if r["algorithm"] == algorithm and r["component"] == component
                and r["ratio_lp"] is not None]
        return max(((r["ratio_lp"], r["ratio_lp_se"]) for r in rows), default=(None, None))


def _fmt(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return v


def _bench_one(args):
    label, inst, algorithms, trials, seed, params = args
    rows = []
    sol = solve_lp(build_lp(inst))
    lp = sol.cost_breakdown()
    lp_vals = (lp.warehouse_ship, lp.retailer_ship, lp.waiting, lp.total)
    try:
        ex = solve_exact(inst).cost
        ex_vals = (ex.warehouse_ship, ex.retailer_ship, ex.waiting, ex.total)
    except OracleLimitError:
        ex_vals = None
    for alg in algorithms:
        st = monte_carlo(sol, rounding_for(alg, params, 1 / 3 if alg == "1srp" else None), trials, seed)
        mean, se = st.mean, st.se
        for k, comp in enumerate(COMPONENTS):
            base = float(lp_vals[k])
            rows.append({
                "instance": label, "algorithm": alg, "trials": trials, "component": comp,
                "lp": base, "exact": None if ex_vals is None else float(ex_vals[k]),
                "mean": float(mean[k]), "se": float(se[k]),
                "ratio_lp": float(mean[k] / base) if base > 0 else None,
                "ratio_lp_se": float(se[k] / base) if base > 0 else None,
                "ratio_exact": float(mean[k] / ex_vals[3]) if ex_vals is not None and comp == "total" else None,
            })
    return rows


def bench(instances, algorithms=ALGORITHMS, trials: int = 1000, seed: int = 0,
          params: MixtureParams | None = None, labels=None) -> Report:
    """Every algorithm on every instance. 1SRP runs at ``c = 1/3``; the mixtures
    use ``params``. Per-instance failures are recorded, not raised."""
    params = params or MixtureParams()
    labels = list(labels) if labels is not None else [f"i{k}" for k in range(len(instances))]
    jobs = [(lab, inst, tuple(algorithms), trials, seed, params) for lab, inst in zip(labels, instances)]
    report = Report()
    workers = min(worker_count(), len(jobs)) or 1
    if workers > 1:
        with ProcessPoolExecutor(workers) as pool:
            results = list(pool.map(_safe, jobs))
    else:
        results = [_safe(j) for j in jobs]
    for (label, *_), res in zip(jobs, results):
        if isinstance(res, str):
            report.failures.append((label, res))
        else:
            report.rows.extend(res)
    return report


def _safe(job):
    try:
        return _bench_one(job)
    except (InfeasibleError, ValueError) as e:
        return f"{type(e).__name__}: {e}"


def battery_instances(count: int = 20) -> list[Instance]:
    from .generate import fractional_battery

    return [inst for _, inst in fractional_battery(count)]
