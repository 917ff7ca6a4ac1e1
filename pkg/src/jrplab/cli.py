"""Command-line interface: ``jrplab <command> ...``.

Exit codes: 0 success, 1 infeasible or invalid input, 2 internal invariant
violation. All outputs are deterministic functions of the flags, the input
files and the seed.
"""
from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path

from . import serialize
from .exact import OracleLimitError, solve_exact
from .lp import LpCertificateError, build_lp, check_solution, solution_to_dict, solve_lp
from .model import InfeasibleError, evaluate, perturb
from .pace import MixtureParams, pace_table, ratio_report, solve_lower_bound_constants, xi, xi_numeric
from .rounding import ALGORITHMS, rounding_for
from .simplex import SimplexError

EXIT_OK, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _instance(args):
    inst = serialize.load_instance(args.instance)
    return perturb(inst) if args.perturb else inst


def _params(args) -> MixtureParams:
    d = MixtureParams()
    return MixtureParams(
        c=d.c if args.c is None else args.c,
        p=d.p if args.p is None else args.p,
        b=d.b if args.b is None else args.b,
        lam=d.lam if args.lam is None else args.lam,
    )


# -- commands ----------------------------------------------------------------

def cmd_gen(args):
    from .generate import GenSpec, generate

    spec = GenSpec(args.variant, args.retailers, args.orders, args.C, args.c_min, args.c_max, args.horizon,
                   args.slack_min, args.slack_max, None if args.resolution <= 0 else args.resolution,
                   not args.repeat_times, args.seed)
    inst = generate(spec)
    if args.perturb:
        inst = perturb(inst)
    _emit(serialize.dumps(serialize.instance_to_dict(inst)), args.out)


def cmd_solve_exact(args):
    inst = _instance(args)
    res = solve_exact(inst, args.limit, args.horizon)
    doc = serialize.schedule_to_dict(res.schedule)
    doc["cost"] = res.cost.as_dict()
    doc["nodes_explored"] = res.nodes_explored
    _emit(serialize.dumps(doc), args.out)


def cmd_solve_lp(args):
    inst = _instance(args)
    sol = solve_lp(build_lp(inst), args.mode)
    check_solution(sol, 0 if sol.exact else 1e-9)
    _emit(serialize.dumps(solution_to_dict(sol)), args.out)


def cmd_round(args):
    from .bench import monte_carlo

    inst = _instance(args)
    sol = solve_lp(build_lp(inst))
    if args.alg == "1srp":
        rounding = rounding_for("1srp", c=1 / 3 if args.c is None else args.c)
    else:
        rounding = rounding_for(args.alg, _params(args))
    if args.trials == 1:
        sched = rounding(sol, args.seed)
        doc = serialize.schedule_to_dict(sched)
        doc["cost"] = evaluate(inst, sched).as_dict()
    else:
        st = monte_carlo(sol, rounding, args.trials, args.seed)
        lp = sol.cost_breakdown().as_dict()
        doc = {"algorithm": args.alg, "trials": args.trials, "seed": args.seed, "lp": lp,
               "mean": dict(zip(lp, map(float, st.mean))), "se": dict(zip(lp, map(float, st.se)))}
    _emit(serialize.dumps(doc), args.out)


def cmd_bench(args):
    from .bench import battery_instances, bench

    if args.instances:
        insts = [serialize.load_instance(p) for p in args.instances]
        labels = [Path(p).stem for p in args.instances]
    else:
        insts = battery_instances(args.battery)
        labels = None
    if args.perturb:
        insts = [perturb(i) for i in insts]
    rep = bench(insts, args.algorithms, args.trials, args.seed, _params(args), labels)
    if args.csv:
        Path(args.csv).write_text(rep.to_csv())
    _emit(rep.to_text(), args.out)
    return EXIT_INPUT if rep.failures else EXIT_OK


def cmd_online(args):
    from .online import policy_by_name, run_online

    inst = _instance(args)
    _, tr = run_online(policy_by_name(args.policy, inst), inst)
    _emit(serialize.dumps(tr.to_dict()), args.out)


def cmd_adversary(args):
    from .online import (
        AdversaryD,
        AdversaryL,
        adversary_single_phase_d,
        adversary_single_phase_l,
        extrapolated_ratio_l,
        policy_by_name,
    )

    policy = policy_by_name(args.policy)
    if args.game == "jrpl":
        cfg = AdversaryL(args.N if args.N is not None else 200, args.eps_w)
        tr = adversary_single_phase_l(policy, cfg)
        doc = tr.to_dict()
        doc["extrapolated_ratio"] = serialize.num(extrapolated_ratio_l(policy, cfg)) if args.extrapolate else None
    else:
        tr = adversary_single_phase_d(policy, AdversaryD(args.N if args.N is not None else 100))
        doc = tr.to_dict()
    if not args.events:
        doc.pop("events")
    _emit(serialize.dumps(doc), args.out)


def cmd_pace_table(args):
    rows = pace_table(_params(args), args.step)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["z", "G_1SRP", "D", "G_combined"])
    for row in rows:
        w.writerow([f"{v:.6f}" for v in row])
    _emit(buf.getvalue(), args.out)


def cmd_constants(args):
    params = _params(args)
    c, s0, s, R = solve_lower_bound_constants()
    rep = ratio_report(params)
    lines = [
        f"c = {c:.12f}",
        f"sigma0 = {s0:.12f}",
        f"sigma = {s:.12f}",
        f"R_online = {R:.12f}",
        f"xi = {xi(params):.12f}",
        f"xi_numeric = {xi_numeric(params):.12f}",
        f"r1 = {rep.r1:.9f}",
        f"r2 = {rep.r2:.9f}",
        f"r3 = {rep.r3:.9f}",
        f"R1 = {rep.R1:.9f}",
        f"R2 = {rep.R2:.9f}",
        f"R = {rep.R:.9f}",
        f"q = {rep.q:.9f}",
    ]
    _emit("\n".join(lines) + "\n", args.out)


# -- parser ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="jrplab", description="Joint replenishment laboratory")
    ap.add_argument("--perturb", action="store_true", help="make event times distinct before running")
    sub = ap.add_subparsers(dest="command", required=True)

    def params(p):
        p.add_argument("--c", type=float, default=None)
        p.add_argument("--p", type=float, default=None)
        p.add_argument("--b", type=float, default=None)
        p.add_argument("--lambda", dest="lam", type=float, default=None)

    p = sub.add_parser("gen", help="generate a random instance")
    p.add_argument("--variant", choices=["general", "linear", "deadline"], default="general")
    p.add_argument("--retailers", type=int, default=3)
    p.add_argument("--orders", type=int, default=8)
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--c-min", type=float, default=0.25)
    p.add_argument("--c-max", type=float, default=1.5)
    p.add_argument("--horizon", type=float, default=8.0)
    p.add_argument("--slack-min", type=float, default=0.0)
    p.add_argument("--slack-max", type=float, default=3.0)
    p.add_argument("--resolution", type=float, default=0.125, help="time/cost grid; 0 for continuous")
    p.add_argument("--repeat-times", action="store_true", help="allow several orders per arrival time")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("solve-exact", help="exact optimum by subset enumeration")
    p.add_argument("--instance", required=True)
    p.add_argument("--horizon", type=float, default=None)
    p.add_argument("--limit", type=int, default=16)
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve_exact)

    p = sub.add_parser("solve-lp", help="solve the LP relaxation")
    p.add_argument("--instance", required=True)
    p.add_argument("--mode", choices=["exact", "float"], default="exact")
    p.add_argument("--out")
    p.set_defaults(func=cmd_solve_lp)

    p = sub.add_parser("round", help="round the LP solution")
    p.add_argument("--alg", choices=ALGORITHMS, required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=1)
    params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_round)

    p = sub.add_parser("bench", help="Monte Carlo ratio table")
    p.add_argument("--instances", nargs="*", help="instance files; default: the fractional battery")
    p.add_argument("--battery", type=int, default=20, help="battery size when no files are given")
    p.add_argument("--algorithms", nargs="+", choices=ALGORITHMS, default=list(ALGORITHMS))
    p.add_argument("--trials", type=int, default=1000)
    p.add_argument("--seed", type=int, default=0)
    params(p)
    p.add_argument("--csv")
    p.add_argument("--out")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("online", help="run an online policy")
    p.add_argument("--policy", required=True)
    p.add_argument("--instance", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_online)

    p = sub.add_parser("adversary", help="play a single-phase lower-bound game")
    p.add_argument("--game", choices=["jrpl", "jrpd"], required=True)
    p.add_argument("--policy", required=True)
    p.add_argument("--N", type=int, default=None)
    p.add_argument("--eps-w", type=float, default=1e-3)
    p.add_argument("--extrapolate", action="store_true", help="also play 2N and report the marginal ratio")
    p.add_argument("--events", action="store_true", help="include the shipment list")
    p.add_argument("--out")
    p.set_defaults(func=cmd_adversary)

    p = sub.add_parser("pace-table", help="CSV of the shipping paces")
    p.add_argument("--step", type=float, default=0.01)
    params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_pace_table)

    p = sub.add_parser("constants", help="print the analysis constants")
    params(p)
    p.add_argument("--out")
    p.set_defaults(func=cmd_constants)
    return ap


def main(argv=None) -> int:
    from .online import ChargingError, ProtocolError

    args = build_parser().parse_args(argv)
    try:
        rc = args.func(args)
        return EXIT_OK if rc is None else rc
    except (InfeasibleError, OracleLimitError, ValueError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except (AssertionError, LpCertificateError, SimplexError, ChargingError, ProtocolError) as e:
        print(f"internal invariant violated: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
