"""Command-line front end: solve one instance, generate instance files, or
run the benchmark grid and emit a table / CSV.

Exit codes for `solve`: 0 feasible, 1 infeasible or no integer solutions,
2 budget/timeout, 64 usage error, 65 bad instance data, 70 internal error.
`RELAXFEAS_THREADS` caps benchmark workers; timing columns are informative
only and never part of reproducibility checks.
"""

import argparse
import csv
import json
import math
import os
import sys as _sys
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .classical import RelaxConfig, relax_random_stats, relax_solve
from .dnc import DnCParams
from .ep import ApproxSolution, elementary_procedure, ep_threshold
from .errors import ParseError, RelaxfeasError
from .model import gen_random01, gen_wedge, read_instance, write_instance
from .oracle import _has_unit_box
from .solvers import (Decision, SolveReport, chubanov_relaxation, dnc_solve,
                      lfg, lfs_bounded, lfs_tu)

SCHEMA = "relaxfeas.report/1"
ALGOS = ("ep", "dnc", "lfs", "lfs-tu", "lfg", "chubanov", "relax", "relax-rand")
EXIT_FEASIBLE = 0
EXIT_INFEASIBLE = 1
EXIT_BUDGET = 2
EXIT_USAGE = 64
EXIT_DATA = 65
EXIT_IO = 66
EXIT_ERROR = 70


class UsageError(Exception):
    pass


def main(argv=None):
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else 0
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_USAGE
    except (ParseError, ValueError) as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_IO
    except RelaxfeasError as exc:
        print(f"error: {exc}", file=_sys.stderr)
        return EXIT_ERROR


def _build_parser():
    parser = argparse.ArgumentParser(prog="relaxfeas",
                                     description="linear feasibility solvers and benchmarks")
    sub = parser.add_subparsers(required=True)

    ps = sub.add_parser("solve", help="solve a single instance")
    ps.add_argument("--algo", required=True, choices=ALGOS)
    ps.add_argument("--instance", required=True)
    ps.add_argument("--radius", type=float, default=None,
                    help="containment radius (r* for chubanov, override for lfg)")
    ps.add_argument("--delta", type=float, default=None,
                    help="max subdeterminant bound (required for lfs)")
    ps.add_argument("--lambda", dest="lam", type=float, default=None,
                    help="step multiplier for relax*, box bound for lfs*")
    ps.add_argument("--eps", type=float, default=None)
    ps.add_argument("--theta", type=float, default=0.4)
    ps.add_argument("--seed", type=int, default=0)
    ps.add_argument("--budget", type=int, default=None)
    ps.add_argument("--timeout", type=float, default=600.0)
    ps.add_argument("--json", action="store_true")
    ps.set_defaults(func=cmd_solve)

    pg = sub.add_parser("gen", help="generate an instance file")
    pg.add_argument("--family", required=True, choices=("random01", "wedge"))
    pg.add_argument("--n", type=int, default=4)
    pg.add_argument("--alpha", type=int, default=1)
    pg.add_argument("--seed", type=int, default=0)
    pg.add_argument("--out", required=True)
    pg.set_defaults(func=cmd_gen)

    pb = sub.add_parser("bench", help="run the benchmark grid")
    pb.add_argument("--suite", required=True, choices=("random01", "wedge", "files"))
    pb.add_argument("--dir", default=None, help="instance directory for --suite files")
    pb.add_argument("--dims", default="2..6", help="dimension range, e.g. 2..10 or 2,4,6")
    pb.add_argument("--alphas", default="1..5", help="wedge parameters")
    pb.add_argument("--per-dim", type=int, default=10)
    pb.add_argument("--runs", type=int, default=100,
                    help="random-selection repetitions per instance")
    pb.add_argument("--timeout", type=float, default=600.0)
    pb.add_argument("--seed", type=int, default=0)
    pb.add_argument("--budget", type=int, default=None)
    pb.add_argument("--radius", type=float, default=None,
                    help="containment radius for instances without the 0-1 box")
    pb.add_argument("--algos", default="relax,relax-rand,dnc,chubanov")
    pb.add_argument("--out", default=None, help="CSV output path")
    pb.set_defaults(func=cmd_bench)

    return parser


# ---------------------------------------------------------------------------
# solve

def _require_radius(args, sys):
    if args.radius is not None:
        return args.radius
    if _has_unit_box(sys):
        return math.sqrt(sys.n + 1)
    raise UsageError("--radius is required for instances without the 0-1 box")


def run_algo(algo, sys, args):
    """Dispatch one algorithm on a system; returns a SolveReport."""
    budget = args.budget
    if algo == "ep":
        eps = args.eps if args.eps is not None else 1.0
        r = args.radius if args.radius is not None else ep_threshold(sys, eps)
        out = elementary_procedure(sys, np.zeros(sys.n), r, eps)
        if isinstance(out, ApproxSolution):
            return SolveReport(decision=Decision.FEASIBLE, x=out.x,
                               meta={"approx_eps": eps})
        return SolveReport(decision=Decision.INFEASIBLE,
                           meta={"outcome": "separator",
                                 "distance": out.hyperplane.distance_from(np.zeros(sys.n))})
    if algo == "dnc":
        eps = args.eps if args.eps is not None else 1e-6
        r = _require_radius(args, sys)
        params = DnCParams(eps=eps, theta=args.theta, node_budget=budget)
        return dnc_solve(sys, r=r, eps=eps, params=params)
    if algo in ("lfs", "lfs-tu"):
        lam = args.lam if args.lam is not None else 1.0
        params = DnCParams(eps=1.0, theta=args.theta, node_budget=budget)
        if algo == "lfs":
            if args.delta is None:
                raise UsageError("--algo lfs requires --delta")
            return lfs_bounded(sys.A, sys.b, lam, args.delta, params=params)
        return lfs_tu(sys.A, sys.b, lam, params=params)
    if algo == "lfg":
        params = None
        if budget is not None:
            params = DnCParams(eps=1.0, theta=args.theta, node_budget=budget)
        return lfg(sys, radius_override=args.radius, params=params)
    if algo == "chubanov":
        r_star = _require_radius(args, sys)
        params = DnCParams(eps=1.0, theta=args.theta, node_budget=budget)
        return chubanov_relaxation(sys, r_star, params=params,
                                   time_limit=args.timeout)
    if algo in ("relax", "relax-rand"):
        cfg = RelaxConfig(
            lam=args.lam if args.lam is not None else 1.9,
            eps=args.eps if args.eps is not None else 1e-6,
            selection="random" if algo == "relax-rand" else "max",
            seed=args.seed,
            max_iters=budget if budget is not None else 10_000_000,
            time_limit=args.timeout,
        )
        return relax_solve(sys, np.zeros(sys.n), cfg)
    raise UsageError(f"unknown algorithm {algo!r}")


def cmd_solve(args):
    inst = read_instance(args.instance)
    report = run_algo(args.algo, inst.system, args)
    if args.json:
        print(json.dumps(_report_payload(args.algo, inst.name, report),
                         sort_keys=True))
    else:
        _print_report(args.algo, inst.name, report)
    if report.decision == Decision.FEASIBLE:
        return EXIT_FEASIBLE
    if report.decision in (Decision.INFEASIBLE, Decision.NO_INTEGER_SOLUTIONS):
        return EXIT_INFEASIBLE
    return EXIT_BUDGET


def _report_payload(algo, name, report):
    return {
        "schema": SCHEMA,
        "algo": algo,
        "instance": name,
        "decision": report.decision.value,
        "x": None if report.x is None else [float(v) for v in report.x],
        "recursions": report.recursions,
        "ep_calls": report.ep_calls,
        "iterations": report.iterations,
        "elapsed": report.elapsed,
        "trace": _plain(report.trace),
        "meta": _plain({k: v for k, v in report.meta.items() if k != "iterates"}),
    }


def _plain(obj):
    if isinstance(obj, dict):
        return {k: _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return [_plain(v) for v in obj]
    return obj


def _print_report(algo, name, report):
    print(f"instance:   {name or '(unnamed)'}")
    print(f"algorithm:  {algo}")
    print(f"decision:   {report.decision.value}")
    if report.x is not None:
        print("x:          [" + ", ".join(f"{v:.9g}" for v in report.x) + "]")
    if report.iterations:
        print(f"iterations: {report.iterations}")
    if report.recursions:
        print(f"recursions: {report.recursions} ({report.ep_calls} leaf calls)")
    print(f"elapsed:    {report.elapsed:.4f} s")


# ---------------------------------------------------------------------------
# gen

def cmd_gen(args):
    if args.family == "random01":
        if args.n < 2:
            raise UsageError("--n must be at least 2")
        inst = gen_random01(args.n, args.seed)
    else:
        if args.alpha < 1:
            raise UsageError("--alpha must be at least 1")
        inst = gen_wedge(args.alpha)
    out_dir = os.path.dirname(os.path.abspath(args.out))
    if not os.path.isdir(out_dir):
        raise OSError(f"output directory does not exist: {out_dir}")
    write_instance(inst, args.out)
    print(f"wrote {inst.name} to {args.out}")
    return 0


# ---------------------------------------------------------------------------
# bench

def _parse_range(text):
    text = text.strip()
    if ".." in text:
        lo, hi = text.split("..", 1)
        return list(range(int(lo), int(hi) + 1))
    return [int(tok) for tok in text.split(",") if tok.strip()]


def _suite_instances(args):
    groups = []
    if args.suite == "random01":
        for n in _parse_range(args.dims):
            insts = [gen_random01(n, seed=args.seed + 1000 * n + i)
                     for i in range(args.per_dim)]
            groups.append((f"random01-{n}d", insts))
    elif args.suite == "wedge":
        for alpha in _parse_range(args.alphas):
            groups.append((f"wedge-a{alpha}", [gen_wedge(alpha)]))
    else:
        if not args.dir:
            raise UsageError("--suite files requires --dir")
        paths = sorted(p for p in os.listdir(args.dir)
                       if p.endswith((".txt", ".json")))
        if not paths:
            raise UsageError(f"no instance files in {args.dir}")
        for p in paths:
            inst = read_instance(os.path.join(args.dir, p))
            groups.append((inst.name or p, [inst]))
    return groups


def _bench_one(algo, inst, args):
    """One (algorithm, instance) cell: (metric_value, elapsed, timed_out)."""
    radius = args.radius
    if radius is None and inst.family == "wedge":
        radius = 4.0  # the anchored wedge has a solution near (1, 1)
    ns = argparse.Namespace(
        radius=radius, delta=None, lam=None, eps=None, theta=0.4,
        seed=args.seed, budget=args.budget, timeout=args.timeout, json=False)
    start = time.perf_counter()
    if algo == "relax-rand":
        cfg = RelaxConfig(selection="random", seed=args.seed,
                          time_limit=args.timeout,
                          max_iters=args.budget if args.budget else 10_000_000)
        stats = relax_random_stats(inst.system, np.zeros(inst.system.n),
                                   cfg, args.runs)
        elapsed = time.perf_counter() - start
        timed_out = stats.solved < args.runs or elapsed > args.timeout
        return stats.avg_iters, elapsed, timed_out
    report = run_algo(algo, inst.system, ns)
    elapsed = time.perf_counter() - start
    metric = report.iterations if algo.startswith("relax") else report.recursions
    timed_out = (report.decision == Decision.BUDGET_EXCEEDED
                 or elapsed > args.timeout)
    return float(metric), elapsed, timed_out


def cmd_bench(args):
    algos = [a.strip() for a in args.algos.split(",") if a.strip()]
    for a in algos:
        if a not in ALGOS:
            raise UsageError(f"unknown algorithm {a!r}")
    groups = _suite_instances(args)
    workers = max(1, int(os.environ.get("RELAXFEAS_THREADS", "1")))

    cells = [(gname, algo, inst) for gname, insts in groups
             for algo in algos for inst in insts]

    def run_cell(cell):
        gname, algo, inst = cell
        try:
            return cell, _bench_one(algo, inst, args)
        except RelaxfeasError:
            return cell, (math.nan, 0.0, True)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run_cell, cells))
    else:
        results = [run_cell(c) for c in cells]

    rows = []
    for gname, insts in groups:
        for algo in algos:
            vals, times, any_timeout = [], [], False
            for (cg, ca, _), (metric, elapsed, timed_out) in results:
                if cg != gname or ca != algo:
                    continue
                if timed_out or math.isnan(metric):
                    any_timeout = True
                else:
                    vals.append(metric)
                    times.append(elapsed)
            rows.append(_make_row(gname, algo, vals, times, any_timeout))

    text = render_table(rows)
    print(text)
    if args.out:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            write_csv(rows, fh)
        print(f"wrote {args.out}")
    return 0


def _make_row(experiment, algo, vals, times, timed_out):
    metric = "iterations" if algo.startswith("relax") else "recursions"
    if vals:
        stats = {
            "avg": float(np.mean(vals)),
            "std": float(np.std(vals)),
            "min": float(np.min(vals)),
            "max": float(np.max(vals)),
            "time_avg": float(np.mean(times)),
            "time_std": float(np.std(times)),
        }
    else:
        stats = {k: math.nan for k in ("avg", "std", "min", "max", "time_avg", "time_std")}
        timed_out = True
    return {"experiment": experiment, "algo": algo, "metric": metric,
            "timed_out": timed_out, **stats}


CSV_COLUMNS = ("experiment", "algo", "metric", "avg", "std", "min", "max",
               "time_avg", "time_std", "timed_out")


def write_csv(rows, fh):
    writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
    writer.writeheader()
    for row in rows:
        out = dict(row)
        out["timed_out"] = "1" if row["timed_out"] else "0"
        for key in ("avg", "std", "min", "max", "time_avg", "time_std"):
            out[key] = "" if math.isnan(row[key]) else f"{row[key]:.6g}"
        writer.writerow(out)


def read_csv(fh):
    rows = []
    for rec in csv.DictReader(fh):
        row = {"experiment": rec["experiment"], "algo": rec["algo"],
               "metric": rec["metric"], "timed_out": rec["timed_out"] == "1"}
        for key in ("avg", "std", "min", "max", "time_avg", "time_std"):
            row[key] = math.nan if rec[key] == "" else float(rec[key])
        rows.append(row)
    return rows


def render_table(rows):
    """Fixed-width table; timed-out rows render their stats as '--'."""
    header = ("experiment", "algo", "avg/std", "min/max", "time avg/std")
    out_rows = [header]
    for row in rows:
        if row["timed_out"]:
            stats = ("--", "--", "--")
        else:
            stats = (
                f"{row['avg']:.6g}/{row['std']:.6g}",
                f"{row['min']:.6g}/{row['max']:.6g}",
                f"{row['time_avg']:.4f}/{row['time_std']:.4f}",
            )
        out_rows.append((row["experiment"], row["algo"]) + stats)
    widths = [max(len(r[i]) for r in out_rows) for i in range(len(header))]
    lines = []
    for i, r in enumerate(out_rows):
        lines.append("  ".join(c.ljust(w) for c, w in zip(r, widths)).rstrip())
        if i == 0:
            lines.append("  ".join("-" * w for w in widths))
    return "\n".join(lines)


if __name__ == "__main__":
    _sys.exit(main())
