"""Command-line entry point: ``achlioptas <subcommand> ...``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import secrets
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

from .appendix import verify_appendix
from .counting import DynamicGraph, GraphError, count_copies, pair_count
from .experiments import (
    ExperimentConfig,
    ExperimentError,
    codegree_diagnostic,
    estimate_crossing,
    extremal_diagnostics,
    run_grid,
    wilson_interval,
)
from .pattern import PatternError, alias_family, format_pattern, parse_pattern, pattern_from_alias
from .process import STRATEGIES, ProcessConfig, ProcessError, RandomStream, offline_k3_r2, run, sample_gnp, trial_seed
from .thresholds import ThresholdDomainError, general_report, theta_general, theta_star, threshold_report

OUT_ENV = "ACHLIOPTAS_OUT"
HELP_WIDTH = 88
DOMAIN_ERRORS = (ThresholdDomainError, PatternError, ProcessError, ExperimentError, GraphError)


class UsageError(Exception):
    pass


def _formatter(prog):
    return argparse.HelpFormatter(prog, width=HELP_WIDTH, max_help_position=32)


def _fraction(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational number: {text!r}")


def _sides(text: str) -> tuple:
    try:
        a, b = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("expected two integers like 2,2")
    return a, b


def load_pattern(spec: str):
    """Alias such as ``k4`` or a path to a pattern file."""
    path = Path(spec)
    if path.is_file():
        p = parse_pattern(path.read_text())
        return p if p.name else type(p)(p.vertex_count, p.edges, p.marked_pair, path.stem)
    return pattern_from_alias(spec)


def load_graph(path: str) -> DynamicGraph:
    p = parse_pattern(Path(path).read_text())
    return DynamicGraph.from_edges(p.vertex_count, p.sorted_edges)


# --- output -------------------------------------------------------------------

def _csv(rows: list) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    cols = list(rows[0].keys())
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(cols)
    for row in rows:
        w.writerow(["" if row.get(c) is None else _cell(row.get(c)) for c in cols])
    return buf.getvalue()


def _cell(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    return str(v)


def _table(rows: list) -> str:
    if not rows:
        return "(no rows)\n"
    cols = list(rows[0].keys())
    cells = [[_cell(r.get(c)) if r.get(c) is not None else "-" for c in cols] for r in rows]
    widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
    lines = ["  ".join(c.ljust(w) for c, w in zip(cols, widths)).rstrip()]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(v.ljust(w) for v, w in zip(row, widths)).rstrip() for row in cells]
    return "\n".join(lines) + "\n"


def _kv(data: dict) -> str:
    width = max(len(k) for k in data)
    return "".join(f"{k.ljust(width)}  {_cell(v) if v is not None else '-'}\n" for k, v in data.items())


def emit(fmt: str, payload, rows: Optional[list] = None, text: Optional[str] = None) -> None:
    if fmt == "json":
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    elif fmt == "csv":
        sys.stdout.write(_csv(rows if rows is not None else [payload]))
    else:
        sys.stdout.write(text if text is not None else (_table(rows) if rows is not None else _kv(payload)))


def out_dir(arg: Optional[str]) -> Optional[str]:
    return arg or os.environ.get(OUT_ENV) or None


def _seed(arg: Optional[int]) -> int:
    return arg if arg is not None else secrets.randbits(63)


# --- subcommands ----------------------------------------------------------------

def cmd_threshold(args) -> int:
    if args.pattern is None and args.family is None:
        raise UsageError("give --family with --t, or --pattern")
    if args.pattern is not None:
        h = load_pattern(args.pattern)
        if args.star:
            th, witness, s = theta_star(h, args.r)
            payload = {
                "pattern": h.name or args.pattern, "r": args.r, "theta_star": str(th),
                "exponent": str(2 - th), "exponent_decimal": round(float(2 - th), 6),
                "witness_s": s, "witness": format_pattern(witness).strip().split("\n"),
            }
            emit(args.format, payload)
            return 0
        if args.s is None:
            raise UsageError("--pattern needs --s (or --star)")
        report = general_report(h, args.r, args.s)
    else:
        if args.t is None:
            raise UsageError("--family needs --t")
        report = threshold_report(args.family, args.t, args.r)
    d = report.to_dict()
    if args.format == "table":
        d = dict(d, sequence=" ".join(f"({x},{y})" for x, y in d["sequence"]))
    emit(args.format, d if args.format != "json" else report.to_dict())
    return 0


def _auto_rounds(h, n: int, r: int, s: Optional[int]) -> int:
    fam = alias_family(h.name) if h.name else None
    if fam is not None and fam[0] in ("cycle", "clique", "biclique"):
        family, t = fam
        if family == "clique" and t == 3:
            family = "cycle"
        theta = threshold_report(family, t, r).theta
    elif s is not None:
        theta = theta_general(h, r, s)
    else:
        raise UsageError("--rounds auto needs a built-in family pattern or an explicit --s")
    m = math.floor(n ** (2 - float(theta) - 0.1))
    return min(max(m, 0), pair_count(n))


def cmd_simulate(args) -> int:
    h = load_pattern(args.pattern)
    seed = _seed(args.seed)
    if args.rounds == "auto":
        rounds = _auto_rounds(h, args.n, args.r, args.s)
    else:
        try:
            rounds = int(args.rounds)
        except ValueError:
            raise UsageError("--rounds must be an integer or 'auto'")
    cfg = ProcessConfig(args.n, args.r, h, rounds, seed, stop_on_loss=not args.keep_going, s=args.s)
    out = run(cfg, args.strategy)
    emit(args.format, out.to_dict())
    return 0


def cmd_experiment(args) -> int:
    data = json.loads(Path(args.config).read_text())
    if args.jobs is not None:
        data["jobs"] = args.jobs
    target = out_dir(args.out)
    if target is not None:
        data["output"] = target
    crossing = data.pop("crossing", None)
    cfg = ExperimentConfig.from_dict(data)
    if args.crossing or crossing:
        opts = crossing if isinstance(crossing, dict) else {}
        rep = estimate_crossing(cfg, target_prob=opts.get("target", 0.5), levels=opts.get("levels", 3),
                                alpha_range=tuple(opts.get("alpha_range", (1.0, 2.0))))
        payload = rep.to_dict()
        rows = [dict(e) for e in payload["estimates"]]
        if target is not None:
            Path(target).mkdir(parents=True, exist_ok=True)
            (Path(target) / "crossing.json").write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")
        text = _table(rows) + f"reference exponent: {payload['reference']}\n"
        emit(args.format, payload, rows, text)
        return 0
    result = run_grid(cfg, timings=args.timings)
    rows = [dict(vars(c)) for c in result.cells]
    emit(args.format, rows, rows)
    return 0


def cmd_verify_appendix(args) -> int:
    if not 3 <= args.t_max <= 8:
        raise UsageError("--t-max must lie in 3..8")
    if not 2 <= args.r_max <= 10:
        raise UsageError("--r-max must lie in 2..10")
    hook = None
    if args.tamper_theta is not None:
        factor = args.tamper_theta
        hook = lambda family, t, r, theta: theta * factor  # noqa: E731
    rep = verify_appendix(args.t_max, args.r_max, theta_hook=hook)
    payload = rep.to_dict()
    rows = [
        {k: v for k, v in r.items()}
        for r in payload["records"]
        if not args.failures_only or (r["applicable"] and not r["passed"])
    ]
    for row in rows:
        row["status"] = "pass" if row["passed"] else ("fail" if row["applicable"] else "excluded")
    table_rows = [{k: r[k] for k in ("status", "check_id", "family", "t", "r", "lhs", "rhs", "witness")} for r in rows]
    lines = [_table(table_rows)]
    for exc in rep.exceptions:
        tag = "expected" if exc["expected"] else "UNEXPECTED"
        lines.append(f"non-balanced form ({tag}): {exc['family']} t={exc['t']} r={exc['r']} s={exc['s']}: "
                     + exc["form"].strip().replace("\n", "; ") + "\n")
    for f in rep.findings:
        lines.append(f"finding: {f['family']} t={f['t']}: {f['note']} ({f['steps_failing']} steps)\n")
    lines.append(f"{len(rep.records)} checks, {len(rep.failures)} failures\n")
    emit(args.format, payload, table_rows, "".join(lines))
    return 0 if rep.ok else 1


def cmd_offline_k3(args) -> int:
    if args.trials < 1:
        raise UsageError("--trials must be at least 1")
    m = math.floor(args.n ** args.m_exponent)
    seed = _seed(args.seed)
    survivors, triangles = 0, []
    for i in range(args.trials):
        out = offline_k3_r2(args.n, m, RandomStream(trial_seed(seed, i)))
        survivors += out.loss_round is None
        triangles.append(out.copies_created // 6)
    lo, hi = wilson_interval(survivors, args.trials)
    payload = {
        "n": args.n, "m": m, "m_exponent": args.m_exponent, "trials": args.trials, "seed": seed,
        "survivors": survivors, "survival": survivors / args.trials, "ci_low": lo, "ci_high": hi,
        "mean_triangles": sum(triangles) / args.trials, "max_triangles": max(triangles),
    }
    emit(args.format, payload)
    return 0


def cmd_count(args) -> int:
    g = load_graph(args.graph)
    h = load_pattern(args.pattern)
    c = count_copies(g, h)
    if args.format == "json":
        emit("json", {"count": c, "pattern": h.name or args.pattern, "n": g.n, "edges": g.edge_count})
    elif args.format == "csv":
        emit("csv", {"count": c})
    else:
        sys.stdout.write(f"{c}\n")
    return 0


def cmd_diagnose(args) -> int:
    seed = _seed(args.seed)
    rng = RandomStream(seed)
    if args.kind == "codegree":
        if args.p is not None:
            p = args.p
        elif args.p_coef is not None:
            p = args.p_coef / math.sqrt(args.n)
        else:
            raise UsageError("codegree needs --p or --p-coef")
        if not 0 <= p <= 1:
            raise ProcessError("p must lie in [0, 1]")
        rep = codegree_diagnostic(args.n, p, args.samples, rng)
        payload = dict(rep.to_dict(), seed=seed)
        rows = []
        for i, s in enumerate(rep.samples):
            row = {"sample": i, "max_codegree": s.max_codegree, "bound": round(s.bound, 6), "over_bound": s.over_bound}
            row.update({f"k{k}": v for k, v in s.tails.items()})
            row["tails_ok"] = s.tails_ok
            rows.append(row)
        text = _table(rows) + (f"first clause: {rep.first_clause_failures}/{len(rep.samples)} samples with violations\n"
                               f"second clause: {rep.second_clause_passes}/{len(rep.samples)} samples within n^2/k^3\n")
        emit(args.format, payload, rows, text)
        return 0
    if args.p is None:
        raise UsageError("extremal needs --p")
    g = sample_gnp(args.n, args.p, rng)
    reps = extremal_diagnostics(g, t=args.t, sides=args.sides, p=args.p, epsilon=args.epsilon)
    rows = [dict(vars(r)) for r in reps]
    emit(args.format, {"n": args.n, "p": args.p, "seed": seed, "reports": rows}, rows)
    return 0


# --- parser -------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="achlioptas",
        description="Small-subgraph avoidance in Achlioptas processes.",
        formatter_class=_formatter,
    )
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    def add(name, func, help_text, default_format="table"):
        p = sub.add_parser(name, help=help_text, description=help_text, formatter_class=_formatter)
        p.add_argument("--format", choices=("table", "json", "csv"), default=default_format,
                       help=f"output format (default: {default_format})")
        p.set_defaults(func=func)
        return p

    p = add("threshold", cmd_threshold, "exact avoidance threshold n^(2-theta)")
    p.add_argument("--family", choices=("cycle", "clique", "biclique"), help="built-in family")
    p.add_argument("--t", type=int, help="family size parameter")
    p.add_argument("--r", type=int, required=True, help="edges offered per round")
    p.add_argument("--pattern", help="pattern alias or pattern file (general mode)")
    p.add_argument("--s", type=int, help="danger depth for a general pattern")
    p.add_argument("--star", action="store_true", help="minimise over subgraphs and depths")

    p = add("simulate", cmd_simulate, "play one seeded game and print the outcome", "json")
    p.add_argument("--n", type=int, required=True, help="number of vertices")
    p.add_argument("--r", type=int, required=True, help="edges offered per round")
    p.add_argument("--pattern", required=True, help="forbidden pattern alias or file")
    p.add_argument("--strategy", choices=STRATEGIES, default="min-danger", help="edge-choice rule")
    p.add_argument("--rounds", default="auto", help="rounds to play, or 'auto' for n^(2-theta-0.1)")
    p.add_argument("--seed", type=int, help="random seed (default: fresh entropy, echoed)")
    p.add_argument("--s", type=int, help="danger depth (required for general patterns)")
    p.add_argument("--keep-going", action="store_true", help="keep playing after the first loss")

    p = add("experiment", cmd_experiment, "run a Monte Carlo survival grid from a JSON config")
    p.add_argument("--config", required=True, help="experiment config file (JSON)")
    p.add_argument("--jobs", type=int, help="worker processes")
    p.add_argument("--out", help=f"output directory (default: ${OUT_ENV})")
    p.add_argument("--crossing", action="store_true", help="estimate the survival-crossing exponent")
    p.add_argument("--timings", action="store_true", help="record per-trial wall time (breaks byte-identical output)")

    p = add("verify-appendix", cmd_verify_appendix, "check threshold inequalities and structural lemmas")
    p.add_argument("--t-max", type=int, default=7, help="largest t (bicliques stop at 7; default: 7)")
    p.add_argument("--r-max", type=int, default=5, help="largest r (default: 5)")
    p.add_argument("--failures-only", action="store_true", help="list failing checks only")
    p.add_argument("--tamper-theta", type=_fraction, help=argparse.SUPPRESS)

    p = add("offline-k3", cmd_offline_k3, "offline triangle avoidance with two offers per round")
    p.add_argument("--n", type=int, required=True, help="number of vertices")
    p.add_argument("--m-exponent", type=float, required=True, help="m = floor(n^x) rounds")
    p.add_argument("--trials", type=int, default=100, help="seeded trials (default: 100)")
    p.add_argument("--seed", type=int, help="base seed (default: fresh entropy, echoed)")

    p = add("count", cmd_count, "count labelled copies of a pattern in a graph")
    p.add_argument("--graph", required=True, help="host graph file (pattern text format)")
    p.add_argument("--pattern", required=True, help="pattern alias or file")

    p = add("diagnose", cmd_diagnose, "random-graph diagnostics (codegrees, extremal counts)")
    p.add_argument("kind", choices=("codegree", "extremal"), help="diagnostic to run")
    p.add_argument("--n", type=int, required=True, help="number of vertices")
    p.add_argument("--p", type=float, help="edge probability")
    p.add_argument("--p-coef", type=float, help="codegree: p = coef / sqrt(n)")
    p.add_argument("--samples", type=int, default=20, help="codegree: graphs to sample (default: 20)")
    p.add_argument("--t", type=int, help="extremal: path length in vertices")
    p.add_argument("--sides", type=_sides, help="extremal: biclique sides a,b")
    p.add_argument("--epsilon", type=float, default=0.2, help="extremal: allowed shortfall (default: 0.2)")
    p.add_argument("--seed", type=int, help="random seed (default: fresh entropy, echoed)")
    return parser


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        sys.stderr.write(f"achlioptas {args.command}: error: {exc}\n")
        return 2
    except DOMAIN_ERRORS as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1
    except (OSError, json.JSONDecodeError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 1


if __name__ == "__main__":
    sys.exit(main())
