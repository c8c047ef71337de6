"""Command-line interface: ``chainti {list-indices,moments,exact,simulate,check}``."""

from __future__ import annotations

import argparse
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import checks, theory
from .chains import (ABC_FAMILIES, FAMILIES, ChainError, IncrementFamily, LinkDistribution,
                     alpha_vector, get_family, ti2)
from .hexpr import ExprSyntaxError, parse, to_index_function
from .indices import BUILTIN_NAMES, IndexDefinitionError, builtin, catalog
from .montecarlo import SimulationError, kde, run_experiment, summarize, trapezoid_mass
from .oracle import OracleLimit, OracleLimitError
from .tolerances import SIGMA_BAND, ks_critical


class UsageError(Exception):
    pass


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--family", default="phenylene", choices=[*FAMILIES, "custom"])
    p.add_argument("--config", type=Path, help="JSON file {m, ti2, alpha} for --family custom")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--index", choices=BUILTIN_NAMES)
    g.add_argument("--h-expr", help="custom h(x, y), e.g. 'sqrt(x^2+y^2)'")
    p.add_argument("--n", type=int, default=10000, help="number of units (default 10000)")
    p.add_argument("--p", help="comma-separated link probabilities (default p1=0.5, rest uniform)")
    p.add_argument("--seed", type=int, default=20240601)
    p.add_argument("--out", type=Path)
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="chainti", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("list-indices", help="list built-in indices")
    sub.add_parser("moments", parents=[common], help="alpha, beta, A/B/C, mean and variance of TI_n")
    sub.add_parser("exact", parents=[common], help="exact law of TI_n as JSON")
    sim = sub.add_parser("simulate", parents=[common], help="Monte Carlo replications")
    sim.add_argument("--reps", type=int, default=500)
    sim.add_argument("--kde-points", type=int, default=512)
    sim.add_argument("--fast-increments", action="store_true",
                     help="skip graph building and sum alpha increments")
    sim.add_argument("--workers", type=int, default=1)
    sim.add_argument("--edges-csv", type=Path, help="write the edge list of replication 0 as u,v lines")
    chk = sub.add_parser("check", parents=[common], help="run the invariant battery")
    chk.add_argument("--oracle-limit", type=int, default=10**6)
    chk.add_argument("--all-families", action="store_true",
                     help="check every family (the default when --family is not given)")
    chk.add_argument("--inject-alpha-error", type=float, default=0.0, help=argparse.SUPPRESS)
    return parser


# Config resolution ---------------------------------------------------------


def resolve_index(args):
    if args.h_expr is not None:
        return to_index_function(parse(args.h_expr))
    return builtin(args.index or "sombor")


def resolve_family(args):
    if args.family == "custom":
        if args.config is None:
            raise UsageError("--family custom requires --config")
        try:
            data = json.loads(args.config.read_text())
        except (OSError, json.JSONDecodeError) as exc:
            raise UsageError(f"cannot read config {args.config}: {exc}") from exc
        return IncrementFamily.from_mapping(data)
    return get_family(args.family)


def resolve_probs(args, m):
    if args.p is None:
        return LinkDistribution.default(m)
    try:
        values = [float(v) for v in args.p.split(",")]
    except ValueError as exc:
        raise UsageError(f"--p must be a comma-separated list of numbers: {exc}") from exc
    if len(values) != m:
        raise UsageError(f"--p has {len(values)} entries but the family has {m} link types")
    return LinkDistribution(values)


def _emit(text: str, out: Path | None):
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text)


def _theory_doc(family, f, probs, n):
    alpha = alpha_vector(family, f)
    base = ti2(family, f)
    mom = theory.moments(alpha, probs, base, n)
    doc = {
        "family": family.name,
        "index": f.name,
        "n": n,
        "p": list(probs.probs),
        "ti2": base,
        "alpha_vec": list(mom.alpha_vec),
        "alpha": mom.alpha,
        "beta": mom.beta,
        "A": None,
        "B": None,
        "C": None,
        "mean": mom.mean,
        "variance": mom.variance,
    }
    if family.name in ABC_FAMILIES:
        abc = theory.abc_constants(family.name, f)
        doc.update(A=abc.A, B=abc.B, C=abc.C)
    return doc, mom


# Subcommands ---------------------------------------------------------------


def cmd_list_indices(args=None) -> int:
    for f in catalog():
        print(f"{f.name:<18}{f.formula}")
    return 0


def cmd_moments(args) -> int:
    family = resolve_family(args)
    f = resolve_index(args)
    doc, _ = _theory_doc(family, f, resolve_probs(args, family.m), args.n)
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def cmd_exact(args) -> int:
    family = resolve_family(args)
    f = resolve_index(args)
    probs = resolve_probs(args, family.m)
    dist = theory.exact_distribution(alpha_vector(family, f), probs, ti2(family, f), args.n)
    doc = {
        "family": family.name,
        "index": f.name,
        "n": args.n,
        "p": list(probs.probs),
        "support": dist.support.tolist(),
        "probs": dist.probs.tolist(),
    }
    _emit(json.dumps(doc, indent=2) + "\n", args.out)
    return 0


def cmd_simulate(args) -> int:
    if args.reps < 1:
        raise UsageError(f"--reps must be >= 1, got {args.reps}")
    family = resolve_family(args)
    f = resolve_index(args)
    probs = resolve_probs(args, family.m)
    fast = args.fast_increments or not family.has_graphs
    sample = run_experiment(family, probs, args.n, f, args.reps, args.seed, args.workers, fast)
    doc, mom = _theory_doc(family, f, probs, args.n)

    summary = summarize(sample, mom) if sample.reps >= 2 else None
    curve = None
    if summary is not None and summary.variance > 0:
        curve = kde(sample, args.kde_points)

    if args.format == "csv":
        text = sample.to_csv()
    else:
        payload = {"theory": doc, "sample": sample.to_dict()}
        if summary is not None:
            payload["summary"] = {
                "mean": summary.mean,
                "variance": summary.variance,
                "ks_statistic": summary.ks_statistic,
                "ks_critical_5pct": ks_critical(summary.reps),
                "reps": summary.reps,
                "notes": summary.notes,
            }
        if curve is not None:
            payload["kde"] = {"grid": curve[0].tolist(), "density": curve[1].tolist(),
                              "mass": trapezoid_mass(*curve)}
        text = json.dumps(payload) + "\n"
    _emit(text, args.out)

    if args.edges_csv is not None:
        if not family.has_graphs:
            raise UsageError("--edges-csv needs a graph family")
        from .montecarlo import draw_links, stream
        state = family.grow(draw_links(stream(args.seed, 0), probs, args.n - 2))
        args.edges_csv.write_text("\n".join(state.graph.to_csv_lines()) + "\n")

    report = sys.stdout if args.out is not None else sys.stderr
    print(f"{family.name} / {f.name}: n={args.n} reps={sample.reps} seed={args.seed}"
          f"{' (fast increments)' if fast else ''}", file=report)
    if summary is not None:
        band = SIGMA_BAND * math.sqrt(mom.variance / summary.reps)
        print(f"{'':<10}{'theory':>20}{'sample':>20}", file=report)
        print(f"{'mean':<10}{mom.mean:>20.10g}{summary.mean:>20.10g}", file=report)
        print(f"{'variance':<10}{mom.variance:>20.10g}{summary.variance:>20.10g}", file=report)
        if summary.degenerate:
            print("variance is zero (TI_n = B n + C); KS skipped", file=report)
        else:
            crit = ks_critical(summary.reps)
            print(f"KS statistic {summary.ks_statistic:.5f} (5% critical value {crit:.5f})", file=report)
            if summary.ks_statistic >= crit:
                print("WARNING: KS statistic exceeds the 5% critical value", file=report)
            if abs(summary.mean - mom.mean) > band:
                print(f"WARNING: sample mean outside the {SIGMA_BAND:g}-sigma band", file=report)
    return 0


def cmd_check(args) -> int:
    indices = [resolve_index(args)] if (args.index or args.h_expr) else catalog()
    if args.family == "custom":
        raise UsageError("check needs a graph family")
    if args.all_families or not getattr(args, "_family_given", False):
        families = list(FAMILIES)
    else:
        families = [args.family]
    # --n defaults to the simulation size; the oracle only goes to small n
    max_n = args.n if args.n <= 12 else 7
    results = checks.run_battery(families, indices, max_n=max_n, seed=args.seed,
                                 limit=OracleLimit(args.oracle_limit),
                                 alpha_offset=args.inject_alpha_error)
    width = max(len(r.name) for r in results)
    for r in results:
        print(f"{'PASS' if r.passed else 'FAIL'}  {r.name:<{width}}  {r.detail}")
    failed = [r for r in results if not r.passed]
    print(f"{len(results) - len(failed)}/{len(results)} checks passed")
    return 1 if failed else 0


COMMANDS = {
    "list-indices": cmd_list_indices,
    "moments": cmd_moments,
    "exact": cmd_exact,
    "simulate": cmd_simulate,
    "check": cmd_check,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    argv = sys.argv[1:] if argv is None else list(argv)
    args._family_given = any(a == "--family" or a.startswith("--family=") for a in argv)
    try:
        return COMMANDS[args.command](args)
    except (UsageError, ChainError, IndexDefinitionError, ExprSyntaxError, SimulationError,
            OracleLimitError, theory.TheoryError, OverflowError) as exc:
        print(f"chainti {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"chainti {args.command}: I/O error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
