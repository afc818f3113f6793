"""Command-line entry point: ``levyfock {verify,sample,report,fockvec}``.

Exit codes: 0 success, 1 failed checks, 2 usage or parameter error, 3 I/O error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from .checks import DEFAULT_TOL, SUITES, random_fockvec, run_suite
from .fockio import SchemaError, atomic_write_text, fockvec_to_dict, read_fockvec, write_fockvec
from .grid import GridFunction, GridModel, hermite_scale
from .ladder import NoiseFamily
from .levysim import path_from_increments, sample_increments
from .symtensor import FockVector
from .wickcalc import s_transform
from .wickpow import fit_growth_exponent, growth_profile

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3
FAMILIES = ("gaussian", "poisson", "gamma", "pascal", "meixner")
REPORTS = ("growth", "stransform", "table")


class UsageError(ValueError):
    pass


def make_family(name: str, lam: float | None) -> NoiseFamily:
    """Map a CLI family name (plus optional --lam) to a NoiseFamily."""
    if name == "gaussian":
        return NoiseFamily.gaussian()
    if name == "poisson":
        return NoiseFamily.poisson(1.0 if lam is None else lam)
    if name == "gamma":
        return NoiseFamily.meixner(2.0 if lam is None else lam)
    if name == "pascal":
        return NoiseFamily.meixner(3.0 if lam is None else lam)
    if name == "meixner":
        return NoiseFamily.meixner(1.0 if lam is None else lam)
    raise UsageError(f"unsupported family {name!r}; choose from {', '.join(FAMILIES)}")


def _check_family(name: str, fam: NoiseFamily) -> None:
    expected = {"gamma": "gamma", "pascal": "pascal", "meixner": "meixner"}.get(name)
    if expected and fam.marginal != expected:
        raise UsageError(f"--lam {fam.lam:g} does not give a {name} marginal")


def _grid(args) -> GridModel:
    return GridModel(args.cells, args.width, args.origin)


def _params(args) -> dict:
    skip = {"func", "command"}
    return {k: v for k, v in sorted(vars(args).items()) if k not in skip}


def _emit(text: str, out: str | None) -> None:
    if out:
        atomic_write_text(out, text)
    else:
        sys.stdout.write(text)


def _csv(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    # repr gives the shortest decimal that round-trips
    writer.writerows([repr(v) if isinstance(v, float) else v for v in row] for row in rows)
    return buf.getvalue()


# --- subcommands -----------------------------------------------------------------------

def cmd_verify(args) -> int:
    if args.suite not in SUITES:
        raise UsageError(f"unknown suite {args.suite!r}; choose from {', '.join(SUITES)}")
    checks = run_suite(args.suite, _grid(args), args.rank, args.seed, tol=args.tol, paths=args.paths)
    passed = all(c.passed for c in checks)
    report = {
        "suite": args.suite,
        "params": _params(args) | {"tol": DEFAULT_TOL[args.suite] if args.tol is None else args.tol},
        "checks": [c.as_dict() for c in checks],
        "pass": passed,
    }
    _emit(json.dumps(report, indent=1) + "\n", args.out)
    return EXIT_OK if passed else EXIT_FAIL


def cmd_sample(args) -> int:
    fam = make_family(args.family, args.lam)
    _check_family(args.family, fam)
    grid = _grid(args)
    sample = sample_increments(fam, grid, args.paths or 1, args.seed, eps=args.eps)
    cum = path_from_increments(sample)
    starts = grid.starts
    rows = (
        (p, i, float(starts[i]), float(sample.increments[p, i]), float(cum[p, i]))
        for p in range(sample.paths)
        for i in range(grid.cells)
    )
    atomic_write_text(args.out, _csv(("path_id", "cell_index", "t_start", "increment", "cumulative"), rows))
    if args.json:
        meta = {"family": str(fam), "params": _params(args), "rows": sample.paths * grid.cells,
                "sampler": sample.sampler_meta}
        sys.stdout.write(json.dumps(meta, indent=1) + "\n")
    return EXIT_OK


def _report_growth(args, grid):
    fam = make_family(args.family, args.lam)
    if not 0 <= args.delta_cell < grid.cells:
        raise UsageError(f"--delta-cell {args.delta_cell} outside 0..{grid.cells - 1}")
    omega = GridFunction.delta(grid, args.delta_cell)
    scale = hermite_scale(grid, args.modes)
    rows = growth_profile(fam, omega, args.rank, args.p, scale)
    header = ("n", "norm_sq", "factorial")
    table = [(r.n, float(r.norm_sq), float(r.factorial)) for r in rows]
    extra = {"family": str(fam)}
    ns = [r.n for r in rows if r.n > 0 and r.norm_sq > 0]
    if len(ns) >= 2:
        norms = [float(np.sqrt(r.norm_sq)) for r in rows if r.n in ns]
        extra["fitted_exponent"] = fit_growth_exponent(ns, norms)
    return header, table, extra


def _parse_xi(text: str, grid: GridModel) -> GridFunction:
    parts = [float(x) for x in text.split(",")]
    if len(parts) == 1:
        return GridFunction.constant(grid, parts[0])
    if len(parts) != grid.cells:
        raise UsageError(f"--xi needs 1 or {grid.cells} values, got {len(parts)}")
    return GridFunction(grid, np.array(parts))


def _report_stransform(args, grid):
    F = read_fockvec(args.input) if args.input else FockVector.vacuum(grid)
    xis = args.xi or ["0", "1"]
    table = [(x, float(s_transform(F, _parse_xi(x, F.grid)))) for x in xis]
    return ("xi", "S"), table, {"max_rank": F.max_rank, "cells": F.grid.cells}


def _report_table(args, grid):
    checks = run_suite("ccr", grid, args.rank, args.seed, tol=args.tol)
    return ("name", "residual", "tol", "pass"), [(c.name, c.residual, c.tol, c.passed) for c in checks], {}


def cmd_report(args) -> int:
    if args.kind not in REPORTS:
        raise UsageError(f"unknown report kind {args.kind!r}; choose from {', '.join(REPORTS)}")
    grid = _grid(args)
    build = {"growth": _report_growth, "stransform": _report_stransform, "table": _report_table}[args.kind]
    header, table, extra = build(args, grid)
    if args.json:
        doc = {"kind": args.kind, "params": _params(args), **extra,
               "columns": list(header), "rows": [list(r) for r in table]}
        _emit(json.dumps(doc, indent=1) + "\n", args.out)
    else:
        _emit(_csv(header, table), args.out)
    return EXIT_OK


def cmd_fockvec(args) -> int:
    if args.input:
        F = read_fockvec(args.input)
    else:
        F = random_fockvec(_grid(args), args.rank, np.random.default_rng(args.seed))
    if args.out:
        write_fockvec(F, args.out)
    else:
        sys.stdout.write(json.dumps(fockvec_to_dict(F), indent=1) + "\n")
    return EXIT_OK


# --- parser ----------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--cells", type=int, default=3, help="number of grid cells d")
    common.add_argument("--width", type=float, default=0.5, help="cell width h")
    common.add_argument("--origin", type=float, default=0.0)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--out", help="output file (stdout if omitted, required for sample)")
    common.add_argument("--json", action="store_true", help="JSON output instead of CSV")

    parser = argparse.ArgumentParser(prog="levyfock", description="Discrete white-noise Fock space toolkit.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("verify", parents=[common], help="run a verification suite")
    p.add_argument("--suite", required=True, help=f"one of {', '.join(SUITES)}")
    p.add_argument("--rank", type=int, default=5, help="truncation rank N")
    p.add_argument("--tol", type=float, default=None, help="override the suite tolerance")
    p.add_argument("--paths", type=int, default=None, help="Monte Carlo paths (mc suite)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", parents=[common], help="sample white-noise increments to CSV")
    p.add_argument("--family", required=True, help=f"one of {', '.join(FAMILIES)}")
    p.add_argument("--lam", type=float, default=None, help="family parameter")
    p.add_argument("--paths", type=int, default=1)
    p.add_argument("--eps", type=float, default=1e-3, help="Meixner small-jump cutoff")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("report", parents=[common], help="emit a growth, S-transform or residual table")
    p.add_argument("--kind", required=True, help=f"one of {', '.join(REPORTS)}")
    p.add_argument("--family", default="poisson")
    p.add_argument("--lam", type=float, default=None)
    p.add_argument("--rank", type=int, default=8, help="largest rank n")
    p.add_argument("--delta-cell", type=int, default=0, help="cell carrying the delta path (growth)")
    p.add_argument("--p", type=float, default=1.0, help="Sobolev index of the dual norm (growth)")
    p.add_argument("--modes", type=int, default=8, help="Hermite modes (growth)")
    p.add_argument("--input", help="Fock vector JSON (stransform; vacuum if omitted)")
    p.add_argument("--xi", action="append", help="xi as one constant or comma-separated cell values")
    p.add_argument("--tol", type=float, default=None)
    p.set_defaults(func=cmd_report)

    p = sub.add_parser("fockvec", parents=[common], help="validate/normalize or generate Fock vector JSON")
    p.add_argument("--input", help="file to read and rewrite canonically")
    p.add_argument("--rank", type=int, default=3, help="max rank of a generated random vector")
    p.set_defaults(func=cmd_fockvec)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "command", None) == "sample" and not args.out:
        parser.error("sample needs --out")
    try:
        return args.func(args)
    except SchemaError as exc:
        print(f"schema error at {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (UsageError, ValueError, KeyError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
