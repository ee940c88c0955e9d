"""Command-line front end: ``gyp compute | refine | sweep | verify``.

Results go to stdout as canonical JSON. Errors go to stderr as a JSON object
with an ``error`` class name and a ``message``. Exit codes: 0 success,
1 property violation, 2 input error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys

import numpy as np

from .divergences import DomainError, OrderError, OrderParam, divergence, entropy
from .engine import STRATEGIES, RefinementConfig, run_alpha_sweep, supremum_estimate
from .extended import format_ext
from .fixtures import DEFAULT_SEED, FixturePair
from .measures import MeasureError, NotNormalized, domain_of
from .partitions import (
    InvalidPartition,
    InvalidSplit,
    OrderOutOfRange,
    check_partition,
    partition_stats,
    partition_value,
)
from .quadrature import QuadratureConfig, QuadratureDidNotConverge
from .serialize import SchemaError, dumps, load_json, load_measure, partition_from_dict
from .simple_approx import LevelSetResolutionFailure
from .verify import SUITES, run_suites

EXIT_OK, EXIT_VIOLATION, EXIT_INPUT, EXIT_NUMERIC = 0, 1, 2, 3

INPUT_ERRORS = (SchemaError, MeasureError, OrderError, DomainError, OrderOutOfRange,
                InvalidPartition, InvalidSplit, ValueError, OSError)
NUMERIC_ERRORS = (QuadratureDidNotConverge, LevelSetResolutionFailure, ArithmeticError)


class UsageError(ValueError):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def parse_orders(text: str) -> list[float]:
    """``A:S:B`` inclusive of both ends, e.g. ``1.1:0.1:3.0``."""
    try:
        a, s, b = (float(x) for x in text.split(":"))
    except ValueError:
        raise UsageError(f"--orders expects START:STEP:END, got {text!r}") from None
    if not s > 0 or b < a:
        raise UsageError("--orders needs a positive step and END >= START")
    n = int(np.floor((b - a) / s + 1e-9))
    return [round(a + i * s, 12) for i in range(n + 1)]


def _order(args) -> OrderParam:
    if args.family == "kl":
        if args.order is not None:
            raise OrderError("KL takes no --order")
        return OrderParam.kl()
    if args.order is None:
        raise OrderError(f"--family {args.family} needs --order")
    return OrderParam(args.family, args.order)


def _quad(tol=None) -> QuadratureConfig:
    return QuadratureConfig.from_env() if tol is None else QuadratureConfig(abs_tol=tol)


def _refine_cfg(args) -> RefinementConfig:
    kw = {"quad": _quad(), "split_strategy": args.strategy}
    if args.tol is not None:
        kw["rel_gap_tol"] = args.tol
    if args.max_cells is not None:
        kw["max_cells"] = args.max_cells
    return RefinementConfig(**kw)


def _pair(args):
    if args.r is None:
        raise UsageError("--r is required")
    return load_measure(args.p), load_measure(args.r)


# ---------------------------------------------------------------------------
# subcommands


def cmd_compute(args, out) -> int:
    order = _order(args)
    cfg = _quad(args.tol)
    P = load_measure(args.p)
    if args.r is None:
        if args.partition is not None:
            raise UsageError("--partition needs --r")
        value = entropy(P, order, cfg)
        result = {"family": order.family, "order": order.order, "value": value,
                  "method": "quadrature", "quantity": "entropy"}
    elif args.partition is not None:
        R = load_measure(args.r)
        pi = check_partition(partition_from_dict(load_json(args.partition), P, R), P, R)
        value = partition_value(partition_stats(P, R, pi), order)
        result = {"family": order.family, "order": order.order, "value": value,
                  "method": "partition", "cells": pi.m}
    else:
        R = load_measure(args.r)
        value = divergence(P, R, order, cfg)
        result = {"family": order.family, "order": order.order, "value": value, "method": "quadrature"}
    out.write(dumps(result) + "\n")
    return EXIT_OK


def _witness_dict(w) -> dict | None:
    if w is None:
        return None
    if w.is_discrete:
        return {"atoms": sorted(w.atoms)}
    return {"intervals": [list(iv) for iv in w.intervals]}


def cmd_refine(args, out) -> int:
    order = _order(args)
    cfg = _refine_cfg(args)
    P, R = _pair(args)
    est = supremum_estimate(P, R, order, cfg)
    if args.trace:
        est.trace.write_csv(args.trace)
    summary = est.summary()
    summary["budget_exhausted"] = est.budget_exhausted
    if est.witness is not None:
        summary["witness"] = _witness_dict(est.witness)
    out.write(dumps(summary) + "\n")
    return EXIT_OK


SWEEP_COLUMNS = ("order", "lower_bound", "oracle", "gap", "converged", "cells")


def cmd_sweep(args, out) -> int:
    if args.family == "kl":
        raise OrderError("sweep needs --family renyi or tsallis")
    if args.orders is None:
        raise UsageError("sweep needs --orders START:STEP:END")
    orders = parse_orders(args.orders)
    cfg = _refine_cfg(args)
    P, R = _pair(args)
    rows = []
    for est in run_alpha_sweep(P, R, orders, cfg, family=args.family):
        s = est.summary()
        rows.append({k: s[k] for k in SWEEP_COLUMNS})
    if args.trace:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(SWEEP_COLUMNS)
        for row in rows:
            w.writerow([format_ext(row["order"]), format_ext(row["lower_bound"]), format_ext(row["oracle"]),
                        format_ext(row["gap"]), str(row["converged"]).lower(), row["cells"]])
        with open(args.trace, "w", newline="") as fh:
            fh.write(buf.getvalue())
    out.write(dumps({"family": args.family, "rows": rows}) + "\n")
    return EXIT_OK


def cmd_verify(args, out) -> int:
    names = list(SUITES) if "all" in args.suite else args.suite
    pairs = None
    if args.p is not None or args.r is not None:
        if args.p is None or args.r is None:
            raise UsageError("verify on a given pair needs both --p and --r")
        P, R = load_measure(args.p), load_measure(args.r)
        domain_of(P, R)
        pairs = [FixturePair("input", P, R)]
    report = run_suites(names, seed=args.seed, pairs=pairs, cfg=QuadratureConfig.from_env())
    out.write(dumps(report) + "\n")
    return EXIT_OK if report["passed"] else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gyp",
        description="Entropies and relative entropies, with certified partition lower bounds.")
    sub = parser.add_subparsers(dest="command", required=True)

    def pair_args(p, r_required=False):
        p.add_argument("--p", required=True, help="measure JSON for P")
        p.add_argument("--r", required=r_required, help="measure JSON for the reference R")

    def family_args(p, default="kl"):
        p.add_argument("--family", choices=("kl", "renyi", "tsallis"), default=default)
        p.add_argument("--order", type=float, help="alpha (renyi) or q (tsallis)")

    def engine_args(p):
        p.add_argument("--tol", type=float, help="relative gap tolerance (default 1e-4)")
        p.add_argument("--max-cells", type=int, help="cell budget (default 4096)")
        p.add_argument("--strategy", choices=STRATEGIES, default="phi-level")
        p.add_argument("--trace", metavar="PATH", help="write a CSV trace here")

    p = sub.add_parser("compute", help="integral value by quadrature, or a partition functional")
    pair_args(p)
    family_args(p)
    p.add_argument("--partition", metavar="PATH", help="partition JSON; evaluates the partition functional")
    p.add_argument("--tol", type=float, help="quadrature absolute tolerance")
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("refine", help="certified lower bound by greedy refinement")
    pair_args(p, r_required=True)
    family_args(p)
    engine_args(p)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("sweep", help="refine over a range of orders")
    pair_args(p, r_required=True)
    family_args(p, default="renyi")
    p.add_argument("--orders", metavar="A:S:B", help="start:step:end, inclusive")
    engine_args(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify", help="seeded property suites")
    p.add_argument("--suite", action="append", choices=SUITES + ("all",),
                   help="suite to run (repeatable; default all)")
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--p", help="optional measure JSON replacing the fixture pairs")
    p.add_argument("--r", help="reference for --p")
    p.set_defaults(func=cmd_verify)
    return parser


def _error(err, exc: BaseException) -> None:
    payload = {"error": type(exc).__name__, "message": str(exc)}
    if isinstance(exc, NotNormalized):
        payload["actual_mass"] = exc.actual_mass
    err.write(dumps(payload) + "\n")


def main(argv=None, out=None, err=None) -> int:
    out = sys.stdout if out is None else out
    err = sys.stderr if err is None else err
    args = build_parser().parse_args(argv)
    if args.command == "verify" and not args.suite:
        args.suite = ["all"]
    try:
        return args.func(args, out)
    except NUMERIC_ERRORS as exc:
        _error(err, exc)
        return EXIT_NUMERIC
    except INPUT_ERRORS as exc:
        _error(err, exc)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
