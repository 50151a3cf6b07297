"""Command line front end: ``fewnomial analyze | contour | verify``.

Exit codes: 0 on success, 2 when the analysis raised validation flags, 1 on
errors. Error messages carry the pipeline stage in brackets.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional, Sequence

from . import contour as ct
from .config import RunConfig
from .counter import PipelineError, run_stage, analyze
from .gale import gale_dual, reduced_point
from .oracle import ExpSum, GridSpec, count_components
from .support import ParseError, SignedSupport, normalize, parse_instance

EXIT_OK, EXIT_ERROR, EXIT_FLAGS = 0, 1, 2


class CliError(RuntimeError):
    def __init__(self, stage: str, message: str):
        super().__init__(f"[{stage}] {message}")
        self.stage = stage


def load_instance(path: str) -> SignedSupport:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise CliError("io", str(exc)) from exc
    try:
        return parse_instance(text)
    except ParseError as exc:
        raise CliError("parse", str(exc)) from exc


def _write(path: Optional[str], text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise CliError("io", str(exc)) from exc


def _config(args) -> RunConfig:
    try:
        grid = GridSpec()
        if args.box is not None:
            grid = replace(grid, R=args.box)
        if args.resolution is not None:
            grid = replace(grid, resolution=args.resolution)
        return RunConfig(grid=grid, oracle=not args.no_oracle, seed=args.seed, out=args.out)
    except ValueError as exc:
        raise CliError("config", str(exc)) from exc


def cmd_analyze(args) -> int:
    inst = load_instance(args.instance)
    config = _config(args)
    report = analyze(inst, config)
    _write(args.out, report.to_json())
    if args.pgm and inst.coefficients is not None and config.oracle:
        point = report.data["coefficient_point"]
        f = ExpSum.canonical(report.system, *point)
        run_stage("oracle", count_components, f, config.grid, args.pgm)
    for note in report.notes:
        print(f"note: {note}", file=sys.stderr)
    for flag in report.flags:
        print(f"flag: {flag}", file=sys.stderr)
    return EXIT_FLAGS if report.flags else EXIT_OK


def cmd_contour(args) -> int:
    inst = load_instance(args.instance)
    config = RunConfig()
    sys_ = run_stage("normalize", normalize, inst)
    g = run_stage("gale", gale_dual, sys_)
    dom = run_stage("domain", ct.parameter_domain, g, sys_.signs)
    extra = []
    if inst.coefficients is not None:
        extra.append(run_stage("gale", reduced_point, g, sys_.permute(inst.coefficients)))
    if dom.empty:
        print("warning: admissible parameter interval is empty; the contour is empty", file=sys.stderr)
    cusps = run_stage("cusps", ct.find_cusps, g, dom, config.cusp_residual, config.root_width)
    contour = run_stage("trace", ct.trace_contour, g, dom, cusps, config.trace, extra)
    _write(args.out, ct.contour_csv(contour))
    if args.svg:
        _write(args.svg, ct.contour_svg(contour))
    return EXIT_OK


def cmd_verify(args) -> int:
    from .verify import all_passed, format_table, run_suites

    if args.count < 0 or args.nmax < 1:
        raise CliError("config", "count must be >= 0 and nmax >= 1")
    table = run_suites(args.seed, args.count, args.nmax)
    sys.stdout.write(format_table(table))
    ok = all_passed(table)
    print(f"{'all invariants pass' if ok else 'invariant failures'} ({args.count} instances, seed {args.seed})")
    return EXIT_OK if ok else EXIT_ERROR


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="fewnomial", description="Positive zero sets of near-circuit exponential sums.")
    sub = p.add_subparsers(dest="command", required=True)

    a = sub.add_parser("analyze", help="full pipeline: contour, chambers, signatures, bounds, oracle")
    a.add_argument("instance", help="instance JSON file")
    a.add_argument("--no-oracle", action="store_true", help="skip the numeric component counter")
    a.add_argument("--box", type=float, default=None, help="oracle half-width R of the sampling box")
    a.add_argument("--resolution", type=int, default=None, help="oracle cells per axis (>= 64)")
    a.add_argument("--seed", type=int, default=0, help="seed for chamber sample points")
    a.add_argument("--out", default=None, help="report path (default: stdout)")
    a.add_argument("--pgm", default=None, help="dump the oracle sign grid at the coefficient point")
    a.set_defaults(func=cmd_analyze)

    c = sub.add_parser("contour", help="trace the reduced discriminant contour")
    c.add_argument("instance", help="instance JSON file")
    c.add_argument("--out", default=None, help="CSV path (default: stdout)")
    c.add_argument("--svg", default=None, help="also write an SVG drawing here")
    c.set_defaults(func=cmd_contour)

    v = sub.add_parser("verify", help="run the invariant suites on random instances")
    v.add_argument("--seed", type=int, default=0)
    v.add_argument("--count", type=int, default=50)
    v.add_argument("--nmax", type=int, default=6)
    v.set_defaults(func=cmd_verify)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (CliError, PipelineError) as exc:
        print(f"error {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
