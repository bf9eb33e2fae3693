"""Command-line interface.

``hypflow run``
    Integrate the flow from a JSON config and write the monitor series
    (CSV/JSON/SVG) plus a verdict report, named by the config hash.

    Exit codes: 0 all verdicts pass, 1 a verdict failed, 2 invalid config or
    failed precondition, 3 flow breakdown (last good state written).

``hypflow check``
    Static suites with a coverage table; nonzero exit on any failure.

``hypflow config``
    Print the default run config, a starting point for ``--config``.
"""

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .checks import SHAPE_KINDS, SUITES, coverage_table, run_suites
from .errors import DomainError, FlowBreakdown, GeometryOverflowError, PreconditionError
from .flow import FlowConfig, run, save_checkpoint
from .report import emit, verdicts

EXIT_OK, EXIT_VERDICT, EXIT_USAGE, EXIT_BREAKDOWN = 0, 1, 2, 3
FORMATS = ("csv", "json", "svg")


def load_config(path):
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise DomainError(f"cannot read config {path}: {exc}") from None
    try:
        return FlowConfig.from_json(text)
    except json.JSONDecodeError as exc:
        raise DomainError(f"config {path} is not valid JSON: {exc}") from None
    except TypeError as exc:
        raise DomainError(f"config {path}: {exc}") from None


def cmd_run(args):
    try:
        config = load_config(args.config) if args.config else FlowConfig()
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    tag = config.config_hash()
    try:
        series = run(config)
    except (PreconditionError, DomainError, GeometryOverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FlowBreakdown as exc:
        path = out / f"last_state-{tag}.json"
        save_checkpoint(exc.last_state, path)
        print(f"flow breakdown: {exc}\nlast good state written to {path}", file=sys.stderr)
        return EXIT_BREAKDOWN

    formats = FORMATS if args.format == "all" else (args.format,)
    for fmt in formats:
        path = out / f"run-{tag}.{fmt}"
        path.write_bytes(emit(series, fmt))
        print(f"wrote {path}")
    report = verdicts(series)
    (out / f"verdicts-{tag}.json").write_text(json.dumps(report.to_dict(), indent=2) + "\n")
    print(report.to_text(), end="")
    return EXIT_OK if report.passed else EXIT_VERDICT


def cmd_check(args):
    try:
        results = run_suites(only=args.only, n=args.n, shape=args.shape, seed=args.seed)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    print(coverage_table(results), end="")
    if not results:
        print("no checks apply to this selection", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK if all(r.passed for r in results) else EXIT_VERDICT


def cmd_config(args):
    print(FlowConfig().to_json())
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="hypflow", description="Inverse curvature flow of star-shaped "
                                     "hypersurfaces in hyperbolic space and its sharp inequalities.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("run", help="integrate the flow and write monitor artifacts")
    p.add_argument("--config", metavar="PATH", help="JSON run config (default parameters if omitted)")
    p.add_argument("--out", metavar="DIR", default=".", help="output directory (default: .)")
    p.add_argument("--format", choices=FORMATS + ("all",), default="all")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("check", help="run the static check suites")
    p.add_argument("--only", choices=SUITES, metavar="SUITE", help=f"one of {', '.join(SUITES)}")
    p.add_argument("--n", type=int, help="restrict every suite to this dimension")
    p.add_argument("--shape", choices=SHAPE_KINDS, default="random_bandlimited")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("config", help="print the default run config")
    p.set_defaults(func=cmd_config)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
