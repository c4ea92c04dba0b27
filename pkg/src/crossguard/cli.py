"""Command line harness: validate scenarios, run them, sweep semantics.

Exit codes: 0 success, 2 scenario parse error, 3 scenario validation error,
4 protocol error inside the simulator.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from .aggregation import AggregationSemantics
from .model import ProtocolError
from .runner import TRUTH_MODES, run_once, run_sweep
from .scenario import ScenarioParseError, ScenarioValidationError, load_scenario

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_PROTOCOL = 4

_SEMANTICS_NAMES = [s.value for s in AggregationSemantics]


def _parse_semantics(name: str) -> AggregationSemantics:
    try:
        return AggregationSemantics(name)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown semantics {name!r}; choose from {', '.join(_SEMANTICS_NAMES)}"
        ) from None


def _parse_semantics_list(text: str) -> list[AggregationSemantics]:
    if text == "all":
        return list(AggregationSemantics)
    return [_parse_semantics(part.strip()) for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="crossguard",
        description="Deterministic simulator for a collaborative go/stop decision layer.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_validate = sub.add_parser("validate", help="check a scenario file and report problems")
    p_validate.add_argument("scenario", help="path to a .scenario file")

    p_run = sub.add_parser("run", help="run one scenario once and print its metrics")
    p_run.add_argument("scenario", help="path to a .scenario file")
    p_run.add_argument(
        "--semantics",
        type=_parse_semantics,
        default=AggregationSemantics.UNANIMITY_SAFE,
        help=f"decision rule: {', '.join(_SEMANTICS_NAMES)} (default unanimity_safe)",
    )
    p_run.add_argument(
        "--seed",
        type=int,
        default=None,
        help="run seed (default: the scenario's network.seed)",
    )
    p_run.add_argument(
        "--truth",
        choices=TRUTH_MODES,
        default="fixed",
        help="ground-truth mode per session (default fixed)",
    )
    p_run.add_argument("--trace", default=None, help="write the full event trace to this file")

    p_sweep = sub.add_parser("sweep", help="compare semantics across many seeded runs")
    p_sweep.add_argument("scenario", help="path to a .scenario file")
    p_sweep.add_argument(
        "--semantics",
        type=_parse_semantics_list,
        default=list(AggregationSemantics),
        help="comma-separated decision rules, or 'all' (default all)",
    )
    p_sweep.add_argument(
        "--seeds",
        type=int,
        default=10,
        help="number of runs per semantics, using seed values 0..N-1 (default 10)",
    )
    p_sweep.add_argument(
        "--truth",
        choices=TRUTH_MODES,
        default="fixed",
        help="ground-truth mode per session (default fixed)",
    )
    p_sweep.add_argument(
        "--out", default=None, help="directory for per-run metrics files and summary.csv"
    )
    return parser


def _cmd_validate(args: argparse.Namespace) -> int:
    try:
        load_scenario(args.scenario)
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScenarioValidationError as exc:
        for error in exc.errors:
            print(f"validation error: {error}", file=sys.stderr)
        return EXIT_VALIDATION
    print(f"{args.scenario}: OK")
    return EXIT_OK


def _print_metrics(metrics) -> None:
    print(f"decisions: {metrics.decisions}  stops: {metrics.stops}  gos: {metrics.gos}")
    print(
        f"false gos: {metrics.false_go_count}  false stops: {metrics.false_stop_count}"
        f"  error rate: {metrics.error_rate:.6f}"
    )
    shown = " ".join(f"{reason}={count}" for reason, count in sorted(metrics.exclusions.items()))
    print(f"excluded claims: {shown}")
    for node in sorted(metrics.solo):
        stats = metrics.solo[node]
        print(
            f"node {node} solo error rate: {stats.error_rate:.6f}"
            f" ({stats.errors}/{stats.claims} claims)"
        )


def _cmd_run(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScenarioValidationError as exc:
        for error in exc.errors:
            print(f"validation error: {error}", file=sys.stderr)
        return EXIT_VALIDATION

    seed = args.seed if args.seed is not None else scenario.network.seed
    trace_stream = None
    try:
        if args.trace is not None:
            trace_stream = open(args.trace, "w", encoding="utf-8")
        try:
            _, metrics = run_once(
                scenario,
                args.semantics,
                seed=seed,
                truth_mode=args.truth,
                collect_trace=False,
                trace_stream=trace_stream,
            )
        finally:
            if trace_stream is not None:
                trace_stream.close()
    except ProtocolError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL

    print(f"scenario: {args.scenario}")
    print(f"semantics: {args.semantics.value}  seed: {seed}  truth: {args.truth}")
    _print_metrics(metrics)
    if args.trace is not None:
        print(f"trace written to {args.trace}")
    return EXIT_OK


def _cmd_sweep(args: argparse.Namespace) -> int:
    try:
        scenario = load_scenario(args.scenario)
    except ScenarioParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except ScenarioValidationError as exc:
        for error in exc.errors:
            print(f"validation error: {error}", file=sys.stderr)
        return EXIT_VALIDATION

    if args.seeds < 1:
        print("sweep needs --seeds >= 1", file=sys.stderr)
        return EXIT_VALIDATION

    try:
        result = run_sweep(
            scenario,
            args.semantics,
            seeds=args.seeds,
            truth_mode=args.truth,
            out_dir=args.out,
            scenario_name=Path(args.scenario).stem,
        )
    except ProtocolError as exc:
        print(f"protocol error: {exc}", file=sys.stderr)
        return EXIT_PROTOCOL

    print(f"scenario: {args.scenario}  seeds: {args.seeds}  truth: {args.truth}")
    header = f"{'semantics':<26} {'decisions':>9} {'stops':>7} {'gos':>7} {'false_go':>8} {'false_stop':>10} {'error_rate':>10}"
    print(header)
    for row in result.rows:
        print(
            f"{row.semantics:<26} {row.decisions:>9} {row.stops:>7} {row.gos:>7}"
            f" {row.false_go_count:>8} {row.false_stop_count:>10} {row.error_rate:>10.6f}"
        )
    for node, rate in result.solo_error_rates.items():
        print(f"node {node} solo error rate: {rate:.6f}")
    if args.out is not None:
        print(f"wrote {len(result.files)} file(s) under {args.out}")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "validate":
        return _cmd_validate(args)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "sweep":
        return _cmd_sweep(args)
    raise AssertionError(f"unreachable command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
