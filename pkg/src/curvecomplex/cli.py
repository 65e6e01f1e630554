"""Batch front end: run scenario files, emit reports and trajectory tables.

Exit status 0 means a verdict was computed, including "no" and
"undetermined"; nonzero is reserved for input or internal errors.
"""

from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from pathlib import Path

from .asymptotics import AnalysisError, ClassifierConfig, bounds_projections_verdict
from .report import report_payload, to_csv, to_json
from .scenario import ScenarioError, parse_scenario

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_INTERNAL = 3


def run_scenario(scenario, parallelism: int = 1):
    """Evaluate every sequence; returns [(name, ClassificationReport)].

    The per-sequence evaluations are independent pure computations, so the
    thread pool changes wall time only; results are merged in name order.
    """
    def work(item):
        sname, seq = item
        rep = bounds_projections_verdict(
            seq,
            scenario.marking,
            test_curves=scenario.test_curves or None,
            config=scenario.config,
            extra_witnesses=tuple(scenario.witnesses),
        )
        return sname, rep

    if parallelism > 1 and len(scenario.sequences) > 1:
        with ThreadPoolExecutor(max_workers=parallelism) as pool:
            results = list(pool.map(work, scenario.sequences))
    else:
        results = [work(item) for item in scenario.sequences]
    return sorted(results, key=lambda p: p[0])


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="curvecomplex",
        description="Decide the bounds-projections criterion for scenario files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="evaluate a scenario file")
    runp.add_argument("scenario", type=Path)
    runp.add_argument("--out", type=Path, default=None, help="JSON report path")
    runp.add_argument("--csv", type=Path, default=None, help="CSV table path")
    runp.add_argument(
        "--format", choices=("json", "csv", "both"), default="json"
    )
    runp.add_argument("--parallelism", type=int, default=1)
    runp.add_argument("--band", type=int, default=None, help="override band B0")
    runp.add_argument(
        "--residual", type=str, default=None, help="override residual (fraction)"
    )
    runp.add_argument("-v", "--verbose", action="store_true")
    args = parser.parse_args(argv)

    try:
        text = args.scenario.read_text()
    except OSError as exc:
        print(f"error: cannot read scenario: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        scenario = parse_scenario(text, name=args.scenario.stem)
        if args.band is not None or args.residual is not None:
            cfg = scenario.config
            scenario.config = ClassifierConfig(
                band=args.band if args.band is not None else cfg.band,
                residual=Fraction(args.residual)
                if args.residual is not None
                else cfg.residual,
                min_samples=cfg.min_samples,
            )
    except ScenarioError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT

    try:
        results = run_scenario(scenario, parallelism=args.parallelism)
    except AnalysisError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as exc:  # noqa: BLE001 - the contract wants a clean exit code
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_INTERNAL

    payload = report_payload(scenario, results)
    json_text = to_json(payload)
    csv_text = to_csv(scenario, results)

    if args.out:
        args.out.write_text(json_text)
    if args.csv:
        args.csv.write_text(csv_text)
    if not args.out and not args.csv:
        if args.format in ("json", "both"):
            sys.stdout.write(json_text)
        if args.format in ("csv", "both"):
            sys.stdout.write(csv_text)

    if args.verbose:
        for sname, rep in results:
            print(f"{sname}: verdict={rep.verdict}", file=sys.stderr)
            for cv in rep.curves:
                print(f"  {cv.curve_name}: {cv.kind}", file=sys.stderr)
    return EXIT_OK


if __name__ == "__main__":
    raise SystemExit(main())
