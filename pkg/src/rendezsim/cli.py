"""Command-line front end.

Subcommands:

* ``run``    — execute one scenario file; write the report, optional trace,
               optional sampled-position CSV and trajectory figure.
* ``sweep``  — seeded randomized batch with bound checking and plots.
* ``verify`` — run the executor and the sampling oracle on the same batch
               and report verdict agreement.

Exit codes: 0 success, 1 bound violation, 2 oracle disagreement,
3 input error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from fractions import Fraction
from pathlib import Path

from .exact import ScalarParseError, parse_scalar
from .reporting import (
    render_run_figure,
    sample_trajectories,
    write_run_csv,
    write_sweep_outputs,
    write_trace_file,
    write_verify_outputs,
)
from .simulator import InputError, Scenario, run_scenario
from .sweep import SweepSpec, run_sweep, run_verify

EXIT_OK = 0
EXIT_BOUND_VIOLATION = 1
EXIT_ORACLE_DISAGREEMENT = 2
EXIT_INPUT_ERROR = 3


def _load_json(path: str, what: str) -> dict:
    try:
        with open(path, "r", encoding="utf-8") as handle:
            return json.load(handle)
    except FileNotFoundError:
        raise InputError(f"{what}: file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise InputError(f"{what}: not valid JSON ({exc})") from None


def _parse_dt(text: str) -> Fraction:
    try:
        dt = parse_scalar(text)
    except ScalarParseError as exc:
        raise InputError(f"dt: {exc}") from None
    if dt <= 0:
        raise InputError("dt: must be positive")
    return dt


def cmd_run(args: argparse.Namespace) -> int:
    scenario = Scenario.from_json_dict(_load_json(args.scenario, "scenario"))
    if args.strict_paper_loop:
        scenario = replace(scenario, strict_paper_loop=True)
    record_trace = args.trace is not None or args.csv is not None or args.plot is not None
    report, events = run_scenario(scenario, record_trace=record_trace)
    if args.trace is not None:
        write_trace_file(Path(args.trace), scenario, events or [])
    if args.csv is not None or args.plot is not None:
        rows = sample_trajectories(scenario, report, events or [])
        if args.csv is not None:
            write_run_csv(Path(args.csv), rows)
        if args.plot is not None:
            render_run_figure(Path(args.plot), rows, report)
    doc = report.to_json_dict()
    text = json.dumps(doc, sort_keys=True, indent=2)
    if args.report is not None:
        Path(args.report).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    spec = SweepSpec.from_json_dict(_load_json(args.spec, "spec"))
    if args.strict_paper_loop:
        spec = replace(spec, strict_paper_loop=True)
    bound, records = run_sweep(spec)
    out_dir = Path(args.out)
    write_sweep_outputs(out_dir, spec, bound, records, render=not args.no_plot)
    summary = bound.to_json_dict()
    summary.pop("probe", None)
    print(json.dumps(summary, sort_keys=True, indent=2))
    if bound.violations:
        print(f"{len(bound.violations)} bound violation(s); see {out_dir}/bound_report.json",
              file=sys.stderr)
        return EXIT_BOUND_VIOLATION
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    spec = SweepSpec.from_json_dict(_load_json(args.spec, "spec"))
    if args.strict_paper_loop:
        spec = replace(spec, strict_paper_loop=True)
    dt = _parse_dt(args.dt)
    verify = run_verify(spec, dt)
    if args.out is not None:
        write_verify_outputs(Path(args.out), verify, render=not args.no_plot)
    doc = verify.to_json_dict()
    doc.pop("records", None)
    print(json.dumps(doc, sort_keys=True, indent=2))
    if not verify.clean:
        for index in verify.disagreements:
            record = verify.records[index]
            print("disagreement on scenario "
                  f"{index}: {json.dumps(record.scenario.to_json_dict(), sort_keys=True)}",
                  file=sys.stderr)
        return EXIT_ORACLE_DISAGREEMENT
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rendezsim",
        description="Exact simulator for two-agent rendezvous with sniffing sensors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="execute a single scenario file")
    p_run.add_argument("--scenario", required=True, help="scenario JSON file")
    p_run.add_argument("--trace", help="write the event trace (JSONL) here")
    p_run.add_argument("--csv", help="write sampled positions (CSV) here")
    p_run.add_argument("--plot", help="render the trajectory figure (PNG) here")
    p_run.add_argument("--report", help="write the report JSON here instead of stdout")
    p_run.add_argument("--strict-paper-loop", action="store_true",
                       help="use the published binary loop guard (skips the last bit)")
    p_run.set_defaults(func=cmd_run)

    p_sweep = sub.add_parser("sweep", help="seeded randomized sweep with bound checks")
    p_sweep.add_argument("--spec", required=True, help="sweep spec JSON file")
    p_sweep.add_argument("--out", required=True, help="output directory")
    p_sweep.add_argument("--no-plot", action="store_true", help="skip figure rendering")
    p_sweep.add_argument("--strict-paper-loop", action="store_true")
    p_sweep.set_defaults(func=cmd_sweep)

    p_verify = sub.add_parser("verify", help="executor vs sampling oracle agreement")
    p_verify.add_argument("--spec", required=True, help="sweep spec JSON file")
    p_verify.add_argument("--dt", default="1/1024", help="sampling step (rational)")
    p_verify.add_argument("--out", help="output directory for agreement artifacts")
    p_verify.add_argument("--no-plot", action="store_true")
    p_verify.add_argument("--strict-paper-loop", action="store_true")
    p_verify.set_defaults(func=cmd_verify)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (InputError, ScalarParseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT_ERROR


if __name__ == "__main__":
    sys.exit(main())
