"""Report emission: delimited files plus rendered figures.

Every report path writes machine-readable CSV/JSONL and, next to it, a
matplotlib figure of the same data.  Figures are presentational; all
decisions are made on the exact values.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .exact import decimal_str, format_scalar, sqrt_decimal_str
from .geometry import Point, squared_distance
from .simulator import MeetingReport, Scenario, TraceEvent, trace_lines
from .sweep import BoundReport, RunRecord, SweepSpec, VerifyReport

__all__ = [
    "write_trace_file",
    "sample_trajectories",
    "write_run_csv",
    "render_run_figure",
    "write_sweep_outputs",
    "render_sweep_figure",
    "render_probe_figure",
    "write_verify_outputs",
]


def _json_line(doc: dict) -> str:
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def write_trace_file(path: Path, scenario: Scenario, events: list[TraceEvent]) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as handle:
        for doc in trace_lines(scenario, events):
            handle.write(_json_line(doc))


def _plt():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


# ---------------------------------------------------------------------------
# Single-run trajectory sampling


def _breakpoints(events: list[TraceEvent], agent: str) -> list[tuple[Fraction, Point]]:
    points = []
    for event in events:
        if event.agent != agent:
            continue
        if event.kind in ("appear", "action_begin", "action_end"):
            x, y = event.data["pos"]
            points.append((event.time, Point(Fraction(x), Fraction(y))))
    return points


def _position_on(path: list[tuple[Fraction, Point]], t: Fraction) -> Point:
    if t <= path[0][0]:
        return path[0][1]
    for (t0, p0), (t1, p1) in zip(path, path[1:]):
        if t0 <= t <= t1:
            if t1 == t0:
                return p1
            frac = (t - t0) / (t1 - t0)
            return Point(p0.x + (p1.x - p0.x) * frac, p0.y + (p1.y - p0.y) * frac)
    return path[-1][1]


def sample_trajectories(
    scenario: Scenario,
    report: MeetingReport,
    events: list[TraceEvent],
    step: Fraction | None = None,
) -> list[dict]:
    """Rows of (time, both positions, distance) on a uniform grid.

    The default step is (x+y)/1024, purely presentational.
    """
    if step is None:
        spread = scenario.sep_vertical + scenario.sep_horizontal
        step = spread / 1024 if spread > 0 else Fraction(1, 64)
    t0 = min(scenario.start_a, scenario.start_b)
    t1 = report.end_time
    path_a = _breakpoints(events, "a")
    path_b = _breakpoints(events, "b")
    rows = []
    t = t0
    while True:
        pa = _position_on(path_a, t)
        pb = _position_on(path_b, t)
        rows.append(
            {
                "time": decimal_str(t),
                "x_a": decimal_str(pa.x),
                "y_a": decimal_str(pa.y),
                "x_b": decimal_str(pb.x),
                "y_b": decimal_str(pb.y),
                "dist": sqrt_decimal_str(squared_distance(pa, pb)),
            }
        )
        if t >= t1:
            break
        t = min(t + step, t1)
    return rows


def write_run_csv(path: Path, rows: Iterable[dict]) -> None:
    rows = list(rows)
    with path.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=["time", "x_a", "y_a", "x_b", "y_b", "dist"])
        writer.writeheader()
        writer.writerows(rows)


def render_run_figure(path: Path, rows: list[dict], report: MeetingReport) -> None:
    plt = _plt()
    xs_a = [float(r["x_a"]) for r in rows]
    ys_a = [float(r["y_a"]) for r in rows]
    xs_b = [float(r["x_b"]) for r in rows]
    ys_b = [float(r["y_b"]) for r in rows]
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.plot(xs_a, ys_a, "-", color="tab:blue", label="agent a")
    ax.plot(xs_b, ys_b, "-", color="tab:orange", label="agent b")
    ax.plot(xs_a[0], ys_a[0], "o", color="tab:blue")
    ax.plot(xs_b[0], ys_b[0], "o", color="tab:orange")
    if report.met:
        ax.plot(xs_a[-1], ys_a[-1], "*", color="black", markersize=12, label="meeting")
    ax.set_xlabel("East")
    ax.set_ylabel("North")
    ax.set_aspect("equal", adjustable="datalim")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    title = "met" if report.met else report.end_reason
    ax.set_title(f"{report.scenario.model} run: {title}")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


# ---------------------------------------------------------------------------
# Sweep outputs


_SWEEP_FIELDS = [
    "index", "model", "L", "label_a", "label_b", "simultaneous", "rho",
    "sep_vertical", "sep_horizontal", "distance", "met", "end_reason",
    "time_from_later", "ratio", "out_of_contract", "problems",
]


def _sweep_row(record: RunRecord) -> dict:
    sc = record.scenario
    report = record.report
    elapsed = None
    if report.met and report.touch is not None:
        elapsed = decimal_str(report.touch.midpoint() - report.later_start, 6)
    ratio = record.ratio()
    return {
        "index": record.index,
        "model": sc.model,
        "L": sc.space.size,
        "label_a": sc.label_a,
        "label_b": sc.label_b,
        "simultaneous": sc.simultaneous,
        "rho": "" if sc.rho is None else format_scalar(sc.rho),
        "sep_vertical": decimal_str(sc.sep_vertical, 6),
        "sep_horizontal": decimal_str(sc.sep_horizontal, 6),
        "distance": sqrt_decimal_str(sc.initial_distance_sq, 6),
        "met": report.met,
        "end_reason": report.end_reason,
        "time_from_later": "" if elapsed is None else elapsed,
        "ratio": "" if ratio is None else decimal_str(ratio, 6),
        "out_of_contract": report.out_of_contract,
        "problems": "; ".join(record.problems),
    }


def write_sweep_outputs(out_dir: Path, spec: SweepSpec, bound: BoundReport,
                        records: list[RunRecord], render: bool = True) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []

    runs_jsonl = out_dir / "runs.jsonl"
    with runs_jsonl.open("w", encoding="utf-8", newline="\n") as handle:
        handle.write(_json_line({"schema": "rendezsim.sweep.v1", "spec": spec.to_json_dict()}))
        for record in records:
            handle.write(_json_line(record.to_json_dict()))
    written.append(runs_jsonl)

    runs_csv = out_dir / "runs.csv"
    with runs_csv.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(handle, fieldnames=_SWEEP_FIELDS)
        writer.writeheader()
        for record in records:
            writer.writerow(_sweep_row(record))
    written.append(runs_csv)

    bound_json = out_dir / "bound_report.json"
    bound_json.write_text(
        json.dumps(bound.to_json_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    written.append(bound_json)

    if bound.probe_rows:
        probe_csv = out_dir / "probe.csv"
        with probe_csv.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.DictWriter(
                handle, fieldnames=["lambda", "rho", "runs", "worst_time_dec", "rho_lambda_dec"]
            )
            writer.writeheader()
            writer.writerows(bound.probe_rows)
        written.append(probe_csv)

    if render:
        fig_path = out_dir / "bounds.png"
        render_sweep_figure(fig_path, records)
        written.append(fig_path)
        if bound.probe_rows:
            probe_fig = out_dir / "probe.png"
            render_probe_figure(probe_fig, bound.probe_rows)
            written.append(probe_fig)
    return written


def render_sweep_figure(path: Path, records: list[RunRecord]) -> None:
    plt = _plt()
    fig, ax = plt.subplots(figsize=(7, 5))
    model = records[0].scenario.model if records else "monotone"
    if model == "monotone":
        xs = [float(r.scenario.sep_vertical + r.scenario.sep_horizontal) for r in records
              if r.report.met]
        ys = [float(r.report.touch.midpoint() - r.report.later_start) for r in records
              if r.report.met]
        sims = [r.scenario.simultaneous for r in records if r.report.met]
        ax.scatter([x for x, s in zip(xs, sims) if not s],
                   [y for y, s in zip(ys, sims) if not s],
                   s=8, alpha=0.5, label="staggered")
        ax.scatter([x for x, s in zip(xs, sims) if s],
                   [y for y, s in zip(ys, sims) if s],
                   s=8, alpha=0.5, label="simultaneous")
        if xs:
            grid = sorted(xs)
            ax.plot(grid, [v + 8 for v in grid], "k--", lw=1, label="x+y+8")
            ax.plot(grid, [v + 5 for v in grid], "k:", lw=1, label="x+y+5")
        ax.set_xlabel("x+y (initial vertical + horizontal separation)")
        ax.set_ylabel("meeting time from later start")
    else:
        xs = [float(r.report.rho_lambda()) for r in records
              if r.report.met and r.report.rho_lambda() is not None]
        ys = [float(r.report.touch.midpoint() - r.report.later_start) for r in records
              if r.report.met and r.report.rho_lambda() is not None]
        ax.scatter(xs, ys, s=8, alpha=0.5, label="runs")
        if xs:
            ratios = [y / x for x, y in zip(xs, ys) if x]
            worst = max(ratios) if ratios else 1.0
            grid = sorted(set(xs))
            ax.plot(grid, [worst * v for v in grid], "k--", lw=1,
                    label=f"max ratio {worst:.3f} × rho·lambda")
        ax.set_xscale("log")
        ax.set_yscale("log")
        ax.set_xlabel("rho · lambda")
        ax.set_ylabel("meeting time from later start")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    ax.set_title(f"{model} sweep: meeting times vs bound reference")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_probe_figure(path: Path, probe_rows: list[dict]) -> None:
    plt = _plt()
    lams = [row["lambda"] for row in probe_rows if row["worst_time_dec"] is not None]
    worst = [float(row["worst_time_dec"]) for row in probe_rows
             if row["worst_time_dec"] is not None]
    ref = [float(row["rho_lambda_dec"]) for row in probe_rows
           if row["worst_time_dec"] is not None]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    ax.plot(lams, worst, "o-", label="worst observed meeting time")
    ax.plot(lams, ref, "k--", label="rho · lambda reference")
    ax.set_xlabel("lambda (transformed label width)")
    ax.set_ylabel("time from later start")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    ax.set_title("hard label pair: growth against rho·lambda")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


# ---------------------------------------------------------------------------
# Verify outputs


def write_verify_outputs(out_dir: Path, verify: VerifyReport, render: bool = True) -> list[Path]:
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    agreement_json = out_dir / "agreement.json"
    agreement_json.write_text(
        json.dumps(verify.to_json_dict(), sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )
    written.append(agreement_json)

    gaps_csv = out_dir / "gaps.csv"
    with gaps_csv.open("w", encoding="utf-8", newline="") as handle:
        writer = csv.DictWriter(
            handle,
            fieldnames=["index", "executor_met", "oracle_met", "agree", "excluded", "gap_dec"],
        )
        writer.writeheader()
        for record in verify.records:
            writer.writerow(record.to_json_dict())
    written.append(gaps_csv)

    if render:
        plt = _plt()
        gaps = [(r.index, float(r.gap_dec)) for r in verify.records if r.gap_dec is not None]
        fig, ax = plt.subplots(figsize=(7, 4))
        if gaps:
            ax.scatter([g[0] for g in gaps], [g[1] for g in gaps], s=10, alpha=0.6)
        ax.axhline(float(verify.dt), color="k", ls="--", lw=1, label="dt")
        ax.set_xlabel("scenario index")
        ax.set_ylabel("oracle lateness (sampled - exact)")
        ax.grid(True, alpha=0.3)
        ax.legend(loc="best")
        ax.set_title("dual-engine touch-time gaps")
        fig.tight_layout()
        fig_path = out_dir / "gaps.png"
        fig.savefig(fig_path, dpi=150)
        plt.close(fig)
        written.append(fig_path)
    return written
