"""Seeded randomized sweeps, bound verification, and the growth probe.

All randomness flows from a single 64-bit seed through Mersenne-Twister
integer draws (generator id: ``randgen.v1``); no float ever touches a
generated value, so (seed, spec) determines every scenario bit-for-bit.
Positions and offsets are rationals with bounded power-of-two denominators,
which keeps exact arithmetic cheap.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import ScalarParseError, decimal_str, format_scalar, parse_scalar
from .geometry import Point
from .labels import LabelSpace
from .oracle import OracleConfig, oracle_run
from .simulator import InputError, MeetingReport, Scenario, run_scenario

__all__ = [
    "GENERATOR_ID",
    "SweepSpec",
    "generate_scenarios",
    "RunRecord",
    "BoundReport",
    "run_sweep",
    "VerifyRecord",
    "VerifyReport",
    "run_verify",
    "run_probe",
    "check_monotone_run",
    "check_binary_run",
]

GENERATOR_ID = "randgen.v1"

_ZERO = Fraction(0)
_ONE = Fraction(1)


# ---------------------------------------------------------------------------
# Sweep specification


@dataclass(frozen=True)
class SweepSpec:
    seed: int
    count: int
    model: str
    label_space_grid: tuple[int, ...] = (4, 256, 2**20)
    distance_range: tuple[Fraction, Fraction] = (Fraction(3, 2), Fraction(1000))
    rho_grid: tuple[Fraction, ...] = (Fraction(4), Fraction(16), Fraction(64), Fraction(256))
    offset_mode: str = "random"  # simultaneous | fixed | random
    offset_fixed: Fraction = Fraction(5)
    max_offset: Fraction = Fraction(8)
    denominator_log2: int = 16
    distortion: str | None = None
    strict_paper_loop: bool = False
    probe_lambdas: tuple[int, ...] = ()
    probe_rho: Fraction = Fraction(16)

    def validate(self) -> None:
        if not (0 <= self.seed < 2**64):
            raise InputError("seed: expected a 64-bit unsigned integer")
        if self.count < 1:
            raise InputError("count: at least one run")
        if self.model not in ("monotone", "binary"):
            raise InputError(f"model: expected 'monotone' or 'binary', got {self.model!r}")
        if self.offset_mode not in ("simultaneous", "fixed", "random"):
            raise InputError(f"offset_mode: unknown mode {self.offset_mode!r}")
        lo, hi = self.distance_range
        if not (0 < lo < hi):
            raise InputError("distance_range: expected 0 < lo < hi")
        if any(size < 2 for size in self.label_space_grid):
            raise InputError("label_space_grid: sizes must be at least 2")
        if self.model == "binary" and any(r <= 1 for r in self.rho_grid):
            raise InputError("rho_grid: every sensing radius must exceed 1")

    def to_json_dict(self) -> dict:
        return {
            "generator": GENERATOR_ID,
            "seed": self.seed,
            "count": self.count,
            "model": self.model,
            "L_grid": list(self.label_space_grid),
            "D_range": [format_scalar(self.distance_range[0]),
                        format_scalar(self.distance_range[1])],
            "rho_grid": [format_scalar(r) for r in self.rho_grid],
            "offset_mode": self.offset_mode,
            "offset_fixed": format_scalar(self.offset_fixed),
            "max_offset": format_scalar(self.max_offset),
            "denominator_log2": self.denominator_log2,
            "distortion": self.distortion,
            "strict_paper_loop": self.strict_paper_loop,
            "probe_lambdas": list(self.probe_lambdas),
            "probe_rho": format_scalar(self.probe_rho),
        }

    @classmethod
    def from_json_dict(cls, doc: dict) -> "SweepSpec":
        if not isinstance(doc, dict):
            raise InputError("spec: expected a JSON object")

        def scalar(path: str, value: object) -> Fraction:
            try:
                return parse_scalar(value)
            except ScalarParseError as exc:
                raise InputError(f"{path}: {exc}") from None

        for name in ("seed", "count", "model"):
            if name not in doc:
                raise InputError(f"{name}: missing required field")
        d_range = doc.get("D_range", ["3/2", "1000"])
        if not (isinstance(d_range, list) and len(d_range) == 2):
            raise InputError("D_range: expected [lo, hi]")
        spec = cls(
            seed=doc["seed"],
            count=doc["count"],
            model=doc["model"],
            label_space_grid=tuple(doc.get("L_grid", [4, 256, 2**20])),
            distance_range=(scalar("D_range[0]", d_range[0]), scalar("D_range[1]", d_range[1])),
            rho_grid=tuple(scalar(f"rho_grid[{i}]", r)
                           for i, r in enumerate(doc.get("rho_grid", ["4", "16", "64", "256"]))),
            offset_mode=doc.get("offset_mode", "random"),
            offset_fixed=scalar("offset_fixed", doc.get("offset_fixed", "5")),
            max_offset=scalar("max_offset", doc.get("max_offset", "8")),
            denominator_log2=doc.get("denominator_log2", 16),
            distortion=doc.get("distortion"),
            strict_paper_loop=bool(doc.get("strict_paper_loop", False)),
            probe_lambdas=tuple(doc.get("probe_lambdas", [])),
            probe_rho=scalar("probe_rho", doc.get("probe_rho", "16")),
        )
        spec.validate()
        return spec


# ---------------------------------------------------------------------------
# Scenario generation


def _rand_rational(rng: random.Random, lo: Fraction, hi: Fraction, den_log2: int) -> Fraction:
    den = 2**den_log2
    lo_n = -((-lo.numerator * den) // lo.denominator)  # ceil(lo * den)
    hi_n = (hi.numerator * den) // hi.denominator  # floor(hi * den)
    if hi_n < lo_n:
        raise ValueError("empty rational range")
    return Fraction(rng.randrange(lo_n, hi_n + 1), den)


def _rand_magnitude(rng: random.Random, lo: Fraction, hi: Fraction, den_log2: int) -> Fraction:
    """Bit-length stratified draw: roughly log-uniform across magnitudes."""
    den = 2**den_log2
    lo_n = max(1, -((-lo.numerator * den) // lo.denominator))
    hi_n = (hi.numerator * den) // hi.denominator
    if hi_n < lo_n:
        raise ValueError("empty magnitude range")
    k = rng.randrange(lo_n.bit_length(), hi_n.bit_length() + 1)
    a = max(lo_n, 1 << (k - 1))
    b = min(hi_n, (1 << k) - 1)
    if b < a:
        return Fraction(rng.randrange(lo_n, hi_n + 1), den)
    return Fraction(rng.randrange(a, b + 1), den)


def generate_scenarios(spec: SweepSpec) -> list[Scenario]:
    spec.validate()
    rng = random.Random(spec.seed)
    den_log2 = spec.denominator_log2
    scenarios: list[Scenario] = []
    for _ in range(spec.count):
        size = spec.label_space_grid[rng.randrange(len(spec.label_space_grid))]
        label_a = rng.randrange(size)
        label_b = rng.randrange(size - 1)
        if label_b >= label_a:
            label_b += 1
        rho = None
        d_lo, d_hi = spec.distance_range
        if spec.model == "binary":
            rho = spec.rho_grid[rng.randrange(len(spec.rho_grid))]
            d_hi = min(d_hi, rho)  # stay inside the sensing radius
        # split a magnitude into vertical + horizontal separations; retry
        # until the straight-line distance lands in (1, d_hi)
        while True:
            m = _rand_magnitude(rng, max(d_lo, _ONE), d_hi, den_log2)
            u = Fraction(rng.randrange(0, 2**den_log2 + 1), 2**den_log2)
            sep_v = m * u
            sep_h = m - sep_v
            dist_sq = sep_v * sep_v + sep_h * sep_h
            if dist_sq <= 1:
                continue
            if spec.model == "binary" and dist_sq >= rho * rho:
                continue
            break
        ax = _rand_rational(rng, Fraction(-8), Fraction(8), den_log2)
        ay = _rand_rational(rng, Fraction(-8), Fraction(8), den_log2)
        sign_v = 1 if rng.getrandbits(1) else -1
        sign_h = 1 if rng.getrandbits(1) else -1
        pos_a = Point(ax, ay)
        pos_b = Point(ax + sign_h * sep_h, ay + sign_v * sep_v)
        if spec.offset_mode == "simultaneous":
            start_a = start_b = _ZERO
        else:
            if spec.offset_mode == "fixed":
                offset = spec.offset_fixed
            else:
                offset = _rand_magnitude(rng, Fraction(1, 16), spec.max_offset, den_log2)
            if rng.getrandbits(1):
                start_a, start_b = _ZERO, offset
            else:
                start_a, start_b = offset, _ZERO
        scenarios.append(
            Scenario(
                model=spec.model,
                space=LabelSpace(size),
                label_a=label_a,
                label_b=label_b,
                pos_a=pos_a,
                pos_b=pos_b,
                start_a=start_a,
                start_b=start_b,
                rho=rho,
                distortion=spec.distortion,
                strict_paper_loop=spec.strict_paper_loop,
            )
        )
    return scenarios


# ---------------------------------------------------------------------------
# Per-run checks


def check_monotone_run(report: MeetingReport) -> list[str]:
    """Violations of the proven monotone-model behavior, empty when clean."""
    sc = report.scenario
    problems: list[str] = []
    if not report.met:
        problems.append(f"no meeting ({report.end_reason})")
        return problems
    allowance = report.bound_allowance()
    simultaneous = sc.simultaneous
    if not report.meeting_within(allowance, strict=simultaneous):
        kind = "x+y+5 (strict)" if simultaneous else "x+y+8"
        problems.append(f"meeting time exceeds {kind}")
    sep_budget = {"vertical_approach": sc.sep_vertical + 4,
                  "horizontal_approach": sc.sep_horizontal + 4}
    for name, summary in report.agents.items():
        log = summary.phase_log
        for idx, (phase, enter, _own, _other) in enumerate(log):
            nxt = log[idx + 1] if idx + 1 < len(log) else None
            if phase == "vertical_approach" and nxt is not None \
                    and nxt[0] == "horizontal_approach":
                # on entering the horizontal phase the agents must sit
                # within one unit of each other vertically
                if abs(nxt[2].y - nxt[3].y) > 1:
                    problems.append(f"agent {name}: vertical separation above 1 "
                                    "at the end of the vertical phase")
            if not simultaneous and nxt is not None and phase in sep_budget:
                if nxt[1] - enter > sep_budget[phase]:
                    problems.append(f"agent {name}: {phase} exceeded its time budget")
    if simultaneous:
        flags = [s.sim for s in report.agents.values()]
        if flags != [True, True]:
            problems.append("simultaneous start not detected by both agents")
    return problems


def check_binary_run(report: MeetingReport) -> list[str]:
    """Violations of the binary-model contract, empty when clean."""
    problems: list[str] = []
    leaders = sum(1 for s in report.agents.values() if s.leading)
    if report.out_of_contract:
        if report.met:
            problems.append("met although the start distance was out of contract")
        if report.end_reason != "both_halted":
            problems.append(f"expected both agents halted, got {report.end_reason}")
        return problems
    if not report.met:
        problems.append(f"no meeting ({report.end_reason})")
    if leaders > 1:
        problems.append("two leading agents")
    elif leaders == 0:
        # meeting may interrupt the contact-losing phase before either agent
        # exits it; only then is the symmetry break allowed to be missing
        mid_lose_contact = report.met and any(
            s.final_phase == "lose_contact" for s in report.agents.values()
        )
        if not mid_lose_contact:
            problems.append("no leading agent although contact loss completed")
    return problems


# ---------------------------------------------------------------------------
# Sweep driver


@dataclass
class RunRecord:
    index: int
    scenario: Scenario
    report: MeetingReport
    problems: list[str]

    def ratio(self) -> Fraction | None:
        """time/(x+y) for monotone runs, time/(rho*lambda) for binary."""
        if not report_met(self.report):
            return None
        elapsed = self.report.touch.midpoint() - self.report.later_start
        sc = self.scenario
        if sc.model == "monotone":
            denom = sc.sep_vertical + sc.sep_horizontal
        else:
            denom = self.report.rho_lambda()
        return elapsed / denom if denom else None

    def to_json_dict(self) -> dict:
        doc = {
            "index": self.index,
            "scenario": self.scenario.to_json_dict(),
            "report": self.report.to_json_dict(),
            "problems": self.problems,
        }
        ratio = self.ratio()
        if ratio is not None:
            doc["ratio_dec"] = decimal_str(ratio, 6)
        return doc


def report_met(report: MeetingReport) -> bool:
    return report.met and report.touch is not None


@dataclass
class BoundReport:
    model: str
    count: int
    met_count: int
    out_of_contract: list[int]
    violations: list[str]
    max_ratio: Fraction | None
    mean_ratio: Fraction | None
    cell_ratios: dict[str, Fraction] = field(default_factory=dict)
    max_dance_duration: Fraction | None = None
    probe_rows: list[dict] = field(default_factory=list)

    def to_json_dict(self) -> dict:
        return {
            "model": self.model,
            "count": self.count,
            "met_count": self.met_count,
            "out_of_contract": self.out_of_contract,
            "violations": self.violations,
            "max_ratio_dec": None if self.max_ratio is None else decimal_str(self.max_ratio, 6),
            "mean_ratio_dec": None if self.mean_ratio is None else decimal_str(self.mean_ratio, 6),
            "cell_ratios_dec": {key: decimal_str(val, 6)
                                for key, val in sorted(self.cell_ratios.items())},
            "max_dance_duration_dec": None if self.max_dance_duration is None
            else decimal_str(self.max_dance_duration, 6),
            "probe": self.probe_rows,
        }


def _dance_duration(report: MeetingReport) -> Fraction | None:
    longest = None
    for summary in report.agents.values():
        for dur_phase, duration in summary.phase_durations(report.end_time).items():
            if dur_phase == "dance":
                if longest is None or duration > longest:
                    longest = duration
    return longest


def run_sweep(spec: SweepSpec) -> tuple[BoundReport, list[RunRecord]]:
    spec.validate()
    scenarios = generate_scenarios(spec)
    records: list[RunRecord] = []
    violations: list[str] = []
    out_of_contract: list[int] = []
    ratios: list[Fraction] = []
    cell_ratios: dict[str, Fraction] = {}
    max_dance: Fraction | None = None
    met_count = 0

    for index, scenario in enumerate(scenarios):
        report, _ = run_scenario(scenario, record_trace=False)
        if scenario.model == "monotone":
            problems = check_monotone_run(report)
            dance = _dance_duration(report)
            if dance is not None and (max_dance is None or dance > max_dance):
                max_dance = dance
        else:
            problems = check_binary_run(report)
        record = RunRecord(index, scenario, report, problems)
        records.append(record)
        if report.met:
            met_count += 1
        if report.out_of_contract:
            out_of_contract.append(index)
        violations.extend(f"run {index}: {problem}" for problem in problems)
        ratio = record.ratio()
        if ratio is not None:
            ratios.append(ratio)
            if scenario.model == "binary":
                key = f"rho={format_scalar(scenario.rho)},L={scenario.space.size}"
                if key not in cell_ratios or ratio > cell_ratios[key]:
                    cell_ratios[key] = ratio

    probe_rows = run_probe(spec) if spec.probe_lambdas else []
    bound = BoundReport(
        model=spec.model,
        count=len(records),
        met_count=met_count,
        out_of_contract=out_of_contract,
        violations=violations,
        max_ratio=max(ratios) if ratios else None,
        mean_ratio=sum(ratios) / len(ratios) if ratios else None,
        cell_ratios=cell_ratios,
        max_dance_duration=max_dance,
        probe_rows=probe_rows,
    )
    return bound, records


# ---------------------------------------------------------------------------
# Growth probe: labels differing only at the last transformed-label bit


def probe_scenarios(width: int, rho: Fraction, seed: int) -> list[Scenario]:
    """Hard label pair (0 and 1 differ only at the last bit) over a small
    deterministic grid of placements inside the sensing radius."""
    rng = random.Random(seed ^ width)
    size = 2**width
    scenarios = []
    for _ in range(12):
        sep_v = _rand_rational(rng, Fraction(0), min(rho - 1, Fraction(6)), 12)
        sep_h = _rand_rational(rng, Fraction(0), min(rho - 1, Fraction(6)), 12)
        if sep_v * sep_v + sep_h * sep_h <= 1:
            sep_h = sep_h + 2
        if sep_v * sep_v + sep_h * sep_h >= rho * rho:
            continue
        simultaneous = bool(rng.getrandbits(1))
        offset = _ZERO if simultaneous else Fraction(rng.randrange(1, 9))
        scenarios.append(
            Scenario(
                model="binary",
                space=LabelSpace(size),
                label_a=0,
                label_b=1,
                pos_a=Point(_ZERO, _ZERO),
                pos_b=Point(sep_h, sep_v),
                start_a=_ZERO,
                start_b=offset,
                rho=rho,
            )
        )
    return scenarios


def run_probe(spec: SweepSpec) -> list[dict]:
    rows = []
    for width in spec.probe_lambdas:
        worst: Fraction | None = None
        runs = 0
        for scenario in probe_scenarios(width, spec.probe_rho, spec.seed):
            report, _ = run_scenario(scenario, record_trace=False)
            if not report.met:
                continue
            elapsed = report.touch.midpoint() - report.later_start
            runs += 1
            if worst is None or elapsed > worst:
                worst = elapsed
        rows.append(
            {
                "lambda": width,
                "rho": format_scalar(spec.probe_rho),
                "runs": runs,
                "worst_time_dec": None if worst is None else decimal_str(worst, 6),
                "rho_lambda_dec": decimal_str(spec.probe_rho * width, 6),
            }
        )
    return rows


# ---------------------------------------------------------------------------
# Dual-engine verification


@dataclass
class VerifyRecord:
    index: int
    scenario: Scenario
    executor_met: bool
    oracle_met: bool
    agree: bool
    excluded: str | None  # "tangential" | "budget_margin" | None
    gap_dec: str | None

    def to_json_dict(self) -> dict:
        return {
            "index": self.index,
            "executor_met": self.executor_met,
            "oracle_met": self.oracle_met,
            "agree": self.agree,
            "excluded": self.excluded,
            "gap_dec": self.gap_dec,
        }


@dataclass
class VerifyReport:
    dt: Fraction
    total: int
    agreements: int
    disagreements: list[int]
    exclusions: list[tuple[int, str]]
    max_gap: Fraction | None
    records: list[VerifyRecord]

    @property
    def clean(self) -> bool:
        return not self.disagreements

    def to_json_dict(self) -> dict:
        return {
            "dt": format_scalar(self.dt),
            "total": self.total,
            "agreements": self.agreements,
            "disagreements": self.disagreements,
            "exclusions": [{"index": i, "reason": r} for i, r in self.exclusions],
            "max_gap_dec": None if self.max_gap is None else decimal_str(self.max_gap),
            "records": [record.to_json_dict() for record in self.records],
        }


def run_verify(spec: SweepSpec, dt: Fraction) -> VerifyReport:
    spec.validate()
    scenarios = generate_scenarios(spec)
    records: list[VerifyRecord] = []
    disagreements: list[int] = []
    exclusions: list[tuple[int, str]] = []
    max_gap: Fraction | None = None
    agreements = 0

    for index, scenario in enumerate(scenarios):
        report, _ = run_scenario(scenario, record_trace=False)
        result = oracle_run(OracleConfig(scenario=scenario, dt=dt))
        excluded: str | None = None
        gap_dec: str | None = None
        agree = report.met == result.met
        if report.met and report.touch is not None:
            if report.touch.tangential:
                # sampling has no claim on a touch that never goes below
                # the threshold
                excluded = "tangential"
            elif report.touch.compare_to(report.budget_cap - dt) > 0:
                # touch within one step of the budget: the oracle's grid may
                # legitimately end before its first detecting sample
                excluded = "budget_margin"
            elif agree:
                # oracle detects late by at most one step: t* <= hit <= t* + dt
                hit = result.hit_time
                assert hit is not None
                late_ok = report.touch.compare_to(hit) <= 0
                close_ok = report.touch.compare_to(hit - dt) >= 0
                if not (late_ok and close_ok):
                    agree = False
                else:
                    gap = hit - report.touch.midpoint()
                    gap_dec = decimal_str(gap)
                    if max_gap is None or gap > max_gap:
                        max_gap = gap
        if excluded is not None:
            exclusions.append((index, excluded))
        elif agree:
            agreements += 1
        else:
            disagreements.append(index)
        records.append(
            VerifyRecord(index, scenario, report.met, result.met, agree, excluded, gap_dec)
        )

    return VerifyReport(
        dt=dt,
        total=len(records),
        agreements=agreements,
        disagreements=disagreements,
        exclusions=exclusions,
        max_gap=max_gap,
        records=records,
    )
