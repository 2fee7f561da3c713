"""Event-driven two-agent executor on an exact global timeline.

One run interleaves both agent programs, delivers sensor readings at
appearances and action ends, and watches every traversed time window for
the first instant the discs touch (center distance exactly 1).  Everything
is exact rational arithmetic; a run is a pure function of its scenario.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterator

from .binary import BinaryProgram
from .exact import ScalarParseError, decimal_str, format_scalar, parse_scalar, sqrt_decimal_str
from .geometry import (
    MotionSegment,
    Point,
    TouchTime,
    first_touch_time,
    squared_distance,
    velocity_of,
)
from .kernel import (
    ABSENT,
    DISTORTIONS,
    FAR,
    NEAR,
    AgentProtocolError,
    HaltForever,
    Move,
    OpaqueOrderedLevel,
    Present,
    ReactiveProgram,
    Wait,
)
from .labels import LabelSpace
from .monotone import MonotoneProgram

__all__ = [
    "InputError",
    "ProtocolViolation",
    "Scenario",
    "TraceEvent",
    "AgentSummary",
    "MeetingReport",
    "run_scenario",
    "trace_lines",
    "TRACE_SCHEMA",
]

TRACE_SCHEMA = "rendezsim.trace.v1"

_ZERO = Fraction(0)
_ONE = Fraction(1)
_ZERO_VEL = (_ZERO, _ZERO)

# deterministic ordering of simultaneous events
_RANK_APPEAR = 0
_RANK_END = 1
_RANK_MEETING = 2
_RANK_READING = 3
_RANK_BEGIN = 4  # also halts
_RANK_BUDGET = 5


class InputError(ValueError):
    """A scenario or spec document that fails validation; message names the field."""


class ProtocolViolation(RuntimeError):
    """An agent program broke the model contract during a run."""

    def __init__(self, agent: str, message: str, events: list["TraceEvent"] | None) -> None:
        super().__init__(f"agent {agent}: {message}")
        self.agent = agent
        self.events = events or []


# ---------------------------------------------------------------------------
# Scenario


@dataclass(frozen=True)
class Scenario:
    """The adversary's choice: who, where, when, and which sensing model."""

    model: str  # "monotone" | "binary"
    space: LabelSpace
    label_a: int
    label_b: int
    pos_a: Point
    pos_b: Point
    start_a: Fraction = _ZERO
    start_b: Fraction = _ZERO
    rho: Fraction | None = None
    distortion: str | None = None
    time_budget: Fraction | None = None
    strict_paper_loop: bool = False

    def validate(self) -> None:
        if self.model not in ("monotone", "binary"):
            raise InputError(f"model: expected 'monotone' or 'binary', got {self.model!r}")
        if not self.space.contains(self.label_a):
            raise InputError(f"label_a: {self.label_a} outside 0..{self.space.size - 1}")
        if not self.space.contains(self.label_b):
            raise InputError(f"label_b: {self.label_b} outside 0..{self.space.size - 1}")
        if self.label_a == self.label_b:
            raise InputError("label_b: agents must carry different labels")
        if self.start_a < 0 or self.start_b < 0:
            raise InputError("start_a/start_b: start times must be non-negative")
        if self.model == "binary":
            if self.rho is None:
                raise InputError("rho: required for the binary model")
            if self.rho <= 1:
                raise InputError("rho: the sensing radius must exceed 1")
            if self.distortion is not None:
                raise InputError("distortion: only meaningful for the monotone model")
        else:
            if self.distortion is not None and self.distortion not in DISTORTIONS:
                raise InputError(
                    f"distortion: unknown id {self.distortion!r}; "
                    f"known: {sorted(DISTORTIONS)}"
                )
        if self.time_budget is not None and self.time_budget <= 0:
            raise InputError("time_budget: must be strictly positive")

    # -- derived quantities ---------------------------------------------------

    @property
    def later_start(self) -> Fraction:
        return max(self.start_a, self.start_b)

    @property
    def simultaneous(self) -> bool:
        return self.start_a == self.start_b

    @property
    def sep_vertical(self) -> Fraction:
        """Initial North-South distance between the start points."""
        return abs(self.pos_a.y - self.pos_b.y)

    @property
    def sep_horizontal(self) -> Fraction:
        """Initial East-West distance between the start points."""
        return abs(self.pos_a.x - self.pos_b.x)

    @property
    def initial_distance_sq(self) -> Fraction:
        return squared_distance(self.pos_a, self.pos_b)

    def default_budget(self) -> Fraction:
        """Generous multiple of the expected meeting time, counted from the
        later start; exhausting it signals a bug or an out-of-contract run."""
        if self.model == "monotone":
            return 4 * (self.sep_vertical + self.sep_horizontal) + 64
        assert self.rho is not None
        return 512 * self.rho * self.space.width

    def budget(self) -> Fraction:
        return self.time_budget if self.time_budget is not None else self.default_budget()

    # -- JSON -----------------------------------------------------------------

    def to_json_dict(self) -> dict:
        doc: dict = {
            "model": self.model,
            "L": self.space.size,
            "label_a": self.label_a,
            "label_b": self.label_b,
            "pos_a": {"x": format_scalar(self.pos_a.x), "y": format_scalar(self.pos_a.y)},
            "pos_b": {"x": format_scalar(self.pos_b.x), "y": format_scalar(self.pos_b.y)},
            "start_a": format_scalar(self.start_a),
            "start_b": format_scalar(self.start_b),
            "strict_paper_loop": self.strict_paper_loop,
        }
        if self.rho is not None:
            doc["rho"] = format_scalar(self.rho)
        if self.distortion is not None:
            doc["distortion"] = self.distortion
        if self.time_budget is not None:
            doc["time_budget"] = format_scalar(self.time_budget)
        return doc

    @classmethod
    def from_json_dict(cls, doc: dict) -> "Scenario":
        if not isinstance(doc, dict):
            raise InputError("scenario: expected a JSON object")

        def scalar(path: str, value: object) -> Fraction:
            try:
                return parse_scalar(value)
            except ScalarParseError as exc:
                raise InputError(f"{path}: {exc}") from None

        def integer(path: str, value: object) -> int:
            if not isinstance(value, int) or isinstance(value, bool):
                raise InputError(f"{path}: expected an integer")
            return value

        def point(path: str, value: object) -> Point:
            if not isinstance(value, dict) or set(value) != {"x", "y"}:
                raise InputError(f"{path}: expected an object with fields x and y")
            return Point(scalar(f"{path}.x", value["x"]), scalar(f"{path}.y", value["y"]))

        for name in ("model", "L", "label_a", "label_b", "pos_a", "pos_b"):
            if name not in doc:
                raise InputError(f"{name}: missing required field")
        size = integer("L", doc["L"])
        if size < 2:
            raise InputError("L: the label space needs at least two labels")
        scenario = cls(
            model=doc["model"],
            space=LabelSpace(size),
            label_a=integer("label_a", doc["label_a"]),
            label_b=integer("label_b", doc["label_b"]),
            pos_a=point("pos_a", doc["pos_a"]),
            pos_b=point("pos_b", doc["pos_b"]),
            start_a=scalar("start_a", doc.get("start_a", 0)),
            start_b=scalar("start_b", doc.get("start_b", 0)),
            rho=scalar("rho", doc["rho"]) if "rho" in doc else None,
            distortion=doc.get("distortion"),
            time_budget=scalar("time_budget", doc["time_budget"])
            if "time_budget" in doc
            else None,
            strict_paper_loop=bool(doc.get("strict_paper_loop", False)),
        )
        scenario.validate()
        return scenario


# ---------------------------------------------------------------------------
# Trace events


@dataclass(frozen=True)
class TraceEvent:
    time: Fraction
    rank: int
    agent: str | None
    kind: str
    data: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        doc = {
            "t": format_scalar(self.time),
            "t_dec": decimal_str(self.time),
            "agent": self.agent,
            "kind": self.kind,
        }
        doc.update(self.data)
        return doc


def _action_payload(action: Move | Wait) -> dict:
    if isinstance(action, Move):
        return {
            "action": {
                "type": "move",
                "dir": action.direction,
                "dur": format_scalar(action.duration),
            }
        }
    return {"action": {"type": "wait", "dur": format_scalar(action.duration)}}


# ---------------------------------------------------------------------------
# World: shared stepping machinery (used by the executor and the oracle)


class _AgentRuntime:
    __slots__ = (
        "name",
        "label",
        "start",
        "program",
        "appeared",
        "halted",
        "pos",
        "vel",
        "seg_start",
        "seg_end",
        "phase_log",
    )

    def __init__(self, name: str, label: int, start: Fraction, pos: Point,
                 program: ReactiveProgram) -> None:
        self.name = name
        self.label = label
        self.start = start
        self.program = program
        self.appeared = False
        self.halted = False
        self.pos = pos  # position at seg_start
        self.vel = _ZERO_VEL
        self.seg_start = start
        self.seg_end: Fraction | None = None
        # (phase, enter time, own position, other position) per transition
        self.phase_log: list[tuple[str, Fraction, Point, Point]] = []

    def position_at(self, t: Fraction) -> Point:
        if self.vel is _ZERO_VEL or (self.vel[0] == 0 and self.vel[1] == 0):
            return self.pos
        dt = t - self.seg_start
        return Point(self.pos.x + self.vel[0] * dt, self.pos.y + self.vel[1] * dt)

    def segment_on(self, lo: Fraction, hi: Fraction) -> MotionSegment:
        return MotionSegment(lo, hi, self.position_at(lo), self.vel)


def _build_program(scenario: Scenario, label: int) -> ReactiveProgram:
    if scenario.model == "monotone":
        return MonotoneProgram(label, scenario.space)
    return BinaryProgram(label, scenario.space, strict_loop=scenario.strict_paper_loop)


class World:
    """Two-agent kinematics and program stepping.

    Owns no touch-detection policy: the executor solves each window for the
    exact first-touch instant, the sampling oracle checks a time grid.
    """

    def __init__(self, scenario: Scenario,
                 emit: Callable[[TraceEvent], None] | None = None) -> None:
        scenario.validate()
        self.scenario = scenario
        self.emit = emit
        self.distort = DISTORTIONS[scenario.distortion or "identity"]
        self.rho_sq = scenario.rho * scenario.rho if scenario.rho is not None else None
        self.a = _AgentRuntime("a", scenario.label_a, scenario.start_a, scenario.pos_a,
                               _build_program(scenario, scenario.label_a))
        self.b = _AgentRuntime("b", scenario.label_b, scenario.start_b, scenario.pos_b,
                               _build_program(scenario, scenario.label_b))
        self.agents = (self.a, self.b)

    def _emit(self, time: Fraction, rank: int, agent: str | None, kind: str,
              data: dict | None = None) -> None:
        if self.emit is not None:
            self.emit(TraceEvent(time, rank, agent, kind, data or {}))

    def other(self, agent: _AgentRuntime) -> _AgentRuntime:
        return self.b if agent is self.a else self.a

    def both_present(self) -> bool:
        return self.a.appeared and self.b.appeared

    def both_halted(self) -> bool:
        return self.a.halted and self.b.halted

    def dist_sq_at(self, t: Fraction) -> Fraction:
        return squared_distance(self.a.position_at(t), self.b.position_at(t))

    def next_instant(self) -> Fraction | None:
        candidates = []
        for ag in self.agents:
            if not ag.appeared:
                candidates.append(ag.start)
            elif not ag.halted and ag.seg_end is not None:
                candidates.append(ag.seg_end)
        return min(candidates) if candidates else None

    def _reading_for(self, agent: _AgentRuntime, t: Fraction):
        other = self.other(agent)
        present = other.appeared
        if self.scenario.model == "monotone":
            if not present:
                return ABSENT
            return Present(OpaqueOrderedLevel(self.distort(self.dist_sq_at(t))))
        if present and self.dist_sq_at(t) < self.rho_sq:
            return NEAR
        return FAR

    def _log_phase(self, agent: _AgentRuntime, t: Fraction) -> None:
        phase = agent.program.phase
        if not agent.phase_log or agent.phase_log[-1][0] != phase:
            agent.phase_log.append(
                (phase, t, agent.position_at(t), self.other(agent).position_at(t))
            )

    def _step(self, agent: _AgentRuntime, reading: object, t: Fraction) -> None:
        try:
            action = agent.program.on_reading(reading)
        except AgentProtocolError as exc:
            raise ProtocolViolation(agent.name, str(exc), None) from exc
        self._log_phase(agent, t)
        if isinstance(action, HaltForever):
            agent.halted = True
            agent.vel = _ZERO_VEL
            agent.seg_end = None
            self._emit(t, _RANK_BEGIN, agent.name, "halt",
                       {"phase": agent.program.phase})
            return
        if isinstance(action, Move):
            agent.vel = velocity_of(action.direction)
        else:
            agent.vel = _ZERO_VEL
        # pos is already the position at t: ends and appearances settle it
        agent.seg_start = t
        agent.seg_end = t + action.duration
        payload = _action_payload(action)
        payload["phase"] = agent.program.phase
        payload["pos"] = agent.pos.as_strings()
        self._emit(t, _RANK_BEGIN, agent.name, "action_begin", payload)

    def process_instant(self, t: Fraction) -> str | None:
        """Handle every appearance and action end at time t.

        Returns "meeting" when an appearance reveals the discs already
        touching; boundary instants inside a scanned window cannot touch.
        """
        appearing = [ag for ag in self.agents if not ag.appeared and ag.start == t]
        ending = [ag for ag in self.agents
                  if ag.appeared and not ag.halted and ag.seg_end == t]
        for ag in appearing:
            ag.appeared = True
            ag.seg_start = t
            self._emit(t, _RANK_APPEAR, ag.name, "appear", {"pos": ag.pos.as_strings()})
            self._log_phase(ag, t)
        for ag in ending:
            ag.pos = ag.position_at(t)
            ag.vel = _ZERO_VEL
            ag.seg_start = t
            ag.seg_end = None
            self._emit(t, _RANK_END, ag.name, "action_end", {"pos": ag.pos.as_strings()})
        if appearing and self.both_present() and self.dist_sq_at(t) <= 1:
            return "meeting"
        readers = sorted(appearing + ending, key=lambda ag: ag.name)
        readings = {}
        for ag in readers:
            reading = self._reading_for(ag, t)
            readings[ag.name] = reading
            if self.scenario.model == "monotone":
                content = "absent" if reading is ABSENT else "present"
            else:
                content = "near" if reading is NEAR else "far"
            self._emit(t, _RANK_READING, ag.name, "reading", {"content": content})
        for ag in readers:
            self._step(ag, readings[ag.name], t)
        return None

    def scan_window(self, lo: Fraction, hi: Fraction,
                    bracket_log2: int) -> TouchTime | None:
        """Exact first touch (center distance 1) inside [lo, hi], if any."""
        speed = abs(self.a.vel[0] - self.b.vel[0]) + abs(self.a.vel[1] - self.b.vel[1])
        reach = 1 + speed * (hi - lo)  # the separation cannot shrink faster
        if self.dist_sq_at(lo) > reach * reach:
            return None
        seg_a = self.a.segment_on(lo, hi)
        seg_b = self.b.segment_on(lo, hi)
        return first_touch_time(seg_a, seg_b, lo, hi, _ONE, bracket_log2)


# ---------------------------------------------------------------------------
# Reports


@dataclass
class AgentSummary:
    name: str
    label: int
    start: Fraction
    halted: bool
    final_phase: str
    final_pos: Point
    phase_log: list[tuple[str, Fraction, Point, Point]]
    sim: bool | None = None
    leading: bool | None = None
    j: int | None = None

    def phase_durations(self, end_time: Fraction) -> dict[str, Fraction]:
        out: dict[str, Fraction] = {}
        for idx, (phase, enter, _own, _other) in enumerate(self.phase_log):
            leave = self.phase_log[idx + 1][1] if idx + 1 < len(self.phase_log) else end_time
            if leave < enter:
                leave = enter
            out[phase] = out.get(phase, _ZERO) + (leave - enter)
        return out

    def to_json_dict(self, end_time: Fraction) -> dict:
        doc = {
            "label": self.label,
            "start": format_scalar(self.start),
            "halted": self.halted,
            "final_phase": self.final_phase,
            "final_pos": self.final_pos.as_strings(),
            "phase_log": [
                {"phase": phase, "t": format_scalar(t)} for phase, t, _o, _p in self.phase_log
            ],
            "phase_durations_dec": {
                phase: decimal_str(dur)
                for phase, dur in sorted(self.phase_durations(end_time).items())
            },
        }
        if self.sim is not None:
            doc["sim"] = self.sim
        if self.leading is not None:
            doc["leading"] = self.leading
        if self.j is not None:
            doc["j"] = self.j
        return doc


@dataclass
class MeetingReport:
    scenario: Scenario
    met: bool
    end_reason: str  # met | both_halted | budget_exhausted
    touch: TouchTime | None  # absolute timeline
    end_time: Fraction
    budget_cap: Fraction
    out_of_contract: bool
    agents: dict[str, AgentSummary]

    @property
    def later_start(self) -> Fraction:
        return self.scenario.later_start

    @property
    def time_from_later_start(self) -> TouchTime | None:
        if self.touch is None:
            return None
        return self.touch.shifted(self.later_start)

    def meeting_within(self, allowance: Fraction, strict: bool = False) -> bool:
        """Exact check: touch time from the later start vs an allowance."""
        if self.touch is None:
            return False
        cmp = self.touch.compare_to(self.later_start + allowance)
        return cmp < 0 if strict else cmp <= 0

    def bound_allowance(self) -> Fraction | None:
        if self.scenario.model != "monotone":
            return None
        extra = 5 if self.scenario.simultaneous else 8
        return self.scenario.sep_vertical + self.scenario.sep_horizontal + extra

    def rho_lambda(self) -> Fraction | None:
        if self.scenario.model != "binary":
            return None
        assert self.scenario.rho is not None
        return self.scenario.rho * self.scenario.space.width

    def to_json_dict(self) -> dict:
        sc = self.scenario
        doc: dict = {
            "met": self.met,
            "end_reason": self.end_reason,
            "later_start": format_scalar(self.later_start),
            "budget_cap": format_scalar(self.budget_cap),
            "end_time": format_scalar(self.end_time),
            "initial": {
                "distance_sq": format_scalar(sc.initial_distance_sq),
                "distance_dec": sqrt_decimal_str(sc.initial_distance_sq),
                "sep_vertical": format_scalar(sc.sep_vertical),
                "sep_horizontal": format_scalar(sc.sep_horizontal),
            },
            "simultaneous": sc.simultaneous,
            "out_of_contract": self.out_of_contract,
            "agents": {
                name: summary.to_json_dict(self.end_time)
                for name, summary in sorted(self.agents.items())
            },
        }
        if self.touch is not None:
            doc["touch"] = self.touch.to_json_dict()
            doc["time_from_later_start"] = self.time_from_later_start.to_json_dict()
            doc["phase_at_meeting"] = {
                name: summary.final_phase for name, summary in sorted(self.agents.items())
            }
        allowance = self.bound_allowance()
        if allowance is not None:
            doc["bounds"] = {
                "allowance": format_scalar(allowance),
                "within": self.meeting_within(allowance, strict=sc.simultaneous),
            }
        rl = self.rho_lambda()
        if rl is not None:
            bounds: dict = {"rho_lambda": format_scalar(rl)}
            if self.met and self.touch is not None:
                ratio = (self.touch.midpoint() - self.later_start) / rl
                bounds["time_over_rho_lambda_dec"] = decimal_str(ratio, 6)
            doc["bounds"] = bounds
        return doc


# ---------------------------------------------------------------------------
# The executor


def run_scenario(
    scenario: Scenario,
    *,
    record_trace: bool = True,
    bracket_log2: int = 40,
    max_instants: int = 10_000_000,
) -> tuple[MeetingReport, list[TraceEvent] | None]:
    """Simulate until touch, both agents terminally halted, or budget."""
    scenario.validate()
    events: list[TraceEvent] | None = [] if record_trace else None
    world = World(scenario, emit=events.append if events is not None else None)
    cap = scenario.later_start + scenario.budget()

    t: Fraction | None = None
    touch: TouchTime | None = None
    end_reason = ""
    end_time: Fraction | None = None
    instants = 0

    try:
        while True:
            nxt = world.next_instant()
            if nxt is None:
                end_reason = "both_halted"
                end_time = t if t is not None else scenario.later_start
                break
            scan_hi = nxt if nxt < cap else cap
            if t is not None and world.both_present() and t < scan_hi:
                touch = world.scan_window(t, scan_hi, bracket_log2)
                if touch is not None:
                    end_reason = "met"
                    end_time = touch.hi
                    world._emit(touch.midpoint(), _RANK_MEETING, None, "meeting",
                                {"touch": touch.to_json_dict()})
                    break
            if nxt > cap:
                end_reason = "budget_exhausted"
                end_time = cap
                world._emit(cap, _RANK_BUDGET, None, "budget_exhausted", {})
                break
            t = nxt
            if world.process_instant(t) == "meeting":
                touch = TouchTime.at(t)
                end_reason = "met"
                end_time = t
                world._emit(t, _RANK_MEETING, None, "meeting",
                            {"touch": touch.to_json_dict()})
                break
            instants += 1
            if instants > max_instants:
                raise RuntimeError("instant limit exceeded; runaway scenario")
    except ProtocolViolation as violation:
        violation.events = events or []
        raise

    assert end_time is not None
    summaries = {}
    for ag in world.agents:
        program = ag.program
        summaries[ag.name] = AgentSummary(
            name=ag.name,
            label=ag.label,
            start=ag.start,
            halted=ag.halted,
            final_phase=program.phase,
            final_pos=ag.position_at(end_time),
            phase_log=ag.phase_log,
            sim=getattr(program, "sim", None),
            leading=getattr(program, "leading", None),
            j=getattr(program, "j", None),
        )

    out_of_contract = (
        scenario.model == "binary"
        and scenario.rho is not None
        and scenario.initial_distance_sq >= scenario.rho * scenario.rho
    )
    report = MeetingReport(
        scenario=scenario,
        met=end_reason == "met",
        end_reason=end_reason,
        touch=touch,
        end_time=end_time,
        budget_cap=cap,
        out_of_contract=out_of_contract,
        agents=summaries,
    )
    return report, events


# ---------------------------------------------------------------------------
# Trace serialization


def trace_lines(scenario: Scenario, events: list[TraceEvent]) -> Iterator[dict]:
    yield {"schema": TRACE_SCHEMA, "scenario": scenario.to_json_dict()}
    for event in events:
        yield event.to_json_dict()
