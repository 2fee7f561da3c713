"""The reactive-program contract between algorithms and the simulator.

Agents are deterministic state machines.  Time passes only inside actions;
a sensor reading is delivered exactly at the agent's appearance in the
plane and at the completion of each non-terminal action, and the program
answers each reading with its next action.  Programs are written as
generators, which makes the transliteration of nested-loop pseudocode
direct while keeping the step interface (reading in, action out).

Sensor readings expose only what each sensing model grants:

* monotone model: presence, plus an opaque level that supports three-way
  comparison with other levels of the same run and nothing else.  Levels
  order exactly as the distances at the read instants.
* binary model: a single bit, Near (other agent present and strictly
  within the detection radius) or Far (absent or at least the radius away,
  indistinguishably).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Generator, Union

from .labels import LabelSpace

__all__ = [
    "Move",
    "Wait",
    "HaltForever",
    "HALT",
    "Action",
    "OpaqueOrderedLevel",
    "MonotoneReading",
    "ABSENT",
    "Present",
    "BinaryReading",
    "NEAR",
    "FAR",
    "SMALLER",
    "EQUAL",
    "LARGER",
    "compare_levels",
    "DISTORTIONS",
    "AgentProtocolError",
    "ReactiveProgram",
]


# ---------------------------------------------------------------------------
# Actions


@dataclass(frozen=True)
class Move:
    direction: str  # one of N, E, S, W
    duration: Fraction

    def __post_init__(self) -> None:
        if self.direction not in ("N", "E", "S", "W"):
            raise ValueError(f"bad direction {self.direction!r}")
        if self.duration <= 0:
            raise ValueError("move duration must be strictly positive")


@dataclass(frozen=True)
class Wait:
    duration: Fraction

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("wait duration must be strictly positive")


class HaltForever:
    """Terminal action: the agent stays inert and receives no more readings."""

    _instance: "HaltForever | None" = None

    def __new__(cls) -> "HaltForever":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "HaltForever"


HALT = HaltForever()

Action = Union[Move, Wait, HaltForever]


# ---------------------------------------------------------------------------
# Readings


class OpaqueOrderedLevel:
    """Totally ordered sensor level.

    Wraps a hidden exact value that increases strictly with distance.  Only
    comparison with other levels is exposed; there is no magnitude access
    and no arithmetic, so programs can rely on nothing but the ordering.
    """

    __slots__ = ("_hidden",)

    def __init__(self, hidden: Fraction) -> None:
        object.__setattr__(self, "_hidden", hidden)

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("levels are immutable")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OpaqueOrderedLevel):
            return NotImplemented
        return self._hidden == other._hidden

    def __lt__(self, other: "OpaqueOrderedLevel") -> bool:
        return self._hidden < other._hidden

    def __le__(self, other: "OpaqueOrderedLevel") -> bool:
        return self._hidden <= other._hidden

    def __gt__(self, other: "OpaqueOrderedLevel") -> bool:
        return self._hidden > other._hidden

    def __ge__(self, other: "OpaqueOrderedLevel") -> bool:
        return self._hidden >= other._hidden

    def __hash__(self) -> int:
        return hash(self._hidden)

    def __repr__(self) -> str:
        return "<sensor level>"


class _Absent:
    """Monotone reading when the other agent has not yet appeared."""

    _instance: "_Absent | None" = None

    def __new__(cls) -> "_Absent":
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "Absent"


ABSENT = _Absent()


@dataclass(frozen=True)
class Present:
    level: OpaqueOrderedLevel


MonotoneReading = Union[_Absent, Present]


class BinaryReading(enum.Enum):
    """Near iff the other agent is present and strictly inside the radius.

    Far carries no payload by construction: absence and at-or-beyond-radius
    are indistinguishable to the program.
    """

    NEAR = "near"
    FAR = "far"


NEAR = BinaryReading.NEAR
FAR = BinaryReading.FAR


SMALLER = "smaller"
EQUAL = "equal"
LARGER = "larger"


def compare_levels(previous: OpaqueOrderedLevel, current: OpaqueOrderedLevel) -> str:
    """How the current distance relates to the previous one.

    Returns "larger" when the current level exceeds the previous, "smaller"
    when it dropped, "equal" on exact equality.
    """
    if previous < current:
        return LARGER
    if previous == current:
        return EQUAL
    return SMALLER


# ---------------------------------------------------------------------------
# Level distortions (testing hook)

# Strictly increasing maps applied to the hidden level before it is wrapped.
# Programs that honor the opacity contract produce identical behavior under
# every one of these.


def _exp2_piecewise(x: Fraction) -> Fraction:
    # piecewise-linear interpolation of 2**x between integer exponents;
    # strictly increasing and exactly rational for rational x
    n = x.numerator // x.denominator
    if n > 2**14:
        raise ValueError("exp2 distortion would overflow; use it on small scenarios")
    base = Fraction(2) ** n
    return base * (1 + (x - n))


DISTORTIONS: dict[str, Callable[[Fraction], Fraction]] = {
    "identity": lambda x: x,
    "affine": lambda x: x + 7,
    "cubic": lambda x: x * x * x,
    "exp2": _exp2_piecewise,
}


# ---------------------------------------------------------------------------
# Programs


class AgentProtocolError(RuntimeError):
    """An agent observed something the model forbids, or misbehaved."""


class ReactiveProgram:
    """Base for generator-backed deterministic agent programs.

    Subclasses implement ``_run`` as a generator that receives readings via
    ``yield`` and emits actions.  Computation consumes no simulated time;
    readings can only arrive at action boundaries, by construction of this
    interface.
    """

    def __init__(self, label: int, space: LabelSpace) -> None:
        if not space.contains(label):
            raise ValueError(f"label {label} outside the label space")
        self.label = label
        self.space = space
        self.phase = "initial_read"
        self._finished = False
        self._gen = self._run()
        next(self._gen)  # advance to the first reading point

    def _run(self) -> Generator[Action, object, None]:
        raise NotImplementedError

    def on_reading(self, reading: object) -> Action:
        """Deliver one reading, receive the next action."""
        if self._finished:
            raise AgentProtocolError("reading delivered to a halted agent")
        try:
            action = self._gen.send(reading)
        except StopIteration:
            raise AgentProtocolError(
                "program ended without an explicit terminal action"
            ) from None
        if isinstance(action, HaltForever):
            self._finished = True
        return action
