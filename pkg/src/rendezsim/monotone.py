"""Meeting program for the monotone sensing model.

The agent that appears first reads an absent partner and stays inert
forever.  A later agent (or both, on a simultaneous start) first closes the
vertical gap, then the horizontal gap; the run is interrupted the instant
the discs touch.

Simultaneity is detected by two unit moves North that both leave the
distance unchanged, which is impossible against an inert partner.  The
symmetry between simultaneous agents is then broken by a "dance" of
shrinking North/South steps keyed to the transformed label bits: at the
first bit where the labels differ the agents move oppositely and the
distance change is observable.  Each dance bit is attempted twice because a
single attempt can swap the agents' positions exactly and leave the
distance unchanged.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Generator

from .kernel import (
    ABSENT,
    EQUAL,
    HALT,
    LARGER,
    SMALLER,
    Action,
    AgentProtocolError,
    Move,
    Present,
    ReactiveProgram,
    compare_levels,
)
from .labels import LabelSpace, transform

__all__ = ["MonotoneProgram"]

_ONE = Fraction(1)
_HALF = Fraction(1, 2)
_QUARTER = Fraction(1, 4)


class MonotoneProgram(ReactiveProgram):
    """Reactive agent for the monotone model.

    Exposes ``sim`` (simultaneous start detected), ``j`` (first differing
    label bit, set when the dance ends) and ``phase`` for the harness.
    """

    def __init__(self, label: int, space: LabelSpace) -> None:
        self.bits = transform(label, space)
        self.sim = False
        self.j: int | None = None
        self.compare = EQUAL
        self._prev = None
        self._cur = None
        self._exit_index = 0
        super().__init__(label, space)

    # -- sensor bookkeeping -------------------------------------------------
    #
    # Every reading refreshes the stored current level, even after moves the
    # procedure does not test: a later comparison is always against the most
    # recent reading.  Only a test recomputes ``compare``.

    def _note(self, reading: object) -> None:
        if not isinstance(reading, Present):
            raise AgentProtocolError("the other agent cannot disappear once seen")
        self._prev = self._cur
        self._cur = reading.level

    def _move_and_test(self, direction: str, duration: Fraction):
        reading = yield Move(direction, duration)
        self._note(reading)
        self.compare = compare_levels(self._prev, self._cur)

    def _move_untested(self, direction: str, duration: Fraction):
        reading = yield Move(direction, duration)
        self._note(reading)

    def _walk_while_closing(self, direction: str, step: Fraction):
        """Step in one direction until a step no longer shrank the distance.

        The first step is unconditional: the branches that reach a walk with
        a stale "larger" comparison (it described the separating move, or
        the probe move that was then undone) still require the approach to
        run, and every walk in the meeting argument takes at least one step.
        """
        while True:
            yield from self._move_and_test(direction, step)
            if self.compare != SMALLER:
                break

    # -- procedure bodies ---------------------------------------------------

    def _dance(self):
        i = 1
        width = self.space.width
        while self.compare == EQUAL:
            if i > width:
                raise AgentProtocolError(
                    "distance never changed over all label bits; labels must differ"
                )
            direction = "N" if self.bits.bit(i) == 1 else "S"
            step = Fraction(1, 2**i)
            yield from self._move_and_test(direction, step)
            if self.compare == EQUAL:
                # a lone opposite move can swap the agents and leave the
                # distance unchanged; the repeat makes the change observable
                yield from self._move_and_test(direction, step)
            i += 1
        self._exit_index = i

    def _vertical_approach(self):
        self.phase = "vertical_approach"
        yield from self._move_and_test("N", _ONE)
        if self.compare == SMALLER:
            yield from self._walk_while_closing("N", _HALF)
        elif self.compare == LARGER:
            # the partner is inert; undo the probe move and approach
            yield from self._move_untested("S", _ONE)
            yield from self._walk_while_closing("S", _HALF)
        else:
            yield from self._move_and_test("N", _ONE)
            if self.compare == LARGER:
                yield from self._move_untested("S", _ONE)
                yield from self._walk_while_closing("S", _HALF)
            else:
                # distance unchanged twice: the start was simultaneous
                self.sim = True
                self.phase = "dance"
                yield from self._dance()
                self.j = self._exit_index - 1
                own_bit = self.bits.bit(self.j)
                self.phase = "vertical_approach"
                if self.compare == SMALLER:
                    # the 1-bit agent sat South before the separating move;
                    # both undo it, then approach
                    back = Fraction(1, 2**self.j)
                    if own_bit == 1:
                        yield from self._move_untested("S", back)
                        yield from self._walk_while_closing("N", _QUARTER)
                    else:
                        yield from self._move_untested("N", back)
                        yield from self._walk_while_closing("S", _QUARTER)
                else:
                    # the 1-bit agent ended North of the partner; no backtrack
                    if own_bit == 1:
                        yield from self._walk_while_closing("S", _QUARTER)
                    else:
                        yield from self._walk_while_closing("N", _QUARTER)

    def _horizontal_approach(self):
        self.phase = "horizontal_approach"
        if self.sim:
            # simultaneous agents pick opposite first directions by label bit
            first, second = ("E", "W") if self.bits.bit(self.j) == 1 else ("W", "E")
        else:
            first, second = "E", "W"
        yield from self._move_and_test(first, _ONE)
        if self.compare == SMALLER:
            yield from self._walk_while_closing(first, _ONE)
        else:
            yield from self._move_untested(second, _ONE)
            yield from self._walk_while_closing(second, _ONE)

    # -- top level ----------------------------------------------------------

    def _run(self) -> Generator[Action, object, None]:
        reading = yield  # appearance reading
        if reading is ABSENT:
            self.phase = "inert_forever"
            yield HALT
            return
        if not isinstance(reading, Present):
            raise AgentProtocolError(f"unexpected reading {reading!r}")
        self._cur = reading.level
        yield from self._vertical_approach()
        yield from self._horizontal_approach()
        # touching interrupts the run before this point on valid scenarios
        self.phase = "completed"
        yield HALT
