"""Meeting program for the binary sensing model.

An agent that reads Far at appearance stays inert forever.  An agent that
reads Near runs two procedures:

* lose contact: per label bit, move North (bit 1) or stay inert (bit 0)
  for a period, reading the sensor after each; the period doubles every
  full pass.  Contact is lost exactly when one agent moved while the other
  stayed, so the agent whose own move lost contact knows it leads.  The
  leader then returns South in half-unit steps until it senses the other
  agent again; the non-leader halts forever where it stands.
* triangle search: the leader now sits on its own vertical line just below
  the northern point of the sensing circle around the inert agent.  It
  descends in half-unit steps counting them until the sensor goes quiet,
  which puts it just past the southern circle point on the same line.
  Climbing back half the counted distance lands within one unit of the
  chord midpoint, which lies on the inert agent's horizontal line because
  the two circle points and the center form an isoceles triangle.  Doubling
  East/West leaps along that line then guarantee the touch.

The bit loop processes every label bit and one trailing move slot, so an
agent whose transformed label is all zeroes still separates from an inert
partner.  ``strict_loop=True`` reproduces the published loop guard instead
(which stops one bit early and has no trailing slot), for comparison runs.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Generator

from .kernel import (
    FAR,
    HALT,
    NEAR,
    Action,
    AgentProtocolError,
    BinaryReading,
    Move,
    ReactiveProgram,
    Wait,
)
from .labels import LabelSpace, transform

__all__ = ["BinaryProgram"]

_HALF = Fraction(1, 2)


class BinaryProgram(ReactiveProgram):
    """Reactive agent for the binary model.

    Exposes ``leading`` (this agent's own move lost contact), ``j`` (the
    slot index that lost contact) and ``phase`` for the harness.
    """

    def __init__(self, label: int, space: LabelSpace, strict_loop: bool = False) -> None:
        self.bits = transform(label, space)
        self.strict_loop = strict_loop
        self.leading = False
        self.j: int | None = None
        super().__init__(label, space)
        self.phase = "initial_check"

    def _slot_bit(self, i: int) -> int:
        if i <= self.space.width:
            return self.bits.bit(i)
        return 1  # trailing move slot

    @staticmethod
    def _as_contact(reading: object) -> BinaryReading:
        if not isinstance(reading, BinaryReading):
            raise AgentProtocolError(f"unexpected reading {reading!r}")
        return reading

    def _run(self) -> Generator[Action, object, None]:
        reading = yield  # appearance reading
        contact = self._as_contact(reading)
        if contact is FAR:
            self.phase = "inert_forever"
            yield HALT
            return

        # -- lose contact ----------------------------------------------------
        self.phase = "lose_contact"
        if self.strict_loop:
            slots = self.space.width - 1
        else:
            slots = self.space.width + 1
        if slots < 1:
            raise AgentProtocolError(
                "strict loop leaves no label bit to process; widen the label space"
            )
        period = Fraction(1)
        last_slot = 0
        while contact is NEAR:
            i = 1
            while contact is NEAR and i <= slots:
                if self._slot_bit(i) == 1:
                    contact = self._as_contact((yield Move("N", period)))
                else:
                    contact = self._as_contact((yield Wait(period)))
                last_slot = i
                i += 1
            period *= 2
        self.j = last_slot

        if self._slot_bit(self.j) == 1:
            # contact was lost during this agent's own move
            self.leading = True
            self.phase = "return_south"
            while contact is FAR:
                contact = self._as_contact((yield Move("S", _HALF)))
        else:
            # the other agent is searching; wait for it where we stand
            self.phase = "inert_forever"
            yield HALT
            return

        # -- triangle search --------------------------------------------------
        self.phase = "triangle_descent"
        steps_south = 0
        while contact is NEAR:
            contact = self._as_contact((yield Move("S", _HALF)))
            steps_south += 1

        self.phase = "midpoint_return"
        yield Move("N", Fraction((steps_south + 1) // 2, 2))

        self.phase = "horizontal_leaps"
        leap = Fraction(1)
        while True:
            yield Move("E", leap)
            yield Move("W", 2 * leap)
            yield Move("E", leap)
            leap *= 2
