"""Planar kinematics on exact rationals.

Points, cardinal motion segments, squared distances between moving points,
and exact first-touch detection (the instant two moving discs reach a given
center distance).  Touch times are roots of a rational quadratic; when the
root is irrational it is reported as an exact root descriptor plus a
rational bracket obtained by sign bisection.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .exact import decimal_str, exact_sqrt, format_scalar

__all__ = [
    "Point",
    "CARDINALS",
    "velocity_of",
    "MotionSegment",
    "squared_distance",
    "squared_distance_polynomial",
    "TouchTime",
    "first_touch_time",
]

_ZERO = Fraction(0)
_ONE = Fraction(1)

# Unit velocity per cardinal direction; North is +y, East is +x.
CARDINALS: dict[str, tuple[Fraction, Fraction]] = {
    "N": (_ZERO, _ONE),
    "E": (_ONE, _ZERO),
    "S": (_ZERO, -_ONE),
    "W": (-_ONE, _ZERO),
}


def velocity_of(direction: str) -> tuple[Fraction, Fraction]:
    try:
        return CARDINALS[direction]
    except KeyError:
        raise ValueError(f"unknown cardinal direction {direction!r}") from None


@dataclass(frozen=True)
class Point:
    x: Fraction
    y: Fraction

    def translate(self, dx: Fraction, dy: Fraction) -> "Point":
        return Point(self.x + dx, self.y + dy)

    def as_strings(self) -> list[str]:
        return [format_scalar(self.x), format_scalar(self.y)]


def squared_distance(p: Point, q: Point) -> Fraction:
    dx = p.x - q.x
    dy = p.y - q.y
    return dx * dx + dy * dy


@dataclass(frozen=True)
class MotionSegment:
    """Position as a linear function of time over [start_time, end_time].

    Velocity is (0, 0) for an inert interval or a cardinal unit vector.
    """

    start_time: Fraction
    end_time: Fraction
    start_point: Point
    velocity: tuple[Fraction, Fraction]

    def __post_init__(self) -> None:
        if self.end_time < self.start_time:
            raise ValueError("segment ends before it starts")

    def covers(self, t0: Fraction, t1: Fraction) -> bool:
        return self.start_time <= t0 and t1 <= self.end_time

    def position_at(self, t: Fraction) -> Point:
        if not (self.start_time <= t <= self.end_time):
            raise ValueError("time outside segment")
        dt = t - self.start_time
        return Point(
            self.start_point.x + self.velocity[0] * dt,
            self.start_point.y + self.velocity[1] * dt,
        )


def squared_distance_polynomial(
    a: MotionSegment, b: MotionSegment, t0: Fraction, t1: Fraction
) -> tuple[Fraction, Fraction, Fraction]:
    """Coefficients (A, B, C) with dist²(t) = A·t² + B·t + C on [t0, t1].

    Coefficients are in global time, exact.  A >= 0 always (A is the squared
    relative speed).
    """
    if t1 < t0:
        raise ValueError("empty interval")
    if not (a.covers(t0, t1) and b.covers(t0, t1)):
        raise ValueError("interval not covered by both segments")
    # relative position as a line in t: d(t) = d_const + dv * t
    dvx = a.velocity[0] - b.velocity[0]
    dvy = a.velocity[1] - b.velocity[1]
    cx = (a.start_point.x - a.velocity[0] * a.start_time) - (
        b.start_point.x - b.velocity[0] * b.start_time
    )
    cy = (a.start_point.y - a.velocity[1] * a.start_time) - (
        b.start_point.y - b.velocity[1] * b.start_time
    )
    big_a = dvx * dvx + dvy * dvy
    big_b = 2 * (cx * dvx + cy * dvy)
    big_c = cx * cx + cy * cy
    return big_a, big_b, big_c


@dataclass(frozen=True)
class TouchTime:
    """The earliest instant a quadratic dist²(t) reaches a threshold.

    ``exact`` is set when the instant is rational; otherwise ``lo < t* < hi``
    with hi - lo <= 2**-bracket_log2, and the quadratic g(t) = dist²(t) -
    threshold is kept so the instant can still be compared exactly against
    any rational.
    """

    lo: Fraction
    hi: Fraction
    exact: Fraction | None
    tangential: bool
    bracket_log2: int
    poly: tuple[Fraction, Fraction, Fraction] | None = None  # g coefficients

    @classmethod
    def at(cls, t: Fraction, tangential: bool = False) -> "TouchTime":
        return cls(lo=t, hi=t, exact=t, tangential=tangential, bracket_log2=0)

    def midpoint(self) -> Fraction:
        if self.exact is not None:
            return self.exact
        return (self.lo + self.hi) / 2

    def width(self) -> Fraction:
        return self.hi - self.lo

    def compare_to(self, q: Fraction) -> int:
        """Exact three-way comparison of the touch instant against q."""
        if self.exact is not None:
            if self.exact < q:
                return -1
            if self.exact > q:
                return 1
            return 0
        if q <= self.lo:
            return 1
        if q >= self.hi:
            return -1
        # q falls inside the bracket; g is strictly decreasing there.
        big_a, big_b, c0 = self.poly  # type: ignore[misc]
        g_q = (big_a * q + big_b) * q + c0
        return 1 if g_q > 0 else -1  # irrational root: g_q != 0

    def shifted(self, offset: Fraction) -> "TouchTime":
        poly = None
        if self.poly is not None:
            big_a, big_b, c0 = self.poly
            # g(t + offset) recentered so comparisons keep working
            poly = (
                big_a,
                2 * big_a * offset + big_b,
                (big_a * offset + big_b) * offset + c0,
            )
        return TouchTime(
            lo=self.lo - offset,
            hi=self.hi - offset,
            exact=None if self.exact is None else self.exact - offset,
            tangential=self.tangential,
            bracket_log2=self.bracket_log2,
            poly=poly,
        )

    def to_json_dict(self) -> dict:
        return {
            "lo": format_scalar(self.lo),
            "hi": format_scalar(self.hi),
            "dec": decimal_str(self.midpoint()),
            "exact": self.exact is not None,
            "tangential": self.tangential,
            "bracket_log2": self.bracket_log2,
        }


def first_touch_time(
    a: MotionSegment,
    b: MotionSegment,
    t0: Fraction,
    t1: Fraction,
    threshold_sq: Fraction,
    bracket_log2: int = 40,
) -> TouchTime | None:
    """Earliest t* in [t0, t1] with dist²(t*) == threshold_sq, or None.

    Requires dist²(t0) >= threshold_sq.  The minimum of dist² over the
    interval is examined exactly, so tangential touches are never missed.
    """
    big_a, big_b, big_c = squared_distance_polynomial(a, b, t0, t1)
    c0 = big_c - threshold_sq

    def g(t: Fraction) -> Fraction:
        return (big_a * t + big_b) * t + c0

    g0 = g(t0)
    if g0 < 0:
        raise ValueError("already inside the threshold at interval start")
    if g0 == 0:
        return TouchTime.at(t0)

    if big_a == 0:
        if big_b == 0:
            return None  # constant separation above the threshold
        root = -c0 / big_b
        if big_b < 0 and t0 <= root <= t1:
            return TouchTime.at(root)
        return None

    vertex = -big_b / (2 * big_a)
    if vertex <= t0:
        return None  # separation only grows on the interval
    m = vertex if vertex < t1 else t1
    g_m = g(m)
    if g_m > 0:
        return None

    disc = big_b * big_b - 4 * big_a * c0
    if g_m == 0:
        # g strictly decreases on [t0, m], so m is the earliest root.
        return TouchTime.at(m, tangential=(disc == 0))

    root_disc = exact_sqrt(disc)
    if root_disc is not None:
        root = (-big_b - root_disc) / (2 * big_a)
        return TouchTime.at(root)

    # Irrational crossing: bisect with exact signs, g(lo) > 0 > g(hi).
    lo, hi = t0, m
    width_cap = Fraction(1, 2**bracket_log2)
    while hi - lo > width_cap:
        mid = (lo + hi) / 2
        if g(mid) > 0:
            lo = mid
        else:
            hi = mid
    return TouchTime(
        lo=lo,
        hi=hi,
        exact=None,
        tangential=False,
        bracket_log2=bracket_log2,
        poly=(big_a, big_b, c0),
    )
