"""Dense-sampling validation engine.

Replays the same agent programs as the executor on the same exact
kinematics, but detects meeting differently: positions are sampled on a
fixed time grid from the later agent's start and the meeting is declared at
the first sample with center distance at most 1.  No quadratic root is ever
extracted here, so the two engines fail independently.

Sampling is only ever late: for a transversal crossing the first detecting
sample lies within one grid step after the exact touch.  A tangential touch
(the distance reaches 1 without going below) can be missed entirely; the
executor flags those exactly, and verification excludes them with a note.

The full grid is never materialized.  Windows whose endpoints are provably
too far away are skipped (the closing speed is at most 2, so the distance
cannot drop by more than twice the window length); every remaining grid
point is checked exactly, in order, with integer arithmetic.  The verdict
is identical to a naive point-by-point scan.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from .geometry import Point
from .simulator import Scenario, World

__all__ = ["OracleConfig", "OracleResult", "oracle_run"]

_ZERO = Fraction(0)
_LEAF_SAMPLES = 64


@dataclass(frozen=True)
class OracleConfig:
    scenario: Scenario
    dt: Fraction = Fraction(1, 1024)
    keep_positions: bool = False

    def __post_init__(self) -> None:
        if self.dt <= 0:
            raise ValueError("sampling step must be positive")


@dataclass
class OracleResult:
    met: bool
    hit_time: Fraction | None
    end_reason: str  # met | both_halted | budget_exhausted
    samples_checked: int
    positions: list[tuple[Fraction, Point, Point]] | None


class _GridScanner:
    """First grid sample with dist² <= 1 inside half-open windows (lo, hi]."""

    def __init__(self, world: World, origin: Fraction, dt: Fraction,
                 keep_positions: bool) -> None:
        self.world = world
        self.origin = origin
        self.dt = dt
        self.samples_checked = 0
        self.positions: list[tuple[Fraction, Point, Point]] | None = (
            [] if keep_positions else None
        )

    def grid_time(self, n: int) -> Fraction:
        return self.origin + n * self.dt

    def _first_index_after(self, u: Fraction) -> int:
        q = (u - self.origin) / self.dt
        return q.numerator // q.denominator + 1

    def scan(self, lo: Fraction, hi: Fraction) -> Fraction | None:
        if hi <= lo:
            return None
        n_first = self._first_index_after(lo)
        if self.grid_time(n_first) > hi:
            return None
        if self.positions is not None:
            return self._scan_leaf(lo, hi)  # naive full scan keeps every sample
        world = self.world
        # L1 bound on the relative speed; the separation cannot shrink faster
        speed = abs(world.a.vel[0] - world.b.vel[0]) + abs(world.a.vel[1] - world.b.vel[1])
        return self._scan_adaptive(lo, hi, speed)

    def _scan_adaptive(self, lo: Fraction, hi: Fraction,
                       speed: Fraction) -> Fraction | None:
        n_first = self._first_index_after(lo)
        t_first = self.grid_time(n_first)
        if t_first > hi:
            return None
        length = hi - lo
        reach = 1 + speed * length
        reach_sq = reach * reach
        # either endpoint far enough proves the whole window clear
        if self.world.dist_sq_at(lo) > reach_sq or self.world.dist_sq_at(hi) > reach_sq:
            return None
        if length <= _LEAF_SAMPLES * self.dt:
            return self._scan_leaf(lo, hi)
        mid = lo + length / 2
        hit = self._scan_adaptive(lo, mid, speed)
        if hit is not None:
            return hit
        return self._scan_adaptive(mid, hi, speed)

    def _scan_leaf(self, lo: Fraction, hi: Fraction) -> Fraction | None:
        n = self._first_index_after(lo)
        t_n = self.grid_time(n)
        if t_n > hi:
            return None
        world = self.world
        pa = world.a.position_at(t_n)
        pb = world.b.position_at(t_n)
        rel_x = pa.x - pb.x
        rel_y = pa.y - pb.y
        step_x = (world.a.vel[0] - world.b.vel[0]) * self.dt
        step_y = (world.a.vel[1] - world.b.vel[1]) * self.dt
        den = lcm(rel_x.denominator, rel_y.denominator,
                  step_x.denominator, step_y.denominator)
        ix = rel_x.numerator * (den // rel_x.denominator)
        iy = rel_y.numerator * (den // rel_y.denominator)
        sx = step_x.numerator * (den // step_x.denominator)
        sy = step_y.numerator * (den // step_y.denominator)
        den_sq = den * den
        t = t_n
        while t <= hi:
            self.samples_checked += 1
            if self.positions is not None:
                self.positions.append(
                    (t, world.a.position_at(t), world.b.position_at(t))
                )
            if ix * ix + iy * iy <= den_sq:
                return t
            ix += sx
            iy += sy
            t += self.dt
        return None


def oracle_run(cfg: OracleConfig) -> OracleResult:
    scenario = cfg.scenario
    scenario.validate()
    world = World(scenario, emit=None)
    origin = scenario.later_start
    cap = origin + scenario.budget()
    scanner = _GridScanner(world, origin, cfg.dt, cfg.keep_positions)

    t: Fraction | None = None
    hit: Fraction | None = None
    end_reason = ""

    while True:
        nxt = world.next_instant()
        if nxt is None:
            # both agents halted; their separation is frozen from t on
            if t is not None and world.both_present() and t < cap:
                hit = scanner.scan(t, cap)
            end_reason = "met" if hit is not None else "both_halted"
            break
        scan_hi = nxt if nxt < cap else cap
        if t is not None and world.both_present() and t < scan_hi:
            hit = scanner.scan(t, scan_hi)
            if hit is not None:
                end_reason = "met"
                break
        if nxt > cap:
            end_reason = "budget_exhausted"
            break
        t = nxt
        if world.process_instant(t) == "meeting":
            # an appearance with the discs already touching is the grid
            # sample at the origin itself
            hit = t
            end_reason = "met"
            break

    return OracleResult(
        met=hit is not None,
        hit_time=hit,
        end_reason=end_reason,
        samples_checked=scanner.samples_checked,
        positions=scanner.positions,
    )
