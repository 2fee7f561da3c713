import random
from fractions import Fraction as F

import pytest

from rendezsim.geometry import (
    MotionSegment,
    Point,
    first_touch_time,
    squared_distance,
    squared_distance_polynomial,
    velocity_of,
)

ZERO = (F(0), F(0))


def seg(x, y, direction=None, t0=0, t1=100):
    vel = ZERO if direction is None else velocity_of(direction)
    return MotionSegment(F(t0), F(t1), Point(F(x), F(y)), vel)


# -- squared_distance ---------------------------------------------------------


def test_squared_distance_identity():
    assert squared_distance(Point(F(0), F(0)), Point(F(0), F(0))) == 0


def test_squared_distance_3_4_5():
    assert squared_distance(Point(F(0), F(0)), Point(F(3), F(4))) == 25


def test_squared_distance_rational():
    assert squared_distance(Point(F(1, 2), F(0)), Point(F(0), F(1, 2))) == F(1, 2)


# -- squared_distance_polynomial ----------------------------------------------


def test_polynomial_static():
    a, b, c = squared_distance_polynomial(seg(0, 0), seg(3, 0), F(0), F(1))
    assert (a, b, c) == (0, 0, 9)


def test_polynomial_one_mover():
    # b starts at (3,0) moving West from t=0: dist^2 = (3-t)^2
    a, b, c = squared_distance_polynomial(seg(0, 0), seg(3, 0, "W"), F(0), F(2))
    assert (a, b, c) == (1, -6, 9)


def test_polynomial_head_on():
    # a North from (0,0), b South from (0,5): dist^2 = (5-2t)^2
    a, b, c = squared_distance_polynomial(seg(0, 0, "N"), seg(0, 5, "S"), F(0), F(2))
    assert (a, b, c) == (4, -20, 25)


def test_polynomial_respects_global_time():
    # segment starting at t=5; coefficients are in global t
    mover = MotionSegment(F(5), F(10), Point(F(3), F(0)), velocity_of("W"))
    inert = seg(0, 0, t0=0, t1=100)
    a, b, c = squared_distance_polynomial(inert, mover, F(5), F(7))
    for t in (F(5), F(6), F(13, 2), F(7)):
        expected = squared_distance(Point(F(0), F(0)), mover.position_at(t))
        assert a * t * t + b * t + c == expected


def test_polynomial_requires_coverage():
    with pytest.raises(ValueError):
        squared_distance_polynomial(seg(0, 0, t1=1), seg(1, 1, t1=5), F(0), F(2))


# -- first_touch_time ----------------------------------------------------------


def test_touch_linear_closing():
    touch = first_touch_time(seg(0, 0), seg(3, 0, "W"), F(0), F(10), F(1))
    assert touch is not None and touch.exact == 2


def test_touch_head_on():
    touch = first_touch_time(seg(0, 0, "N"), seg(0, 5, "S"), F(0), F(10), F(1))
    assert touch is not None and touch.exact == 2


def test_touch_miss_perpendicular():
    # b passes at horizontal distance 2: min dist^2 = 4 > 1
    touch = first_touch_time(seg(0, 0), seg(2, -3, "N"), F(0), F(10), F(1))
    assert touch is None


def test_touch_requires_outside_start():
    # strictly inside the threshold at the interval start violates the contract
    with pytest.raises(ValueError):
        first_touch_time(seg(0, 0), seg(F(1, 2), 0, "W"), F(0), F(1), F(1))
    # exactly at the threshold is a touch at the interval start
    touch = first_touch_time(seg(0, 0), seg(1, 0, "W"), F(0), F(1), F(1))
    assert touch is not None and touch.exact == 0


def test_touch_tangential_detected():
    # b passes at horizontal distance exactly 1: grazing touch at the vertex
    touch = first_touch_time(seg(0, 0), seg(1, -5, "N"), F(0), F(10), F(1))
    assert touch is not None
    assert touch.tangential
    assert touch.exact == 5


def test_touch_irrational_bracketed():
    # inert at origin, mover North on the line x=1/2: touch when
    # 1/4 + (t-5)^2 = 1, i.e. t = 5 - sqrt(3)/2 (irrational)
    touch = first_touch_time(seg(0, 0), seg(F(1, 2), -5, "N"), F(0), F(10), F(1))
    assert touch is not None
    assert touch.exact is None
    assert touch.width() <= F(1, 2**40)
    assert touch.lo < touch.hi
    # exact comparisons around the bracket
    assert touch.compare_to(F(4)) == 1
    assert touch.compare_to(F(5)) == -1
    mid = touch.midpoint()
    # the bracket really contains the root: signs differ at the ends
    a, b, c0 = touch.poly
    assert (a * touch.lo + b) * touch.lo + c0 > 0
    assert (a * touch.hi + b) * touch.hi + c0 < 0
    assert touch.compare_to(mid) in (-1, 1)


def test_touch_threshold_parameter():
    # same geometry, threshold 4 (distance 2): (3-t)^2 = 4 -> t = 1
    touch = first_touch_time(seg(0, 0), seg(3, 0, "W"), F(0), F(10), F(4))
    assert touch is not None and touch.exact == 1


def test_touch_at_interval_start_boundary():
    touch = first_touch_time(seg(0, 0), seg(1, 0, "E"), F(0), F(1), F(1))
    assert touch is not None and touch.exact == 0


def test_touch_respects_interval_end():
    # closing pair, but the interval stops before the touch
    touch = first_touch_time(seg(0, 0), seg(3, 0, "W"), F(0), F(3, 2), F(1))
    assert touch is None


def test_shifted_comparisons():
    touch = first_touch_time(seg(0, 0), seg(F(1, 2), -5, "N"), F(0), F(10), F(1))
    shifted = touch.shifted(F(3))
    assert shifted.compare_to(F(1)) == 1
    assert shifted.compare_to(F(2)) == -1
    assert shifted.midpoint() == touch.midpoint() - 3


# -- randomized cross-check against dense sampling ------------------------------

# The solver verdict is compared with an independent check on a fine grid:
# a "touch" must be confirmed by a grid point at or below the threshold just
# after the reported instant (or be tangential), and a "none" must leave
# every grid point above the threshold.  Pairs that provably stay far are
# checked by the triangle inequality instead of sampling.


def _grid_first_inside(a, b, c, threshold_sq, lo, hi, grid_step):
    """First grid instant with dist_sq <= threshold, via integer recurrence."""
    from math import lcm

    count = int((hi - lo) / grid_step) + 1
    # q(k) = dist_sq(lo + k*step) - threshold, an integer-valued quadratic
    # after clearing denominators; scan with second differences
    a2 = a * grid_step * grid_step
    a1 = (2 * a * lo + b) * grid_step
    a0 = (a * lo + b) * lo + c - threshold_sq
    den = lcm(a2.denominator, a1.denominator, a0.denominator)
    i2 = a2.numerator * (den // a2.denominator)
    i1 = a1.numerator * (den // a1.denominator)
    val = a0.numerator * (den // a0.denominator)
    diff = i2 + i1
    for k in range(count):
        if val <= 0:
            return lo + k * grid_step
        val += diff
        diff += 2 * i2
    return None


def _dense_check(seg_a, seg_b, t0, t1, threshold_sq, touch, step=F(1, 2**12)):
    a, b, c = squared_distance_polynomial(seg_a, seg_b, t0, t1)
    if touch is None:
        assert _grid_first_inside(a, b, c, threshold_sq, t0, t1, step) is None
        return
    if touch.tangential:
        assert (a * touch.exact + b) * touch.exact + c == threshold_sq
        return
    # transversal: a fine grid instant just past the touch must be inside
    upper = min(touch.hi + step, t1)
    assert _grid_first_inside(a, b, c, threshold_sq, touch.lo, upper, step / 16) is not None


def test_random_segments_against_sampling():
    rng = random.Random(20240811)
    directions = [None, "N", "E", "S", "W"]
    checked_near = 0
    for case in range(10_000):
        ax, ay = F(rng.randrange(-64, 65)), F(rng.randrange(-64, 65))
        if case % 10 == 0:
            # constructed near pair: offset within a few units
            bx = ax + F(rng.randrange(-32, 33), 8)
            by = ay + F(rng.randrange(-32, 33), 8)
        else:
            bx = ax + F(rng.randrange(-192, 193), 8)
            by = ay + F(rng.randrange(-192, 193), 8)
        da = directions[rng.randrange(5)]
        db = directions[rng.randrange(5)]
        t1 = F(rng.randrange(1, 9), 4)
        seg_a = MotionSegment(F(0), t1, Point(ax, ay), ZERO if da is None else velocity_of(da))
        seg_b = MotionSegment(F(0), t1, Point(bx, by), ZERO if db is None else velocity_of(db))
        threshold_sq = F(1)
        d0 = squared_distance(Point(ax, ay), Point(bx, by))
        if d0 <= threshold_sq:
            continue  # outside the solver's precondition
        touch = first_touch_time(seg_a, seg_b, F(0), t1, threshold_sq)
        # cheap exact clearance bound: separation shrinks at most 2 per unit
        reach = 1 + 2 * t1
        if d0 > reach * reach:
            assert touch is None
            continue
        checked_near += 1
        _dense_check(seg_a, seg_b, F(0), t1, threshold_sq, touch)
    assert checked_near > 200  # the interesting cases were actually exercised


def test_polynomial_matches_endpoints_random():
    rng = random.Random(7)
    directions = [None, "N", "E", "S", "W"]
    for _ in range(500):
        pa = Point(F(rng.randrange(-100, 100), 16), F(rng.randrange(-100, 100), 16))
        pb = Point(F(rng.randrange(-100, 100), 16), F(rng.randrange(-100, 100), 16))
        da = directions[rng.randrange(5)]
        db = directions[rng.randrange(5)]
        t0 = F(rng.randrange(0, 50), 8)
        t1 = t0 + F(rng.randrange(1, 50), 8)
        seg_a = MotionSegment(t0, t1, pa, ZERO if da is None else velocity_of(da))
        seg_b = MotionSegment(t0, t1, pb, ZERO if db is None else velocity_of(db))
        a, b, c = squared_distance_polynomial(seg_a, seg_b, t0, t1)
        for t in (t0, t1):
            assert (a * t + b) * t + c == squared_distance(
                seg_a.position_at(t), seg_b.position_at(t)
            )


def test_determinism_bit_identical():
    args = (seg(0, 0, "N"), seg(F(7, 3), -4, "N"), F(0), F(50), F(1))
    first = first_touch_time(*args)
    second = first_touch_time(*args)
    assert first == second
