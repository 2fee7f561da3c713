from fractions import Fraction as F

import pytest

from rendezsim.kernel import (
    DISTORTIONS,
    FAR,
    NEAR,
    AgentProtocolError,
    BinaryReading,
    HaltForever,
    Move,
    OpaqueOrderedLevel,
    Wait,
    compare_levels,
)


def level(x):
    return OpaqueOrderedLevel(F(x))


def test_compare_levels_follows_distance_change():
    # previous distance 5, current 3: the agent got closer
    assert compare_levels(level(25), level(9)) == "smaller"
    assert compare_levels(level(4), level(4)) == "equal"
    assert compare_levels(level(9), level(25)) == "larger"


def test_levels_expose_only_ordering():
    a, b = level(2), level(3)
    assert a < b and b > a and a != b and a == level(2)
    assert "2" not in repr(a)  # magnitude is not printable
    with pytest.raises(AttributeError):
        a.value = 1  # immutable, and no public payload
    assert not hasattr(a, "value")


def test_binary_reading_erases_the_cause():
    # Far is one nullary value: absent vs beyond-radius cannot be told apart
    assert BinaryReading("far") is FAR
    assert FAR.value == "far"
    assert not hasattr(FAR, "distance")
    assert list(BinaryReading) == [NEAR, FAR]


def test_action_validation():
    with pytest.raises(ValueError):
        Move("N", F(0))
    with pytest.raises(ValueError):
        Move("X", F(1))
    with pytest.raises(ValueError):
        Wait(F(-1))
    assert HaltForever() is HaltForever()  # one terminal value


def test_distortions_strictly_increasing():
    probes = [F(0), F(1, 3), F(1), F(3, 2), F(2), F(7), F(100, 7), F(50)]
    for name, fn in DISTORTIONS.items():
        values = [fn(x) for x in sorted(probes)]
        assert all(u < v for u, v in zip(values, values[1:])), name


def test_exp2_distortion_exact_points():
    exp2 = DISTORTIONS["exp2"]
    assert exp2(F(0)) == 1
    assert exp2(F(3)) == 8
    assert exp2(F(5, 2)) == 6  # 2**2 * (1 + 1/2)
    with pytest.raises(ValueError):
        exp2(F(2**20))
