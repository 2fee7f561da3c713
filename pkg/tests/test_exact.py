from fractions import Fraction

import pytest

from rendezsim.exact import (
    ScalarParseError,
    decimal_str,
    exact_sqrt,
    format_scalar,
    parse_scalar,
    sqrt_decimal_str,
)


@pytest.mark.parametrize(
    "text,expected",
    [
        ("3/4", Fraction(3, 4)),
        ("-7/2", Fraction(-7, 2)),
        ("0.25", Fraction(1, 4)),
        ("10", Fraction(10)),
        ("-3", Fraction(-3)),
        ("  1/3 ", Fraction(1, 3)),
    ],
)
def test_parse_scalar(text, expected):
    assert parse_scalar(text) == expected


@pytest.mark.parametrize("bad", ["3/0", "1/-2", "a/b", "", "1/2/3", None, 0.5, True])
def test_parse_scalar_rejects(bad):
    with pytest.raises(ScalarParseError):
        parse_scalar(bad)


def test_parse_scalar_passthrough():
    assert parse_scalar(Fraction(5, 7)) == Fraction(5, 7)
    assert parse_scalar(4) == Fraction(4)


def test_format_round_trip():
    for frac in [Fraction(0), Fraction(-3), Fraction(22, 7), Fraction(-1, 3)]:
        assert parse_scalar(format_scalar(frac)) == frac


def test_decimal_str():
    assert decimal_str(Fraction(1, 2)) == "0.500000000000"
    assert decimal_str(Fraction(-1, 3), 6) == "-0.333333"
    assert decimal_str(Fraction(2, 3), 6) == "0.666667"
    assert decimal_str(Fraction(5)) == "5.000000000000"


def test_exact_sqrt():
    assert exact_sqrt(Fraction(9, 4)) == Fraction(3, 2)
    assert exact_sqrt(Fraction(2)) is None
    assert exact_sqrt(Fraction(0)) == 0
    assert exact_sqrt(Fraction(-1)) is None


def test_sqrt_decimal_str():
    assert sqrt_decimal_str(Fraction(25), 6) == "5.000000"
    # sqrt(2) truncated
    assert sqrt_decimal_str(Fraction(2), 6) == "1.414213"
