"""Exact rational scalars: parsing, formatting and decimal rendering.

Every quantity in the core (positions, durations, thresholds) is a
``fractions.Fraction``.  Nothing is rounded inside the engine; values are
reduced to fixed-precision decimal strings only at the output boundary.
"""

from __future__ import annotations

import math
from fractions import Fraction

__all__ = [
    "Scalar",
    "ScalarParseError",
    "parse_scalar",
    "format_scalar",
    "decimal_str",
    "sqrt_decimal_str",
    "exact_sqrt",
]

Scalar = Fraction


class ScalarParseError(ValueError):
    """A rational literal that cannot be represented exactly."""


def parse_scalar(value: object) -> Fraction:
    """Parse ``"p/q"`` or a finite decimal string into an exact rational.

    Integers and Fractions pass through unchanged.  Floats are rejected:
    they carry binary rounding error and would silently break the exact
    equality comparisons the agents rely on.
    """
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ScalarParseError("booleans are not scalars")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        raise ScalarParseError("float literals are not exact; pass a string like '1/3' or '0.25'")
    if isinstance(value, str):
        text = value.strip()
        if not text:
            raise ScalarParseError("empty scalar literal")
        if "/" in text:
            num_text, _, den_text = text.partition("/")
            try:
                num = int(num_text)
                den = int(den_text)
            except ValueError as exc:
                raise ScalarParseError(f"bad rational literal {value!r}") from exc
            if den <= 0:
                raise ScalarParseError(f"denominator must be a positive integer in {value!r}")
            return Fraction(num, den)
        try:
            return Fraction(text)
        except (ValueError, ZeroDivisionError) as exc:
            raise ScalarParseError(f"bad scalar literal {value!r}") from exc
    raise ScalarParseError(f"cannot parse {type(value).__name__} as a scalar")


def format_scalar(x: Fraction) -> str:
    """Canonical exact text form: ``"n"`` for integers, else ``"p/q"``."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def decimal_str(x: Fraction, digits: int = 12) -> str:
    """Fixed-point decimal rendering with ``digits`` fractional digits.

    Deterministic: rounds half away from zero.
    """
    sign = "-" if x < 0 else ""
    num = abs(x.numerator)
    den = x.denominator
    scale = 10**digits
    whole, rem = divmod(num * scale, den)
    if 2 * rem >= den:
        whole += 1
    int_part, frac_part = divmod(whole, scale)
    return f"{sign}{int_part}.{frac_part:0{digits}d}"


def exact_sqrt(x: Fraction) -> Fraction | None:
    """Exact square root if ``x`` is a perfect rational square, else None."""
    if x < 0:
        return None
    num_root = math.isqrt(x.numerator)
    den_root = math.isqrt(x.denominator)
    if num_root * num_root == x.numerator and den_root * den_root == x.denominator:
        return Fraction(num_root, den_root)
    return None


def sqrt_decimal_str(x: Fraction, digits: int = 12) -> str:
    """Decimal rendering of ``sqrt(x)``, truncated to ``digits`` digits.

    sqrt(n/d) = sqrt(n*d)/d, so the scaled integer square root is exact.
    """
    if x < 0:
        raise ValueError("square root of a negative scalar")
    scale = 10**digits
    scaled = math.isqrt(x.numerator * x.denominator * scale * scale) // x.denominator
    int_part, frac_part = divmod(scaled, scale)
    return f"{int_part}.{frac_part:0{digits}d}"
