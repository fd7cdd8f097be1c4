"""Exact rational scalars and planar points.

Every quantity in this package is an exact rational.  We represent a
rational as either a plain ``int`` or a ``fractions.Fraction``: Python ints
are exact rationals (they carry ``.numerator``/``.denominator``), they
compare and hash consistently with equal Fractions, and integer fast paths
keep the big set computations roughly an order of magnitude faster than
all-Fraction arithmetic.  ``canonical`` collapses integer-valued Fractions
to ints; mixed representations are still exact and dedupe correctly, so
operations are free to return either form.
"""

from __future__ import annotations

import re
from fractions import Fraction
from typing import NamedTuple, Union

Rational = Union[int, Fraction]

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


def canonical(value: Rational) -> Rational:
    """Collapse an integer-valued Fraction to a plain int."""
    if isinstance(value, Fraction) and value.denominator == 1:
        return value.numerator
    return value


def rational(value: Union[int, str, Fraction]) -> Rational:
    """Build an exact rational from an int, Fraction, or "p/q" string.

    Floats are rejected: converting them silently would smuggle binary
    rounding error into computations whose whole point is exactness.
    """
    if isinstance(value, bool):
        raise TypeError("bool is not a rational value")
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return canonical(value)
    if isinstance(value, str):
        return parse_rational(value)
    raise TypeError(f"cannot build an exact rational from {type(value).__name__}")


def parse_rational(text: str) -> Rational:
    """Parse "p/q" or a bare integer "p"; result is in lowest terms."""
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise ValueError(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    if m.group(2) is None:
        return num
    den = int(m.group(2))
    if den == 0:
        raise ZeroDivisionError(f"zero denominator in {text!r}")
    return canonical(Fraction(num, den))


def format_rational(value: Rational) -> str:
    """Render in lowest terms: "p" when the denominator is 1, else "p/q"."""
    num, den = value.numerator, value.denominator
    return str(num) if den == 1 else f"{num}/{den}"


def exact_div(a: Rational, b: Rational) -> Rational:
    """Exact quotient a/b.  Raises ZeroDivisionError when b == 0."""
    if b == 0:
        raise ZeroDivisionError("exact division by zero")
    return canonical(Fraction(a, b))


class Point(NamedTuple):
    """A planar point with exact coordinates, ordered lexicographically."""

    x: Rational
    y: Rational

    def __add__(self, other: "Point") -> "Point":  # type: ignore[override]
        return Point(self.x + other.x, self.y + other.y)

    def __str__(self) -> str:
        return f"({format_rational(self.x)}, {format_rational(self.y)})"
