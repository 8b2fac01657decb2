"""Exact rational values and their wire format.

Every coordinate, length and slope in this package is a ``fractions.Fraction``.
On the wire a rational is the string ``"p/q"`` (or ``"p"`` when q == 1), in
lowest terms with a positive denominator; anything else is rejected so that
serialized artifacts are canonical.
"""

from __future__ import annotations

import re
from fractions import Fraction
from math import gcd

Rational = Fraction

_RATIONAL_RE = re.compile(r"^(-?\d+)(?:/(\d+))?$")


class MalformedRational(ValueError):
    """String does not denote a reduced rational with positive denominator."""


def parse_rational(text: str) -> Fraction:
    """Parse ``"p"`` or ``"p/q"``; rejects unreduced and zero-denominator input."""
    m = _RATIONAL_RE.match(text.strip())
    if m is None:
        raise MalformedRational(f"not a rational literal: {text!r}")
    num = int(m.group(1))
    if m.group(2) is None:
        return Fraction(num)
    den = int(m.group(2))
    if den == 0:
        raise MalformedRational(f"zero denominator: {text!r}")
    if gcd(abs(num), den) != 1:
        raise MalformedRational(f"not in lowest terms: {text!r}")
    return Fraction(num, den)


def format_rational(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
