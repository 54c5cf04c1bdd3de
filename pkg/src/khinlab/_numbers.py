"""Decimal ingestion and common-power-of-ten integer scaling.

Exact comparisons (zero mass, tail ties) are only cheap when every input is a
short decimal.  Such inputs are mapped to integers sharing one power of ten;
anything longer falls back to floats with a documented tolerance.
"""
from __future__ import annotations

from decimal import Decimal, InvalidOperation
from fractions import Fraction
import numpy as np

from .errors import ParseError

MAX_EXACT_DIGITS = 15
INT64_SAFE = 2**62


def to_decimal(value) -> Decimal:
    """Parse a decimal literal; floats go through their shortest repr."""
    if isinstance(value, Decimal):
        d = value
    elif isinstance(value, bool):
        raise ParseError(f"not a number: {value!r}")
    elif isinstance(value, int):
        d = Decimal(value)
    elif isinstance(value, float):
        d = Decimal(repr(value))
    elif isinstance(value, str):
        try:
            d = Decimal(value.strip())
        except InvalidOperation:
            raise ParseError(f"not a decimal number: {value!r}") from None
    elif isinstance(value, np.floating):
        d = Decimal(repr(float(value)))
    elif isinstance(value, np.integer):
        d = Decimal(int(value))
    else:
        raise ParseError(f"unsupported numeric type {type(value).__name__}")
    if not d.is_finite():
        raise ParseError(f"non-finite value {value!r}")
    return d


def to_fraction(value) -> Fraction:
    """Parse a probability: decimal strings, 'num/den' strings, ints, floats."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError):
            raise ParseError(f"not a rational number: {value!r}") from None
    return Fraction(to_decimal(value))


def significant_digits(d: Decimal) -> int:
    if d == 0:
        return 0
    return len(d.normalize().as_tuple().digits)


def scale_to_integers(decimals) -> tuple[list[int], int] | None:
    """Return (ints, e) with decimals[i] == ints[i] * 10**e, or None.

    None means some entry has more than MAX_EXACT_DIGITS significant digits.
    """
    nonzero = [d.normalize() for d in decimals if d != 0]
    if any(significant_digits(d) > MAX_EXACT_DIGITS for d in nonzero):
        return None
    if not nonzero:
        return [0] * len(decimals), 0
    e = min(d.as_tuple().exponent for d in nonzero)
    ints = [int(d.scaleb(-e)) if d != 0 else 0 for d in decimals]
    return ints, e


def int_array(ints, bound: int) -> np.ndarray:
    """int64 array when every value reachable downstream stays below INT64_SAFE."""
    if bound < INT64_SAFE:
        return np.asarray(ints, dtype=np.int64)
    return np.asarray([int(v) for v in ints], dtype=object)


def scaled_to_float(values: np.ndarray, e: int) -> np.ndarray:
    """Convert integer-scaled values to float64, value * 10**e."""
    f = np.asarray(values, dtype=np.float64)
    if e >= 0:
        return f * float(10**e)
    return f / float(10 ** (-e))


def fraction_of(i: int, e: int) -> Fraction:
    return Fraction(i) * Fraction(10) ** e
