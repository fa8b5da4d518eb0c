"""Exact fixed-point weights: integers over 2**L_MAX."""
from __future__ import annotations

from fractions import Fraction
from typing import Union

from .errors import InputError, ParameterError

L_MAX = 52
ONE = 1 << L_MAX

Number = Union[int, float, str, Fraction]


def as_fraction(value: Number) -> Fraction:
    # floats go through repr so 0.1 means 1/10, not the nearest double
    if isinstance(value, Fraction):
        return value
    if isinstance(value, bool):
        raise ParameterError("boolean is not a number")
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        return Fraction(repr(value))
    try:
        return Fraction(str(value).strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise InputError(f"cannot parse number {value!r}") from exc


def to_weight(value: Number) -> tuple[int, int]:
    """Round a real in [0, 1] to the grid.

    Returns (numerator, direction) where direction is -1, 0 or +1 depending on
    whether the stored value is below, equal to or above the input.
    """
    q = as_fraction(value)
    if q < 0 or q > 1:
        raise InputError(f"weight {q} outside [0, 1]")
    scaled = q * ONE
    w = round(scaled)  # Fraction.__round__ is half-to-even
    return w, (w > scaled) - (w < scaled)


def weight(value: Number) -> int:
    return to_weight(value)[0]


def to_fraction(w: int) -> Fraction:
    return Fraction(w, ONE)


def bit(w: int, i: int) -> int:
    """Bit i of the represented real (bit 0 is the units digit)."""
    return (w >> (L_MAX - i)) & 1


def ceil_log2(q: Fraction) -> int:
    """Smallest integer k with 2**k >= q, for q > 0."""
    if q <= 0:
        raise ParameterError("ceil_log2 needs a positive argument")
    num, den = q.numerator, q.denominator
    k = num.bit_length() - den.bit_length()
    # 2**k is within a factor 2 of q; adjust exactly
    while _pow2(k) < q:
        k += 1
    while _pow2(k - 1) >= q:
        k -= 1
    return k


def floor_log2(q: Fraction) -> int:
    """Largest integer k with 2**k <= q, for q > 0."""
    k = ceil_log2(q)
    return k if _pow2(k) == q else k - 1


def _pow2(k: int) -> Fraction:
    return Fraction(1 << k) if k >= 0 else Fraction(1, 1 << -k)


def pow2(k: int) -> Fraction:
    return _pow2(k)


def floor_grid(q: Fraction) -> int:
    return (q.numerator * ONE) // q.denominator


def ceil_grid(q: Fraction) -> int:
    return -((-q.numerator * ONE) // q.denominator)


def check_unit_interval(name: str, value: Fraction, open_low=True, open_high=True) -> Fraction:
    lo_bad = value <= 0 if open_low else value < 0
    hi_bad = value >= 1 if open_high else value > 1
    if lo_bad or hi_bad:
        raise ParameterError(f"{name}={value} outside its allowed range")
    return value
