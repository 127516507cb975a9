"""Exact scalars: ``Fraction`` for finite values, ``math.inf`` for infinity.

Float-mode instances carry plain floats; comparisons involving a float use a
relative tolerance of 1e-9, comparisons between rationals are exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

Scalar = Union[Fraction, float]

INF = math.inf
REL_TOL = 1e-9


def is_exact(x) -> bool:
    return isinstance(x, Rational)


def is_inf(x) -> bool:
    return isinstance(x, float) and math.isinf(x) and x > 0


def parse(value, mode: str = "exact") -> Scalar:
    """Parse ``"num/den"``, ``"inf"``, ints, decimal strings or floats.

    In exact mode floats are converted through their decimal repr so that
    ``0.1`` becomes ``1/10`` rather than the nearest binary fraction.
    """
    if isinstance(value, bool):
        raise TypeError("booleans are not scalars")
    if isinstance(value, str):
        text = value.strip().lower()
        if text in ("inf", "+inf", "infinity"):
            return INF
        if mode == "float":
            if "/" in text:
                return float(Fraction(text))
            return float(text)
        return Fraction(text)
    if isinstance(value, Rational):
        return Fraction(value) if mode == "exact" else float(value)
    if isinstance(value, float):
        if math.isinf(value):
            if value < 0:
                raise ValueError("negative infinity is not a scalar")
            return INF
        if math.isnan(value):
            raise ValueError("nan is not a scalar")
        return Fraction(repr(value)) if mode == "exact" else value
    raise TypeError(f"cannot parse scalar from {value!r}")


def dump(x) -> Union[str, float]:
    """Serialize: rationals as ``"num/den"`` strings, infinity as ``"inf"``."""
    if is_inf(x):
        return "inf"
    if is_exact(x):
        x = Fraction(x)
        return f"{x.numerator}/{x.denominator}"
    return float(x)


def decimal_str(x, digits: int = 12) -> str:
    """Render with ``digits`` significant digits, computed from the exact value."""
    if is_inf(x):
        return "inf"
    if not is_exact(x):
        return f"{float(x):.{digits}g}"
    from decimal import Context, Decimal

    x = Fraction(x)
    ctx = Context(prec=digits)
    d = ctx.divide(Decimal(x.numerator), Decimal(x.denominator))
    return format(d.normalize(ctx), "f") if d != 0 else "0"


def eq(a, b) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    if is_inf(a) or is_inf(b):
        return a == b
    return math.isclose(float(a), float(b), rel_tol=REL_TOL, abs_tol=REL_TOL * 1e-3)


def gt(a, b) -> bool:
    """Strictly greater, tolerance-aware when either side is a float."""
    return a > b and not eq(a, b)


def ge(a, b) -> bool:
    return a > b or eq(a, b)


def floor_log(x, base: Fraction) -> int:
    """Largest integer ``r`` with ``base**r <= x`` (exact; ``x > 0``, ``base > 1``)."""
    if not x > 0:
        raise ValueError("floor_log needs a positive argument")
    x = Fraction(x)
    base = Fraction(base)
    est = (_log(x) / _log(base))
    r = math.floor(est)
    while base ** (r + 1) <= x:
        r += 1
    while base ** r > x:
        r -= 1
    return r


def ceil_log(x, base: Fraction) -> int:
    """Smallest integer ``r`` with ``base**r >= x``."""
    r = floor_log(x, base)
    return r if Fraction(base) ** r == Fraction(x) else r + 1


def exact_exponent(x, base: Fraction, unit=Fraction(1)):
    """Return ``r`` when ``x == unit * base**r`` exactly, else ``None``."""
    if not x > 0:
        return None
    ratio = Fraction(x) / Fraction(unit)
    r = floor_log(ratio, base)
    return r if Fraction(base) ** r == ratio else None


def _log(x: Fraction) -> float:
    # big-int safe natural log
    return math.log(x.numerator) - math.log(x.denominator)
