"""Number handling shared by every module.

Values are either exact (``int``/``Fraction``) or ``float``.  Exponents of
``q`` are kept as ``Fraction`` whenever the caller supplies rationals, so that
convergence and ordering decisions (``s < 0``, ``x == 0``) are exact.
"""

from __future__ import annotations

import math
from fractions import Fraction
from numbers import Rational
from typing import Union

Number = Union[int, Fraction, float]


def as_exact(x) -> Number:
    """Parse ``x`` into an exact rational when possible.

    Strings such as ``"0.25"`` or ``"1/3"`` become ``Fraction``; floats are
    left alone (their binary value is rarely what the user meant).
    """
    if isinstance(x, bool):
        raise TypeError("booleans are not numbers here")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        s = x.strip()
        if s.lower() in {"inf", "+inf", "infinity"}:
            return math.inf
        if s.lower() in {"-inf", "-infinity"}:
            return -math.inf
        try:
            return Fraction(s)
        except ValueError:
            return float(s)
    if isinstance(x, float):
        return x
    if isinstance(x, Rational):
        return Fraction(x.numerator, x.denominator)
    return float(x)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction))


def is_integral(x) -> bool:
    if isinstance(x, int):
        return True
    if isinstance(x, Fraction):
        return x.denominator == 1
    return False


def simplify(x: Number) -> Number:
    if isinstance(x, Fraction) and x.denominator == 1:
        return Fraction(x.numerator)
    return x


def qpow(q: int, e) -> Number:
    """``q ** e``; exact when ``e`` is an integer."""
    if is_integral(e):
        return Fraction(q) ** int(e)
    return float(q) ** float(e)


def rpow(x: Number, r) -> Number:
    """``|x| ** r`` for ``r > 0``; exact for integer ``r`` and exact ``x``."""
    x = abs(x)
    if x == 0:
        return Fraction(0) if is_exact(x) else 0.0
    if is_integral(r) and is_exact(x):
        return Fraction(x) ** int(r)
    if x == 1 and is_exact(x):
        return Fraction(1)
    return float(x) ** float(r)


def root(x: Number, r) -> Number:
    """Real ``r``-th root of ``x >= 0``."""
    if x == math.inf:
        return math.inf
    if r == 1:
        return x
    if x == 0:
        return Fraction(0) if is_exact(x) else 0.0
    if is_exact(x) and is_integral(r):
        n = int(r)
        fx = Fraction(x)
        num = _iroot(fx.numerator, n)
        den = _iroot(fx.denominator, n)
        if num is not None and den is not None:
            return Fraction(num, den)
    return float(x) ** (1.0 / float(r))


def _iroot(n: int, k: int):
    if n < 0:
        return None
    guess = round(n ** (1.0 / k)) if n < 2**1000 else int(n ** (1.0 / k))
    for c in (guess - 1, guess, guess + 1):
        if c >= 0 and c**k == n:
            return c
    return None


def to_float(x) -> float:
    return float(x)


def fmt(x) -> Union[str, float, None]:
    """JSON-friendly rendering: exact rationals as strings, floats as floats."""
    if x is None:
        return None
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else str(x.numerator)
    if isinstance(x, int):
        return str(x)
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return float(x)


def rel_close(a, b, rtol: float, atol: float = 0.0) -> bool:
    if a == b:
        return True
    a, b = float(a), float(b)
    return abs(a - b) <= max(rtol * max(abs(a), abs(b)), atol)
