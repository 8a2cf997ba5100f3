"""Radial functions on a local field as valuation-indexed sequences.

A radial ``f`` is stored through ``a_l = f(x)`` for ``|x| = q^-l``: explicit
values on a window ``[lo, hi]`` plus exponential-polynomial tails below and
above it.  A missing tail means ``a_l = 0`` on that side.  Characteristic
functions of balls and spheres, ``<y>^-N`` and the outputs of the kernel
operators all live in this class, so Haar integrals and weighted ball
integrals reduce to closed-form geometric sums.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Optional, Sequence

from .expsum import ExpPoly, lower_sum, range_sum, upper_sum
from .field import FieldParams
from .numeric import Number, as_exact, fmt, is_exact, qpow, rel_close, rpow, simplify


class NonIntegrable(ValueError):
    """A tail makes the requested integral diverge."""

    def __init__(self, message: str, side: str):
        super().__init__(message)
        self.side = side


class NonGeometricTail(ValueError):
    """The computation needs a single pure geometric tail on this side."""

    def __init__(self, message: str, side: str):
        super().__init__(message)
        self.side = side


def _qof(q) -> int:
    return q.q if isinstance(q, FieldParams) else int(q)


@dataclass(frozen=True)
class RadialFunction:
    q: int
    lo: int
    values: tuple
    lower: ExpPoly = field(default_factory=ExpPoly)
    upper: ExpPoly = field(default_factory=ExpPoly)
    attached: bool = False
    # set when the outside of the window is only known through a bound
    remainder: Optional[dict] = None

    def __post_init__(self):
        if self.q < 2:
            raise ValueError("q must be >= 2")
        if not self.values:
            raise ValueError("window must be nonempty")
        if self.attached:
            if not self.lower.is_zero() and not rel_close(self.lower(self.lo, self.q), self.values[0], 1e-12):
                raise ValueError("lower tail is not attached to the window start")
            if not self.upper.is_zero() and not rel_close(self.upper(self.hi, self.q), self.values[-1], 1e-12):
                raise ValueError("upper tail is not attached to the window end")

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    def __call__(self, m: int) -> Number:
        if m < self.lo:
            self._outside(m)
            return self.lower(m, self.q) if not self.lower.is_zero() else 0
        if m > self.hi:
            self._outside(m)
            return self.upper(m, self.q) if not self.upper.is_zero() else 0
        return self.values[m - self.lo]

    def _outside(self, m):
        if self.remainder is not None:
            raise ValueError(
                f"value at index {m} lies outside the computed window [{self.lo}, {self.hi}]; "
                "only a remainder bound is known there"
            )

    def window(self, lo: int, hi: int) -> list:
        return [self(m) for m in range(lo, hi + 1)]

    def is_finitely_supported(self) -> bool:
        return self.lower.is_zero() and self.upper.is_zero()

    def canonical(self) -> "RadialFunction":
        """Shrink the window while its edge values agree with the tails."""
        vals = list(self.values)
        lo = self.lo
        while len(vals) > 1 and vals[0] == (self.lower(lo, self.q) if not self.lower.is_zero() else 0):
            vals.pop(0)
            lo += 1
        while len(vals) > 1 and vals[-1] == (self.upper(lo + len(vals) - 1, self.q) if not self.upper.is_zero() else 0):
            vals.pop()
        return replace(self, lo=lo, values=tuple(vals), attached=False)

    # -- serialisation -----------------------------------------------------

    def to_json(self) -> dict:
        out = {
            "q": self.q,
            "window": {"lo": self.lo, "hi": self.hi},
            "values": [fmt(v) for v in self.values],
            "lower_tail": _tail_json(self.lower, self.q),
            "upper_tail": _tail_json(self.upper, self.q),
        }
        if self.remainder is not None:
            out["remainder"] = self.remainder
        return out

    @classmethod
    def from_json(cls, data: dict, q=None) -> "RadialFunction":
        qq = int(data.get("q", q) if q is None else q)
        if "q" in data and q is not None and int(data["q"]) != int(q):
            raise ValueError(f"function was built for q={data['q']}, not q={q}")
        lo = int(data["window"]["lo"])
        values = tuple(as_exact(v) for v in data["values"])
        hi = data["window"].get("hi")
        if hi is not None and int(hi) != lo + len(values) - 1:
            raise ValueError("window.hi does not match the number of values")
        return cls(
            qq, lo, values,
            _tail_from_json(data.get("lower_tail"), qq),
            _tail_from_json(data.get("upper_tail"), qq),
        )


def _tail_json(tail: ExpPoly, q: int):
    if tail.is_zero():
        return None
    geo = tail.as_geometric()
    if geo is not None:
        c, s = geo
        return {"c": fmt(c), "sigma": fmt(qpow(q, s)), "log_q_sigma": fmt(s)}
    return {"terms": [{"log_q_sigma": fmt(s), "poly": [fmt(c) for c in p]} for s, p in tail.terms]}


def sigma_to_exponent(sigma, q: int):
    """``log_q(sigma)``, exact when ``sigma`` is an integer power of ``q``."""
    sigma = as_exact(sigma)
    if not sigma > 0:
        raise ValueError("sigma must be > 0")
    if is_exact(sigma):
        fs = Fraction(sigma)
        e = round(math.log(fs) / math.log(q))
        if Fraction(q) ** e == fs:
            return Fraction(e)
    return math.log(float(sigma)) / math.log(q)


def _tail_from_json(data, q: int) -> ExpPoly:
    if data is None:
        return ExpPoly()
    if "terms" in data:
        return ExpPoly.from_terms(
            (as_exact(t["log_q_sigma"]), tuple(as_exact(c) for c in t["poly"])) for t in data["terms"]
        )
    c = as_exact(data["c"])
    if "log_q_sigma" in data:
        s = as_exact(data["log_q_sigma"])
    else:
        s = sigma_to_exponent(data["sigma"], q)
    return ExpPoly.geometric(c, s)


# -- constructors ------------------------------------------------------------


def zero_function(q) -> RadialFunction:
    return RadialFunction(_qof(q), 0, (Fraction(0),))


def char_ball(eta: int, q) -> RadialFunction:
    """Indicator of ``B^eta``: ``a_l = 1`` for ``l >= eta``."""
    return RadialFunction(_qof(q), eta, (Fraction(1),), upper=ExpPoly.geometric(Fraction(1), Fraction(0)))


def char_sphere(eta: int, q) -> RadialFunction:
    return RadialFunction(_qof(q), eta, (Fraction(1),))


def japanese_bracket(N, q) -> RadialFunction:
    """``<y>^-N = max(1, |y|)^-N``: 1 on ``B^0`` and ``q^(lN)`` for ``l < 0``."""
    N = as_exact(N)
    if not N > 0:
        raise ValueError("N must be > 0")
    return RadialFunction(
        _qof(q), 0, (Fraction(1),),
        lower=ExpPoly.geometric(Fraction(1), N),
        upper=ExpPoly.geometric(Fraction(1), Fraction(0)),
    )


def from_sequence(q, lo: int, values: Sequence[Number], lower=None, upper=None) -> RadialFunction:
    """Convenience constructor; ``lower``/``upper`` are ``(c, log_q_sigma)`` pairs."""
    lt = ExpPoly.geometric(*lower) if lower is not None else ExpPoly()
    ut = ExpPoly.geometric(*upper) if upper is not None else ExpPoly()
    return RadialFunction(_qof(q), lo, tuple(values), lt, ut)


# -- linear structure ----------------------------------------------------------


def evaluate(f: RadialFunction, m: int) -> Number:
    return f(m)


def scale(f: RadialFunction, c) -> RadialFunction:
    c = as_exact(c) if not isinstance(c, float) else c
    return replace(
        f,
        values=tuple(simplify(c * v) for v in f.values),
        lower=f.lower.scale(c),
        upper=f.upper.scale(c),
        attached=False,
    )


def add(f: RadialFunction, g: RadialFunction) -> RadialFunction:
    """Pointwise sum.

    Tails are added term by term; tails with different ratios are kept as a
    two-term exponential polynomial rather than rejected.
    """
    if f.q != g.q:
        raise ValueError(f"cannot add functions over q={f.q} and q={g.q}")
    if f.remainder is not None or g.remainder is not None:
        raise ValueError("cannot add windowed functions carrying only a remainder bound")
    lo, hi = min(f.lo, g.lo), max(f.hi, g.hi)
    values = tuple(simplify(f(m) + g(m)) for m in range(lo, hi + 1))
    return RadialFunction(f.q, lo, values, f.lower + g.lower, f.upper + g.upper)


def dilate(f: RadialFunction, l: int) -> RadialFunction:
    """``(D_tau f)(x) = f(tau x)`` for ``|tau| = q^-l``: ``b_m = a_(m+l)``.

    Only ``|tau|`` is visible to a radial function, so the dilation acts as
    an index shift.
    """
    return RadialFunction(
        f.q, f.lo - l, f.values, f.lower.shift(l, f.q), f.upper.shift(l, f.q),
        remainder=f.remainder,
    )


def same_function(f: RadialFunction, g: RadialFunction, rtol: float = 0.0, pad: int = 3) -> bool:
    """Equality of two representations (window values and tails)."""
    if f.q != g.q:
        return False
    lo, hi = min(f.lo, g.lo) - pad, max(f.hi, g.hi) + pad
    for m in range(lo, hi + 1):
        if not rel_close(f(m), g(m), rtol, atol=rtol * 1e-300):
            return False
    return _same_tail(f.lower, g.lower, rtol) and _same_tail(f.upper, g.upper, rtol)


def _same_tail(a: ExpPoly, b: ExpPoly, rtol: float) -> bool:
    if len(a.terms) != len(b.terms):
        return False
    for (sa, pa), (sb, pb) in zip(a.terms, b.terms):
        if not rel_close(sa, sb, rtol) or len(pa) != len(pb):
            return False
        if not all(rel_close(x, y, rtol) for x, y in zip(pa, pb)):
            return False
    return True


# -- integrals -------------------------------------------------------------------


def _require_exact_outside(f: RadialFunction):
    if f.remainder is not None:
        raise ValueError("integrals need exact tails; this function is windowed with a remainder bound")


def haar_integral(f: RadialFunction) -> Number:
    """``int_K f(x) dx = sum_l a_l q^-l (1 - 1/q)``."""
    _require_exact_outside(f)
    q = f.q
    w = 1 - Fraction(1, q)
    total = sum(v * qpow(q, -l) for l, v in zip(range(f.lo, f.hi + 1), f.values))
    for s, p in f.lower.terms:
        if not s - 1 > 0:
            raise NonIntegrable(
                f"lower tail ratio q^{fmt(s)} is not integrable at infinity (needs sigma > q)", "lower"
            )
        total += lower_sum(p, s - 1, q, f.lo - 1)
    for s, p in f.upper.terms:
        if not s - 1 < 0:
            raise NonIntegrable(
                f"upper tail ratio q^{fmt(s)} is not integrable at the origin (needs sigma < q)", "upper"
            )
        total += upper_sum(p, s - 1, q, f.hi + 1)
    return simplify(total * w)


def tail_mass(f: RadialFunction, side: str, r, alpha):
    """``(C, t)`` with ``|a_l|^r q^(-l(alpha+1)) (1-1/q) = C q^(t l)`` on a tail, or ``None``."""
    tail = f.lower if side == "lower" else f.upper
    if tail.is_zero():
        return None
    geo = tail.as_geometric()
    if geo is None:
        raise NonGeometricTail(
            f"{side} tail is not a single geometric term; weighted integrals need c*sigma^l tails", side
        )
    c, s = geo
    q = f.q
    return rpow(c, r) * (1 - Fraction(1, q)), r * s - alpha - 1


def sphere_mass(f: RadialFunction, l: int, r, alpha) -> Number:
    """``int_{S^l} |f|^r |y|^alpha dy``."""
    q = f.q
    return rpow(f(l), r) * qpow(q, -l * (alpha + 1)) * (1 - Fraction(1, q))


def weighted_ball_integral(f: RadialFunction, k: int, r, alpha) -> Number:
    """``int_{B^k} |f(y)|^r |y|^alpha dy``."""
    _require_exact_outside(f)
    r, alpha = as_exact(r), as_exact(alpha)
    q = f.q
    total = 0
    for l in range(max(k, f.lo), f.hi + 1):
        total += sphere_mass(f, l, r, alpha)
    up = tail_mass(f, "upper", r, alpha)
    if up is not None:
        C, t = up
        if not t < 0:
            raise NonIntegrable("upper tail: |f|^r |y|^alpha is not integrable near the origin", "upper")
        total += C * upper_sum((1,), t, q, max(k, f.hi + 1))
    if k < f.lo:
        low = tail_mass(f, "lower", r, alpha)
        if low is not None:
            C, t = low
            total += C * range_sum((1,), t, q, k, f.lo - 1)
    return simplify(total)
