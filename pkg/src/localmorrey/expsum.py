"""Exponential polynomials on the integer lattice and their exact sums.

An :class:`ExpPoly` is a finite sum ``sum_s P_s(l) * q**(s*l)`` with
polynomials ``P_s``.  The class is closed under shifts, products with
polynomials and the half-line convolutions needed to apply a kernel to a
radial function, and every geometric-type series over it has a closed form
through the discrete antiderivative ``z*G(j+1) - G(j) = R(j)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import Iterable, Sequence

from .numeric import Number, qpow

Poly = tuple  # coefficients, lowest degree first


def ptrim(p: Sequence[Number]) -> Poly:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def padd(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return ptrim([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def pscale(a: Poly, c: Number) -> Poly:
    return ptrim([c * x for x in a])


def pmul(a: Poly, b: Poly) -> Poly:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        for j, y in enumerate(b):
            out[i + j] += x * y
    return ptrim(out)


def pshift(a: Poly, c: int) -> Poly:
    """Coefficients of ``P(x + c)``."""
    if c == 0 or len(a) <= 1:
        return ptrim(a)
    out = [0] * len(a)
    for k, ak in enumerate(a):
        if ak == 0:
            continue
        for i in range(k + 1):
            out[i] += ak * comb(k, i) * c ** (k - i)
    return ptrim(out)


def peval(a: Poly, x) -> Number:
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def antidifference(r: Poly, z: Number, z_is_one: bool) -> Poly:
    """Polynomial ``G`` with ``z*G(j+1) - G(j) = R(j)``.

    With ``z != 1`` the degree is preserved; with ``z == 1`` it rises by one
    and ``G(0) = 0`` fixes the constant.
    """
    r = ptrim(r)
    if not r:
        return ()
    n = len(r) - 1
    if not z_is_one:
        g = [0] * (n + 1)
        for m in range(n, -1, -1):
            acc = r[m]
            for i in range(m + 1, n + 1):
                acc -= z * g[i] * comb(i, m)
            g[m] = _div(acc, z - 1)
        return ptrim(g)
    g = [0] * (n + 2)
    for m in range(n, -1, -1):
        acc = r[m]
        for i in range(m + 2, n + 2):
            acc -= g[i] * comb(i, m)
        g[m + 1] = _div(acc, m + 1)
    return ptrim(g)


def _div(x, y):
    if isinstance(x, int) and isinstance(y, int):
        return Fraction(x, y)
    return x / y


@dataclass(frozen=True)
class ExpPoly:
    """``sum_s P_s(l) q**(s*l)`` as a sorted tuple of ``(s, P_s)`` pairs."""

    terms: tuple = ()

    @classmethod
    def geometric(cls, c: Number, s) -> "ExpPoly":
        if c == 0:
            return cls()
        return cls(((s, (c,)),))

    @classmethod
    def from_terms(cls, pairs: Iterable) -> "ExpPoly":
        acc: dict = {}
        for s, p in pairs:
            key = _find_key(acc, s)
            acc[key] = padd(acc.get(key, ()), tuple(p))
        items = [(s, p) for s, p in acc.items() if p]
        items.sort(key=lambda t: float(t[0]))
        return cls(tuple(items))

    def is_zero(self) -> bool:
        return not self.terms

    def as_geometric(self):
        """``(c, s)`` if this is a single pure geometric term, else ``None``."""
        if len(self.terms) == 1 and len(self.terms[0][1]) == 1:
            s, p = self.terms[0]
            return p[0], s
        return None

    def __call__(self, l: int, q: int) -> Number:
        total = 0
        for s, p in self.terms:
            total += peval(p, l) * qpow(q, s * l)
        return total

    def __add__(self, other: "ExpPoly") -> "ExpPoly":
        return ExpPoly.from_terms(self.terms + other.terms)

    def scale(self, c: Number) -> "ExpPoly":
        if c == 0:
            return ExpPoly()
        return ExpPoly.from_terms((s, pscale(p, c)) for s, p in self.terms)

    def shift(self, c: int, q: int) -> "ExpPoly":
        """The function ``l -> self(l + c)``."""
        return ExpPoly.from_terms(
            (s, pscale(pshift(p, c), qpow(q, s * c))) for s, p in self.terms
        )

    def times_exp(self, t) -> "ExpPoly":
        """The function ``l -> self(l) * q**(t*l)``."""
        return ExpPoly.from_terms((s + t, p) for s, p in self.terms)

    def dominant(self, direction: int):
        """``(s, degree)`` of the fastest-growing term as ``l -> direction*inf``."""
        if not self.terms:
            return None
        best = None
        for s, p in self.terms:
            key = (direction * s, len(p) - 1)
            if best is None or key > best[0]:
                best = (key, (s, len(p) - 1))
        return best[1]


def _find_key(acc: dict, s):
    for k in acc:
        if k == s:
            return k
    return s


def range_sum(r: Poly, t, q: int, a: int, b: int) -> Number:
    """``sum_{j=a}^{b} R(j) q**(t*j)`` in closed form."""
    if b < a:
        return 0
    z = qpow(q, t)
    g = antidifference(r, z, t == 0)
    return peval(g, b + 1) * qpow(q, t * (b + 1)) - peval(g, a) * qpow(q, t * a)


def upper_sum(r: Poly, t, q: int, a: int) -> Number:
    """``sum_{j>=a} R(j) q**(t*j)``; requires ``t < 0`` unless ``R == 0``."""
    r = ptrim(r)
    if not r:
        return 0
    if not t < 0:
        raise ValueError("upper half-line series diverges")
    g = antidifference(r, qpow(q, t), False)
    return -peval(g, a) * qpow(q, t * a)


def lower_sum(r: Poly, t, q: int, b: int) -> Number:
    """``sum_{j<=b} R(j) q**(t*j)``; requires ``t > 0`` unless ``R == 0``."""
    r = ptrim(r)
    if not r:
        return 0
    if not t > 0:
        raise ValueError("lower half-line series diverges")
    g = antidifference(r, qpow(q, t), False)
    return peval(g, b + 1) * qpow(q, t * (b + 1))


@dataclass(frozen=True)
class HalfLine:
    """An :class:`ExpPoly` supported on ``l >= start`` (``direction=+1``)
    or ``l <= start`` (``direction=-1``)."""

    direction: int
    start: int
    body: ExpPoly

    def contains(self, l: int) -> bool:
        return l >= self.start if self.direction > 0 else l <= self.start

    def value(self, l: int, q: int) -> Number:
        return self.body(l, q) if self.contains(l) else 0


class SeriesDivergence(ValueError):
    """A bilateral convolution sum does not converge."""

    def __init__(self, message: str, sides=None):
        super().__init__(message)
        self.sides = sides


def _split_in_m(qpoly: Poly) -> list:
    """Write ``Q(m - j)`` as ``sum_i m**i * R_i(j)``; returns the ``R_i``."""
    out = []
    for i in range(len(qpoly)):
        coeffs = [0] * len(qpoly)
        for k in range(i, len(qpoly)):
            coeffs[k - i] += qpoly[k] * comb(k, i) * (-1) ** (k - i)
        out.append(ptrim(coeffs))
    return out


def convolve_halflines(x: HalfLine, y: HalfLine, q: int, labels=("x", "y")) -> list:
    """Pieces of ``m -> sum_j x(j) y(m - j)``.

    Returns a list of :class:`HalfLine` whose sum equals the convolution for
    every ``m``.  Raises :class:`SeriesDivergence` for an opposite-direction
    pair whose exponents do not separate.
    """
    pieces: list = []
    ax, ay = x.start, y.start
    for sx, p in x.body.terms:
        for sy, qp in y.body.terms:
            t = sx - sy
            z = qpow(q, t)
            rs = [pmul(p, ri) for ri in _split_in_m(qp)]
            gs = [antidifference(ri, z, t == 0) for ri in rs]

            def mono(i):
                return (0,) * i + (1,)

            if x.direction > 0 and y.direction > 0:
                # j in [ax, m - ay]
                var, const = [], []
                for i, g in enumerate(gs):
                    var.append(pmul(mono(i), pscale(pshift(g, 1 - ay), qpow(q, t * (1 - ay)))))
                    const.append(pscale(mono(i), -peval(g, ax) * qpow(q, t * ax)))
                body = ExpPoly.from_terms(
                    [(sx, v) for v in var] + [(sy, c) for c in const]
                )
                pieces.append(HalfLine(+1, ax + ay, body))
            elif x.direction < 0 and y.direction < 0:
                # j in [m - ay, ax]
                var, const = [], []
                for i, g in enumerate(gs):
                    const.append(pscale(mono(i), peval(g, ax + 1) * qpow(q, t * (ax + 1))))
                    var.append(pmul(mono(i), pscale(pshift(g, -ay), -qpow(q, -t * ay))))
                body = ExpPoly.from_terms(
                    [(sx, v) for v in var] + [(sy, c) for c in const]
                )
                pieces.append(HalfLine(-1, ax + ay, body))
            elif x.direction > 0 and y.direction < 0:
                # j >= max(ax, m - ay); j -> +inf
                if not t < 0:
                    raise SeriesDivergence(
                        f"{labels[0]} upper tail against {labels[1]} lower tail does not decay",
                        sides=(f"{labels[0]}:upper", f"{labels[1]}:lower"),
                    )
                low, high = [], []
                for i, g in enumerate(gs):
                    low.append(pscale(mono(i), -peval(g, ax) * qpow(q, t * ax)))
                    high.append(pmul(mono(i), pscale(pshift(g, -ay), -qpow(q, -t * ay))))
                pieces.append(HalfLine(-1, ax + ay, ExpPoly.from_terms((sy, c) for c in low)))
                pieces.append(HalfLine(+1, ax + ay + 1, ExpPoly.from_terms((sx, v) for v in high)))
            else:
                # j <= min(ax, m - ay); j -> -inf
                if not t > 0:
                    raise SeriesDivergence(
                        f"{labels[0]} lower tail against {labels[1]} upper tail does not decay",
                        sides=(f"{labels[0]}:lower", f"{labels[1]}:upper"),
                    )
                high, low = [], []
                for i, g in enumerate(gs):
                    high.append(pscale(mono(i), peval(g, ax + 1) * qpow(q, t * (ax + 1))))
                    low.append(pmul(mono(i), pscale(pshift(g, 1 - ay), qpow(q, t * (1 - ay)))))
                pieces.append(HalfLine(+1, ax + ay, ExpPoly.from_terms((sy, c) for c in high)))
                pieces.append(HalfLine(-1, ax + ay - 1, ExpPoly.from_terms((sx, v) for v in low)))
    return pieces
