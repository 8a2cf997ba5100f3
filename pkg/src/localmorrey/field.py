"""Measures on a local field and a digit model of ``F_p((t))``.

Balls ``B^k = {|y| <= q^-k}`` and spheres ``S^k = {|y| = q^-k}`` have Haar
measure ``q^-k`` and ``q^-k (1 - 1/q)`` with ``|B^0| = 1``.  Only ``q`` enters
these formulas, so any prime power is accepted here.  The digit model, used
as a brute-force and Monte Carlo oracle, needs ``q = p`` prime: elements are
truncated Laurent series with carry-free digit arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .numeric import Number, as_exact, is_integral, qpow


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def is_prime_power(n: int) -> bool:
    if n < 2:
        return False
    for p in range(2, n + 1):
        if n % p == 0:
            while n % p == 0:
                n //= p
            return n == 1
    return False


@dataclass(frozen=True)
class FieldParams:
    q: int
    p: Optional[int] = None
    precision: str = "exact"
    rtol: float = 1e-12

    def __post_init__(self):
        if not isinstance(self.q, int) or self.q < 2:
            raise ValueError(f"q must be an integer >= 2, got {self.q!r}")
        if self.precision not in ("exact", "float"):
            raise ValueError("precision must be 'exact' or 'float'")
        if self.p is not None:
            if not is_prime(self.p):
                raise ValueError(f"p={self.p} is not prime")
            if self.q != self.p:
                raise ValueError("digit arithmetic requires q == p")

    @classmethod
    def digits(cls, p: int) -> "FieldParams":
        return cls(q=p, p=p)

    def require_digits(self) -> int:
        if self.p is None:
            if not is_prime(self.q):
                raise ValueError(f"digit model needs q prime, got q={self.q}")
            return self.q
        return self.p


def _q(params) -> int:
    return params.q if isinstance(params, FieldParams) else int(params)


def ball_measure(params, k: int) -> Fraction:
    return Fraction(_q(params)) ** (-k)


def sphere_measure(params, k: int) -> Fraction:
    q = _q(params)
    return Fraction(q) ** (-k) * (1 - Fraction(1, q))


def weighted_ball_measure(params, k: int, alpha, allow_zero: bool = False) -> Number:
    """``int_{B^k} |y|^alpha dy = (q-1) q^(alpha - k(alpha+1)) / (q^(alpha+1) - 1)``.

    Exact for non-negative integer ``alpha``.  ``alpha = 0`` is only accepted
    with ``allow_zero`` and then reduces to ``ball_measure``.
    """
    q = _q(params)
    alpha = as_exact(alpha)
    if alpha < 0 or (alpha == 0 and not allow_zero):
        raise ValueError(f"alpha must be > 0 (got {alpha}); pass allow_zero for alpha = 0")
    if is_integral(alpha):
        a = int(alpha)
        return Fraction(q - 1) * Fraction(q) ** (a - k * (a + 1)) / (Fraction(q) ** (a + 1) - 1)
    a = float(alpha)
    # q^(alpha - k(alpha+1)) / (q^(alpha+1) - 1) without overflow for large |k|
    log_num = (a - k * (a + 1)) * math.log(q)
    return (q - 1) * math.exp(log_num) / math.expm1((a + 1) * math.log(q))


# ---------------------------------------------------------------------------
# digit model


@dataclass(frozen=True)
class LaurentElement:
    """``sum_{i >= v} d_i t^i`` known modulo ``t^depth``.

    ``digits[0]`` is the coefficient of ``t^valuation``.  The zero element
    (or anything with no nonzero digit below ``depth``) has ``valuation=None``
    standing for ``+inf``.
    """

    p: int
    valuation: Optional[int]
    digits: tuple
    depth: int

    def __post_init__(self):
        if not is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")
        if any((not isinstance(d, (int, np.integer))) or d < 0 or d >= self.p for d in self.digits):
            raise ValueError("digits must be integers in [0, p)")
        if self.valuation is None:
            if self.digits:
                raise ValueError("zero element carries no digits")
            return
        if not self.digits or self.digits[0] == 0:
            raise ValueError("leading digit must be nonzero")
        if self.valuation + len(self.digits) > self.depth:
            raise ValueError("digits run past the truncation depth")

    @classmethod
    def from_digits(cls, p: int, start: int, digits: Sequence[int], depth: Optional[int] = None):
        """Normalise a digit string beginning at index ``start``."""
        digits = [int(d) % p for d in digits]
        depth = start + len(digits) if depth is None else depth
        digits = digits[: max(0, depth - start)]
        for i, d in enumerate(digits):
            if d:
                body = digits[i:]
                while body and body[-1] == 0:
                    body.pop()
                return cls(p, start + i, tuple(body), depth)
        return cls(p, None, (), depth)

    @classmethod
    def zero(cls, p: int, depth: int):
        return cls(p, None, (), depth)

    @classmethod
    def monomial(cls, p: int, power: int, depth: int, coef: int = 1):
        return cls.from_digits(p, power, [coef], depth)

    def is_zero(self) -> bool:
        return self.valuation is None

    def digit(self, i: int) -> int:
        if self.valuation is None or i < self.valuation:
            return 0
        j = i - self.valuation
        return self.digits[j] if j < len(self.digits) else 0

    def to_json(self) -> dict:
        return {"p": self.p, "valuation": self.valuation, "digits": list(self.digits), "depth": self.depth}

    @classmethod
    def from_json(cls, data: dict) -> "LaurentElement":
        return cls(int(data["p"]), data["valuation"], tuple(int(d) for d in data["digits"]), int(data["depth"]))


def lf_norm(x: LaurentElement) -> Fraction:
    if x.valuation is None:
        return Fraction(0)
    return Fraction(x.p) ** (-x.valuation)


def _check_pair(x: LaurentElement, y: LaurentElement):
    if x.p != y.p:
        raise ValueError(f"mixed characteristics {x.p} and {y.p}")
    if x.depth != y.depth:
        raise ValueError(f"depth mismatch: {x.depth} vs {y.depth}")


def lf_add(x: LaurentElement, y: LaurentElement) -> LaurentElement:
    _check_pair(x, y)
    if x.is_zero():
        return y
    if y.is_zero():
        return x
    lo = min(x.valuation, y.valuation)
    digits = [(x.digit(i) + y.digit(i)) % x.p for i in range(lo, x.depth)]
    return LaurentElement.from_digits(x.p, lo, digits, x.depth)


def lf_neg(x: LaurentElement) -> LaurentElement:
    if x.is_zero():
        return x
    return LaurentElement.from_digits(x.p, x.valuation, [(-d) % x.p for d in x.digits], x.depth)


def lf_mul(x: LaurentElement, y: LaurentElement) -> LaurentElement:
    """Product mod ``p``.

    Both factors are known modulo ``t^D``; the product is determined modulo
    ``t^(D + min(v_x, v_y))`` and is truncated at ``min(D, D + v_x, D + v_y)``.
    """
    _check_pair(x, y)
    depth = x.depth
    if x.is_zero() or y.is_zero():
        return LaurentElement.zero(x.p, depth)
    depth = min(depth, depth + x.valuation, depth + y.valuation)
    v = x.valuation + y.valuation
    n = max(0, depth - v)
    out = [0] * n
    for i, a in enumerate(x.digits):
        if a == 0 or i >= n:
            continue
        for j, b in enumerate(y.digits):
            if i + j >= n:
                break
            out[i + j] = (out[i + j] + a * b) % x.p
    return LaurentElement.from_digits(x.p, v, out, depth)


def sample_haar(params, k: int, depth: int, seed, sphere: bool = False) -> LaurentElement:
    """A Haar-uniform element of ``B^k`` (or ``S^k``) with ``depth`` random digits.

    Digits at indices ``[k, k + depth)`` are independent and uniform; on a
    sphere the leading digit is uniform on ``[1, p)``.
    """
    p = params.require_digits() if isinstance(params, FieldParams) else int(params)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    digits = rng.integers(0, p, size=depth)
    if sphere:
        digits[0] = rng.integers(1, p)
    return LaurentElement.from_digits(p, k, [int(d) for d in digits], k + depth)


@dataclass
class DigitSample:
    """A batch of elements in normalised form.

    Row ``i`` has valuation ``valuation[i]`` (``None``-free: elements with no
    nonzero digit get ``valuation = start + depth``) and ``digits[i, j]`` is
    the coefficient of ``t^(valuation[i] + j)``, zero-padded.
    """

    p: int
    valuation: np.ndarray
    digits: np.ndarray
    depth: int = field(default=0)

    def element(self, i: int) -> LaurentElement:
        v = int(self.valuation[i])
        row = [int(d) for d in self.digits[i]]
        return LaurentElement.from_digits(self.p, v, row, self.depth)


def sample_haar_batch(params, k: int, depth: int, n: int, rng, sphere: bool = False) -> DigitSample:
    """Vectorised :func:`sample_haar`: ``n`` independent draws."""
    p = params.require_digits() if isinstance(params, FieldParams) else int(params)
    if depth < 1:
        raise ValueError("depth must be >= 1")
    raw = rng.integers(0, p, size=(n, depth))
    if sphere:
        raw[:, 0] = rng.integers(1, p, size=n)
        return DigitSample(p, np.full(n, k), raw, k + depth)
    nz = raw != 0
    has = nz.any(axis=1)
    first = np.where(has, nz.argmax(axis=1), depth)
    cols = np.arange(depth)[None, :] + first[:, None]
    padded = np.concatenate([raw, np.zeros((n, depth), dtype=raw.dtype)], axis=1)
    shifted = np.take_along_axis(padded, np.minimum(cols, 2 * depth - 1), axis=1)
    return DigitSample(p, k + first, shifted, k + depth)
