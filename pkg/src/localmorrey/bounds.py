"""The operator bound constant and related scalar bounds.

For a kernel with profile ``k_j = K(1, q^j)`` the constant is

    C = (1 - 1/q) * sum_j k_j q^(j * e(j)),
    e(j) = 1 - alpha/r        for j >= 0,
    e(j) = 1 - (alpha+1)/r    for j < 0.

With ``u = q^((alpha+1)/r - 1)`` and ``v = q^(-alpha/r)`` this is a pair of
geometric series for the Hardy and max-type kernels.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .kernels import KernelSpec, kernel_profile
from .numeric import Number, as_exact, fmt, qpow

BUILTIN_CONDITION = "alpha+1<r"


@dataclass(frozen=True)
class BoundResult:
    value: Number
    mode: str  # closed-form | truncated | upper-bound
    truncation_terms: Optional[int]
    tail_bound: Optional[float]
    finiteness_condition: str
    finite: bool

    def to_json(self) -> dict:
        return {
            "value": fmt(self.value),
            "mode": self.mode,
            "terms": self.truncation_terms,
            "tail_bound": fmt(self.tail_bound),
            "finite": self.finite,
            "condition": self.finiteness_condition,
        }


def _check(r, alpha):
    r, alpha = as_exact(r), as_exact(alpha)
    if not r > 1:
        raise ValueError(f"r must be > 1, got {r}")
    if not alpha > 0:
        raise ValueError(f"alpha must be > 0, got {alpha}")
    return r, alpha


def hlp_finiteness(r, alpha) -> bool:
    r, alpha = _check(r, alpha)
    return alpha + 1 < r


def _exponents(r, alpha):
    return 1 - alpha / r, 1 - (alpha + 1) / r  # e(j >= 0), e(j < 0)


def _infinite(condition: str) -> BoundResult:
    return BoundResult(math.inf, "closed-form", None, None, condition, False)


def _geo_tail(ratio: float) -> float:
    return ratio / (1 - ratio)


def _closed_builtin(name: str, r, alpha, q: int) -> BoundResult:
    if not alpha + 1 < r:
        return _infinite(BUILTIN_CONDITION)
    w = 1 - Fraction(1, q)
    u = qpow(q, (alpha + 1) / r - 1)
    v = qpow(q, -alpha / r)
    if name == "hardy":
        value = w * (1 + _geo_tail(u))
    else:
        value = w * (1 + _geo_tail(v) + _geo_tail(u))
    return BoundResult(value, "closed-form", None, None, BUILTIN_CONDITION, True)


def series_term(spec: KernelSpec, j: int, r, alpha, q: int) -> float:
    """``(1 - 1/q) k_j q^(j e(j))`` as a float."""
    ep, em = _exponents(as_exact(r), as_exact(alpha))
    e = ep if j >= 0 else em
    k = kernel_profile(spec, j, q)
    if k == 0:
        return 0.0
    # log space: far out k_j is tiny and q^(j e) huge
    if isinstance(k, Fraction):
        logk = math.log(k.numerator) - math.log(k.denominator)
    else:
        logk = math.log(float(k))
    return (1 - 1 / q) * math.exp(logk + float(j) * float(e) * math.log(q))


def partial_sum(spec: KernelSpec, r, alpha, q: int, n: int) -> float:
    """``(1 - 1/q)[k_0 + sum_{l=1}^{n} (...)]``, summed with ``fsum``."""
    terms = [series_term(spec, 0, r, alpha, q)]
    for l in range(1, n + 1):
        terms.append(series_term(spec, l, r, alpha, q))
        terms.append(series_term(spec, -l, r, alpha, q))
    return math.fsum(terms)


def _table_condition() -> str:
    return "log_q(rho+) + 1 - alpha/r < 0 and log_q(rho-) + 1 - (alpha+1)/r > 0"


def main_bound_constant(spec: KernelSpec, r, alpha, q: int, tol: float = 1e-12) -> BoundResult:
    r, alpha = _check(r, alpha)
    q = int(q)
    if spec.name in ("hardy", "hlp"):
        return _closed_builtin(spec.name, r, alpha, q)
    if spec.lower is None or spec.upper is None:
        raise ValueError("bound constant needs both tail descriptors of a custom kernel")
    ep, em = _exponents(r, alpha)
    condition = BUILTIN_CONDITION if spec.name == "hilbert" else _table_condition()
    # series ratio per step outward on each side
    up_rate = spec.upper.s + ep if spec.upper.A != 0 else -1
    lo_rate = spec.lower.s + em if spec.lower.A != 0 else 1
    up_ok, lo_ok = up_rate < 0, lo_rate > 0
    if spec.name == "hilbert" and not lo_ok:
        # k_j >= 1/2 for j <= 0, so the lower series has no decaying terms
        return _infinite(condition)
    if not (up_ok and lo_ok):
        if spec.upper.exact and spec.lower.exact or spec.name == "hilbert":
            return _infinite(condition)
        return BoundResult(math.inf, "upper-bound", None, None, condition + " (majorant not summable)", False)
    w = 1 - 1 / q
    rho_up, rho_lo = float(q) ** float(up_rate), float(q) ** float(-lo_rate)
    if spec.exact:
        # table part plus exact geometric tails, split at j = 0 where e(j) changes
        total = [series_term(spec, j, r, alpha, q) for j in range(spec.lo, spec.hi + 1)]
        total += [series_term(spec, j, r, alpha, q) for j in range(spec.hi + 1, 0)]
        total += [series_term(spec, j, r, alpha, q) for j in range(0, spec.lo)]
        a = max(spec.hi + 1, 0)
        b = min(spec.lo - 1, -1)
        total.append(w * float(spec.upper.A) * float(q) ** (float(up_rate) * a) / (1 - rho_up))
        total.append(w * float(spec.lower.A) * float(q) ** (float(lo_rate) * b) / (1 - rho_lo))
        return BoundResult(math.fsum(total), "closed-form", None, None, condition, True)

    def tail_bound(n):
        # majorant for |j| > n beyond the table
        a, b = n + 1, -n - 1
        return (w * float(spec.upper.A) * float(q) ** (float(up_rate) * a) / (1 - rho_up)
                + w * float(spec.lower.A) * float(q) ** (float(lo_rate) * b) / (1 - rho_lo))

    n = max(abs(spec.lo), abs(spec.hi), 1)
    while tail_bound(n) >= tol:
        n += 1
        if n > 100000:
            raise RuntimeError("truncation did not reach the requested tolerance")
    if spec.profile_fn is None:
        if n > max(abs(spec.lo), abs(spec.hi)):
            # values beyond the table are unknown: report table part + majorant
            n0 = max(abs(spec.lo), abs(spec.hi))
            part = math.fsum(series_term(spec, j, r, alpha, q) for j in range(spec.lo, spec.hi + 1))
            tb = tail_bound(n0)
            return BoundResult(part + tb, "upper-bound", n0, tb, condition, True)
    value = math.fsum(series_term(spec, j, r, alpha, q) for j in range(-n, n + 1))
    return BoundResult(value, "truncated", n, tail_bound(n), condition, True)


def divergence_witness(spec: KernelSpec, r, alpha, q: int, threshold: float = 1e6, cap: int = 10**8) -> dict:
    """First ``n`` with partial sum above ``threshold``, predicted then confirmed.

    The prediction bisects the closed-form partial sum of the two geometric
    series; the confirmation is an explicit cumulative sum.
    """
    r, alpha = _check(r, alpha)
    if spec.name not in ("hardy", "hlp"):
        raise ValueError("divergence witness is implemented for the hardy and hlp kernels")
    w = 1 - 1 / q
    lu = float((alpha + 1) / r - 1) * math.log(q)
    lv = float(-alpha / r) * math.log(q)

    def geo(logx, n):
        if abs(logx) < 1e-300:
            return float(n)
        if n * logx > 700:
            return math.inf
        x = math.exp(logx)
        return x * math.expm1(n * logx) / math.expm1(logx)

    def closed(n):
        s = 1 + geo(lu, n)
        if spec.name == "hlp":
            s += geo(lv, n)
        return w * s

    if closed(cap) <= threshold:
        return {"diverges": False, "terms": None}
    lo, hi = 0, cap
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if closed(mid) > threshold:
            hi = mid
        else:
            lo = mid
    n = hi
    l = np.arange(1, n + 1, dtype=float)
    terms = np.exp(l * lu)
    if spec.name == "hlp":
        terms = terms + np.exp(l * lv)
    sums = w * (1 + np.cumsum(terms))
    return {
        "diverges": True,
        "terms": n,
        "partial_at_terms": float(sums[-1]),
        "partial_before": float(sums[-2]) if n > 1 else w,
        "threshold": threshold,
    }


def dilation_bound(l: int, r, alpha, C, q: int) -> Number:
    """``C |tau|^-((1+alpha)/r)`` for ``|tau| < 1``, ``C |tau|^(-alpha/r)`` otherwise, ``|tau| = q^-l``."""
    r, alpha = as_exact(r), as_exact(alpha)
    if C < 0:
        raise ValueError("C must be >= 0")
    e = l * (1 + alpha) / r if l > 0 else l * alpha / r
    return C * qpow(q, e)
