"""Generalized power-weighted central Morrey norms.

    ||f|| = sup_k phi(k) * (q^k * int_{B^k} |f|^r |y|^alpha dy)^(1/r)

``phi`` is piecewise log-linear, ``phi(k) = c_i q^(-beta_i k)`` on finitely
many segments.  Together with geometric tails of ``f`` this makes the
r-th power of every term an explicit exponential polynomial in ``k`` outside
a finite window, so the supremum over all of ``Z`` is computed exactly:
direct enumeration inside the window, closed-form analysis on the two rays.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .expsum import range_sum, upper_sum
from .field import FieldParams, ball_measure, weighted_ball_measure
from .numeric import Number, as_exact, fmt, is_exact, qpow, rel_close, root, rpow, simplify
from .radial import NonIntegrable, RadialFunction, japanese_bracket, sphere_mass, tail_mass

# ---------------------------------------------------------------------------
# phi


@dataclass(frozen=True)
class PhiSegment:
    start: Optional[int]  # None stands for -inf
    c: Number
    beta: Number


@dataclass(frozen=True)
class PhiSpec:
    segments: tuple
    name: str = ""

    def __post_init__(self):
        if not self.segments:
            raise ValueError("phi needs at least one segment")
        if self.segments[0].start is not None:
            raise ValueError("the first phi segment must start at -inf")
        starts = [s.start for s in self.segments[1:]]
        if any(a is None for a in starts) or any(b <= a for a, b in zip(starts, starts[1:])):
            raise ValueError("segment starts must be strictly increasing integers")
        if any(not s.c > 0 for s in self.segments):
            raise ValueError("phi must be positive: every coefficient c must be > 0")

    @property
    def breakpoints(self) -> list:
        return [s.start for s in self.segments[1:]]

    @property
    def beta_left(self):
        return self.segments[0].beta

    @property
    def beta_right(self):
        return self.segments[-1].beta

    def segment(self, k: int) -> PhiSegment:
        return self.segments[bisect_right(self.breakpoints, k)]

    def to_json(self) -> dict:
        return {
            "segments": [
                {"start": "-inf" if s.start is None else s.start, "c": fmt(s.c), "beta": fmt(s.beta)}
                for s in self.segments
            ]
        }

    @classmethod
    def from_json(cls, data: dict) -> "PhiSpec":
        segs = []
        for item in data["segments"]:
            st = item.get("start")
            st = None if st in (None, "-inf", "-infinity") or (isinstance(st, float) and st == -math.inf) else int(st)
            segs.append(PhiSegment(st, as_exact(item["c"]), as_exact(item["beta"])))
        return cls(tuple(segs), data.get("name", ""))


def power_phi(beta, c=1, name: str = "") -> PhiSpec:
    return PhiSpec((PhiSegment(None, as_exact(c), as_exact(beta)),), name)


def lebesgue(r) -> PhiSpec:
    """``phi(k) = |B^k|^(1/r)``: the norm becomes the ``L^r(|y|^alpha)`` norm."""
    r = as_exact(r)
    return power_phi(1 / r, name=f"lebesgue({fmt(r)})")


def central(t) -> PhiSpec:
    """``phi(k) = |B^k|^(1/t)``: the central Morrey space ``M^r_t``."""
    t = as_exact(t)
    return power_phi(1 / t, name=f"central({fmt(t)})")


def envelope(r) -> PhiSpec:
    """``phi(k) = min(1, q^(-k/r))``."""
    r = as_exact(r)
    return PhiSpec(
        (PhiSegment(None, Fraction(1), Fraction(0)), PhiSegment(0, Fraction(1), 1 / r)),
        name=f"envelope({fmt(r)})",
    )


PHI_PRESETS = ("lebesgue", "central", "envelope")


def phi_preset(name: str, r=None) -> PhiSpec:
    """Parse ``lebesgue``, ``lebesgue(2)``, ``central(4)``, ``envelope`` ..."""
    name = name.strip()
    base, arg = name, None
    if "(" in name:
        if not name.endswith(")"):
            raise ValueError(f"malformed phi preset {name!r}")
        base, arg = name[:-1].split("(", 1)
        arg = as_exact(arg)
    base = base.strip().lower()
    if base not in PHI_PRESETS:
        raise ValueError(f"unknown phi preset {base!r}; valid presets: {', '.join(PHI_PRESETS)}")
    if arg is None:
        if base == "central":
            raise ValueError("central(t) needs an explicit t")
        if r is None:
            raise ValueError(f"{base} needs r")
        arg = r
    return {"lebesgue": lebesgue, "central": central, "envelope": envelope}[base](arg)


def phi_eval(phi: PhiSpec, k: int, q) -> Number:
    q = q.q if isinstance(q, FieldParams) else q
    seg = phi.segment(k)
    return simplify(seg.c * qpow(q, -seg.beta * k))


def phi_pow(phi: PhiSpec, k: int, q: int, r) -> Number:
    seg = phi.segment(k)
    return rpow(seg.c, r) * qpow(q, -r * seg.beta * k)


def _log_phi(phi: PhiSpec, k: int, q: int) -> float:
    seg = phi.segment(k)
    return math.log(seg.c) / math.log(q) - float(seg.beta) * k


# ---------------------------------------------------------------------------
# certificates


@dataclass
class PhiCertificate:
    in_class: bool
    C_class: Optional[Number]
    class_witness: Optional[int] = None
    class_violation: Optional[str] = None
    submultiplicative: Optional[bool] = None
    C_sm: Optional[Number] = None
    sm_witness: Optional[tuple] = None

    def product(self) -> Number:
        if not self.in_class or not self.submultiplicative:
            raise ValueError("phi is not in the submultiplicative class")
        return self.C_class * self.C_sm

    def to_json(self) -> dict:
        return {
            "in_class": self.in_class,
            "C_class": fmt(self.C_class),
            "class_witness": self.class_witness,
            "class_violation": self.class_violation,
            "submultiplicative": self.submultiplicative,
            "C_sm": fmt(self.C_sm),
            "sm_witness": list(self.sm_witness) if self.sm_witness else None,
        }


def _class_ratio(phi: PhiSpec, k: int, q: int, r) -> Number:
    seg = phi.segment(k)
    if k >= 0:
        return simplify(seg.c * qpow(q, -seg.beta * k))
    return simplify(seg.c * qpow(q, (1 / r - seg.beta) * k))


def phi_class_check(phi: PhiSpec, r, q) -> PhiCertificate:
    """Membership in ``Phi_{r,q}``: ``phi(k) <= C`` for ``k >= 0`` and
    ``phi(k) <= C q^(-k/r)`` for ``k < 0``; returns the least such ``C``."""
    q = q.q if isinstance(q, FieldParams) else int(q)
    r = as_exact(r)
    if phi.beta_right < 0:
        return PhiCertificate(False, None, class_violation="phi grows as k -> +inf")
    if phi.beta_left > 1 / r:
        return PhiCertificate(False, None, class_violation="phi(k) q^(k/r) grows as k -> -inf")
    # each segment ratio is geometric, so suprema sit at segment ends or at 0/-1
    cands = {0, -1}
    for b in phi.breakpoints:
        cands.update((b, b - 1))
    best_k, best = None, None
    for k in sorted(cands):
        v = _class_ratio(phi, k, q, r)
        if best is None or v > best:
            best_k, best = k, v
    return PhiCertificate(True, simplify(best), class_witness=best_k)


def phi_submult_check(phi: PhiSpec, q) -> PhiCertificate:
    """Least ``C`` with ``phi(s+t) <= C phi(s) phi(t)`` for all integers.

    With ``phi = q^-g`` and ``g`` piecewise linear, the ratio is bounded iff
    the left slope is at least the right slope; the supremum of the linear
    deficit is then attained at a lattice vertex of the breakpoint
    arrangement, all of which lie in a box of side ``2 max|b| + 3``.
    """
    q = q.q if isinstance(q, FieldParams) else int(q)
    bps = phi.breakpoints
    span = max([abs(b) for b in bps] + [0])
    box = 2 * span + 3
    if phi.beta_left < phi.beta_right:
        n = box + 10
        return PhiCertificate(False, None, submultiplicative=False, C_sm=None, sm_witness=(-n, n))
    ks = np.arange(-box, box + 1)
    lp = np.array([_log_phi(phi, int(k), q) for k in range(-2 * box, 2 * box + 1)])
    off = 2 * box
    S, T = np.meshgrid(ks, ks, indexing="ij")
    deficit = lp[S + T + off] - lp[S + off] - lp[T + off]
    i, j = np.unravel_index(int(np.argmax(deficit)), deficit.shape)
    s, t = int(ks[i]), int(ks[j])
    a, b, c = phi.segment(s), phi.segment(t), phi.segment(s + t)
    c_sm = c.c / (a.c * b.c) * qpow(q, a.beta * s + b.beta * t - c.beta * (s + t))
    return PhiCertificate(False, None, submultiplicative=True, C_sm=simplify(c_sm), sm_witness=(s, t))


def phi_certificate(phi: PhiSpec, r, q) -> PhiCertificate:
    cert = phi_class_check(phi, r, q)
    sm = phi_submult_check(phi, q)
    cert.submultiplicative = sm.submultiplicative
    cert.C_sm = sm.C_sm
    cert.sm_witness = sm.sm_witness
    return cert


# ---------------------------------------------------------------------------
# norm


@dataclass(frozen=True)
class MorreyParams:
    r: Number
    alpha: Number
    phi: PhiSpec
    field: FieldParams
    allow_zero_alpha: bool = False

    def __post_init__(self):
        object.__setattr__(self, "r", as_exact(self.r))
        object.__setattr__(self, "alpha", as_exact(self.alpha))
        if not self.r >= 1:
            raise ValueError(f"r must be >= 1, got {self.r}")
        if self.alpha < 0 or (self.alpha == 0 and not self.allow_zero_alpha):
            raise ValueError(f"alpha must be > 0, got {self.alpha}")

    @property
    def q(self) -> int:
        return self.field.q

    @classmethod
    def make(cls, q: int, r, alpha, phi=None, **kw) -> "MorreyParams":
        r = as_exact(r)
        if phi is None:
            phi = lebesgue(r)
        elif isinstance(phi, str):
            phi = phi_preset(phi, r)
        return cls(r, alpha, phi, FieldParams(q), **kw)


@dataclass
class MorreyNorm:
    value: Number
    power: Number  # the supremum of the r-th powers of the terms
    argmax: Optional[int]
    attained: bool
    infinite: bool = False
    note: str = ""

    @property
    def exact(self) -> bool:
        return is_exact(self.power) and not self.infinite

    def to_json(self) -> dict:
        return {
            "value": fmt(self.value),
            "value_float": float(self.value),
            "power": fmt(self.power),
            "argmax": self.argmax,
            "attained": self.attained,
            "infinite": self.infinite,
            "exact": self.exact,
            "note": self.note,
        }


class _Ray:
    """``g(k) = sum coef * k**deg * q**(exp*k)`` on ``k <= end`` or ``k >= end``."""

    def __init__(self, q: int, terms, end: int, direction: int):
        self.q = q
        self.terms = [(c, e, d) for c, e, d in terms if c != 0]
        self.end = end
        self.direction = direction

    def __call__(self, k: int) -> float:
        total = 0.0
        for c, e, d in self.terms:
            try:
                total += float(c) * (k**d) * float(self.q) ** (float(e) * k)
            except OverflowError:
                return math.inf
        return total

    def limit(self):
        """``(value, kind)`` as ``k -> direction*inf``; ``kind`` in ``finite/inf/-inf``."""
        if not self.terms:
            return 0, "finite"
        d = self.direction
        key = lambda t: (d * t[1], t[2])
        c, e, deg = max(self.terms, key=key)
        if d * e > 0 or (e == 0 and deg > 0):
            sign = (1 if c > 0 else -1) * (d**deg)
            return (math.inf, "inf") if sign > 0 else (-math.inf, "-inf")
        return sum(c for c, e, deg in self.terms if e == 0 and deg == 0), "finite"

    def constant(self) -> bool:
        return all(e == 0 and d == 0 for c, e, d in self.terms)

    def critical_points(self) -> list:
        ln = math.log(self.q)
        ts = self.terms
        out = []
        if len(ts) == 2:
            (a, x, da), (b, y, db) = ts
            if da == 0 and db == 0 and x != y and x != 0:
                rhs = -(float(b) * float(y)) / (float(a) * float(x))
                if rhs > 0:
                    out.append(math.log(rhs) / ((float(x) - float(y)) * ln))
            elif da == 0 and db == 0 and x == 0 and y != 0:
                pass  # A + B q^{yk}: monotone
            elif {da, db} == {0, 1} and x == y and x != 0:
                (a0, _, _), (b1, _, _) = sorted(ts, key=lambda t: t[2])
                out.append(-1.0 / (float(x) * ln) - float(a0) / float(b1))
        pts = []
        for kstar in out:
            if not math.isfinite(kstar):
                continue
            for k in (math.floor(kstar), math.ceil(kstar)):
                if (self.direction < 0 and k <= self.end) or (self.direction > 0 and k >= self.end):
                    pts.append(int(k))
        return pts


class _Terms:
    """``T(k)^r = phi(k)^r q^k W_k`` for one function and parameter set."""

    def __init__(self, f: RadialFunction, params: MorreyParams):
        if f.remainder is not None:
            raise ValueError("norm needs exact tails; this function is windowed with a remainder bound")
        if f.q != params.q:
            raise ValueError(f"function lives over q={f.q}, parameters use q={params.q}")
        self.f, self.p = f, params
        q, r, a = params.q, params.r, params.alpha
        self.q, self.r, self.a = q, r, a
        self.up = tail_mass(f, "upper", r, a)
        if self.up is not None and not self.up[1] < 0:
            raise NonIntegrable("upper tail: |f|^r |y|^alpha is not integrable near the origin", "upper")
        self.low = tail_mass(f, "lower", r, a)
        self.U = 0
        if self.up is not None:
            Cu, tu = self.up
            self.U = Cu * upper_sum((1,), tu, q, f.hi + 1)
        # suffix sums W_k for lo <= k <= hi + 1
        suffix = [self.U]
        for l in range(f.hi, f.lo - 1, -1):
            suffix.append(suffix[-1] + sphere_mass(f, l, r, a))
        self.suffix = suffix[::-1]  # suffix[k - lo]

    def W(self, k: int) -> Number:
        f, q = self.f, self.q
        if f.lo <= k <= f.hi + 1:
            return self.suffix[k - f.lo]
        if k > f.hi + 1:
            if self.up is None:
                return 0
            Cu, tu = self.up
            return Cu * upper_sum((1,), tu, q, k)
        w = self.suffix[0]
        if self.low is not None:
            D, e = self.low
            w += D * range_sum((1,), e, q, k, f.lo - 1)
        return w

    def power(self, k: int) -> Number:
        return simplify(phi_pow(self.p.phi, k, self.q, self.r) * qpow(self.q, k) * self.W(k))

    def right_ray(self, end: int) -> _Ray:
        seg = self.p.phi.segments[-1]
        if self.up is None:
            return _Ray(self.q, [], end, +1)
        Cu, tu = self.up
        coef = rpow(seg.c, self.r) * Cu / (1 - qpow(self.q, tu))
        return _Ray(self.q, [(coef, 1 - self.r * seg.beta + tu, 0)], end, +1)

    def left_ray(self, end: int) -> _Ray:
        seg = self.p.phi.segments[0]
        cr = rpow(seg.c, self.r)
        x = 1 - self.r * seg.beta
        Wlo = self.suffix[0]
        lo = self.f.lo
        if self.low is None:
            return _Ray(self.q, [(cr * Wlo, x, 0)], end, -1)
        D, e = self.low
        if e == 0:
            return _Ray(self.q, [(cr * (Wlo + D * lo), x, 0), (-cr * D, x, 1)], end, -1)
        ge = qpow(self.q, e)
        A = cr * (Wlo - D * qpow(self.q, e * lo) / (1 - ge))
        B = cr * D / (1 - ge)
        return _Ray(self.q, [(A, x, 0), (B, x + e, 0)], end, -1)

    def window(self):
        bps = self.p.phi.breakpoints
        KL = min(self.f.lo, bps[0] - 1) if bps else self.f.lo
        KR = max(self.f.hi + 1, bps[-1]) if bps else self.f.hi + 1
        return KL, KR


def _tie(a, b) -> bool:
    if is_exact(a) and is_exact(b):
        return a == b
    return rel_close(a, b, 1e-12)


def morrey_norm(f: RadialFunction, params: MorreyParams) -> MorreyNorm:
    """Exact supremum over ``k`` in ``Z``; ties in the argmax go to the smallest ``k``.

    Divergence of ``int_{B^k} |f|^r w`` raises :class:`NonIntegrable`; an
    unbounded supremum is returned as ``infinite=True``.
    """
    T = _Terms(f, params)
    KL, KR = T.window()
    entries = []  # (value, k or None, kind)
    for k in range(KL, KR + 1):
        entries.append((T.power(k), k, "point"))

    right = T.right_ray(KR)
    lim, kind = right.limit()
    if kind == "inf":
        return MorreyNorm(math.inf, math.inf, None, False, True, "terms grow without bound as k -> +inf")
    for k in right.critical_points():
        if k > KR:
            entries.append((T.power(k) if abs(k) < 4000 else right(k), k, "point"))

    left = T.left_ray(KL)
    lim, kind = left.limit()
    if kind == "inf":
        return MorreyNorm(math.inf, math.inf, None, False, True, "terms grow without bound as k -> -inf")
    if left.constant():
        entries.append((T.power(KL), None, "left-all"))
    elif kind == "finite":
        entries.append((lim, None, "left-limit"))
    for k in left.critical_points():
        if k < KL:
            entries.append((T.power(k) if abs(k) < 4000 else left(k), k, "point"))

    best = max(e[0] for e in entries)
    ties = [e for e in entries if _tie(e[0], best)]
    if any(e[2] == "left-all" for e in ties):
        res = MorreyNorm(root(best, params.r), best, None, True, note=f"attained for every k <= {KL}")
    else:
        pts = [e for e in ties if e[2] == "point"]
        if pts:
            k = min(e[1] for e in pts)
            val = next(e[0] for e in pts if e[1] == k)
            res = MorreyNorm(root(val, params.r), val, k, True)
        else:
            res = MorreyNorm(root(best, params.r), best, None, False, note="approached as k -> -inf, not attained")
    return res


def morrey_term(f: RadialFunction, params: MorreyParams, k: int) -> Number:
    """The single term ``phi(k) (q^k W_k)^(1/r)``."""
    return root(_Terms(f, params).power(k), params.r)


# ---------------------------------------------------------------------------
# lemma-level quantities


def char_ball_norm_bound(eta: int, params: MorreyParams, cert: PhiCertificate) -> Number:
    """``C (w(B^eta)/|B^eta|)^(1/r) max(1, q^(-eta/r))``."""
    if not cert.in_class:
        raise ValueError("phi is not in Phi_{r,q}; the characteristic-function bound does not apply")
    q, r = params.q, params.r
    ratio = weighted_ball_measure(q, eta, params.alpha, allow_zero=params.allow_zero_alpha) / ball_measure(q, eta)
    fac = max(1, qpow(q, Fraction(-eta) / r if is_exact(r) else -eta / float(r)))
    return cert.C_class * root(ratio, r) * fac


def bracket_membership(N, r, alpha) -> bool:
    """``<y>^-N`` is guaranteed to have finite norm iff ``N > (alpha+1)/r``."""
    N, r, alpha = as_exact(N), as_exact(r), as_exact(alpha)
    return N > (alpha + 1) / r


def japanese_bracket_checked(N, params: MorreyParams):
    return japanese_bracket(N, params.q), bracket_membership(N, params.r, params.alpha)


# ---------------------------------------------------------------------------
# vectorised float path, used by the operator-norm search


@dataclass
class BatchLayout:
    """Finite window ``[lo, lo+n)`` with geometric tails ``c q^(s l)`` whose
    exponents are shared by every row of a batch."""

    q: int
    lo: int
    n: int
    lower_s: Optional[Number] = None
    upper_s: Optional[Number] = None


def morrey_norm_batch(values, lower_c, upper_c, layout: BatchLayout, params: MorreyParams) -> np.ndarray:
    """Float norms for a batch of functions sharing ``layout``.

    Same algorithm as :func:`morrey_norm`; ``inf`` marks an unbounded sup.
    """
    V = np.atleast_2d(np.asarray(values, dtype=float))
    B = V.shape[0]
    q, r, a = layout.q, float(params.r), float(params.alpha)
    lo, n = layout.lo, layout.n
    hi = lo + n - 1
    w = 1.0 - 1.0 / q
    ls = np.arange(lo, hi + 1)
    mu = np.abs(V) ** r * (float(q) ** (-ls * (a + 1))) * w
    if layout.upper_s is not None:
        tu = r * float(layout.upper_s) - a - 1
        if not params.r * layout.upper_s - params.alpha - 1 < 0:
            raise NonIntegrable("upper tail not integrable near the origin", "upper")
        Cu = np.abs(np.asarray(upper_c, dtype=float)) ** r * w
        U = Cu * q ** (tu * (hi + 1)) / (1 - q**tu)
    else:
        Cu, tu, U = np.zeros(B), -1.0, np.zeros(B)
    suffix = np.concatenate([np.cumsum(mu[:, ::-1], axis=1)[:, ::-1], np.zeros((B, 1))], axis=1) + U[:, None]
    if layout.lower_s is not None:
        e_exact = params.r * layout.lower_s - params.alpha - 1
        e = float(e_exact)
        D = np.abs(np.asarray(lower_c, dtype=float)) ** r * w
    else:
        e_exact, e, D = None, 0.0, np.zeros(B)

    phi = params.phi
    bps = phi.breakpoints
    KL = min(lo, bps[0] - 1) if bps else lo
    KR = max(hi + 1, bps[-1]) if bps else hi + 1

    def W(k):
        if lo <= k <= hi + 1:
            return suffix[:, k - lo]
        if k > hi + 1:
            return Cu * q ** (tu * k) / (1 - q**tu)
        if layout.lower_s is None:
            return suffix[:, 0]
        if e_exact == 0:
            return suffix[:, 0] + D * (lo - k)
        return suffix[:, 0] + D * (q ** (e * k) - q ** (e * lo)) / (1 - q**e)

    def power(k):
        seg = phi.segment(k)
        return float(seg.c) ** r * q ** (-r * float(seg.beta) * k + k) * W(k)

    best = np.max(np.stack([power(k) for k in range(KL, KR + 1)]), axis=0)

    seg = phi.segments[-1]
    Eexp = 1 - params.r * seg.beta + (params.r * layout.upper_s - params.alpha - 1 if layout.upper_s is not None else 0)
    inf_mask = np.zeros(B, dtype=bool)
    if layout.upper_s is not None and Eexp > 0:
        inf_mask |= Cu > 0

    seg0 = phi.segments[0]
    x_exact = 1 - params.r * seg0.beta
    x = float(x_exact)
    cr = float(seg0.c) ** r
    Wlo = suffix[:, 0]
    ln = math.log(q)
    if layout.lower_s is None or not np.any(D > 0):
        # g = cr*Wlo*q^{xk}
        if x_exact < 0:
            inf_mask |= Wlo > 0
        elif x_exact == 0:
            best = np.maximum(best, cr * Wlo)
    elif e_exact == 0:
        a0 = cr * (Wlo + D * lo)
        b1 = -cr * D
        if x_exact <= 0:
            inf_mask |= D > 0
        else:
            with np.errstate(divide="ignore", invalid="ignore"):
                kstar = -1.0 / (x * ln) - a0 / b1
            best = np.maximum(best, _eval_crit_lin(a0, b1, x, q, kstar, KL))
    else:
        ge = q**e
        A = cr * (Wlo - D * q ** (e * lo) / (1 - ge))
        Bc = cr * D / (1 - ge)
        y_exact = x_exact + e_exact
        y = float(y_exact)
        # k -> -inf: the nonzero term with the smallest exponent dominates
        dom_is_x = (Bc == 0) | ((A != 0) & (x_exact < y_exact))
        dom_exp = np.where(dom_is_x, x, y)
        dom_coef = np.where(dom_is_x, A, Bc)
        inf_mask |= (dom_exp < 0) & (dom_coef > 0)
        lim = np.zeros(B)
        if x_exact == 0:
            lim = lim + A
        if y_exact == 0:
            lim = lim + Bc
        best = np.where(dom_exp >= 0, np.maximum(best, lim), best)
        if x != 0 and x != y:
            with np.errstate(divide="ignore", invalid="ignore"):
                rhs = -(Bc * y) / (A * x)
                kstar = np.where(rhs > 0, np.log(np.where(rhs > 0, rhs, 1.0)) / ((x - y) * ln), np.nan)
            best = np.maximum(best, _eval_crit_two(A, x, Bc, y, q, kstar, KL))
    out = best ** (1.0 / r)
    out[inf_mask] = np.inf
    return out


def _eval_crit_two(A, x, B, y, q, kstar, KL):
    out = np.zeros_like(A)
    for rnd in (np.floor, np.ceil):
        k = rnd(kstar)
        ok = np.isfinite(k) & (k <= KL)
        kk = np.where(ok, k, KL)
        with np.errstate(over="ignore", invalid="ignore"):
            val = A * q ** (x * kk) + B * q ** (y * kk)
        out = np.maximum(out, np.where(ok & np.isfinite(val), val, 0.0))
    return out


def _eval_crit_lin(a0, b1, x, q, kstar, KL):
    out = np.zeros_like(a0)
    for rnd in (np.floor, np.ceil):
        k = rnd(kstar)
        ok = np.isfinite(k) & (k <= KL)
        kk = np.where(ok, k, KL)
        with np.errstate(over="ignore", invalid="ignore"):
            val = (a0 + b1 * kk) * q ** (x * kk)
        out = np.maximum(out, np.where(ok & np.isfinite(val), val, 0.0))
    return out
