"""Homogeneous kernels and the operator ``Tf(s) = int K(|s|,|t|) f(t) dt``.

A kernel homogeneous of degree -1 is determined by its profile
``k_j = K(1, q^j)``.  Splitting the integral over spheres turns ``T`` into a
convolution on the valuation lattice,

    (Tf)_m = (1 - 1/q) * sum_j k_j q^j a_(m-j),

which is evaluated exactly by convolving finite parts and exponential
half-lines in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .expsum import ExpPoly, HalfLine, SeriesDivergence, convolve_halflines
from .field import DigitSample, FieldParams, LaurentElement, sample_haar_batch
from .numeric import Number, as_exact, fmt, qpow, simplify
from .radial import NonGeometricTail, RadialFunction, _tail_json, dilate, zero_function

__all__ = [
    "TailDescriptor", "KernelSpec", "hardy", "hilbert", "hlp", "identity_kernel", "builtin_kernel",
    "kernel_profile", "homogeneity_check", "apply_operator", "dilate", "DilationStep", "radialize",
    "DigitFunction", "OperatorDivergence", "KERNEL_PRESETS",
]


class OperatorDivergence(SeriesDivergence):
    pass


@dataclass(frozen=True)
class TailDescriptor:
    """``k_j = A q^(s j)`` beyond the table (``exact``) or ``k_j <= A q^(s j)``."""

    A: Number
    s: Number
    exact: bool = True

    def to_json(self) -> dict:
        return {"A": fmt(self.A), "log_q_rho": fmt(self.s), "exact": self.exact}

    @classmethod
    def from_json(cls, data) -> Optional["TailDescriptor"]:
        if data is None:
            return None
        s = data.get("log_q_rho", data.get("s"))
        return cls(as_exact(data["A"]), as_exact(s), bool(data.get("exact", True)))


@dataclass(frozen=True)
class DilationStep:
    l: int  # |tau| = q^-l


@dataclass(frozen=True)
class KernelSpec:
    name: str
    lo: int
    values: tuple
    lower: Optional[TailDescriptor]
    upper: Optional[TailDescriptor]
    profile_fn: Optional[Callable[[int, int], Number]] = field(default=None, compare=False)
    raw: Optional[Callable[[float, float], float]] = field(default=None, compare=False)

    def __post_init__(self):
        if any(v < 0 for v in self.values):
            raise ValueError("kernel profile must be nonnegative")
        for t in (self.lower, self.upper):
            if t is not None and t.A < 0:
                raise ValueError("tail descriptor coefficients must be nonnegative")

    @property
    def hi(self) -> int:
        return self.lo + len(self.values) - 1

    @property
    def exact(self) -> bool:
        return all(t is not None and t.exact for t in (self.lower, self.upper))

    def to_json(self) -> dict:
        if self.name in KERNEL_PRESETS:
            return {"builtin": self.name}
        return {
            "table": {"lo": self.lo, "hi": self.hi, "values": [fmt(v) for v in self.values]},
            "lower_tail": self.lower.to_json() if self.lower else None,
            "upper_tail": self.upper.to_json() if self.upper else None,
        }

    @classmethod
    def from_json(cls, data: dict) -> "KernelSpec":
        if "builtin" in data:
            return builtin_kernel(data["builtin"])
        tab = data["table"]
        values = tuple(as_exact(v) for v in tab["values"])
        lo = int(tab["lo"])
        if "hi" in tab and int(tab["hi"]) != lo + len(values) - 1:
            raise ValueError("table.hi does not match the number of values")
        return cls(
            data.get("name", "table"), lo, values,
            TailDescriptor.from_json(data.get("lower_tail")),
            TailDescriptor.from_json(data.get("upper_tail")),
        )


def _hardy_raw(s: float, t: float) -> float:
    return (1.0 / s) if t <= s else 0.0


def _hilbert_raw(s: float, t: float) -> float:
    return 1.0 / (s + t)


def _hlp_raw(s: float, t: float) -> float:
    return 1.0 / max(s, t)


def hardy() -> KernelSpec:
    """``K(|s|,|t|) = |s|^-1 chi(|t| <= |s|)``: ``k_j = 1`` for ``j <= 0``."""
    one = Fraction(1)
    return KernelSpec("hardy", 0, (one,), TailDescriptor(one, Fraction(0)), TailDescriptor(Fraction(0), Fraction(0)),
                      raw=_hardy_raw)


def hlp() -> KernelSpec:
    """``K = 1/max(|s|,|t|)``: ``k_j = min(1, q^-j)``."""
    one = Fraction(1)
    return KernelSpec("hlp", 0, (one,), TailDescriptor(one, Fraction(0)), TailDescriptor(one, Fraction(-1)),
                      raw=_hlp_raw)


def _hilbert_profile(j: int, q: int) -> Number:
    return 1 / (1 + Fraction(q) ** j)


def hilbert() -> KernelSpec:
    """``K = 1/(|s|+|t|)``: ``k_j = 1/(1+q^j)``, bounded by ``min(1, q^-j)``."""
    one = Fraction(1)
    return KernelSpec("hilbert", 0, (Fraction(1, 2),), TailDescriptor(one, Fraction(0), False),
                      TailDescriptor(one, Fraction(-1), False), profile_fn=_hilbert_profile, raw=_hilbert_raw)


def identity_kernel() -> KernelSpec:
    """One-point profile ``k_j = [j == 0]``; the operator is ``(1 - 1/q) * id``."""
    z = TailDescriptor(Fraction(0), Fraction(0))
    return KernelSpec("identity", 0, (Fraction(1),), z, z)


_BUILTINS = {"hardy": hardy, "hilbert": hilbert, "hlp": hlp, "identity": identity_kernel}
KERNEL_PRESETS = tuple(_BUILTINS)


def builtin_kernel(name: str) -> KernelSpec:
    try:
        return _BUILTINS[name.strip().lower()]()
    except KeyError:
        raise ValueError(f"unknown kernel {name!r}; valid presets: {', '.join(KERNEL_PRESETS)}") from None


def kernel_profile(spec: KernelSpec, j: int, q) -> Number:
    """``K(1, q^j)``."""
    q = q.q if isinstance(q, FieldParams) else int(q)
    if spec.lo <= j <= spec.hi:
        return spec.values[j - spec.lo]
    if spec.profile_fn is not None:
        return spec.profile_fn(j, q)
    tail = spec.lower if j < spec.lo else spec.upper
    side = "lower" if j < spec.lo else "upper"
    if tail is None:
        raise ValueError(f"j={j} lies outside the kernel table and the {side} tail is undeclared")
    if not tail.exact:
        raise ValueError(f"j={j}: the {side} tail is only an upper bound; values there are unknown")
    return simplify(tail.A * qpow(q, tail.s * j))


def homogeneity_check(raw: Callable[[float, float], float], q: int, span: int = 6, rtol: float = 1e-12) -> dict:
    """Test ``K(xi s, xi t) = xi^-1 K(s, t)`` on the grid ``s, t, xi`` in ``q^Z``.

    Returns the largest relative violation and the median fitted degree.
    """
    grid = range(-span, span + 1)
    worst, degrees = 0.0, []
    for a in grid:
        for b in grid:
            s, t = float(q) ** (-a), float(q) ** (-b)
            base = raw(s, t)
            for c in (-3, -1, 1, 2):
                xi = float(q) ** (-c)
                scaled = raw(xi * s, xi * t)
                expect = base / xi
                if base == 0 and scaled == 0:
                    continue
                denom = max(abs(expect), abs(scaled))
                worst = max(worst, abs(scaled - expect) / denom)
                if base != 0 and scaled != 0 and scaled / base > 0:
                    degrees.append(math.log(scaled / base) / math.log(xi))
    degree = float(np.median(degrees)) if degrees else float("nan")
    return {"pass": worst <= rtol, "max_violation": worst, "degree": degree}


# ---------------------------------------------------------------------------
# exact convolution


def _function_parts(f: RadialFunction):
    points = {l: v for l, v in zip(range(f.lo, f.hi + 1), f.values) if v != 0}
    lines = []
    if not f.lower.is_zero():
        lines.append(HalfLine(-1, f.lo - 1, f.lower))
    if not f.upper.is_zero():
        lines.append(HalfLine(+1, f.hi + 1, f.upper))
    return points, lines


def _kernel_parts(spec: KernelSpec, q: int):
    w = 1 - Fraction(1, q)
    points = {}
    for j, v in zip(range(spec.lo, spec.hi + 1), spec.values):
        if v != 0:
            points[j] = simplify(w * v * qpow(q, j))
    lines = []
    if spec.lower is not None and spec.lower.A != 0:
        lines.append(HalfLine(-1, spec.lo - 1, ExpPoly.geometric(w * spec.lower.A, spec.lower.s + 1)))
    if spec.upper is not None and spec.upper.A != 0:
        lines.append(HalfLine(+1, spec.hi + 1, ExpPoly.geometric(w * spec.upper.A, spec.upper.s + 1)))
    return points, lines


def _shift_line(line: HalfLine, p: int, v: Number, q: int) -> HalfLine:
    # m -> v * line(m - p)
    return HalfLine(line.direction, line.start + p, line.body.shift(-p, q).scale(v))


def _assemble(q: int, points: dict, lines: list) -> RadialFunction:
    lines = [ln for ln in lines if not ln.body.is_zero()]
    points = {k: v for k, v in points.items() if v != 0}
    lo_c = list(points) + [ln.start for ln in lines if ln.direction > 0] + [ln.start + 1 for ln in lines if ln.direction < 0]
    hi_c = list(points) + [ln.start for ln in lines if ln.direction < 0] + [ln.start - 1 for ln in lines if ln.direction > 0]
    if not lo_c:
        return zero_function(q)
    lo, hi = min(lo_c), max(hi_c)
    hi = max(hi, lo)
    values = []
    for m in range(lo, hi + 1):
        v = points.get(m, 0)
        for ln in lines:
            v += ln.value(m, q)
        values.append(simplify(v))
    lower = ExpPoly()
    upper = ExpPoly()
    for ln in lines:
        if ln.direction < 0:
            lower = lower + ln.body
        else:
            upper = upper + ln.body
    return RadialFunction(q, lo, tuple(values), lower, upper).canonical()


def apply_operator(spec: KernelSpec, f: RadialFunction, margin: int = 16) -> RadialFunction:
    """``Tf`` as a radial function.

    Kernels with exact geometric tails give an exact result with closed-form
    tails.  Kernels known beyond their table only through bounds need a
    finitely supported ``f``; the output is then computed exactly on a
    window widened by ``margin`` and carries a geometric majorant for the
    values outside it in ``remainder``.
    """
    q = f.q
    if f.remainder is not None:
        raise ValueError("input is windowed with a remainder bound; apply needs an exact function")
    if not spec.exact:
        return _apply_windowed(spec, f, margin)
    kp, kl = _kernel_parts(spec, q)
    fp, fl = _function_parts(f)
    points: dict = {}
    lines: list = []
    for j, wj in kp.items():
        for l, al in fp.items():
            points[j + l] = points.get(j + l, 0) + wj * al
        for ln in fl:
            lines.append(_shift_line(ln, j, wj, q))
    for kln in kl:
        for l, al in fp.items():
            lines.append(_shift_line(kln, l, al, q))
        for ln in fl:
            try:
                lines.extend(convolve_halflines(kln, ln, q, labels=("kernel", "function")))
            except SeriesDivergence as exc:
                raise OperatorDivergence(f"operator integral diverges: {exc}", exc.sides) from None
    return _assemble(q, points, lines)


def _majorant_kernel(spec: KernelSpec) -> KernelSpec:
    # exact kernel dominating |k_j| everywhere
    return KernelSpec(spec.name + "-majorant", spec.lo, tuple(abs(v) for v in spec.values),
                      TailDescriptor(spec.lower.A, spec.lower.s), TailDescriptor(spec.upper.A, spec.upper.s))


def _abs_function(f: RadialFunction) -> RadialFunction:
    tails = []
    for side, t in (("lower", f.lower), ("upper", f.upper)):
        geo = t.as_geometric() if not t.is_zero() else (0, 0)
        if geo is None:
            raise NonGeometricTail(f"{side} tail is not a single geometric term", side)
        tails.append(ExpPoly.geometric(abs(geo[0]), geo[1]))
    return RadialFunction(f.q, f.lo, tuple(abs(v) for v in f.values), tails[0], tails[1])


def _tail_series(term, first: int, step: int, rho: float, settled, cap: int = 20000) -> float:
    """Sum ``term(l)`` for ``l = first, first+step, ...`` until the geometric
    majorant of the rest is negligible; ``settled(l)`` says the ratio bound
    ``rho`` holds from ``l`` on."""
    total, l = 0.0, first
    for _ in range(cap):
        t = term(l)
        total += t
        if settled(l) and abs(t) * rho / (1 - rho) <= 1e-17 * max(abs(total), 1e-300):
            return total
        l += step
    return total


def _apply_windowed(spec: KernelSpec, f: RadialFunction, margin: int) -> RadialFunction:
    if spec.profile_fn is None:
        raise ValueError(f"kernel {spec.name!r} has bound-only tails and no profile formula")
    if spec.lower is None or spec.upper is None:
        raise ValueError(f"kernel {spec.name!r} needs both tail descriptors")
    q = f.q
    fab = _abs_function(f)
    try:
        major = apply_operator(_majorant_kernel(spec), fab)
    except OperatorDivergence as exc:
        raise OperatorDivergence(f"operator integral diverges: {exc}", exc.sides) from None
    w0 = 1 - 1 / q

    def w(j):
        return w0 * float(kernel_profile(spec, j, q)) * float(q) ** j

    lower_geo = f.lower.as_geometric() if not f.lower.is_zero() else None
    upper_geo = f.upper.as_geometric() if not f.upper.is_zero() else None

    def value(m):
        acc = sum(w(m - l) * float(a) for l, a in zip(range(f.lo, f.hi + 1), f.values) if a != 0)
        if lower_geo is not None:
            c, s = float(lower_geo[0]), float(lower_geo[1])
            rho = float(q) ** (float(spec.upper.s) + 1 - s)
            acc += _tail_series(lambda l: w(m - l) * c * float(q) ** (s * l), f.lo - 1, -1, rho,
                                lambda l: m - l > spec.hi)
        if upper_geo is not None:
            c, s = float(upper_geo[0]), float(upper_geo[1])
            rho = float(q) ** (s - float(spec.lower.s) - 1)
            acc += _tail_series(lambda l: w(m - l) * c * float(q) ** (s * l), f.hi + 1, 1, rho,
                                lambda l: m - l < spec.lo)
        return acc

    lo = min(f.lo + spec.lo - margin, major.lo)
    hi = max(f.hi + spec.hi + margin, major.hi)
    values = tuple(value(m) for m in range(lo, hi + 1))
    remainder = {
        "lower": _tail_json(major.lower, q),
        "upper": _tail_json(major.upper, q),
        "kind": "majorant of |Tf| outside the window",
    }
    return RadialFunction(q, lo, values, remainder=remainder)


# ---------------------------------------------------------------------------
# radialization over the digit model


@dataclass(frozen=True)
class DigitFunction:
    """``f(x) = g(v(x)) * (1 + sum_i w_i [digit_{j_i}(x) == d_i])``.

    ``g`` is given on the valuation window ``support`` (zero elsewhere);
    digit positions are counted from the leading digit.  Empty ``bumps``
    give a radial function.
    """

    p: int
    support: tuple  # (vlo, vhi)
    level_values: tuple
    bumps: tuple = ()  # (position, digit, weight)

    def __post_init__(self):
        vlo, vhi = self.support
        if vhi < vlo or len(self.level_values) != vhi - vlo + 1:
            raise ValueError("level_values must cover the declared support")

    @property
    def needed_digits(self) -> int:
        return 1 + max([b[0] for b in self.bumps], default=0)

    def __call__(self, x: LaurentElement) -> float:
        if x.is_zero():
            return 0.0
        vlo, vhi = self.support
        if not vlo <= x.valuation <= vhi:
            return 0.0
        factor = 1.0 + sum(w for j, d, w in self.bumps if x.digit(x.valuation + j) == d)
        return float(self.level_values[x.valuation - vlo]) * factor

    def batch(self, sample: DigitSample) -> np.ndarray:
        vlo, vhi = self.support
        v = sample.valuation
        inside = (v >= vlo) & (v <= vhi)
        g = np.zeros(len(v))
        idx = np.clip(v - vlo, 0, vhi - vlo)
        g[inside] = np.asarray(self.level_values, dtype=float)[idx[inside]]
        factor = np.ones(len(v))
        for j, d, w in self.bumps:
            factor += w * (sample.digits[:, j] == d)
        return g * factor

    def radial_part(self, q: Optional[int] = None) -> RadialFunction:
        """The sphere averages, computed exactly from digit uniformity."""
        p = self.p
        vlo, vhi = self.support
        avg = 1.0
        for j, d, w in self.bumps:
            if j == 0:
                prob = 0.0 if d == 0 else 1.0 / (p - 1)
            else:
                prob = 1.0 / p
            avg += w * prob
        return RadialFunction(q or p, vlo, tuple(float(g) * avg for g in self.level_values))


@dataclass
class RadialEstimate:
    function: RadialFunction
    stderr: tuple
    samples_per_level: int
    seed: int


def _evaluate(fn, sample: DigitSample) -> np.ndarray:
    if hasattr(fn, "batch"):
        return np.asarray(fn.batch(sample), dtype=float)
    return np.array([fn(sample.element(i)) for i in range(len(sample.valuation))], dtype=float)


def radialize(fn, p: int, levels: tuple, samples: int, seed: int, depth: Optional[int] = None) -> RadialEstimate:
    """Monte Carlo sphere averages ``f_bar`` on valuation levels ``[lo, hi]``.

    ``f_bar(x) = (|x| (1 - 1/q))^-1 int_{|y|=|x|} f(y) dy`` is the mean of
    ``f`` over the sphere; each level gets ``samples`` Haar draws.
    """
    if samples < 100:
        raise ValueError("radialization needs at least 100 samples per sphere")
    lo, hi = levels
    rng = np.random.default_rng(seed)
    depth = depth or max(8, getattr(fn, "needed_digits", 1) + 2)
    means, errs = [], []
    for m in range(lo, hi + 1):
        smp = sample_haar_batch(p, m, depth, samples, rng, sphere=True)
        vals = _evaluate(fn, smp)
        means.append(float(vals.mean()))
        errs.append(float(vals.std(ddof=1) / math.sqrt(samples)))
    return RadialEstimate(RadialFunction(p, lo, tuple(means)), tuple(errs), samples, seed)
