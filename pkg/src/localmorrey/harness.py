"""Independent oracles, the operator-norm search and the radialization check."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

import numpy as np

from .bounds import main_bound_constant
from .field import sample_haar_batch
from .kernels import DigitFunction, KernelSpec, apply_operator, kernel_profile, radialize
from .morrey import BatchLayout, MorreyParams, morrey_norm, morrey_norm_batch, phi_certificate
from .numeric import as_exact, is_integral
from .radial import RadialFunction, from_sequence


def oracle_weighted_measure(q: int, alpha, k: int, terms: int):
    """Partial sum of ``sum_{l <= -k} q^(alpha l) (q^l - q^(l-1))`` and its exact remainder.

    Returns ``(partial, tail)`` where ``tail`` is the closed-form value of the
    omitted terms, so ``partial + tail`` is the full series.  Integer
    ``alpha`` gives exact rationals.
    """
    if terms < 1:
        raise ValueError("terms must be >= 1")
    alpha = as_exact(alpha)
    if is_integral(alpha):
        a = int(alpha)
        Q = Fraction(q)
        partial = sum(Q ** (a * l) * (Q**l - Q ** (l - 1)) for l in range(-k - terms + 1, -k + 1))
        last = -k - terms + 1
        # remaining l <= last - 1: geometric with ratio q^-(a+1)
        tail = Q ** ((a + 1) * (last - 1)) * (1 - 1 / Q) / (1 - Q ** (-(a + 1)))
        return partial, tail
    a = float(alpha)
    ls = np.arange(-k - terms + 1, -k + 1, dtype=float)
    partial = math.fsum(float(q) ** ((a + 1) * ls) * (1 - 1 / q))
    last = -k - terms + 1
    tail = float(q) ** ((a + 1) * (last - 1)) * (1 - 1 / q) / (1 - float(q) ** (-(a + 1)))
    return partial, tail


def oracle_terms_for(q: int, alpha, rtol: float = 1e-14) -> int:
    """Smallest truncation whose relative remainder is below ``rtol``."""
    return max(1, math.ceil(-math.log(rtol) / ((float(alpha) + 1) * math.log(q))) + 1)


def direct_operator_value(spec: KernelSpec, f: RadialFunction, m: int, tol: float = 1e-13, cap: int = 5000) -> float:
    """``Tf`` at ``|s| = q^-m`` straight from the integral, sphere by sphere.

    Uses the two-argument kernel, not the profile table.  Summation runs
    outward from the support until a geometric majorant of the rest is below
    ``tol`` relative.
    """
    if spec.raw is None:
        raise ValueError("direct evaluation needs the two-argument kernel")
    q = f.q
    s = float(q) ** (-m)
    w = 1 - 1 / q

    def term(l):
        t = float(q) ** (-l)
        return spec.raw(s, t) * float(f(l)) * t * w

    total = math.fsum(term(l) for l in range(min(f.lo, m) - 2, max(f.hi, m) + 3))
    for step, start in ((-1, min(f.lo, m) - 3), (1, max(f.hi, m) + 3)):
        acc, prev, l = 0.0, None, start
        for _ in range(cap):
            t = term(l)
            acc += t
            if prev not in (None, 0.0) and t != 0.0:
                rho = abs(t / prev)
                if rho < 1 and abs(t) * rho / (1 - rho) <= tol * max(abs(total + acc), 1e-300):
                    break
            elif t == 0.0 and prev == 0.0:
                break
            prev = t
            l += step
        total += acc
    return total


# ---------------------------------------------------------------------------
# operator-norm search


@dataclass(frozen=True)
class SearchConfig:
    window: tuple = (-12, 12)
    restarts: int = 20
    iters: int = 100
    random_samples: int = 1000
    seed: int = 0


@dataclass
class OperatorMatrix:
    """``T`` restricted to functions supported on ``[lo, lo+n)``."""

    q: int
    lo: int
    n: int
    M: np.ndarray  # output window values, one column per unit vector
    lower_c: np.ndarray
    upper_c: np.ndarray
    out: BatchLayout


def operator_matrix(spec: KernelSpec, q: int, window: tuple) -> OperatorMatrix:
    a, b = window
    if b < a:
        raise ValueError("empty search window")
    if not spec.exact:
        raise ValueError(f"the search needs a kernel with exact tails; {spec.name!r} has bound-only tails")
    n = b - a + 1
    images = []
    for i in range(n):
        vals = [0] * n
        vals[i] = 1
        images.append(apply_operator(spec, from_sequence(q, a, vals)))
    LO = min(g.lo for g in images)
    HI = max(g.hi for g in images)
    M = np.array([[float(g(m)) for g in images] for m in range(LO, HI + 1)])

    def side(tails, name):
        exps, coefs = set(), []
        for t in tails:
            if t.is_zero():
                coefs.append(0.0)
                continue
            geo = t.as_geometric()
            if geo is None:
                raise ValueError(f"{name} output tail is not geometric")
            exps.add(geo[1])
            coefs.append(float(geo[0]))
        if len(exps) > 1:
            raise ValueError(f"{name} output tails have different rates")
        return (exps.pop() if exps else None), np.array(coefs)

    ls, lc = side([g.lower for g in images], "lower")
    us, uc = side([g.upper for g in images], "upper")
    return OperatorMatrix(q, a, n, M, lc, uc, BatchLayout(q, LO, HI - LO + 1, ls, us))


@dataclass
class SearchResult:
    best_f: RadialFunction
    ratio: float
    random_best: float
    start_ratio: float
    evaluations: int
    seed: int

    def to_json(self) -> dict:
        return {
            "ratio": self.ratio,
            "random_best": self.random_best,
            "start_ratio": self.start_ratio,
            "evaluations": self.evaluations,
            "seed": self.seed,
            "witness": self.best_f.to_json(),
        }


class _Objective:
    def __init__(self, op: OperatorMatrix, params: MorreyParams):
        self.op, self.params = op, params
        self.inp = BatchLayout(op.q, op.lo, op.n)
        self.calls = 0

    def __call__(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(X)
        self.calls += X.shape[0]
        nf = morrey_norm_batch(X, np.zeros(len(X)), np.zeros(len(X)), self.inp, self.params)
        Y = X @ self.op.M.T
        nt = morrey_norm_batch(Y, X @ self.op.lower_c, X @ self.op.upper_c, self.op.out, self.params)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = nt / nf
        return np.where(nf > 0, ratio, -np.inf)


def random_candidates(n: int, count: int, rng: np.random.Generator, q: int) -> np.ndarray:
    """Nonnegative test vectors: sparse log-normal, geometric profiles and interval indicators."""
    out = np.zeros((count, n))
    kind = rng.integers(0, 3, size=count)
    for i in range(count):
        if kind[i] == 0:
            mask = rng.random(n) < rng.uniform(0.05, 0.6)
            out[i] = mask * rng.lognormal(0.0, 1.5, n)
        else:
            a, b = sorted(rng.integers(0, n, size=2))
            if kind[i] == 1:
                g = rng.uniform(-2.0, 2.0)
                ls = np.arange(n)
                prof = np.exp(g * np.log(q) * (ls - a))
                out[i, a:b + 1] = prof[a:b + 1] / prof[a:b + 1].max()
            else:
                out[i, a:b + 1] = 1.0
        if not out[i].any():
            out[i, rng.integers(0, n)] = 1.0
    return out


def _climb(obj: _Objective, x: np.ndarray, value: float, iters: int):
    n = len(x)
    lam = 4.0
    for _ in range(iters):
        fill = x[x > 0].mean() if np.any(x > 0) else 1.0
        cands = []
        for i in range(n):
            for fac in (1 / lam, lam, 0.0):
                y = x.copy()
                y[i] = y[i] * fac if y[i] > 0 else (fill if fac == lam else 0.0)
                cands.append(y)
        C = np.array(cands)
        vals = obj(C)
        j = int(np.argmax(vals))
        if vals[j] > value * (1 + 1e-12):
            x, value = C[j] / C[j].max(), float(vals[j])
        else:
            lam = math.sqrt(lam)
            if lam < 1.01:
                break
    return x, value


def empirical_operator_norm(spec: KernelSpec, params: MorreyParams, search: SearchConfig = SearchConfig()) -> SearchResult:
    """Lower bound for the operator norm from a seeded witness search.

    Random nonnegative vectors on the window are scored first; hill
    climbing then restarts from the indicator of ``B^0`` cut to the window
    and from the best random vectors.
    """
    q = params.q
    op = operator_matrix(spec, q, search.window)
    obj = _Objective(op, params)
    rng = np.random.default_rng(search.seed)
    n = op.n
    pool = random_candidates(n, search.random_samples, rng, q)
    pool_vals = obj(pool) if len(pool) else np.array([])
    random_best = float(pool_vals.max()) if len(pool) else -math.inf

    start = np.zeros(n)
    a = search.window[0]
    start[max(0, -a):] = 1.0
    if not start.any():
        start[-1] = 1.0
    start_ratio = float(obj(start[None, :])[0])

    order = np.argsort(-pool_vals, kind="stable") if len(pool) else []
    starts = [(start, start_ratio)]
    for idx in order[: max(0, search.restarts - 1)]:
        starts.append((pool[idx] / pool[idx].max(), float(pool_vals[idx])))

    best_x, best = start, start_ratio
    if random_best > best:
        best_x, best = pool[int(np.argmax(pool_vals))], random_best
    for x0, v0 in starts:
        x, v = _climb(obj, x0.copy(), v0, search.iters)
        if v > best:
            best_x, best = x, v
    witness = from_sequence(q, a, [float(v) for v in best_x])
    return SearchResult(witness, best, random_best, start_ratio, obj.calls, search.seed)


def theorem_bound(spec: KernelSpec, params: MorreyParams, tol: float = 1e-12) -> dict:
    """``C_sm * C_class * C_{r,q}`` with its factors."""
    cert = phi_certificate(params.phi, params.r, params.q)
    C = main_bound_constant(spec, params.r, params.alpha, params.q, tol)
    product = math.inf
    if C.finite and cert.in_class and cert.submultiplicative:
        product = float(cert.C_sm) * float(cert.C_class) * float(C.value)
    return {"C_rq": C, "C_sm": cert.C_sm, "C_class": cert.C_class, "product": product, "certificate": cert}


# ---------------------------------------------------------------------------
# radialization


@dataclass
class RadializationCheck:
    probes: tuple
    direct: tuple
    direct_se: tuple
    radial: tuple
    radial_se: tuple
    deviations: tuple  # |difference| / combined standard error
    norm_f: float
    norm_fbar: float
    samples: int
    seed: int
    passed: bool = field(default=False)

    def to_json(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in self.__dict__.items()}


def mc_check_radialization(spec: KernelSpec, fn: DigitFunction, params: MorreyParams, probes: tuple,
                           samples: int, seed: int, nsigma: float = 3.0) -> RadializationCheck:
    """Compare ``Tf`` estimated directly with ``T`` applied to the sphere averages.

    The direct estimate draws ``t`` uniformly from the ball covering the
    declared support and averages ``K(|s|,|t|) f(t)``.  The second route
    radializes ``f`` on independent samples and applies the exact
    convolution.  Also returns both norms, computed from the same sphere
    samples so that ``||f_bar|| <= ||f||`` is a sample-wise inequality.
    """
    if getattr(fn, "support", None) is None:
        raise ValueError("function must declare its valuation support")
    if spec.raw is None:
        raise ValueError("direct estimate needs the two-argument kernel")
    p = fn.p
    q = params.q
    if q != p:
        raise ValueError("digit model needs q == p")
    vlo, vhi = fn.support
    ss = np.random.SeedSequence(seed)
    s_direct, s_radial = ss.spawn(2)
    depth = max(8, fn.needed_digits + 2)

    rng = np.random.default_rng(s_direct)
    smp = sample_haar_batch(p, vlo, depth, samples, rng)
    fv = fn.batch(smp)
    tabs = float(q) ** (-smp.valuation.astype(float))
    vol = float(q) ** (-vlo)
    raw = np.vectorize(spec.raw, otypes=[float])
    direct, dse = [], []
    for m in probes:
        vals = raw(float(q) ** (-m), tabs) * fv * vol
        direct.append(float(vals.mean()))
        dse.append(float(vals.std(ddof=1) / math.sqrt(samples)))

    est = radialize(fn, p, (vlo, vhi), samples, int(s_radial.generate_state(1)[0]), depth=depth)
    fbar = est.function
    Tbar = apply_operator(spec, fbar)
    radial, rse = [], []
    w0 = 1 - 1 / q
    for m in probes:
        radial.append(float(Tbar(m)))
        var = 0.0
        for l, se in zip(range(vlo, vhi + 1), est.stderr):
            j = m - l
            var += (w0 * float(kernel_profile(spec, j, q)) * float(q) ** j * se) ** 2
        rse.append(math.sqrt(var))

    dev = []
    for a, sa, b, sb in zip(direct, dse, radial, rse):
        comb = math.sqrt(sa * sa + sb * sb)
        dev.append(abs(a - b) / comb if comb > 0 else (0.0 if a == b else math.inf))

    # norms from one sample set per sphere
    r = float(params.r)
    rng2 = np.random.default_rng(ss.spawn(1)[0])
    mean_abs_r, mean_f = [], []
    for l in range(vlo, vhi + 1):
        sp = sample_haar_batch(p, l, depth, samples, rng2, sphere=True)
        v = fn.batch(sp)
        mean_abs_r.append(float(np.mean(np.abs(v) ** r)))
        mean_f.append(float(np.mean(v)))
    g = RadialFunction(q, vlo, tuple(x ** (1 / r) for x in mean_abs_r))
    gbar = RadialFunction(q, vlo, tuple(mean_f))
    nf = float(morrey_norm(g, params).value)
    nbar = float(morrey_norm(gbar, params).value)
    passed = all(d <= nsigma for d in dev) and nbar <= nf * (1 + 1e-12)
    return RadializationCheck(tuple(probes), tuple(direct), tuple(dse), tuple(radial), tuple(rse), tuple(dev),
                              nf, nbar, samples, seed, passed)


def random_digit_function(p: int, rng: np.random.Generator, support=(-2, 1)) -> DigitFunction:
    """A nonnegative non-radial function: random level values times digit bumps."""
    vlo, vhi = support
    levels = tuple(float(x) for x in rng.uniform(0.2, 2.0, vhi - vlo + 1))
    nb = int(rng.integers(1, 3))
    bumps = []
    for _ in range(nb):
        j = int(rng.integers(1, 3))
        d = int(rng.integers(0, p))
        bumps.append((j, d, float(rng.uniform(0.5, 3.0))))
    return DigitFunction(p, support, levels, tuple(bumps))
