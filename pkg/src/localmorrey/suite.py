"""The verification suite: every checked statement as one report family."""

from __future__ import annotations

import csv
import io
import json
import math
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Optional

import numpy as np

from .bounds import divergence_witness, main_bound_constant, partial_sum
from .field import ball_measure, sphere_measure, weighted_ball_measure
from .harness import (SearchConfig, direct_operator_value, empirical_operator_norm, mc_check_radialization,
                      oracle_terms_for, oracle_weighted_measure, random_digit_function, theorem_bound)
from .kernels import apply_operator, builtin_kernel, hardy, homogeneity_check
from .bounds import dilation_bound
from .morrey import (MorreyParams, char_ball_norm_bound, morrey_norm, phi_certificate, phi_eval, phi_preset,
                     power_phi)
from .numeric import as_exact, fmt
from .radial import (NonIntegrable, char_ball, dilate, from_sequence, japanese_bracket, same_function)

# one family per checked statement; the report must cover exactly these
STATEMENT_MANIFEST = (
    "weighted-ball-measure-vs-series",
    "ball-splits-into-sphere-and-inner-ball",
    "char-ball-norm-bound",
    "bracket-membership-threshold",
    "phi-class-certificate",
    "phi-submultiplicativity",
    "dilation-lebesgue-identity",
    "dilation-bound",
    "kernel-homogeneity",
    "operator-matches-definition",
    "hardy-maps-ball-to-bracket",
    "bound-constant-closed-vs-series",
    "bound-finiteness-predicate",
    "hlp-partial-sums-diverge",
    "main-theorem-inequality",
    "radialization-commutes",
    "radialization-contracts-norm",
)


@dataclass(frozen=True)
class VerifyConfig:
    qs: tuple = (2, 3, 5)
    rs: tuple = ("3/2", "2", "3")
    alphas: tuple = ("1/4", "1/2", "1")
    phis: tuple = ("lebesgue", "envelope", "central(4)")
    kernels: tuple = ("hardy", "hlp")
    seed: int = 0
    eta_range: tuple = (-15, 15)
    dilation_functions: int = 50
    search_window: tuple = (-12, 12)
    search_restarts: int = 4
    search_iters: int = 40
    search_random: int = 200
    mc_functions: int = 4
    mc_samples: int = 20000
    mc_probes: tuple = (-2, 0, 2)

    def to_json(self) -> dict:
        return {k: (list(v) if isinstance(v, tuple) else v) for k, v in asdict(self).items()}

    @classmethod
    def from_json(cls, data: dict) -> "VerifyConfig":
        known = {f for f in cls.__dataclass_fields__}
        bad = set(data) - known
        if bad:
            raise ValueError(f"unknown config keys: {sorted(bad)}")
        return cls(**{k: tuple(v) if isinstance(v, list) else v for k, v in data.items()})


@dataclass
class CheckRecord:
    name: str
    case: str
    status: str  # pass | fail | skip
    measured: object
    bound: object
    tol: Optional[float]
    seed: Optional[int]
    ms: float = 0.0
    detail: dict = field(default_factory=dict)

    def body(self) -> dict:
        return {"name": self.name, "case": self.case, "status": self.status, "measured": _jsonable(self.measured),
                "bound": _jsonable(self.bound), "tol": self.tol, "seed": self.seed, "detail": _jsonable(self.detail)}


def _jsonable(x):
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, Fraction):
        return fmt(x)
    if isinstance(x, float):
        return fmt(x) if math.isinf(x) else x
    if isinstance(x, (np.floating, np.integer)):
        return _jsonable(x.item())
    return x


@dataclass
class VerificationReport:
    checks: list
    config: VerifyConfig

    @property
    def failed(self) -> list:
        return [c for c in self.checks if c.status == "fail"]

    @property
    def ok(self) -> bool:
        return not self.failed

    def body(self) -> dict:
        """Report without timings; identical across runs with the same seed."""
        return {"config": self.config.to_json(), "checks": [c.body() for c in self.checks],
                "summary": self.summary()}

    def summary(self) -> dict:
        out = {"pass": 0, "fail": 0, "skip": 0}
        for c in self.checks:
            out[c.status] += 1
        return out

    def to_json(self, timing: bool = True) -> str:
        data = self.body()
        if timing:
            data["timing_ms"] = [round(c.ms, 3) for c in self.checks]
        return json.dumps(data, indent=2, sort_keys=True)

    def to_csv(self, timing: bool = True) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["name", "status", "measured", "bound", "tol", "seed", "ms"])
        for c in self.checks:
            name = f"{c.name}[{c.case}]" if c.case else c.name
            w.writerow([name, c.status, _cell(c.measured), _cell(c.bound), c.tol, c.seed,
                        round(c.ms, 3) if timing else ""])
        return buf.getvalue()


def _cell(x):
    x = _jsonable(x)
    return json.dumps(x) if isinstance(x, (dict, list)) else x


def _params_grid(cfg: VerifyConfig, phis=None):
    for q in cfg.qs:
        for r in cfg.rs:
            for a in cfg.alphas:
                for ph in (phis if phis is not None else cfg.phis):
                    yield q, as_exact(r), as_exact(a), ph


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


# -- individual families ------------------------------------------------------


def check_weighted_measure(cfg):
    worst, repro, exact_ok = 0.0, None, True
    for q in sorted(set(cfg.qs) | {4, 8}):
        for a in cfg.alphas + ("2",):
            a = as_exact(a)
            n = oracle_terms_for(q, a)
            for k in range(-10, 11):
                closed = weighted_ball_measure(q, k, a)
                part, tail = oracle_weighted_measure(q, a, k, n)
                if isinstance(closed, Fraction) and isinstance(part, Fraction):
                    exact_ok &= closed == part + tail
                err = abs(float(part) - float(closed)) / float(closed)
                if err > worst:
                    worst, repro = err, {"q": q, "alpha": a, "k": k, "terms": n}
    ok = worst <= 1e-12 and exact_ok
    yield CheckRecord("weighted-ball-measure-vs-series", "", _status(ok), worst, 1e-12, 1e-12, None,
                      detail={"exact_rational_agreement": exact_ok, "worst_case": repro})


def check_ball_decomposition(cfg):
    bad = [(q, k) for q in sorted(set(cfg.qs) | {4, 8}) for k in range(-20, 21)
           if ball_measure(q, k) != sphere_measure(q, k) + ball_measure(q, k + 1)]
    yield CheckRecord("ball-splits-into-sphere-and-inner-ball", "", _status(not bad), len(bad), 0, 0.0, None,
                      detail={"violations": bad[:5]})


def check_char_ball(cfg):
    worst, repro, n = 0.0, None, 0
    for q, r, a, ph in _params_grid(cfg):
        P = MorreyParams.make(q, r, a, ph)
        cert = phi_certificate(P.phi, r, q)
        if not cert.in_class:
            continue
        for eta in range(cfg.eta_range[0], cfg.eta_range[1] + 1):
            val = float(morrey_norm(char_ball(eta, q), P).value)
            bound = float(char_ball_norm_bound(eta, P, cert))
            n += 1
            if val / bound > worst:
                worst, repro = val / bound, {"q": q, "r": r, "alpha": a, "phi": ph, "eta": eta}
    yield CheckRecord("char-ball-norm-bound", f"{n} cases", _status(worst <= 1 + 1e-9), worst, 1.0, 1e-9, None,
                      detail={"max_ratio_at": repro})


def _is_finite_norm(f, P) -> bool:
    try:
        return not morrey_norm(f, P).infinite
    except NonIntegrable:
        return False


def check_bracket(cfg):
    bad, n = [], 0
    for q in cfg.qs:
        for r in cfg.rs:
            for a in cfg.alphas:
                r_, a_ = as_exact(r), as_exact(a)
                P = MorreyParams.make(q, r_, a_, "lebesgue")
                thr = (a_ + 1) / r_
                for d in (Fraction(-1, 2), Fraction(-1, 20), Fraction(0), Fraction(1, 20), Fraction(1, 2)):
                    N = thr + d
                    if N <= 0:
                        continue
                    n += 1
                    if _is_finite_norm(japanese_bracket(N, q), P) != (N > thr):
                        bad.append({"q": q, "r": r, "alpha": a, "N": N})
    yield CheckRecord("bracket-membership-threshold", f"{n} cases", _status(not bad), len(bad), 0, 0.0, None,
                      detail={"violations": bad[:5]})


def _brute_class(phi, r, q, span=80):
    rf = float(r)
    vals = []
    for k in range(-span, span + 1):
        v = float(phi_eval(phi, k, q))
        vals.append(v if k >= 0 else v * float(q) ** (k / rf))
    return max(vals)


def _brute_sm(phi, q, span=40):
    best = 0.0
    for s in range(-span, span + 1):
        for t in range(-span, span + 1):
            best = max(best, float(phi_eval(phi, s + t, q)) / (float(phi_eval(phi, s, q)) * float(phi_eval(phi, t, q))))
    return best


def _phi_pool(cfg, r):
    names = list(cfg.phis)
    pool = [(n, phi_preset(n, r)) for n in names]
    pool.append(("power(beta=0)", power_phi(0)))
    pool.append(("power(beta=1/(2r),c=2)", power_phi(1 / (2 * r), 2)))
    return pool


def check_phi_class(cfg):
    worst, bad = 0.0, []
    for q in cfg.qs:
        for r in cfg.rs:
            r_ = as_exact(r)
            for name, phi in _phi_pool(cfg, r_):
                cert = phi_certificate(phi, r_, q)
                predicted = phi.beta_right >= 0 and phi.beta_left <= 1 / r_
                if cert.in_class != predicted:
                    bad.append({"q": q, "r": r, "phi": name})
                    continue
                if cert.in_class:
                    brute = _brute_class(phi, r_, q)
                    err = abs(float(cert.C_class) - brute) / brute
                    worst = max(worst, err)
    ok = not bad and worst <= 1e-12
    yield CheckRecord("phi-class-certificate", "", _status(ok), worst, 0.0, 1e-12, None,
                      detail={"membership_mismatches": bad})


def check_phi_sm(cfg):
    worst, bad = 0.0, []
    for q in cfg.qs:
        for r in cfg.rs:
            r_ = as_exact(r)
            for name, phi in _phi_pool(cfg, r_):
                cert = phi_certificate(phi, r_, q)
                if cert.submultiplicative != (phi.beta_left >= phi.beta_right):
                    bad.append({"q": q, "phi": name})
                    continue
                if cert.submultiplicative:
                    brute = _brute_sm(phi, q, 20)
                    err = abs(float(cert.C_sm) - brute) / brute
                    worst = max(worst, err)
    ok = not bad and worst <= 1e-12
    yield CheckRecord("phi-submultiplicativity", "", _status(ok), worst, 0.0, 1e-12, None,
                      detail={"mismatches": bad})


def random_radial(q: int, rng: np.random.Generator, r, alpha, span=(-5, 5), tails=True):
    """Random nonnegative radial function with integrable geometric tails."""
    lo = int(rng.integers(span[0], span[1] + 1))
    hi = int(rng.integers(lo, span[1] + 1))
    vals = [Fraction(int(v), 4) for v in rng.integers(0, 9, hi - lo + 1)]
    if not any(vals):
        vals[0] = Fraction(1)
    lower = upper = None
    if tails and rng.random() < 0.7:
        lower = (Fraction(int(rng.integers(1, 4)), 2), Fraction(int(rng.integers(1, 3))))
    if tails and rng.random() < 0.7:
        # upper tail needs r*s < alpha + 1
        s = Fraction(int(rng.integers(-2, 1)))
        upper = (Fraction(int(rng.integers(1, 4)), 2), s)
    return from_sequence(q, lo, vals, lower=lower, upper=upper)


def check_dilation_identity(cfg):
    rng = np.random.default_rng(cfg.seed)
    worst, repro = 0.0, None
    for i in range(cfg.dilation_functions):
        q = int(rng.choice(cfg.qs))
        r = as_exact(cfg.rs[int(rng.integers(len(cfg.rs)))])
        a = as_exact(cfg.alphas[int(rng.integers(len(cfg.alphas)))])
        P = MorreyParams.make(q, r, a, "lebesgue")
        f = random_radial(q, rng, r, a)
        l = int(rng.integers(-8, 9))
        lhs = morrey_norm(dilate(f, l), P).power
        rhs = float(q) ** (l * float(1 + a)) * float(morrey_norm(f, P).power)
        err = abs(float(lhs) - rhs) / rhs
        if err > worst:
            worst, repro = err, {"f": f.to_json(), "l": l, "q": q, "r": r, "alpha": a}
    yield CheckRecord("dilation-lebesgue-identity", f"{cfg.dilation_functions} functions",
                      _status(worst <= 1e-12), worst, 0.0, 1e-12, cfg.seed, detail={"worst": repro})


def check_dilation_bound(cfg):
    rng = np.random.default_rng(cfg.seed + 1)
    worst, repro, n = 0.0, None, 0
    for q in cfg.qs:
        for r in cfg.rs:
            r_ = as_exact(r)
            for name, phi in _phi_pool(cfg, r_):
                cert = phi_certificate(phi, r_, q)
                if not (cert.in_class and cert.submultiplicative):
                    continue
                for a in cfg.alphas:
                    a_ = as_exact(a)
                    P = MorreyParams(r_, a_, phi, MorreyParams.make(q, r_, a_).field)
                    f = random_radial(q, rng, r_, a_)
                    nf = float(morrey_norm(f, P).value)
                    for l in (-8, -3, -1, 0, 1, 3, 8):
                        n += 1
                        lhs = float(morrey_norm(dilate(f, l), P).value)
                        bound = float(dilation_bound(l, r_, a_, cert.product(), q)) * nf
                        if lhs / bound > worst:
                            worst, repro = lhs / bound, {"phi": name, "q": q, "r": r, "alpha": a, "l": l,
                                                         "f": f.to_json()}
    yield CheckRecord("dilation-bound", f"{n} cases", _status(worst <= 1 + 1e-9), worst, 1.0, 1e-9, cfg.seed + 1,
                      detail={"max_ratio_at": repro})


def check_homogeneity(cfg):
    worst = 0.0
    degs = {}
    for name in ("hardy", "hilbert", "hlp"):
        spec = builtin_kernel(name)
        for q in cfg.qs:
            res = homogeneity_check(spec.raw, q)
            worst = max(worst, res["max_violation"])
            degs[f"{name}@{q}"] = res["degree"]
    ok = worst <= 1e-12 and all(abs(d + 1) < 1e-9 for d in degs.values())
    yield CheckRecord("kernel-homogeneity", "", _status(ok), worst, 0.0, 1e-12, None, detail={"degrees": degs})


def check_operator_definition(cfg):
    rng = np.random.default_rng(cfg.seed + 2)
    worst, repro, n = 0.0, None, 0
    for name in ("hardy", "hilbert", "hlp"):
        spec = builtin_kernel(name)
        for i in range(6):
            q = int(cfg.qs[i % len(cfg.qs)])
            f = random_radial(q, rng, 2, 1)
            if name != "hardy" and not f.upper.is_zero():
                # keep the upper tail summable against the kernel's lower tail
                c, s = f.upper.as_geometric()
                f = from_sequence(q, f.lo, f.values, lower=f.lower.as_geometric(), upper=(c, min(s, Fraction(0))))
            g = apply_operator(spec, f)
            for m in range(f.lo - 4, f.hi + 5):
                n += 1
                a, b = float(g(m)), direct_operator_value(spec, f, m)
                err = abs(a - b) / max(abs(b), 1e-300)
                if err > worst:
                    worst, repro = err, {"kernel": name, "m": m, "f": f.to_json()}
    yield CheckRecord("operator-matches-definition", f"{n} values", _status(worst <= 1e-9), worst, 0.0, 1e-9,
                      cfg.seed + 2, detail={"worst": repro})


def check_hardy_ball(cfg):
    bad = [q for q in cfg.qs if not same_function(apply_operator(hardy(), char_ball(0, q)), japanese_bracket(1, q))]
    yield CheckRecord("hardy-maps-ball-to-bracket", "", _status(not bad), len(bad), 0, 0.0, None,
                      detail={"failing_q": bad})


def _finite_grid(cfg):
    for q in cfg.qs:
        for r in cfg.rs:
            for a in cfg.alphas:
                r_, a_ = as_exact(r), as_exact(a)
                yield q, r_, a_, a_ + 1 < r_


def check_bound_series(cfg):
    worst, repro = 0.0, None
    for name in cfg.kernels:
        spec = builtin_kernel(name)
        for q, r, a, fin in _finite_grid(cfg):
            if not fin:
                continue
            C = main_bound_constant(spec, r, a, q)
            # terms until the geometric remainder is below 1e-14
            u = float(q) ** float((a + 1) / r - 1)
            v = float(q) ** float(-a / r)
            rho = max(u, v)
            n = int(math.ceil(math.log(1e-14 * (1 - rho)) / math.log(rho))) + 1
            s = partial_sum(spec, r, a, q, n)
            err = abs(float(C.value) - s) / float(C.value)
            if err > worst:
                worst, repro = err, {"kernel": name, "q": q, "r": r, "alpha": a, "terms": n}
    yield CheckRecord("bound-constant-closed-vs-series", "", _status(worst <= 1e-12), worst, 0.0, 1e-12, None,
                      detail={"worst": repro})


def check_finiteness(cfg):
    bad, n = [], 0
    rs = sorted({as_exact(r) for r in cfg.rs})
    for name in ("hardy", "hlp", "hilbert"):
        spec = builtin_kernel(name)
        for r in rs:
            for d in (Fraction(-1, 20), Fraction(0), Fraction(1, 20)):
                a = r - 1 + d  # straddle alpha + 1 = r
                if a <= 0:
                    continue
                n += 1
                res = main_bound_constant(spec, r, a, 2)
                if res.finite != (a + 1 < r) or (not res.finite and res.finiteness_condition != "alpha+1<r"):
                    bad.append({"kernel": name, "r": r, "alpha": a})
    yield CheckRecord("bound-finiteness-predicate", f"{n} cases", _status(not bad), len(bad), 0, 0.0, None,
                      detail={"violations": bad})


def check_divergence(cfg):
    bad, out = [], {}
    for r in sorted({as_exact(r) for r in cfg.rs}):
        for a in (r - 1, r - 1 + Fraction(1, 2)):
            if a <= 0:
                continue
            w = divergence_witness(builtin_kernel("hlp"), r, a, 2)
            ok = w["diverges"] and w["partial_at_terms"] > 1e6 >= w["partial_before"]
            out[f"r={r},alpha={a}"] = w["terms"]
            if not ok:
                bad.append({"r": r, "alpha": a})
    yield CheckRecord("hlp-partial-sums-diverge", "", _status(not bad), len(bad), 0, 0.0, None,
                      detail={"terms_to_exceed_1e6": out})


def check_main_theorem(cfg):
    for name in cfg.kernels:
        spec = builtin_kernel(name)
        for q, r, a, fin in _finite_grid(cfg):
            case = f"{name},q={q},r={r},alpha={a}"
            P = MorreyParams.make(q, r, a, "lebesgue")
            if not fin:
                yield CheckRecord("main-theorem-inequality", case, "skip", None, "inf", None, cfg.seed,
                                  detail={"reason": "alpha+1<r violated"})
                continue
            tb = theorem_bound(spec, P)
            res = empirical_operator_norm(spec, P, SearchConfig(cfg.search_window, cfg.search_restarts,
                                                                cfg.search_iters, cfg.search_random, cfg.seed))
            ok = res.ratio <= tb["product"] * (1 + 1e-9)
            detail = {"C_rq": tb["C_rq"].value, "C_sm": tb["C_sm"], "C_class": tb["C_class"],
                      "gap": tb["product"] - res.ratio}
            if not ok:
                detail["witness"] = res.best_f.to_json()
            yield CheckRecord("main-theorem-inequality", case, _status(ok), res.ratio, tb["product"], 1e-9,
                              cfg.seed, detail=detail)


def _mc_runs(cfg):
    rng = np.random.default_rng(cfg.seed + 3)
    kernels = ("hlp", "hardy", "hilbert")
    for i in range(cfg.mc_functions):
        p = int([2, 3, 5][i % 3])
        fn = random_digit_function(p, rng)
        spec = builtin_kernel(kernels[i % 3])
        P = MorreyParams.make(p, 2, Fraction(1, 2), "lebesgue")
        yield i, fn, spec, mc_check_radialization(spec, fn, P, cfg.mc_probes, cfg.mc_samples, cfg.seed + 100 + i)


def check_radialization(cfg):
    results = list(_mc_runs(cfg))
    for i, fn, spec, chk in results:
        ok = all(d <= 3 for d in chk.deviations)
        yield CheckRecord("radialization-commutes", f"{spec.name},p={fn.p},#{i}", _status(ok), max(chk.deviations),
                          3.0, 3.0, chk.seed, detail={"deviations_in_se": chk.deviations,
                                                      "function": {"support": fn.support, "levels": fn.level_values,
                                                                   "bumps": fn.bumps}})
    for i, fn, spec, chk in results:
        ok = chk.norm_fbar <= chk.norm_f * (1 + 1e-12)
        yield CheckRecord("radialization-contracts-norm", f"p={fn.p},#{i}", _status(ok), chk.norm_fbar, chk.norm_f,
                          1e-12, chk.seed)


FAMILIES: tuple = (
    check_weighted_measure, check_ball_decomposition, check_char_ball, check_bracket, check_phi_class,
    check_phi_sm, check_dilation_identity, check_dilation_bound, check_homogeneity, check_operator_definition,
    check_hardy_ball, check_bound_series, check_finiteness, check_divergence, check_main_theorem,
    check_radialization,
)


def verify_suite(config: VerifyConfig = VerifyConfig(), progress: Optional[Callable[[CheckRecord], None]] = None
                 ) -> VerificationReport:
    checks = []
    for fam in FAMILIES:
        t0 = time.perf_counter()
        try:
            recs = list(fam(config))
        except Exception as exc:  # a crashing family is a failed check, not a crashed suite
            recs = [CheckRecord(fam.__name__, "", "fail", None, None, None, config.seed,
                                detail={"error": f"{type(exc).__name__}: {exc}"})]
        ms = (time.perf_counter() - t0) * 1000 / max(1, len(recs))
        for rec in recs:
            rec.ms = ms
            checks.append(rec)
            if progress:
                progress(rec)
    return VerificationReport(checks, config)


def manifest_complete(report: VerificationReport) -> bool:
    return {c.name for c in report.checks} == set(STATEMENT_MANIFEST)
