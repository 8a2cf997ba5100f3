import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import assume, given, settings, strategies as st

from localmorrey.morrey import (BatchLayout, MorreyParams, PhiSegment, PhiSpec, bracket_membership,
                                char_ball_norm_bound, envelope, lebesgue, morrey_norm, morrey_norm_batch, morrey_term,
                                phi_certificate, phi_class_check, phi_eval, phi_preset, phi_submult_check, power_phi)
from localmorrey.radial import NonIntegrable, add, char_ball, from_sequence, japanese_bracket, scale, zero_function

Q = st.sampled_from([2, 3, 5])
R = st.sampled_from([Fraction(3, 2), Fraction(2), Fraction(3)])
ALPHA = st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(1)])


def test_phi_eval_examples():
    assert phi_eval(lebesgue(2), 2, 2) == Fraction(1, 2)
    assert phi_eval(envelope(2), -5, 2) == 1
    assert phi_eval(phi_preset("central(4)"), 4, 2) == Fraction(1, 2)


def test_phi_presets_and_errors():
    assert phi_preset("lebesgue", 3) == lebesgue(3)
    assert phi_preset("lebesgue(2)") == lebesgue(2)
    with pytest.raises(ValueError, match="valid presets"):
        phi_preset("morrey", 2)
    with pytest.raises(ValueError):
        phi_preset("central")
    with pytest.raises(ValueError):
        PhiSpec((PhiSegment(None, Fraction(0), Fraction(1)),))


def test_phi_json_round_trip():
    phi = PhiSpec((PhiSegment(None, Fraction(1), Fraction(1, 2)), PhiSegment(-2, Fraction(3), Fraction(1, 4))))
    assert PhiSpec.from_json(phi.to_json()) == phi


def test_class_examples():
    c = phi_class_check(lebesgue(2), 2, 2)
    assert c.in_class and c.C_class == 1
    v = phi_class_check(power_phi(1), 2, 2)
    assert not v.in_class
    assert "-inf" in str(v.class_violation)
    e = phi_class_check(envelope(2), 2, 2)
    assert e.in_class and e.C_class == 1


def test_submult_examples():
    assert phi_submult_check(power_phi(Fraction(1, 3), 5), 2).C_sm == Fraction(1, 5)
    env = phi_submult_check(envelope(2), 2)
    assert not env.submultiplicative
    s, t = env.sm_witness
    assert s == -t
    two = PhiSpec((PhiSegment(None, Fraction(1), Fraction(1, 2)), PhiSegment(0, Fraction(1), Fraction(1, 4))))
    assert phi_submult_check(two, 2).submultiplicative


@given(st.sampled_from([Fraction(-1, 2), Fraction(0), Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2)]), R, Q)
def test_pure_power_class_iff(beta, r, q):
    assert phi_class_check(power_phi(beta), r, q).in_class == (0 <= beta <= 1 / r)


@st.composite
def piecewise_phis(draw):
    n = draw(st.integers(1, 3))
    starts = sorted(draw(st.lists(st.integers(-4, 4), min_size=n - 1, max_size=n - 1, unique=True)))
    betas = draw(st.lists(st.sampled_from([Fraction(0), Fraction(1, 4), Fraction(1, 3), Fraction(1, 2)]),
                          min_size=n, max_size=n))
    cs = draw(st.lists(st.sampled_from([Fraction(1, 2), Fraction(1), Fraction(2), Fraction(3)]), min_size=n,
                       max_size=n))
    segs = [PhiSegment(None, cs[0], betas[0])] + [PhiSegment(s, c, b) for s, c, b in zip(starts, cs[1:], betas[1:])]
    return PhiSpec(tuple(segs))


@settings(max_examples=60, deadline=None)
@given(piecewise_phis(), Q, R)
def test_class_constant_matches_brute_force(phi, q, r):
    cert = phi_class_check(phi, r, q)
    assume(cert.in_class)
    vals = [float(phi_eval(phi, k, q)) * (float(q) ** (k / float(r)) if k < 0 else 1.0) for k in range(-80, 81)]
    assert float(cert.C_class) == pytest.approx(max(vals), rel=1e-12)


@settings(max_examples=60, deadline=None)
@given(piecewise_phis(), Q)
def test_submult_constant_matches_brute_force(phi, q):
    cert = phi_submult_check(phi, q)
    assert cert.submultiplicative == (phi.beta_left >= phi.beta_right)
    if not cert.submultiplicative:
        n = 40
        assert float(phi_eval(phi, 0, q)) / (float(phi_eval(phi, -n, q)) * float(phi_eval(phi, n, q))) > 1e3 * float(
            phi_eval(phi, 0, q)) / (float(phi_eval(phi, -1, q)) * float(phi_eval(phi, 1, q))) or phi.beta_left < phi.beta_right
        return
    brute = max(float(phi_eval(phi, s + t, q)) / (float(phi_eval(phi, s, q)) * float(phi_eval(phi, t, q)))
                for s in range(-25, 26) for t in range(-25, 26))
    assert float(cert.C_sm) == pytest.approx(brute, rel=1e-12)


# -- norms ----------------------------------------------------------------------


def test_norm_examples():
    P = MorreyParams.make(2, 2, 1)
    n = morrey_norm(char_ball(0, 2), P)
    assert n.power == Fraction(2, 3)
    assert n.value == pytest.approx(math.sqrt(2 / 3))
    Pe = MorreyParams.make(2, 2, 1, "envelope")
    ne = morrey_norm(char_ball(0, 2), Pe)
    assert ne.power == Fraction(2, 3) and ne.argmax == 0
    assert morrey_norm(zero_function(2), P).value == 0


def test_char_ball_bound_example():
    P = MorreyParams.make(2, 2, 1)
    cert = phi_certificate(P.phi, 2, 2)
    assert char_ball_norm_bound(0, P, cert) == pytest.approx(math.sqrt(2 / 3))
    with pytest.raises(ValueError):
        char_ball_norm_bound(0, P, phi_certificate(power_phi(1), 2, 2))


@st.composite
def radials(draw, q):
    lo = draw(st.integers(-4, 4))
    vals = draw(st.lists(st.integers(0, 6).map(lambda v: Fraction(v, 2)), min_size=1, max_size=5))
    lower = (Fraction(draw(st.integers(1, 3))), Fraction(draw(st.integers(2, 3)))) if draw(st.booleans()) else None
    upper = (Fraction(draw(st.integers(1, 3))), Fraction(draw(st.integers(-2, 0)))) if draw(st.booleans()) else None
    return from_sequence(q, lo, vals, lower=lower, upper=upper)


PHIS = st.sampled_from(["lebesgue", "envelope", "central(4)", "central(2)"])


def _params(q, r, alpha, phi):
    return MorreyParams.make(q, r, alpha, phi)


def brute_norm(f, P, span=150):
    """Max of the terms over a long k range, W_k from explicit sphere sums."""
    q, r, a = P.q, float(P.r), float(P.alpha)
    ls = np.arange(-span - 60, span + 60)
    mass = np.array([abs(float(f(int(l)))) ** r * float(q) ** (-l * (a + 1)) * (1 - 1 / q) for l in ls])
    suffix = np.cumsum(mass[::-1])[::-1]
    best = 0.0
    for i, k in enumerate(ls):
        if abs(k) > span:
            continue
        term = float(phi_eval(P.phi, int(k), q)) ** r * float(q) ** k * suffix[i]
        best = max(best, term)
    return best ** (1 / r)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_norm_matches_brute_force(data):
    q, r, a, phi = data.draw(Q), data.draw(R), data.draw(ALPHA), data.draw(PHIS)
    f = data.draw(radials(q))
    P = _params(q, r, a, phi)
    try:
        n = morrey_norm(f, P)
    except NonIntegrable:
        return
    assume(not n.infinite)
    b = brute_norm(f, P)
    # the brute sup over a finite range can only undershoot a limit at -inf
    assert b <= float(n.value) * (1 + 1e-9)
    assert b == pytest.approx(float(n.value), rel=1e-6)
    if n.argmax is not None:
        assert float(morrey_term(f, P, n.argmax)) == pytest.approx(float(n.value), rel=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_norm_homogeneity_triangle_monotone(data):
    q, r, a, phi = data.draw(Q), data.draw(R), data.draw(ALPHA), data.draw(PHIS)
    P = _params(q, r, a, phi)
    f = data.draw(radials(q))
    g = from_sequence(q, data.draw(st.integers(-4, 4)), data.draw(st.lists(st.integers(0, 4).map(Fraction), min_size=1,
                                                                            max_size=4)))
    try:
        nf = morrey_norm(f, P)
    except NonIntegrable:
        return
    assume(not nf.infinite)
    ng = morrey_norm(g, P)
    c = Fraction(data.draw(st.integers(1, 5)), 2)
    assert float(morrey_norm(scale(f, c), P).value) == pytest.approx(float(c) * float(nf.value), rel=1e-12)
    nfg = morrey_norm(add(f, g), P)
    assert float(nfg.value) <= (float(nf.value) + float(ng.value)) * (1 + 1e-12)
    assert float(nf.value) <= float(nfg.value) * (1 + 1e-12)  # f <= f + g


def _log(x):
    x = abs(Fraction(x))
    return math.log(x.numerator) - math.log(x.denominator)


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_lebesgue_norm_is_weighted_integral(data):
    q, r, a = data.draw(Q), data.draw(R), data.draw(ALPHA)
    f = data.draw(radials(q))
    P = _params(q, r, a, "lebesgue")
    try:
        n = morrey_norm(f, P)
    except NonIntegrable:
        return
    logs = [float(r) * _log(f(l)) - l * float(a + 1) * math.log(q) for l in range(-400, 400) if f(l)]
    if any(x > 700 for x in logs):
        assert n.infinite
        return
    total = math.fsum(math.exp(x) * (1 - 1 / q) for x in logs)
    if n.infinite:
        assert total > 1e6 or not f.lower.is_zero()
        return
    assert float(n.power) == pytest.approx(total, rel=1e-9)


def test_bracket_membership_and_norms():
    P = MorreyParams.make(2, 2, 1)
    assert bracket_membership(Fraction(11, 10), 2, 1) and not bracket_membership(1, 2, 1)
    assert not morrey_norm(japanese_bracket(Fraction(11, 10), 2), P).infinite
    assert morrey_norm(japanese_bracket(Fraction(1, 2), 2), P).infinite
    assert morrey_norm(japanese_bracket(1, 2), P).infinite


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_batch_norm_agrees_with_exact(data):
    q, r, a, phi = data.draw(Q), data.draw(R), data.draw(ALPHA), data.draw(PHIS)
    P = _params(q, r, a, phi)
    lo = data.draw(st.integers(-4, 3))
    vals = data.draw(st.lists(st.integers(0, 4).map(Fraction), min_size=1, max_size=5))
    ls = Fraction(data.draw(st.integers(1, 3))) if data.draw(st.booleans()) else None
    us = Fraction(data.draw(st.integers(-3, 0))) if data.draw(st.booleans()) else None
    lc = Fraction(data.draw(st.integers(1, 2))) if ls is not None else 0
    uc = Fraction(data.draw(st.integers(1, 2))) if us is not None else 0
    f = from_sequence(q, lo, vals, lower=(lc, ls) if ls is not None else None,
                      upper=(uc, us) if us is not None else None)
    layout = BatchLayout(q, lo, len(vals), ls, us)
    try:
        exact = morrey_norm(f, P)
    except NonIntegrable:
        with pytest.raises(NonIntegrable):
            morrey_norm_batch([[float(v) for v in vals]], [float(lc)], [float(uc)], layout, P)
        return
    got = morrey_norm_batch([[float(v) for v in vals]], [float(lc)], [float(uc)], layout, P)[0]
    if exact.infinite:
        assert math.isinf(got)
    else:
        assert got == pytest.approx(float(exact.value), rel=1e-9, abs=1e-300)


def test_params_validation():
    with pytest.raises(ValueError):
        MorreyParams.make(2, Fraction(1, 2), 1)
    with pytest.raises(ValueError):
        MorreyParams.make(2, 2, 0)
    assert MorreyParams.make(2, 2, 0, allow_zero_alpha=True).alpha == 0
