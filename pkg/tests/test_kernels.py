import json
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from localmorrey.harness import direct_operator_value
from localmorrey.kernels import (DigitFunction, KernelSpec, OperatorDivergence, TailDescriptor, apply_operator,
                                 builtin_kernel, hardy, hilbert, hlp, homogeneity_check, identity_kernel,
                                 kernel_profile, radialize)
from localmorrey.radial import (add, char_ball, char_sphere, dilate, from_sequence, japanese_bracket, same_function,
                                scale, zero_function)

Q = st.sampled_from([2, 3, 5])


def test_profile_examples():
    assert kernel_profile(hardy(), 0, 2) == 1
    assert kernel_profile(hardy(), 1, 2) == 0
    assert kernel_profile(hardy(), -3, 2) == 1
    assert kernel_profile(hlp(), 3, 2) == Fraction(1, 8)
    assert kernel_profile(hlp(), -3, 2) == 1
    assert kernel_profile(hilbert(), 0, 2) == Fraction(1, 2)


@given(Q, st.integers(-12, 12))
def test_profile_matches_raw_kernel(q, j):
    for spec in (hardy(), hlp(), hilbert()):
        assert float(kernel_profile(spec, j, q)) == pytest.approx(spec.raw(1.0, float(q) ** j), rel=1e-14)


def test_homogeneity_check():
    for spec in (hardy(), hlp(), hilbert()):
        assert homogeneity_check(spec.raw, 2)["pass"]
    bad = homogeneity_check(lambda s, t: 1 / (s * s + t * t), 2)
    assert not bad["pass"]
    assert bad["degree"] != pytest.approx(-1, abs=0.1)


def test_unknown_kernel_lists_presets():
    with pytest.raises(ValueError, match="hardy"):
        builtin_kernel("riesz")


def test_apply_examples():
    assert same_function(apply_operator(hardy(), char_ball(0, 2)), japanese_bracket(1, 2))
    g = apply_operator(hlp(), char_ball(0, 2))
    assert g(0) == 1
    assert g(1) == Fraction(3, 2)
    assert same_function(apply_operator(hlp(), zero_function(2)), zero_function(2))


@given(Q, st.integers(-4, 4))
def test_identity_kernel_scales(q, eta):
    # k_j = [j = 0] leaves only the w_0 = 1 - 1/q term
    f = char_ball(eta, q)
    assert same_function(apply_operator(identity_kernel(), f), scale(f, 1 - Fraction(1, q)))


@st.composite
def radials(draw, q):
    lo = draw(st.integers(-3, 3))
    vals = draw(st.lists(st.integers(0, 4).map(Fraction), min_size=1, max_size=4))
    upper = (Fraction(draw(st.integers(1, 2))), Fraction(draw(st.integers(-2, -1)))) if draw(st.booleans()) else None
    return from_sequence(q, lo, vals, upper=upper)


KERNELS = st.sampled_from([hardy, hlp])


@settings(max_examples=40, deadline=None)
@given(st.data())
def test_linear_positive_and_shift_commuting(data):
    q = data.draw(Q)
    spec = data.draw(KERNELS)()
    f, g = data.draw(radials(q)), data.draw(radials(q))
    c = Fraction(data.draw(st.integers(0, 4)), 3)
    tf, tg = apply_operator(spec, f), apply_operator(spec, g)
    lhs = apply_operator(spec, add(scale(f, c), g))
    l = data.draw(st.integers(-3, 3))
    tdf = apply_operator(spec, dilate(f, l))
    for m in range(-8, 9):
        assert lhs(m) == c * tf(m) + tg(m)
        assert tf(m) >= 0
        assert tdf(m) == tf(m + l)


@settings(max_examples=25, deadline=None)
@given(st.data())
def test_matches_direct_definition(data):
    q = data.draw(Q)
    spec = data.draw(st.sampled_from([hardy, hlp, hilbert]))()
    lo = data.draw(st.integers(-3, 3))
    f = from_sequence(q, lo, data.draw(st.lists(st.integers(0, 4).map(Fraction), min_size=1, max_size=4)))
    g = apply_operator(spec, f)
    for m in range(lo - 4, lo + 8):
        want = direct_operator_value(spec, f, m)
        assert float(g(m)) == pytest.approx(want, rel=1e-9, abs=1e-300)


def test_hilbert_ball_value_and_remainder():
    g = apply_operator(hilbert(), char_ball(0, 2))
    assert float(g(0)) == pytest.approx(direct_operator_value(hilbert(), char_ball(0, 2), 0), rel=1e-10)
    assert g.remainder is not None and set(g.remainder) >= {"lower", "upper"}


def test_divergence_names_sides():
    with pytest.raises(OperatorDivergence) as e:
        apply_operator(hlp(), from_sequence(2, 0, [1], lower=(1, 0)))  # constant 1: not summable
    assert set(e.value.sides) == {"kernel:upper", "function:lower"}


def test_kernel_json_round_trip():
    assert KernelSpec.from_json(hlp().to_json()).name == "hlp"
    spec = KernelSpec("table", -1, (Fraction(1), Fraction(1, 2)), TailDescriptor(1, 0), TailDescriptor(1, -2))
    back = KernelSpec.from_json(json.loads(json.dumps(spec.to_json())))
    assert back == spec
    with pytest.raises(ValueError):
        KernelSpec.from_json({"table": {"lo": 0, "hi": 3, "values": [1]}})
    with pytest.raises(ValueError):
        KernelSpec("bad", 0, (Fraction(-1),), None, None)


def test_table_kernel_reproduces_hardy():
    # k_j = 1 for j <= 0, 0 above: a one-entry table with exact tails
    table = KernelSpec("table", 0, (Fraction(1),), TailDescriptor(1, 0), TailDescriptor(0, 0))
    f = from_sequence(3, -1, [Fraction(2), Fraction(1)])
    assert same_function(apply_operator(table, f), apply_operator(hardy(), f))


# -- radialization ---------------------------------------------------------------


def test_radial_part_examples():
    lead = DigitFunction(2, (0, 0), (1.0,), ((0, 1, 1.0),))
    assert lead.radial_part()(0) == 2.0  # p = 2: the leading digit is always 1
    second = DigitFunction(3, (0, 0), (0.0 + 1,), ((1, 2, 1.0),))
    assert second.radial_part()(0) == pytest.approx(1 + 1 / 3)


def test_radialize_leading_digit():
    fn = DigitFunction(2, (0, 0), (0.0,), ())
    est = radialize(lambda x: float(x.digit(x.valuation) == 1), 2, (0, 0), 500, seed=1)
    assert est.function(0) == 1.0
    assert fn.radial_part()(0) == 0.0


@pytest.mark.parametrize("seed", [0, 1])
def test_radialize_second_digit(seed):
    est = radialize(lambda x: float(x.digit(x.valuation + 1) == 2), 3, (0, 0), 20000, seed=seed)
    assert abs(est.function(0) - 1 / 3) <= 4 * est.stderr[0]


def test_radialize_fixes_radial_functions():
    fn = DigitFunction(3, (-1, 1), (1.0, 2.0, 0.5))
    est = radialize(fn, 3, (-1, 1), 200, seed=4)
    assert [est.function(m) for m in (-1, 0, 1)] == [1.0, 2.0, 0.5]
    assert all(e == 0 for e in est.stderr)


def test_radialize_rejects_few_samples():
    with pytest.raises(ValueError):
        radialize(lambda x: 1.0, 2, (0, 0), 10, seed=0)


def test_batch_matches_pointwise():
    from localmorrey.field import sample_haar_batch
    fn = DigitFunction(3, (-1, 1), (1.0, 2.0, 0.5), ((0, 1, 0.5), (2, 0, -0.25)))
    smp = sample_haar_batch(3, -1, 6, 300, np.random.default_rng(0))
    got = fn.batch(smp)
    want = [fn(smp.element(i)) for i in range(300)]
    assert np.allclose(got, want)
