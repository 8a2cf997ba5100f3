import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from localmorrey.bounds import (BUILTIN_CONDITION, dilation_bound, divergence_witness, hlp_finiteness,
                                main_bound_constant, partial_sum)
from localmorrey.kernels import KernelSpec, TailDescriptor, hardy, hilbert, hlp

Q = st.sampled_from([2, 3, 5])
FINITE = [(r, a) for r in (Fraction(3, 2), Fraction(2), Fraction(3), Fraction(4))
          for a in (Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(3, 2)) if a + 1 < r]


def test_hlp_value():
    # u = 2^(-1/4), v = 2^(-1/4): (1/2)(1 + 2 u/(1-u))
    u = 2 ** -0.25
    want = 0.5 * (1 + 2 * u / (1 - u))
    got = main_bound_constant(hlp(), 2, Fraction(1, 2), 2)
    assert got.finite and got.mode == "closed-form"
    assert float(got.value) == pytest.approx(want, rel=1e-14)
    assert float(got.value) == pytest.approx(5.785213507883244, rel=1e-12)
    assert partial_sum(hlp(), 2, Fraction(1, 2), 2, 400) == pytest.approx(want, rel=1e-12)


def test_hardy_value_against_series():
    got = main_bound_constant(hardy(), 3, 1, 3)
    assert float(got.value) == pytest.approx(partial_sum(hardy(), 3, 1, 3, 200), rel=1e-12)


@settings(deadline=None)
@given(Q, st.sampled_from(FINITE), st.sampled_from([hardy, hlp]))
def test_closed_form_matches_partial_sums(q, ra, kernel):
    r, a = ra
    spec = kernel()
    got = float(main_bound_constant(spec, r, a, q).value)
    n = 40
    while float(q) ** (n * max(float((a + 1) / r - 1), float(-a / r))) > 1e-18:
        n += 40
    assert got == pytest.approx(partial_sum(spec, r, a, q, n), rel=1e-11)


@settings(deadline=None)
@given(Q, st.sampled_from(FINITE))
def test_hilbert_truncation_error_is_certified(q, ra):
    r, a = ra
    res = main_bound_constant(hilbert(), r, a, q, tol=1e-10)
    assert res.mode == "truncated" and res.tail_bound < 1e-10
    longer = partial_sum(hilbert(), r, a, q, res.truncation_terms + 400)
    assert 0 <= longer - float(res.value) <= res.tail_bound * (1 + 1e-9) + 1e-13


@pytest.mark.parametrize("kernel", [hardy, hlp, hilbert])
def test_infinite_at_threshold(kernel):
    res = main_bound_constant(kernel(), 2, 1, 2)
    assert not res.finite and math.isinf(res.value)
    assert res.finiteness_condition == BUILTIN_CONDITION == "alpha+1<r"


def test_finiteness_examples():
    assert hlp_finiteness(2, Fraction(1, 2))
    assert not hlp_finiteness(2, 1)
    assert not hlp_finiteness(Fraction(3, 2), Fraction(1, 2))
    with pytest.raises(ValueError):
        hlp_finiteness(1, 1)


@given(Q, st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(1), Fraction(2)]),
       st.sampled_from([Fraction(3, 2), Fraction(2), Fraction(5, 2), Fraction(3), Fraction(5)]))
def test_finite_iff_condition(q, a, r):
    for kernel in (hardy, hlp, hilbert):
        assert main_bound_constant(kernel(), r, a, q).finite == (a + 1 < r)


@given(Q, st.sampled_from([Fraction(1, 4), Fraction(1, 2), Fraction(1)]))
def test_hardy_nonincreasing_in_r(q, a):
    rs = [r for r in (Fraction(5, 2), Fraction(3), Fraction(4), Fraction(6)) if a + 1 < r]
    vals = [float(main_bound_constant(hardy(), r, a, q).value) for r in rs]
    assert all(x >= y for x, y in zip(vals, vals[1:]))


def test_dilation_bound_examples():
    assert dilation_bound(2, 2, 1, 1, 2) == 4
    assert dilation_bound(-2, 2, 1, 1, 2) == Fraction(1, 2)
    assert dilation_bound(0, 2, 1, 3, 2) == 3
    with pytest.raises(ValueError):
        dilation_bound(0, 2, 1, -1, 2)


def test_divergence_witness_at_threshold():
    w = divergence_witness(hlp(), 2, 1, 2)
    assert w["diverges"]
    assert w["partial_before"] <= 1e6 < w["partial_at_terms"]
    # the explicit series agrees with the witness at a smaller threshold
    small = divergence_witness(hlp(), 2, 1, 2, threshold=100)
    n = small["terms"]
    assert partial_sum(hlp(), 2, 1, 2, n) == pytest.approx(small["partial_at_terms"], rel=1e-12)
    assert partial_sum(hlp(), 2, 1, 2, n - 1) <= 100 < partial_sum(hlp(), 2, 1, 2, n)


def test_no_divergence_when_finite():
    assert not divergence_witness(hardy(), 3, 1, 2)["diverges"]


def test_custom_tables():
    with pytest.raises(ValueError):
        main_bound_constant(KernelSpec("t", 0, (Fraction(1),), None, TailDescriptor(0, 0)), 3, 1, 2)
    # the one-entry table equal to the Hardy profile gives the Hardy constant
    t = KernelSpec("t", 0, (Fraction(1),), TailDescriptor(1, 0), TailDescriptor(0, 0))
    assert float(main_bound_constant(t, 3, 1, 2).value) == pytest.approx(
        float(main_bound_constant(hardy(), 3, 1, 2).value), rel=1e-13)
    loose = KernelSpec("t", 0, (Fraction(1),), TailDescriptor(1, 0, exact=False), TailDescriptor(1, -2, exact=False))
    res = main_bound_constant(loose, 3, 1, 2)
    assert res.mode == "upper-bound" and res.finite
