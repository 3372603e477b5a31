import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from robust_kelly.moments import gauss_legendre, moment, moment_table
from robust_kelly.uncertainty import make_uncertainty_set

from conftest import psets, random_pset


@pytest.mark.parametrize("order", range(1, 25))
def test_gauss_legendre_matches_numpy(order):
    x, w = gauss_legendre(order)
    ref_x, ref_w = np.polynomial.legendre.leggauss(order)
    np.testing.assert_allclose(x, ref_x, atol=1e-14, rtol=0)
    np.testing.assert_allclose(w, ref_w, atol=1e-14, rtol=0)


def test_gauss_legendre_exact_for_degree(order=6):
    x, w = gauss_legendre(order)
    for deg in range(2 * order):
        exact = 0.0 if deg % 2 else 2.0 / (deg + 1)
        assert np.dot(w, x**deg) == pytest.approx(exact, abs=1e-14)


def test_gauss_legendre_read_only():
    x, _ = gauss_legendre(3)
    with pytest.raises(ValueError):
        x[0] = 1.0


def test_unit_interval_moments(unit):
    assert moment(unit, 0, 0) == pytest.approx(1.0, abs=1e-15)
    assert moment(unit, 1, 1) == pytest.approx(1 / 6, abs=1e-15)


def test_example_two_moments(example2):
    assert moment(example2, 1, 0) == pytest.approx(0.42, abs=1e-15)
    assert moment(example2, 0, 1) == pytest.approx(0.28, abs=1e-15)


def test_table_unit_interval(unit):
    t1 = moment_table(unit, 1)
    assert len(t1) == 3
    assert t1[0, 0] == pytest.approx(1.0)
    assert t1[1, 0] == pytest.approx(0.5)
    assert t1[0, 1] == pytest.approx(0.5)
    t2 = moment_table(unit, 2)
    assert t2[2, 0] == pytest.approx(1 / 3, abs=1e-15)
    assert t2[1, 1] == pytest.approx(1 / 6, abs=1e-15)
    assert t2[0, 2] == pytest.approx(1 / 3, abs=1e-15)


def test_table_example_two_against_antiderivative(example2):
    t = moment_table(example2, 3)
    assert t[1, 0] == pytest.approx(0.42, abs=1e-15)
    assert t[0, 1] == pytest.approx(0.28, abs=1e-15)
    assert t[2, 0] == pytest.approx((0.95**3 - 0.25**3) / 3, abs=1e-15)
    # (1-p)^3 antiderivative
    assert t[0, 3] == pytest.approx((0.75**4 - 0.05**4) / 4, abs=1e-15)


def test_rejects_negative_exponent(unit):
    with pytest.raises(ValueError):
        moment(unit, -1, 0)
    with pytest.raises(ValueError):
        moment_table(unit, 0)


@given(psets(), st.integers(1, 14))
def test_pascal_identity(p, n):
    t = moment_table(p, n)
    for a in range(n):
        for b in range(n - a):
            assert t[a, b] == pytest.approx(t[a + 1, b] + t[a, b + 1], rel=1e-12)


@given(psets(), st.integers(1, 10))
def test_table_entries_positive_and_bounded(p, n):
    t = moment_table(p, n)
    assert t[0, 0] == pytest.approx(p.measure, rel=1e-14)
    for v in t.values.values():
        assert 0.0 < v <= p.measure * (1 + 1e-14)


@given(psets(), st.integers(0, 12), st.integers(0, 12))
def test_additive_over_components(p, a, b):
    parts = [make_uncertainty_set([iv]) for iv in p.intervals]
    assert moment(p, a, b) == pytest.approx(sum(moment(q, a, b) for q in parts), rel=1e-13, abs=1e-300)


def test_table_matches_single_moments(rng):
    p = random_pset(rng)
    t = moment_table(p, 9)
    for (a, b), v in t.values.items():
        assert v == pytest.approx(moment(p, a, b), rel=1e-13)


@settings(max_examples=40, deadline=None)
@given(psets(), st.integers(0, 20), st.integers(0, 20))
def test_agrees_with_trapezoid(p, a, b):
    if a + b > 20:
        b = 20 - a
    total = 0.0
    for lo, hi in p.intervals:
        x = np.linspace(lo, hi, 100_001)
        total += np.trapezoid(x**a * (1 - x) ** b, x)
    assert moment(p, a, b) == pytest.approx(total, abs=1e-9)


@given(psets(), st.integers(2, 12))
def test_holder_moment_inequality(p, n):
    t = moment_table(p, n)
    assert t[n - 1, 0] * t[1, 0] < t[0, 0] * t[n, 0]
