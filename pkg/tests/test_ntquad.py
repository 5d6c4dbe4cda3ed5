from collections import Counter
from itertools import product
from math import comb, pi

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qsearchnet import ntquad as nq
from qsearchnet import spinalg as sa


@pytest.mark.parametrize("M,l", [(1, 1), (1, 3), (2, 2), (3, 3), (4, 2)])
def test_weights_count_compositions(M, l):
    # Phi(M,l,k) is the number of ways to write k as a sum of l integers in [-M, M]
    counts = Counter(sum(c) for c in product(range(-M, M + 1), repeat=l))
    w = nq.weights(M, l)
    ks = np.arange(-M * l, M * l + 1)
    assert [counts[int(k)] for k in ks] == w.tolist()
    assert w.sum() == (2 * M + 1) ** l
    assert w.dtype == np.int64


def test_weights_errors():
    with pytest.raises(ValueError):
        nq.weights(0, 2)
    with pytest.raises(OverflowError):
        nq.weights(100, 10)


def test_default_omega():
    w = nq.default_omega(3)
    assert np.allclose(w, [np.sqrt(2) - 1, np.sqrt(3) - 1, np.sqrt(5) - 2])


def test_rule_properties():
    r = nq.build([0.3, 0.7], 2, 3)
    assert r.dim == 2 and r.norm == 125 and r.point_count() == 13
    assert r.points().shape == (13, 2)
    assert r.reflected().omega == (-0.3, -0.7)
    assert r.scaled_weights().sum() == pytest.approx(1)
    with pytest.raises(ValueError):
        nq.build([], 2, 2)
    with pytest.raises(ValueError):
        nq.build([np.inf], 2, 2)


def test_rule_on_single_mode_is_ratio_power():
    r = nq.build(nq.default_omega(2), 3, 2)
    m = np.array([1, -2])
    val = nq.integrate(lambda y: np.exp(-2j * pi * (m @ y)), r)
    x = float(m @ np.asarray(r.omega))
    assert val == pytest.approx(nq.sine_ratio(x, 3) ** 2, abs=1e-14)


@settings(max_examples=60, deadline=None)
@given(x=st.floats(0.001, 0.999), M=st.integers(1, 20))
def test_ratio_forms_agree(x, M):
    d = nq.dirichlet_ratio(x, M)
    assert nq.sine_ratio(x, M) == pytest.approx(d, abs=1e-9)
    assert nq.chebyshev_ratio(x, M) == pytest.approx(d, abs=1e-9)
    # the ratio is even and 1-periodic
    assert nq.sine_ratio(-x, M) == pytest.approx(d, abs=1e-9)
    assert nq.chebyshev_ratio(x + 3, M) == pytest.approx(d, abs=1e-8)


def test_distance_to_integer():
    assert np.allclose(nq.distance_to_integer([0.2, 0.8, -1.3, 2.0]), [0.2, 0.2, 0.3, 0.0])


def test_integrate_array_valued_and_dimension_check():
    r = nq.build([0.41], 4, 2)
    out = nq.integrate(lambda y: np.array([1.0, np.cos(2 * pi * y[0])]), r)
    assert out.shape == (2,)
    assert out[0] == pytest.approx(1)
    with pytest.raises(ValueError):
        nq.integrate(lambda y: 1.0, r, dim=2)


def _random_sum(rng, n, terms):
    ms = rng.integers(-3, 4, size=(terms, n))
    cs = rng.normal(size=terms) + 1j * rng.normal(size=terms)
    return [(tuple(m), c) for m, c in zip(ms, cs)]


@pytest.mark.parametrize("n", [1, 2, 3, 4, 5])
def test_error_functional_exact(n, rng):
    for _ in range(4):
        coeffs = _random_sum(rng, n, int(rng.integers(1, 31)))
        r = nq.build(nq.default_omega(n), int(rng.choice([4, 8, 16])), int(rng.choice([2, 3])))
        lhs = nq.integrate(nq.fourier_sum(coeffs), r) - nq.exact_integral(coeffs)
        assert abs(lhs - nq.error_functional(coeffs, r)) <= 1e-12
        assert abs(lhs - nq.error_functional(coeffs, r, "chebyshev")) <= 1e-12


def test_error_functional_errors():
    r = nq.build([0.5, 0.25], 2, 2)
    with pytest.raises(ValueError):
        nq.error_functional([((2, 0), 1.0)], r)
    with pytest.raises(ValueError):
        nq.error_functional([((1,), 1.0)], r)
    with pytest.raises(ValueError):
        nq.error_functional([((1, 0), 1.0)], r, form="cosine")


def test_error_below_distance_bound(rng):
    # |sin(pi x)| >= 2 <x> gives |D_M(x)| <= 1 / (2 (2M+1) <x>)
    coeffs = _random_sum(rng, 3, 20)
    w = nq.default_omega(3)
    for M, l in ((4, 2), (8, 3), (16, 2)):
        r = nq.build(w, M, l)
        cap = sum(abs(c) * (1 / (2 * (2 * M + 1) * nq.distance_to_integer(np.dot(m, w)))) ** l
                  for m, c in coeffs if any(m))
        assert abs(nq.error_functional(coeffs, r)) <= cap


def test_integer_vectors():
    v = nq.integer_vectors(2, 1)
    assert len(v) == 8
    assert len(nq.integer_vectors(3, 2)) == 5**3 - 1
    zq = nq.constrained_vectors(3, "zero-quantum")
    assert np.all(zq.sum(axis=1) == 0) and len(zq) == 6
    with pytest.raises(ValueError):
        nq.constrained_vectors(2, "none")


def test_estimate_b_brute_force():
    w = nq.default_omega(3)
    best = min(nq.distance_to_integer(np.dot(m, w)) * np.prod(np.maximum(1, np.abs(m)))
               for m in product(range(-2, 3), repeat=3) if any(m))
    assert nq.estimate_b(w, 1.0, "all", max_entry=2) == pytest.approx(best)
    assert nq.estimate_b([0.3], 1.0, "zero-quantum") == float("inf")
    with pytest.raises(ValueError):
        nq.estimate_b(w, 0.5)
    with pytest.raises(ValueError):
        nq.estimate_b(w, 1.0, n=4)


def test_zero_quantum_pair_count():
    # pairs (r, t) with r != t and m(r, t) zero-quantum number C(2n,n) - 2^n
    for n in (2, 3, 4):
        r = nq.build(nq.default_omega(n), 2, 2)
        mult, _ = nq._pair_terms(r, True)
        assert mult.sum() == comb(2 * n, n) - 2**n
        mult_all, _ = nq._pair_terms(r, False)
        assert mult_all.sum() == 4**n - 2**n


def test_bounds_ordering():
    r = nq.build(nq.default_omega(3), 8, 3)
    b_h1 = nq.estimate_b(r.omega, 1.0, "h1")
    b_zq = nq.estimate_b(r.omega, 1.0, "zero-quantum")
    assert nq.bound_eq70(r) <= nq.bound_eq72(r, b_h1)
    assert nq.bound_eq78a(r, pi / 2) <= nq.bound_eq78b(r, pi / 2, b_zq)
    r1 = nq.build(nq.default_omega(1), 8, 3)
    assert nq.bound_eq78a(r1, 1.0) == 0.0
    assert nq.bound_eq78b(r1, 1.0, float("inf")) == 0.0


def test_bound_eq78b_formula():
    r = nq.build(nq.default_omega(3), 8, 3)
    b = 0.1
    expect = 0.5 * 0.7 * np.sqrt(comb(6, 3) - 8) * (1 / (2 * 17 * b)) ** 3
    assert nq.bound_eq78b(r, 0.7, b) == pytest.approx(expect)


@pytest.mark.parametrize("n", [2, 3])
def test_bound_report_not_violated(n, rng):
    rule = nq.build(nq.default_omega(n), 8, 3)
    for j in range(1, n + 1):
        s = sa.unity_from_index(int(rng.integers(0, 2**n)), n)
        rep = nq.bound_report(s, j, rule, pi / 2)
        assert not rep.violated
        assert rep.measured_error <= rep.bound_eq78a <= rep.bound_eq78b
        assert rep.measured_integration_error <= rep.bound_eq70
        d = rep.to_dict()
        assert set(d) >= {"measured_error", "bound_eq70", "bound_eq72", "bound_eq78b", "b_estimate", "a"}
