import math
from itertools import product

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latgauss.errors import EmptySampleSet, ParamConstraint
from latgauss.gaussian import (
    GaussianParams,
    c_const,
    log_c_minus_one,
    distance_sandwich_check,
    finite_set_bounds,
    fourier_identity_check,
    log_periodic_gaussian,
    log_periodic_gaussian_many,
    periodic_gaussian,
    pointwise_approx_score,
    rho_interval,
    rho_lattice_box,
    rho_z,
    rho_z_bound,
    tail_bounds_check,
    truncation_tv,
)
from latgauss.lattice import gram_schmidt_qr
from latgauss.verify import finite_interval_counterexample

Z1 = gram_schmidt_qr([[1]])
Z2 = gram_schmidt_qr([[1, 0], [0, 1]])


def direct_1d(sigma, c, lo=-1000, hi=1000):
    k = np.arange(lo, hi + 1)
    return math.fsum(np.exp(-math.pi * (k - c) ** 2 / sigma**2))


def test_rho_interval_examples():
    assert rho_interval(GaussianParams(1.0, 0.0, 4), 0.0) >= 1
    assert rho_interval(GaussianParams(1.0, 0.0, 4), 0.0) == pytest.approx(direct_1d(1.0, 0.0, -16, 16), abs=1e-12)
    assert rho_interval(GaussianParams(3.0, 0.0, 4), 0.3) == pytest.approx(direct_1d(3.0, 0.3, -16, 16), abs=1e-12)


def test_rho_z_matches_direct_sum():
    for s in (0.3, 1.0, 2.5, 10.0):
        assert rho_z(s, 0.2) == pytest.approx(direct_1d(s, 0.2), rel=1e-12)


def test_rho_z_large_width_mpmath():
    s = 400.0
    exact = mpmath.jtheta(3, 0, mpmath.exp(-mpmath.pi / mpmath.mpf(s) ** 2))
    assert rho_z(s) == pytest.approx(float(exact), rel=1e-12)


def test_invalid_params():
    with pytest.raises(ParamConstraint):
        GaussianParams(0.0)
    with pytest.raises(ParamConstraint):
        GaussianParams(-1.0)
    with pytest.raises(ParamConstraint):
        GaussianParams(1.0, 0.0, 1)


def test_rho_lattice_box_examples():
    assert rho_lattice_box(Z1, GaussianParams(1.0), [(0, 0)]) == 1.0
    p = GaussianParams(1.0, 0.0, 3)
    assert rho_lattice_box(Z2, p, [(-8, 8)] * 2) == pytest.approx(rho_interval(p, 0.0) ** 2, abs=1e-10)
    L = gram_schmidt_qr([[1, 1], [0, 2]])  # columns (1,0), (1,2)
    oracle = 0.0
    for a, b in product(range(-8, 9), repeat=2):
        v = np.array([a + b, 2 * b])
        oracle += math.exp(-math.pi * (v @ v) / 4)
    assert rho_lattice_box(L, GaussianParams(2.0), [(-8, 8)] * 2) == pytest.approx(oracle, rel=1e-12)


def test_tail_bounds_one_dimension():
    rep = tail_bounds_check(Z1, GaussianParams(1.0, 0.3, 2))
    assert rep.all_hold


def test_klein_tail_unit_lattice_wide_gaussian():
    # the tail inequality for Z^2 at width 2, M = 3 does not hold; the bound
    # assumes width at most the shortest Gram-Schmidt norm
    rep = tail_bounds_check(Z2, GaussianParams(2.0, 0.0, 3))
    assert not rep.klein_tail.holds
    assert tail_bounds_check(Z2, GaussianParams(1.0, 0.0, 3)).klein_tail.holds


def test_finite_interval_counterexample():
    i, ii = finite_interval_counterexample()
    assert not i.holds and not ii.holds


@settings(max_examples=60, deadline=None)
@given(st.floats(0.05, 1.0), st.floats(-0.5, 0.5), st.integers(2, 5))
def test_finite_set_bounds_unit_regime(s, c, M):
    i, ii = finite_set_bounds(s, c, M)
    assert i.holds and ii.holds


@settings(max_examples=80, deadline=None)
@given(st.floats(1e-3, 1e4))
def test_rho_z_bound(s):
    assert rho_z_bound(s).holds


def test_c_constant():
    assert c_const(4) - 1 < 1e-20
    eps = 4 * math.sqrt(2 * math.pi * math.e) * math.exp(-16 * math.pi)
    assert log_c_minus_one(2) == pytest.approx(math.log(eps / (1 - eps)), rel=1e-12)


def test_periodic_examples():
    assert periodic_gaussian(Z2, 1.5, [3, -2]) == 1.0
    oracle = direct_1d(1.0, 0.5) / direct_1d(1.0, 0.0)
    assert periodic_gaussian(Z1, 1.0, [0.5]) == pytest.approx(oracle, abs=1e-9)


def test_fourier_examples():
    assert fourier_identity_check(Z1, 1.0, [0.0], [(-16, 16)]) <= 1e-8
    assert fourier_identity_check(Z1, 1.0, [0.5], [(-16, 16)]) <= 1e-8
    assert fourier_identity_check(gram_schmidt_qr([[2]]), 2.0, [0.7], [(-16, 16)]) <= 1e-8


def test_pointwise_score_examples():
    assert pointwise_approx_score([[0.0, 0.0]], [0.3, 0.7]) == 1.0
    assert pointwise_approx_score([[1, 2], [3, -1]], [0, 0]) == 1.0
    with pytest.raises(EmptySampleSet):
        pointwise_approx_score(np.zeros((0, 2)), [0, 0])


def test_pointwise_score_statistical():
    k = np.arange(-30, 31)
    mass = np.exp(-math.pi * k**2)
    mass /= mass.sum()
    f = periodic_gaussian(Z1, 1.0, [0.5])
    good = 0
    for t in range(100):
        W = np.random.default_rng(t).choice(k, size=200, p=mass)[:, None]
        good += abs(pointwise_approx_score(W, [0.5]) - f) <= 0.25
    assert good >= 95


def test_sandwich_examples():
    r = distance_sandwich_check(Z2, 2.0, [1, 1])
    assert r.distance == 0 and r.lower == 1.0 and r.f_value == 1.0
    r = distance_sandwich_check(Z1, 4.0, [0.5])
    assert r.lower_holds and r.upper_holds is not False
    r = distance_sandwich_check(Z2, 6.0, [0.5, 0.5])
    assert r.lower_holds and r.upper_holds is True


@settings(max_examples=40, deadline=None)
@given(st.floats(0.3, 3.0), st.floats(-0.5, 0.5))
def test_periodic_symmetric_and_monotone(s, x):
    a = periodic_gaussian(Z1, s, [x])
    assert a == pytest.approx(periodic_gaussian(Z1, s, [-x]), rel=1e-12)
    assert 0 < a <= 1
    # decreasing in |x| on [0, 1/2]
    assert periodic_gaussian(Z1, s, [abs(x) / 2]) >= a - 1e-12


def test_batched_periodic_matches_single():
    L = gram_schmidt_qr([[3, 1, 0], [0, 2, 1], [1, 0, 4]])
    xs = np.random.default_rng(3).uniform(-5, 5, size=(30, 3))
    many = log_periodic_gaussian_many(L, 1.3, xs)
    single = [log_periodic_gaussian(L, 1.3, x) for x in xs]
    assert np.allclose(many, single, atol=1e-10)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.5, 3.0), st.floats(-1, 1), st.floats(-1, 1))
def test_truncation_identity(s, c1, c2):
    L = gram_schmidt_qr([[2, 1], [0, 1]])
    tv = truncation_tv(L, GaussianParams(s, [c1, c2], 2))
    assert tv.tv_direct == pytest.approx(tv.tv_exact_identity, abs=1e-9)
