import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latgauss.gaussian import GaussianParams, c_const, tv_distance
from latgauss.lattice import gram_schmidt_qr
from latgauss.samplers import (
    KleinConfig,
    accepted_distribution,
    delta_ratio,
    klein_pmf_exact,
    klein_sample,
    klein_sample_batch,
    mcmc_distribution,
    mcmc_sample,
    mcmc_transition_matrix,
    omega_table,
    rejection_sample,
    rejection_sample_batch,
    target_pmf_exact,
    w_bound,
)


def half_away(x):
    return math.copysign(math.floor(abs(x) + 0.5), x)


def klein_mass_oracle(R, sigma, cprime, M, x):
    """Per-point Klein probability from the conditional-center recursion, written out directly."""
    n = len(x)
    h = 2**M
    total = 1.0
    for i in range(n - 1, -1, -1):
        xt = (cprime[i] - sum(R[i, j] * x[j] for j in range(i + 1, n))) / R[i, i]
        s = sigma / R[i, i]
        r = half_away(xt)
        if not r - h <= x[i] <= r + h:
            return 0.0
        norm = math.fsum(math.exp(-math.pi * (k - xt) ** 2 / s**2) for k in range(int(r) - h, int(r) + h + 1))
        total *= math.exp(-math.pi * (x[i] - xt) ** 2 / s**2) / norm
    return total


def empirical(coeffs, table):
    counts = Counter(map(tuple, coeffs.tolist()))
    idx = {tuple(c): i for i, c in enumerate(table.coords.tolist())}
    emp = np.zeros(len(table))
    for c, k in counts.items():
        emp[idx[c]] = k
    return emp / emp.sum()


def ref_cfg(ref_basis, M=2, sigma=2.0, center=0.0):
    return KleinConfig(ref_basis, GaussianParams(sigma, center, M))


def test_klein_pmf_product_formula(ref_basis):
    cfg = ref_cfg(ref_basis)
    tab = klein_pmf_exact(cfg)
    assert tab.check()
    R = ref_basis.r_factor
    for c, p in zip(tab.coords.tolist(), tab.mass):
        assert p == pytest.approx(klein_mass_oracle(R, 2.0, [0.0, 0.0], 2, c), abs=1e-12)


def test_klein_pmf_product_formula_shifted_center(ref_basis):
    c = [0.4, -1.3]
    cfg = ref_cfg(ref_basis, center=c)
    tab = klein_pmf_exact(cfg)
    cp = ref_basis.q_factor.T @ np.array(c)
    for x, p in zip(tab.coords.tolist(), tab.mass):
        assert p == pytest.approx(klein_mass_oracle(ref_basis.r_factor, 2.0, cp, 2, x), abs=1e-12)


def test_klein_concentrates_for_tiny_width():
    cfg = KleinConfig(gram_schmidt_qr([[1]]), GaussianParams(0.05, 0.0, 2))
    d = klein_sample_batch(cfg, np.random.default_rng(0), 10_000)
    assert np.mean(d.coeffs[:, 0] == 0) >= 0.999


def test_klein_empirical_tv(ref_basis):
    cfg = ref_cfg(ref_basis, M=4)
    d = klein_sample_batch(cfg, np.random.default_rng(1), 100_000)
    exact = klein_pmf_exact(cfg)
    assert tv_distance(empirical(d.coeffs, exact), exact.mass) <= 0.03


def test_klein_determinism(ref_basis):
    cfg = ref_cfg(ref_basis)
    a = klein_sample_batch(cfg, np.random.default_rng(9), 50).coeffs
    b = klein_sample_batch(cfg, np.random.default_rng(9), 50).coeffs
    assert np.array_equal(a, b)
    v, x = klein_sample(cfg, np.random.default_rng(9))
    assert np.allclose(v, ref_basis.matrix @ x)


def test_w_dominates_ratio(ref_basis):
    wb = w_bound(ref_cfg(ref_basis))
    assert wb.max_ratio <= wb.value * (1 + 1e-12)
    assert wb.exact_omega


def test_one_dimensional_w_is_c():
    cfg = KleinConfig(gram_schmidt_qr([[1]]), GaussianParams(1.3, 0.0, 4))
    assert w_bound(cfg).value == pytest.approx(c_const(4), rel=1e-12)
    assert np.allclose(omega_table(cfg).log_accept, -math.log(c_const(4)), atol=1e-12)
    # off-center the ratio is still constant, so every draw is accepted alike
    shifted = omega_table(KleinConfig(gram_schmidt_qr([[1]]), GaussianParams(1.3, 0.2, 4)))
    assert np.ptp(shifted.log_accept) <= 1e-12


def test_rejection_exact_distribution(ref_basis):
    cfg = ref_cfg(ref_basis)
    err = np.max(np.abs(accepted_distribution(cfg).mass - target_pmf_exact(cfg).mass))
    assert err <= 1e-12


def test_rejection_empirical(ref_basis):
    cfg = ref_cfg(ref_basis, M=4)
    d, stats, _ = rejection_sample_batch(cfg, np.random.default_rng(2), 100_000)
    target = target_pmf_exact(cfg)
    assert tv_distance(empirical(d.coeffs, target), target.mass) <= 0.03
    # mean trials per accepted sample is w
    assert stats.trials / stats.accepts == pytest.approx(w_bound(cfg).value, rel=0.1)


def test_rejection_single_draw(ref_basis):
    v, stats = rejection_sample(ref_cfg(ref_basis), np.random.default_rng(3))
    assert stats.accepts == 1 and stats.trials >= 1
    assert ref_basis.contains([int(round(t)) for t in v])


def test_mcmc_one_dimension_accepts():
    cfg = KleinConfig(gram_schmidt_qr([[1]]), GaussianParams(1.0, 0.0, 4))
    _, info = mcmc_sample(cfg, 200, np.random.default_rng(4))
    assert info["accepted"] >= 195


def test_mcmc_stationary(ref_basis):
    cfg = ref_cfg(ref_basis)
    P, tab = mcmc_transition_matrix(cfg)
    target = target_pmf_exact(cfg).mass
    assert np.allclose(target @ P, target, atol=1e-13)
    assert np.allclose(P.sum(axis=1), 1.0)
    far = mcmc_distribution(cfg, 200)
    assert tv_distance(far.mass, target) <= 1e-10


def test_delta_and_w_reciprocal():
    # w * Delta = C^m on Z^m when Omega holds essentially all the mass
    for m in (1, 2, 3):
        L = gram_schmidt_qr(np.eye(m, dtype=int).tolist())
        cfg = KleinConfig(L, GaussianParams(1.0, 0.0, 3))
        prod = w_bound(cfg).value * delta_ratio(L, 1.0)
        assert prod == pytest.approx(c_const(3) ** m, rel=1e-9)


bases = st.lists(st.lists(st.integers(-2, 2), min_size=2, max_size=2), min_size=2, max_size=2).filter(
    lambda B: round(abs(np.linalg.det(np.array(B, dtype=float)))) != 0
)


@settings(max_examples=30, deadline=None)
@given(bases, st.floats(0.4, 4.0), st.floats(-2, 2), st.floats(-2, 2))
def test_acceptance_ratio_at_most_one(B, s, c1, c2):
    cfg = KleinConfig(gram_schmidt_qr(B), GaussianParams(s, [c1, c2], 2))
    tab = omega_table(cfg)
    assert np.max(tab.log_accept) <= 1e-12
    assert abs(math.fsum(np.exp(tab.log_q)) - 1) <= 1e-12


@settings(max_examples=20, deadline=None)
@given(bases, st.floats(0.4, 4.0))
def test_rejection_exact_property(B, s):
    cfg = KleinConfig(gram_schmidt_qr(B), GaussianParams(s, 0.0, 2))
    assert np.max(np.abs(accepted_distribution(cfg).mass - target_pmf_exact(cfg).mass)) <= 1e-12
