import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latgauss.errors import PhiOutOfRange, RatioOutOfRange, ZeroGoodAmplitude
from latgauss.gaussian import DistributionTable, GaussianParams, periodic_gaussian
from latgauss.lattice import gram_schmidt_qr
from latgauss.qsim import (
    QueryLedger,
    amplitude_error_bound,
    amplitude_estimate,
    amplitude_transduce,
    fixed_point_length,
    fixed_point_success,
    max_find_bounded_error,
    mean_estimate,
    prepare_klein_state,
    qaa_iterations,
    qaa_project,
    quantum_gaussian_pipeline,
    sample_pipeline_calls,
    sim_good_amplitude,
)
from latgauss.samplers import KleinConfig, klein_pmf_exact, omega_table, target_pmf_exact


@pytest.fixture
def one_dim():
    return KleinConfig(gram_schmidt_qr([[1]]), GaussianParams(1.0, 0.0, 2))


def test_ledger_only_grows():
    led = QueryLedger()
    led.add("prep", 3)
    led.add("prep")
    assert led["prep"] == 4 and led["other"] == 0
    with pytest.raises(ValueError):
        led.add("prep", -1)


def test_klein_state_fidelity(one_dim):
    st_ = prepare_klein_state(one_dim, 40)
    exact = np.sqrt(klein_pmf_exact(one_dim).mass)
    fid = abs(np.vdot(exact, st_.amps)) ** 2 / st_.norm_check
    assert fid >= 1 - 1e-10


def test_klein_state_rounding(one_dim):
    st_ = prepare_klein_state(one_dim, 4)
    exact = np.sqrt(klein_pmf_exact(one_dim).mass)
    assert np.max(np.abs(st_.amps - exact)) <= 2.0**-4
    assert abs(st_.norm_check - 1) <= st_.norm_bound()


def test_transduce_identity_and_zero(one_dim):
    st_ = prepare_klein_state(one_dim, 20)
    ones = amplitude_transduce(st_, lambda c: np.ones(len(c)), 20)
    good = ones.amps[ones.flags == 0]
    assert np.max(np.abs(good - st_.amps)) <= 2.0**-20
    zeros = amplitude_transduce(st_, np.zeros(st_.support_size), 20)
    assert zeros.good_mass() == 0
    with pytest.raises(RatioOutOfRange):
        amplitude_transduce(st_, np.full(st_.support_size, 1.5), 20)


def test_transduce_gives_target(ref_basis):
    cfg = KleinConfig(ref_basis, GaussianParams(2.0, 0.0, 2))
    nu = 30
    tab = omega_table(cfg)
    st_ = prepare_klein_state(cfg, nu)
    out = amplitude_transduce(st_, np.exp(np.minimum(tab.log_accept, 0)), nu)
    good = out.amps[out.flags == 0]
    target = np.sqrt(target_pmf_exact(cfg).mass)
    w = math.exp(tab.log_w)
    assert np.max(np.abs(good - target / math.sqrt(w))) <= cfg.n * 2.0**-nu


def test_qaa_examples():
    assert sim_good_amplitude(0.5 ** 2, 1) == pytest.approx(1.0, abs=1e-15)
    assert qaa_iterations(1.0) == 0
    assert sim_good_amplitude(1.0, 0) == 1.0
    with pytest.raises(ZeroGoodAmplitude):
        qaa_iterations(0.0)


@settings(max_examples=200, deadline=None)
@given(st.floats(0, 1), st.integers(0, 60))
def test_qaa_matches_formula(a, k):
    assert abs(sim_good_amplitude(a, k) - math.sin((2 * k + 1) * math.asin(math.sqrt(a)))) <= 1e-12


def test_qaa_project_modes(ref_basis):
    cfg = KleinConfig(ref_basis, GaussianParams(2.0, 0.0, 2))
    tab = omega_table(cfg)
    st_ = amplitude_transduce(prepare_klein_state(cfg, 30), np.exp(np.minimum(tab.log_accept, 0)), 30)
    led = QueryLedger()
    res = qaa_project(st_, None, "known-amplitude", led)
    assert res.success_probability >= 0.5
    assert led["prep"] == res.iterations + 1 and led["prep_inverse"] == res.iterations
    exp = qaa_project(st_, None, "exponential", QueryLedger(), np.random.default_rng(0))
    assert exp.success
    fp = qaa_project(st_, None, "fixed-point", QueryLedger(), delta=0.01)
    assert fp.success_probability >= 1 - 0.01**2 - 1e-12


@settings(max_examples=50, deadline=None)
@given(st.floats(0.01, 1.0), st.floats(0.01, 0.5))
def test_fixed_point_guarantee(p, delta):
    L = fixed_point_length(delta, p)
    assert L % 2 == 1
    assert fixed_point_success(p, delta, L) >= 1 - delta**2 - 1e-9


def test_amplitude_estimate_edges():
    rng = np.random.default_rng(0)
    assert np.all(amplitude_estimate(0.0, 8, rng, size=100) == 0)
    assert np.allclose(amplitude_estimate(1.0, 8, rng, size=100), 1)


def test_amplitude_estimate_failure_rate():
    est = amplitude_estimate(0.3, 12, np.random.default_rng(1), size=10_000)
    fail = np.mean(np.abs(est - 0.3) > amplitude_error_bound(0.3, 12))
    assert fail <= 1 - 8 / math.pi**2 + 0.03


def test_mean_estimate_examples():
    rng = np.random.default_rng(2)
    for _ in range(20):
        assert abs(mean_estimate(np.full(4, 0.25), np.ones(4), 0.05, 0.05, rng=rng) - 1) <= 0.05
        x = np.arange(4)
        assert abs(mean_estimate(np.full(4, 0.25), np.cos(2 * math.pi * x / 4), 0.05, 0.05, rng=rng)) <= 0.05
    with pytest.raises(PhiOutOfRange):
        mean_estimate(np.full(2, 0.5), np.array([0.0, 2.0]), 0.1, 0.1, rng=rng)


def test_mean_estimate_periodic_benchmark():
    k = np.arange(-16, 17)
    mass = np.exp(-math.pi * k**2)
    gamma = 1 - mass.sum() / math.fsum(np.exp(-math.pi * np.arange(-200, 201) ** 2.0))
    dist = DistributionTable(k[:, None], k[:, None], mass / mass.sum())
    f = periodic_gaussian(gram_schmidt_qr([[1]]), 1.0, [0.5])
    rng = np.random.default_rng(3)
    for _ in range(20):
        assert abs(mean_estimate(dist, lambda d: np.cos(math.pi * d.vectors[:, 0]), 0.05, 0.01, rng=rng) - f) <= 0.05 + 2 * gamma


def test_max_find_two_points():
    res = max_find_bounded_error(lambda i: [1.0, 5.0][i], 1, 3, np.random.default_rng(0))
    assert res.index == 1


def test_max_find_ties_lowest_index():
    scores = np.array([1.0, 3.0, 3.0, 0.0])
    for s in range(20):
        assert max_find_bounded_error(lambda i: scores[i], 2, 3, np.random.default_rng(s)).index == 1


def test_max_find_faulty_large_noise():
    wins = 0
    for t in range(200):
        rng = np.random.default_rng([1, t])
        scores = rng.permutation(256).astype(float)

        def fn(i):
            return scores[i] + (rng.choice([-1000.0, 1000.0]) if rng.random() < 0.1 else 0.0)

        wins += max_find_bounded_error(fn, 8, 5, rng, reference_scores=scores).index == int(np.argmax(scores))
    assert wins / 200 >= 1 - 1 / 32 - 0.05


def test_pipeline_distances(ref_basis):
    cfg = KleinConfig(ref_basis, GaussianParams(2.0, 0.0, 2))
    res = quantum_gaussian_pipeline(cfg, 12)
    assert res.tv_to_omega <= 2.0**-12
    assert res.tv_to_lattice + res.tv_to_lattice_slack <= res.bound(12)
    calls = sample_pipeline_calls(res, np.random.default_rng(0), 1000)
    assert calls.min() >= res.iterations + 1
    assert calls.mean() == pytest.approx(res.expected_forward_calls, rel=0.1)
