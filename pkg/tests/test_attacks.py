import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latgauss.attacks import (
    AttackParams,
    LweFamily,
    LweInstance,
    SisInstance,
    check_hypothesis,
    classical_dual_attack,
    dual_kernel,
    dual_scores,
    draw_family_instance,
    exact_norm_le,
    gen_lwe,
    lambda1_primal,
    periodic_scores,
    quantum_dual_attack_qram,
    quantum_dual_attack_sampler,
    sample_dual_vectors,
    sampler_mean_scores,
    sis_config,
    sis_success_probability,
    solve_sis,
    third_distance_check,
)
from latgauss.errors import HypothesisViolated, NoSolutionInSupport, ParamConstraint
from latgauss.gaussian import GaussianParams
from latgauss.lattice import gram_schmidt_qr
from latgauss.qsim import max_find_bounded_error
from latgauss.samplers import KleinConfig


def test_gen_lwe_consistency():
    inst = gen_lwe(8, 4, 2, 17, 1.2, np.random.default_rng(0))
    assert np.array_equal(inst.b_vector, (inst.a_matrix @ inst.secret + inst.error) % 17)
    assert inst.num_candidates == 17**2
    assert inst.candidate(inst.candidate_index(inst.s_guess)).tolist() == inst.s_guess.tolist()
    again = gen_lwe(8, 4, 2, 17, 1.2, np.random.default_rng(0))
    assert np.array_equal(inst.a_matrix, again.a_matrix) and np.array_equal(inst.error, again.error)
    assert LweInstance.from_json(inst.to_json()).to_json() == inst.to_json()


def test_gen_lwe_noiseless_limit():
    zero = sum(not gen_lwe(8, 4, 2, 17, 0.01, np.random.default_rng(s)).error.any() for s in range(1000))
    assert zero >= 999


def test_gen_lwe_rejects_bad_params():
    with pytest.raises(ParamConstraint):
        gen_lwe(8, 4, 2, 16, 1.0, np.random.default_rng(0))
    with pytest.raises(ParamConstraint):
        gen_lwe(3, 4, 2, 17, 1.0, np.random.default_rng(0))


def test_params_tau():
    p = AttackParams(sigma=0.55, m=8)
    assert p.tau == pytest.approx(math.sqrt(8 / (2 * math.pi)) / 0.55)
    assert p.eta == pytest.approx(p.delta / 100)
    with pytest.raises(ParamConstraint):
        AttackParams(sigma=0.0, m=8)


def test_dual_vectors_in_kernel():
    inst = gen_lwe(8, 4, 2, 17, 1.2, np.random.default_rng(1))
    W, stats = sample_dual_vectors(inst, AttackParams(0.55, 8), np.random.default_rng(2), count=50)
    assert not np.any((W @ inst.a_dual) % 17)
    assert stats.accepts == 50


@pytest.mark.parametrize("seed", range(20))
def test_fft_matches_direct(seed):
    rng = np.random.default_rng(seed)
    inst = gen_lwe(6, 3, 2, 11, 1.0, rng)
    W = rng.integers(-5, 6, size=(30, 6))
    assert np.allclose(dual_scores(inst, W, "fft"), dual_scores(inst, W, "direct"), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_scores_even_in_shift(seed):
    # cos is even, so the score of b - A t equals that of -(b - A t)
    rng = np.random.default_rng(seed)
    inst = gen_lwe(5, 2, 1, 7, 1.0, rng)
    W = rng.integers(-3, 4, size=(10, 5))
    flipped = LweInstance(inst.a_matrix, (-inst.b_vector) % 7, (-inst.secret) % 7, -inst.error, 1, 7, 1.0)
    s, f = dual_scores(inst, W), dual_scores(flipped, W)
    idx = [(-i) % 7 for i in range(7)]
    assert np.allclose(s, f[idx])


def test_classical_noiseless():
    rng = np.random.default_rng(4)
    inst = gen_lwe(8, 4, 2, 17, 0.01, rng)
    W, _ = sample_dual_vectors(inst, AttackParams(0.55, 8), rng, count=400)
    assert np.array_equal(classical_dual_attack(inst, W), inst.s_guess)


def test_family_classical_and_qram():
    fam = LweFamily()
    params = fam.params()
    wins_c = wins_q = 0
    for t in range(10):
        rng = np.random.default_rng([3, t])
        inst, _ = draw_family_instance(fam, params, "qram", rng)
        assert check_hypothesis(inst, params, "classical").holds
        W, _ = sample_dual_vectors(inst, params, rng)
        wins_c += np.array_equal(classical_dual_attack(inst, W, params, "fft"), inst.s_guess)
        wins_q += np.array_equal(quantum_dual_attack_qram(inst, W, params, rng).s_guess, inst.s_guess)
    assert wins_c >= 9 and wins_q >= 8


def test_exact_score_max_find_matches_classical():
    rng = np.random.default_rng(5)
    inst, _ = draw_family_instance(LweFamily(), LweFamily().params(), "classical", rng)
    W, _ = sample_dual_vectors(inst, LweFamily().params(), rng)
    true = dual_scores(inst, W)
    pad = np.concatenate([true, np.full(512 - len(true), -np.inf)])
    res = max_find_bounded_error(lambda i: pad[i], 9, 5, rng, reference_scores=pad)
    assert np.array_equal(inst.candidate(res.index), classical_dual_attack(inst, W))


def test_hypothesis_report():
    rng = np.random.default_rng(6)
    inst = gen_lwe(8, 4, 2, 17, 0.01, rng)
    rep = check_hypothesis(inst, AttackParams(0.55, 8), "sampler")
    assert rep.lambda1 == lambda1_primal(inst.a_matrix, 17)
    assert rep.error_norm == 0
    assert not check_hypothesis(inst, AttackParams(0.05, 8), "classical").holds
    with pytest.raises(ParamConstraint):
        check_hypothesis(inst, AttackParams(0.55, 8), "bogus")


def small_instance(seed, noise=0.01):
    return gen_lwe(3, 2, 1, 7, noise, np.random.default_rng(seed))


def test_sampler_attack_literal_pipeline():
    params = AttackParams(1.0, 3, box_exp=3)
    wins = 0
    for s in range(10):
        inst = small_instance(s)
        means, model = sampler_mean_scores(inst, params)
        assert model.literal and model.tv_bound < 0.01
        res = quantum_dual_attack_sampler(inst, params, np.random.default_rng(s), enforce_hypothesis=False)
        wins += np.array_equal(res.s_guess, inst.s_guess)
    assert wins >= 9


def test_sampler_means_track_periodic_gaussian():
    inst = small_instance(2)
    params = AttackParams(1.0, 3, box_exp=3)
    means, model = sampler_mean_scores(inst, params)
    assert np.max(np.abs(means - periodic_scores(inst, params))) <= 2 * model.tv_bound


def test_sampler_attack_hypothesis_violated():
    inst = small_instance(0)
    with pytest.raises(HypothesisViolated) as exc:
        quantum_dual_attack_sampler(inst, AttackParams(0.1, 3, box_exp=3), np.random.default_rng(0))
    assert exc.value.result is not None


def test_third_distance_on_family():
    fam = LweFamily()
    params = fam.params()
    inst, _ = draw_family_instance(fam, params, "sampler", np.random.default_rng(7))
    rep = third_distance_check(inst, params)
    assert rep.checked == 8 and rep.holds


def test_kernel_of_dual_block():
    inst = gen_lwe(8, 4, 2, 17, 1.0, np.random.default_rng(8))
    K = dual_kernel(inst)
    assert K.basis.determinant() == 17**2


SIS = SisInstance(np.array([[1, 1]]), 3, math.inf, 1)


def test_sis_probability_value():
    p = sis_success_probability(SIS, sis_config(SIS, 1.5, 3))
    assert p == pytest.approx(0.10879, abs=5e-5)


@pytest.mark.parametrize("mode", ["classical", "quantum-sim"])
def test_sis_solutions_valid(mode):
    cfg = sis_config(SIS, 1.5, 3)
    for s in range(50):
        res = solve_sis(SIS, cfg, mode, np.random.default_rng(s))
        assert SIS.is_solution(res.x)
        assert abs(res.x[0]) == 1 and res.x[0] == -res.x[1]


def test_sis_large_bound_accepts_first_nonzero():
    inst = SisInstance(np.array([[1, 1]]), 3, math.inf, 100)
    cfg = sis_config(inst, 1.5, 3)
    p = sis_success_probability(inst, cfg)
    from latgauss.samplers import target_pmf_exact

    tab = target_pmf_exact(cfg)
    d0 = tab.mass[np.all(tab.coords == 0, axis=1)].sum()
    assert p == pytest.approx(1 - d0, abs=1e-12)


def test_sis_no_solution():
    inst = SisInstance(np.array([[1, 1]]), 3, 2.0, 0.5)
    with pytest.raises(NoSolutionInSupport):
        solve_sis(inst, sis_config(inst, 1.5, 3), "classical", np.random.default_rng(0))


def test_exact_norm():
    assert exact_norm_le([1, -1], math.inf, 1) == 1
    assert exact_norm_le([0, 0], 2, 5) == 0
    assert exact_norm_le([3, 4], 2, 5) == 1
    assert exact_norm_le([3, 4], 1, 6.9) == 0
