"""LWE and SIS instances, the three dual attacks and the sampling-based SIS solver.

Conventions: an LWE matrix ``A`` is ``m x n`` and split column-wise as
``[A_guess | A_dual]``; ``L_q(A)`` is generated by the columns of ``A`` and
``q Z^m``; the short dual vectors live in the kernel lattice of ``A_dual``
and are drawn at width ``q sigma``. Scores are
``(1/N) sum_j cos(2 pi <w_j, y> / q)`` with ``y = b - A_guess s``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import (
    EnumerationBudgetExceeded,
    HypothesisViolated,
    NoSolutionInSupport,
    ParamConstraint,
)
from .gaussian import GaussianParams, log_periodic_gaussian, log_periodic_gaussian_many, log_truncation_tail
from .lattice import DEFAULT_BUDGET, LatticeBasis, QaryLattice, lambda1_bruteforce, qary_basis, rank_mod_p
from .qsim import (
    QueryLedger,
    max_find_bounded_error,
    mean_estimate_from_value,
    quantum_gaussian_pipeline,
    qaa_iterations,
)
from .samplers import (
    KleinConfig,
    omega_inner_radius,
    omega_table,
    rejection_sample_batch,
    sample_integer_gaussian,
    w_bound,
)

CANDIDATE_BUDGET = 10**7


# --------------------------------------------------------------------------
# instances


@dataclass(frozen=True)
class LweInstance:
    a_matrix: np.ndarray  # m x n
    b_vector: np.ndarray
    secret: np.ndarray
    error: np.ndarray
    n_guess: int
    modulus: int
    noise_sigma: float

    def __post_init__(self):
        m, n = self.a_matrix.shape
        if not 0 <= self.n_guess <= n:
            raise ParamConstraint("n_guess must lie in [0, n]")
        if not np.array_equal(self.b_vector % self.modulus, (self.a_matrix @ self.secret + self.error) % self.modulus):
            raise ParamConstraint("b != A s + e mod q")

    @property
    def m(self) -> int:
        return self.a_matrix.shape[0]

    @property
    def n(self) -> int:
        return self.a_matrix.shape[1]

    @property
    def n_dual(self) -> int:
        return self.n - self.n_guess

    @property
    def a_guess(self) -> np.ndarray:
        return self.a_matrix[:, : self.n_guess]

    @property
    def a_dual(self) -> np.ndarray:
        return self.a_matrix[:, self.n_guess :]

    @property
    def s_guess(self) -> np.ndarray:
        return self.secret[: self.n_guess]

    @property
    def num_candidates(self) -> int:
        return self.modulus**self.n_guess

    def candidate(self, index: int) -> np.ndarray:
        return np.array(np.unravel_index(index, (self.modulus,) * self.n_guess), dtype=np.int64)

    def candidate_index(self, s_guess) -> int:
        return int(np.ravel_multi_index(tuple(int(v) % self.modulus for v in s_guess), (self.modulus,) * self.n_guess))

    def shifted_target(self, s_guess) -> np.ndarray:
        return (self.b_vector - self.a_guess @ np.asarray(s_guess, dtype=np.int64)) % self.modulus

    def to_json(self) -> dict:
        return {
            "modulus": self.modulus,
            "n_guess": self.n_guess,
            "noise_sigma": self.noise_sigma,
            "a_matrix": self.a_matrix.tolist(),
            "b_vector": self.b_vector.tolist(),
            "secret": self.secret.tolist(),
            "error": self.error.tolist(),
        }

    @classmethod
    def from_json(cls, d: dict) -> "LweInstance":
        return cls(
            np.array(d["a_matrix"], dtype=np.int64),
            np.array(d["b_vector"], dtype=np.int64),
            np.array(d["secret"], dtype=np.int64),
            np.array(d["error"], dtype=np.int64),
            int(d["n_guess"]),
            int(d["modulus"]),
            float(d["noise_sigma"]),
        )


def _is_prime(q: int) -> bool:
    return q >= 2 and all(q % d for d in range(2, math.isqrt(q) + 1))


def gen_lwe(m: int, n: int, n_guess: int, q: int, noise_sigma: float, rng: np.random.Generator) -> LweInstance:
    """Uniform full-rank ``A``, uniform secret, centered discrete Gaussian error."""
    if m < n:
        raise ParamConstraint("need m >= n")
    if not _is_prime(q):
        raise ParamConstraint(f"q = {q} is not prime")
    while True:
        A = rng.integers(0, q, size=(m, n))
        if rank_mod_p(A.tolist(), q) == n:
            break
    s = rng.integers(0, q, size=n)
    e = sample_integer_gaussian(noise_sigma, m, rng)
    b = (A @ s + e) % q
    return LweInstance(A.astype(np.int64), b.astype(np.int64), s.astype(np.int64), e.astype(np.int64), n_guess, q, float(noise_sigma))


@dataclass(frozen=True)
class SisInstance:
    a_matrix: np.ndarray  # n x m
    modulus: int
    norm_p: float
    length_bound: float

    def __post_init__(self):
        n, m = self.a_matrix.shape
        if not m >= n >= 1:
            raise ParamConstraint("need m >= n >= 1")
        if self.length_bound <= 0:
            raise ParamConstraint("length bound must be positive")
        if not (self.norm_p > 0):
            raise ParamConstraint("norm p must lie in (0, inf]")

    def kernel(self) -> QaryLattice:
        return qary_basis(self.a_matrix.T, self.modulus, "kernel")

    def is_solution(self, x) -> bool:
        """Exact check of ``A x = 0 mod q`` and ``0 < ||x||_p <= l``."""
        xi = [int(round(float(v))) for v in x]
        if any(abs(float(v) - xv) > 1e-9 for v, xv in zip(x, xi)):
            return False
        if any(int(r) % self.modulus for r in (np.asarray(self.a_matrix, dtype=object) @ np.array(xi, dtype=object))):
            return False
        return 0 < exact_norm_le(xi, self.norm_p, self.length_bound)


def exact_norm_le(x, p: float, bound: float) -> int:
    """``1`` if ``0 < ||x||_p <= bound``, else ``0``; exact for ``p`` in {1, 2, inf}."""
    x = [abs(int(v)) for v in x]
    if not any(x):
        return 0
    b = Fraction(bound)
    if math.isinf(p):
        return int(max(x) <= b)
    if p == 1:
        return int(sum(x) <= b)
    if p == 2:
        return int(sum(v * v for v in x) <= b * b)
    return int(sum(v**p for v in x) ** (1 / p) <= bound * (1 + 1e-12))


# --------------------------------------------------------------------------
# parameters and hypotheses


@dataclass(frozen=True)
class AttackParams:
    sigma: float
    m: int
    n_samples: int = 400
    eps: float = 0.05
    delta: float = 0.05
    eta1: float = 0.01
    eta2: float = 0.05
    eta: float | None = None  # mean-estimation accuracy of the qRAM attack; delta/100 by default
    k: int = 5  # max-finder confidence
    box_exp: int = 6  # Klein box exponent for the dual sampler
    tau: float = field(init=False)

    def __post_init__(self):
        if self.sigma <= 0:
            raise ParamConstraint("sigma must be positive")
        if min(self.eps, self.delta, self.eta1) <= 0 or self.eta2 < 0:
            raise ParamConstraint("tolerances must be positive (eta2 >= 0)")
        if self.n_samples < 1:
            raise ParamConstraint("need at least one dual sample")
        object.__setattr__(self, "tau", math.sqrt(self.m / (2 * math.pi)) / self.sigma)
        if self.eta is None:
            object.__setattr__(self, "eta", self.delta / 100)

    def check_tau(self) -> bool:
        return abs(self.tau - math.sqrt(self.m / (2 * math.pi)) / self.sigma) <= 1e-12


@dataclass(frozen=True)
class HypothesisReport:
    kind: str
    lambda1: float
    error_norm: float
    tau: float
    gap: float  # rho_{1/s}(e) - rho_{1/s}(lambda1 - ||e|| - tau)
    threshold: float
    holds: bool

    def __str__(self) -> str:
        return (
            f"{self.kind}: lambda1={self.lambda1:.4g}, |e|={self.error_norm:.4g}, tau={self.tau:.4g}, "
            f"gap={self.gap:.4g} vs threshold {self.threshold:.4g}"
        )


@lru_cache(maxsize=256)
def _lambda1_cached(a_bytes: bytes, shape: tuple, q: int) -> float:
    A = np.frombuffer(a_bytes, dtype=np.int64).reshape(shape)
    L = qary_basis(A, q, "primal").basis
    bound = float(min(np.linalg.norm(L.matrix, axis=0).min(), q))
    return lambda1_bruteforce(L, bound + 1e-9)


def lambda1_primal(A: np.ndarray, q: int) -> float:
    A = np.ascontiguousarray(A, dtype=np.int64)
    return _lambda1_cached(A.tobytes(), A.shape, q)


def rho_width(s: float, r: float) -> float:
    return math.exp(-math.pi * r * r / (s * s))


def check_hypothesis(inst: LweInstance, params: AttackParams, kind: str = "classical") -> HypothesisReport:
    """Numeric separation condition of the chosen attack.

    ``classical``: gap > 2 delta; ``qram``: gap > 2 delta + eta;
    ``sampler``: gap > 2 eps + 2 eta1 + eta2. In all cases also
    ``lambda1(L_q(A)) >= tau + ||e||``.
    """
    thresholds = {
        "classical": 2 * params.delta,
        "qram": 2 * params.delta + params.eta,
        "sampler": 2 * params.eps + 2 * params.eta1 + params.eta2,
    }
    if kind not in thresholds:
        raise ParamConstraint(f"unknown attack kind {kind!r}")
    lam = lambda1_primal(inst.a_matrix, inst.modulus)
    en = float(np.linalg.norm(inst.error))
    s = 1.0 / params.sigma
    far = lam - en - params.tau
    gap = rho_width(s, en) - (rho_width(s, far) if far >= 0 else 1.0)
    thr = thresholds[kind]
    return HypothesisReport(kind, lam, en, params.tau, gap, thr, bool(far >= 0 and gap > thr))


# --------------------------------------------------------------------------
# dual samples


def dual_kernel(inst: LweInstance) -> QaryLattice:
    return qary_basis(inst.a_dual, inst.modulus, "kernel")


def dual_sampler_config(inst: LweInstance, params: AttackParams) -> KleinConfig:
    L = dual_kernel(inst).basis
    return KleinConfig(L, GaussianParams(inst.modulus * params.sigma, 0.0, params.box_exp))


def sample_dual_vectors(inst: LweInstance, params: AttackParams, rng: np.random.Generator, count: int | None = None):
    """``N`` vectors of the kernel lattice of ``A_dual`` at width ``q sigma`` (Klein plus rejection)."""
    cfg = dual_sampler_config(inst, params)
    draws, stats, _ = rejection_sample_batch(cfg, rng, count or params.n_samples)
    return np.rint(draws.vectors).astype(np.int64), stats


def certified_truncation_tv(cfg: KleinConfig) -> float:
    """Upper bound on ``d_TV(D_{Omega,s}, D_{L,s})`` for a zero center, via a ball inside ``Omega``."""
    return math.exp(min(0.0, log_truncation_tail(cfg.basis, cfg.params.sigma, omega_inner_radius(cfg))))


# --------------------------------------------------------------------------
# scores


def dual_scores(inst: LweInstance, W: np.ndarray, method: str = "direct") -> np.ndarray:
    """``(1/N) sum_j cos(2 pi w_j^T (b - A_guess s) / q)`` for every candidate, in index order."""
    q, ng = inst.modulus, inst.n_guess
    if inst.num_candidates > CANDIDATE_BUDGET:
        raise EnumerationBudgetExceeded(inst.num_candidates, CANDIDATE_BUDGET)
    W = np.asarray(W, dtype=np.int64)
    N = len(W)
    wb = (W @ inst.b_vector) % q
    u = (W @ inst.a_guess) % q  # (N, n_guess)
    if method == "fft":
        T = np.zeros((q,) * ng, dtype=complex)
        np.add.at(T, tuple(u.T), np.exp(2j * math.pi * wb / q))
        return np.real(np.fft.fftn(T)).ravel() / N
    if method != "direct":
        raise ParamConstraint(f"unknown scoring method {method!r}")
    cands = np.array(np.unravel_index(np.arange(inst.num_candidates), (q,) * ng)).T  # (C, n_guess)
    out = np.empty(len(cands))
    for start in range(0, len(cands), 4096):
        c = cands[start : start + 4096]
        phase = (wb[None, :] - c @ u.T) % q
        out[start : start + 4096] = np.cos(2 * math.pi * phase / q).mean(axis=1)
    return out


def classical_dual_attack(inst: LweInstance, W: np.ndarray, params: AttackParams | None = None, method: str = "direct") -> np.ndarray | None:
    """Exhaustive search over all guesses; the last maximal candidate wins, as with ``S >= S_max``."""
    scores = dual_scores(inst, W, method)
    if not np.isfinite(scores).any():
        return None
    best = len(scores) - 1 - int(np.argmax(scores[::-1]))
    return inst.candidate(best)


def _pad_bits(count: int) -> int:
    return max(1, math.ceil(math.log2(count)))


@dataclass
class QuantumAttackResult:
    s_guess: np.ndarray
    index: int
    ledger: QueryLedger
    hypothesis: HypothesisReport | None = None


def _estimated_score_fn(true_scores: np.ndarray, eps: float, delta: float, rng, ledger: QueryLedger, names: tuple, prep_cost: float = 1.0):
    """Score oracle returning a simulated mean estimate of each true mean; padding scores are -inf."""
    count = len(true_scores)

    def score(i: int) -> float:
        if i >= count:
            return -math.inf
        return mean_estimate_from_value(float(true_scores[i]), eps, delta, ledger, rng, prep_cost, names)

    return score


def quantum_dual_attack_qram(
    inst: LweInstance, W: np.ndarray, params: AttackParams, rng: np.random.Generator, ledger: QueryLedger | None = None
) -> QuantumAttackResult:
    """Scores estimated to ``eta`` with failure rate 1/10 from a lookup table on ``W``; argmax by bounded-error max finding."""
    led = ledger if ledger is not None else QueryLedger()
    true = dual_scores(inst, W)
    fn = _estimated_score_fn(true, params.eta, 0.1, rng, led, ("o_w", "o_w_inverse", "phi"))
    ell = _pad_bits(len(true))
    ref = np.concatenate([true, np.full(2**ell - len(true), -np.inf)])
    res = max_find_bounded_error(fn, ell, params.k, rng, led, reference_scores=ref)
    idx = min(res.index, len(true) - 1)
    return QuantumAttackResult(inst.candidate(idx), idx, led)


def periodic_scores(inst: LweInstance, params: AttackParams) -> np.ndarray:
    """``f_{L_q(A_dual), 1/sigma}(b - A_guess s)`` for every candidate."""
    L = qary_basis(inst.a_dual, inst.modulus, "primal").basis
    ys = np.array([inst.shifted_target(inst.candidate(i)) for i in range(inst.num_candidates)])
    return np.exp(log_periodic_gaussian_many(L, 1.0 / params.sigma, ys))


@dataclass
class SamplerPipelineModel:
    """Expected cost of one Gaussian-state preparation and the mean it yields."""

    forward_calls: float
    w: float
    tv_bound: float
    literal: bool


def _sampler_model(cfg: KleinConfig, nu: int, budget: int) -> tuple[SamplerPipelineModel, object]:
    if cfg.omega_size <= budget:
        res = quantum_gaussian_pipeline(cfg, nu, budget)
        tv = res.tv_to_lattice + res.tv_to_lattice_slack
        return SamplerPipelineModel(res.expected_forward_calls, res.w, tv, True), res
    wb = w_bound(cfg, audit=False, budget=budget)
    k = qaa_iterations(1 / math.sqrt(wb.value))
    ps = math.sin((2 * k + 1) * math.asin(1 / math.sqrt(wb.value))) ** 2
    tv = 2.0**-nu + certified_truncation_tv(cfg)
    return SamplerPipelineModel((k + 1) / ps, wb.value, tv, False), None


def sampler_mean_scores(inst: LweInstance, params: AttackParams, nu: int = 20, budget: int = 10**6) -> tuple[np.ndarray, SamplerPipelineModel]:
    """Mean of ``cos(2 pi <y, w>/q)`` under the simulated sampler for every candidate ``y``.

    When ``Omega`` is enumerable the simulated pipeline distribution is used
    directly. Otherwise the mean under the exact lattice Gaussian is used,
    which by the Fourier identity is the periodic Gaussian of ``L_q(A_dual)``;
    the sampler's certified distance to that Gaussian is reported so the
    substitution error (at most twice that distance) can be checked against
    ``eta1``.
    """
    cfg = dual_sampler_config(inst, params)
    model, res = _sampler_model(cfg, nu, budget)
    if res is None:
        return periodic_scores(inst, params), model
    V = np.rint(res.coords @ cfg.basis.matrix.T).astype(np.int64)
    q = inst.modulus
    out = np.empty(inst.num_candidates)
    for i in range(inst.num_candidates):
        y = inst.shifted_target(inst.candidate(i))
        out[i] = math.fsum(res.probs * np.cos(2 * math.pi * ((V @ y) % q) / q))
    return out, model


def quantum_dual_attack_sampler(
    inst: LweInstance,
    params: AttackParams,
    rng: np.random.Generator,
    ledger: QueryLedger | None = None,
    nu: int = 20,
    enforce_hypothesis: bool = True,
) -> QuantumAttackResult:
    """Scores by quantum mean estimation over the simulated Gaussian-state sampler; no lookup table.

    Mean estimation uses accuracy ``eps`` and failure rate ``1/(20 q^m)``.
    Raises ``HypothesisViolated`` (after running) when the numeric
    separation condition fails and ``enforce_hypothesis`` is set.
    """
    led = ledger if ledger is not None else QueryLedger()
    rep = check_hypothesis(inst, params, "sampler")
    means, model = sampler_mean_scores(inst, params, nu)
    delta = 1.0 / (20 * inst.modulus**inst.m)
    fn = _estimated_score_fn(means, params.eps, delta, rng, led, ("gs", "gs_inverse", "phi"), model.forward_calls)
    ell = _pad_bits(len(means))
    ref = np.concatenate([means, np.full(2**ell - len(means), -np.inf)])
    res = max_find_bounded_error(fn, ell, params.k, rng, led, reference_scores=ref)
    idx = min(res.index, len(means) - 1)
    out = QuantumAttackResult(inst.candidate(idx), idx, led, rep)
    if enforce_hypothesis and not rep.holds:
        err = HypothesisViolated(rep)
        err.result = out
        raise err
    return out


@dataclass(frozen=True)
class SeparationReport:
    f_error: float
    worst_other: float
    margin: float  # f(e) - eps - eta1 - (max f(e + x) + eps + eta1)
    holds: bool
    checked: int


def third_distance_check(inst: LweInstance, params: AttackParams, box: int = 1) -> SeparationReport:
    """``f(e) - eps - eta1 > f(e + x) + eps + eta1 + eta2`` over ``x = A_guess t mod q``, ``t != 0`` in a box.

    Every ``x`` is in ``L_q(A) \\ L_q(A_dual)`` because ``A`` has full rank.
    """
    L = qary_basis(inst.a_dual, inst.modulus, "primal").basis
    s = 1.0 / params.sigma
    e = inst.error.astype(float)
    f_e = math.exp(log_periodic_gaussian(L, s, e))
    worst, checked = 0.0, 0
    rng_box = range(-box, box + 1)
    for t in np.array(np.meshgrid(*[rng_box] * inst.n_guess)).reshape(inst.n_guess, -1).T:
        if not t.any():
            continue
        x = (inst.a_guess @ t) % inst.modulus
        worst = max(worst, math.exp(log_periodic_gaussian(L, s, e + x)))
        checked += 1
    slack = params.eps + params.eta1
    margin = (f_e - slack) - (worst + slack + params.eta2)
    return SeparationReport(f_e, worst, margin, margin > 0, checked)


# --------------------------------------------------------------------------
# SIS


@dataclass
class SisResult:
    x: np.ndarray
    coeffs: np.ndarray
    p_exact: float
    repetitions: int
    forward_calls: int
    ledger: QueryLedger


def sis_good_mask(inst: SisInstance, vectors: np.ndarray) -> np.ndarray:
    return np.array([bool(exact_norm_le(v, inst.norm_p, inst.length_bound)) for v in np.rint(vectors).astype(np.int64).tolist()])


def sis_success_probability(inst: SisInstance, cfg: KleinConfig, budget: int = DEFAULT_BUDGET) -> float:
    """``p = sum_x D_{Omega,sigma}(x) f(x)`` over the enumerated table."""
    tab = omega_table(cfg, budget)
    mask = sis_good_mask(inst, tab.vectors)
    return math.fsum(np.exp(tab.log_target)[mask])


def solve_sis(
    inst: SisInstance,
    cfg: KleinConfig,
    mode: str,
    rng: np.random.Generator,
    ledger: QueryLedger | None = None,
    budget: int = DEFAULT_BUDGET,
) -> SisResult:
    """Short kernel vector by repeated Gaussian sampling (classical) or amplified sampling (quantum-sim)."""
    led = ledger if ledger is not None else QueryLedger()
    tab = omega_table(cfg, budget)
    mask = sis_good_mask(inst, tab.vectors)
    target = np.exp(tab.log_target)
    p = math.fsum(target[mask])
    if p <= 0:
        raise NoSolutionInSupport("no vector of the enumerated support satisfies the norm bound")
    if mode == "classical":
        reps = 0
        while True:
            d, stats, _ = rejection_sample_batch(cfg, rng, 1, chunk=64, w=float("nan"))
            reps += 1
            led.add("gaussian_sample")
            led.add("klein", stats.trials)
            v = d.vectors[0]
            if exact_norm_le(np.rint(v).astype(np.int64), inst.norm_p, inst.length_bound):
                x = np.rint(v).astype(np.int64)
                if not inst.is_solution(x):
                    raise AssertionError("sampled vector is not in the kernel lattice")
                return SisResult(x, d.coeffs[0], p, reps, reps, led)
    if mode in ("quantum-sim", "quantum"):
        theta = math.asin(math.sqrt(p))
        k = qaa_iterations(math.sqrt(p))
        ps = math.sin((2 * k + 1) * theta) ** 2
        reps = 0
        while True:
            reps += 1
            led.add("prep", k + 1)
            led.add("prep_inverse", k)
            led.add("grover_iterates", k)
            if rng.random() < ps:
                break
        good = np.flatnonzero(mask)
        w_good = target[good] / target[good].sum()
        i = int(good[np.searchsorted(np.cumsum(w_good), rng.random() * w_good.sum(), side="right").clip(max=len(good) - 1)])
        x = np.rint(tab.vectors[i]).astype(np.int64)
        if not inst.is_solution(x):
            raise AssertionError("amplified vector fails the exact check")
        return SisResult(x, tab.coeffs[i], p, reps, reps * (k + 1), led)
    raise ParamConstraint(f"unknown SIS mode {mode!r}")


def sis_config(inst: SisInstance, sigma: float, box_exp: int = 3) -> KleinConfig:
    return KleinConfig(inst.kernel().basis, GaussianParams(sigma, 0.0, box_exp))


def basis_summary(L: LatticeBasis) -> dict:
    return {"columns": [[str(v) for v in col] for col in L.columns], "gs_norms": [float(g) for g in L.gs_norms]}


# --------------------------------------------------------------------------
# seeded toy families


@dataclass(frozen=True)
class LweFamily:
    m: int = 8
    n: int = 4
    n_guess: int = 2
    modulus: int = 17
    noise_sigma: float = 1.2
    attack_sigma: float = 0.55
    n_samples: int = 400

    def params(self, **kw) -> AttackParams:
        return AttackParams(sigma=self.attack_sigma, m=self.m, n_samples=self.n_samples, **kw)



def draw_family_instance(family: LweFamily, params: AttackParams, kind: str, rng: np.random.Generator, max_tries: int = 10_000) -> tuple[LweInstance, int]:
    """First instance of the family whose separation hypothesis holds; returns it with the number of draws."""
    for tries in range(1, max_tries + 1):
        inst = gen_lwe(family.m, family.n, family.n_guess, family.modulus, family.noise_sigma, rng)
        if check_hypothesis(inst, params, kind).holds:
            return inst, tries
    raise HypothesisViolated(f"no instance satisfied the {kind} hypothesis in {max_tries} draws")


def run_attack(kind: str, inst: LweInstance, params: AttackParams, rng: np.random.Generator, method: str = "fft") -> dict:
    """Run one attack and report the recovered guess, success and query counts."""
    ledger = QueryLedger()
    if kind == "classical":
        W, _ = sample_dual_vectors(inst, params, rng)
        guess = classical_dual_attack(inst, W, params, method)
        ledger.add("dual_samples", len(W))
    elif kind == "qram":
        W, _ = sample_dual_vectors(inst, params, rng)
        ledger.add("dual_samples", len(W))
        guess = quantum_dual_attack_qram(inst, W, params, rng, ledger).s_guess
    elif kind == "sampler":
        guess = quantum_dual_attack_sampler(inst, params, rng, ledger).s_guess
    else:
        raise ParamConstraint(f"unknown attack {kind!r}")
    return {
        "attack": kind,
        "recovered": [int(v) for v in guess],
        "truth": [int(v) for v in inst.s_guess],
        "success": bool(np.array_equal(guess, inst.s_guess)),
        "error_norm": float(np.linalg.norm(inst.error)),
        "calls": ledger.as_dict(),
    }
