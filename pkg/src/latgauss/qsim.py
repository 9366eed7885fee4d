"""Amplitude-level simulation of the quantum subroutines.

States are sparse: an array of basis coordinates, an ancilla flag per entry,
and complex amplitudes. Amplitude amplification is simulated on the
two-dimensional good/bad subspace, which is exact because every Grover
iterate preserves it. Oracle calls are counted in a ``QueryLedger``:
forward state preparations (``prep``) and inverse ones (``prep_inverse``)
are tracked separately.
"""

from __future__ import annotations

import csv
import io
import math
from collections import Counter
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable

import numpy as np
from scipy.special import logsumexp

from .errors import ParamConstraint, PhiOutOfRange, RatioOutOfRange, ZeroGoodAmplitude
from .gaussian import DistributionTable, outside_klein_space, tv_distance
from .lattice import DEFAULT_BUDGET
from .samplers import KleinConfig, OmegaTable, omega_table


class QueryLedger:
    """Nondecreasing per-oracle call counters."""

    def __init__(self):
        self._counts: Counter = Counter()

    def add(self, name: str, n: int = 1) -> None:
        if n < 0:
            raise ValueError("ledger counters only grow")
        self._counts[name] += int(n)

    def __getitem__(self, name: str) -> int:
        return self._counts.get(name, 0)

    def merge(self, other: "QueryLedger") -> None:
        self._counts.update(other._counts)

    def reset(self) -> None:
        self._counts.clear()

    def as_dict(self) -> dict[str, int]:
        return dict(self._counts)

    def __repr__(self) -> str:
        return f"QueryLedger({dict(self._counts)})"


def _ledger(ledger: QueryLedger | None) -> QueryLedger:
    return ledger if ledger is not None else QueryLedger()


def round_amplitudes(a: np.ndarray, nu: int) -> np.ndarray:
    """Round real and imaginary parts to ``nu`` fractional bits."""
    scale = 2.0**nu
    a = np.asarray(a)
    if np.iscomplexobj(a):
        return (np.rint(a.real * scale) + 1j * np.rint(a.imag * scale)) / scale
    return np.rint(a * scale) / scale


@dataclass
class QuantumState:
    coords: np.ndarray  # (K, n) integer basis coordinates
    flags: np.ndarray  # (K,) ancilla flag, 0 marks the good branch after transduction
    amps: np.ndarray  # (K,) complex amplitudes
    precision: int
    meta: dict = field(default_factory=dict, repr=False)

    @property
    def norm_check(self) -> float:
        return math.fsum(np.abs(self.amps) ** 2)

    @property
    def support_size(self) -> int:
        return len(self.amps)

    def norm_bound(self) -> float:
        """Worst-case ``|sum |a|^2 - 1|`` after rounding ``K`` unit-norm amplitudes to ``nu`` bits."""
        k = max(1, len({tuple(r) for r in self.coords.tolist()}))
        d = 2.0 ** (-self.precision - 1)
        return 2 * d * math.sqrt(k) + k * d * d

    def amplitude(self, coord, flag: int = 0) -> complex:
        c = np.asarray(coord, dtype=np.int64)
        hit = np.flatnonzero((self.flags == flag) & np.all(self.coords == c, axis=1))
        return complex(self.amps[hit].sum()) if len(hit) else 0.0j

    def to_dict(self) -> dict:
        return {(tuple(c), int(f)): complex(a) for c, f, a in zip(self.coords.tolist(), self.flags.tolist(), self.amps)}

    def good_mask(self, predicate=None) -> np.ndarray:
        if predicate is None:
            return self.flags == 0
        return np.asarray(predicate(self.coords, self.flags), dtype=bool)

    def good_mass(self, predicate=None) -> float:
        m = self.good_mask(predicate)
        return math.fsum(np.abs(self.amps[m]) ** 2)

    def measurement_distribution(self, predicate=None) -> tuple[np.ndarray, np.ndarray]:
        """Distribution of the coordinate register, restricted to ``predicate`` when given."""
        m = np.ones(len(self.amps), bool) if predicate is None else self.good_mask(predicate)
        coords, p = self.coords[m], np.abs(self.amps[m]) ** 2
        # entries sharing coordinates (different flags) add up
        uniq, inv = np.unique(coords, axis=0, return_inverse=True)
        tot = np.zeros(len(uniq))
        np.add.at(tot, inv.ravel(), p)
        return uniq, tot / tot.sum()


def prepare_klein_state(cfg: KleinConfig, nu: int, ledger: QueryLedger | None = None, budget: int = DEFAULT_BUDGET) -> QuantumState:
    """``sum_x (sqrt(q(Bx)) +- 2^{-nu}) |x>`` over the Klein space."""
    tab = omega_table(cfg, budget)
    log_q = tab.log_q - logsumexp(tab.log_q)
    amps = round_amplitudes(np.exp(0.5 * log_q), nu).astype(complex)
    _ledger(ledger).add("prep")
    return QuantumState(tab.coeffs.copy(), np.zeros(len(amps), dtype=np.int64), amps, nu, meta={"omega": tab})


def amplitude_transduce(state: QuantumState, ratio, nu: int, ledger: QueryLedger | None = None) -> QuantumState:
    """Attach an ancilla with amplitude ``sqrt(ratio(x)) +- 2^{-nu}`` on flag 0 and the remainder on flag 1.

    ``ratio`` is either a callable on the coordinate array or an array aligned
    with the state's entries.
    """
    r = np.asarray(ratio(state.coords) if callable(ratio) else ratio, dtype=float)
    if r.shape != (state.support_size,):
        raise ParamConstraint("ratio must give one value per support point")
    bad = np.flatnonzero(~((r >= 0) & (r <= 1 + 2.0**-nu)))
    if len(bad):
        i = int(bad[0])
        raise RatioOutOfRange(tuple(state.coords[i].tolist()), float(r[i]))
    good_amp = np.minimum(round_amplitudes(np.sqrt(np.clip(r, 0, 1)), nu), 1.0)
    rest_amp = np.sqrt(np.clip(1 - good_amp**2, 0, None))
    _ledger(ledger).add("ratio")
    coords = np.vstack([state.coords, state.coords])
    flags = np.concatenate([np.zeros(state.support_size, np.int64), np.ones(state.support_size, np.int64)])
    amps = np.concatenate([state.amps * good_amp, state.amps * rest_amp])
    return QuantumState(coords, flags, amps, nu, meta={**state.meta, "ratio": r})


# --------------------------------------------------------------------------
# amplitude amplification


def sim_good_amplitude(a: float, k: int) -> float:
    """Good amplitude after ``k`` Grover iterates when the initial good probability is ``a``.

    The iterate is built from its two reflections and applied ``k`` times to
    the (bad, good) vector.
    """
    if not 0 <= a <= 1:
        raise ParamConstraint("probability must lie in [0, 1]")
    psi = np.array([math.sqrt(1 - a), math.sqrt(a)])
    flip_good = np.diag([1.0, -1.0])
    reflect_psi = 2 * np.outer(psi, psi) - np.eye(2)
    step = reflect_psi @ flip_good
    v = psi.copy()
    for _ in range(int(k)):
        v = step @ v
    return float(v[1])


def qaa_iterations(good_amplitude: float) -> int:
    """``floor(pi / (4 arcsin a))`` for a good amplitude ``a``."""
    if good_amplitude <= 0:
        raise ZeroGoodAmplitude("the good component has zero amplitude")
    if good_amplitude >= 1:
        return 0
    return math.floor(math.pi / (4 * math.asin(good_amplitude)))


def _chebyshev(L: int, x: float) -> float:
    if abs(x) <= 1:
        return math.cos(L * math.acos(x))
    t = math.cosh(L * math.acosh(abs(x)))
    return t if x > 0 or L % 2 == 0 else -t


def fixed_point_length(delta: float, p_lower: float) -> int:
    """Smallest odd ``L`` with ``L >= log(2/delta) / sqrt(p_lower)``."""
    L = math.ceil(math.log(2 / delta) / math.sqrt(p_lower))
    return L if L % 2 else L + 1


def fixed_point_success(p: float, delta: float, L: int) -> float:
    """Success probability of the fixed-point search with ``(L - 1)/2`` iterates."""
    gamma = math.cosh(math.acosh(1 / delta) / L)
    t = _chebyshev(L, gamma * math.sqrt(max(0.0, 1 - p)))
    return 1 - delta**2 * t * t


@dataclass
class QAAResult:
    state: QuantumState
    iterations: int
    success_probability: float
    success: bool
    forward_calls: int
    inverse_calls: int


def _post_select(state: QuantumState, mask: np.ndarray) -> QuantumState:
    amps = state.amps[mask]
    nrm = math.sqrt(math.fsum(np.abs(amps) ** 2))
    meta = {**state.meta, "post_selected": True}
    return QuantumState(state.coords[mask], state.flags[mask], amps / nrm, state.precision, meta)


def qaa_project(
    state: QuantumState,
    good_predicate=None,
    mode: str = "known-amplitude",
    ledger: QueryLedger | None = None,
    rng: np.random.Generator | None = None,
    delta: float = 0.01,
    p_lower: float | None = None,
    max_calls: int | None = None,
) -> QAAResult:
    """Amplify the good component (default: ancilla flag 0) and post-select on it.

    ``known-amplitude`` runs ``floor(pi / (4 arcsin a))`` iterates once;
    ``exponential`` repeats randomized Grover runs with a growing iteration
    range until a run measures a good element; ``fixed-point`` runs the
    ``(L-1)/2`` iterates of the fixed-point schedule for the lower bound
    ``p_lower``. Each Grover iterate costs one forward and one inverse
    state preparation; the initial preparation is one forward call.
    """
    led = _ledger(ledger)
    mask = state.good_mask(good_predicate)
    total = state.norm_check
    p = min(1.0, math.fsum(np.abs(state.amps[mask]) ** 2) / total)
    if p <= 0:
        raise ZeroGoodAmplitude("the good component has zero amplitude")
    theta = math.asin(math.sqrt(p))
    out = _post_select(state, mask)

    if mode == "known-amplitude":
        k = qaa_iterations(math.sqrt(p))
        ps = math.sin((2 * k + 1) * theta) ** 2
        success = bool(rng.random() < ps) if rng is not None else True
        led.add("prep", k + 1)
        led.add("prep_inverse", k)
        led.add("grover_iterates", k)
        return QAAResult(out, k, ps, success, k + 1, k)

    if mode == "exponential":
        if rng is None:
            raise ParamConstraint("exponential search needs a random stream")
        lam, m_range = 6 / 5, 1.0
        cap = 1 / math.sqrt(p_lower) if p_lower else math.inf
        fwd = inv = iters = 0
        while True:
            j = int(rng.integers(0, max(1, math.floor(m_range))))
            fwd += j + 1
            inv += j
            iters += j
            if rng.random() < math.sin((2 * j + 1) * theta) ** 2:
                break
            if max_calls is not None and fwd >= max_calls:
                led.add("prep", fwd)
                led.add("prep_inverse", inv)
                led.add("grover_iterates", iters)
                return QAAResult(out, iters, 0.0, False, fwd, inv)
            m_range = min(lam * m_range, max(cap, 1.0))
        led.add("prep", fwd)
        led.add("prep_inverse", inv)
        led.add("grover_iterates", iters)
        return QAAResult(out, iters, 1.0, True, fwd, inv)

    if mode == "fixed-point":
        lower = p if p_lower is None else p_lower
        if lower > p + 1e-15:
            raise ParamConstraint("p_lower exceeds the actual good probability")
        L = fixed_point_length(delta, lower)
        ell = (L - 1) // 2
        ps = fixed_point_success(p, delta, L)
        success = bool(rng.random() < ps) if rng is not None else True
        led.add("prep", ell + 1)
        led.add("prep_inverse", ell)
        led.add("grover_iterates", ell)
        return QAAResult(out, ell, ps, success, ell + 1, ell)

    raise ParamConstraint(f"unknown amplification mode {mode!r}")


# --------------------------------------------------------------------------
# amplitude and mean estimation

_CACHE_BITS = 16


def _outcome_probs(a: float, t: int) -> np.ndarray:
    """Outcome law of phase estimation on the Grover iterate with ``2^t`` points."""
    M = 2**t
    phase = math.asin(math.sqrt(a)) / math.pi
    y = np.arange(M) / M

    def fejer(d):
        s = np.sin(math.pi * d)
        num = np.sin(M * math.pi * d)
        with np.errstate(divide="ignore", invalid="ignore"):
            f = (num / (M * s)) ** 2
        return np.where(np.abs(s) < 1e-15, 1.0, f)

    p = 0.5 * (fejer(y - phase) + fejer(y + phase))
    return p / p.sum()


@lru_cache(maxsize=64)
def _outcome_cdf(a: float, t: int) -> np.ndarray:
    return np.cumsum(_outcome_probs(a, t))


def amplitude_estimate(a_true: float, t_bits: int, rng: np.random.Generator, size: int | None = None):
    """Sample the estimate ``sin^2(pi y / 2^t)`` of phase estimation with ``t`` bits."""
    if not 0 <= a_true <= 1:
        raise ParamConstraint("amplitude must lie in [0, 1]")
    if not 1 <= t_bits <= 24:
        raise ParamConstraint("t_bits must be between 1 and 24")
    a_key = float(a_true)
    cdf = _outcome_cdf(a_key, t_bits) if t_bits <= _CACHE_BITS else np.cumsum(_outcome_probs(a_key, t_bits))
    u = rng.random(1 if size is None else size)
    y = np.minimum(np.searchsorted(cdf, u * cdf[-1], side="right"), len(cdf) - 1)
    est = np.sin(math.pi * y / 2**t_bits) ** 2
    return float(est[0]) if size is None else est


def amplitude_error_bound(a: float, t_bits: int) -> float:
    M = 2**t_bits
    return 2 * math.pi * math.sqrt(a * (1 - a)) / M + math.pi**2 / M**2


def mean_estimate_bits(eps: float) -> int:
    """Smallest ``t`` with ``2 (pi / 2^t + pi^2 / 4^t) <= eps``."""
    t = 1
    while 2 * (math.pi / 2**t + math.pi**2 / 4**t) > eps:
        t += 1
    return t


def mean_estimate_repetitions(delta: float) -> int:
    # a single run is good w.p. >= 8/pi^2; Hoeffding on the median
    gap = 8 / math.pi**2 - 0.5
    r = math.ceil(math.log(1 / delta) / (2 * gap * gap))
    return r if r % 2 else r + 1


def mean_estimate(
    dist: DistributionTable | np.ndarray,
    phi,
    eps: float,
    delta: float,
    ledger: QueryLedger | None = None,
    rng: np.random.Generator | None = None,
) -> float:
    """Estimate ``sum_x dist(x) phi(x)`` for ``phi`` in ``[-1, 1]`` to additive ``eps`` w.p. ``1 - delta``.

    ``phi`` is mapped to ``(phi + 1)/2``; its mean is a good-branch
    probability whose amplitude is estimated with ``t`` bits, and the median
    of an odd number of runs is returned. Each run costs ``2^t`` forward and
    ``2^t - 1`` inverse preparations and as many test-function calls.
    """
    if not 0 < eps < 1:
        raise ParamConstraint("eps must lie in (0, 1)")
    if not 0 < delta < 1:
        raise ParamConstraint("delta must lie in (0, 1)")
    rng = rng if rng is not None else np.random.default_rng()
    if isinstance(dist, DistributionTable):
        mass = dist.mass
        values = phi(dist) if callable(phi) else phi
    else:
        mass = np.asarray(dist, dtype=float)
        values = phi
    values = np.asarray(values, dtype=float)
    out = np.flatnonzero((values < -1) | (values > 1) | ~np.isfinite(values))
    if len(out):
        i = int(out[0])
        raise PhiOutOfRange(i, float(values[i]))
    mean = math.fsum(mass * values) / math.fsum(mass)
    return mean_estimate_from_value(mean, eps, delta, ledger, rng)


def mean_estimate_from_value(
    mean: float,
    eps: float,
    delta: float,
    ledger: QueryLedger | None = None,
    rng: np.random.Generator | None = None,
    prep_cost: float = 1.0,
    names: tuple[str, str, str] = ("prep", "prep_inverse", "test_fn"),
) -> float:
    """Simulated estimator output for a known true mean in ``[-1, 1]``.

    ``prep_cost`` scales the preparation counts when one preparation is
    itself a call sequence (for instance an amplified sampler).
    """
    rng = rng if rng is not None else np.random.default_rng()
    a = min(1.0, max(0.0, (mean + 1) / 2))
    t = mean_estimate_bits(eps)
    reps = mean_estimate_repetitions(delta)
    est = amplitude_estimate(a, t, rng, size=reps)
    led = _ledger(ledger)
    M = 2**t
    led.add(names[0], int(round(reps * M * prep_cost)))
    led.add(names[1], int(round(reps * (M - 1) * prep_cost)))
    led.add(names[2], reps * (2 * M - 1))
    return float(2 * np.median(est) - 1)


# --------------------------------------------------------------------------
# maximum finding with a bounded-error score


FAULT_THRESHOLD = 0.1
VERIFY_CALLS = 5
PEEK_CALLS = 15


@dataclass
class MaxFindResult:
    index: int
    calls: int
    rounds: int
    searches: int


def _median_score(score_fn, i: int, reps: int) -> float:
    return float(np.median([score_fn(i) for _ in range(reps)]))


def max_find_bounded_error(
    score_fn: Callable[[int], float],
    domain_bits: int,
    k: int,
    rng: np.random.Generator,
    ledger: QueryLedger | None = None,
    reference_scores: Iterable[float] | None = None,
) -> MaxFindResult:
    """Index of the maximal score over ``{0, ..., 2^l - 1}``, ties to the lowest index.

    ``score_fn`` may return a faulty value with probability at most 1/10.
    The marked set of each search is read from ``reference_scores`` (or,
    when absent, from unledgered median evaluations), standing in for the
    superposed evaluation. Every Grover iterate costs one call, every
    measured candidate is checked with a median of five calls. A marked
    candidate is adopted when that check is at least a fresh median-of-five
    estimate of ``s(j)``. Each of
    the ``k`` rounds stops once it has spent ``22.5 sqrt(2^l) + 1.4 l``
    calls.
    """
    if domain_bits < 0 or domain_bits > 14:
        raise ParamConstraint("domain_bits must be in [0, 14]")
    if k < 1:
        raise ParamConstraint("k must be positive")
    led = _ledger(ledger)
    N = 2**domain_bits
    if reference_scores is None:
        ref = np.array([_median_score(score_fn, i, PEEK_CALLS) for i in range(N)])
    else:
        ref = np.asarray(list(reference_scores), dtype=float)
        if len(ref) != N:
            raise ParamConstraint("reference_scores must cover the domain")
    # rank in the total order: higher score first, then lower index
    order = np.lexsort((np.arange(N), -ref))
    rank = np.empty(N, dtype=np.int64)
    rank[order] = np.arange(N)
    budget = 22.5 * math.sqrt(N) + 1.4 * domain_bits
    calls = 0
    searches = 0

    def call(i):
        nonlocal calls
        calls += 1
        led.add("score")
        return score_fn(i)

    def checked(i):
        return float(np.median([call(i) for _ in range(VERIFY_CALLS)]))

    j = int(rng.integers(N))
    j_max = j
    lam = 6 / 5
    for _ in range(k):
        spent = 0.0
        m_range = 1.0
        while spent < budget:
            marked = int(rank[j])  # elements ranked strictly above j
            j_iter = int(rng.integers(0, max(1, math.floor(m_range))))
            for _ in range(j_iter):
                call(0 if N == 1 else int(rng.integers(N)))  # superposed evaluation, value unused
            led.add("grover_iterates", j_iter)
            spent += j_iter
            theta = math.asin(math.sqrt(marked / N))
            hit = marked > 0 and rng.random() < math.sin((2 * j_iter + 1) * theta) ** 2
            cand = int(order[rng.integers(marked)]) if hit else int(rng.integers(N))
            searches += 1
            if rank[cand] < rank[j]:
                # both sides estimated alike, so ties within resolution pass
                vc, vj = checked(cand), checked(j)
                spent += 2 * VERIFY_CALLS
                adopt = vc >= vj
            else:
                checked(cand)
                spent += VERIFY_CALLS
                adopt = False
            if adopt:
                j = cand
                m_range = 1.0
            else:
                m_range = min(lam * m_range, math.sqrt(N))
        if rank[j] < rank[j_max]:
            j_max = j
    return MaxFindResult(j_max, calls, k, searches)


# --------------------------------------------------------------------------
# the quantum Gaussian sampling pipeline


def pipeline_precision(nu: int, omega_size: int, w: float) -> int:
    """Internal amplitude precision so that post-selection keeps the output within ``2^{-nu}``."""
    return nu + math.ceil(math.log2(max(2, omega_size))) + math.ceil(math.log2(max(1.0, w))) + 2


@dataclass
class PipelineResult:
    coords: np.ndarray
    probs: np.ndarray
    w: float
    good_probability: float
    iterations: int
    expected_forward_calls: float
    tv_to_omega: float
    tv_to_lattice: float
    tv_to_lattice_slack: float
    rho_outside: float
    internal_precision: int
    tab: OmegaTable = field(repr=False)

    def bound(self, nu: int) -> float:
        return 2.0**-nu + self.rho_outside


def quantum_gaussian_pipeline(cfg: KleinConfig, nu: int | None = None, budget: int = DEFAULT_BUDGET) -> PipelineResult:
    """Klein state, transduction of ``D/(w q)``, amplification; exact output law and distances."""
    nu = cfg.params.precision if nu is None else nu
    tab = omega_table(cfg, budget)
    w = math.exp(tab.log_w)
    nu_int = pipeline_precision(nu, len(tab.coeffs), w)
    led = QueryLedger()
    st = prepare_klein_state(cfg, nu_int, led, budget)
    ratio = np.exp(np.minimum(tab.log_accept, 0.0))
    st = amplitude_transduce(st, ratio, nu_int, led)
    res = qaa_project(st, None, "known-amplitude", led)
    coords, probs = res.state.coords, np.abs(res.state.amps) ** 2
    probs = probs / probs.sum()
    target = np.exp(tab.log_target)
    tv_omega = tv_distance(probs, target)
    # against the lattice: D_L on Omega plus the mass D_L puts outside
    log_in, log_out, log_rest = outside_klein_space(cfg.basis, cfg.params, budget)
    log_lat = float(np.logaddexp(log_in, log_out))
    d_lat = np.exp(tab.log_rho - log_lat)
    outside = math.exp(log_out - log_lat) if log_out > -np.inf else 0.0
    tv_lat = 0.5 * (math.fsum(np.abs(probs - d_lat)) + outside)
    slack = math.exp(log_rest - log_lat) if log_rest > -700 else 0.0
    rho_out = math.exp(float(np.logaddexp(log_out, log_rest))) if max(log_out, log_rest) > -745 else 0.0
    k = res.iterations
    p_good = st.good_mass() / st.norm_check
    ps = res.success_probability
    return PipelineResult(coords, probs, w, p_good, k, (k + 1) / ps, tv_omega, tv_lat, slack, rho_out, nu_int, tab)


def sample_pipeline_calls(result: PipelineResult, rng: np.random.Generator, trials: int) -> np.ndarray:
    """Forward preparation calls until the amplified measurement lands in the good branch."""
    k = result.iterations
    theta = math.asin(math.sqrt(min(1.0, result.good_probability)))
    ps = math.sin((2 * k + 1) * theta) ** 2
    attempts = rng.geometric(ps, size=trials)
    return attempts * (k + 1)


def trials_to_csv(rows: Iterable[dict]) -> str:
    """CSV with one line per trial: instance id, w, calls, TV, success flag."""
    buf = io.StringIO()
    cols = ["instance", "w", "calls", "tv", "success"]
    wr = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n", extrasaction="ignore")
    wr.writeheader()
    for r in rows:
        wr.writerow({c: (f"{r[c]:.17g}" if isinstance(r.get(c), float) else r.get(c)) for c in cols})
    return buf.getvalue()
