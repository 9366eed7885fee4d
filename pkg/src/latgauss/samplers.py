"""Classical samplers over the finite Klein space.

The Klein sampler draws basis coordinates from last to first, each from an
exact finite one-dimensional Gaussian table of ``2^{M+1} + 1`` points centered
at the rounded conditional center. Rejection sampling and an independence
Metropolis chain turn its output law ``q`` into the finite discrete Gaussian
``D_{Omega,sigma}``.

The center is projected onto the span of the basis. Components orthogonal to
the span only rescale every Gaussian weight by the same constant.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.special import logsumexp

from .errors import EnumerationBudgetExceeded, ParamConstraint
from .gaussian import (
    DistributionTable,
    GaussianParams,
    _window,
    interval_mass,
    lattice_gaussian_sum,
    log_c_const,
    log_rho_z,
)
from .lattice import DEFAULT_BUDGET, LatticeBasis, enumerate_ball, gram_schmidt_qr
from .omega import KleinGeometry, klein_geometry


@dataclass(frozen=True)
class KleinConfig:
    basis: LatticeBasis
    params: GaussianParams
    geometry: KleinGeometry = field(init=False, repr=False)
    rotated_center: np.ndarray = field(init=False, repr=False)
    sigmas_per_coord: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        c = self.params.center_vector(self.basis.dim)
        geom = klein_geometry(self.basis, c, self.params.box_exp)
        object.__setattr__(self, "geometry", geom)
        object.__setattr__(self, "rotated_center", geom.rotated_center)
        object.__setattr__(self, "sigmas_per_coord", self.params.sigma / self.basis.gs_norms)

    @property
    def n(self) -> int:
        return self.basis.rank

    @property
    def half_width(self) -> int:
        return self.params.half_width

    @property
    def projected_center(self) -> np.ndarray:
        """``Q c'``: the center projected onto the span of the basis."""
        return self.basis.q_factor[:, : self.n] @ self.rotated_center

    @property
    def omega_size(self) -> int:
        return (2 * self.half_width + 1) ** self.n

    def log_box_masses(self) -> np.ndarray:
        """``log rho_{sigma_i}([-2^M, 2^M])`` per coordinate."""
        return np.array([_log_interval(s, 0.0, self.half_width) for s in self.sigmas_per_coord])


def klein_config(basis, sigma: float, center=0.0, box_exp: int = 4, precision: int = 12) -> KleinConfig:
    """Convenience constructor from a column basis (``LatticeBasis`` or row-major integer matrix)."""
    if not isinstance(basis, LatticeBasis):
        basis = gram_schmidt_qr(basis)
    return KleinConfig(basis, GaussianParams(sigma, center, box_exp, precision))


def _log_interval(sigma: float, center: float, h: int) -> float:
    m = interval_mass(sigma, center, h)
    if m > 1e-250:
        return math.log(m)
    # narrow widths: the nearest terms dominate
    k = np.arange(max(-h, math.floor(center) - 2), min(h, math.ceil(center) + 2) + 1)
    return float(logsumexp(-math.pi * (k - center) ** 2 / sigma**2))


def _table_offsets(sigma: float, h: int) -> np.ndarray:
    """Offsets ``k`` in ``[-h, h]`` whose weight can matter for a center within 1/2 of 0."""
    r = math.ceil(_window(sigma, 80) + 1)
    return np.arange(-min(h, r), min(h, r) + 1)


def _log_weights(sigma: float, frac: np.ndarray, offs: np.ndarray) -> np.ndarray:
    """``log rho_{sigma, frac}(k)`` for rows of fractional offsets ``frac = x~ - round(x~)``."""
    d = offs[None, :] - frac[:, None]
    return -math.pi * d * d / sigma**2


@dataclass
class KleinDraws:
    coeffs: np.ndarray
    vectors: np.ndarray
    log_norms: np.ndarray  # sum_i log rho_{sigma_i, x~_i}(shifted interval)


def klein_sample_batch(cfg: KleinConfig, rng: np.random.Generator, size: int) -> KleinDraws:
    """``size`` independent Klein draws, by exact CDF inversion coordinate by coordinate."""
    n, h = cfg.n, cfg.half_width
    coeffs = np.zeros((size, n), dtype=np.int64)
    log_norms = np.zeros(size)
    for i in range(n - 1, -1, -1):
        s = float(cfg.sigmas_per_coord[i])
        xt, r = cfg.geometry.conditional_center(coeffs, i)
        xt = np.broadcast_to(np.asarray(xt, dtype=float), (size,))
        r = np.broadcast_to(r, (size,))
        offs = _table_offsets(s, h)
        logw = _log_weights(s, xt - r, offs)
        lse = logsumexp(logw, axis=1)
        cdf = np.cumsum(np.exp(logw - lse[:, None]), axis=1)
        u = rng.random(size)
        idx = np.minimum((u[:, None] >= cdf).sum(axis=1), len(offs) - 1)
        coeffs[:, i] = r + offs[idx]
        log_norms += lse
    vectors = coeffs @ cfg.basis.matrix.T
    return KleinDraws(coeffs, vectors, log_norms)


def klein_sample(cfg: KleinConfig, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """One Klein draw: ``(B x, x)``."""
    d = klein_sample_batch(cfg, rng, 1)
    return d.vectors[0], d.coeffs[0]


def sample_integer_gaussian(sigma: float, size: int, rng: np.random.Generator, center: float = 0.0, box_exp: int = 4) -> np.ndarray:
    """Draws from ``D_{[-2^M, 2^M] + round(c), sigma, c}`` over the integers."""
    cfg = KleinConfig(gram_schmidt_qr([[1]]), GaussianParams(sigma, center, box_exp))
    return klein_sample_batch(cfg, rng, size).coeffs[:, 0]


# --------------------------------------------------------------------------
# exact tables over Omega


@dataclass
class OmegaTable:
    """Every point of ``Omega`` with the log-quantities the samplers need."""

    coeffs: np.ndarray
    vectors: np.ndarray
    log_rho: np.ndarray  # log rho_{sigma,c}(Bx), center projected on the span
    log_norms: np.ndarray  # sum_i log rho_{sigma_i, x~_i}(shifted interval)
    log_accept_const: float  # m log C + sum_i log rho_{sigma_i}([-2^M, 2^M])

    @property
    def log_q(self) -> np.ndarray:
        return self.log_rho - self.log_norms

    @property
    def log_target(self) -> np.ndarray:
        return self.log_rho - logsumexp(self.log_rho)

    @property
    def log_accept(self) -> np.ndarray:
        """log of ``D/(w q)``: ``sum_i log rho_{sigma_i,x~_i}(I_i) - m log C - sum_i log rho_{sigma_i}(I)``."""
        return self.log_norms - self.log_accept_const

    @property
    def log_w(self) -> float:
        return self.log_accept_const - float(logsumexp(self.log_rho))


def omega_table(cfg: KleinConfig, budget: int = DEFAULT_BUDGET) -> OmegaTable:
    geom = cfg.geometry
    coeffs, centers = geom.enumerate(budget=budget)
    h = cfg.half_width
    log_norms = np.zeros(len(coeffs))
    for i in range(cfg.n):
        s = float(cfg.sigmas_per_coord[i])
        _, r = geom.conditional_center(coeffs, i)
        offs = _table_offsets(s, h)
        log_norms += logsumexp(_log_weights(s, centers[:, i] - r, offs), axis=1)
    vectors = coeffs @ cfg.basis.matrix.T
    diff = vectors - cfg.projected_center
    log_rho = -math.pi * np.einsum("ij,ij->i", diff, diff) / cfg.params.sigma**2
    const = cfg.n * log_c_const(cfg.params.box_exp) + float(cfg.log_box_masses().sum())
    return OmegaTable(coeffs, vectors, log_rho, log_norms, const)


def _table(tab: OmegaTable, log_mass: np.ndarray, kind: str) -> DistributionTable:
    mass = np.exp(log_mass - logsumexp(log_mass))
    return DistributionTable(tab.coeffs, tab.vectors, mass, meta={"kind": kind})


def klein_pmf_exact(cfg: KleinConfig, budget: int = DEFAULT_BUDGET) -> DistributionTable:
    """The output law ``q`` of the Klein sampler over the whole of ``Omega``."""
    tab = omega_table(cfg, budget)
    # q is already normalized; renormalizing only removes rounding noise
    return _table(tab, tab.log_q, "klein")


def target_pmf_exact(cfg: KleinConfig, budget: int = DEFAULT_BUDGET) -> DistributionTable:
    """``D_{Omega,sigma}(x) = rho_{sigma,c}(Bx) / rho_{sigma,c}(Omega)``."""
    tab = omega_table(cfg, budget)
    return _table(tab, tab.log_rho, "target")


@dataclass(frozen=True)
class WBound:
    value: float
    max_ratio: float | None
    log_value: float
    exact_omega: bool

    def __float__(self) -> float:
        return self.value


def omega_inner_radius(cfg: KleinConfig) -> float:
    """Radius of a ball around the center that lies inside ``Omega``."""
    return (cfg.half_width - 0.5) * float(np.min(cfg.basis.gs_norms))


def log_rho_omega_lower(cfg: KleinConfig, budget: int = DEFAULT_BUDGET) -> float:
    """Lower bound on ``log rho_sigma(Omega)``.

    Uses the lattice points of a ball inside ``Omega`` when that ball is
    small enough to enumerate, and otherwise the dual-side sum for
    ``rho_sigma(L)`` minus a Banaszczyk bound on the mass outside the ball
    (zero center only).
    """
    from .gaussian import banaszczyk_t, log_rho_lattice_poisson, log_truncation_tail

    m, s = cfg.n, cfg.params.sigma
    r_in = omega_inner_radius(cfg)
    r_mass = banaszczyk_t(m, math.log(1e-20)) * s * math.sqrt(m)
    radius = min(r_in, r_mass)
    # rough count of lattice points in the ball
    log_count = m * math.log(radius + 1) + (m / 2) * math.log(math.pi) - math.lgamma(m / 2 + 1) - math.log(cfg.basis.volume()) if cfg.basis.is_square else 0.0
    if cfg.basis.is_square and log_count > math.log(budget / 10) and not np.any(cfg.projected_center):
        full = log_rho_lattice_poisson(cfg.basis, s)
        lower = full.log_value + math.log1p(-math.exp(log_truncation_tail(cfg.basis, s, r_in)))
        # the dual-side truncation only ever lowers the enumerated sum
        return lower
    pts = enumerate_ball(cfg.basis, radius, center=cfg.projected_center, budget=budget)
    diff = pts @ cfg.basis.matrix.T - cfg.projected_center
    return float(logsumexp(-math.pi * np.einsum("ij,ij->i", diff, diff) / s**2))


def w_bound(cfg: KleinConfig, audit: bool = True, budget: int = DEFAULT_BUDGET) -> WBound:
    """``w = C^m prod_i rho_{sigma_i}([-2^M, 2^M]) / rho_sigma(Omega)``.

    With ``audit`` (and an enumerable ``Omega``) the largest true ratio
    ``D_{Omega,sigma}(x) / q(x)`` is returned alongside. Otherwise
    ``rho_sigma(Omega)`` is replaced by a lower bound, which keeps ``w`` an
    upper bound.
    """
    if cfg.omega_size <= budget:
        tab = omega_table(cfg, budget)
        ratio = math.exp(float(np.max(tab.log_target - tab.log_q))) if audit else None
        return WBound(math.exp(tab.log_w), ratio, tab.log_w, True)
    const = cfg.n * log_c_const(cfg.params.box_exp) + float(cfg.log_box_masses().sum())
    log_w = const - log_rho_omega_lower(cfg, budget)
    return WBound(math.exp(log_w), None, log_w, False)


# --------------------------------------------------------------------------
# rejection sampling


@dataclass
class RejectionStats:
    trials: int = 0
    accepts: int = 0
    w_used: float = float("nan")
    c_const: float = 1.0
    max_ratio_seen: float = 0.0

    @property
    def acceptance_rate(self) -> float:
        return self.accepts / self.trials if self.trials else 0.0

    def merge(self, other: "RejectionStats") -> None:
        self.trials += other.trials
        self.accepts += other.accepts
        self.max_ratio_seen = max(self.max_ratio_seen, other.max_ratio_seen)


def acceptance_log_probs(cfg: KleinConfig, draws: KleinDraws) -> np.ndarray:
    const = cfg.n * log_c_const(cfg.params.box_exp) + float(cfg.log_box_masses().sum())
    return draws.log_norms - const


def _w_or_nan(cfg: KleinConfig) -> float:
    # w is only reported; acceptance does not depend on it
    try:
        return w_bound(cfg, audit=False).value
    except (EnumerationBudgetExceeded, ValueError, OverflowError):
        return float("nan")


def rejection_sample_batch(
    cfg: KleinConfig, rng: np.random.Generator, count: int, chunk: int | None = None, w: float | None = None
) -> tuple[KleinDraws, RejectionStats, np.ndarray]:
    """``count`` exact draws from ``D_{Omega,sigma}``.

    Returns the accepted draws, aggregate stats, and the number of Klein
    trials each accepted draw consumed.
    """
    if w is None:
        w = _w_or_nan(cfg)
    w_est = w if math.isfinite(w) else 2.0
    chunk = chunk or max(64, min(1 << 16, int(2 * count * min(w_est, 1e3)) + 16))
    stats = RejectionStats(w_used=w, c_const=math.exp(log_c_const(cfg.params.box_exp)))
    got_c, got_v, got_l, per = [], [], [], []
    since_last = 0
    need = count
    while need > 0:
        d = klein_sample_batch(cfg, rng, chunk)
        logp = acceptance_log_probs(cfg, d)
        stats.max_ratio_seen = max(stats.max_ratio_seen, float(np.exp(logp.max())))
        acc = np.log(rng.random(chunk)) < np.minimum(logp, 0.0)
        idx = np.flatnonzero(acc)[:need]
        if len(idx) == 0:
            since_last += chunk
            continue
        gaps = np.diff(np.concatenate([[-1], idx]))
        gaps[0] += since_last
        per.append(gaps)
        since_last = chunk - 1 - int(idx[-1])
        got_c.append(d.coeffs[idx])
        got_v.append(d.vectors[idx])
        got_l.append(d.log_norms[idx])
        need -= len(idx)
    # draws after the final acceptance are not counted
    per = np.concatenate(per)
    stats.accepts = count
    stats.trials = int(per.sum())
    out = KleinDraws(np.vstack(got_c), np.vstack(got_v), np.concatenate(got_l))
    return out, stats, per


def rejection_sample(cfg: KleinConfig, rng: np.random.Generator, w: float | None = None) -> tuple[np.ndarray, RejectionStats]:
    """One exact draw from ``D_{Omega,sigma}`` by rejection from the Klein sampler."""
    if w is None:
        w = _w_or_nan(cfg)
    stats = RejectionStats(w_used=w, c_const=math.exp(log_c_const(cfg.params.box_exp)))
    while True:
        d = klein_sample_batch(cfg, rng, 1)
        logp = float(acceptance_log_probs(cfg, d)[0])
        stats.trials += 1
        stats.max_ratio_seen = max(stats.max_ratio_seen, math.exp(logp))
        if math.log(rng.random()) < min(logp, 0.0):
            stats.accepts = 1
            return d.vectors[0], stats


def accepted_distribution(cfg: KleinConfig, budget: int = DEFAULT_BUDGET) -> DistributionTable:
    """Law of accepted outputs, ``q(x) a(x) / sum q a``, propagated exactly over ``Omega``."""
    tab = omega_table(cfg, budget)
    log_a = np.minimum(tab.log_accept, 0.0)
    return _table(tab, tab.log_q + log_a, "accepted")


# --------------------------------------------------------------------------
# independence Metropolis chain


def delta_ratio(L: LatticeBasis, sigma: float) -> float:
    """``rho_sigma(L) / prod_i rho_{sigma / ||b~_i||}(Z)``."""
    num = lattice_gaussian_sum(L, sigma).log_value
    den = sum(log_rho_z(sigma / g) for g in L.gs_norms)
    return math.exp(num - den)


def default_burn_in(cfg: KleinConfig) -> int:
    delta = delta_ratio(cfg.basis, cfg.params.sigma)
    return math.ceil(cfg.params.precision * math.log(2) / delta)


def mcmc_sample(cfg: KleinConfig, burn_in: int | None, rng: np.random.Generator) -> tuple[np.ndarray, dict]:
    """Independence Metropolis-Hastings with Klein proposals, run for ``burn_in`` steps.

    The log acceptance ratio ``log D(y) q(x) / (D(x) q(y))`` reduces to the
    difference of the per-draw normalizer sums.
    """
    if burn_in is None:
        burn_in = default_burn_in(cfg)
    if burn_in < 0:
        raise ParamConstraint("burn-in must be non-negative")
    props = klein_sample_batch(cfg, rng, burn_in + 1)
    u = np.log(rng.random(burn_in))
    cur = 0
    accepted = 0
    for t in range(1, burn_in + 1):
        if u[t - 1] < props.log_norms[t] - props.log_norms[cur]:
            cur = t
            accepted += 1
    return props.vectors[cur], {"steps": burn_in, "accepted": accepted, "coeffs": props.coeffs[cur]}


def mcmc_transition_matrix(cfg: KleinConfig, budget: int = DEFAULT_BUDGET) -> tuple[np.ndarray, OmegaTable]:
    """Exact transition matrix of the chain over the enumerated ``Omega``."""
    tab = omega_table(cfg, budget)
    q = np.exp(tab.log_q - logsumexp(tab.log_q))
    ln = tab.log_norms
    acc = np.exp(np.minimum(0.0, ln[None, :] - ln[:, None]))
    P = q[None, :] * acc
    np.fill_diagonal(P, 0.0)
    P[np.diag_indices_from(P)] = 1.0 - P.sum(axis=1)
    return P, tab


def mcmc_distribution(cfg: KleinConfig, steps: int, budget: int = DEFAULT_BUDGET) -> DistributionTable:
    """Law of the chain after ``steps`` transitions when started from a Klein draw."""
    P, tab = mcmc_transition_matrix(cfg, budget)
    dist = np.exp(tab.log_q - logsumexp(tab.log_q))
    dist = dist @ np.linalg.matrix_power(P, steps)
    return DistributionTable(tab.coeffs, tab.vectors, np.clip(dist, 0, None), meta={"kind": "mcmc", "steps": steps})
