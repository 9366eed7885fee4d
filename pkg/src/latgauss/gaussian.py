"""Gaussian masses, periodic Gaussians and numerically checkable tail bounds.

Conventions: ``rho_{s,c}(x) = exp(-pi ||x - c||^2 / s^2)``. Sums that would be
infinite are truncated at a radius derived from Banaszczyk's tail bound,
with the truncation error reported or bounded explicitly. Tiny tail masses
are handled in log space so that comparisons survive underflow.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.special import logsumexp

from .errors import EmptySampleSet, EnumerationBudgetExceeded, ParamConstraint
from .lattice import (
    DEFAULT_BUDGET,
    LatticeBasis,
    _as_fraction,
    box_size,
    distance_to_lattice,
    enumerate_ball,
    iter_box,
    lll_reduce,
    nearest_plane,
)
from .omega import klein_geometry

SQRT_2PIE = math.sqrt(2 * math.pi * math.e)
DIRECT_TERMS_LIMIT = 10**6


@dataclass(frozen=True)
class GaussianParams:
    """Width ``sigma``, center, box exponent ``M`` (half-width ``2^M``) and precision ``nu``.

    ``mass_constant`` is the constant ``c`` of the admissibility condition
    ``log(sigma) + M log 2 + nu <= c 2^{2M}`` under which interval masses are
    claimed to ``2^{-nu}`` accuracy.
    """

    sigma: float
    center: tuple[float, ...] | float = 0.0
    box_exp: int = 4
    precision: int = 12
    mass_constant: float = 1.0

    def __post_init__(self):
        if not (isinstance(self.sigma, (int, float, np.floating, np.integer)) and math.isfinite(self.sigma) and self.sigma > 0):
            raise ParamConstraint(f"sigma must be a positive real, got {self.sigma!r}")
        if int(self.box_exp) != self.box_exp or self.box_exp < 2:
            raise ParamConstraint(f"box exponent must be an integer >= 2, got {self.box_exp!r}")
        if int(self.precision) != self.precision or self.precision < 8:
            raise ParamConstraint(f"precision must be an integer >= 8, got {self.precision!r}")
        if self.mass_constant <= 0:
            raise ParamConstraint("mass constant must be positive")
        c = self.center
        if not np.isscalar(c):
            object.__setattr__(self, "center", tuple(float(v) for v in c))

    @property
    def half_width(self) -> int:
        return 2**self.box_exp

    @property
    def mass_condition_ok(self) -> bool:
        lhs = math.log(self.sigma) + self.box_exp * math.log(2) + self.precision
        return lhs <= self.mass_constant * 2 ** (2 * self.box_exp)

    def center_vector(self, m: int) -> np.ndarray:
        if np.isscalar(self.center):
            return np.full(m, float(self.center))
        if len(self.center) != m:
            raise ParamConstraint(f"center has dimension {len(self.center)}, expected {m}")
        return np.array(self.center, dtype=float)


@dataclass
class DistributionTable:
    """Exact finite pmf over lattice points, indexed by basis coordinates."""

    coords: np.ndarray
    vectors: np.ndarray
    mass: np.ndarray
    total_check: float = field(init=False)
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.coords = np.asarray(self.coords, dtype=np.int64)
        self.vectors = np.asarray(self.vectors, dtype=float)
        self.mass = np.asarray(self.mass, dtype=float)
        if np.any(self.mass < 0):
            raise ParamConstraint("negative probability mass")
        self.total_check = math.fsum(self.mass)

    def __len__(self) -> int:
        return len(self.mass)

    def check(self, tol: float = 1e-12) -> bool:
        distinct = len({tuple(r) for r in self.coords.tolist()}) == len(self.coords)
        return distinct and abs(self.total_check - 1.0) <= tol

    def expectation(self, values) -> float:
        return math.fsum(self.mass * np.asarray(values, dtype=float))

    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray:
        cdf = np.cumsum(self.mass)
        idx = np.searchsorted(cdf, rng.random(size) * cdf[-1], side="right")
        return np.minimum(idx, len(cdf) - 1)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n, m = self.coords.shape[1], self.vectors.shape[1]
        w.writerow([f"x{i}" for i in range(n)] + [f"v{i}" for i in range(m)] + ["mass"])
        for c, v, p in zip(self.coords.tolist(), self.vectors.tolist(), self.mass.tolist()):
            w.writerow(c + [f"{a:.17g}" for a in v] + [f"{p:.17g}"])
        return buf.getvalue()


def tv_distance(p: np.ndarray, q: np.ndarray) -> float:
    return 0.5 * math.fsum(np.abs(np.asarray(p) - np.asarray(q)))


# --------------------------------------------------------------------------
# one-dimensional masses


def _window(sigma: float, bits: float) -> float:
    """Radius beyond which a single Gaussian term is below ``2^{-bits}``."""
    return sigma * math.sqrt(bits * math.log(2) / math.pi) + 1.0


def rho_z(sigma: float, center: float = 0.0, bits: int = 80) -> float:
    """``rho_{sigma,center}(Z)``: direct sum for ``sigma <= 1``, Poisson dual sum otherwise."""
    if sigma <= 1:
        r = _window(sigma, bits + 8)
        k = np.arange(math.floor(center - r), math.ceil(center + r) + 1)
        return math.fsum(np.exp(-math.pi * (k - center) ** 2 / sigma**2))
    kmax = math.ceil(_window(1.0 / sigma, bits + 8))
    k = np.arange(1, kmax + 1)
    terms = np.exp(-math.pi * sigma**2 * k**2) * np.cos(2 * math.pi * k * center)
    return sigma * (1.0 + 2.0 * math.fsum(terms))


def log_rho_z(sigma: float, center: float = 0.0) -> float:
    """``log rho_{sigma,center}(Z)``, safe against underflow for narrow widths."""
    if sigma > 1:
        return math.log(rho_z(sigma, center))
    r = _window(sigma, 1100)
    k = np.arange(math.floor(center - r), math.ceil(center + r) + 1)
    return float(logsumexp(-math.pi * (k - center) ** 2 / sigma**2))


def _tail_euler_maclaurin(sigma: float, start: float) -> float:
    """``sum_{j>=0} g(start + j)`` for ``g(t) = exp(-pi t^2/sigma^2)``, wide ``sigma`` only."""
    s = sigma
    integral = 0.5 * s * math.erfc(math.sqrt(math.pi) * start / s)
    g = math.exp(-math.pi * start**2 / s**2)
    a = -2 * math.pi / s**2
    d1 = a * start * g
    d3 = (a**3 * start**3 + 3 * a**2 * start) * g
    return integral + g / 2 - d1 / 12 + d3 / 720


def interval_mass(sigma: float, center: float, half_width: int, bits: int = 64) -> float:
    """``sum_{k=-h}^{h} exp(-pi (k - center)^2 / sigma^2)`` without admissibility checks."""
    h = int(half_width)
    r = _window(sigma, bits + 8)
    lo, hi = max(-h, math.floor(center - r)), min(h, math.ceil(center + r))
    if hi < lo:
        return 0.0
    if hi - lo + 1 <= DIRECT_TERMS_LIMIT:
        k = np.arange(lo, hi + 1)
        return math.fsum(np.exp(-math.pi * (k - center) ** 2 / sigma**2))
    # very wide: full-line Poisson sum minus the two tails
    right = _tail_euler_maclaurin(sigma, h + 1 - center)
    left = _tail_euler_maclaurin(sigma, h + 1 + center)
    return rho_z(sigma, center, bits) - right - left


def interval_masses(sigma: float, centers: np.ndarray, half_width: int, shift: np.ndarray | None = None) -> np.ndarray:
    """Vectorized ``rho_{sigma, c}([-h, h] + shift)`` for arrays of centers (direct summation)."""
    centers = np.asarray(centers, dtype=float)
    shift = np.zeros(centers.shape, dtype=np.int64) if shift is None else np.asarray(shift)
    offs = np.arange(-half_width, half_width + 1)
    d = (shift - centers)[..., None] + offs
    return np.exp(-math.pi * d**2 / sigma**2).sum(axis=-1)


def rho_interval(p: GaussianParams, center_x: float) -> float:
    """``rho_{sigma, center_x}([-2^M, 2^M])`` to absolute accuracy ``2^{-nu}``."""
    if not p.mass_condition_ok:
        raise ParamConstraint(
            f"log(sigma) + M log 2 + nu = {math.log(p.sigma) + p.box_exp * math.log(2) + p.precision:.4g} "
            f"exceeds {p.mass_constant} * 2^(2M)"
        )
    return interval_mass(p.sigma, float(center_x), p.half_width, bits=max(64, p.precision + 8))


def log_c_const(box_exp: int) -> float:
    """``log C`` with ``C = (1 - 2^M sqrt(2 pi e) exp(-pi 2^{2M}))^{-1}``."""
    eps = 2**box_exp * SQRT_2PIE * math.exp(-math.pi * 4**box_exp)
    return -math.log1p(-eps)


def log_c_minus_one(box_exp: int) -> float:
    """``log(C - 1)``, accurate even when ``C - 1`` underflows."""
    log_eps = box_exp * math.log(2) + math.log(SQRT_2PIE) - math.pi * 4**box_exp
    return log_eps - math.log1p(-math.exp(log_eps))


def c_const(box_exp: int) -> float:
    return math.exp(log_c_const(box_exp))


# --------------------------------------------------------------------------
# lattice sums


def _log_rho_rows(B: np.ndarray, coeffs: np.ndarray, sigma: float, center: np.ndarray) -> np.ndarray:
    v = coeffs @ B.T - center
    return -math.pi * np.einsum("ij,ij->i", v, v) / sigma**2


def rho_lattice_box(L: LatticeBasis, p: GaussianParams, coeff_box: Sequence[tuple[int, int]], budget: int = DEFAULT_BUDGET) -> float:
    """``sum_{x in box} rho_{sigma,c}(Bx)`` by enumeration of a coefficient box."""
    lo = [int(a) for a, _ in coeff_box]
    hi = [int(b) for _, b in coeff_box]
    size = box_size(lo, hi)
    if size > budget:
        raise EnumerationBudgetExceeded(size, budget)
    B = L.matrix
    c = p.center_vector(L.dim)
    parts = [math.fsum(np.exp(_log_rho_rows(B, chunk, p.sigma, c))) for chunk in iter_box(lo, hi)]
    return math.fsum(parts)


def log_banaszczyk_tail(dim: int, t: float) -> float:
    """log of ``2 (t sqrt(2 pi e) exp(-pi t^2))^dim``.

    For ``t > 1/sqrt(2 pi)`` this bounds ``rho_s((L + v) \\ t s sqrt(dim) Ball) / rho_s(L)``.
    """
    if t <= 1 / math.sqrt(2 * math.pi):
        return 0.0
    return math.log(2) + dim * (math.log(t * SQRT_2PIE) - math.pi * t * t)


def banaszczyk_t(dim: int, log_target: float) -> float:
    """Smallest ``t`` (to 1e-6) with ``log_banaszczyk_tail(dim, t) <= log_target``."""
    lo, hi = 1 / math.sqrt(2 * math.pi) + 1e-9, 2.0
    while log_banaszczyk_tail(dim, hi) > log_target:
        hi *= 1.5
    for _ in range(80):
        mid = (lo + hi) / 2
        if log_banaszczyk_tail(dim, mid) > log_target:
            lo = mid
        else:
            hi = mid
    return hi


@dataclass(frozen=True)
class LatticeSum:
    """An enumerated Gaussian lattice sum with a rigorous bound on what was left out."""

    log_value: float
    log_remainder_bound: float

    @property
    def value(self) -> float:
        return math.exp(self.log_value)


def lattice_gaussian_sum(
    L: LatticeBasis, sigma: float, center=None, log_rel_tol: float = math.log(1e-14), budget: int = DEFAULT_BUDGET
) -> LatticeSum:
    """``rho_{sigma,center}(L)`` by ball enumeration.

    The omitted mass is at most ``exp(log_rel_tol) * rho_sigma(L)``.
    """
    m = L.rank
    t = banaszczyk_t(m, log_rel_tol)
    radius = t * sigma * math.sqrt(m)
    c = np.zeros(L.dim) if center is None else np.asarray(center, dtype=float)
    coeffs = enumerate_ball(L, radius, center=c, budget=budget)
    if len(coeffs) == 0:
        logs = np.array([-np.inf])
    else:
        logs = _log_rho_rows(L.matrix, coeffs, sigma, c)
    log_val = float(logsumexp(logs))
    # rho_sigma(L) <= prod_i rho_{sigma_i}(Z)
    log_full = sum(math.log(rho_z(sigma / g)) for g in L.gs_norms)
    return LatticeSum(log_val, log_rel_tol + log_full)


def log_rho_lattice_poisson(L: LatticeBasis, sigma: float, log_rel_tol: float = math.log(1e-14)) -> LatticeSum:
    """``log rho_sigma(L)`` for a full-rank ``L`` through the dual sum.

    ``rho_sigma(L) = sigma^m / det(L) * rho_{1/sigma}(dual(L))``; useful when
    ``sigma`` is large compared with ``L`` but small compared with its dual.
    """
    if not L.is_square:
        raise ParamConstraint("the dual-side sum needs a full-rank lattice")
    m = L.rank
    inner = lattice_gaussian_sum(L.dual(), 1.0 / sigma, None, log_rel_tol)
    shift = m * math.log(sigma) - math.log(L.volume())
    return LatticeSum(inner.log_value + shift, inner.log_remainder_bound + shift)


def log_truncation_tail(L: LatticeBasis, sigma: float, inner_radius: float) -> float:
    """log bound on ``rho_sigma(L \\ Ball(inner_radius)) / rho_sigma(L)`` (zero-centered)."""
    t = inner_radius / (sigma * math.sqrt(L.rank))
    return log_banaszczyk_tail(L.rank, t)


def _reduce_mod_lattice(L: LatticeBasis, x) -> tuple[np.ndarray, bool]:
    """Reduce ``x`` to a short representative of ``x + L``; flag exact membership."""
    coords = L.coordinates([_as_fraction(v) for v in x])
    if coords is not None and all(c.denominator == 1 for c in coords):
        return np.zeros(L.dim), True
    xa = np.array([float(v) for v in x])
    k = np.linalg.lstsq(L.matrix, xa, rcond=None)[0]
    return xa - L.matrix @ np.rint(k), False


def log_periodic_gaussian(L: LatticeBasis, sigma: float, x) -> float:
    """``log f_{L,sigma}(x)`` with relative truncation error below 1e-13."""
    if sigma <= 0:
        raise ParamConstraint("sigma must be positive")
    xr, member = _reduce_mod_lattice(L, x)
    if member:
        return 0.0
    # the numerator is at least exp(-pi d^2/sigma^2), d <= ||xr||; aim well below it
    d_up = float(np.linalg.norm(xr))
    tol = math.log(1e-13)
    num = lattice_gaussian_sum(L, sigma, -xr, tol - math.pi * d_up**2 / sigma**2)
    den = lattice_gaussian_sum(L, sigma, None, tol)
    return min(0.0, num.log_value - den.log_value)


def log_periodic_gaussian_many(L: LatticeBasis, sigma: float, xs, budget: int = DEFAULT_BUDGET) -> np.ndarray:
    """``log f_{L,sigma}`` at every row of ``xs`` from a single enumeration around the origin."""
    if sigma <= 0:
        raise ParamConstraint("sigma must be positive")
    xs = np.atleast_2d(np.asarray(xs, dtype=float))
    if L.is_integral:
        L = lll_reduce(L)
    red = np.array([x - L.matrix @ nearest_plane(L, x) for x in xs])
    d_up = float(np.linalg.norm(red, axis=1).max()) if len(red) else 0.0
    tol = math.log(1e-13) - math.pi * d_up**2 / sigma**2
    t = banaszczyk_t(L.rank, tol)
    # every point within the tail radius of some -xr lies in this ball
    coeffs = enumerate_ball(L, t * sigma * math.sqrt(L.rank) + d_up, budget=budget)
    P = coeffs @ L.matrix.T
    den = lattice_gaussian_sum(L, sigma, None, math.log(1e-13)).log_value
    out = np.empty(len(red))
    for i, r in enumerate(red):
        d2 = np.sum((P + r) ** 2, axis=1)
        out[i] = min(0.0, float(logsumexp(-math.pi * d2 / sigma**2)) - den)
    return out


def periodic_gaussian(L: LatticeBasis, sigma: float, x) -> float:
    """``f_{L,sigma}(x) = rho_sigma(L + x) / rho_sigma(L)``, truncation error below 1e-10."""
    return math.exp(log_periodic_gaussian(L, sigma, x))


def dual_distribution_mass(L: LatticeBasis, sigma: float, dual_box: Sequence[tuple[int, int]]):
    """Enumerate ``D_{dual(L), 1/sigma}`` over a coefficient box of the dual basis.

    Returns ``(dual_vectors, masses)``; masses are normalized by the full dual sum.
    """
    D = L.dual()
    s = 1.0 / sigma
    lo = [a for a, _ in dual_box]
    hi = [b for _, b in dual_box]
    coeffs = np.vstack(list(iter_box(lo, hi)))
    W = coeffs @ D.matrix.T
    logs = -math.pi * np.sum(W * W, axis=1) / s**2
    total = lattice_gaussian_sum(D, s)
    return W, np.exp(logs - total.log_value)


def fourier_identity_check(L: LatticeBasis, sigma: float, x, dual_box: Sequence[tuple[int, int]]) -> float:
    """``|f_{L,sigma}(x) - sum_{w in box} D_{dual,1/sigma}(w) cos(2 pi <x, w>)|``."""
    W, mass = dual_distribution_mass(L, sigma, dual_box)
    xa = np.array([float(v) for v in x])
    series = math.fsum(mass * np.cos(2 * math.pi * (W @ xa)))
    return abs(periodic_gaussian(L, sigma, x) - series)


def dual_tail_mass(L: LatticeBasis, sigma: float, dual_box: Sequence[tuple[int, int]]) -> float:
    """Mass of ``D_{dual,1/sigma}`` outside the box (the residual allowance of the Fourier check)."""
    _, mass = dual_distribution_mass(L, sigma, dual_box)
    return max(0.0, 1.0 - math.fsum(mass))


def pointwise_approx_score(W, x) -> float:
    """``(1/N) sum_i cos(2 pi <w_i, x>)``."""
    W = np.atleast_2d(np.asarray(W, dtype=float))
    if W.size == 0 or W.shape[0] == 0:
        raise EmptySampleSet("the dual sample set is empty")
    xa = np.atleast_1d(np.asarray(x, dtype=float))
    return float(np.mean(np.cos(2 * math.pi * (W @ xa))))


# --------------------------------------------------------------------------
# checkable bounds


@dataclass(frozen=True)
class BoundResult:
    label: str
    lhs: float
    rhs: float
    log_lhs: float
    log_rhs: float
    holds: bool
    note: str = ""


def _bound(label: str, log_lhs: float, log_rhs: float, note: str = "", slack: float = 1e-12) -> BoundResult:
    holds = log_lhs <= log_rhs + slack
    return BoundResult(label, _safe_exp(log_lhs), _safe_exp(log_rhs), log_lhs, log_rhs, holds, note)


def _safe_exp(v: float) -> float:
    return math.exp(v) if v > -745 else 0.0


def rho_z_bound(sigma: float) -> BoundResult:
    """``rho_sigma(Z) <= 3 sigma + 4``."""
    return _bound("rho_z <= 3s+4", log_rho_z(sigma), math.log(3 * sigma + 4))


def _log_tail_1d(sigma: float, center: float, h: int) -> float:
    """log of ``rho_{sigma,center}(Z \\ [-h, h])`` by direct summation of both tails."""
    r = _window(sigma, 1100) + abs(center)
    logs = []
    for side in (1, -1):
        k = np.arange(h + 1, max(h + 2, math.ceil(h + r + abs(center)) + 2)) * side
        logs.append(-math.pi * (k - center) ** 2 / sigma**2)
    return float(logsumexp(np.concatenate(logs)))


def _log_shift_deficit(sigma: float, center: float) -> float:
    """``log(rho_sigma(Z) - rho_{sigma,c}(Z))`` via the Poisson form ``4 sigma sum e^{-pi s^2 k^2} sin^2(pi k c)``."""
    kmax = max(2, math.ceil(_window(1.0 / sigma, 1100)))
    k = np.arange(1, kmax + 1)
    sn = np.abs(np.sin(math.pi * k * center))
    keep = sn > 0
    if not np.any(keep):
        return -np.inf
    return math.log(4 * sigma) + float(logsumexp(-math.pi * sigma**2 * k[keep] ** 2 + 2 * np.log(sn[keep])))


def finite_set_bounds(sigma: float, center: float, box_exp: int) -> tuple[BoundResult, BoundResult]:
    """Both inequalities relating ``rho_{sigma,c}(Z)`` to the interval ``I = [-2^M, 2^M]``.

    (i)  ``rho_{sigma,c}(Z) <= rho_sigma(I) / (1 - 2^M sqrt(2 pi e) exp(-pi 2^{2M}))``
    (ii) ``rho_{sigma,c}(Z \\ I) <= 2^{M+1} sqrt(2 pi e) exp(-pi 2^{2M}) (3 sigma + 4)``

    Both are evaluated literally. The tail radius is not scaled with the
    width, so they can fail for wide Gaussians or centers far from zero.
    Inequality (i) is nearly tight, so it is decided by comparing the excess
    terms ``rho_sigma(Z \\ I)`` and ``(C - 1) rho_sigma(I) + (rho_sigma(Z) - rho_{sigma,c}(Z))``
    rather than the two totals.
    """
    h = 2**box_exp
    inner = interval_mass(sigma, 0.0, h)
    log_c = log_c_const(box_exp)
    log_excess_allowed = float(np.logaddexp(log_c_minus_one(box_exp) + math.log(inner), _log_shift_deficit(sigma, center)))
    log_tail0 = _log_tail_1d(sigma, 0.0, h)
    i = BoundResult(
        "finite-set (i)",
        math.exp(log_rho_z(sigma, center)),
        inner * math.exp(log_c),
        log_rho_z(sigma, center),
        math.log(inner) + log_c,
        bool(log_tail0 <= log_excess_allowed),
        f"log tail {log_tail0:.6g} vs log allowance {log_excess_allowed:.6g}",
    )
    log_rhs2 = (box_exp + 1) * math.log(2) + math.log(SQRT_2PIE) - math.pi * 4**box_exp + math.log(3 * sigma + 4)
    ii = _bound("finite-set (ii)", _log_tail_1d(sigma, center, h), log_rhs2, slack=0.0)
    return i, ii


def _klein_region(L: LatticeBasis, p: GaussianParams, budget: int):
    """Enumerate a Klein-shaped region around ``Omega`` holding every lattice point near the center.

    Returns ``(coeffs, inside_omega, log_rho, log_rest)`` where ``log_rest``
    bounds the log-mass of lattice points outside the region.
    """
    m = L.rank
    c = p.center_vector(L.dim)
    geom = klein_geometry(L, c, p.box_exp)
    log_full = sum(math.log(rho_z(p.sigma / g)) for g in L.gs_norms)
    # make the unenumerated mass far smaller than the mass just outside Omega
    boundary = (p.half_width - 0.5) * float(np.min(L.gs_norms))
    log_target = min(-math.pi * boundary**2 / p.sigma**2, 0.0) - 40.0 - log_full
    t = banaszczyk_t(m, log_target)
    radius = t * p.sigma * math.sqrt(m)
    # a point within ``radius`` of the center has |x_i - x~_i| <= radius / ||b~_i||
    hw = [max(p.half_width + 1, math.ceil(radius / g + 0.5)) for g in L.gs_norms]
    if geom.size(hw) > budget:
        hw = [min(h, 4 * p.half_width) for h in hw]
        if geom.size(hw) > budget:
            raise EnumerationBudgetExceeded(geom.size(hw), budget)
        t = min((h - 0.5) * g for h, g in zip(hw, L.gs_norms)) / (p.sigma * math.sqrt(m))
        log_target = log_banaszczyk_tail(m, t)
    coeffs, _ = geom.enumerate(hw, budget=budget)
    inside = geom.contains(coeffs)
    logs = _log_rho_rows(L.matrix, coeffs, p.sigma, c)
    return coeffs, inside, logs, log_target + log_full


def outside_klein_space(L: LatticeBasis, p: GaussianParams, budget: int = DEFAULT_BUDGET) -> tuple[float, float, float]:
    """Log-masses around the Klein space ``Omega``.

    Returns ``(log rho(Omega), log rho(L \\ Omega) enumerated, log bound on the unenumerated rest)``.
    """
    _, inside, logs, log_rest = _klein_region(L, p, budget)
    log_in = float(logsumexp(logs[inside]))
    log_out = float(logsumexp(logs[~inside])) if np.any(~inside) else -np.inf
    return log_in, log_out, log_rest


def klein_tail_bound(L: LatticeBasis, p: GaussianParams, budget: int = DEFAULT_BUDGET) -> BoundResult:
    """``rho_sigma(L \\ Omega) <= 2 (2^{M-1} sqrt(2 pi e))^m exp(-pi m 2^{2M-2}) (3 sigma / min ||b~_i|| + 4)^m``.

    Only meaningful when ``Omega`` contains ``B prod [-2^{M-1}, 2^{M-1}]``; this
    is recorded in the note. The left side is the enumerated outside mass plus
    the bound on the unenumerated remainder, so ``holds`` is rigorous.
    """
    m, M = L.rank, p.box_exp
    _, log_out, log_rest = outside_klein_space(L, p, budget)
    log_lhs = float(np.logaddexp(log_out, log_rest))
    log_rhs = (
        math.log(2)
        + m * ((M - 1) * math.log(2) + math.log(SQRT_2PIE))
        - math.pi * m * 4 ** (M - 1)
        + m * math.log(3 * p.sigma / float(np.min(L.gs_norms)) + 4)
    )
    geom = klein_geometry(L, p.center_vector(L.dim), M)
    note = "box contained" if geom.contains_box() else "hypothesis not met: Omega does not contain the half box"
    return _bound("klein-space tail", log_lhs, log_rhs, note)


@dataclass(frozen=True)
class TailReport:
    finite_set_i: list[BoundResult]
    finite_set_ii: list[BoundResult]
    klein_tail: BoundResult

    @property
    def all_hold(self) -> bool:
        return all(b.holds for b in self.finite_set_i + self.finite_set_ii + [self.klein_tail])


def tail_bounds_check(L: LatticeBasis, p: GaussianParams, budget: int = DEFAULT_BUDGET) -> TailReport:
    """Evaluate both finite-set inequalities per Gram-Schmidt coordinate and the Klein-space tail bound.

    The one-dimensional inequalities are applied with the per-coordinate
    widths ``sigma / ||b~_i||`` and the rotated center, which for ``Z^1``
    reduces to the plain ``(sigma, c)``.
    """
    geom = klein_geometry(L, p.center_vector(L.dim), p.box_exp)
    i_res, ii_res = [], []
    for k, g in enumerate(L.gs_norms):
        a, b = finite_set_bounds(p.sigma / g, float(geom.ctr_f[k]), p.box_exp)
        i_res.append(a)
        ii_res.append(b)
    return TailReport(i_res, ii_res, klein_tail_bound(L, p, budget))


@dataclass(frozen=True)
class TruncationTV:
    tv_direct: float
    log_rho_lattice: float
    log_rho_outside: float

    @property
    def tv_exact_identity(self) -> float:
        """``rho(L \\ Omega) / rho(L)``."""
        return _safe_exp(self.log_rho_outside - self.log_rho_lattice)

    @property
    def tv_printed_expression(self) -> float:
        """``rho(L \\ Omega) (1 + 1/rho(L)) / 2``; an upper bound on the distance when ``rho(L) >= 1``."""
        out = _safe_exp(self.log_rho_outside)
        return out * (1 + _safe_exp(-self.log_rho_lattice)) / 2

    @property
    def rho_outside(self) -> float:
        return _safe_exp(self.log_rho_outside)


def truncation_tv(L: LatticeBasis, p: GaussianParams, budget: int = DEFAULT_BUDGET) -> TruncationTV:
    """Statistical distance between ``D_{Omega,sigma}`` and ``D_{L,sigma}``, computed point by point."""
    _, inside, logs, _ = _klein_region(L, p, budget)
    log_in = float(logsumexp(logs[inside]))
    log_out = float(logsumexp(logs[~inside])) if np.any(~inside) else -np.inf
    log_lat = float(np.logaddexp(log_in, log_out))
    d_omega = np.where(inside, np.exp(logs - log_in), 0.0)
    d_lat = np.exp(logs - log_lat)
    direct = 0.5 * math.fsum(np.abs(d_omega - d_lat))
    return TruncationTV(direct, log_lat, log_out)


@dataclass(frozen=True)
class SandwichReport:
    distance: float
    f_value: float
    lower: float
    upper: float | None
    tau: float
    lower_holds: bool
    upper_holds: bool | None
    log_f: float = 0.0


def distance_sandwich_check(L: LatticeBasis, sigma: float, x) -> SandwichReport:
    """``rho_{1/s}(d) <= f_{L,1/s}(x)`` and, when ``d >= tau``, ``f_{L,1/s}(x) <= rho_{1/s}(d - tau)``.

    Comparisons are made in log space, so they stay meaningful for values far below 1e-300.
    """
    m = L.rank
    d, _ = distance_to_lattice(L, x)
    log_f = log_periodic_gaussian(L, 1.0 / sigma, x)
    tau = (1.0 / sigma) * math.sqrt(m / (2 * math.pi))
    log_lower = -math.pi * sigma**2 * d * d
    slack = 1e-9
    if d >= tau:
        log_upper = -math.pi * sigma**2 * (d - tau) ** 2
        upper, up_ok = _safe_exp(log_upper), log_f <= log_upper + slack
    else:
        upper, up_ok = None, None
    return SandwichReport(d, _safe_exp(log_f), _safe_exp(log_lower), upper, tau, log_f >= log_lower - slack, up_ok, log_f)
