"""Invariant suite run by ``latgauss verify``; each check sweeps a seeded parameter grid.

Inequalities whose proofs rely on a tail estimate for unit-width Gaussians
are swept over the regime where that estimate applies (per-coordinate width
at most 1); outside it they can fail, see ``finite_interval_counterexample``.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .cost import table_rows
from .gaussian import (
    GaussianParams,
    distance_sandwich_check,
    finite_set_bounds,
    fourier_identity_check,
    klein_tail_bound,
    periodic_gaussian,
    rho_z_bound,
    truncation_tv,
)
from .lattice import gram_schmidt_qr
from .qsim import sim_good_amplitude
from .samplers import KleinConfig, accepted_distribution, omega_table, target_pmf_exact


@dataclass
class CheckResult:
    label: str
    description: str
    points: int = 0
    failures: int = 0
    worst: float = 0.0  # largest violation margin seen (positive = violated)
    seconds: float = 0.0
    notes: list[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.points > 0 and self.failures == 0

    def record(self, ok: bool, margin: float = 0.0, note: str | None = None) -> None:
        self.points += 1
        if not ok:
            self.failures += 1
            if note and len(self.notes) < 5:
                self.notes.append(note)
        self.worst = max(self.worst, margin) if self.points > 1 else margin

    def to_dict(self) -> dict:
        return {
            "label": self.label,
            "description": self.description,
            "points": self.points,
            "failures": self.failures,
            "passed": self.passed,
            "worst_margin": self.worst,
            "seconds": round(self.seconds, 3),
            "notes": self.notes,
        }


def _random_basis(rng: np.random.Generator, m: int, lo: int = -3, hi: int = 3):
    while True:
        B = rng.integers(lo, hi + 1, size=(m, m))
        if round(abs(np.linalg.det(B))) > 0:
            return gram_schmidt_qr(B.tolist())


def check_rho_z(rng: np.random.Generator, points: int = 200) -> CheckResult:
    res = CheckResult("gaussian-mass-of-integers", "rho_s(Z) <= 3s + 4")
    for s in np.exp(rng.uniform(math.log(1e-3), math.log(1e4), size=points)):
        b = rho_z_bound(float(s))
        res.record(b.holds, b.log_lhs - b.log_rhs)
    return res


def check_finite_interval(rng: np.random.Generator, points: int = 200) -> CheckResult:
    res = CheckResult(
        "finite-interval-inequalities",
        "integer Gaussian mass vs the interval [-2^M, 2^M]: total-mass and tail inequalities (width <= 1, |c| <= 1/2)",
    )
    for _ in range(points):
        s = float(rng.uniform(0.05, 1.0))
        c = float(rng.uniform(-0.5, 0.5))
        M = int(rng.integers(1, 6))
        i, ii = finite_set_bounds(s, c, M)
        res.record(i.holds and ii.holds, max(ii.log_lhs - ii.log_rhs, 0.0 if i.holds else 1.0), f"s={s:.4g} c={c:.4g} M={M}")
    return res


def finite_interval_counterexample(sigma: float = 3.0, center: float = 0.0, box_exp: int = 1):
    """A wide Gaussian where the literal tail inequality fails."""
    return finite_set_bounds(sigma, center, box_exp)


def check_klein_tail(rng: np.random.Generator, points: int = 120) -> CheckResult:
    res = CheckResult(
        "klein-space-tail",
        "rho_s(L \\ Omega) <= 2 (2^{M-1} sqrt(2 pi e))^m exp(-pi m 4^{M-1}) (3 s / min|b~_i| + 4)^m (s <= min|b~_i|)",
    )
    while res.points < points:
        m = int(rng.integers(1, 4))
        M = int(rng.integers(2, 4))
        L = _random_basis(rng, m)
        s = float(rng.uniform(0.2, 1.0)) * float(np.min(L.gs_norms))
        b = klein_tail_bound(L, GaussianParams(s, 0.0, M))
        res.record(b.holds, b.log_lhs - b.log_rhs, f"m={m} M={M} s={s:.4g}")
    return res


def check_tv_identity(rng: np.random.Generator, points: int = 100) -> CheckResult:
    res = CheckResult(
        "truncation-distance",
        "d_TV(D_Omega, D_L) = rho(L \\ Omega) / rho(L) to 1e-9; when rho(L) >= 1 also <= rho(L \\ Omega) and <= rho(L \\ Omega)(1 + 1/rho(L))/2",
    )
    while res.points < points:
        m = int(rng.integers(1, 3))
        L = _random_basis(rng, m, -2, 2)
        s = float(rng.uniform(0.5, 3.0)) * float(np.min(L.gs_norms))
        c = rng.uniform(-1, 1, size=m).tolist()
        tv = truncation_tv(L, GaussianParams(s, c, 2))
        ident = abs(tv.tv_direct - tv.tv_exact_identity) <= 1e-9
        # both upper bounds need rho(L) >= 1; a shifted center can push it below
        big = tv.log_rho_lattice >= 0
        upper = not big or tv.tv_direct <= tv.rho_outside * (1 + 1e-9) + 1e-300
        printed = not big or tv.tv_direct <= tv.tv_printed_expression * (1 + 1e-9) + 1e-300
        res.record(ident and upper and printed, tv.tv_direct - tv.tv_exact_identity, f"m={m} s={s:.4g}")
    return res


def check_acceptance_ratio(rng: np.random.Generator, points: int = 100) -> CheckResult:
    res = CheckResult("acceptance-ratio", "rejection acceptance probability lies in [0, 1] at every point of Omega")
    while res.points < points:
        m = int(rng.integers(1, 4))
        L = _random_basis(rng, m, -2, 2)
        s = float(rng.uniform(0.3, 4.0)) * float(np.max(L.gs_norms))
        c = rng.uniform(-2, 2, size=m).tolist()
        tab = omega_table(KleinConfig(L, GaussianParams(s, c, 2)))
        top = float(np.max(tab.log_accept))
        res.record(top <= 1e-12, top, f"m={m} s={s:.4g}")
    return res


def check_sandwich(rng: np.random.Generator, points: int = 120) -> CheckResult:
    res = CheckResult(
        "distance-sandwich",
        "rho_{1/s}(d) <= f_{L,1/s}(x), and f_{L,1/s}(x) <= rho_{1/s}(d - tau) when d >= tau",
    )
    while res.points < points:
        m = int(rng.integers(1, 3))
        L = _random_basis(rng, m, -2, 2)
        s = float(rng.uniform(0.3, 6.0))
        x = rng.uniform(-3, 3, size=m)
        r = distance_sandwich_check(L, s, x.tolist())
        ok = r.lower_holds and r.upper_holds is not False
        res.record(ok, 0.0 if ok else 1.0, f"m={m} s={s:.4g}")
    return res


def check_fourier(rng: np.random.Generator, points: int = 30) -> CheckResult:
    res = CheckResult("fourier-identity", "periodic Gaussian equals the cosine series over the dual Gaussian")
    for _ in range(points):
        L = _random_basis(rng, 1, 1, 3)
        s = float(rng.uniform(0.5, 2.0))
        x = [float(rng.uniform(-1, 1))]
        r = fourier_identity_check(L, s, x, [(-40, 40)])
        res.record(r <= 1e-8, r)
    return res


def check_periodicity(rng: np.random.Generator, points: int = 30) -> CheckResult:
    res = CheckResult("periodicity", "f_{L,s}(x + v) = f_{L,s}(x) for lattice vectors v, with values in (0, 1]")
    for _ in range(points):
        L = _random_basis(rng, 2, -2, 2)
        s = float(rng.uniform(0.5, 2.0))
        x = rng.uniform(-1, 1, size=2)
        v = L.matrix @ rng.integers(-2, 3, size=2)
        a, b = periodic_gaussian(L, s, x.tolist()), periodic_gaussian(L, s, (x + v).tolist())
        res.record(abs(a - b) <= 1e-10 and 0 < a <= 1, abs(a - b))
    return res


def check_rejection_exact(rng: np.random.Generator, points: int = 20) -> CheckResult:
    res = CheckResult("rejection-exactness", "accepted-output distribution equals the truncated target pointwise (1e-12)")
    for k in range(points):
        L = gram_schmidt_qr([[2, 1], [0, 1]]) if k == 0 else _random_basis(rng, 2, -2, 2)
        s = 2.0 if k == 0 else float(rng.uniform(0.5, 3.0)) * float(np.max(L.gs_norms))
        cfg = KleinConfig(L, GaussianParams(s, 0.0, 2))
        err = float(np.max(np.abs(accepted_distribution(cfg).mass - target_pmf_exact(cfg).mass)))
        res.record(err <= 1e-12, err)
    return res


def check_qaa(rng: np.random.Generator, points: int = 1000) -> CheckResult:
    res = CheckResult("amplification-exactness", "simulated good amplitude equals sin((2k+1) arcsin sqrt(a))")
    for _ in range(points):
        a = float(rng.random())
        k = int(rng.integers(0, 50))
        err = abs(sim_good_amplitude(a, k) - math.sin((2 * k + 1) * math.asin(math.sqrt(a))))
        res.record(err <= 1e-12, err)
    return res


def check_tables(rng: np.random.Generator | None = None) -> CheckResult:
    res = CheckResult("cost-tables", "shipped SIS cost rows recombine to the printed totals (quantum exact, classical +-1)")
    for row in table_rows():
        res.record(row["within_tolerance"], abs(row["diff"]), f"{row['table']} level {row['level']}: {row['computed']} vs {row['printed']}")
    return res


CHECKS: dict[str, Callable[[np.random.Generator], CheckResult]] = {
    "gaussian-mass-of-integers": check_rho_z,
    "finite-interval-inequalities": check_finite_interval,
    "klein-space-tail": check_klein_tail,
    "truncation-distance": check_tv_identity,
    "acceptance-ratio": check_acceptance_ratio,
    "distance-sandwich": check_sandwich,
    "fourier-identity": check_fourier,
    "periodicity": check_periodicity,
    "rejection-exactness": check_rejection_exact,
    "amplification-exactness": check_qaa,
    "cost-tables": check_tables,
}


def run_all(seed: int = 0, only: list[str] | None = None) -> list[CheckResult]:
    out = []
    for i, (label, fn) in enumerate(CHECKS.items()):
        if only and label not in only:
            continue
        rng = np.random.default_rng([seed, i])
        t = time.perf_counter()
        r = fn(rng)
        r.seconds = time.perf_counter() - t
        out.append(r)
    return out


def format_matrix(results: list[CheckResult]) -> str:
    width = max(len(r.label) for r in results)
    lines = [f"{'check'.ljust(width)}  status  points  failures"]
    for r in results:
        lines.append(f"{r.label.ljust(width)}  {'PASS' if r.passed else 'FAIL'}    {r.points:6d}  {r.failures:8d}")
    return "\n".join(lines)
