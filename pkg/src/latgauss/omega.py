"""Geometry of the finite Klein probability space.

For a basis ``B = QR`` and center ``c`` the sampler visits coordinates from
last to first; coordinate ``i`` is drawn from an interval of half-width
``2^M`` around the rounded conditional center

    x~_i = (c'_i - sum_{j>i} R_ij x_j) / R_ii,   c' = Q^T c.

Since ``R_ij / R_ii`` equals the Gram-Schmidt coefficient ``mu_ji`` (a
rational number for rational bases), the conditional centers are computed
in exact integer arithmetic whenever the center is rational with a small
denominator. This makes rounding at half-integers unambiguous.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import EnumerationBudgetExceeded
from .lattice import DEFAULT_BUDGET, LatticeBasis, _as_fraction

_INT_LIMIT = 2**50


def round_half_away(x):
    """Round to nearest integer, ties away from zero."""
    x = np.asarray(x, dtype=float)
    return (np.sign(x) * np.floor(np.abs(x) + 0.5)).astype(np.int64)


def _lcm(a: int, b: int) -> int:
    return a * b // math.gcd(a, b)


@dataclass(frozen=True)
class KleinGeometry:
    basis: LatticeBasis
    center: tuple[float, ...]
    box_exp: int
    # float data
    mu_f: np.ndarray = field(repr=False)  # mu_f[i, j] = R_ij / R_ii for j > i
    ctr_f: np.ndarray = field(repr=False)  # c'_i / R_ii
    # exact data (denominator 0 means "not available")
    denom: int = field(default=0, repr=False)
    mu_num: np.ndarray | None = field(default=None, repr=False)
    ctr_num: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.basis.rank

    @property
    def half_width(self) -> int:
        return 2**self.box_exp

    @property
    def rotated_center(self) -> np.ndarray:
        return self.ctr_f * self.basis.r_factor.diagonal()

    def conditional_center(self, coeffs: np.ndarray, i: int) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(x~_i, round(x~_i))`` for each row of ``coeffs`` (columns ``> i`` are used)."""
        coeffs = np.asarray(coeffs, dtype=np.int64)
        tail = coeffs[:, i + 1:]
        if self.denom:
            num = self.ctr_num[i] - tail @ self.mu_num[i, i + 1:]
            D = self.denom
            r = np.sign(num) * ((2 * np.abs(num) + D) // (2 * D))
            return num / D, r.astype(np.int64)
        xt = self.ctr_f[i] - tail @ self.mu_f[i, i + 1:]
        return xt, round_half_away(xt)

    def contains(self, coeffs: np.ndarray, half_widths: Sequence[int] | None = None) -> np.ndarray:
        """Membership mask of coefficient rows in the Klein space (default half-width ``2^M``)."""
        coeffs = np.atleast_2d(np.asarray(coeffs, dtype=np.int64))
        hw = self._half_widths(half_widths)
        ok = np.ones(coeffs.shape[0], dtype=bool)
        for i in range(self.n - 1, -1, -1):
            _, r = self.conditional_center(coeffs, i)
            ok &= np.abs(coeffs[:, i] - r) <= hw[i]
        return ok

    def _half_widths(self, half_widths) -> list[int]:
        if half_widths is None:
            return [self.half_width] * self.n
        if np.isscalar(half_widths):
            return [int(half_widths)] * self.n
        return [int(h) for h in half_widths]

    def size(self, half_widths=None) -> int:
        return math.prod(2 * h + 1 for h in self._half_widths(half_widths))

    def enumerate(self, half_widths=None, budget: int = DEFAULT_BUDGET):
        """Enumerate the Klein space depth-first: last coordinate outermost, intervals ascending.

        Returns ``(coeffs, centers)``: integer coefficient rows and the float
        conditional centers ``x~_i`` of every row.
        """
        hw = self._half_widths(half_widths)
        total = self.size(hw)
        if total > budget:
            raise EnumerationBudgetExceeded(total, budget)
        n = self.n
        coeffs = np.zeros((1, n), dtype=np.int64)
        centers = np.zeros((1, n))
        for i in range(n - 1, -1, -1):
            xt, r = self.conditional_center(coeffs, i)
            width = 2 * hw[i] + 1
            offs = np.arange(-hw[i], hw[i] + 1, dtype=np.int64)
            coeffs = np.repeat(coeffs, width, axis=0)
            centers = np.repeat(centers, width, axis=0)
            coeffs[:, i] = np.repeat(r, width) + np.tile(offs, len(r))
            centers[:, i] = np.repeat(xt, width)
        return coeffs, centers

    def contains_box(self) -> bool:
        """Whether the space contains every coefficient vector of ``prod [-2^{M-1}, 2^{M-1}]``."""
        from .lattice import iter_box

        h = 2 ** (self.box_exp - 1)
        return all(self.contains(chunk).all() for chunk in iter_box([-h] * self.n, [h] * self.n))


def klein_geometry(basis: LatticeBasis, center=None, box_exp: int = 4) -> KleinGeometry:
    n, m = basis.rank, basis.dim
    if center is None:
        center = [0.0] * m
    elif np.isscalar(center):
        center = [float(center)] * m
    center = tuple(float(c) for c in center)
    R = basis.r_factor
    mu_f = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1, n):
            mu_f[i, j] = R[i, j] / R[i, i]
    cprime = basis.q_factor[:, :n].T @ np.array(center)
    ctr_f = cprime / R.diagonal()

    # exact representation: mu_ji and <c, b~_i>/||b~_i||^2 over a common denominator
    denom, mu_num, ctr_num = 0, None, None
    try:
        cfr = [_as_fraction(c) for c in center]
        ortho_proj = []
        for i in range(n):
            # <c, b~_i> = <c, b_i> - sum_{k<i} mu_ik <c, b~_k>
            val = sum(a * b for a, b in zip(cfr, basis.columns[i]))
            val -= sum(basis.mu[i][k] * ortho_proj[k] * basis.gs_sq[k] for k in range(i))
            ortho_proj.append(val / basis.gs_sq[i])
        fracs = [basis.mu[j][i] for i in range(n) for j in range(i + 1, n)] + ortho_proj
        D = 1
        for f in fracs:
            D = _lcm(D, f.denominator)
            if D > _INT_LIMIT:
                raise OverflowError
        mu_num = np.zeros((n, n), dtype=np.int64)
        for i in range(n):
            for j in range(i + 1, n):
                mu_num[i, j] = int(basis.mu[j][i] * D)
        ctr_num = np.array([int(p * D) for p in ortho_proj], dtype=np.int64)
        scale = (sum(abs(int(v)) for v in mu_num.ravel()) + max(abs(int(v)) for v in ctr_num) + 1) * 2**20
        if scale < 2**62:
            denom = D
        else:
            mu_num = ctr_num = None
    except (OverflowError, ZeroDivisionError):
        mu_num = ctr_num = None
    return KleinGeometry(basis, center, int(box_exp), mu_f, ctr_f, denom, mu_num, ctr_num)
