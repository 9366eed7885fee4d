"""Lattice bases, QR / Gram-Schmidt data, q-ary lattices and brute-force geometry.

Membership, determinants and Hermite normal forms use exact integer or
``Fraction`` arithmetic. Only the orthogonal factor ``Q`` and the triangular
factor ``R`` are floating point, since they contain square roots.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import numpy as np

from .errors import (
    EnumerationBudgetExceeded,
    NoVectorInRadius,
    ParamConstraint,
    RankDeficient,
)

DEFAULT_BUDGET = 10**7
QR_TOLERANCE = 1e-9


def _as_fraction(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, (int, np.integer)):
        return Fraction(int(v))
    if isinstance(v, str):
        return Fraction(v)
    if isinstance(v, (float, np.floating)):
        return Fraction(float(v)).limit_denominator(10**12)
    raise TypeError(f"cannot convert {v!r} to a rational")


def to_fraction_rows(B) -> list[list[Fraction]]:
    """Convert a matrix-like object (rows) to a list of rows of Fractions."""
    rows = [list(r) for r in (B.tolist() if isinstance(B, np.ndarray) else B)]
    if not rows or not rows[0]:
        raise ParamConstraint("empty matrix")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParamConstraint("ragged matrix")
    return [[_as_fraction(v) for v in r] for r in rows]


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def solve_exact(rows: list[list[Fraction]], rhs: Sequence[Fraction]) -> list[Fraction] | None:
    """Solve ``rows @ x = rhs`` for a full-column-rank system.

    Returns ``None`` when the system is inconsistent.
    """
    m, n = len(rows), len(rows[0])
    aug = [list(r) + [Fraction(rhs[i])] for i, r in enumerate(rows)]
    piv_row = 0
    pivots = []
    for col in range(n):
        sel = next((r for r in range(piv_row, m) if aug[r][col] != 0), None)
        if sel is None:
            continue
        aug[piv_row], aug[sel] = aug[sel], aug[piv_row]
        p = aug[piv_row][col]
        aug[piv_row] = [v / p for v in aug[piv_row]]
        for r in range(m):
            if r != piv_row and aug[r][col] != 0:
                f = aug[r][col]
                aug[r] = [a - f * b for a, b in zip(aug[r], aug[piv_row])]
        pivots.append(col)
        piv_row += 1
    if any(aug[r][n] != 0 for r in range(piv_row, m)):
        return None
    if len(pivots) < n:
        raise RankDeficient(len(pivots), "system is not of full column rank")
    x = [Fraction(0)] * n
    for r, col in enumerate(pivots):
        x[col] = aug[r][n]
    return x


def exact_det(rows: list[list[Fraction]]) -> Fraction:
    n = len(rows)
    a = [list(r) for r in rows]
    det = Fraction(1)
    for col in range(n):
        sel = next((r for r in range(col, n) if a[r][col] != 0), None)
        if sel is None:
            return Fraction(0)
        if sel != col:
            a[col], a[sel] = a[sel], a[col]
            det = -det
        p = a[col][col]
        det *= p
        for r in range(col + 1, n):
            if a[r][col] != 0:
                f = a[r][col] / p
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return det


@dataclass(frozen=True)
class LatticeBasis:
    """Basis ``B`` (columns ``b_1..b_n`` in ``Z^m`` or ``Q^m``) with its QR data."""

    columns: tuple[tuple[Fraction, ...], ...]
    q_factor: np.ndarray = field(repr=False, compare=False)
    r_factor: np.ndarray = field(repr=False, compare=False)
    gs_norms: np.ndarray = field(repr=False, compare=False)
    gs_sq: tuple[Fraction, ...] = field(repr=False, compare=False)
    # mu[j][i] = <b_j, b~_i> / ||b~_i||^2, exact
    mu: tuple[tuple[Fraction, ...], ...] = field(default=(), repr=False, compare=False)
    qr_error: float = field(default=0.0, compare=False)

    @property
    def dim(self) -> int:
        return len(self.columns[0])

    @property
    def rank(self) -> int:
        return len(self.columns)

    @property
    def is_square(self) -> bool:
        return self.dim == self.rank

    def rows(self) -> list[list[Fraction]]:
        return [[self.columns[j][i] for j in range(self.rank)] for i in range(self.dim)]

    @property
    def matrix(self) -> np.ndarray:
        return np.array([[float(v) for v in r] for r in self.rows()])

    @property
    def is_integral(self) -> bool:
        return all(v.denominator == 1 for c in self.columns for v in c)

    def int_matrix(self) -> np.ndarray:
        if not self.is_integral:
            raise ParamConstraint("basis is not integral")
        return np.array([[int(v) for v in r] for r in self.rows()], dtype=np.int64)

    def scaled_int_matrix(self) -> tuple[np.ndarray, int]:
        """Return ``(K, d)`` with ``B = K / d`` and ``K`` integral."""
        d = 1
        for c in self.columns:
            for v in c:
                d = d * v.denominator // math.gcd(d, v.denominator)
        K = np.array([[int(v * d) for v in r] for r in self.rows()], dtype=np.int64)
        return K, d

    def determinant(self) -> Fraction:
        """Exact ``|det B|`` for square bases, ``sqrt(det(B^T B))`` otherwise (as float)."""
        if self.is_square:
            return abs(exact_det(self.rows()))
        raise ParamConstraint("determinant is defined for square bases only; use volume()")

    def volume(self) -> float:
        return float(np.prod(self.gs_norms))

    def vector(self, coeffs: Sequence[int]) -> tuple[Fraction, ...]:
        coeffs = [int(c) for c in coeffs]
        return tuple(sum(c * col[i] for c, col in zip(coeffs, self.columns)) for i in range(self.dim))

    def coordinates(self, v: Sequence) -> list[Fraction] | None:
        """Exact coordinates of ``v`` in the basis, or ``None`` if ``v`` is outside the span."""
        return solve_exact(self.rows(), [_as_fraction(x) for x in v])

    def contains(self, v: Sequence) -> bool:
        x = self.coordinates(v)
        return x is not None and all(c.denominator == 1 for c in x)

    def scaled(self, t) -> "LatticeBasis":
        t = _as_fraction(t)
        return gram_schmidt_qr([[v * t for v in r] for r in self.rows()])

    def dual(self) -> "LatticeBasis":
        """Dual basis ``B^{-T}`` of a square basis."""
        if not self.is_square:
            raise ParamConstraint("dual basis is computed for square bases only")
        n = self.rank
        rows = self.rows()
        # column j of B^{-1} is row j of B^{-T}
        dual_rows = [solve_exact(rows, [Fraction(int(i == j)) for i in range(n)]) for j in range(n)]
        return gram_schmidt_qr(dual_rows)

    def to_json(self) -> dict:
        return {"columns": [[str(v) for v in c] for c in self.columns]}

    @classmethod
    def from_json(cls, data: dict) -> "LatticeBasis":
        cols = data["columns"]
        rows = [[cols[j][i] for j in range(len(cols))] for i in range(len(cols[0]))]
        return gram_schmidt_qr(rows)


def gram_schmidt_qr(B) -> LatticeBasis:
    """QR factorization of a basis given as rows of a matrix whose columns are basis vectors.

    Gram-Schmidt is carried out exactly over the rationals, so a dependent
    column is detected without tolerance and reported by index.
    """
    rows = to_fraction_rows(B)
    m, n = len(rows), len(rows[0])
    if n > m:
        raise RankDeficient(m, f"{n} columns in dimension {m} cannot be independent")
    cols = [tuple(rows[i][j] for i in range(m)) for j in range(n)]
    ortho: list[list[Fraction]] = []
    sq: list[Fraction] = []
    mu = [[Fraction(0)] * n for _ in range(n)]
    for j, b in enumerate(cols):
        v = list(b)
        for i in range(j):
            mu[j][i] = _dot(b, ortho[i]) / sq[i]
            v = [a - mu[j][i] * o for a, o in zip(v, ortho[i])]
        s = _dot(v, v)
        if s == 0:
            raise RankDeficient(j)
        ortho.append(v)
        sq.append(s)
        mu[j][j] = Fraction(1)

    norms = np.array([math.sqrt(s) for s in sq])
    R = np.zeros((n, n))
    for j in range(n):
        for i in range(j + 1):
            R[i, j] = float(mu[j][i]) * norms[i]
    Qthin = np.array([[float(o[r]) for o in ortho] for r in range(m)]) / norms
    if m > n:
        full, _ = np.linalg.qr(np.hstack([Qthin, np.eye(m)]), mode="reduced")
        Q = np.hstack([Qthin, full[:, n:m]])
    else:
        Q = Qthin
    Bf = np.array([[float(v) for v in r] for r in rows])
    err = float(np.max(np.abs(Bf - Q[:, :n] @ R))) if Bf.size else 0.0
    if err > QR_TOLERANCE * max(1.0, float(np.max(np.abs(Bf)))):
        raise RankDeficient(n - 1, f"QR reconstruction error {err:.3g} too large; basis is ill-conditioned")
    return LatticeBasis(tuple(cols), Q, R, norms, tuple(sq), tuple(tuple(r) for r in mu), err)


# --------------------------------------------------------------------------
# Hermite normal form and q-ary lattices


def lll_reduce(L: LatticeBasis, delta: float = 0.99) -> LatticeBasis:
    """LLL-reduced basis of the same integral lattice (integer column operations only)."""
    if not L.is_integral:
        raise ParamConstraint("LLL reduction here needs an integral basis")
    B = [list(map(int, col)) for col in L.int_matrix().T]
    n = len(B)

    def gso(B):
        Bf = np.array(B, dtype=float)
        bstar = np.zeros_like(Bf)
        mu = np.zeros((n, n))
        for i in range(n):
            v = Bf[i].copy()
            for j in range(i):
                mu[i, j] = Bf[i] @ bstar[j] / (bstar[j] @ bstar[j])
                v -= mu[i, j] * bstar[j]
            bstar[i] = v
        return mu, np.einsum("ij,ij->i", bstar, bstar)

    mu, bb = gso(B)
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            r = round(mu[k, j])
            if r:
                B[k] = [a - r * b for a, b in zip(B[k], B[j])]
                mu, bb = gso(B)
        if bb[k] >= (delta - mu[k, k - 1] ** 2) * bb[k - 1]:
            k += 1
        else:
            B[k], B[k - 1] = B[k - 1], B[k]
            mu, bb = gso(B)
            k = max(k - 1, 1)
    return gram_schmidt_qr(np.array(B, dtype=object).T.tolist())


def nearest_plane(L: LatticeBasis, x) -> np.ndarray:
    """Babai's nearest-plane coefficients for ``x`` (floating point)."""
    R = L.r_factor
    t = L.q_factor.T @ np.asarray(x, dtype=float)
    n = L.rank
    c = np.zeros(n)
    for i in range(n - 1, -1, -1):
        c[i] = round((t[i] - R[i, i + 1:] @ c[i + 1:]) / R[i, i])
    return c.astype(np.int64)


def hnf_columns(gens: Sequence[Sequence[int]], m: int) -> list[list[int]]:
    """Lower-triangular column HNF of the lattice generated by integer columns ``gens``.

    Returns ``m`` columns (lists of ints). The generated lattice must have full rank ``m``.
    """
    G = [list(map(int, g)) for g in gens]
    basis: list[list[int]] = []
    work = G
    for i in range(m):
        # gcd-combine the i-th entries of all remaining columns into one pivot column
        nz = [c for c in work if c[i] != 0]
        rest = [c for c in work if c[i] == 0]
        while len(nz) > 1:
            nz.sort(key=lambda c: abs(c[i]))
            p = nz[0]
            new = [p]
            for c in nz[1:]:
                f = c[i] // p[i]
                c = [a - f * b for a, b in zip(c, p)]
                (new if c[i] != 0 else rest).append(c)
            nz = new
        if not nz:
            raise RankDeficient(i, "generators do not span a full-rank lattice")
        piv = nz[0]
        if piv[i] < 0:
            piv = [-a for a in piv]
        basis.append(piv)
        work = rest
    # reduce entries below the diagonal into [0, pivot)
    for i in range(m):
        for j in range(i):
            col = basis[j]
            f = col[i] // basis[i][i]
            if f:
                basis[j] = [a - f * b for a, b in zip(col, basis[i])]
    return basis


def _factor_prime_power(q: int) -> tuple[int, int] | None:
    if q < 2:
        return None
    p = next((d for d in range(2, math.isqrt(q) + 1) if q % d == 0), q)
    k, r = 0, q
    while r % p == 0:
        r //= p
        k += 1
    return (p, k) if r == 1 else None


def rank_mod_p(A_rows: Sequence[Sequence[int]], p: int) -> int:
    a = [[int(v) % p for v in r] for r in A_rows]
    rank, cols = 0, len(a[0])
    for col in range(cols):
        sel = next((r for r in range(rank, len(a)) if a[r][col]), None)
        if sel is None:
            continue
        a[rank], a[sel] = a[sel], a[rank]
        inv = pow(a[rank][col], -1, p)
        a[rank] = [v * inv % p for v in a[rank]]
        for r in range(len(a)):
            if r != rank and a[r][col]:
                f = a[r][col]
                a[r] = [(x - f * y) % p for x, y in zip(a[r], a[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class QaryLattice:
    """``L_q(A) = A Z^n + q Z^m`` (primal) or ``L_q^perp(A) = {x : A^T x = 0 mod q}`` (kernel)."""

    a_matrix: tuple[tuple[int, ...], ...]
    modulus: int
    kind: str
    basis: LatticeBasis

    @property
    def m(self) -> int:
        return len(self.a_matrix)

    @property
    def n(self) -> int:
        return len(self.a_matrix[0])

    def contains(self, x: Sequence[int]) -> bool:
        x = [int(v) for v in x]
        q = self.modulus
        if self.kind == "kernel":
            return all(sum(self.a_matrix[i][j] * x[i] for i in range(self.m)) % q == 0 for j in range(self.n))
        return self.basis.contains(x)

    def companion(self) -> "QaryLattice":
        return qary_basis(self.a_matrix, self.modulus, "primal" if self.kind == "kernel" else "kernel")

    def to_json(self) -> dict:
        return {
            "q": self.modulus,
            "kind": self.kind,
            "A": [[str(v) for v in r] for r in self.a_matrix],
            "basis": self.basis.to_json()["columns"],
        }

    @classmethod
    def from_json(cls, data: dict) -> "QaryLattice":
        A = [[int(v) for v in r] for r in data["A"]]
        lat = qary_basis(A, int(data["q"]), data["kind"])
        if "basis" in data:
            stored = LatticeBasis.from_json({"columns": data["basis"]})
            lat = QaryLattice(lat.a_matrix, lat.modulus, lat.kind, stored)
        return lat


def qary_basis(A, q: int, kind: str = "kernel") -> QaryLattice:
    """Deterministic HNF basis of ``L_q(A)`` or ``L_q^perp(A)`` for an ``m x n`` matrix ``A``."""
    if kind not in ("primal", "kernel"):
        raise ParamConstraint(f"unknown lattice kind {kind!r}")
    pk = _factor_prime_power(int(q))
    if pk is None:
        raise ParamConstraint(f"modulus {q} is not a prime power")
    rows = [[int(v) % q for v in r] for r in (A.tolist() if isinstance(A, np.ndarray) else A)]
    m, n = len(rows), len(rows[0])
    if m < n:
        raise ParamConstraint("A must have at least as many rows as columns")
    r = rank_mod_p(rows, pk[0])
    if r < n:
        raise RankDeficient(r, f"A has rank {r} < {n} modulo {pk[0]}")
    gens = [[rows[i][j] for i in range(m)] for j in range(n)]
    gens += [[q * int(i == j) for i in range(m)] for j in range(m)]
    primal = hnf_columns(gens, m)
    if kind == "primal":
        cols = primal
    else:
        # kernel = q * (primal)^{-T}; integral because qZ^m lies in the primal lattice
        P = gram_schmidt_qr([[Fraction(primal[j][i]) for j in range(m)] for i in range(m)])
        D = P.dual()
        kcols = [[v * q for v in c] for c in D.columns]
        if any(v.denominator != 1 for c in kcols for v in c):
            raise RankDeficient(0, "kernel basis is not integral")
        cols = hnf_columns([[int(v) for v in c] for c in kcols], m)
    basis = gram_schmidt_qr([[cols[j][i] for j in range(m)] for i in range(m)])
    return QaryLattice(tuple(tuple(r) for r in rows), int(q), kind, basis)


# --------------------------------------------------------------------------
# enumeration helpers


def box_points(lo: Sequence[int], hi: Sequence[int]) -> np.ndarray:
    """All integer points of ``prod [lo_i, hi_i]`` as rows, first coordinate slowest."""
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
    grids = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in grids], axis=1)


def iter_box(lo: Sequence[int], hi: Sequence[int], chunk: int = 1 << 20) -> Iterator[np.ndarray]:
    """Yield the points of a coefficient box in row blocks of bounded size."""
    lo, hi = list(lo), list(hi)
    sizes = [b - a + 1 for a, b in zip(lo, hi)]
    if any(s <= 0 for s in sizes):
        return
    split = len(sizes)
    inner = 1
    while split > 0 and inner * sizes[split - 1] <= chunk:
        split -= 1
        inner *= sizes[split]
    if split == 0:
        yield box_points(lo, hi)
        return
    tail = box_points(lo[split:], hi[split:]) if split < len(sizes) else np.zeros((1, 0), dtype=np.int64)
    for head in itertools.product(*[range(a, b + 1) for a, b in zip(lo[:split], hi[:split])]):
        h = np.broadcast_to(np.array(head, dtype=np.int64), (tail.shape[0], split))
        yield np.hstack([h, tail])


def box_size(lo: Sequence[int], hi: Sequence[int]) -> int:
    return math.prod(max(0, b - a + 1) for a, b in zip(lo, hi))


def enumerate_ball(
    L: LatticeBasis, radius: float, center=None, budget: int = DEFAULT_BUDGET
) -> np.ndarray:
    """Coefficient vectors ``x`` with ``||Bx - center|| <= radius`` (Fincke-Pohst enumeration).

    A small relative slack is added to the radius so that no point is lost to
    rounding; callers that need exactness recheck norms with integer arithmetic.
    Returns an ``(k, n)`` integer array.
    """
    n = L.rank
    R = L.r_factor
    if center is None:
        t = np.zeros(n)
        resid = 0.0
    else:
        c = np.asarray([float(v) for v in center])
        full = L.q_factor.T @ c
        t = full[:n]
        resid = float(np.sum(full[n:] ** 2))
    r2 = radius * radius * (1 + 1e-9) + 1e-12 - resid
    if r2 < 0:
        return np.zeros((0, n), dtype=np.int64)
    blocks: list[np.ndarray] = []
    x = np.zeros(n, dtype=np.int64)
    nodes = 0

    def rec(i: int, partial: float):
        nonlocal nodes
        s = t[i] - float(R[i, i + 1:] @ x[i + 1:])
        ctr = s / R[i, i]
        span = math.sqrt(max(0.0, r2 - partial)) / R[i, i]
        lo, hi = math.ceil(ctr - span), math.floor(ctr + span)
        if hi < lo:
            return
        nodes += hi - lo + 1
        if nodes > budget:
            raise EnumerationBudgetExceeded(nodes, budget)
        if i == 0:
            vals = np.arange(lo, hi + 1, dtype=np.int64)
            d = (vals - ctr) * R[0, 0]
            vals = vals[partial + d * d <= r2]
            if vals.size:
                blk = np.broadcast_to(x, (vals.size, n)).copy()
                blk[:, 0] = vals
                blocks.append(blk)
            return
        for v in range(lo, hi + 1):
            d = (v - ctr) * R[i, i]
            p = partial + d * d
            if p > r2:
                continue
            x[i] = v
            rec(i - 1, p)
        x[i] = 0

    rec(n - 1, 0.0)
    return np.vstack(blocks) if blocks else np.zeros((0, n), dtype=np.int64)


def _exact_sq_norm(L: LatticeBasis, coeffs, center=None) -> Fraction:
    v = L.vector(coeffs)
    if center is not None:
        v = [a - _as_fraction(c) for a, c in zip(v, center)]
    return sum(a * a for a in v)


def shortest_vector(L: LatticeBasis, radius_bound: float, budget: int = DEFAULT_BUDGET):
    """Return ``(squared_norm, coefficient_vector)`` of a shortest nonzero vector within the bound."""
    n = L.rank
    # start near the Gaussian heuristic and grow, so the ball stays small
    gh = math.exp((math.lgamma(n / 2 + 1) + math.log(L.volume())) / n) / math.sqrt(math.pi)
    r = min(radius_bound, 0.8 * gh)
    while True:
        pts = enumerate_ball(L, r, budget=budget)
        pts = pts[np.any(pts != 0, axis=1)]
        if len(pts) or r >= radius_bound:
            break
        r = min(radius_bound, r * 1.25)
    if not len(pts):
        raise NoVectorInRadius(f"no nonzero lattice vector of norm <= {radius_bound}")
    fl = np.sum((pts @ L.matrix.T) ** 2, axis=1)
    near = pts[fl <= fl.min() * (1 + 1e-9) + 1e-9]
    best = min(((_exact_sq_norm(L, tuple(x)), tuple(x)) for x in near.tolist()), key=lambda p: p[0])
    if best[0] > Fraction(radius_bound) ** 2 * (1 + Fraction(1, 10**9)):
        raise NoVectorInRadius(f"no nonzero lattice vector of norm <= {radius_bound}")
    return best


def lambda1_bruteforce(L: LatticeBasis, radius_bound: float, budget: int = DEFAULT_BUDGET) -> float:
    """Exact first minimum of ``L`` provided it is at most ``radius_bound``."""
    s, _ = shortest_vector(L, radius_bound, budget)
    return math.sqrt(s)


def distance_to_lattice(L: LatticeBasis, target, radius_bound: float | None = None, budget: int = DEFAULT_BUDGET):
    """Euclidean distance from ``target`` to ``L`` and a closest coefficient vector."""
    target = [_as_fraction(v) for v in target]
    if radius_bound is None:
        # Babai rounding gives an upper bound on the distance
        coeff = np.linalg.lstsq(L.matrix, np.array([float(v) for v in target]), rcond=None)[0]
        guess = np.rint(coeff).astype(int)
        radius_bound = math.sqrt(float(_exact_sq_norm(L, guess, target))) + 1e-9
    cands = [tuple(x) for x in enumerate_ball(L, radius_bound, center=target, budget=budget).tolist()]
    if not cands:
        raise NoVectorInRadius(f"no lattice vector within {radius_bound} of target")
    best = min(((_exact_sq_norm(L, x, target), x) for x in cands), key=lambda p: p[0])
    return math.sqrt(best[0]), best[1]


def dual_scale_check(L: QaryLattice, box_radius: int = 2) -> bool:
    """Check that ``(1/q) L_q(A)`` pairs integrally with ``L_q^perp(A)`` on enumerated boxes.

    Also checks ``det(L_q^perp) * det(L_q) = q^m``, which together with the
    pairing pins the kernel lattice down as the scaled dual.
    """
    if L.kind != "kernel":
        raise ParamConstraint("dual_scale_check expects a kernel-kind lattice")
    primal = L.companion()
    if not (L.basis.is_integral and primal.basis.is_integral):
        return False
    r = box_radius
    Kb, Pb = L.basis.int_matrix(), primal.basis.int_matrix()
    q = L.modulus
    for chunk in iter_box([-r] * L.basis.rank, [r] * L.basis.rank, chunk=1 << 14):
        X = chunk @ Kb.T
        for pchunk in iter_box([-r] * primal.basis.rank, [r] * primal.basis.rank, chunk=1 << 14):
            Y = pchunk @ Pb.T
            if np.any((X @ Y.T) % q):
                return False
    try:
        dk, dp = L.basis.determinant(), primal.basis.determinant()
    except ParamConstraint:
        return False
    return dk * dp == q**L.m


def matrix_to_json(M) -> list[list[str]]:
    return [[str(_as_fraction(v)) for v in r] for r in (M.tolist() if isinstance(M, np.ndarray) else M)]


def matrix_from_json(rows) -> list[list[Fraction]]:
    return [[Fraction(v) for v in r] for r in rows]


def dumps_basis(L: LatticeBasis) -> str:
    return json.dumps(L.to_json())
