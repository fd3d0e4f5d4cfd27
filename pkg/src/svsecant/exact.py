"""Exact integer and rational linear algebra.

Everything here works on Python ints and ``fractions.Fraction``.  Large
tall matrices (hundreds of thousands of lattice points) are handled with
numpy ``int64`` arrays, but only through exact integer products guarded
against overflow; no floating point is used.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from fractions import Fraction
from math import gcd
from typing import Iterable, Optional, Sequence

import numpy as np

__all__ = [
    "hnf",
    "snf",
    "solve_affine",
    "integer_solve",
    "lattice_point_in_affine_set",
    "primitive",
    "rank",
    "rank_mod_p_stack",
    "independent_rows",
    "nullspace",
    "LatticeBasis",
    "det",
]

_INT64_SAFE = 1 << 62
_FLOAT_EXACT = 1 << 52
_PRIME = 2_147_483_647
_SMALL = 48


def _as_rows(m) -> list[list[int]]:
    if isinstance(m, np.ndarray):
        return [[int(x) for x in row] for row in m.tolist()]
    return [[int(x) for x in row] for row in m]


def _identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def hnf(m) -> tuple[list[list[int]], list[list[int]]]:
    """Row-style Hermite normal form.

    Returns ``(H, U)`` with ``U`` unimodular and ``U @ m == H``.  Nonzero rows
    of ``H`` come first, pivots are positive, and entries above a pivot lie
    in ``[0, pivot)``.

    >>> hnf([[2, 4], [1, 1]])[0]
    [[1, 1], [0, 2]]
    """
    A = _as_rows(m)
    rows = len(A)
    cols = len(A[0]) if rows else 0
    U = _identity(rows)

    def sub(i: int, k: int, q: int) -> None:
        # row_i -= q * row_k
        if q:
            Ai, Ak, Ui, Uk = A[i], A[k], U[i], U[k]
            for c in range(cols):
                Ai[c] -= q * Ak[c]
            for c in range(rows):
                Ui[c] -= q * Uk[c]

    def swap(i: int, k: int) -> None:
        if i != k:
            A[i], A[k] = A[k], A[i]
            U[i], U[k] = U[k], U[i]

    r = 0
    for c in range(cols):
        if r == rows:
            break
        while True:
            nz = [i for i in range(r, rows) if A[i][c] != 0]
            if not nz:
                break
            swap(r, min(nz, key=lambda i: abs(A[i][c])))
            p = A[r][c]
            clean = True
            for i in range(r + 1, rows):
                if A[i][c]:
                    sub(i, r, A[i][c] // p)
                    if A[i][c]:
                        clean = False
            if clean:
                break
        if A[r][c] == 0:
            continue
        if A[r][c] < 0:
            A[r] = [-x for x in A[r]]
            U[r] = [-x for x in U[r]]
        p = A[r][c]
        for i in range(r):
            sub(i, r, A[i][c] // p)
        r += 1
    return A, U


def snf(m) -> list[int]:
    """Nonzero invariant factors ``d_1 | d_2 | ...`` of an integer matrix."""
    A = _as_rows(m)
    rows = len(A)
    cols = len(A[0]) if rows else 0
    factors = []
    t = 0
    while t < min(rows, cols):
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                if A[i][j] and (best is None or abs(A[i][j]) < abs(A[best[0]][best[1]])):
                    best = (i, j)
        if best is None:
            break
        i, j = best
        A[t], A[i] = A[i], A[t]
        for row in A:
            row[t], row[j] = row[j], row[t]
        while True:
            p = A[t][t]
            changed = False
            for i in range(t + 1, rows):
                if A[i][t]:
                    q = A[i][t] // p
                    A[i] = [x - q * y for x, y in zip(A[i], A[t])]
                    if A[i][t]:
                        changed = True
            for j in range(t + 1, cols):
                if A[t][j]:
                    q = A[t][j] // p
                    for row in A:
                        row[j] -= q * row[t]
                    if A[t][j]:
                        changed = True
            if changed:
                # move the smallest remaining entry of row/column t to the pivot
                cand = [(abs(A[i][t]), i, t) for i in range(t, rows) if A[i][t]]
                cand += [(abs(A[t][j]), t, j) for j in range(t, cols) if A[t][j]]
                _, i, j = min(cand)
                A[t], A[i] = A[i], A[t]
                for row in A:
                    row[t], row[j] = row[j], row[t]
                continue
            bad = next(
                ((i, j) for i in range(t + 1, rows) for j in range(t + 1, cols) if A[i][j] % p),
                None,
            )
            if bad is None:
                break
            A[t] = [x + y for x, y in zip(A[t], A[bad[0]])]
        factors.append(abs(A[t][t]))
        t += 1
    return factors


def det(m) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    A = _as_rows(m)
    n = len(A)
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if A[k][k] == 0:
            sw = next((i for i in range(k + 1, n) if A[i][k]), None)
            if sw is None:
                return 0
            A[k], A[sw] = A[sw], A[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                A[i][j] = (A[i][j] * A[k][k] - A[i][k] * A[k][j]) // prev
        prev = A[k][k]
    return sign * A[n - 1][n - 1]


def _rref(rows: list[list[Fraction]], ncols: int) -> tuple[list[list[Fraction]], list[int]]:
    A = [list(r) for r in rows]
    pivots = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c] != 0), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        inv = 1 / A[r][c]
        A[r] = [x * inv for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c] != 0:
                f = A[i][c]
                A[i] = [x - f * y for x, y in zip(A[i], A[r])]
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], pivots


def _to_fractions(m) -> list[list[Fraction]]:
    return [[Fraction(x) for x in row] for row in m]


def nullspace(m, ncols: Optional[int] = None) -> list[list[int]]:
    """Integer basis (primitive vectors) of the rational kernel ``{x : m x = 0}``."""
    rows = [list(r) for r in m]
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    if all(isinstance(x, (int, np.integer)) for r in rows for x in r):
        return _nullspace_int([[int(x) for x in r] for r in rows], ncols)
    R, pivots = _rref(_to_fractions(rows), ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        basis.append(primitive(_clear_denominators(v)))
    return basis


def _nullspace_int(rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Same basis as the rational reduction, by fraction-free Gauss-Jordan."""
    A = [primitive(r) if any(r) else r for r in rows]
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        p = next((i for i in range(r, len(A)) if A[i][c]), None)
        if p is None:
            continue
        A[r], A[p] = A[p], A[r]
        pr = A[r]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f, g = A[i][c], pr[c]
                row = [x * g - y * f for x, y in zip(A[i], pr)]
                A[i] = primitive(row) if any(row) else row
        pivots.append(c)
        r += 1
        if r == len(A):
            break
    A = A[:r]
    basis = []
    for f in (c for c in range(ncols) if c not in pivots):
        L = 1
        for row, pc in zip(A, pivots):
            L = L * abs(row[pc]) // gcd(L, abs(row[pc]))
        v = [0] * ncols
        v[f] = L
        for row, pc in zip(A, pivots):
            v[pc] = -row[f] * L // row[pc]
        basis.append(primitive(v))
    return basis


def _clear_denominators(v: Sequence[Fraction]) -> list[int]:
    lcm = 1
    for x in v:
        d = Fraction(x).denominator
        lcm = lcm * d // gcd(lcm, d)
    return [int(Fraction(x) * lcm) for x in v]


def solve_affine(A, rhs) -> Optional[tuple[list[Fraction], list[list[Fraction]]]]:
    """Full rational solution set of ``A x = rhs``.

    Returns ``(particular, kernel_basis)`` or ``None`` when inconsistent.
    """
    A = [list(r) for r in A]
    ncols = len(A[0]) if A else 0
    aug = [[Fraction(x) for x in row] + [Fraction(b)] for row, b in zip(A, rhs)]
    R, pivots = _rref(aug, ncols + 1)
    if ncols in pivots:
        return None
    particular = [Fraction(0)] * ncols
    for row, pc in zip(R, pivots):
        particular[pc] = row[ncols]
    kernel = []
    for f in (c for c in range(ncols) if c not in pivots):
        v = [Fraction(0)] * ncols
        v[f] = Fraction(1)
        for row, pc in zip(R, pivots):
            v[pc] = -row[f]
        kernel.append(v)
    return particular, kernel


def integer_solve(A, rhs) -> Optional[list[int]]:
    """Some integer ``c`` with ``A c = rhs``, or ``None``.

    ``A`` and ``rhs`` must be integral.  Uses the HNF of ``A^T``: with
    ``U A^T = H`` the substitution ``c = U^T y`` turns the system into
    writing ``rhs`` as an integer combination of the rows of ``H``.
    """
    A = _as_rows(A)
    p = len(A)
    q = len(A[0]) if p else 0
    target = [int(x) for x in rhs]
    if q == 0:
        return [] if all(x == 0 for x in target) else None
    AT = [[A[i][j] for i in range(p)] for j in range(q)]
    H, U = hnf(AT)
    y = [0] * q
    residual = list(target)
    for i, row in enumerate(H):
        pc = next((c for c, x in enumerate(row) if x), None)
        if pc is None:
            break
        if any(residual[c] for c in range(pc)):
            return None
        if residual[pc] % row[pc]:
            return None
        y[i] = residual[pc] // row[pc]
        residual = [r - y[i] * x for r, x in zip(residual, row)]
    if any(residual):
        return None
    return [sum(U[i][j] * y[i] for i in range(q)) for j in range(q)]


def primitive(v: Sequence[int], oriented: bool = True) -> list[int]:
    """Divide an integer vector by the gcd of its entries.

    With ``oriented=False`` the sign is normalised so the first nonzero
    entry is positive.
    """
    v = [int(x) for x in v]
    g = 0
    for x in v:
        g = gcd(g, x)
    if g == 0:
        raise ValueError("primitive() of the zero vector")
    out = [x // g for x in v]
    if not oriented and next(x for x in out if x) < 0:
        out = [-x for x in out]
    return out


# --- tall matrices -----------------------------------------------------------

def _matmul_exact(X: np.ndarray, C: np.ndarray) -> np.ndarray:
    """``X @ C.T`` computed exactly."""
    if X.size == 0 or C.size == 0:
        return np.zeros((X.shape[0], C.shape[0]), dtype=np.int64)
    # decide by magnitude, not storage dtype: object arrays of small ints are common
    bound = int(np.abs(X).max()) * int(np.abs(C).max()) * X.shape[1]
    if bound < _FLOAT_EXACT:
        # every partial sum is an integer below 2^52, so float64 (BLAS) is exact
        return np.rint(X.astype(np.float64) @ C.astype(np.float64).T).astype(np.int64)
    if bound < _INT64_SAFE:
        return X.astype(np.int64) @ C.astype(np.int64).T
    return X.astype(object) @ C.astype(object).T


def exact_product(X, C) -> np.ndarray:
    """``X @ C.T`` for integer arrays, in int64 when that cannot overflow."""
    return _matmul_exact(np.asarray(X), np.asarray(C))


def _small_independent(rows: list[list[int]]) -> list[int]:
    """Indices of a maximal independent subset, greedy in order.

    Fraction-free elimination: each stored row is primitive with a positive
    pivot, and incoming rows are cross-multiplied against it.
    """
    basis: list[tuple[int, list[int]]] = []
    chosen = []
    for idx, r in enumerate(rows):
        v = [int(x) for x in r]
        for pc, b in basis:
            if v[pc]:
                f, p = v[pc], b[pc]
                g = gcd(f, p)
                f, p = f // g, p // g
                v = [p * x - f * y for x, y in zip(v, b)]
        pc = next((c for c, x in enumerate(v) if x), None)
        if pc is None:
            continue
        g = 0
        for x in v:
            g = gcd(g, x)
        if v[pc] < 0:
            g = -g
        v = [x // g for x in v]
        basis.append((pc, v))
        chosen.append(idx)
    return chosen


def independent_rows(X) -> list[int]:
    """Indices of a maximal linearly independent set of rows of ``X``.

    For tall arrays a small sample is reduced exactly and every other row is
    certified to lie in its span through an exact product with an integer
    basis of the orthogonal complement; rows that fail are added and the
    loop repeats.  The result is exact, only the work is sampled.
    """
    X = np.asarray(X)
    if X.ndim != 2:
        raise ValueError("expected a 2-d array")
    N, d = X.shape
    if N == 0 or d == 0:
        return []
    if N <= _SMALL:
        return _small_independent(_as_rows(X))
    step = max(1, N // (2 * d + 2))
    sample = list(range(0, N, step))[: 2 * d + 2]
    while True:
        chosen = [sample[i] for i in _small_independent(_as_rows(X[sample]))]
        if len(chosen) == d:
            return sorted(chosen)
        C = np.array(nullspace(_as_rows(X[chosen]), d), dtype=object)
        C = C.astype(np.int64) if int(np.abs(C).max()) < (1 << 40) else C
        bad = np.nonzero(np.any(_matmul_exact(X, C) != 0, axis=1))[0]
        if bad.size == 0:
            return sorted(chosen)
        sample = chosen + [int(i) for i in bad[: d]]


def rank(X) -> int:
    """Exact rank of an integer matrix (list of rows or 2-d array)."""
    if not isinstance(X, np.ndarray):
        X = _as_rows(X)
        if not X:
            return 0
        big = max((abs(x) for r in X for x in r), default=0) >= _INT64_SAFE >> 16
        X = np.array(X, dtype=object if big else np.int64)
    if X.ndim != 2 or X.shape[0] == 0:
        return 0
    if X.dtype == object:
        return len(_small_independent(_as_rows(X)))
    return len(independent_rows(X))


def _pow_mod(a: np.ndarray, e: int, p: int) -> np.ndarray:
    out = np.ones_like(a)
    base = a % p
    while e:
        if e & 1:
            out = out * base % p
        base = base * base % p
        e >>= 1
    return out


def rank_mod_p_stack(A, p: int = _PRIME) -> np.ndarray:
    """Ranks over ``GF(p)`` of a stack of integer matrices, shape ``(C, R, d)``.

    The rank mod ``p`` never exceeds the rational rank, so a full mod-``p``
    rank certifies full rational rank.  ``p`` must be below ``2^31``.
    """
    A = np.asarray(A, dtype=np.int64) % p
    C, R, d = A.shape
    rank = np.zeros(C, dtype=np.int64)
    used = np.zeros((C, R), dtype=bool)
    every = np.arange(C)
    for c in range(d):
        cand = (A[:, :, c] != 0) & ~used
        has = cand.any(axis=1)
        if not has.any():
            continue
        idx = every[has]
        piv = cand[idx].argmax(axis=1)
        prow = A[idx, piv, :]
        prow = prow * _pow_mod(prow[:, c], p - 2, p)[:, None] % p
        f = A[idx, :, c]
        A[idx] = (A[idx] - f[:, :, None] * prow[:, None, :] % p) % p
        A[idx, piv, :] = prow
        used[idx, piv] = True
        rank[idx] += 1
    return rank


# --- lattices ----------------------------------------------------------------

@dataclass(frozen=True)
class LatticeBasis:
    """Sublattice of ``Z^ambient`` stored by its canonical row HNF basis."""

    ambient: int
    basis: tuple[tuple[int, ...], ...]

    @property
    def rank(self) -> int:
        return len(self.basis)

    @classmethod
    def standard(cls, n: int) -> "LatticeBasis":
        return cls(n, tuple(tuple(int(i == j) for j in range(n)) for i in range(n)))

    @classmethod
    def from_generators(cls, gens, ambient: Optional[int] = None) -> "LatticeBasis":
        """Lattice generated by the rows of ``gens`` (any number of rows)."""
        X = np.asarray(gens)
        if X.ndim != 2 or X.shape[0] == 0:
            if ambient is None:
                raise ValueError("ambient dimension needed for an empty generator set")
            return cls(ambient, ())
        ambient = X.shape[1]
        if X.shape[0] <= _SMALL or X.dtype == object:
            return cls(ambient, _hnf_basis(_as_rows(X)))
        S = X[independent_rows(X)]
        while True:
            lat = cls(ambient, _hnf_basis(_as_rows(S)))
            outside = np.nonzero(~lat.contains_rows(X))[0]
            if outside.size == 0:
                return lat
            S = np.vstack([np.array(lat.basis, dtype=X.dtype), X[outside[: ambient]]])

    def contains(self, v: Sequence[int]) -> bool:
        if len(v) != self.ambient:
            raise ValueError("dimension mismatch")
        if any(Fraction(x).denominator != 1 for x in v):
            return False
        if not self.basis:
            return not any(v)
        return integer_solve([list(col) for col in zip(*self.basis)], [int(x) for x in v]) is not None

    def coordinates(self, v: Sequence[int]) -> Optional[list[int]]:
        """Integer coordinates of ``v`` in this basis, or ``None``."""
        if not self.basis:
            return [] if not any(v) else None
        return integer_solve([list(col) for col in zip(*self.basis)], [int(x) for x in v])

    @cached_property
    def _coordinate_map(self):
        """``(complement, pivots, M, D)`` with coordinates ``x[pivots] @ M / D``."""
        B = [list(r) for r in self.basis]
        comp = nullspace(B, self.ambient)
        pivots = [next(c for c, x in enumerate(r) if x) for r in B]
        inv = _inverse([[r[c] for c in pivots] for r in B])
        D = 1
        for row in inv:
            for x in row:
                D = D * x.denominator // gcd(D, x.denominator)
        M = np.array([[int(x * D) for x in row] for row in inv], dtype=object)
        comp = np.array(comp, dtype=object).reshape(len(comp), self.ambient)
        return comp, pivots, M, D

    def _scaled_coordinates(self, X: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        comp, pivots, M, D = self._coordinate_map
        ok = np.ones(X.shape[0], dtype=bool)
        if len(comp):
            ok &= ~np.any(_matmul_exact(X, comp) != 0, axis=1)
        # _matmul_exact(A, C) is A @ C.T
        scaled = _matmul_exact(X[:, pivots], M.T)
        ok &= np.all(scaled % D == 0, axis=1).astype(bool)
        return scaled, ok

    def contains_rows(self, X: np.ndarray) -> np.ndarray:
        """Vectorised membership test for the rows of an integer array."""
        X = np.asarray(X)
        if not self.basis:
            return ~np.any(X != 0, axis=1)
        return self._scaled_coordinates(X)[1]

    def coordinates_rows(self, X: np.ndarray) -> np.ndarray:
        """Integer coordinates of each row of ``X``; every row must be in the lattice."""
        X = np.asarray(X)
        if not self.basis:
            if np.any(X != 0):
                raise ValueError("rows outside the lattice")
            return np.zeros((X.shape[0], 0), dtype=np.int64)
        scaled, ok = self._scaled_coordinates(X)
        if not ok.all():
            raise ValueError("rows outside the lattice")
        return scaled // self._coordinate_map[3]

    def is_saturated(self) -> bool:
        """True when the lattice equals its span intersected with ``Z^ambient``."""
        return all(d == 1 for d in snf(self.basis))


def _hnf_basis(rows: list[list[int]]) -> tuple[tuple[int, ...], ...]:
    H, _ = hnf(rows)
    return tuple(tuple(r) for r in H if any(r))


def _inverse(M: list[list[int]]) -> list[list[Fraction]]:
    n = len(M)
    aug = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(M)]
    R, pivots = _rref(aug, n)
    if pivots != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return [row[n:] for row in R]


def lattice_point_in_affine_set(
    particular: Sequence[Fraction],
    kernel_basis: Iterable[Sequence[Fraction]],
    lattice: LatticeBasis,
) -> Optional[list[int]]:
    """A point of ``lattice`` inside ``particular + span(kernel_basis)``.

    The affine set is cut out by integer equations ``M x = M particular``
    (rows of ``M`` span the annihilator of the kernel); writing
    ``x = c B`` for the lattice basis ``B`` leaves an integer linear system
    in ``c`` that is solved through the HNF.
    """
    n = lattice.ambient
    p = [Fraction(x) for x in particular]
    if len(p) != n:
        raise ValueError("dimension mismatch")
    K = [[Fraction(x) for x in k] for k in kernel_basis]
    if K:
        M = nullspace([_clear_denominators(k) for k in K], n)
    else:
        M = [list(r) for r in LatticeBasis.standard(n).basis]
    target = [sum(Fraction(mi) * pi for mi, pi in zip(row, p)) for row in M]
    if any(t.denominator != 1 for t in target):
        return None
    B = [list(r) for r in lattice.basis]
    if not B:
        return [0] * n if not any(target) else None
    MB = [[sum(mi * b[j] for j, mi in enumerate(row)) for b in B] for row in M]
    if not M:
        c = [0] * len(B)
    else:
        c = integer_solve(MB, [int(t) for t in target])
        if c is None:
            return None
    return [sum(ci * b[j] for ci, b in zip(c, B)) for j in range(n)]
