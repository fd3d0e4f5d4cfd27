import itertools
from fractions import Fraction
from math import gcd

import numpy as np
import pytest
import sympy
from hypothesis import given, settings, strategies as st

from svsecant import exact
from svsecant.exact import LatticeBasis


def matrices(max_rows=4, max_cols=4, lo=-6, hi=6):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(
            lambda c: st.lists(st.lists(st.integers(lo, hi), min_size=c, max_size=c), min_size=r, max_size=r)
        )
    )


def det_divisors(m):
    """Invariant factors from gcds of k x k minors (independent of any elimination)."""
    M = sympy.Matrix(m)
    r, c = M.shape
    out, prev = [], 1
    for k in range(1, min(r, c) + 1):
        g = 0
        for rows in itertools.combinations(range(r), k):
            for cols in itertools.combinations(range(c), k):
                g = gcd(g, int(M.extract(list(rows), list(cols)).det()))
        if g == 0:
            break
        out.append(g // prev)
        prev = g
    return out


def matmul(A, B):
    return [[sum(a * b for a, b in zip(row, col)) for col in zip(*B)] for row in A]


@settings(max_examples=600, deadline=None)
@given(matrices())
def test_hnf_invariants(m):
    H, U = exact.hnf(m)
    assert matmul(U, m) == H
    assert abs(int(sympy.Matrix(U).det())) == 1
    r = 0
    last = -1
    for row in H:
        nz = [j for j, x in enumerate(row) if x]
        if not nz:
            r += 1
            continue
        assert r == 0, "zero rows must come last"
        p = nz[0]
        assert p > last and row[p] > 0
        last = p
    for i, row in enumerate(H):
        nz = [j for j, x in enumerate(row) if x]
        if nz:
            p = nz[0]
            for above in H[:i]:
                assert 0 <= above[p] < row[p]


@settings(max_examples=600, deadline=None)
@given(matrices())
def test_snf_matches_determinantal_divisors(m):
    d = exact.snf(m)
    assert d == det_divisors(m)
    assert all(b % a == 0 for a, b in zip(d, d[1:]))


@settings(max_examples=300, deadline=None)
@given(matrices(3, 3))
def test_snf_invariant_under_unimodular_change(m):
    rng = np.random.default_rng(sum(abs(x) for row in m for x in row))
    U = np.eye(len(m), dtype=np.int64)
    for _ in range(4):
        i, j = rng.choice(len(m), 2, replace=len(m) < 2)
        if i != j:
            U[i] += int(rng.integers(-2, 3)) * U[j]
    mm = matmul(U.tolist(), m)
    assert exact.snf(mm) == exact.snf(m)


@settings(max_examples=200, deadline=None)
@given(matrices(4, 4))
def test_det_matches_sympy(m):
    n = min(len(m), len(m[0]))
    sq = [row[:n] for row in m[:n]]
    assert exact.det(sq) == int(sympy.Matrix(sq).det())


@settings(max_examples=200, deadline=None)
@given(matrices(3, 5))
def test_nullspace_and_rank(m):
    ker = exact.nullspace(m, len(m[0]))
    assert exact.rank(m) == sympy.Matrix(m).rank()
    assert len(ker) == len(m[0]) - exact.rank(m)
    for v in ker:
        assert all(sum(a * b for a, b in zip(row, v)) == 0 for row in m)
        assert gcd(*v) == 1


@settings(max_examples=200, deadline=None)
@given(matrices(3, 4), st.lists(st.integers(-5, 5), min_size=4, max_size=4))
def test_integer_solve(m, x):
    x = x[: len(m[0])]
    rhs = [sum(a * b for a, b in zip(row, x)) for row in m]
    sol = exact.integer_solve(m, rhs)
    assert sol is not None
    assert [sum(a * b for a, b in zip(row, sol)) for row in m] == rhs


def test_integer_solve_detects_no_integral_solution():
    assert exact.integer_solve([[2, 4]], [3]) is None
    part, ker = exact.solve_affine([[2, 4]], [3])
    assert 2 * part[0] + 4 * part[1] == 3


def test_primitive_orientation():
    assert exact.primitive([0, -4, 6]) == [0, -2, 3]
    assert exact.primitive([0, -4, 6], oriented=False) == [0, 2, -3]
    with pytest.raises(ValueError):
        exact.primitive([0, 0])


@settings(max_examples=200, deadline=None)
@given(matrices(4, 3, -4, 4))
def test_lattice_membership(gens):
    if not any(any(r) for r in gens):
        return
    L = LatticeBasis.from_generators(gens)
    for g in gens:
        assert L.contains(g)
        c = L.coordinates(g)
        assert [sum(ci * b[j] for ci, b in zip(c, L.basis)) for j in range(len(g))] == list(g)
    s = [sum(col) for col in zip(*gens)]
    assert L.contains(s)
    X = np.array(gens, dtype=np.int64)
    assert L.contains_rows(X).all()
    assert L.rank == sympy.Matrix(gens).rank()


def test_lattice_index_two():
    L = LatticeBasis.from_generators([[2, 0], [0, 1]])
    assert not L.contains([1, 0])
    assert not L.is_saturated()
    assert LatticeBasis.standard(3).is_saturated()
    with pytest.raises(ValueError):
        L.coordinates_rows(np.array([[1, 0]]))


def test_exact_product_big_entries():
    X = np.array([[2**40, 1]], dtype=object)
    C = np.array([[2**40, 3]], dtype=object)
    assert exact.exact_product(X, C)[0][0] == 2**80 + 3


def test_lattice_point_in_affine_set():
    # x + y = 1 over 2Z x Z: (0, 1) works
    L = LatticeBasis.from_generators([[2, 0], [0, 1]])
    part = [Fraction(1, 2), Fraction(1, 2)]
    ker = [[Fraction(1), Fraction(-1)]]
    pt = exact.lattice_point_in_affine_set(part, ker, L)
    assert pt is not None and L.contains(pt) and sum(pt) == 1
    # x = 1/2 has no lattice point
    assert exact.lattice_point_in_affine_set([Fraction(1, 2)], [], LatticeBasis.standard(1)) is None
