import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from svsecant.polytope import (
    Inequality,
    InstanceTooLarge,
    Label,
    LatticePolytope,
    affine_rank,
    enumerate_points,
)


def box_polytope(lo, hi, extra=()):
    n = len(lo)
    ineqs = []
    for i in range(n):
        e = [0] * n
        e[i] = 1
        ineqs.append(Inequality(tuple(e), lo[i], Label.other(f"lo{i}")))
        ineqs.append(Inequality(tuple(-x for x in e), -hi[i], Label.other(f"hi{i}")))
    ineqs.extend(extra)
    return LatticePolytope(ineqs, list(zip(lo, hi)))


def simplex(n, s=1):
    ineqs = [Inequality(tuple(int(i == j) for j in range(n)), 0, Label.Z(1, i + 1)) for i in range(n)]
    ineqs.append(Inequality(tuple([-1] * n), -s, Label.F()))
    return LatticePolytope(ineqs, [(0, s)] * n)


def brute_points(ineqs, box):
    out = []
    for x in itertools.product(*[range(a, b + 1) for a, b in box]):
        if all(sum(u * xi for u, xi in zip(q.normal, x)) >= q.rhs for q in ineqs):
            out.append(x)
    return sorted(out)


def hull_2d(points):
    """Andrew's monotone chain, strict vertices only."""
    pts = sorted(set(points))
    if len(pts) <= 2:
        return set(pts)

    def cross(o, a, b):
        return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])

    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and cross(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and cross(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    return set(lower[:-1] + upper[:-1])


def test_label_round_trip():
    for text in ("F", "R3", "Z2,4"):
        assert str(Label.parse(text)) == text
    assert Label.R(2) < Label.Z(1, 1) or Label.Z(1, 1) < Label.R(2)


def test_unit_cube():
    P = box_polytope([0, 0, 0], [1, 1, 1])
    assert len(P) == 8 and P.dim == 3
    assert len(P.facet_indices) == 6
    assert len(P.vertices()) == 8
    f = [0] * 4
    for F in P.faces():
        f[F.dim] += 1
    assert f == [8, 12, 6, 1]


def test_simplex_faces_and_cone():
    P = simplex(3, 2)
    assert len(P) == 10
    assert sorted(P.vertices()) == [(0, 0, 0), (0, 0, 2), (0, 2, 0), (2, 0, 0)]
    assert P.facet_label_set == frozenset({"F", "Z1,1", "Z1,2", "Z1,3"})
    assert len(P.faces()) == 15
    cd = P.cone_data()
    assert cd.dim == 4 and len(cd.facet_normals_lambda) == 4
    # every ray pairs non-negatively with every facet normal
    for r in cd.rays_lambda:
        for w in cd.facet_normals_lambda:
            assert sum(a * b for a, b in zip(r, w)) >= 0


def test_lower_dimensional_polytope():
    # segment x + y = 2 inside the square
    extra = [
        Inequality((1, 1), 2, Label.other("s1")),
        Inequality((-1, -1), -2, Label.other("s2")),
    ]
    P = box_polytope([0, 0], [2, 2], extra)
    assert P.dim == 1
    assert len(P.facet_indices) == 2
    assert sorted(P.vertices()) == [(0, 2), (2, 0)]
    assert P.difference_lattice.rank == 1


def test_empty_and_point():
    P = box_polytope([0], [0], [Inequality((1,), 1, Label.other("x"))])
    assert len(P) == 0 and P.dim == -1
    Q = box_polytope([1, 1], [1, 1])
    assert Q.dim == 0 and Q.vertices() == [(1, 1)]


def test_enumeration_budget():
    with pytest.raises(InstanceTooLarge):
        enumerate_points([Inequality((1, 1), 0, Label.other("x"))], [(0, 10**4), (0, 10**4)], max_cells=1000)


def test_dilate():
    P = simplex(2)
    assert len(P.dilate(3)) == 10


def hull_inequalities(points):
    """Facet inequalities of the hull of full-dimensional points, by brute force over point tuples."""
    pts = np.array(sorted(set(points)), dtype=np.int64)
    n = pts.shape[1]
    found = set()
    for combo in itertools.combinations(range(len(pts)), n):
        D = pts[list(combo[1:])] - pts[combo[0]]
        if n == 2:
            u = np.array([-D[0, 1], D[0, 0]])
        else:
            u = np.cross(D[0], D[1])
        if not u.any():
            continue
        g = np.gcd.reduce(np.abs(u))
        u = u // g
        vals = pts @ u
        r = int(vals[combo[0]])
        for sgn in (1, -1):
            if np.all(sgn * vals >= sgn * r):
                found.add((tuple(int(x) for x in sgn * u), sgn * r))
    return sorted(found)


def hull_polytope(points):
    ineqs = [Inequality(u, r, Label.other(f"h{i}")) for i, (u, r) in enumerate(hull_inequalities(points))]
    arr = np.array(points)
    box = list(zip(arr.min(axis=0).tolist(), arr.max(axis=0).tolist()))
    return LatticePolytope(ineqs, box), ineqs, box


pts2 = st.lists(st.tuples(st.integers(-3, 3), st.integers(-3, 3)), min_size=3, max_size=8)
pts3 = st.lists(st.tuples(st.integers(-2, 2), st.integers(-2, 2), st.integers(-2, 2)), min_size=4, max_size=7)


@settings(max_examples=150, deadline=None)
@given(pts2)
def test_random_polygons(points):
    if affine_rank(np.array(points)) < 2:
        return
    P, ineqs, box = hull_polytope(points)
    pts = brute_points(ineqs, box)
    assert [tuple(p) for p in P.points.tolist()] == pts
    assert P.dim == 2
    assert set(P.vertices()) == hull_2d(points)
    # a polygon has as many edges as vertices
    assert len(P.facet_indices) == len(hull_2d(points))
    for F in P.facets():
        assert F.dim == 1


@settings(max_examples=60, deadline=None)
@given(pts3)
def test_random_3d_faces_are_consistent(points):
    if affine_rank(np.array(points)) < 3:
        return
    P, ineqs, box = hull_polytope(points)
    assert [tuple(p) for p in P.points.tolist()] == brute_points(ineqs, box)
    assert set(P.vertices()) <= set(points)
    assert len(P.facet_indices) == len({tuple(q.normal) for q in ineqs})
    for F in P.facets():
        assert affine_rank(F.points) == 2
    # Euler relation for 3-polytopes
    f = [0] * 4
    for F in P.faces():
        f[F.dim] += 1
    assert f[0] - f[1] + f[2] == 2

