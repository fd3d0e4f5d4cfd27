"""End-to-end acceptance checks over the full parameter grid.

The grid is ``k <= 4``, ``a_i <= 4``, ``b_i <= 4`` with at most ``2 * 10^5``
lattice points.  It is scanned once per session and shared by the criteria
that need it.  Each criterion records a one-line verdict, printed in the
terminal summary by ``conftest.py``.
"""
import random
import time
from fractions import Fraction
from pathlib import Path

import numpy as np
import pytest

from svsecant import exact
from svsecant.classify import GORENSTEIN, QGORENSTEIN, SMOOTH, compute_status, cross_check, tag_class
from svsecant.cli import grid
from svsecant.cumulants import (
    parse_complex,
    random_complex,
    sv_complex,
    toric_binomials,
    verify_reparametrization,
    verify_secant_identity,
)
from svsecant.normality import brute_force_sums, check_normality, minkowski_levels
from svsecant.polytope import Inequality, LatticePolytope
from svsecant.segre_veronese import SVParams, build_polytope, cross_check_facets, expected_point_count
from svsecant.singular import normal_fan, singular_components, singular_report

DATA = Path(__file__).parent / "data"
MAX_POINTS = 200_000

EXTRA_G = [
    ((1, 1, 1, 1, 1), (1, 1, 1, 1, 1)),
    ((1, 1, 1), (3, 3, 3)),
    ((1, 2), (2, 5)),
    ((2, 3), (1, 2)),
    ((3,), (5,)),
    ((4,), (3,)),
] + [((2,), (b,)) for b in (2, 4, 6, 8)]

Q_LIST = [
    ((2, 2), (1, 1)),
    ((2, 2), (1, 2)),
    ((2, 2), (2, 2)),
    ((4, 4), (1, 1)),
    ((2,), (3,)),
    ((2,), (5,)),
    ((2,), (7,)),
    ((5,), (1,)),
    ((6,), (1,)),
    ((7,), (1,)),
    ((6,), (2,)),
]


def beta_checks(P, beta) -> bool:
    """``beta`` lies in the span of the lifted lattice and pairs to 1 with every facet normal."""
    cd = P.cone_data()
    sol = exact.solve_affine([list(col) for col in zip(*cd.lam.basis)], [Fraction(x) for x in beta])
    if sol is None or sol[1]:
        return False
    c = sol[0]
    return all(sum(ci * wi for ci, wi in zip(c, w)) == 1 for w in cd.facet_normals_lambda)


def no_integral_beta(P) -> bool:
    cd = P.cone_data()
    W = [list(w) for w in cd.facet_normals_lambda]
    sol = exact.solve_affine(W, [1] * len(W))
    if sol is None:
        return True
    return exact.lattice_point_in_affine_set(sol[0], sol[1], exact.LatticeBasis.standard(cd.lam.rank)) is None


def scan_one(p: SVParams, P=None) -> dict:
    t = time.perf_counter()
    if P is None:
        P = build_polytope(p, MAX_POINTS)
    f = cross_check_facets(p, P)
    t_facets = time.perf_counter() - t
    c = cross_check(p, P)
    row = {
        "p": p, "points": len(P.points), "facets_agree": f["agree"],
        "t_facets": t_facets, "status": c.status, "tag": c.tag,
        "class_agree": c.agree, "beta_ok": None, "no_int_beta": None,
    }
    if c.status in (GORENSTEIN, SMOOTH) and len(P.points):
        row["beta_ok"] = all(x.denominator == 1 for x in c.beta) and P.lifted_lattice.contains(
            [int(x) for x in c.beta]) and beta_checks(P, c.beta)
    elif c.status == QGORENSTEIN:
        row["beta_ok"] = beta_checks(P, c.beta)
        row["no_int_beta"] = no_integral_beta(P)
    if P.dim >= 1:
        s = singular_report(p, P, c.status == SMOOTH)
        row.update(sing=s["n_components"], sing_expected=s["expected"], sing_agree=s["agree"],
                   patterns_ok=all(d.get("description") for d in s["components"]))
    else:
        row.update(sing=0, sing_expected=None, sing_agree=True, patterns_ok=True)
    return row


@pytest.fixture(scope="module")
def grid_rows():
    rows, skipped = [], []
    t0 = time.perf_counter()
    for p in grid(4, 4, 4):
        if expected_point_count(p) > MAX_POINTS:
            skipped.append(p)
            continue
        rows.append(scan_one(p))
    return rows, skipped, time.perf_counter() - t0


def test_criterion_1_facets(grid_rows, criterion):
    rows, skipped, _ = grid_rows
    bad = [str(r["p"]) for r in rows if not r["facets_agree"]]
    seconds = sum(r["t_facets"] for r in rows)
    ok = not bad and seconds < 600
    criterion(1, ok, f"{len(rows)} instances ({len(skipped)} over budget), "
                     f"{len(bad)} disagreements, facet pass {seconds:.0f}s")
    assert ok, bad[:20]


def test_criterion_2_gorenstein(grid_rows, criterion):
    rows, _, _ = grid_rows
    extra = [scan_one(SVParams(a, b)) for a, b in EXTRA_G]
    bad = []
    for r in rows + extra:
        tagged = tag_class(r["tag"])
        if r["status"] == GORENSTEIN or tagged == GORENSTEIN or tagged == SMOOTH or r["status"] == SMOOTH:
            if r["status"] != tagged:
                bad.append(f"{r['p']} computed {r['status']} tag {r['tag']}")
        if r["status"] == GORENSTEIN and not r["beta_ok"]:
            bad.append(f"{r['p']} beta not verified")
    for r in extra:
        if r["status"] != GORENSTEIN or not r["tag"] or not r["tag"].startswith("G"):
            bad.append(f"{r['p']} expected a Gorenstein instance")
    ok = not bad
    criterion(2, ok, f"{len(rows) + len(extra)} instances, {len(bad)} disagreements"
                     + (": " + "; ".join(bad) if bad else ""))
    assert ok, bad


def test_criterion_3_q_gorenstein(grid_rows, criterion):
    rows, _, _ = grid_rows
    bad = []
    for a, b in Q_LIST:
        p = SVParams(a, b)
        r = scan_one(p)
        if r["status"] != QGORENSTEIN or not r["beta_ok"] or not r["no_int_beta"]:
            bad.append(f"{p}: {r['status']}")
    for r in rows:
        if r["status"] == QGORENSTEIN and tag_class(r["tag"]) != QGORENSTEIN:
            bad.append(f"{r['p']} untagged QGorensteinOnly")
        if r["status"] == QGORENSTEIN and not (r["beta_ok"] and r["no_int_beta"]):
            bad.append(f"{r['p']} beta certificate failed")
        if tag_class(r["tag"]) == QGORENSTEIN and r["status"] != QGORENSTEIN:
            bad.append(f"{r['p']} tagged {r['tag']} but {r['status']}")
    ok = not bad
    criterion(3, ok, f"{len(Q_LIST)} listed instances plus grid, {len(bad)} disagreements")
    assert ok, bad


def test_criterion_4_singular_locus(grid_rows, criterion):
    rows, _, _ = grid_rows
    bad = [str(r["p"]) for r in rows if not r["sing_agree"]]
    bad += [f"{r['p']} pattern" for r in rows if r["p"].k >= 4 and not r["patterns_ok"]]

    def comps(a, b):
        p = SVParams(a, b)
        return p, singular_components(build_polytope(p), p)

    _, c = comps((1, 1, 1, 1), (1, 1, 1, 1))
    if len(c) != 6:
        bad.append("(1,1,1,1)/(1,1,1,1)")
    p, c = comps((1, 1, 1, 1), (1, 1, 1, 2))
    faces = {x.indices: len(x.face.point_list()) for x in c}
    # pairs with the P^2 factor: an edge through two singular vertices
    if len(c) != 6 or faces != {(1, 2): 1, (1, 3): 1, (2, 3): 1, (1, 4): 2, (2, 4): 2, (3, 4): 2}:
        bad.append(f"(1,1,1,1)/(1,1,1,2) {faces}")
    for a in ((1, 1, 2), (1, 2, 3)):
        if len(comps(a, (1, 1, 1))[1]) != 1:
            bad.append(f"{a}/(1,1,1)")
    ok = not bad
    criterion(4, ok, f"{len(rows)} grid instances, {len(bad)} disagreements")
    assert ok, bad[:20]


def test_criterion_5_normality(criterion):
    params = [p for p in grid(4, 4, 4) if expected_point_count(p) <= 2000]
    failures = []
    dp_checked = 0
    for p in params:
        P = build_polytope(p)
        r = check_normality(P, 3)
        if r["normal_up_to"] != 3:
            failures.append(str(p))
        if 0 < len(P.points) <= 50:
            for s, target, reach in minkowski_levels(P, 3):
                got = {tuple(int(x) for x in q) for q in target[reach]}
                if got != brute_force_sums(P, s):
                    failures.append(f"{p} DP level {s}")
            dp_checked += 1
    ok = not failures
    criterion(5, ok, f"{len(params)} instances to level 3, DP vs brute force on {dp_checked}, "
                     f"{len(failures)} failures")
    assert ok, failures[:20]


SV_SUITE = [((2,), (2,)), ((1, 1), (1, 2)), ((2, 1), (1, 2)), ((1, 1, 1), (1, 1, 1)), ((3,), (2,)),
            ((2, 2), (1, 1)), ((1, 1), (3, 3)), ((2, 2, 1), (1, 2, 2)), ((1, 2), (2, 2)), ((4,), (2,)),
            ((1, 1, 1), (2, 2, 2)), ((2, 2), (2, 2)), ((1, 1, 1, 1), (1, 1, 1, 1))]


def test_criterion_6_cumulants(criterion):
    t0 = time.perf_counter()
    complexes = [sv_complex(SVParams(a, b)) for a, b in SV_SUITE]
    assert all(len(cx.vertex_labels) <= 12 for cx in complexes)
    complexes += [parse_complex((DATA / f).read_text()) for f in ("two_generators.cx", "repeated_label.cx")]
    complexes += [random_complex(random.Random(seed)) for seed in range(20)]
    bad = []
    for i, cx in enumerate(complexes):
        if not verify_secant_identity(cx)[0]:
            bad.append(f"#{i} secant")
        if not verify_reparametrization(cx)["ok"]:
            bad.append(f"#{i} reparametrization")
    seconds = time.perf_counter() - t0
    ok = not bad and seconds < 120
    criterion(6, ok, f"{len(complexes)} complexes, {len(bad)} residuals, {seconds:.1f}s")
    assert ok, bad


def test_criterion_7_binomials(criterion):
    found = set()
    for f in ("two_generators.cx", "repeated_label.cx"):
        cx = parse_complex((DATA / f).read_text())
        found |= {str(b) for b in toric_binomials(cx, 4)}
    want = {"x234^2 - x23*x24*x34", "x233^2 - x23^2*x33"}
    ok = want <= found
    criterion(7, ok, f"{len(want & found)}/{len(want)} binomials found")
    assert ok, sorted(found)


def test_criterion_8_properties(criterion):
    rng = random.Random(20240601)
    problems = []

    # HNF / SNF invariants
    cases = 0
    for _ in range(1200):
        r, c = rng.randint(1, 5), rng.randint(1, 5)
        M = [[rng.randint(-6, 6) for _ in range(c)] for _ in range(r)]
        H, U = exact.hnf(M)
        if [[sum(U[i][t] * M[t][j] for t in range(r)) for j in range(c)] for i in range(r)] != H:
            problems.append(f"hnf U*M != H for {M}")
        if abs(exact.det(U)) != 1:
            problems.append(f"hnf U not unimodular for {M}")
        d = exact.snf(M)
        if len(d) != exact.rank(np.array(M, dtype=np.int64)) or any(b % a for a, b in zip(d, d[1:])):
            problems.append(f"snf shape for {M}")
        if r == c and abs(exact.det(M)) != (np.prod(d, dtype=object) if len(d) == r else 0):
            problems.append(f"snf det for {M}")
        cases += 1

    # beta re-evaluation, cone monotonicity, u_F membership, permutation invariance
    small = [p for p in grid(4, 3, 2) if 0 < expected_point_count(p) <= 400]
    for p in rng.sample(small, 60):
        P = build_polytope(p)
        c = cross_check(p, P)
        if c.beta is not None and not beta_checks(P, c.beta):
            problems.append(f"{p} beta")
        if P.dim < 1:
            continue
        cones = normal_fan(P)
        sing = [set(x.ray_labels) for x in cones if not x.smooth]
        for x in cones:
            if x.smooth and any(s <= set(x.ray_labels) for s in sing):
                problems.append(f"{p} monotonicity")
                break
        for comp in singular_components(P, p):
            if "F" not in comp.ray_labels:
                problems.append(f"{p} component without F")
        # relabel the coordinates without letting the parameters re-sort them
        perm = list(range(P.ambient_dim))
        rng.shuffle(perm)
        Q = LatticePolytope([Inequality(tuple(h.normal[i] for i in perm), h.rhs, h.label) for h in P.inequalities],
                            [P.box[i] for i in perm], max_cells=None)
        cq = compute_status(Q)
        if cq.status != c.status or (c.beta is not None and not beta_checks(
                Q, (c.beta[0],) + tuple(c.beta[1 + i] for i in perm))):
            problems.append(f"{p} permutation")
    ok = not problems
    criterion(8, ok, f"{cases} HNF/SNF cases, 60 polytope instances, {len(problems)} problems")
    assert ok, problems[:20]
