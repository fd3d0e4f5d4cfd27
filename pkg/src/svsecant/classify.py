"""Smooth / Gorenstein / Q-Gorenstein status of the cone over the polytope.

The computed status comes from the cone alone: the rays decide smoothness,
and a point ``beta`` of the lattice pairing to one with every primitive
facet normal decides the Gorenstein property.  ``expected_tag`` is the
closed-form case table, kept separate so the two can be compared.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import exact
from .polytope import LatticePolytope
from .segre_veronese import DEFAULT_MAX_POINTS, SVParams, build_polytope

__all__ = [
    "Classification",
    "compute_status",
    "expected_tag",
    "tag_class",
    "cross_check",
    "SMOOTH",
    "GORENSTEIN",
    "QGORENSTEIN",
    "NEITHER",
]

SMOOTH = "Smooth"
GORENSTEIN = "Gorenstein"
QGORENSTEIN = "QGorensteinOnly"
NEITHER = "Neither"

_CLASS_OF_PREFIX = {"S": SMOOTH, "G": GORENSTEIN, "Q": QGORENSTEIN}


@dataclass(frozen=True)
class Classification:
    status: str
    beta: Optional[tuple[Fraction, ...]] = None
    tag: Optional[str] = None
    agree: Optional[bool] = None
    note: str = ""
    lattice_rank: int = 0
    n_rays: int = 0
    n_facets: int = 0

    def beta_json(self):
        if self.beta is None:
            return None
        return [int(x) if x.denominator == 1 else str(x) for x in self.beta]

    def as_dict(self) -> dict:
        return {
            "status": self.status,
            "beta": self.beta_json(),
            "tag": self.tag,
            "agree": self.agree,
            "note": self.note,
        }


def _gorenstein_point(cd) -> tuple[Optional[list[Fraction]], Optional[list[int]]]:
    """Rational and integral solutions of ``<beta, u> = 1`` over all facet normals.

    Both are returned in ambient coordinates of ``Z^{n+1}``; either may be
    ``None``.
    """
    W = [list(w) for w in cd.facet_normals_lambda]
    r = cd.lam.rank
    B = [list(v) for v in cd.lam.basis]
    if not W:
        # a single ray: every functional works, take the first basis vector dual
        sol = ([Fraction(0)] * r, [[Fraction(int(i == j)) for j in range(r)] for i in range(r)])
    else:
        sol = exact.solve_affine(W, [1] * len(W))
    if sol is None:
        return None, None
    particular, kernel = sol
    rational = [sum(c * b[j] for c, b in zip(particular, B)) for j in range(cd.lam.ambient)]
    c_int = exact.lattice_point_in_affine_set(particular, kernel, exact.LatticeBasis.standard(r))
    integral = None
    if c_int is not None:
        integral = [sum(c * b[j] for c, b in zip(c_int, B)) for j in range(cd.lam.ambient)]
    return [Fraction(x) for x in rational], integral


def compute_status(P: LatticePolytope) -> Classification:
    """Status of the affine toric variety of the cone over ``P``."""
    if len(P.points) == 0:
        return Classification(SMOOTH, note="secant fills ambient / undefined cone")
    cd = P.cone_data()
    r = cd.lam.rank
    R = [list(v) for v in cd.rays_lambda]
    smooth = len(R) == r and all(d == 1 for d in exact.snf(R)) and len(exact.snf(R)) == r
    rational, integral = _gorenstein_point(cd)
    info = dict(lattice_rank=r, n_rays=len(R), n_facets=len(cd.facet_normals_lambda))
    if smooth:
        # a smooth cone is Gorenstein
        assert integral is not None, "smooth cone without an integral Gorenstein point"
        note = "secant fills ambient" if len(P.points) == r else ""
        return Classification(SMOOTH, tuple(Fraction(x) for x in integral), note=note, **info)
    if integral is not None:
        _verify_beta(cd, integral)
        return Classification(GORENSTEIN, tuple(Fraction(x) for x in integral), **info)
    if rational is not None:
        _verify_beta(cd, rational)
        return Classification(QGORENSTEIN, tuple(rational), **info)
    return Classification(NEITHER, **info)


def _verify_beta(cd, beta) -> None:
    """``<beta, u> = 1`` for every facet normal, checked in ambient coordinates."""
    # beta = c B; the facet functionals act on the coordinates c
    sol = exact.solve_affine([list(col) for col in zip(*cd.lam.basis)], beta)
    assert sol is not None and not sol[1], "beta outside the span of the lattice"
    c = sol[0]
    for w in cd.facet_normals_lambda:
        assert sum(ci * wi for ci, wi in zip(c, w)) == 1


def expected_tag(p: SVParams) -> Optional[str]:
    """Case label from the closed-form smooth / Gorenstein / Q-Gorenstein tables."""
    a, b, k = p.a, p.b, p.k
    # smooth
    if a == (1, 1, 1) and b == (1, 1, 1):
        return "S1"
    if a == (1, 1) and 1 in b:
        return "S2"
    if k == 1 and (a[0] == 1 or (a[0] == 2 and b[0] == 1)):
        return "S3"
    # Gorenstein
    if a == (1,) * 5 and b == (1,) * 5:
        return "G1"
    if a == (1, 1, 1) and b in {(1, 1, 3), (1, 3, 3), (3, 3, 3)}:
        return "G2"
    if a == (1, 1, 2) and b in {(1, 1, 1), (1, 1, 3)}:
        return "G3"
    if a == (2, 2, 2) and b == (1, 1, 1):
        return "G4"
    if a == (1, 1) and b[0] == b[1] and b[0] > 1:
        return "G5"
    if a == (1, 2) and b in {(1, 1), (1, 5), (2, 1), (2, 5)}:
        return "G6"
    if a == (2, 3) and b in {(1, 1), (1, 2)}:
        return "G7"
    if k == 1:
        if a[0] == 2 and b[0] % 2 == 0:
            return "G8"
        if a[0] == 3 and b[0] in (1, 5):
            return "G9"
        if a[0] == 4 and b[0] in (1, 3):
            return "G10"
    # Q-Gorenstein only
    if a == (2, 2) and b in {(1, 1), (1, 2), (2, 2)}:
        return "Q1"
    if a == (4, 4) and b == (1, 1):
        return "Q2"
    if k == 1:
        if a[0] == 2 and b[0] > 1 and b[0] % 2 == 1:
            return "Q3"
        if a[0] >= 5 and b[0] == 1:
            return "Q4"
        if a[0] == 6 and b[0] == 2:
            return "Q5"
    return None


def tag_class(tag: Optional[str]) -> str:
    if tag is None:
        return NEITHER
    return _CLASS_OF_PREFIX[tag[0]]


def cross_check(p: SVParams, P: Optional[LatticePolytope] = None, max_points: Optional[int] = DEFAULT_MAX_POINTS) -> Classification:
    """Computed status together with the closed-form tag and whether they agree."""
    if P is None:
        P = build_polytope(p, max_points)
    c = compute_status(P)
    tag = expected_tag(p)
    return Classification(
        c.status, c.beta, tag, c.status == tag_class(tag), c.note,
        c.lattice_rank, c.n_rays, c.n_facets,
    )
