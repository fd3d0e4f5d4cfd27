"""The polytope of the secant of a Segre-Veronese variety and its predicted facets.

Coordinates are indexed by pairs ``(i, j)`` with ``1 <= j <= b_i``, in
lexicographic order.  The polytope lives in ``Z^n`` with ``n = sum(b)`` and
is cut out by

* ``x_{i,j} >= 0``                      (label ``Z<i>,<j>``)
* ``sum_j x_{i,j} <= a_i``              (label ``R<i>``)
* ``sum_{i,j} x_{i,j} >= 2``            (label ``F``)
"""
from __future__ import annotations

from dataclasses import dataclass, field
from math import comb, prod
from typing import Optional, Sequence

from .polytope import InstanceTooLarge, Inequality, Label, LatticePolytope

__all__ = [
    "SVParams",
    "FacetReport",
    "build_polytope",
    "expected_facet_report",
    "cross_check_facets",
    "expected_point_count",
    "parse_params",
    "DEFAULT_MAX_POINTS",
]

DEFAULT_MAX_POINTS = 200_000


@dataclass(frozen=True)
class SVParams:
    """Segre-Veronese data ``(a, b)``; ``k = len(a)``.

    ``a`` and ``b`` are stored canonically, with the pairs ``(a_i, b_i)``
    sorted ascending.  The order given by the caller is kept in ``raw``.
    """

    a: tuple[int, ...]
    b: tuple[int, ...]
    raw: tuple[tuple[int, ...], tuple[int, ...]] = field(default=None, compare=False, hash=False)

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        b = tuple(int(x) for x in self.b)
        if len(a) != len(b):
            raise ValueError("a and b must have the same length")
        if not a:
            raise ValueError("need at least one factor")
        if min(a) < 1 or min(b) < 1:
            raise ValueError("entries of a and b must be positive")
        pairs = sorted(zip(a, b))
        object.__setattr__(self, "raw", self.raw or (a, b))
        object.__setattr__(self, "a", tuple(p[0] for p in pairs))
        object.__setattr__(self, "b", tuple(p[1] for p in pairs))

    @property
    def k(self) -> int:
        return len(self.a)

    @property
    def n(self) -> int:
        return sum(self.b)

    @property
    def index_layout(self) -> tuple[tuple[int, int], ...]:
        return tuple((i + 1, j + 1) for i, bi in enumerate(self.b) for j in range(bi))

    def coord(self, i: int, j: int) -> int:
        """Position of ``x_{i,j}`` (1-based ``i``, ``j``)."""
        return sum(self.b[: i - 1]) + j - 1

    def e(self, i: int, j: int) -> tuple[int, ...]:
        v = [0] * self.n
        v[self.coord(i, j)] = 1
        return tuple(v)

    def count(self, value: int) -> int:
        """``k_value``: number of factors with ``a_i == value``."""
        return sum(1 for x in self.a if x == value)

    def __str__(self) -> str:
        return f"a=({','.join(map(str, self.a))}) b=({','.join(map(str, self.b))})"

    def as_dict(self) -> dict:
        return {
            "a": list(self.a),
            "b": list(self.b),
            "raw_a": list(self.raw[0]),
            "raw_b": list(self.raw[1]),
        }


def parse_params(text: str) -> SVParams:
    """Parse ``"a=1,2,3 b=1,1,1"``."""
    fields = {}
    for tok in text.split():
        key, _, val = tok.partition("=")
        if key not in ("a", "b") or not val:
            raise ValueError(f"cannot parse {tok!r}")
        fields[key] = tuple(int(x) for x in val.split(","))
    if set(fields) != {"a", "b"}:
        raise ValueError("need both a= and b=")
    return SVParams(fields["a"], fields["b"])


def expected_point_count(p: SVParams) -> int:
    """Lattice points of ``P``: monomials of multidegree ``<= a`` and total degree ``>= 2``."""
    return prod(comb(ai + bi, bi) for ai, bi in zip(p.a, p.b)) - 1 - p.n


def inequalities(p: SVParams) -> list[Inequality]:
    n = p.n
    out = []
    for i, bi in enumerate(p.b, start=1):
        for j in range(1, bi + 1):
            v = [0] * n
            v[p.coord(i, j)] = 1
            out.append(Inequality(tuple(v), 0, Label.Z(i, j)))
    for i, bi in enumerate(p.b, start=1):
        v = [0] * n
        for j in range(1, bi + 1):
            v[p.coord(i, j)] = -1
        out.append(Inequality(tuple(v), -p.a[i - 1], Label.R(i)))
    out.append(Inequality(tuple([1] * n), 2, Label.F()))
    return out


def build_polytope(p: SVParams, max_points: Optional[int] = DEFAULT_MAX_POINTS) -> LatticePolytope:
    """Polytope of the secant of the Segre-Veronese variety ``p``.

    The point count is known in closed form, so oversized instances are
    refused before any enumeration.  The box itself is not bounded.
    """
    if max_points is not None:
        count = expected_point_count(p)
        if count > max_points:
            raise InstanceTooLarge(f"{p} has {count} lattice points, budget is {max_points}")
    box = [(0, p.a[i - 1]) for i, _ in p.index_layout]
    return LatticePolytope(inequalities(p), box, p.index_layout, max_cells=None)


@dataclass(frozen=True)
class FacetReport:
    dim_case: str
    dim: int
    present_facets: frozenset[str]
    exceptions: tuple[tuple[str, str], ...] = ()

    def as_dict(self) -> dict:
        return {
            "dim_case": self.dim_case,
            "dim": self.dim,
            "facets": sorted(self.present_facets, key=_label_key),
            "exceptions": [list(e) for e in self.exceptions],
        }


def _label_key(s: str):
    lab = Label.parse(s)
    return ({"F": 0, "R": 1, "Z": 2}.get(lab.kind, 3), lab.i, lab.j, lab.text)


def expected_facet_report(p: SVParams) -> FacetReport:
    """Closed-form dimension and facet list of the polytope."""
    k, a, b, n = p.k, p.a, p.b, p.n
    zs = {str(Label.Z(i, j)) for i, j in p.index_layout}
    if k == 2 and a == (1, 1):
        if b[0] >= 2:
            present = zs
        elif b[1] >= 2:
            present = {str(Label.Z(2, j)) for j in range(1, b[1] + 1)}
        else:
            present = set()
        return FacetReport("D1", n - 2, frozenset(present))
    if k == 1 and a[0] == 1:
        return FacetReport("D2_empty", -1, frozenset())
    if k == 1 and a[0] == 2 and b[0] == 1:
        return FacetReport("D2_point", 0, frozenset())
    if k == 1 and a[0] == 2:
        return FacetReport("D2_hyperplane", n - 1, frozenset(zs))

    missing: list[tuple[str, str]] = []
    if k == 3:
        for i in range(3):
            if b[i] == 1 and all(a[j] == 1 for j in range(3) if j != i):
                missing.append(("E1", str(Label.Z(i + 1, 1))))
    if k == 2:
        if b[0] == 1 and a[0] <= 2 and a[1] == 2:
            missing.append(("E2", str(Label.Z(1, 1))))
        if b[1] == 1 and a[0] <= 2 and a[1] >= 2:
            missing.append(("E3", str(Label.Z(2, 1))))
    if k == 1 and b[0] == 1 and a[0] >= 3:
        missing.append(("E4", str(Label.Z(1, 1))))
    present = {"F"} | {str(Label.R(i)) for i in range(1, k + 1)} | zs
    present -= {m for _, m in missing}
    return FacetReport("Full", n, frozenset(present), tuple(missing))


def computed_facet_report(P: LatticePolytope) -> tuple[int, frozenset[str]]:
    return P.dim, P.facet_label_set


def cross_check_facets(p: SVParams, P: Optional[LatticePolytope] = None, max_points: Optional[int] = DEFAULT_MAX_POINTS) -> dict:
    """Compare the closed-form facet report with the polytope computation."""
    if P is None:
        P = build_polytope(p, max_points)
    expected = expected_facet_report(p)
    dim, labels = computed_facet_report(P)
    agree = dim == expected.dim and labels == expected.present_facets
    return {
        "agree": agree,
        "expected": expected.as_dict(),
        "computed": {"dim": dim, "facets": sorted(labels, key=_label_key)},
        "missing_from_computed": sorted(expected.present_facets - labels, key=_label_key),
        "unexpected_in_computed": sorted(labels - expected.present_facets, key=_label_key),
    }
