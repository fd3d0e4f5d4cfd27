"""Normal fan of the polytope and the singular locus of its toric variety.

A cone of the normal fan is generated by the inward normals of the facets
containing a face.  Normals are restricted to the lattice spanned by
differences of lattice points of ``P``, so lower-dimensional polytopes are
handled in their own lattice.  The components of the singular locus are the
minimal non-smooth cones, i.e. the maximal faces whose cone is singular.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Optional

import numpy as np

from . import exact
from .polytope import Face, LatticePolytope
from .segre_veronese import SVParams

__all__ = [
    "FanCone",
    "SingularComponent",
    "NormalFan",
    "normal_fan",
    "cone_smooth",
    "singular_components",
    "expected_vertex_status",
    "expected_component_count",
    "expected_sing_locus_equals_X",
    "describe_component",
    "singular_report",
]


@dataclass(frozen=True)
class FanCone:
    face: Face
    rays: tuple[tuple[int, ...], ...]
    ray_labels: tuple[str, ...]
    smooth: bool


@dataclass(frozen=True)
class SingularComponent:
    face: Face
    kind: str
    indices: tuple[int, ...]
    ray_labels: tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "indices": list(self.indices),
            "face_points": [list(p) for p in sorted(self.face.point_list())],
            "rays": list(self.ray_labels),
        }


def cone_smooth(rays) -> bool:
    """Rays extend to a lattice basis: independent, with trivial Smith form.

    Unit pivots are eliminated first on sparse rows.  Clearing a unit pivot's
    column by row operations and then dropping its row and column keeps the
    Smith form up to a leading 1; whatever is left goes to ``exact.snf``.
    """
    rows = [{j: int(x) for j, x in enumerate(r) if x} for r in rays]
    if rows and len(rows) > len(rays[0]):
        return False
    while rows:
        piv = None
        for i, r in enumerate(rows):
            if not r:
                return False
            j = next((j for j, x in r.items() if x == 1 or x == -1), None)
            if j is not None:
                piv = i, j
                break
        if piv is None:
            cols = sorted({j for r in rows for j in r})
            d = exact.snf([[r.get(j, 0) for j in cols] for r in rows])
            return len(d) == len(rows) and all(x == 1 for x in d)
        i, j = piv
        pr = rows.pop(i)
        s = pr[j]
        for r in rows:
            c = r.get(j)
            if c:
                f = c * s
                for jj, x in pr.items():
                    v = r.get(jj, 0) - f * x
                    if v:
                        r[jj] = v
                    else:
                        del r[jj]
    return True


class NormalFan:
    """Normal fan of ``P``.

    A face is addressed by the bitmask of facets containing it, which is
    also the ray set of its cone.  Joining a face with a vertex is a bitwise
    AND of the two masks.
    """

    def __init__(self, P: LatticePolytope):
        if P.dim < 1:
            raise ValueError("normal fan needs a polytope of dimension >= 1")
        self.P = P
        self.facets = P.facet_indices
        D = np.array(P.difference_lattice.basis, dtype=np.int64)
        restricted = exact.exact_product(P.normals[list(self.facets)], D)
        self.rays = tuple(tuple(exact.primitive(r)) for r in restricted.tolist())
        self.ray_labels = tuple(str(P.inequalities[m].label) for m in self.facets)
        V, M = P.facet_vertex_masks()
        self.vertex_rows = V
        self.nv = len(V)
        weights = [1 << f for f in range(len(self.facets))]
        self.vertex_masks = np.array(
            [sum(w for w, t in zip(weights, row) if t) for row in M.tolist()],
            dtype=np.uint64 if len(self.facets) <= 64 else object,
        )
        self._smooth_cache: dict[int, bool] = {}

    def ray_indices(self, mask: int) -> list[int]:
        return [f for f in range(len(self.facets)) if mask >> f & 1]

    def is_smooth(self, mask: int) -> bool:
        mask = int(mask)
        hit = self._smooth_cache.get(mask)
        if hit is None:
            # a smooth cone has at most dim P rays
            hit = bin(mask).count("1") <= self.P.dim and cone_smooth([self.rays[f] for f in self.ray_indices(mask)])
            self._smooth_cache[mask] = hit
        return hit

    def vertices_of(self, mask: int) -> list[int]:
        """Vertices lying on every facet in ``mask``."""
        mask = int(mask)
        return [v for v in range(self.nv) if int(self.vertex_masks[v]) & mask == mask]

    def face(self, mask: int) -> Face:
        vm = np.zeros(self.nv, dtype=bool)
        vm[self.vertices_of(mask)] = True
        return self.P.face_from_vertices(vm)

    def cone(self, mask: int) -> FanCone:
        idx = self.ray_indices(mask)
        return FanCone(
            self.face(mask),
            tuple(self.rays[f] for f in idx),
            tuple(self.ray_labels[f] for f in idx),
            self.is_smooth(mask),
        )

    def vertex_point(self, v: int) -> tuple[int, ...]:
        return tuple(int(x) for x in self.P.points[self.vertex_rows[v]])

    @cached_property
    def singular_vertices(self) -> list[int]:
        return [v for v in range(self.nv) if not self.is_smooth(self.vertex_masks[v])]

    @cached_property
    def maximal_singular_faces(self) -> list[int]:
        """Facet masks of inclusion-maximal faces whose cone is singular.

        Faces of a singular face are singular, so every singular face is
        reached from a singular vertex by joining singular vertices one at a
        time; a singular face is maximal when no such join stays singular.
        """
        sing = self.vertex_masks[self.singular_vertices]
        smooth_v = np.delete(self.vertex_masks, self.singular_vertices)
        frontier = np.unique(sing)
        seen = {int(m) for m in frontier}
        maximal = set(seen)
        while len(frontier):
            joined = frontier[:, None] & sing[None, :]
            cand = np.unique(joined)
            # a face through a smooth vertex has a smooth cone
            has_smooth = np.zeros(len(cand), dtype=bool)
            for lo in range(0, len(cand), 256):
                blk = cand[lo: lo + 256, None]
                has_smooth[lo: lo + 256] = ((blk & smooth_v[None, :]) == blk).any(axis=1)
            singular = set()
            for m, hs in zip(cand.tolist(), has_smooth):
                if hs:
                    self._smooth_cache[m] = True
                elif not self.is_smooth(m):
                    singular.add(m)
            nxt = []
            for base, row in zip(frontier.tolist(), joined):
                for m in set(row.tolist()) & singular:
                    if m == base:
                        continue
                    maximal.discard(base)
                    if m not in seen:
                        seen.add(m)
                        maximal.add(m)
                        nxt.append(m)
            frontier = np.array(sorted(nxt), dtype=sing.dtype)
        key = lambda m: sorted(self.vertex_point(v) for v in self.vertices_of(m))
        return sorted(maximal, key=key)


def normal_fan(P: LatticePolytope) -> list[FanCone]:
    """One cone per face of ``P``, in the order of ``P.faces()``."""
    fan = NormalFan(P)
    pos = {m: f for f, m in enumerate(fan.facets)}
    cones = []
    for F in P.faces():
        mask = sum(1 << pos[m] for m in F.tight if m in pos)
        cones.append(fan.cone(mask))
    return cones


def _component_kind(face: Face, params: Optional[SVParams]) -> tuple[str, tuple[int, ...]]:
    rs = sorted(int(lab[1:]) for lab in face.labels if lab.startswith("R"))
    if len(rs) == 2:
        return "PairOnes", tuple(rs)
    if len(rs) == 1:
        return "DoubleTwo", tuple(rs)
    return "Unclassified", tuple(rs)


def singular_components(P: LatticePolytope, params: Optional[SVParams] = None) -> list[SingularComponent]:
    if P.dim < 1:
        return []
    fan = NormalFan(P)
    out = []
    for G in fan.maximal_singular_faces:
        face = fan.face(G)
        kind, idx = _component_kind(face, params)
        labels = tuple(fan.ray_labels[f] for f in fan.ray_indices(G))
        out.append(SingularComponent(face, kind, idx, labels))
    return out


# -- closed-form predictions ----------------------------------------------------

def expected_vertex_status(p: SVParams, v) -> dict:
    """Whether lattice point ``v`` is a vertex, and whether its cone is smooth."""
    v = tuple(int(x) for x in v)
    if len(v) != p.n or min(v) < 0:
        raise ValueError("point does not match the parameters")
    blocks = []
    for i, bi in enumerate(p.b, start=1):
        s = p.coord(i, 1)
        blocks.append(v[s: s + bi])
    total = sum(v)
    if total < 2 or any(sum(bl) > ai for bl, ai in zip(blocks, p.a)):
        raise ValueError("point is not in the polytope")
    k, a, b = p.k, p.a, p.b
    if total > 2:
        is_vertex = all(sum(bl) == 0 or (sum(bl) == ai and max(bl) == ai) for bl, ai in zip(blocks, a))
        return {"is_vertex": is_vertex, "is_smooth": True}
    support = [(i, j) for i, bl in enumerate(blocks) for j, x in enumerate(bl) if x]
    if len(support) == 2:
        (i1, _), (i2, _) = support
        if i1 == i2 or min(a[i1], a[i2]) != 1:
            return {"is_vertex": False, "is_smooth": False}
        lo, hi = sorted((a[i1], a[i2]))
        if k == 2:
            smooth = True
        elif k == 3 and lo == hi == 1:
            i3 = ({0, 1, 2} - {i1, i2}).pop()
            smooth = b[i3] == 1
        else:
            smooth = lo == 1 and hi >= 2
        return {"is_vertex": True, "is_smooth": smooth}
    (i, _), = support
    if a[i] < 2:
        raise ValueError("point is not in the polytope")
    if a[i] >= 3:
        return {"is_vertex": True, "is_smooth": True}
    if k == 1:
        return {"is_vertex": True, "is_smooth": True}
    if k == 2:
        return {"is_vertex": True, "is_smooth": b[1 - i] == 1}
    return {"is_vertex": True, "is_smooth": False}


def expected_component_count(p: SVParams) -> int:
    """Number of components of the singular locus of the toric variety of ``P``."""
    k, a, b = p.k, p.a, p.b
    k1, k2 = p.count(1), p.count(2)
    if k == 1:
        return 0
    if k == 2:
        if a == (2, 2):
            return 2 - sum(1 for x in b if x == 1)
        twos = [i for i in range(2) if a[i] == 2]
        if len(twos) == 1 and b[1 - twos[0]] > 1:
            return 1
        return 0
    if k == 3:
        s = sum(
            1 for i3 in range(3)
            if b[i3] == 1 and all(a[i] == 1 for i in range(3) if i != i3)
        )
        return comb(k1, 2) + k2 - s
    return comb(k1, 2) + k2


def expected_sing_locus_equals_X(p: SVParams) -> bool:
    """Closed-form list of cases where the secant is singular exactly along ``X``."""
    k, a, b = p.k, p.a, p.b
    if k == 1:
        return a[0] > 2 or (a[0] == 2 and b[0] > 1)
    if k == 2:
        return (
            (a[0] > 2 and a[1] > 2)
            or (a == (1, 1) and b[0] > 1 and b[1] > 1)
            or (a[0] == 2 and b[1] == 1 and a[1] != 2)
            or (a[1] == 2 and b[0] == 1 and a[0] != 2)
            or (a == (2, 2) and b == (1, 1))
        )
    if k == 3:
        return a[0] >= 3 or (a[0] == 1 and a[1] >= 3) or (a[0] == a[1] == b[2] == 1 and a[2] >= 3)
    return all(x != 2 for x in a) and p.count(1) <= 1


def _factor(ai: int, bi: int) -> str:
    return f"v_{ai}(P^{bi})" if ai > 1 else f"P^{bi}"


def describe_component(c: SingularComponent, p: SVParams) -> str:
    """Product description of a component; checks the face's lattice points."""
    pts = set(c.face.point_list())
    if c.kind == "PairOnes":
        i1, i2 = c.indices
        assert p.a[i1 - 1] == p.a[i2 - 1] == 1, "pair component needs a_i = 1"
        want = {
            tuple(x + y for x, y in zip(p.e(i1, j1), p.e(i2, j2)))
            for j1 in range(1, p.b[i1 - 1] + 1) for j2 in range(1, p.b[i2 - 1] + 1)
        }
        assert pts == want, "face points differ from the pair pattern"
        sec = f"Sec(P^{p.b[i1 - 1]} x P^{p.b[i2 - 1]})"
        omit = {i1, i2}
    elif c.kind == "DoubleTwo":
        (i,) = c.indices
        assert p.a[i - 1] == 2, "double component needs a_i = 2"
        bi = p.b[i - 1]
        want = {
            tuple(x + y for x, y in zip(p.e(i, j1), p.e(i, j2)))
            for j1 in range(1, bi + 1) for j2 in range(j1, bi + 1)
        }
        assert pts == want, "face points differ from the double pattern"
        sec = f"Sec(v_2(P^{bi}))"
        omit = {i}
    else:
        raise AssertionError(f"unmodelled component with R-pattern {c.indices}")
    parts = [_factor(ai, bi) for idx, (ai, bi) in enumerate(zip(p.a, p.b), start=1) if idx not in omit]
    return " x ".join(parts + [sec])


def singular_report(p: SVParams, P: LatticePolytope, fills_ambient: bool) -> dict:
    comps = singular_components(P, p)
    expected = expected_component_count(p)
    described = []
    for c in comps:
        d = c.as_dict()
        try:
            d["description"] = describe_component(c, p)
        except AssertionError as exc:
            d["description"] = None
            d["error"] = str(exc)
        described.append(d)
    vp_smooth = not comps
    return {
        "params": p.as_dict(),
        "n_components": len(comps),
        "expected": expected,
        "agree": len(comps) == expected,
        "components": described,
        "vp_smooth": vp_smooth,
        "sing_locus_equals_X": vp_smooth and not fills_ambient,
        "expected_sing_locus_equals_X": expected_sing_locus_equals_X(p),
    }
