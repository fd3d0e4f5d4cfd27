"""Lattice polytopes given by a list of candidate inequalities.

The polytope is stored together with its lattice points.  Facets, vertices
and faces are read off from which inequalities are tight at which points,
so no convex hull code is needed as long as the candidate list contains
every facet.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Optional, Sequence

import numpy as np

from . import exact
from .exact import LatticeBasis

__all__ = [
    "Label",
    "Inequality",
    "LatticePolytope",
    "Face",
    "ConeData",
    "InstanceTooLarge",
    "enumerate_points",
    "affine_rank",
    "DEFAULT_MAX_CELLS",
    "MAX_FACETS_FOR_FACES",
]

DEFAULT_MAX_CELLS = 10**7
MAX_FACETS_FOR_FACES = 40


class InstanceTooLarge(RuntimeError):
    """Raised when an enumeration would exceed its configured budget."""


@dataclass(frozen=True, order=True)
class Label:
    """Name of a candidate inequality: ``F``, ``R<i>``, ``Z<i>,<j>`` or free text."""

    kind: str
    i: int = 0
    j: int = 0
    text: str = ""

    def __str__(self) -> str:
        if self.kind == "F":
            return "F"
        if self.kind == "R":
            return f"R{self.i}"
        if self.kind == "Z":
            return f"Z{self.i},{self.j}"
        return self.text

    @classmethod
    def F(cls) -> "Label":
        return cls("F")

    @classmethod
    def R(cls, i: int) -> "Label":
        return cls("R", i)

    @classmethod
    def Z(cls, i: int, j: int) -> "Label":
        return cls("Z", i, j)

    @classmethod
    def other(cls, text: str) -> "Label":
        return cls("Other", text=text)

    @classmethod
    def parse(cls, s: str) -> "Label":
        if s == "F":
            return cls.F()
        if s.startswith("Z") and "," in s:
            i, j = s[1:].split(",")
            return cls.Z(int(i), int(j))
        if s.startswith("R") and s[1:].isdigit():
            return cls.R(int(s[1:]))
        return cls.other(s)


@dataclass(frozen=True)
class Inequality:
    """``<normal, x> >= rhs``."""

    normal: tuple[int, ...]
    rhs: int
    label: Label

    def __post_init__(self):
        if not any(self.normal):
            raise ValueError("inequality normal must be nonzero")

    def homogenized(self) -> tuple[int, ...]:
        """Normal of the cone over the polytope: ``(-rhs, normal)``."""
        return (-self.rhs,) + tuple(self.normal)


@dataclass(frozen=True)
class Face:
    tight: frozenset[int]
    points: np.ndarray = field(compare=False, repr=False)
    dim: int = -1
    labels: tuple[str, ...] = ()

    def point_list(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in p) for p in self.points]


@dataclass(frozen=True)
class ConeData:
    rays: tuple[tuple[int, ...], ...]
    lam: LatticeBasis
    rays_lambda: tuple[tuple[int, ...], ...]
    facet_normals_lambda: tuple[tuple[int, ...], ...]
    facet_labels: tuple[str, ...]

    @property
    def dim(self) -> int:
        return self.lam.rank


_SWEEP_ROWS = 1 << 18


def _suffix_max(normals: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """``S[c, m]``: max of ``sum_{c' >= c} normals[m, c'] x_c'`` over the box."""
    contrib = np.maximum(normals * lo, normals * hi).T.astype(object)
    n = contrib.shape[0]
    out = np.zeros((n + 1, normals.shape[0]), dtype=object)
    for c in range(n - 1, -1, -1):
        out[c] = out[c + 1] + contrib[c]
    return out


def enumerate_points(
    ineqs: Sequence[Inequality],
    box: Sequence[tuple[int, int]],
    max_cells: Optional[int] = DEFAULT_MAX_CELLS,
) -> np.ndarray:
    """All integer points of ``box`` satisfying every inequality, lexicographically sorted.

    Coordinates are fixed one at a time and partial points that can no
    longer reach any inequality inside the box are dropped early.
    """
    n = len(box)
    lo = np.array([b[0] for b in box], dtype=np.int64)
    hi = np.array([b[1] for b in box], dtype=np.int64)
    if n == 0:
        ok = all(0 >= q.rhs for q in ineqs)
        return np.zeros((1 if ok else 0, 0), dtype=np.int64)
    if np.any(hi < lo):
        return np.zeros((0, n), dtype=np.int64)
    volume = 1
    for a, b in zip(lo, hi):
        volume *= int(b - a + 1)
    if max_cells is not None and volume > max_cells:
        raise InstanceTooLarge(f"bounding box has {volume} cells, budget is {max_cells}")
    if not ineqs:
        grids = np.meshgrid(*[np.arange(a, b + 1) for a, b in zip(lo, hi)], indexing="ij")
        return np.stack([g.ravel() for g in grids], axis=1).astype(np.int64)
    N = np.array([q.normal for q in ineqs], dtype=np.int64)
    rhs = np.array([q.rhs for q in ineqs], dtype=np.int64)
    smax = _suffix_max(N, lo, hi).astype(np.int64)

    def sweep(pts, partial, start):
        for c in range(start, n):
            vals = np.arange(lo[c], hi[c] + 1, dtype=np.int64)
            m = vals.size
            if len(pts) * m > _SWEEP_ROWS and len(pts) > 1:
                # bound the size of the expanded block; order is kept
                step = max(1, _SWEEP_ROWS // m)
                return np.concatenate([sweep(pts[i:i + step], partial[i:i + step], c)
                                       for i in range(0, len(pts), step)])
            pts = np.hstack([np.repeat(pts, m, axis=0), np.tile(vals, pts.shape[0])[:, None]])
            partial = np.repeat(partial, m, axis=0) + np.outer(np.tile(vals, partial.shape[0]), N[:, c])
            keep = np.all(partial + smax[c + 1] >= rhs, axis=1)
            pts, partial = pts[keep], partial[keep]
        return pts

    return sweep(np.zeros((1, 0), dtype=np.int64), np.zeros((1, len(ineqs)), dtype=np.int64), 0)


def affine_rank(points: np.ndarray) -> int:
    """Dimension of the affine hull (``-1`` for no points)."""
    if len(points) == 0:
        return -1
    lifted = np.hstack([np.ones((len(points), 1), dtype=points.dtype), points])
    return exact.rank(lifted) - 1


def _lift(points: np.ndarray) -> np.ndarray:
    return np.hstack([np.ones((len(points), 1), dtype=np.int64), points.astype(np.int64)])


class LatticePolytope:
    """Polytope ``{x : <u, x> >= r for all candidates}`` with its lattice points.

    Facets are found among the candidate inequalities, so every facet of the
    hull of the lattice points must be given by a candidate that is tight on
    lattice points.  Instances are treated as immutable; derived data is
    computed lazily and cached on the instance.
    """

    def __init__(
        self,
        inequalities: Sequence[Inequality],
        box: Sequence[tuple[int, int]],
        index_layout: Optional[Sequence[tuple[int, int]]] = None,
        max_cells: Optional[int] = DEFAULT_MAX_CELLS,
        points: Optional[np.ndarray] = None,
    ):
        self.inequalities = tuple(inequalities)
        self.box = tuple((int(a), int(b)) for a, b in box)
        self.ambient_dim = len(self.box)
        self.index_layout = tuple(index_layout) if index_layout is not None else tuple(
            (1, j + 1) for j in range(self.ambient_dim)
        )
        self.max_cells = max_cells
        if points is None:
            points = enumerate_points(self.inequalities, self.box, max_cells)
        self.points = np.asarray(points, dtype=np.int64).reshape(-1, self.ambient_dim)

    def __len__(self) -> int:
        return len(self.points)

    def __repr__(self) -> str:
        return f"LatticePolytope(n={self.ambient_dim}, points={len(self.points)}, dim={self.dim})"

    # -- basic data ---------------------------------------------------------

    @cached_property
    def normals(self) -> np.ndarray:
        return np.array([q.normal for q in self.inequalities], dtype=np.int64).reshape(-1, self.ambient_dim)

    @cached_property
    def rhs(self) -> np.ndarray:
        return np.array([q.rhs for q in self.inequalities], dtype=np.int64)

    @cached_property
    def tight_matrix(self) -> np.ndarray:
        """Boolean ``points x inequalities`` array of equalities."""
        if len(self.points) == 0:
            return np.zeros((0, len(self.inequalities)), dtype=bool)
        return (self.points @ self.normals.T) == self.rhs

    @cached_property
    def dim(self) -> int:
        return affine_rank(self.points)

    def dimension(self) -> int:
        return self.dim

    @cached_property
    def difference_lattice(self) -> LatticeBasis:
        """Lattice spanned by differences of lattice points of the polytope."""
        if len(self.points) <= 1:
            return LatticeBasis(self.ambient_dim, ())
        diffs = self.points[1:] - self.points[0]
        return LatticeBasis.from_generators(diffs)

    # -- facets -------------------------------------------------------------

    @cached_property
    def _facet_data(self) -> tuple[tuple[int, ...], tuple[frozenset, ...]]:
        """Indices of one representative candidate per facet, and their groups."""
        d = self.dim
        if d < 1:
            return (), ()
        T = self.tight_matrix
        # a face is the hull of its vertices, so rank its vertices only
        V = list(self.vertex_indices)
        TV, PV = T[V], self.points[V]
        groups: dict[bytes, list[int]] = {}
        for m in range(T.shape[1]):
            col = T[:, m]
            if col.all() or not col.any():
                continue
            if affine_rank(PV[TV[:, m]]) == d - 1:
                groups.setdefault(np.packbits(col).tobytes(), []).append(m)
        reps = tuple(sorted(g[0] for g in groups.values()))
        members = {g[0]: frozenset(g) for g in groups.values()}
        return reps, tuple(members[r] for r in reps)

    @property
    def facet_indices(self) -> tuple[int, ...]:
        """Candidate indices defining facets; one per facet."""
        return self._facet_data[0]

    @property
    def facet_label_set(self) -> frozenset[str]:
        """Labels of every candidate inequality that defines a facet."""
        return frozenset(str(self.inequalities[m].label) for g in self._facet_data[1] for m in g)

    def facets(self) -> list[Face]:
        out = []
        for rep, group in zip(*self._facet_data):
            col = self.tight_matrix[:, rep]
            out.append(self._face_from_mask(col, dim=self.dim - 1))
        return out

    def _closure_tight(self, mask: np.ndarray) -> frozenset[int]:
        """All candidate inequalities tight on every point selected by ``mask``."""
        return frozenset(np.nonzero(self.tight_matrix[mask].all(axis=0))[0].tolist())

    def _face_from_mask(self, mask: np.ndarray, dim: Optional[int] = None) -> Face:
        tight = self._closure_tight(mask)
        pts = self.points[mask]
        if dim is None:
            dim = affine_rank(pts)
        labels = tuple(str(self.inequalities[m].label) for m in sorted(tight))
        return Face(tight, pts, dim, labels)

    # -- vertices -----------------------------------------------------------

    @cached_property
    def vertex_indices(self) -> tuple[int, ...]:
        """Row indices (into ``points``) of the vertices."""
        d = self.dim
        P = self.points
        if d < 0:
            return ()
        if d == 0:
            return (0,)
        T = self.tight_matrix
        packed = np.packbits(T, axis=1)
        if packed.shape[1] <= 8:
            key = np.zeros((len(T), 8), dtype=np.uint8)
            key[:, : packed.shape[1]] = packed
            _, inverse, counts = np.unique(key.view(np.uint64).ravel(), return_inverse=True, return_counts=True)
        else:
            _, inverse, counts = np.unique(packed, axis=0, return_inverse=True, return_counts=True)
        inverse = inverse.ravel()
        popcount = T.sum(axis=1)
        cands = np.nonzero((counts[inverse] == 1) & (popcount >= d))[0]
        D = np.array(self.difference_lattice.basis, dtype=object)
        ND = exact.exact_product(self.normals, D)
        certified = np.zeros(len(cands), dtype=bool)
        if ND.dtype != object and len(cands) and np.abs(ND).max() < 1 << 30:
            # a point is a vertex when its tight normals have rank d on the
            # affine hull; full rank mod p proves it, the rest are checked exactly
            stack = np.where(T[cands][:, :, None], ND[None, :, :], 0)
            certified = exact.rank_mod_p_stack(stack) == d
        out = [int(i) for i in cands[certified]]
        for idx in cands[~certified]:
            if exact.rank(exact.exact_product(self.normals[T[idx]], D)) == d:
                out.append(int(idx))
        return tuple(sorted(out))

    def vertices(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in self.points[i]) for i in self.vertex_indices]

    # -- faces --------------------------------------------------------------

    def facet_vertex_masks(self) -> tuple[np.ndarray, np.ndarray]:
        """``(V, M)``: vertex indices and the ``vertices x facets`` tightness matrix."""
        V = np.array(self.vertex_indices, dtype=np.int64)
        M = self.tight_matrix[V][:, list(self.facet_indices)] if len(self.facet_indices) else np.zeros((len(V), 0), bool)
        return V, M

    def vertex_closure(self, vmask: np.ndarray) -> np.ndarray:
        """Vertices of the smallest face containing the vertices in ``vmask``."""
        _, M = self.facet_vertex_masks()
        common = M[vmask].all(axis=0)
        if not common.any():
            return np.ones(M.shape[0], dtype=bool)
        return M[:, common].all(axis=1)

    def face_from_vertices(self, vmask: np.ndarray) -> Face:
        """Face whose vertex set is ``vmask`` (assumed closed)."""
        V, M = self.facet_vertex_masks()
        common = M[vmask].all(axis=0)
        fidx = np.array(self.facet_indices, dtype=np.int64)[common]
        if fidx.size:
            mask = self.tight_matrix[:, fidx].all(axis=1)
        else:
            mask = np.ones(len(self.points), dtype=bool)
        return self._face_from_mask(mask)

    def faces(self) -> list[Face]:
        """All nonempty faces, ordered by dimension then by point set."""
        if len(self.points) == 0:
            return []
        if len(self.facet_indices) > MAX_FACETS_FOR_FACES:
            raise InstanceTooLarge(f"{len(self.facet_indices)} facets exceeds the face enumeration guard")
        V, M = self.facet_vertex_masks()
        nv = len(V)
        seen: set[bytes] = set()
        frontier = []
        full = np.ones(nv, dtype=bool)
        for v in range(nv):
            m = np.zeros(nv, dtype=bool)
            m[v] = True
            frontier.append(m)
        frontier.append(full)
        found = []
        while frontier:
            nxt = []
            for m in frontier:
                key = np.packbits(m).tobytes()
                if key in seen:
                    continue
                seen.add(key)
                found.append(m)
                for f in range(M.shape[1]):
                    sub = m & M[:, f]
                    if sub.any():
                        sub = self.vertex_closure(sub)
                        if np.packbits(sub).tobytes() not in seen:
                            nxt.append(sub)
            frontier = nxt
        faces = [self.face_from_vertices(m) for m in found]
        faces.sort(key=lambda F: (F.dim, sorted(F.point_list())))
        return faces

    # -- dilation -----------------------------------------------------------

    def dilate(self, s: int, max_cells: Optional[int] = None) -> "LatticePolytope":
        if s < 1:
            raise ValueError("dilation factor must be >= 1")
        ineqs = [Inequality(q.normal, q.rhs * s, q.label) for q in self.inequalities]
        box = [(a * s, b * s) for a, b in self.box]
        return LatticePolytope(ineqs, box, self.index_layout, max_cells=max_cells if max_cells else self.max_cells)

    def dilate_points(self, s: int, max_cells: Optional[int] = None) -> np.ndarray:
        return self.dilate(s, max_cells).points

    # -- cone over the polytope ---------------------------------------------

    @cached_property
    def lifted_lattice(self) -> LatticeBasis:
        """Lattice generated by ``{1} x (P ∩ Z^n)``."""
        if len(self.points) == 0:
            raise ValueError("empty polytope has no cone")
        return LatticeBasis.from_generators(_lift(self.points))

    def cone_data(self) -> ConeData:
        if len(self.points) == 0:
            raise ValueError("empty polytope has no cone")
        return self._cone_data

    @cached_property
    def _cone_data(self) -> ConeData:
        lam = self.lifted_lattice
        B = np.array(lam.basis, dtype=object)
        verts = self.points[list(self.vertex_indices)]
        rays = _lift(verts)
        rays_lambda = tuple(tuple(int(x) for x in r) for r in lam.coordinates_rows(rays).tolist())
        R = np.array(rays_lambda, dtype=object)
        normals, labels = [], []
        seen = set()
        for m, q in enumerate(self.inequalities):
            w = B @ np.array(q.homogenized(), dtype=object)
            if not any(w):
                continue
            w = tuple(exact.primitive(w.tolist()))
            vals = R @ np.array(w, dtype=object)
            if np.any(vals < 0):
                raise AssertionError("candidate inequality violated by a ray")
            tight = R[vals == 0]
            if len(tight) == 0 or exact.rank(np.array(tight.tolist(), dtype=np.int64)) != lam.rank - 1:
                continue
            if w in seen:
                continue
            seen.add(w)
            normals.append(w)
            labels.append(str(q.label))
        if lam.rank == self.ambient_dim + 1 and lam.is_saturated():
            # unimodular change of basis: primitivity in Z^{n+1} must agree
            by_label = {str(q.label): q for q in self.inequalities}
            for w, lab in zip(normals, labels):
                u = exact.primitive(by_label[lab].homogenized())
                assert tuple((B @ np.array(u, dtype=object)).tolist()) == w
        return ConeData(
            rays=tuple(tuple(int(x) for x in r) for r in rays.tolist()),
            lam=lam,
            rays_lambda=rays_lambda,
            facet_normals_lambda=tuple(normals),
            facet_labels=tuple(labels),
        )
