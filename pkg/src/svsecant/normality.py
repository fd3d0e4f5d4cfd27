"""Level-by-level normality check for lattice polytopes.

``sP ∩ Z^n`` should equal the set of sums of ``s`` lattice points of ``P``.
The sums are built incrementally: a point ``q`` of ``sP`` is reachable if
``q - p`` is reachable at level ``s - 1`` for some lattice point ``p`` of
``P``.  Points are encoded as mixed-radix integers so membership tests are
vectorised.
"""
from __future__ import annotations

import itertools
from typing import Optional

import numpy as np

from . import exact
from .polytope import LatticePolytope

__all__ = ["check_normality", "minkowski_levels", "brute_force_sums", "check_lattice_saturation"]


def _difference_encoder(lo: np.ndarray, hi: np.ndarray, s: int):
    """Linear mixed-radix code, injective on every ``q - p`` with ``q`` in the box of ``sP`` and ``p`` in that of ``P``.

    Returns ``(encode, radix)``; ``encode(q) - p @ radix`` is the code of ``q - p``.
    """
    width = hi - lo
    off = (s - 1) * lo - width
    span = [(s + 1) * int(w) + 1 for w in width]
    radix = [1]
    for w in span[:-1]:
        radix.append(radix[-1] * w)
    if radix[-1] * span[-1] >= 1 << 62:
        raise OverflowError("dilation too large to encode")
    radix = np.array(radix, dtype=np.int64)

    def encode(X: np.ndarray) -> np.ndarray:
        return (X - off) @ radix

    return encode, radix


def minkowski_levels(P: LatticePolytope, s_max: int, max_cells: Optional[int] = None):
    """Yield ``(s, points of sP, reachable mask)`` for ``s = 1..s_max``."""
    pts = P.points
    if len(pts) == 0:
        return
    n = P.ambient_dim
    lo = np.array([b[0] for b in P.box], dtype=np.int64)
    hi = np.array([b[1] for b in P.box], dtype=np.int64)
    # Points far from the centre first: targets near the boundary have few
    # decompositions, and clearing them early shrinks the work list fastest.
    spread = np.abs(2 * pts - (pts.min(axis=0) + pts.max(axis=0))).sum(axis=1)
    order = np.argsort(-spread, kind="stable")
    prev = pts
    yield 1, pts, np.ones(len(pts), dtype=bool)
    for s in range(2, s_max + 1):
        target = P.dilate_points(s, max_cells=max_cells)
        if n == 0:
            yield s, target, np.ones(len(target), dtype=bool)
            continue
        encode, radix = _difference_encoder(lo, hi, s)
        prev_codes = np.sort(encode(prev))
        codes = encode(target)
        # sorted codes stay sorted after a shift, which keeps searchsorted fast
        perm = np.argsort(codes, kind="stable")
        codes = codes[perm]
        shifts = pts[order] @ radix
        # Forward while many targets are open: mark prev + p among the
        # targets.  Backward once few remain: test q - p against prev.
        hit = np.zeros(len(codes), dtype=bool)
        start = len(shifts)
        for i, pc in enumerate(shifts):
            sums = prev_codes + pc
            pos = np.searchsorted(codes, sums)
            pos[pos == len(codes)] = 0
            hit[pos[codes[pos] == sums]] = True
            if i % 8 == 7 and len(hit) - np.count_nonzero(hit) < len(prev_codes):
                start = i + 1
                break
        open_ = ~hit
        todo, codes = perm[open_], codes[open_]
        for pc in shifts[start:]:
            if not len(todo):
                break
            cand = codes - pc
            pos = np.searchsorted(prev_codes, cand)
            pos[pos == len(prev_codes)] = 0
            miss = prev_codes[pos] != cand
            if not miss.all():
                todo, codes = todo[miss], codes[miss]
        reach = np.ones(len(target), dtype=bool)
        reach[todo] = False
        yield s, target, reach
        prev = target[reach]


def check_normality(P: LatticePolytope, s_max: int = 3, max_cells: Optional[int] = None) -> dict:
    """Largest level up to ``s_max`` where every lattice point is a sum of points of ``P``."""
    normal_up_to = s_max
    failures: list[dict] = []
    for s, target, reach in minkowski_levels(P, s_max, max_cells):
        if not reach.all():
            normal_up_to = s - 1
            bad = target[~reach]
            failures.append({"level": s, "points": [list(map(int, q)) for q in bad[:10]], "count": int(len(bad))})
            break
    return {"normal_up_to": normal_up_to, "witness_failures": failures}


def brute_force_sums(P: LatticePolytope, s: int) -> set[tuple[int, ...]]:
    """All sums of ``s`` lattice points of ``P`` (for small polytopes)."""
    out = set()
    for combo in itertools.combinations_with_replacement(range(len(P.points)), s):
        out.add(tuple(int(x) for x in P.points[list(combo)].sum(axis=0)))
    return out


def check_lattice_saturation(P: LatticePolytope) -> dict:
    """Whether the lattice of the lifted points is saturated in ``Z^{n+1}``."""
    if len(P.points) == 0:
        raise ValueError("empty polytope")
    lam = P.lifted_lattice
    factors = exact.snf(lam.basis)
    return {
        "saturated": all(d == 1 for d in factors),
        "rank": lam.rank,
        "full_rank": lam.rank == P.ambient_dim + 1,
        "basis": [list(v) for v in lam.basis],
    }
