"""Labelled simplicial complexes and their cumulant coordinates.

A simplex is identified with the multiset of its labels, stored as a sorted
tuple of label positions.  For a simplex ``s`` the coordinate ``x_s`` is the
product of the label variables ``t_l``.  Two triangular coordinate changes
are implemented:

``y_s = sum over sub-multisets s' of (-1)^(|s|+|s'|) * mult * x_s' * prod x_l^(m_l(s)-m_l(s'))``
    where ``mult`` counts the vertex subsets of ``s`` carrying the labels of ``s'``;

``z_s = sum over interval partitions g of s into blocks of size >= 2 of (-1)^(|g|+1) prod y_B``
    with the blocks taken as consecutive runs of the label-sorted simplex.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb, prod
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .poly import Poly, Ring
from .segre_veronese import SVParams

__all__ = [
    "LabeledComplex",
    "SymbolicBudgetExceeded",
    "DisconnectedComplex",
    "sv_complex",
    "parse_complex",
    "embed",
    "y_transform",
    "z_transform",
    "thick_interval_partitions",
    "verify_secant_identity",
    "verify_reparametrization",
    "toric_binomials",
    "round_trip",
    "vanishes_on_monomial_image",
    "random_complex",
]

MAX_SYMBOLIC_SIMPLEX = 12
MAX_SV_VERTICES = 14
MAX_BINOMIAL_DEGREE = 6
MAX_BINOMIAL_COLUMNS = 20


class SymbolicBudgetExceeded(RuntimeError):
    pass


class DisconnectedComplex(ValueError):
    pass


def _label_sort_key(s: str):
    return (0, int(s), "") if s.lstrip("-").isdigit() else (1, 0, s)


@dataclass(frozen=True)
class LabeledComplex:
    """Simplicial complex whose vertices carry (possibly repeated) labels."""

    vertex_labels: Mapping[str, str]
    generators: tuple[frozenset[str], ...]
    require_connected: bool = field(default=True, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "vertex_labels", dict(self.vertex_labels))
        gens = tuple(frozenset(g) for g in self.generators)
        object.__setattr__(self, "generators", gens)
        for g in gens:
            for v in g:
                if v not in self.vertex_labels:
                    raise ValueError(f"vertex {v!r} has no label")
        if self.require_connected and not self.is_connected():
            raise DisconnectedComplex("the complex is not connected")

    @cached_property
    def labels(self) -> tuple[str, ...]:
        return tuple(sorted(set(self.vertex_labels.values()), key=_label_sort_key))

    @cached_property
    def label_index(self) -> dict[str, int]:
        return {s: i for i, s in enumerate(self.labels)}

    @cached_property
    def vertex_order(self) -> tuple[str, ...]:
        """Vertices sorted by label, ties broken by vertex name."""
        return tuple(sorted(
            self.vertex_labels,
            key=lambda v: (self.label_index[self.vertex_labels[v]], _label_sort_key(v)),
        ))

    def is_connected(self) -> bool:
        verts = list(self.vertex_labels)
        if len(verts) <= 1:
            return True
        parent = {v: v for v in verts}

        def find(v):
            while parent[v] != v:
                parent[v] = parent[parent[v]]
                v = parent[v]
            return v

        for g in self.generators:
            g = sorted(g)
            for v in g[1:]:
                parent[find(v)] = find(g[0])
        return len({find(v) for v in verts}) == 1

    def label_multiset(self, vertices: Iterable[str]) -> tuple[int, ...]:
        return tuple(sorted(self.label_index[self.vertex_labels[v]] for v in vertices))

    @cached_property
    def simplices(self) -> tuple[tuple[int, ...], ...]:
        """Distinct simplices as sorted label-index tuples, ``()`` first, then by size."""
        out = {()}
        for v in self.vertex_labels:
            out.add(self.label_multiset([v]))
        for g in self.generators:
            for sub in sub_multisets(self.label_multiset(g)):
                out.add(sub)
        return tuple(sorted(out, key=lambda s: (len(s), s)))

    def name(self, s: Sequence[int]) -> str:
        labs = [self.labels[i] for i in s]
        if all(len(x) == 1 for x in labs):
            return "".join(labs)
        return ".".join(labs)

    def __len__(self) -> int:
        return len(self.simplices)

    @cached_property
    def max_simplex_size(self) -> int:
        return max(len(s) for s in self.simplices)


def sub_multisets(s: Sequence[int]) -> list[tuple[int, ...]]:
    counts = _counts(s)
    keys = sorted(counts)
    out = []
    for choice in itertools.product(*[range(counts[k] + 1) for k in keys]):
        out.append(tuple(k for k, c in zip(keys, choice) for _ in range(c)))
    return out


def _counts(s: Sequence[int]) -> dict[int, int]:
    c: dict[int, int] = {}
    for x in s:
        c[x] = c.get(x, 0) + 1
    return c


def sv_complex(p: SVParams, max_vertices: int = MAX_SV_VERTICES) -> LabeledComplex:
    """Complex with ``a_i`` vertices labelled ``t_{i,j}``; simplices meet block ``i`` in at most ``a_i`` vertices."""
    nv = sum(ai * bi for ai, bi in zip(p.a, p.b))
    if nv > max_vertices:
        raise SymbolicBudgetExceeded(f"{nv} vertices exceeds the budget of {max_vertices}")
    labels = {}
    blocks = []
    for i, (ai, bi) in enumerate(zip(p.a, p.b), start=1):
        block = []
        for j in range(1, bi + 1):
            for c in range(1, ai + 1):
                v = f"{i},{j},{c}"
                labels[v] = f"{i}{j}" if max(p.k, max(p.b)) < 10 else f"{i}_{j}"
                block.append(v)
        blocks.append(block)
    gens = []
    for choice in itertools.product(*[itertools.combinations(bl, ai) for bl, ai in zip(blocks, p.a)]):
        gens.append(frozenset(v for part in choice for v in part))
    return LabeledComplex(labels, tuple(gens))


def parse_complex(text: str) -> LabeledComplex:
    """Read generators, one per line: ``[name:] v1 v2 v3=label ...``.

    A vertex token may carry its label after ``=``; otherwise the label is
    the vertex name.  A vertex's label must be consistent across lines.
    ``#`` starts a comment.
    """
    labels: dict[str, str] = {}
    gens = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" in line:
            line = line.split(":", 1)[1]
        verts = []
        for tok in line.split():
            v, _, lab = tok.partition("=")
            lab = lab or labels.get(v, v)
            if labels.setdefault(v, lab) != lab:
                raise ValueError(f"line {lineno}: vertex {v!r} relabelled")
            verts.append(v)
        if verts:
            gens.append(frozenset(verts))
    if not gens:
        raise ValueError("no generators found")
    return LabeledComplex(labels, tuple(gens))


def embed(cx: LabeledComplex) -> tuple[tuple[str, ...], list[tuple[int, ...]], np.ndarray]:
    """Exponent matrix of ``x_s = prod t_l``: one column per simplex, one row per label."""
    simp = list(cx.simplices)
    A = np.zeros((len(cx.labels), len(simp)), dtype=np.int64)
    for c, s in enumerate(simp):
        for i in s:
            A[i, c] += 1
    return cx.labels, simp, A


# -- coordinate changes -------------------------------------------------------

def x_ring(cx: LabeledComplex, prefix: str = "x") -> Ring:
    return Ring([f"{prefix}{cx.name(s)}" for s in cx.simplices if s])


def _y_formula(cx: LabeledComplex, s: tuple[int, ...], x: Mapping[tuple[int, ...], Poly], one: Poly) -> Poly:
    if len(s) <= 1:
        return x[s]
    m = _counts(s)
    acc = one * 0
    for sub in sub_multisets(s):
        ms = _counts(sub)
        mult = prod(comb(m[l], ms.get(l, 0)) for l in m)
        sign = -1 if (len(s) + len(sub)) % 2 else 1
        term = x[sub] if sub else one
        for l in m:
            e = m[l] - ms.get(l, 0)
            if e:
                term = term * x[(l,)] ** e
        acc = acc + term * (sign * mult)
    return acc


def thick_interval_partitions(m: int) -> list[tuple[tuple[int, int], ...]]:
    """Partitions of ``range(m)`` into consecutive blocks ``[start, stop)`` of length >= 2."""
    if m < 0:
        raise ValueError("size must be >= 0")
    if m == 0:
        return [()]
    out = []
    for first in range(2, m + 1):
        if first == m:
            out.append(((0, m),))
            continue
        for rest in thick_interval_partitions(m - first):
            if rest:
                out.append(((0, first),) + tuple((a + first, b + first) for a, b in rest))
    return out


def _z_formula(s: tuple[int, ...], y: Mapping[tuple[int, ...], Poly]) -> Poly:
    if len(s) <= 1:
        return y[s]
    acc = None
    for g in thick_interval_partitions(len(s)):
        term = y[s[g[0][0]: g[0][1]]]
        for a, b in g[1:]:
            term = term * y[s[a:b]]
        term = term if len(g) % 2 == 1 else -term
        acc = term if acc is None else acc + term
    return acc


def y_transform(cx: LabeledComplex) -> dict[tuple[int, ...], Poly]:
    R = x_ring(cx)
    x = {s: R.gen(f"x{cx.name(s)}") for s in cx.simplices if s}
    return {s: _y_formula(cx, s, x, R.one()) for s in cx.simplices if s}


def z_transform(cx: LabeledComplex, in_x: bool = False) -> dict[tuple[int, ...], Poly]:
    """``z_s`` in the ``y`` variables, or composed down to ``x`` with ``in_x=True``."""
    if in_x:
        y = y_transform(cx)
    else:
        R = x_ring(cx, "y")
        y = {s: R.gen(f"y{cx.name(s)}") for s in cx.simplices if s}
    return {s: _z_formula(s, y) for s in cx.simplices if s}


def _check_budget(cx: LabeledComplex, limit: int) -> None:
    if cx.max_simplex_size > limit:
        raise SymbolicBudgetExceeded(f"simplex of size {cx.max_simplex_size} exceeds the symbolic budget of {limit}")


def _param_ring(cx: LabeledComplex) -> Ring:
    return Ring(["p"] + [f"t{l}" for l in cx.labels] + [f"u{l}" for l in cx.labels])


def secant_coordinates(cx: LabeledComplex) -> tuple[Ring, dict[tuple[int, ...], Poly]]:
    """``x_s = p * prod t + (1 - p) * prod u`` for every nonempty simplex."""
    R = _param_ring(cx)
    pi = R.gen("p")
    out = {}
    for s in cx.simplices:
        if not s:
            continue
        exps_t = {f"t{cx.labels[i]}": 0 for i in s}
        exps_u = {f"u{cx.labels[i]}": 0 for i in s}
        for i in s:
            exps_t[f"t{cx.labels[i]}"] += 1
            exps_u[f"u{cx.labels[i]}"] += 1
        out[s] = pi * R.monomial(exps_t) + (1 - pi) * R.monomial(exps_u)
    return R, out


def _z_on(cx: LabeledComplex, x: Mapping[tuple[int, ...], Poly], one: Poly) -> dict[tuple[int, ...], Poly]:
    y = {s: _y_formula(cx, s, x, one) for s in cx.simplices if s}
    return {s: _z_formula(s, y) for s in cx.simplices if s}


def _diff_product(cx: LabeledComplex, R: Ring, s, sign_flip: bool = False) -> Poly:
    acc = R.one()
    for i in s:
        t, u = R.gen(f"t{cx.labels[i]}"), R.gen(f"u{cx.labels[i]}")
        acc = acc * ((u - t) if sign_flip else (t - u))
    return acc


def verify_secant_identity(cx: LabeledComplex, budget: int = MAX_SYMBOLIC_SIMPLEX) -> tuple[bool, dict[tuple[int, ...], Poly]]:
    """Residuals of ``z_s = p (1-p) (1-2p)^(|s|-2) prod (t_i - u_i)`` on the secant parameterisation.

    Vertices are checked against ``z_v = p t_v + (1 - p) u_v``.
    """
    _check_budget(cx, budget)
    R, x = secant_coordinates(cx)
    z = _z_on(cx, x, R.one())
    pi = R.gen("p")
    residuals = {}
    for s, zs in z.items():
        if len(s) == 1:
            l = cx.labels[s[0]]
            expected = pi * R.gen(f"t{l}") + (1 - pi) * R.gen(f"u{l}")
        else:
            expected = pi * (1 - pi) * (1 - 2 * pi) ** (len(s) - 2) * _diff_product(cx, R, s)
        residuals[s] = zs - expected
    return all(r.is_zero() for r in residuals.values()), residuals


def verify_reparametrization(cx: LabeledComplex, budget: int = MAX_SYMBOLIC_SIMPLEX) -> dict:
    """Check ``z_s = p' prod u'_i`` with ``p' = p(1-p)/(1-2p)^2`` after clearing ``(1-2p)^2``.

    Two sign conventions for ``u'`` are tried: ``(u - t)(1 - 2p)`` and
    ``(t - u)(1 - 2p)``.  The result records which one leaves zero residual
    for every simplex; ``ok`` is true when one convention works throughout.
    """
    _check_budget(cx, budget)
    R, x = secant_coordinates(cx)
    z = _z_on(cx, x, R.one())
    pi = R.gen("p")
    d = 1 - 2 * pi
    per_simplex = {}
    works = {"u-t": True, "t-u": True}
    for s, zs in z.items():
        if len(s) < 2:
            continue
        lhs = zs * d ** 2
        row = {}
        for conv, flip in (("u-t", True), ("t-u", False)):
            rhs = pi * (1 - pi) * _diff_product(cx, R, s, sign_flip=flip) * d ** len(s)
            row[conv] = (lhs - rhs).is_zero()
            works[conv] &= row[conv]
        per_simplex[cx.name(s)] = row
    # vertex coordinates do not move: z_v depends on t_v, u_v, p only
    vertex_ok = all(
        set(_support_names(z[s])) <= {"p", f"t{cx.labels[s[0]]}", f"u{cx.labels[s[0]]}"}
        for s in z if len(s) == 1
    )
    convention = next((c for c in ("u-t", "t-u") if works[c]), None)
    return {
        "ok": convention is not None and vertex_ok,
        "convention": convention,
        "conventions_vanishing": sorted(c for c, w in works.items() if w),
        "per_simplex": per_simplex,
        "vertex_ok": vertex_ok,
    }


def _support_names(f: Poly) -> list[str]:
    used = set()
    for exps, _ in f.items():
        used.update(i for i, e in enumerate(exps) if e)
    return [f.ring.names[i] for i in sorted(used)]


def vanishes_on_monomial_image(cx: LabeledComplex, budget: int = MAX_SYMBOLIC_SIMPLEX) -> dict[tuple[int, ...], bool]:
    """Whether ``z_s`` vanishes on ``x_s = prod t`` (expected for every ``|s| >= 2``)."""
    _check_budget(cx, budget)
    R = Ring([f"t{l}" for l in cx.labels])
    x = {}
    for s in cx.simplices:
        if s:
            x[s] = prod((R.gen(f"t{cx.labels[i]}") for i in s), start=R.one())
    z = _z_on(cx, x, R.one())
    return {s: z[s].is_zero() for s in z if len(s) >= 2}


# -- inverse and round trip ---------------------------------------------------

def inverse_transform(cx: LabeledComplex) -> dict[tuple[int, ...], Poly]:
    """``x_s`` written in the ``z`` variables, solving the triangular system by size."""
    R = x_ring(cx, "z")
    zv = {s: R.gen(f"z{cx.name(s)}") for s in cx.simplices if s}
    y: dict[tuple[int, ...], Poly] = {}
    x: dict[tuple[int, ...], Poly] = {}
    for s in cx.simplices:
        if not s:
            continue
        if len(s) == 1:
            y[s] = x[s] = zv[s]
            continue
        # z_s = y_s + (terms in smaller y)
        y[s] = R.zero()
        rest = _z_formula(s, {**y, s: R.zero()})
        y[s] = zv[s] - rest
        # y_s = x_s + (terms in smaller x)
        x[s] = R.zero()
        rest = _y_formula(cx, s, {**x, s: R.zero()}, R.one())
        x[s] = y[s] - rest
    return x


def round_trip(cx: LabeledComplex, max_simplices: int = 10) -> bool:
    """Compose ``z(x)`` with its inverse and check that every ``x_s`` comes back."""
    if len(cx.simplices) > max_simplices + 1:
        raise SymbolicBudgetExceeded("round trip limited to small complexes")
    z = z_transform(cx, in_x=True)
    inv = inverse_transform(cx)
    values = {f"z{cx.name(s)}": z[s] for s in z}
    Rx = x_ring(cx)
    for s, xs in inv.items():
        back = xs.subs(values)
        if back != Rx.gen(f"x{cx.name(s)}"):
            return False
    return True


# -- binomials ----------------------------------------------------------------

@dataclass(frozen=True)
class Binomial:
    lhs: tuple[int, ...]
    rhs: tuple[int, ...]
    names: tuple[str, ...]

    @property
    def degree(self) -> int:
        return max(sum(self.lhs), sum(self.rhs))

    @staticmethod
    def _mono(exps, names) -> str:
        parts = []
        for e, s in zip(exps, names):
            if e == 1:
                parts.append(s)
            elif e:
                parts.append(f"{s}^{e}")
        return "*".join(parts) or "1"

    def __str__(self) -> str:
        return f"{self._mono(self.lhs, self.names)} - {self._mono(self.rhs, self.names)}"


def toric_binomials(cx: LabeledComplex, degree_bound: int) -> list[Binomial]:
    """Binomials ``x^u - x^v`` in the coordinates of simplices of size >= 2.

    ``u`` and ``v`` have disjoint supports, both have degree at most
    ``degree_bound`` and they have the same image under the monomial map.
    Each binomial appears once, up to sign.  This is a bounded search, not
    a generating set of the toric ideal.
    """
    if degree_bound > MAX_BINOMIAL_DEGREE:
        raise SymbolicBudgetExceeded(f"degree bound {degree_bound} exceeds {MAX_BINOMIAL_DEGREE}")
    cols = [s for s in cx.simplices if len(s) >= 2]
    if len(cols) > MAX_BINOMIAL_COLUMNS:
        raise SymbolicBudgetExceeded(f"{len(cols)} columns exceeds {MAX_BINOMIAL_COLUMNS}")
    names = tuple(f"x{cx.name(s)}" for s in cols)
    L = len(cx.labels)
    images: dict[tuple[int, ...], list[tuple[int, ...]]] = {}
    for deg in range(1, degree_bound + 1):
        for combo in itertools.combinations_with_replacement(range(len(cols)), deg):
            exps = [0] * len(cols)
            img = [0] * L
            for c in combo:
                exps[c] += 1
                for i in cols[c]:
                    img[i] += 1
            images.setdefault(tuple(img), []).append(tuple(exps))
    out = []
    for monos in images.values():
        for u, v in itertools.combinations(monos, 2):
            if any(a and b for a, b in zip(u, v)):
                continue
            # lead with the side supported on fewer variables
            key = lambda e: (-sum(1 for x in e if x), max(e), e)
            hi, lo = (u, v) if key(u) >= key(v) else (v, u)
            out.append(Binomial(hi, lo, names))
    out.sort(key=lambda b: (b.degree, b.lhs, b.rhs), reverse=False)
    return out


def binomial_vanishes(cx: LabeledComplex, b: Binomial) -> bool:
    """Substitute ``x_s = prod t`` into the binomial and test for zero."""
    cols = [s for s in cx.simplices if len(s) >= 2]
    R = Ring([f"t{l}" for l in cx.labels])
    vals = {}
    for name, s in zip(b.names, cols):
        vals[name] = prod((R.gen(f"t{cx.labels[i]}") for i in s), start=R.one())

    def ev(exps):
        acc = R.one()
        for e, name in zip(exps, b.names):
            if e:
                acc = acc * vals[name] ** e
        return acc

    return (ev(b.lhs) - ev(b.rhs)).is_zero()


# -- random complexes ---------------------------------------------------------

def random_complex(rng: random.Random, max_vertices: int = 10, max_labels: int = 6, max_generator: int = 4) -> LabeledComplex:
    """Connected labelled complex with random generators."""
    nv = rng.randint(2, max_vertices)
    nl = rng.randint(1, min(max_labels, nv))
    verts = [f"v{i}" for i in range(nv)]
    labels = {v: str(rng.randrange(nl) + 1) for v in verts}
    gens = []
    for i in range(1, nv):
        # attach each new vertex to an earlier one, keeping the complex connected
        size = rng.randint(2, min(max_generator, i + 1))
        others = rng.sample(verts[:i], size - 1)
        gens.append(frozenset([verts[i], *others]))
    for _ in range(rng.randint(0, 3)):
        size = rng.randint(1, min(max_generator, nv))
        gens.append(frozenset(rng.sample(verts, size)))
    return LabeledComplex(labels, tuple(gens))
