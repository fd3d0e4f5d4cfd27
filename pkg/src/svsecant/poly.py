"""Sparse multivariate polynomials with exact rational coefficients.

Monomials are packed into a single Python int, ``EXP_BITS`` bits per
variable, so multiplying monomials is integer addition.  Every polynomial
belongs to a ``Ring`` that fixes the variable names and their order.
"""
from __future__ import annotations

from fractions import Fraction
from numbers import Rational
from typing import Iterable, Mapping, Sequence, Union

__all__ = ["Ring", "Poly", "EXP_BITS"]

EXP_BITS = 12
_MAX_EXP = (1 << EXP_BITS) - 1

Coeff = Union[int, Fraction]


def _norm(c) -> Coeff:
    if isinstance(c, Fraction):
        return c.numerator if c.denominator == 1 else c
    if isinstance(c, int):
        return c
    if isinstance(c, Rational):
        return _norm(Fraction(c))
    raise TypeError(f"non-rational coefficient {c!r}")


class Ring:
    """Polynomial ring over Q in named variables."""

    def __init__(self, names: Sequence[str]):
        self.names = tuple(names)
        if len(set(self.names)) != len(self.names):
            raise ValueError("duplicate variable names")
        self.index = {s: i for i, s in enumerate(self.names)}

    def __repr__(self) -> str:
        return f"Ring({', '.join(self.names)})"

    def __len__(self) -> int:
        return len(self.names)

    def __eq__(self, other) -> bool:
        return isinstance(other, Ring) and (self is other or self.names == other.names)

    def __hash__(self):
        return hash(self.names)

    def pack(self, exps: Sequence[int]) -> int:
        m = 0
        for i, e in enumerate(exps):
            if e < 0 or e > _MAX_EXP:
                raise OverflowError("exponent out of range")
            m |= e << (EXP_BITS * i)
        return m

    def unpack(self, m: int) -> tuple[int, ...]:
        return tuple((m >> (EXP_BITS * i)) & _MAX_EXP for i in range(len(self.names)))

    def gen(self, name: str) -> "Poly":
        return Poly(self, {1 << (EXP_BITS * self.index[name]): 1})

    def gens(self, names: Iterable[str]) -> list["Poly"]:
        return [self.gen(s) for s in names]

    def const(self, c) -> "Poly":
        return Poly(self, {0: c})

    def zero(self) -> "Poly":
        return Poly(self, {})

    def one(self) -> "Poly":
        return Poly(self, {0: 1})

    def monomial(self, powers: Mapping[str, int], coeff=1) -> "Poly":
        exps = [0] * len(self.names)
        for s, e in powers.items():
            exps[self.index[s]] += e
        return Poly(self, {self.pack(exps): coeff})


class Poly:
    __slots__ = ("ring", "terms", "_deg")

    def __init__(self, ring: Ring, terms: Mapping[int, Coeff] = ()):
        self.ring = ring
        self.terms = {m: _norm(c) for m, c in dict(terms).items() if c != 0}
        self._deg = None

    # -- arithmetic ---------------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.ring != self.ring:
                raise ValueError("polynomials from different rings")
            return other
        return Poly(self.ring, {0: other})

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, 0) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Poly(self.ring, out)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.ring, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return self._coerce(other) - self

    def __mul__(self, other) -> "Poly":
        other = self._coerce(other)
        if len(other.terms) == 1 and 0 in other.terms:
            c = other.terms[0]
            return Poly(self.ring, {m: a * c for m, a in self.terms.items()})
        if self.degree() + other.degree() > _MAX_EXP:
            raise OverflowError("total degree too large for packed monomials")
        out: dict[int, Coeff] = {}
        get = out.get
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = m1 + m2
                out[m] = get(m, 0) + c1 * c2
        return Poly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "Poly":
        if e < 0:
            raise ValueError("negative power")
        out = self.ring.one()
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base if e > 1 else base
            e >>= 1
        return out

    # -- inspection ---------------------------------------------------------

    def __eq__(self, other) -> bool:
        if not isinstance(other, Poly):
            other = self._coerce(other)
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __len__(self) -> int:
        return len(self.terms)

    def degree(self) -> int:
        """Total degree (``-1`` for the zero polynomial)."""
        if self._deg is None:
            self._deg = max((sum(self.ring.unpack(m)) for m in self.terms), default=-1)
        return self._deg

    def items(self):
        """``(exponent tuple, coefficient)`` pairs in a fixed order."""
        return sorted(((self.ring.unpack(m), c) for m, c in self.terms.items()), reverse=True)

    def subs(self, values: Mapping[str, "Poly"]) -> "Poly":
        """Substitute polynomials (possibly from another ring) for variables.

        All substituted values must share one ring, which becomes the ring
        of the result.  Variables not listed must not occur.
        """
        target = next(iter(values.values())).ring if values else self.ring
        cols = []
        for i, s in enumerate(self.ring.names):
            cols.append(values.get(s))
        powers: dict[tuple[int, int], Poly] = {}
        acc: dict[int, Coeff] = {}
        for m, c in self.terms.items():
            exps = self.ring.unpack(m)
            term = target.const(c)
            for i, e in enumerate(exps):
                if not e:
                    continue
                if cols[i] is None:
                    raise KeyError(f"no value for variable {self.ring.names[i]}")
                key = (i, e)
                if key not in powers:
                    powers[key] = cols[i] ** e
                term = term * powers[key]
            for tm, tc in term.terms.items():
                acc[tm] = acc.get(tm, 0) + tc
        return Poly(target, acc)

    def __repr__(self) -> str:
        return f"Poly({self})"

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for exps, c in self.items():
            mono = "*".join(
                (s if e == 1 else f"{s}^{e}") for s, e in zip(self.ring.names, exps) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")
