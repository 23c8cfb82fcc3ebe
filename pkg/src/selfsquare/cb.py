"""Brute-force Cantor-Bendixson derivatives of finite products of ordinal
intervals [0, w^a*j].

A closed subset is kept as a finite union of rectangles whose sides are
either ``{0}`` or ``P(e)``, the positive multiples of w^e inside the factor.
The derivative only needs the one-dimensional rule ``P(e)' = P(e+1)``,
``{0}' = {}`` and the product identity (A x B)' = (A' x B) u (A x B'); it
never touches the natural-sum law, which is what makes it usable as an
oracle for :func:`selfsquare.ordinal.product_form`.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

from .ordinal import Ordinal, ScatteredForm

__all__ = ["Atom", "ZERO", "PMult", "RectSet", "derive", "rank_and_mult", "point_rank", "derivative_stages"]


@dataclass(frozen=True, order=True)
class Atom:
    # exp == -1 encodes the singleton {0}
    exp: int = -1

    def __str__(self):
        return "{0}" if self.exp < 0 else f"P({self.exp})"


ZERO = Atom(-1)


def PMult(e: int) -> Atom:
    return Atom(e)


def _factor_rank(f: ScatteredForm) -> int:
    if not f.rank.is_finite():
        raise ValueError(f"oracle only handles finite ranks, got {f}")
    return f.rank.as_int()


def _endpoint(f: ScatteredForm) -> Ordinal:
    a = _factor_rank(f)
    if a == 0:
        return Ordinal.of(f.mult - 1)
    return Ordinal.omega_power(a, f.mult)


def _atom_empty(atom: Atom, f: ScatteredForm) -> bool:
    if atom.exp < 0:
        return False
    a = _factor_rank(f)
    if a == 0:
        return atom.exp > 0 or f.mult == 1
    return atom.exp > a


def _atom_contains(big: Atom, small: Atom) -> bool:
    if big.exp < 0 or small.exp < 0:
        return big == small
    return small.exp >= big.exp


def _atom_points(atom: Atom, f: ScatteredForm) -> list[Ordinal]:
    if atom.exp < 0:
        return [Ordinal()]
    a = _factor_rank(f)
    if a == 0:
        return [Ordinal.of(i) for i in range(1, f.mult)]
    if atom.exp < a:
        raise ValueError("infinite atom")
    return [Ordinal.omega_power(a, i) for i in range(1, f.mult + 1)]


def _atom_member(x: Ordinal, atom: Atom) -> bool:
    if atom.exp < 0:
        return not x
    return bool(x) and x.least_exponent() >= atom.exp


@dataclass(frozen=True)
class RectSet:
    ambient: tuple[ScatteredForm, ...]
    rects: tuple[tuple[Atom, ...], ...]

    @classmethod
    def full(cls, factors) -> RectSet:
        factors = tuple(factors)
        sides = [(ZERO, PMult(0)) for _ in factors]
        return cls.make(factors, itertools.product(*sides))

    @classmethod
    def make(cls, ambient, rects) -> RectSet:
        ambient = tuple(ambient)
        kept = set()
        for r in rects:
            r = tuple(r)
            if len(r) != len(ambient):
                raise ValueError("rectangle arity mismatch")
            if any(_atom_empty(a, f) for a, f in zip(r, ambient)):
                continue
            kept.add(r)
        maximal = [
            r for r in kept
            if not any(o != r and all(_atom_contains(b, s) for b, s in zip(o, r)) for o in kept)
        ]
        return cls(ambient, tuple(sorted(maximal)))

    def __bool__(self):
        return bool(self.rects)

    def __contains__(self, x) -> bool:
        x = tuple(x)
        if len(x) != len(self.ambient):
            return False
        if any(xi > _endpoint(f) for xi, f in zip(x, self.ambient)):
            return False
        return any(all(_atom_member(xi, a) for xi, a in zip(x, r)) for r in self.rects)

    def points(self) -> set[tuple[Ordinal, ...]]:
        """Exact point set; only defined when every rectangle is finite."""
        out = set()
        for r in self.rects:
            out.update(itertools.product(*(_atom_points(a, f) for a, f in zip(r, self.ambient))))
        return out

    def to_json(self):
        return [[str(a) for a in r] for r in self.rects]


def derive(s: RectSet) -> RectSet:
    out = []
    for r in s.rects:
        for i, atom in enumerate(r):
            if atom.exp < 0:
                continue
            out.append(r[:i] + (PMult(atom.exp + 1),) + r[i + 1:])
    return RectSet.make(s.ambient, out)


def derivative_stages(factors) -> list[RectSet]:
    """X, X', X'', ... up to the last nonempty stage."""
    factors = tuple(factors)
    if not factors:
        raise ValueError("need at least one factor")
    bound = sum(_factor_rank(f) for f in factors) + 2
    stages = [RectSet.full(factors)]
    while True:
        nxt = derive(stages[-1])
        if not nxt:
            return stages
        stages.append(nxt)
        if len(stages) > bound:
            raise RuntimeError("derivative iteration failed to terminate")


def rank_and_mult(factors) -> tuple[Ordinal, int]:
    stages = derivative_stages(factors)
    return Ordinal.of(len(stages) - 1), len(stages[-1].points())


def point_rank(x, factors) -> Ordinal:
    """Least n with x not in X^(n+1)."""
    if isinstance(x, Ordinal):
        x = (x,)
    stages = derivative_stages(factors)
    if tuple(x) not in stages[0]:
        raise ValueError(f"point {tuple(str(v) for v in x)} outside the ambient space")
    n = 0
    while n + 1 < len(stages) and tuple(x) in stages[n + 1]:
        n += 1
    return Ordinal.of(n)
