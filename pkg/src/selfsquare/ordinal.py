"""Ordinals below w^w in Cantor normal form, and the scattered-compactum forms
w^a*k+1 that classify countable compact metrizable spaces."""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import total_ordering

__all__ = [
    "Ordinal",
    "ScatteredForm",
    "natural_sum",
    "compare",
    "product_form",
    "union_form",
    "FIN1",
]


@total_ordering
@dataclass(frozen=True)
class Ordinal:
    """CNF term list ``((exponent, coefficient), ...)`` with strictly decreasing
    exponents; the empty tuple is 0."""

    terms: tuple[tuple[int, int], ...] = ()

    def __post_init__(self):
        terms = tuple((int(e), int(c)) for e, c in self.terms)
        prev = None
        for e, c in terms:
            if e < 0 or c < 1:
                raise ValueError(f"bad CNF term w^{e}*{c}")
            if prev is not None and e >= prev:
                raise ValueError("CNF exponents must be strictly decreasing")
            prev = e
        object.__setattr__(self, "terms", terms)

    @classmethod
    def of(cls, n: int) -> Ordinal:
        if n < 0:
            raise ValueError("ordinals are non-negative")
        return cls(((0, n),)) if n else cls()

    @classmethod
    def omega_power(cls, e: int, c: int = 1) -> Ordinal:
        return cls(((e, c),))

    @classmethod
    def parse(cls, text: str) -> Ordinal:
        return parse_ordinal(text)

    def __lt__(self, other):
        if not isinstance(other, Ordinal):
            return NotImplemented
        return compare(self, other) < 0

    def __bool__(self):
        return bool(self.terms)

    def is_finite(self) -> bool:
        return not self.terms or (len(self.terms) == 1 and self.terms[0][0] == 0)

    def as_int(self) -> int:
        if not self.is_finite():
            raise ValueError(f"{self} is infinite")
        return self.terms[0][1] if self.terms else 0

    def least_exponent(self) -> int | None:
        """Exponent of the last CNF term (None for 0)."""
        return self.terms[-1][0] if self.terms else None

    def is_limit(self) -> bool:
        return bool(self.terms) and self.terms[-1][0] > 0

    def coefficients(self) -> dict[int, int]:
        return dict(self.terms)

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for e, c in self.terms:
            if e == 0:
                parts.append(str(c))
            elif e == 1:
                parts.append(f"w*{c}")
            else:
                parts.append(f"w^{e}*{c}")
        return "+".join(parts)

    def __repr__(self):
        return f"Ordinal({self})"


_TERM = re.compile(r"^(?:w(?:\^(\d+))?(?:\*(\d+))?|(\d+))$")


def parse_ordinal(text: str) -> Ordinal:
    """Parse ``w^3*2+w*1+4`` style text. Terms must be in decreasing order."""
    s = text.replace(" ", "").replace("ω", "w")
    if not s:
        raise ValueError("empty ordinal")
    terms = []
    for part in s.split("+"):
        m = _TERM.match(part)
        if not m:
            raise ValueError(f"bad ordinal term {part!r} in {text!r}")
        if m.group(3) is not None:
            e, c = 0, int(m.group(3))
        else:
            e = int(m.group(1)) if m.group(1) is not None else 1
            c = int(m.group(2)) if m.group(2) is not None else 1
        if c == 0:
            continue
        terms.append((e, c))
    return Ordinal(tuple(terms))


def compare(a: Ordinal, b: Ordinal) -> int:
    """-1, 0 or 1. Lexicographic on the term lists."""
    for (ea, ca), (eb, cb) in zip(a.terms, b.terms):
        if ea != eb:
            return 1 if ea > eb else -1
        if ca != cb:
            return 1 if ca > cb else -1
    la, lb = len(a.terms), len(b.terms)
    return (la > lb) - (la < lb)


def natural_sum(a: Ordinal, b: Ordinal) -> Ordinal:
    """Hessenberg sum: coefficientwise addition of CNF vectors."""
    acc = a.coefficients()
    for e, c in b.terms:
        acc[e] = acc.get(e, 0) + c
    return Ordinal(tuple(sorted(acc.items(), reverse=True)))


@dataclass(frozen=True, order=True)
class ScatteredForm:
    """``rank == 0``: discrete space with ``mult`` points; otherwise the
    ordinal space w^rank*mult+1."""

    rank: Ordinal
    mult: int

    def __post_init__(self):
        if not isinstance(self.rank, Ordinal):
            object.__setattr__(self, "rank", Ordinal.of(self.rank))
        if self.mult < 1:
            raise ValueError("mult must be >= 1 (the empty space is excluded)")

    @classmethod
    def of(cls, rank: int, mult: int = 1) -> ScatteredForm:
        return cls(Ordinal.of(rank), mult)

    def is_point(self) -> bool:
        return not self.rank and self.mult == 1

    def in_O(self) -> bool:
        """Member of {1} u {w^n+1 : n >= 1}."""
        return self.mult == 1

    def __str__(self):
        if not self.rank:
            return f"Fin({self.mult})"
        if self.rank.is_finite() and self.mult == 1:
            return f"O({self.rank.as_int()})"
        return f"w^({self.rank})*{self.mult}+1"


FIN1 = ScatteredForm(Ordinal(), 1)


def product_form(p: ScatteredForm, q: ScatteredForm) -> ScatteredForm:
    return ScatteredForm(natural_sum(p.rank, q.rank), p.mult * q.mult)


def union_form(forms) -> ScatteredForm:
    """Type of a finite disjoint (clopen) union of countable compacta."""
    forms = list(forms)
    if not forms:
        raise ValueError("empty union")
    top = max(f.rank for f in forms)
    return ScatteredForm(top, sum(f.mult for f in forms if f.rank == top))
