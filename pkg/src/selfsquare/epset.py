"""Eventually periodic infinite subsets of {1, 2, 3, ...}."""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm

__all__ = ["EPSet", "first_difference", "natset_contains", "natset_str"]


@dataclass(frozen=True, order=True)
class EPSet:
    """n is a member iff n in ``exceptions`` or (n >= threshold and
    n % period in ``residues``).

    Instances are canonical (minimal period, then minimal threshold), so
    equality of records is equality of sets. Build them with
    :meth:`from_parts`.
    """

    threshold: int
    period: int
    residues: tuple[int, ...]
    exceptions: tuple[int, ...]

    @classmethod
    def from_parts(cls, finite=(), progressions=()) -> EPSet:
        """Union of a finite set and arithmetic progressions ``start + step*k``."""
        finite = sorted(set(int(n) for n in finite))
        progs = [(int(a), int(b)) for a, b in progressions]
        if not progs:
            raise ValueError("an EPSet needs at least one progression (M must be infinite)")
        for a, b in progs:
            if b < 1:
                raise ValueError(f"progression step must be positive, got {b}")
            if a < 1:
                raise ValueError("0 is not allowed in M")
        if finite and finite[0] < 1:
            raise ValueError("0 is not allowed in M")
        fin = set(finite)

        def member(n):
            return n in fin or any(n >= a and (n - a) % b == 0 for a, b in progs)

        big = lcm(*(b for _, b in progs))
        t0 = max([1] + [n + 1 for n in finite] + [a for a, _ in progs])
        period = next(
            d for d in range(1, big + 1)
            if big % d == 0 and all(member(n) == member(n + d) for n in range(t0, t0 + big))
        )
        t = t0
        while t > 1 and member(t - 1) == member(t - 1 + period):
            t -= 1
        residues = tuple(sorted({n % period for n in range(t, t + period) if member(n)}))
        exceptions = tuple(n for n in range(1, t) if member(n))
        return cls(t, period, residues, exceptions)

    def __contains__(self, n) -> bool:
        if n in self.exceptions:
            return True
        return n >= self.threshold and n % self.period in self.residues

    def progressions(self) -> list[tuple[int, int]]:
        out = []
        for r in self.residues:
            start = self.threshold + (r - self.threshold) % self.period
            out.append((start, self.period))
        return sorted(out)

    def members_below(self, bound: int) -> list[int]:
        return [n for n in range(1, bound) if n in self]

    def horizon(self) -> int:
        """Every membership pattern repeats from here on with ``period``."""
        return self.threshold + self.period

    def text(self) -> str:
        fin = ",".join(str(n) for n in self.exceptions)
        progs = ",".join(f"{a}+{b}k" for a, b in self.progressions())
        return f"{fin};{progs}"

    def __str__(self):
        return "{" + self.text() + "}"


def natset_contains(s, n: int) -> bool:
    return n in s


def _bound(s) -> tuple[int, int]:
    if isinstance(s, EPSet):
        return s.threshold, s.period
    return (max(s) + 1 if s else 1), 1


def first_difference(a, b) -> int | None:
    """Least element of a - b, else least element of b - a, else None.

    ``a`` and ``b`` are EPSets or finite sets of naturals.
    """
    (ta, pa), (tb, pb) = _bound(a), _bound(b)
    limit = max(ta, tb) + lcm(pa, pb) + 1
    only_a = [n for n in range(0, limit) if (n in a) and (n not in b)]
    if only_a:
        return only_a[0]
    only_b = [n for n in range(0, limit) if (n in b) and (n not in a)]
    return only_b[0] if only_b else None


def natset_str(s) -> str:
    if isinstance(s, EPSet):
        return str(s)
    return "{" + ",".join(str(n) for n in sorted(s)) + "}"
