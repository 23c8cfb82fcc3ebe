"""Finite-stage exact-rational models of the spaces.

A presentation at stage ``s`` is a finite point set in Q^d with the l-inf
metric. Each point carries its cell, a kernel flag (perfect-kernel shadow)
and, off the kernel, its Cantor-Bendixson rank. Alongside the points every
presentation keeps a :class:`Region` tree recording how the space was
assembled; the partition code splits regions instead of guessing structure
from coordinates.

Truncation knobs are all tied to the stage: sequences keep ``s`` children,
the Cantor base keeps the 2^s left endpoints of depth ``s`` and the
compactification uses strips ``n < s``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field, replace
from fractions import Fraction
from functools import lru_cache

from .algebra import CANTOR, FIN, NormalForm, O, X, Z, nf_product
from .epset import EPSet
from .expr import parse_expr
from .ordinal import ScatteredForm, union_form

__all__ = [
    "StageTooCoarse",
    "Point",
    "Cell",
    "Presentation",
    "Catalog",
    "Seq",
    "Union",
    "KBox",
    "Prod",
    "linf",
    "diameter",
    "hausdorff_distance",
    "mesh",
    "strip_bound",
    "cantor_q",
    "cantor_points",
    "density_radius",
    "present_countable",
    "present_K",
    "present_expr",
    "present_nf",
    "refine",
]


class StageTooCoarse(ValueError):
    pass


def linf(a, b) -> Fraction:
    return max(abs(x - y) for x, y in zip(a, b))


def diameter(coords) -> Fraction:
    coords = list(coords)
    if len(coords) < 2:
        return Fraction(0)
    # l-inf diameter is the largest per-axis spread
    return max(max(c[i] for c in coords) - min(c[i] for c in coords) for i in range(len(coords[0])))


def _directed(a, b) -> Fraction:
    return max(min(linf(x, y) for y in b) for x in a)


def hausdorff_distance(a, b) -> Fraction:
    a, b = [tuple(map(Fraction, x)) if isinstance(x, (tuple, list)) else (Fraction(x),) for x in a], \
        [tuple(map(Fraction, y)) if isinstance(y, (tuple, list)) else (Fraction(y),) for y in b]
    if not a or not b:
        raise ValueError("Hausdorff distance needs nonempty sets")
    return max(_directed(a, b), _directed(b, a))


def mesh(cells) -> Fraction:
    """Largest diameter of a family of point sets (coordinate tuples)."""
    cells = list(cells)
    if not cells:
        raise ValueError("mesh of an empty family")
    return max(diameter(c) for c in cells)


def strip_bound(n: int) -> Fraction:
    """t_n = 2^-n."""
    return Fraction(1, 2 ** n)


def density_radius(stage: int) -> Fraction:
    return Fraction(4, 2 ** stage)


@lru_cache(maxsize=None)
def cantor_points(depth: int) -> tuple[Fraction, ...]:
    """Left endpoints of the 2^depth middle-thirds intervals of level ``depth``."""
    pts = []
    for bits in itertools.product((0, 2), repeat=depth):
        pts.append(sum((Fraction(b, 3 ** (i + 1)) for i, b in enumerate(bits)), Fraction(0)))
    return tuple(sorted(pts))


@lru_cache(maxsize=None)
def cantor_q(k: int) -> Fraction:
    """Dense enumeration of Cantor endpoints: level by level, the left end of
    the right child of each interval (2/3; 2/9, 8/9; 2/27, ...)."""
    d = (k + 1).bit_length() - 1
    idx = k - (2 ** d - 1)
    lefts = cantor_points(d)
    return lefts[idx] + Fraction(2, 3 ** (d + 1))


@dataclass(frozen=True)
class Point:
    coords: tuple[Fraction, ...]
    cell: int
    kernel: bool
    iso_rank: int | None
    parent: int | None = None

    def to_json(self):
        return {
            "xy": [str(c) for c in self.coords],
            "cell": self.cell,
            "kernel": self.kernel,
            "isoRank": self.iso_rank,
        }


@dataclass(frozen=True)
class Cell:
    id: int
    label: NormalForm
    members: tuple[int, ...]


# -- regions ---------------------------------------------------------------


@dataclass(frozen=True)
class Seq:
    """A point of rank ``rank`` together with the sequence of clopen blocks
    converging to it. Dropping leading children keeps the homeomorphism type."""

    root: int
    children: tuple = ()
    rank: int = 0

    def points(self) -> list[int]:
        out = [self.root]
        for c in self.children:
            out += c.points()
        return out

    def label(self) -> NormalForm:
        return O(self.rank)

    def subdivide(self, pres):
        if not self.children:
            return None
        return [self.children[0], replace(self, children=self.children[1:])]

    def remap(self, f) -> Seq:
        return Seq(f(self.root), tuple(c.remap(f) for c in self.children), self.rank)


@dataclass(frozen=True)
class Union:
    parts: tuple

    def points(self) -> list[int]:
        return [p for part in self.parts for p in part.points()]

    def label(self) -> NormalForm:
        labels = [p.label() for p in self.parts]
        if all(l.is_countable() for l in labels):
            return NormalForm(countable=union_form(l.countable for l in labels))
        raise ValueError("union label only defined for countable parts")

    def subdivide(self, pres):
        return list(self.parts)

    def remap(self, f) -> Union:
        return Union(tuple(p.remap(f) for p in self.parts))


@dataclass(frozen=True)
class KBox:
    """Part of a compactification: kernel points over one middle-thirds
    interval plus the pieces sitting above them.

    ``kernel`` holds (point id, local abscissa); ``pieces`` holds
    (local abscissa, strip index, region)."""

    space: NormalForm
    kernel: tuple
    pieces: tuple = ()
    depth: int = 0
    left: Fraction = Fraction(0)
    max_depth: int = 0

    def points(self) -> list[int]:
        out = [i for i, _ in self.kernel]
        for _, _, r in self.pieces:
            out += r.points()
        return out

    def label(self) -> NormalForm:
        return self.space

    def subdivide(self, pres):
        kernel_ids = [i for i, _ in self.kernel]
        if len(kernel_ids) > 1 and self.depth < self.max_depth and \
                pres.diameter(kernel_ids) >= pres.diameter(self.points()) / 2:
            return self._split_interval()
        if self.pieces:
            top = min(n for _, n, _ in self.pieces)
            keep = tuple(p for p in self.pieces if p[1] != top)
            gone = [p[2] for p in self.pieces if p[1] == top]
            return [replace(self, pieces=keep)] + gone
        if len(kernel_ids) > 1 and self.depth < self.max_depth:
            return self._split_interval()
        return None

    def _split_interval(self):
        w = Fraction(1, 3 ** (self.depth + 1))
        out = []
        for a in (self.left, self.left + 2 * w):
            ker = tuple((i, x) for i, x in self.kernel if a <= x < a + w)
            pcs = tuple(p for p in self.pieces if a <= p[0] < a + w)
            if ker:
                out.append(replace(self, kernel=ker, pieces=pcs, depth=self.depth + 1, left=a))
        return out

    def remap(self, f) -> KBox:
        return replace(
            self,
            kernel=tuple((f(i), x) for i, x in self.kernel),
            pieces=tuple((q, n, r.remap(f)) for q, n, r in self.pieces),
        )


@dataclass(frozen=True)
class Prod:
    """Product of factor regions; ``index`` maps factor-id tuples to ids."""

    factors: tuple
    index: dict = field(compare=False, hash=False)

    def points(self) -> list[int]:
        return [self.index[t] for t in itertools.product(*(r.points() for r in self.factors))]

    def label(self) -> NormalForm:
        return nf_product(*(r.label() for r in self.factors))

    def subdivide(self, pres):
        best = None
        for i, r in enumerate(self.factors):
            subs = r.subdivide(_FactorView(pres, self, i))
            if not subs:
                continue
            cand = [Prod(self.factors[:i] + (s,) + self.factors[i + 1:], self.index) for s in subs]
            worst = max(pres.diameter(c.points()) for c in cand)
            if best is None or worst < best[0]:
                best = (worst, cand)
        return None if best is None else best[1]

    def remap(self, f) -> Prod:
        return Prod(self.factors, {k: f(v) for k, v in self.index.items()})


class _FactorView:
    """Measures a factor's point set through one fixed slice of the product."""

    def __init__(self, pres, prod, i):
        self.pres, self.prod, self.i = pres, prod, i
        self.fixed = [r.points()[0] for r in prod.factors]

    def diameter(self, ids):
        out = []
        for pid in ids:
            t = list(self.fixed)
            t[self.i] = pid
            out.append(self.prod.index[tuple(t)])
        return self.pres.diameter(out)


def refine(region, pres, eps, split_unions=True) -> list:
    """Subdivide until every region has diameter < eps (unions always split)."""
    out, todo = [], [region]
    while todo:
        r = todo.pop(0)
        if isinstance(r, Union) and split_unions:
            todo[:0] = list(r.parts)
            continue
        if pres.diameter(r.points()) < eps:
            out.append(r)
            continue
        subs = r.subdivide(pres)
        if not subs:
            raise StageTooCoarse(f"cannot split {r.label()} below {eps} at stage {pres.stage}")
        todo[:0] = subs
    return out


# -- presentations -----------------------------------------------------------


@dataclass
class Presentation:
    stage: int
    points: list[Point]
    cells: list[Cell]
    root: object
    space: NormalForm = FIN
    catalog: Catalog | None = None

    def coords(self, ids) -> list[tuple]:
        return [self.points[i].coords for i in ids]

    def diameter(self, ids) -> Fraction:
        return diameter(self.coords(ids))

    def dist(self, i: int, j: int) -> Fraction:
        return linf(self.points[i].coords, self.points[j].coords)

    def kernel_ids(self) -> list[int]:
        return [i for i, p in enumerate(self.points) if p.kernel]

    def free_ids(self) -> list[int]:
        return [i for i, p in enumerate(self.points) if not p.kernel]

    def dim(self) -> int:
        return len(self.points[0].coords)

    def kernel_density(self) -> Fraction | None:
        """Largest distance from a kernel point to the nearest non-kernel point."""
        ker, free = self.kernel_ids(), self.free_ids()
        if not ker or not free:
            return None
        return max(min(self.dist(z, x) for x in free) for z in ker)

    def separated(self) -> bool:
        """Every kernel-free cell is closer to itself than to anything else."""
        for c in self.cells:
            if any(self.points[i].kernel for i in c.members):
                continue
            inside = set(c.members)
            others = [i for i in range(len(self.points)) if i not in inside]
            if not others:
                continue
            gap = min(self.dist(i, j) for i in c.members for j in others)
            if not self.diameter(c.members) < gap:
                return False
        return True

    def to_json(self):
        return {
            "stage": self.stage,
            "points": [p.to_json() for p in self.points],
            "cells": [{"id": c.id, "label": str(c.label), "members": list(c.members)} for c in self.cells],
        }


def _finalize(stage, pts, cells, root, space, catalog=None) -> Presentation:
    """Sort points lexicographically by coordinates and renumber everything."""
    order = sorted(range(len(pts)), key=lambda i: pts[i]["coords"])
    new = {old: k for k, old in enumerate(order)}
    if len(set(p["coords"] for p in pts)) != len(pts):
        raise AssertionError("coincident points in presentation")
    cell_of = {}
    out_cells = []
    cells = sorted(cells, key=lambda c: min(new[m] for m in c[1]))
    for cid, (label, members) in enumerate(cells):
        ms = tuple(sorted(new[m] for m in members))
        for m in ms:
            cell_of[m] = cid
        out_cells.append(Cell(cid, label, ms))
    points = []
    for k, old in enumerate(order):
        p = pts[old]
        parent = p.get("parent")
        points.append(Point(p["coords"], cell_of[k], p["kernel"], p["iso"], None if parent is None else new[parent]))
    return Presentation(stage, points, out_cells, root.remap(new.__getitem__), space, catalog)


def present_countable(form: ScatteredForm, stage: int) -> Presentation:
    """Points of w^r*k+1 on [0,1): copy j on [j/k, (j+1)/k), each limit point at
    the left end of its interval and its i-th child block at offset w/3^i."""
    if stage < 1:
        raise ValueError("stage must be >= 1")
    if not form.rank.is_finite():
        raise ValueError("only finite ranks can be presented")
    r, k = form.rank.as_int(), form.mult
    pts = []

    def build(a, w, rank, parent):
        pid = len(pts)
        pts.append({"coords": (a,), "kernel": False, "iso": rank, "parent": parent})
        kids = []
        if rank:
            for i in range(1, stage + 1):
                kids.append(build(a + w / 3 ** i, w / 3 ** i, rank - 1, pid))
        return Seq(pid, tuple(kids), rank)

    copies = [build(Fraction(j, k), Fraction(1, k), r, None) for j in range(k)]
    root = copies[0] if k == 1 else Union(tuple(copies))
    label = NormalForm(countable=form)
    return _finalize(stage, pts, [(label, range(len(pts)))], root, label)


@dataclass(frozen=True)
class Catalog:
    """The family whose copies accumulate on the Cantor base.

    ``members`` is a finite prefix (or the whole family when finite);
    ``infinite`` catalogs are enumerated with the ruler sequence so every
    member recurs infinitely often."""

    space: NormalForm
    members: tuple
    infinite: bool = False
    m: EPSet | None = None

    @classmethod
    def ranks(cls, alpha: int) -> Catalog:
        """S_alpha = {1, w+1, ..., w^(alpha-1)+1}; the space is Z(alpha)."""
        if alpha < 1:
            return cls(CANTOR, ())
        return cls(Z(alpha), tuple(O(b) for b in range(alpha)))

    @classmethod
    def explicit(cls, members, space: NormalForm) -> Catalog:
        return cls(space, tuple(members))

    @classmethod
    def of_M(cls, m: EPSet, size: int = 32) -> Catalog:
        return cls(X(m), tuple(_members_of(m, size)), True, m)

    def at(self, n: int) -> NormalForm:
        if not self.members:
            raise ValueError("empty catalog")
        if self.infinite:
            idx = ((n + 1) & -(n + 1)).bit_length() - 1
        else:
            idx = n % len(self.members)
        if idx >= len(self.members):
            raise ValueError("catalog prefix too short")
        return self.members[idx]

    def contains(self, nf: NormalForm) -> bool:
        if self.infinite:
            return nf.is_member(self.m)
        return nf in self.members

    def prefix(self, stage: int) -> list[NormalForm]:
        return sorted(set(self.at(n) for n in range(stage)))


def _members_of(m: EPSet, size: int) -> list[NormalForm]:
    """Members of S(M) ordered by (weight, fewer Z factors first)."""
    ms = m.members_below(10 * (m.threshold + m.period) + 64)[:6]
    out = []
    for weight in range(0, 12):
        for r in range(weight + 1):
            rest = weight - r
            # multisets of indices into ms with sum(idx+1) == rest
            for combo in _partitions(rest, len(ms)):
                zs = tuple(sorted(ms[i] for i in combo))
                out.append((weight, len(zs), r, zs))
    out.sort()
    forms = [NormalForm(countable=ScatteredForm.of(r), z=zs) if r else NormalForm(z=zs) for _, _, r, zs in out]
    return forms[:size]


def _partitions(total, nidx, start=0):
    if total == 0:
        yield ()
        return
    for i in range(start, nidx):
        if i + 1 <= total:
            for rest in _partitions(total - i - 1, nidx, i):
                yield (i,) + rest


def _flatten(p: Presentation) -> list[Fraction]:
    """Injective lexicographic squash of a presentation into [0, 1)."""
    d = p.dim()
    if d == 1:
        return [pt.coords[0] for pt in p.points]
    gap = Fraction(1)
    for i in range(d):
        vals = sorted(set(pt.coords[i] for pt in p.points))
        for a, b in zip(vals, vals[1:]):
            gap = min(gap, b - a)
    lam = gap / 4
    norm = sum(lam ** i for i in range(d))
    return [sum(lam ** i * c for i, c in enumerate(pt.coords)) / norm for pt in p.points]


def present_nf(nf: NormalForm, stage: int) -> Presentation:
    """Presentation of a catalog member (countable part times Z atoms)."""
    if nf.x or nf.cantor:
        raise ValueError("catalog members carry no X or Cantor factors")
    factors = []
    if not nf.countable.is_point() or not nf.z:
        factors.append(present_countable(nf.countable, max(stage, 1)))
    for n in nf.z:
        factors.append(present_K(Catalog.ranks(n), stage - 1))
    return _product(factors, stage) if len(factors) > 1 else factors[0]


def present_K(catalog: Catalog, stage: int, columns=None) -> Presentation:
    """Cantor base on the x-axis with copies of S_n at abscissae q_k, k <= n,
    inside the strips (t_(n+1), t_n), n < stage.

    ``columns`` replaces the enumeration q_0, q_1, ... (a re-enumerated copy
    of the same space); its first ``stage`` entries must be base points."""
    if stage < 0:
        raise ValueError("stage must be >= 0")
    if columns is not None:
        columns = [Fraction(c) for c in columns]
        if len(columns) < stage or not set(columns[:stage]) <= set(cantor_points(stage)):
            raise ValueError("columns must list at least `stage` base points")
    if stage == 0:
        # degenerate shadow used for Z atoms nested one level too deep
        pts = [{"coords": (Fraction(0), Fraction(0)), "kernel": True, "iso": None}]
        root = KBox(catalog.space, ((0, Fraction(0)),), (), 0, Fraction(0), 0)
        return _finalize(0, pts, [(CANTOR, [0])], root, catalog.space, catalog)
    pts, cells = [], []
    kernel = []
    kid_of = {}
    for x in cantor_points(stage):
        kid_of[x] = len(pts)
        kernel.append((len(pts), x))
        pts.append({"coords": (x, Fraction(0)), "kernel": True, "iso": None})
    cells.append((CANTOR, [i for i, _ in kernel]))
    pieces = []
    if catalog.members:
        for n in range(stage):
            label = catalog.at(n)
            sub = present_nf(label, stage)
            us = _flatten(sub)
            lo, h = strip_bound(n + 1), strip_bound(n + 1)
            for k in range(n + 1):
                q = cantor_q(k) if columns is None else columns[k]
                base = len(pts)
                for pt, u in zip(sub.points, us):
                    parent = None if pt.parent is None else base + pt.parent
                    pts.append({
                        "coords": (q, lo + h / 3 + h / 3 * u),
                        "kernel": pt.kernel,
                        "iso": pt.iso_rank,
                        "parent": parent,
                    })
                region = sub.root.remap(lambda i, b=base: b + i)
                pieces.append((q, n, region))
                cells.append((label, range(base, len(pts))))
    root = KBox(catalog.space, tuple(kernel), tuple(pieces), 0, Fraction(0), stage)
    return _finalize(stage, pts, cells, root, catalog.space, catalog)


def _product(factors: list[Presentation], stage: int) -> Presentation:
    pts, index = [], {}
    for combo in itertools.product(*(range(len(f.points)) for f in factors)):
        fp = [f.points[i] for f, i in zip(factors, combo)]
        kernel = any(p.kernel for p in fp)
        index[combo] = len(pts)
        pts.append({
            "coords": tuple(c for p in fp for c in p.coords),
            "kernel": kernel,
            "iso": None if kernel else sum(p.iso_rank for p in fp),
        })
    cells = []
    for cc in itertools.product(*(f.cells for f in factors)):
        label = nf_product(*(c.label for c in cc))
        members = [index[t] for t in itertools.product(*(c.members for c in cc))]
        cells.append((label, members))
    root = Prod(tuple(f.root for f in factors), index)
    space = nf_product(*(f.space for f in factors))
    return _finalize(stage, pts, cells, root, space)


def _atom_presentation(atom, stage: int) -> Presentation:
    if atom.kind == "Fin":
        return present_countable(ScatteredForm.of(0, atom.arg), stage)
    if atom.kind == "O":
        return present_countable(ScatteredForm.of(atom.arg), stage)
    if atom.kind == "Z":
        return present_K(Catalog.ranks(atom.arg), stage)
    if atom.kind == "X":
        return present_K(Catalog.of_M(atom.arg), stage)
    return present_K(Catalog.ranks(0), stage)


def present_expr(e, stage: int) -> Presentation:
    if isinstance(e, str):
        e = parse_expr(e)
    if stage < 1:
        raise ValueError("stage must be >= 1")
    factors = [_atom_presentation(a, stage) for a in e.factors]
    return factors[0] if len(factors) == 1 else _product(factors, stage)
