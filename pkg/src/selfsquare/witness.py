"""Finite-stage homeomorphism witnesses.

The back-and-forth matcher pairs non-kernel items (points, or clopen cells
viewed as points of the hyperspace) of two presentations whose kernels are
already matched. Items carry colors; a pair always has equal colors. Even
steps take the least unused item on the left, odd steps the least unused
item on the right, and the partner is searched near the image of the
item's nearest kernel point.
"""

from __future__ import annotations

import bisect
from math import lcm
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .algebra import CANTOR, FIN, NormalForm, X, nf_product
from .epset import EPSet
from .presentation import (
    KBox,
    Presentation,
    StageTooCoarse,
    _finalize,
    _flatten,
    cantor_points,
    density_radius,
    present_expr,
)

__all__ = [
    "StarConditionViolated",
    "ColorCountMismatch",
    "HypothesisFailure",
    "Side",
    "WitnessTrace",
    "StageWitness",
    "color_backforth",
    "extend_homeo",
    "remove_isolated_witness",
    "square_witness",
    "point_side",
    "cell_side",
    "identity_kernel_map",
]


class StarConditionViolated(ValueError):
    def __init__(self, color, kernel_point, radius):
        self.color, self.kernel_point, self.radius = color, kernel_point, radius
        super().__init__(f"no item of color {color} within {radius} of kernel point {kernel_point}")


class ColorCountMismatch(ValueError):
    pass


class HypothesisFailure(ValueError):
    def __init__(self, clause: str, message: str):
        self.clause = clause
        super().__init__(f"hypothesis ({clause}): {message}")


# float screening tolerance; anything within it of the float optimum is re-checked exactly
_TOL = 1e-9


def _box_dist(lo, hi, pts):
    """l-inf Hausdorff distance from each box to the matching point (float screen)."""
    return np.max(np.maximum(pts - lo, hi - pts), axis=-1)


@dataclass
class Side:
    """Items of one presentation: member tuples, colors and bounding boxes.

    ``order`` is the fixed enumeration phi (farthest from the kernel first);
    ``nearest`` optionally supplies (kernel id, distance) per item when the
    caller can compute it faster."""

    pres: Presentation
    items: list[tuple[int, ...]]
    colors: list
    kernel: list[int]
    nearest: list | None = None
    lo: list = field(default_factory=list)
    hi: list = field(default_factory=list)

    def __post_init__(self):
        if len(self.items) != len(self.colors):
            raise ValueError("one color per item")
        pts = self.pres.points
        for members in self.items:
            cs = [pts[i].coords for i in members]
            self.lo.append(tuple(min(c[k] for c in cs) for k in range(len(cs[0]))))
            self.hi.append(tuple(max(c[k] for c in cs) for k in range(len(cs[0]))))
        # exact work happens on integers over one common denominator
        self.den = 1
        for p in pts:
            for v in p.coords:
                self.den = lcm(self.den, v.denominator)
        self.ilo = [tuple(v.numerator * (self.den // v.denominator) for v in b) for b in self.lo]
        self.ihi = [tuple(v.numerator * (self.den // v.denominator) for v in b) for b in self.hi]
        self._icache = {}
        self._radius = {}
        d = self.pres.dim() if pts else 1
        self.flo = np.array([[float(v) for v in b] for b in self.lo]).reshape(-1, d)
        self.fhi = np.array([[float(v) for v in b] for b in self.hi]).reshape(-1, d)
        self.kernel = list(self.kernel)
        self.fker = np.array([[float(v) for v in pts[z].coords] for z in self.kernel]).reshape(-1, d)
        if self.nearest is None:
            self.nearest = [self._nearest(i) for i in range(len(self.items))]
        self.order = sorted(range(len(self.items)), key=lambda i: (-self.nearest[i][1], self.lo[i]))

    def fcoords(self, kid):
        return np.array([float(v) for v in self.pres.points[kid].coords])

    def icoords(self, kid):
        c = self._icache.get(kid)
        if c is None:
            c = tuple(v.numerator * (self.den // v.denominator) for v in self.pres.points[kid].coords)
            self._icache[kid] = c
        return c

    def idh(self, item: int, kid: int) -> int:
        """Hausdorff distance to one point, scaled by ``den`` (l-inf, via the bounding box)."""
        return max(max(ci - l, h - ci) for ci, l, h in zip(self.icoords(kid), self.ilo[item], self.ihi[item]))

    def dh(self, item: int, kid: int) -> Fraction:
        return Fraction(self.idh(item, kid), self.den)

    def _nearest(self, item: int):
        f = _box_dist(self.flo[item], self.fhi[item], self.fker)
        close = np.nonzero(f <= f.min() + _TOL)[0]
        z = min((self.idh(item, self.kernel[k]), self.pres.points[self.kernel[k]].coords, self.kernel[k])
                for k in close)
        return z[2], Fraction(z[0], self.den)

    def color_radius(self, color):
        """max over kernel points of the distance to the nearest item of ``color``,
        with a kernel point attaining it."""
        if color not in self._radius:
            self._radius[color] = self._color_radius(color)
        return self._radius[color]

    def _color_radius(self, color):
        idx = [i for i, c in enumerate(self.colors) if c == color]
        if not idx:
            return None, self.kernel[0] if self.kernel else None
        ids = np.array(idx)
        lo, hi = self.flo[ids], self.fhi[ids]
        best = np.full(len(self.kernel), np.inf)
        for k in range(len(ids)):
            best = np.minimum(best, _box_dist(lo[k], hi[k], self.fker))
        worst = None
        for kz in np.nonzero(best >= best.max() - _TOL)[0]:
            z = self.kernel[kz]
            f = _box_dist(lo, hi, self.fker[kz])
            exact = min(self.idh(idx[j], z) for j in np.nonzero(f <= f.min() + _TOL)[0])
            if worst is None or exact > worst[0]:
                worst = (exact, z)
        return Fraction(worst[0], self.den), worst[1]


def point_side(p: Presentation, colors=None) -> Side:
    free = p.free_ids()
    cols = [0] * len(free) if colors is None else [colors[i] for i in free]
    return Side(p, [(i,) for i in free], cols, p.kernel_ids())


def cell_side(p: Presentation, cells=None) -> Side:
    """Non-kernel cells of a presentation, colored by label."""
    cells = [c for c in p.cells if not any(p.points[i].kernel for i in c.members)] if cells is None else cells
    return Side(p, [tuple(c.members) for c in cells], [c.label for c in cells], p.kernel_ids())


def identity_kernel_map(p1: Presentation, p2: Presentation) -> dict[int, int]:
    by = {p2.points[i].coords: i for i in p2.kernel_ids()}
    out = {}
    for i in p1.kernel_ids():
        if p1.points[i].coords not in by:
            raise ValueError("kernels differ; identity map undefined")
        out[i] = by[p1.points[i].coords]
    return out


@dataclass
class Pair:
    a: int
    b: int
    color: object
    bound: Fraction
    parity: int
    target: Fraction
    distortion: Fraction

    def to_json(self):
        return {"a": self.a, "b": self.b, "color": str(self.color), "bound": str(self.bound)}


@dataclass
class WitnessTrace:
    pairs: list[Pair]
    kernel_map: dict[int, int]
    star_radius: Fraction | None

    def bounds(self) -> list[Fraction]:
        return [p.bound for p in self.pairs]

    def to_json(self):
        return {
            "pairs": [p.to_json() for p in self.pairs],
            "kernelMap": [[a, b] for a, b in sorted(self.kernel_map.items())],
        }


def _check_star(side: Side, colors, radius, name):
    for m in colors:
        r, z = side.color_radius(m)
        if r is None or r > radius:
            raise StarConditionViolated(m, f"{name}:{z}", radius)


def star_radius(side: Side, colors) -> Fraction:
    """Smallest radius at which every color is near every kernel point."""
    worst = Fraction(0)
    for m in colors:
        r, z = side.color_radius(m)
        if r is None:
            raise StarConditionViolated(m, z, None)
        worst = max(worst, r)
    return worst


def color_backforth(s1: Side, s2: Side, kernel_map: dict[int, int], radius=None) -> WitnessTrace:
    """Alternating greedy matching of the non-kernel items of two sides.

    The partner of an item is the unused item of the same color whose
    distance to the image of the item's nearest kernel point best matches the
    item's own kernel distance; the achieved distance is the step's bound."""
    if sorted(kernel_map) != sorted(s1.kernel) or sorted(kernel_map.values()) != sorted(s2.kernel):
        raise ValueError("kernel map must be a bijection between the kernels")
    inverse = {b: a for a, b in kernel_map.items()}
    if not s1.items and not s2.items:
        return WitnessTrace([], dict(kernel_map), None)
    colors = sorted(set(s1.colors) | set(s2.colors), key=str)
    if radius is None:
        radius = density_radius(s1.pres.stage)
    if radius is not False:
        _check_star(s1, colors, radius, "left")
        _check_star(s2, colors, radius, "right")
    total = len(s1.items)
    if len(s2.items) != total:
        raise ColorCountMismatch(f"{len(s1.items)} items against {len(s2.items)}")
    # left items' anchors seen from the right: image of their nearest kernel point
    anchor = np.array([s2.fcoords(kernel_map[s1.nearest[i][0]]) for i in range(total)]).reshape(total, -1)
    dleft = np.array([float(s1.nearest[i][1]) for i in range(total)])
    groups = [{}, {}]
    for side, s in enumerate((s1, s2)):
        for i in range(len(s.items)):
            groups[side].setdefault(s.colors[i], []).append(i)
        groups[side] = {c: np.array(v) for c, v in groups[side].items()}
    alive = [np.ones(len(s1.items), bool), np.ones(len(s2.items), bool)]
    cursor = [0, 0]
    pairs = []
    n = 0
    while len(pairs) < total:
        side = n % 2
        src, dst = (s1, s2) if side == 0 else (s2, s1)
        kmap = kernel_map if side == 0 else inverse
        while not alive[side][src.order[cursor[side]]]:
            cursor[side] += 1
        x = src.order[cursor[side]]
        z, dx = src.nearest[x]
        target = kmap[z]
        color = src.colors[x]
        pool = groups[1 - side].get(color)
        if pool is not None:
            pool = pool[alive[1 - side][pool]]
        if pool is None or not len(pool):
            raise ColorCountMismatch(f"color {color} exhausted on the {'right' if side == 0 else 'left'}")
        fy = _box_dist(dst.flo[pool], dst.fhi[pool], dst.fcoords(target))
        if side == 0:
            fdist = np.abs(fy - float(dx))
        else:
            # candidates are left items: distortion measured from their own anchors
            fdist = np.abs(_box_dist(src.flo[x], src.fhi[x], anchor[pool]) - dleft[pool])
        close = pool[fdist <= fdist.min() + _TOL]
        best = None
        for y in close:
            y = int(y)
            dy = dst.idh(y, target)
            za, da = dst.nearest[y]
            if side == 0:
                dist = abs(Fraction(dy, dst.den) - dx)
            else:
                dist = abs(src.dh(x, kernel_map[za]) - da)
            # prefer partners anchored at the same kernel point
            key = (dist, za != target, dy, y)
            if best is None or key < best:
                best = key
        dist, _, bound, y = best
        bound = Fraction(bound, dst.den)
        a, b = (x, y) if side == 0 else (y, x)
        alive[side][x] = False
        alive[1 - side][y] = False
        pairs.append(Pair(a, b, color, bound, side, Fraction(1, 2 ** n) if n < 4096 else Fraction(0), dist))
        n += 1
    return WitnessTrace(pairs, dict(kernel_map), radius if radius is not False else None)


# -- cell-level extension ------------------------------------------------------


@dataclass
class StageWitness:
    trace: WitnessTrace
    left: Side
    right: Side
    distortion: Fraction
    bound: Fraction
    labels_preserved: bool
    sub_witnesses: list = field(default_factory=list)
    star: Fraction | None = None

    @property
    def within_bound(self) -> bool:
        return self.distortion <= self.bound

    def cell_bijection(self) -> list[tuple[tuple[int, ...], tuple[int, ...]]]:
        return [(self.left.items[p.a], self.right.items[p.b]) for p in self.trace.pairs]

    def to_json(self):
        return {
            "pairs": [p.to_json() for p in self.trace.pairs],
            "kernelMap": [[a, b] for a, b in sorted(self.trace.kernel_map.items())],
            "distortion": str(self.distortion),
            "bound": str(self.bound),
            "labelsPreserved": self.labels_preserved,
            "starRadius": None if self.star is None else str(self.star),
            "subWitnesses": self.sub_witnesses,
        }


def _signature(p: Presentation, members):
    return sorted((p.points[i].kernel, p.points[i].iso_rank if p.points[i].iso_rank is not None else -1)
                  for i in members)


def _sub_witness(p1, p2, a_members, b_members, label, depth, cap):
    """Point-level match inside a matched pair of cells: rank- and kernel-preserving
    when the two cells have the same stage shape, otherwise certified by label."""
    entry = {"a": list(a_members[:1]), "b": list(b_members[:1]), "label": str(label), "depth": depth}
    if depth > cap:
        entry["mode"] = "label-only"
        return entry
    if _signature(p1, a_members) == _signature(p2, b_members):
        key1 = sorted(a_members, key=lambda i: (p1.points[i].kernel, p1.points[i].iso_rank or 0, p1.points[i].coords))
        key2 = sorted(b_members, key=lambda i: (p2.points[i].kernel, p2.points[i].iso_rank or 0, p2.points[i].coords))
        entry["mode"] = "rank-preserving"
        entry["points"] = len(key1)
        entry["map"] = [[x, y] for x, y in zip(key1, key2)]
    else:
        entry["mode"] = "label-only"
    return entry


def check_hypotheses(s1: Side, s2: Side, radius) -> None:
    """Stage versions of: (1) the leftover kernel is perfect, (2) labels come
    from one catalog, (3) every label occurs near every kernel point."""
    for s, name in ((s1, "left"), (s2, "right")):
        ker = s.kernel
        if len(ker) < 2:
            raise HypothesisFailure("1", f"{name} kernel has an isolated point at stage {s.pres.stage}")
        for k, z in enumerate(ker):
            f = np.max(np.abs(s.fker - s.fker[k]), axis=1)
            f[k] = np.inf
            if f.min() < float(radius) - _TOL:
                continue
            if not any(s.pres.dist(z, ker[j]) <= radius for j in np.nonzero(f <= float(radius) + _TOL)[0]):
                raise HypothesisFailure("1", f"{name} kernel point {z} is isolated at radius {radius}")
        for c in s.colors:
            if not isinstance(c, NormalForm) or c.x or c.cantor or c.countable.mult != 1:
                raise HypothesisFailure("2", f"{name} label {c} is not a catalog member")
    l1, l2 = set(s1.colors), set(s2.colors)
    if l1 != l2:
        missing = sorted(map(str, l1 ^ l2))
        raise HypothesisFailure("3", f"label sets differ: {', '.join(missing)}")
    try:
        _check_star(s1, sorted(l1, key=str), radius, "left")
        _check_star(s2, sorted(l2, key=str), radius, "right")
    except StarConditionViolated as e:
        raise HypothesisFailure("3", str(e)) from e


def extend_homeo(s1: Side, s2: Side, kernel_map: dict[int, int], radius=None) -> StageWitness:
    """Lift a kernel matching to a label-preserving cell bijection."""
    stage = s1.pres.stage
    bound = density_radius(stage)
    if radius is None:
        radius = bound
    check_hypotheses(s1, s2, radius)
    trace = color_backforth(s1, s2, kernel_map, False)
    trace.star_radius = radius
    distortion = max((p.distortion for p in trace.pairs), default=Fraction(0))
    labels_ok = all(s1.colors[p.a] == s2.colors[p.b] for p in trace.pairs)
    subs = []
    for p in trace.pairs:
        a, b = s1.items[p.a], s2.items[p.b]
        if len(a) > 1 or len(b) > 1:
            subs.append(_sub_witness(s1.pres, s2.pres, a, b, s1.colors[p.a], 1, stage))
    return StageWitness(trace, s1, s2, distortion, bound, labels_ok, subs, radius)


# -- isolated point removal ------------------------------------------------------


def remove_isolated_witness(p: Presentation, z: int) -> dict:
    """Bijection p -> p minus z: shift one sequence of isolated points that
    converges to a single limit and contains z."""
    pt = p.points[z]
    if pt.kernel:
        raise ValueError(f"point {z} lies in the perfect kernel")
    if pt.iso_rank != 0:
        raise ValueError(f"point {z} is not isolated (rank {pt.iso_rank})")
    if not p.kernel_ids() and p.space.countable.rank.is_finite() and p.space.countable.rank.as_int() == 0:
        raise ValueError("a finite space changes type when a point is removed")
    if pt.parent is not None:
        seq = [i for i, q in enumerate(p.points) if q.parent == pt.parent and q.iso_rank == 0]
        limit = pt.parent
    else:
        # isolated singletons stacked in one column converge to the kernel point below
        col = pt.coords[0]
        seq = [i for i, q in enumerate(p.points)
               if not q.kernel and q.iso_rank == 0 and q.parent is None and q.coords[0] == col
               and p.cells[q.cell].label == FIN]
        kern = [i for i in p.kernel_ids() if p.points[i].coords[0] == col]
        if not kern:
            raise ValueError("no limit point below this column")
        limit = kern[0]
    # order the sequence towards its limit
    seq.sort(key=lambda i: (-p.dist(i, limit), p.points[i].coords))
    j = seq.index(z)
    shift = [[seq[i], seq[i + 1]] for i in range(j, len(seq) - 1)]
    return {
        "removed": z,
        "limit": limit,
        "sequence": seq,
        "fixed": [i for i in range(len(p.points)) if i not in seq[j:]],
        "shift": shift,
        "beyondStage": seq[-1],
        "label": str(p.cells[pt.cell].label),
    }


# -- X(M) squared ------------------------------------------------------------------


def _x_pieces(px: Presentation):
    """Pieces of the compactification enumerated as A_0, A_1, ... (strip, then column)."""
    root = px.root
    if not isinstance(root, KBox):
        raise ValueError("expected a compactification presentation")
    out = []
    for q, n, region in root.pieces:
        ids = tuple(sorted(region.points()))
        label = px.cells[px.points[ids[0]].cell].label
        out.append((n, q, ids, label))
    out.sort(key=lambda t: (t[0], _col_rank(t[1])))
    return [(ids, label) for _, _, ids, label in out]


def _col_rank(q):
    from .presentation import cantor_q

    k = 0
    while cantor_q(k) != q:
        k += 1
    return k


def _d_family(px: Presentation, ids, label, n):
    """D_i(n): the first n+1 isolated points as singletons plus the rest."""
    iso = [i for i in ids if not px.points[i].kernel and px.points[i].iso_rank == 0]
    if len(ids) == 1:
        return [(ids, label)]
    take = iso[: n + 1]
    out = [((i,), FIN) for i in take]
    rest = tuple(i for i in ids if i not in set(take))
    if rest:
        out.append((rest, label))
    return out


class _FactorGeo:
    def __init__(self, px: Presentation):
        self.px = px
        self.kernel = sorted(i for i, _ in px.root.kernel)
        self.all = list(range(len(px.points)))

    def bbox(self, ids):
        cs = [self.px.points[i].coords for i in ids]
        return tuple(min(c[k] for c in cs) for k in range(2)), tuple(max(c[k] for c in cs) for k in range(2))

    def dh(self, box, j):
        c = self.px.points[j].coords
        lo, hi = box
        return max(max(ci - l, h - ci) for ci, l, h in zip(c, lo, hi))

    def nearest(self, box, pool):
        best = None
        for j in pool:
            key = (self.dh(box, j), self.px.points[j].coords)
            if best is None or key < best[0]:
                best = (key, j)
        return best[1], best[0][0]


def square_witness(m: EPSet, stage: int, radius=None) -> StageWitness:
    """Witness X(M) x X(M) ~ X(M) at a finite stage.

    Left: the square with the family of products E x F, E in D_i(i+j),
    F in D_j(i+j), over the kernel C* = (C x X) u (X x C). Right: a
    compactification over a Cantor base carrying one piece per left cell,
    each a scaled copy placed above the image of the cell's nearest kernel
    point. The kernel map sends C* in lexicographic order onto the base."""
    if stage < 2:
        raise StageTooCoarse("the square witness needs at least two strips (stage >= 2)")
    text = f"X{m}"
    px = present_expr(text, stage)
    p1 = present_expr(f"{text}*{text}", stage)
    index = p1.root.index
    pieces = _x_pieces(px)
    geo = _FactorGeo(px)

    cells, labels, nearest = [], [], []
    cache = {}

    def factor_info(ids):
        if ids not in cache:
            box = geo.bbox(ids)
            cache[ids] = (geo.nearest(box, geo.kernel), geo.nearest(box, geo.all))
        return cache[ids]

    for i, (ai, li) in enumerate(pieces):
        for j, (aj, lj) in enumerate(pieces):
            for e, le in _d_family(px, ai, li, i + j):
                for f, lf in _d_family(px, aj, lj, i + j):
                    members = tuple(sorted(index[(x, y)] for x in e for y in f))
                    (ce, dce), (xe, dxe) = factor_info(e)
                    (cf, dcf), (xf, dxf) = factor_info(f)
                    # nearest point of C* = (C x X) u (X x C), factor by factor
                    opts = [(max(dce, dxf), p1.points[index[(ce, xf)]].coords, index[(ce, xf)]),
                            (max(dxe, dcf), p1.points[index[(xe, cf)]].coords, index[(xe, cf)])]
                    d, _, z = min(opts)
                    cells.append(members)
                    labels.append(nf_product(le, lf))
                    nearest.append((z, d))
    base = {i for i, _ in px.root.kernel}
    cstar = sorted(index[(x, y)] for x in range(len(px.points)) for y in range(len(px.points))
                   if x in base or y in base)
    covered = sorted(i for c in cells for i in c)
    if covered != sorted(set(range(len(p1.points))) - set(cstar)):
        raise AssertionError("product family does not cover the complement of C*")
    left = Side(p1, cells, labels, cstar, nearest)

    p2, kmap, right_cells, right_near = _transported(p1, left, m, stage)
    right = Side(p2, [c for c, _ in right_cells], [l for _, l in right_cells], sorted(kmap.values()), right_near)
    if radius is None:
        radius = max(star_radius(left, sorted(set(labels), key=str)), density_radius(stage))
    return extend_homeo(left, right, kmap, radius)


def _transported(p1: Presentation, left: Side, m: EPSet, stage: int):
    ker = sorted(left.kernel, key=lambda i: p1.points[i].coords)
    depth = max(1, (len(ker) - 1).bit_length())
    base = cantor_points(depth)
    cols = [base[(k * len(base)) // len(ker)] for k in range(len(ker))]
    image = dict(zip(ker, cols))
    gap = min(b - a for a, b in zip(cols, cols[1:])) if len(cols) > 1 else Fraction(1)
    heights = sorted(set(d for _, d in left.nearest))
    hgap = min([b - a for a, b in zip(heights, heights[1:])] + [heights[0], gap])
    w = hgap / 4
    occupied: dict[Fraction, set] = {}
    pts = [{"coords": (x, Fraction(0)), "kernel": True, "iso": None} for x in cols]
    cells = [(CANTOR, list(range(len(cols))))]
    placed = []
    order = sorted(range(len(left.items)), key=lambda i: (left.nearest[i][1], left.lo[i]))
    for i in order:
        z, d = left.nearest[i]
        x0 = image[z]
        k = bisect.bisect_left(cols, x0)
        # walk outward to the nearest column without a piece at this height
        lo_k, hi_k = k - 1, k
        col = None
        while col is None:
            cand = []
            if hi_k < len(cols):
                cand.append(cols[hi_k])
            if lo_k >= 0:
                cand.append(cols[lo_k])
            for c in sorted(cand, key=lambda c: (abs(c - x0), c)):
                if d not in occupied.get(c, set()):
                    col = c
                    break
            hi_k += 1
            lo_k -= 1
        occupied.setdefault(col, set()).add(d)
        members = left.items[i]
        sub = Presentation(stage, [p1.points[j] for j in members], [], None)
        us = _flatten(sub) if len(members) > 1 else [Fraction(1)]
        top = max(us)
        us = [u / top if top else Fraction(1) for u in us]
        base_id = len(pts)
        for j, u in zip(members, us):
            q = p1.points[j]
            pts.append({"coords": (col, d - w + w * u), "kernel": q.kernel, "iso": q.iso_rank})
        placed.append((i, base_id, len(members)))
        cells.append((left.colors[i], list(range(base_id, base_id + len(members)))))
    root = _Flat(len(pts))
    p2 = _finalize(stage, pts, cells, root, X(m))
    on_base = [k for k, q in enumerate(p2.points) if q.coords[1] == 0]
    kernel_ids = {p2.points[k].coords[0]: k for k in on_base}
    kmap = {z: kernel_ids[image[z]] for z in ker}
    right_cells = [(c.members, c.label) for c in p2.cells if p2.points[c.members[0]].coords[1] != 0]
    kx = sorted((p2.points[k].coords[0], k) for k in on_base)
    xs = [x for x, _ in kx]
    right_near = []
    for members, _ in right_cells:
        col, top = p2.points[members[0]].coords[0], max(p2.points[j].coords[1] for j in members)
        # every base point within `top` of the column ties; take the leftmost
        k = bisect.bisect_left(xs, col - top)
        right_near.append((kx[k][1], top))
    return p2, kmap, right_cells, right_near


@dataclass(frozen=True)
class _Flat:
    size: int
    ids: tuple = ()

    def remap(self, f):
        return _Flat(self.size, tuple(f(i) for i in range(self.size)))

    def points(self):
        return list(self.ids)
