"""Labeled clopen partitions of presentations.

Every family is built by subdividing the :class:`~selfsquare.presentation`
region tree, so each cell carries a homeomorphism label that follows from
how it was cut (a tail of a convergent sequence keeps its type, a kernel box
of Z(n) or X(M) keeps its type, a product of such pieces gets the product
label). Bounds are checked with exact rationals.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .algebra import FIN, NormalForm, O, Z
from .ordinal import ScatteredForm, union_form
from .presentation import KBox, Presentation, Prod, Seq, StageTooCoarse, Union, refine

__all__ = [
    "ClauseViolation",
    "FamilyCell",
    "CellFamily",
    "NetFamily",
    "partition_O",
    "partition_Z",
    "partition_member",
    "refine_null",
    "partition_countable_open",
    "partition_all_ranks",
    "gamma",
]


class ClauseViolation(ValueError):
    """A construction condition failed; ``clause`` names it ("4", "iii", ...)."""

    def __init__(self, clause: str, message: str):
        self.clause = clause
        super().__init__(f"clause ({clause}): {message}")


@dataclass(frozen=True)
class FamilyCell:
    members: tuple[int, ...]
    label: NormalForm
    diameter: Fraction
    provenance: str
    region: object = field(default=None, compare=False, repr=False)
    index: int | None = None

    def to_json(self, cid: int):
        return {
            "cellId": cid,
            "label": str(self.label),
            "diameter": str(self.diameter),
            "memberPoints": list(self.members),
            "provenance": self.provenance,
        }


@dataclass
class CellFamily:
    cells: list[FamilyCell]
    provenance: str = ""

    def __len__(self):
        return len(self.cells)

    def __iter__(self):
        return iter(self.cells)

    def labels(self) -> list[NormalForm]:
        return [c.label for c in self.cells]

    def mesh(self) -> Fraction:
        return max((c.diameter for c in self.cells), default=Fraction(0))

    def union(self) -> set[int]:
        return {m for c in self.cells for m in c.members}

    def disjoint(self) -> bool:
        return sum(len(c.members) for c in self.cells) == len(self.union())

    def to_json(self):
        return [c.to_json(i) for i, c in enumerate(self.cells)]


@dataclass
class NetFamily:
    eps: list[Fraction]
    nets: list[tuple[int, ...]]


def gamma(beta: int) -> NormalForm:
    """gamma_0 = 1 and gamma_b = w^b + 1."""
    return FIN if beta == 0 else O(beta)


def _provenance(region) -> str:
    if isinstance(region, Seq):
        return "sequence"
    if isinstance(region, KBox):
        return f"kernel-box/depth-{region.depth}"
    if isinstance(region, Prod):
        return "product"
    return "union"


def _cells(p: Presentation, regions, tag: str = "", indices=None) -> CellFamily:
    out = []
    for k, r in enumerate(regions):
        ids = tuple(sorted(r.points()))
        out.append(FamilyCell(
            ids, r.label(), p.diameter(ids), _provenance(r), r,
            None if indices is None else indices[k],
        ))
    out.sort(key=lambda c: c.members)
    return CellFamily(out, tag)


def _check_eps(eps):
    eps = Fraction(eps)
    if eps <= 0:
        raise ValueError("epsilon must be positive")
    return eps


def partition_O(f: ScatteredForm, eps, p: Presentation) -> CellFamily:
    """Finite clopen partition of w^r*k+1 into copies of members of O."""
    eps = _check_eps(eps)
    if p.space != NormalForm(countable=f):
        raise ValueError(f"presentation models {p.space}, not {f}")
    regions, done = refine(p.root, p, eps), []
    while regions:
        # product presentations can leave w^r*k+1 blocks with k > 1 intact
        r = regions.pop(0)
        if r.label().countable.in_O():
            done.append(r)
            continue
        subs = r.subdivide(p)
        if not subs:
            raise StageTooCoarse(f"cannot split {r.label()} into members of O at stage {p.stage}")
        regions[:0] = subs
    fam = _cells(p, done, "ordinal-split")
    if union_form(c.label.countable for c in fam) != f:
        raise AssertionError("label fold does not reproduce the input")
    return fam


def partition_Z(n: int, eps, p: Presentation) -> CellFamily:
    """Split Z(n) into kernel boxes (each again Z(n)) and countable pieces."""
    eps = _check_eps(eps)
    if n < 1:
        raise ValueError("n must be >= 1")
    if p.space != Z(n):
        raise ValueError(f"presentation models {p.space}, not Z({n})")
    if Fraction(1, 3 ** p.stage) > eps:
        raise StageTooCoarse(f"epsilon {eps} is below the stage-{p.stage} resolution 1/{3 ** p.stage}")
    return _cells(p, refine(p.root, p, eps), "rank-compactification-split")


def partition_member(s: NormalForm, eps, p: Presentation) -> CellFamily:
    """Factorwise split of a member of S(M); labels stay inside S(M)."""
    eps = _check_eps(eps)
    if s.x or s.cantor or s.countable.mult != 1:
        raise ValueError(f"{s} is not a member of S(M)")
    if p.space != s:
        raise ValueError(f"presentation models {p.space}, not {s}")
    if s.z and Fraction(1, 3 ** p.stage) > eps:
        raise StageTooCoarse(f"epsilon {eps} is below the stage-{p.stage} resolution")
    fam = _cells(p, refine(p.root, p, eps), "member-split")
    allowed = set(s.z)
    for c in fam:
        if not c.label.is_member(allowed):
            raise AssertionError(f"cell label {c.label} left S(M)")
    return fam


def refine_null(family: CellFamily, p: Presentation) -> CellFamily:
    """Split the n-th cell (enumeration order) to mesh < 2^-n."""
    out = []
    for n, cell in enumerate(family.cells):
        if cell.region is None:
            raise ValueError("refine_null needs region-backed cells")
        for r in refine(cell.region, p, Fraction(1, 2 ** n)):
            ids = tuple(sorted(r.points()))
            out.append(FamilyCell(ids, r.label(), p.diameter(ids), f"null-refinement/{n}", r, n))
    return CellFamily(out, "null-refinement")


# -- countable open sets and the all-ranks construction ----------------------


def _rank(p, region) -> int:
    return p.points[region.root].iso_rank if isinstance(region, Seq) else max(
        p.points[i].iso_rank for i in region.points())


def _subtract(region, used: set[int]) -> list:
    """Pieces of ``region`` left after removing whole subtrees listed in ``used``."""
    if isinstance(region, Union):
        return [q for part in region.parts for q in _subtract(part, used)]
    if not isinstance(region, Seq):
        raise ValueError("countable regions are sequence trees")
    if region.root in used:
        return [q for c in region.children for q in _subtract(c, used)]
    kids = []
    for c in region.children:
        kids += _subtract(c, used)
    return [Seq(region.root, tuple(kids), region.rank)]


def _trim(p, seq: Seq, eps) -> tuple[Seq, list]:
    """Drop leading children until the diameter is below eps."""
    dropped = []
    while p.diameter(seq.points()) >= eps and seq.children:
        dropped.append(seq.children[0])
        seq = Seq(seq.root, seq.children[1:], seq.rank)
    return seq, dropped


def _null_cells(p: Presentation, forest: list, start: int = 0) -> list[FamilyCell]:
    """Enumerate by (-rank, coordinates); the n-th cell gets diameter < 2^-n."""
    cells = []
    trees = list(forest)
    n = start
    while trees:
        trees.sort(key=lambda t: (-p.points[t.root].iso_rank, p.points[t.root].coords))
        t = trees.pop(0)
        eps = Fraction(1, 2 ** n)
        cell, dropped = _trim(p, t, eps)
        if p.diameter(cell.points()) >= eps:
            raise StageTooCoarse(f"cannot shrink a sequence below {eps}")
        trees += dropped
        ids = tuple(sorted(cell.points()))
        cells.append(FamilyCell(ids, gamma(cell.rank), p.diameter(ids), f"countable-open/{n}", cell, n))
        n += 1
    return cells


def partition_countable_open(p: Presentation, region, alpha: int) -> CellFamily:
    """Null clopen partition of a countable open region into copies of gamma_b, b < alpha."""
    parts = region if isinstance(region, list) else [region]
    ids = [i for r in parts for i in r.points()]
    if ids and alpha <= 0:
        raise ValueError("alpha = 0 admits only the empty region")
    for i in ids:
        pt = p.points[i]
        if pt.kernel or pt.iso_rank is None or pt.iso_rank >= alpha:
            raise ValueError(f"point {i} violates the rank bound {alpha}")
    forest = [t for r in parts for t in _subtract(r, set())]
    return CellFamily(_null_cells(p, forest), "countable-open")


def _net(p: Presentation, eps: Fraction) -> tuple[int, ...]:
    chosen = []
    for z in p.kernel_ids():
        if all(p.dist(z, w) >= eps for w in chosen):
            chosen.append(z)
    return tuple(chosen)


def _seq_regions(region) -> list[Seq]:
    """All sequence subtrees below a region (pieces of a compactification)."""
    out = []
    if isinstance(region, Seq):
        out.append(region)
        for c in region.children:
            out += _seq_regions(c)
    elif isinstance(region, Union):
        for part in region.parts:
            out += _seq_regions(part)
    elif isinstance(region, KBox):
        for _, _, r in region.pieces:
            out += _seq_regions(r)
    return out


@dataclass
class AllRanksReport:
    family: CellFamily
    nets: NetFamily
    levels: list[list[FamilyCell]]
    betas: list[int]
    clauses: dict[str, bool]


def _dist_set(p, z, ids) -> Fraction:
    return min(p.dist(z, i) for i in ids)


def partition_all_ranks(p: Presentation, alpha: int, levels: int | None = None) -> AllRanksReport:
    """Clopen partition of the non-kernel part of a Z(alpha)-type presentation
    whose cells are copies of gamma_b and accumulate, in every rank, on every
    kernel point.

    Levels n = 0..levels-1 use beta_n = n mod alpha and eps_n = 2^-n."""
    if alpha < 0:
        raise ValueError("alpha must be >= 0")
    if alpha == 0:
        return AllRanksReport(CellFamily([], "all-ranks"), NetFamily([], []), [], [], {})
    if p.stage < alpha + 2:
        raise ClauseViolation("6", f"stage {p.stage} < alpha + 2 = {alpha + 2}; nets cannot be served")
    levels = p.stage - 1 if levels is None else levels
    seqs = _seq_regions(p.root)
    used: set[int] = set()
    betas, epss, nets, fams = [], [], [], []
    for n in range(levels):
        beta, eps = n % alpha, Fraction(1, 2 ** n)
        net = _net(p, eps)
        chosen = []
        for z in net:
            if any(_dist_set(p, z, c.members) < eps for c in chosen):
                continue  # one cell may serve several net points
            best = None
            for s in seqs:
                if s.rank != beta or s.root in used or any(i in used for i in s.points()):
                    continue
                d = p.dist(z, s.root)
                if d < eps and (best is None or (d, p.points[s.root].coords) < best[0]):
                    best = ((d, p.points[s.root].coords), s)
            if best is None:
                raise ClauseViolation("6", f"level {n}: no free rank-{beta} point within {eps} of kernel point {z}")
            cell, _ = _trim(p, best[1], eps)
            ids = tuple(sorted(cell.points()))
            if p.diameter(ids) >= eps:
                raise ClauseViolation("4", f"level {n}: cell diameter {p.diameter(ids)} >= {eps}")
            used.update(ids)
            chosen.append(FamilyCell(ids, gamma(beta), p.diameter(ids), f"level-{n}", cell, n))
        betas.append(beta)
        epss.append(eps)
        nets.append(net)
        fams.append(chosen)
    clauses = check_level_conditions(p, fams, nets, betas, epss)
    # whatever is left is a countable open set; give it a null partition
    rest = [t for r in _piece_regions(p.root) for t in _subtract(r, used)]
    tail = _null_cells(p, rest, start=levels)
    cells = [c for lv in fams for c in lv] + tail
    cells.sort(key=lambda c: c.members)
    family = CellFamily(cells, "all-ranks")
    clauses.update(check_output_clauses(p, family, fams, betas, epss, alpha))
    bad = [k for k, ok in clauses.items() if not ok]
    if bad:
        raise ClauseViolation(bad[0], "condition failed at stage resolution")
    return AllRanksReport(family, NetFamily(epss, nets), fams, betas, clauses)


def _piece_regions(region) -> list:
    if isinstance(region, KBox):
        return [r for _, _, r in region.pieces]
    return []


def check_level_conditions(p, fams, nets, betas, epss) -> dict[str, bool]:
    kernel = p.kernel_ids()
    ok = {str(k): True for k in range(1, 7)}
    seen: set[int] = set()
    for n, level in enumerate(fams):
        mine = {i for c in level for i in c.members}
        if mine & seen:
            ok["1"] = False
        seen |= mine
        for c in level:
            if any(p.points[i].kernel for i in c.members):
                ok["2"] = False
            if max(p.points[i].iso_rank for i in c.members) != betas[n] or p.points[c.region.root].iso_rank != betas[n]:
                ok["3"] = False
            if not c.diameter < epss[n]:
                ok["4"] = False
            if not min(_dist_set(p, z, c.members) for z in kernel) < epss[n]:
                ok["5"] = False
        for z in nets[n]:
            if not any(_dist_set(p, z, c.members) < epss[n] for c in level):
                ok["6"] = False
        # the net must cover the kernel
        if not all(min(p.dist(k, z) for z in nets[n]) < epss[n] for k in kernel):
            ok["6"] = False
    return ok


def check_output_clauses(p, family, fams, betas, epss, alpha) -> dict[str, bool]:
    """(i) null schedule, (ii) labels in S_alpha, (iii) every gamma_b inside
    the 3*eps_n ball around every kernel point at the last level with beta_n = b."""
    ok = {"i": True, "ii": True, "iii": True}
    counts: dict[int, int] = {}
    for c in family:
        if c.index is None or not c.diameter < Fraction(1, 2 ** c.index):
            ok["i"] = False
        counts[c.index] = counts.get(c.index, 0) + 1
        if c.label not in {gamma(b) for b in range(alpha)}:
            ok["ii"] = False
    if family.union() != set(p.free_ids()) or not family.disjoint():
        ok["i"] = False
    for b in range(alpha):
        last = max((n for n, bb in enumerate(betas) if bb == b), default=None)
        if last is None:
            ok["iii"] = False
            continue
        r = 3 * epss[last]
        for z in p.kernel_ids():
            if not any(c.label == gamma(b) and max(p.dist(z, i) for i in c.members) < r for c in family):
                ok["iii"] = False
    return ok
