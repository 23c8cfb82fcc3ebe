"""Normal forms, invariants and the (sound, incomplete) homeomorphism test.

Rewrite rules applied by :func:`normalize`:

R1  countable factors merge by the product law (w^a*k+1)(w^b*l+1) = w^(a#b)*kl+1
R2  X(M) * X(M) -> X(M)
R3  Cantor * S -> Cantor (the product is perfect, compact and zero-dimensional)
R4  Z(1) * Z(1) -> Z(1), only after its hypothesis check passes
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .epset import EPSet, first_difference, natset_str
from .expr import Atom, SpaceExpr, parse_expr
from .ordinal import FIN1, ScatteredForm, product_form

__all__ = [
    "NormalForm",
    "Spectrum",
    "Invariants",
    "Verdict",
    "normalize",
    "normalize_with_trace",
    "nf_product",
    "invariants",
    "decide_homeo",
    "family_generate",
    "replay_certificate",
    "check_r4_hypotheses",
    "as_expr",
    "Z",
    "O",
    "FIN",
    "CANTOR",
    "X",
]


@dataclass(frozen=True, order=True)
class NormalForm:
    countable: ScatteredForm = FIN1
    z: tuple[int, ...] = ()
    x: tuple[EPSet, ...] = ()
    cantor: bool = False

    def is_countable(self) -> bool:
        return not (self.z or self.x or self.cantor)

    def uncountable_atoms(self) -> int:
        return len(self.z) + len(self.x)

    def is_member(self, m=None) -> bool:
        """Membership in S(M): products of {1} u {w^n+1} and Z(m), m in M.

        ``m=None`` accepts any Z index.
        """
        if self.cantor or self.x or self.countable.mult != 1:
            return False
        return m is None or all(k in m for k in self.z)

    def atoms(self) -> list[str]:
        out = []
        c = self.countable
        if not c.is_point() or not (self.z or self.x or self.cantor):
            out.append(str(c))
        out += [f"Z({n})" for n in self.z]
        out += [f"X{m}" for m in self.x]
        if self.cantor:
            out.append("Cantor")
        return out

    def __str__(self):
        return "*".join(self.atoms())


FIN = NormalForm()
CANTOR = NormalForm(cantor=True)


def O(n: int) -> NormalForm:
    return NormalForm(countable=ScatteredForm.of(n)) if n else FIN


def Z(n: int) -> NormalForm:
    return NormalForm(z=(n,))


def X(m: EPSet) -> NormalForm:
    return NormalForm(x=(m,))


def check_r4_hypotheses(indices) -> list[str]:
    """Verify the rank-1 hypotheses that license collapsing a power of Z(1).

    Every non-kernel point of Z(1)^j has CB rank in the sumset of the
    factor spectra, and isolated points stay dense because they are dense
    in each factor. Refuses anything but Z(1) factors.
    """
    indices = list(indices)
    if not indices or any(n != 1 for n in indices):
        raise ValueError("R4 only applies to products of Z(1)")
    spec = Spectrum.upto(0)
    for n in indices[1:]:
        spec = spec.sumset(Spectrum.upto(n - 1))
    if spec != Spectrum.upto(0):
        raise AssertionError("rank bound CB(x) < 1 fails")
    return [
        f"CB(x) < 1 on the complement of the kernel: spectrum {spec}",
        "isolated points dense in every factor, hence in the product",
        "perfect kernel is a nonempty perfect compact zero-dimensional set",
    ]


def _collect(atoms) -> tuple[list, list[int], list[EPSet], bool]:
    countable, zs, xs, cantor = [], [], [], False
    for a in atoms:
        if isinstance(a, ScatteredForm):
            countable.append(a)
        elif a.kind == "Fin":
            countable.append(ScatteredForm.of(0, a.arg))
        elif a.kind == "O":
            countable.append(ScatteredForm.of(a.arg))
        elif a.kind == "Z":
            zs.append(a.arg)
        elif a.kind == "X":
            xs.append(a.arg)
        elif a.kind == "Cantor":
            cantor = True
        else:
            raise ValueError(f"unknown atom {a}")
    return countable, zs, xs, cantor


def normalize_with_trace(e) -> tuple[NormalForm, list[dict]]:
    if isinstance(e, str):
        e = parse_expr(e)
    atoms = e.factors if isinstance(e, SpaceExpr) else list(e)
    countable, zs, xs, cantor = _collect(atoms)
    trace = []
    if cantor:
        others = [str(a) for a in atoms if not (isinstance(a, Atom) and a.kind == "Cantor")]
        if len(atoms) > 1:
            trace.append({"rule": "R3", "detail": f"Cantor absorbs {'*'.join(others) or 'Cantor'}"})
        return CANTOR, trace
    form = FIN1
    for f in countable:
        form = product_form(form, f)
    if len(countable) > 1:
        trace.append({"rule": "R1", "detail": f"{'*'.join(str(f) for f in countable)} -> {form}"})
    uniq = sorted(set(xs))
    if len(uniq) < len(xs):
        for m in uniq:
            k = xs.count(m)
            if k > 1:
                trace.append({"rule": "R2", "detail": f"X{m}^{k} -> X{m}"})
    ones = zs.count(1)
    if ones > 1:
        reasons = check_r4_hypotheses([1] * ones)
        trace.append({"rule": "R4", "detail": f"Z(1)^{ones} -> Z(1)", "hypotheses": reasons})
        zs = [n for n in zs if n != 1] + [1]
    return NormalForm(form, tuple(sorted(zs)), tuple(uniq), False), trace


def normalize(e) -> NormalForm:
    return normalize_with_trace(e)[0]


def _nf_atoms(nf: NormalForm) -> list:
    out = [nf.countable]
    out += [Atom("Z", n) for n in nf.z]
    out += [Atom("X", m) for m in nf.x]
    if nf.cantor:
        out.append(Atom("Cantor"))
    return out


def nf_product(*forms: NormalForm) -> NormalForm:
    atoms = []
    for f in forms:
        atoms += _nf_atoms(f)
    return normalize(atoms)


def as_expr(nf: NormalForm) -> SpaceExpr:
    """An expression whose normal form is ``nf`` (countable part must be
    expressible with Fin/O atoms)."""
    atoms = []
    c = nf.countable
    if not c.rank:
        if c.mult > 1 or not (nf.z or nf.x or nf.cantor):
            atoms.append(Atom("Fin", c.mult))
    else:
        if not c.rank.is_finite():
            raise ValueError("countable part needs an infinite-rank atom")
        atoms.append(Atom("O", c.rank.as_int()))
        if c.mult > 1:
            atoms.append(Atom("Fin", c.mult))
    atoms += _nf_atoms(NormalForm(FIN1, nf.z, nf.x, nf.cantor))[1:]
    return SpaceExpr(tuple(atoms))


@dataclass(frozen=True)
class Spectrum:
    """A set of naturals: ``finite`` plus every n >= ``cofinite_from``."""

    finite: frozenset = frozenset()
    cofinite_from: int | None = None

    def __post_init__(self):
        fin = frozenset(self.finite)
        c = self.cofinite_from
        if c is not None:
            fin = frozenset(n for n in fin if n < c)
            while c - 1 in fin:
                fin = fin - {c - 1}
                c -= 1
        object.__setattr__(self, "finite", fin)
        object.__setattr__(self, "cofinite_from", c)

    @classmethod
    def upto(cls, top: int) -> Spectrum:
        return cls(frozenset(range(top + 1)))

    @classmethod
    def everything(cls) -> Spectrum:
        return cls(frozenset(), 0)

    def __contains__(self, n) -> bool:
        return n in self.finite or (self.cofinite_from is not None and n >= self.cofinite_from)

    def is_empty(self) -> bool:
        return not self.finite and self.cofinite_from is None

    def minimum(self) -> int | None:
        cands = list(self.finite) + ([self.cofinite_from] if self.cofinite_from is not None else [])
        return min(cands) if cands else None

    def sumset(self, other: Spectrum) -> Spectrum:
        if self.is_empty() or other.is_empty():
            return Spectrum()
        fin = frozenset(a + b for a in self.finite for b in other.finite)
        cof = None
        if self.cofinite_from is not None:
            cof = self.cofinite_from + other.minimum()
        if other.cofinite_from is not None:
            c = other.cofinite_from + self.minimum()
            cof = c if cof is None else min(cof, c)
        return Spectrum(fin, cof)

    def bound(self) -> int:
        return max(list(self.finite) + [self.cofinite_from or 0]) + 1

    def __str__(self):
        items = [str(n) for n in sorted(self.finite)]
        if self.cofinite_from is not None:
            items.append(f"{self.cofinite_from},...")
        return "{" + ",".join(items) + "}"


@dataclass(frozen=True)
class Invariants:
    cardinality: tuple  # ("finite", k) | ("countable",) | ("continuum",)
    countable_form: ScatteredForm | None
    spectrum: Spectrum
    open_z: object  # frozenset | EPSet | None (unknown)

    def to_json(self):
        return {
            "cardinality": "finite(%d)" % self.cardinality[1] if self.cardinality[0] == "finite" else self.cardinality[0],
            "countableForm": None if self.countable_form is None else str(self.countable_form),
            "isoRankSpectrum": str(self.spectrum),
            "openZ": "unknown" if self.open_z is None else natset_str(self.open_z),
        }


def invariants(e) -> Invariants:
    nf = e if isinstance(e, NormalForm) else normalize(e)
    if nf.cantor:
        return Invariants(("continuum",), None, Spectrum(), frozenset())
    c = nf.countable
    if not c.rank.is_finite():
        raise ValueError("only finite countable ranks are supported")
    spec = Spectrum.upto(c.rank.as_int())
    if nf.is_countable():
        card = ("finite", c.mult) if not c.rank else ("countable",)
        return Invariants(card, c, spec, frozenset())
    for n in nf.z:
        spec = spec.sumset(Spectrum.upto(n - 1))
    for _ in nf.x:
        spec = spec.sumset(Spectrum.everything())
    if nf.uncountable_atoms() > 1:
        open_z = None
    elif nf.z:
        open_z = frozenset(nf.z)
    else:
        open_z = nf.x[0]
    return Invariants(("continuum",), None, spec, open_z)


@dataclass
class Verdict:
    kind: str  # "Homeo" | "NotHomeo" | "Unknown"
    trace: list = field(default_factory=list)
    certificate: dict | None = None
    reason: str = ""

    def to_json(self):
        out = {"verdict": self.kind, "trace": self.trace}
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.reason:
            out["reason"] = self.reason
        return out


def _spectrum_witness(a: Spectrum, b: Spectrum) -> int | None:
    limit = max(a.bound(), b.bound()) + 1
    for n in range(limit):
        if n in a and n not in b:
            return n
    for n in range(limit):
        if n in b and n not in a:
            return n
    return None


def _compare(i1: Invariants, i2: Invariants) -> dict | None:
    if i1.cardinality != i2.cardinality:
        return {"invariant": "cardinality", "witness": [i1.to_json()["cardinality"], i2.to_json()["cardinality"]]}
    if i1.countable_form != i2.countable_form:
        return {"invariant": "countableForm", "witness": [str(i1.countable_form), str(i2.countable_form)]}
    if i1.spectrum != i2.spectrum:
        return {
            "invariant": "isoRankSpectrum",
            "witness": _spectrum_witness(i1.spectrum, i2.spectrum),
            "values": [str(i1.spectrum), str(i2.spectrum)],
        }
    if i1.open_z is not None and i2.open_z is not None:
        k = first_difference(i1.open_z, i2.open_z)
        if k is not None:
            return {"invariant": "openZ", "witness": k, "values": [natset_str(i1.open_z), natset_str(i2.open_z)]}
    return None


def decide_homeo(e1, e2) -> Verdict:
    nf1, t1 = normalize_with_trace(e1)
    nf2, t2 = normalize_with_trace(e2)
    trace = [dict(r, side=1) for r in t1] + [dict(r, side=2) for r in t2]
    if nf1 == nf2:
        trace.append({"rule": "equal-normal-forms", "detail": str(nf1)})
        return Verdict("Homeo", trace)
    cert = _compare(invariants(nf1), invariants(nf2))
    if cert is not None:
        return Verdict("NotHomeo", trace, cert)
    return Verdict("Unknown", trace, reason="no applicable rule")


def replay_certificate(e1, e2, cert: dict) -> bool:
    """Recompute both invariants and confirm the certificate separates them."""
    i1, i2 = invariants(e1), invariants(e2)
    name, w = cert["invariant"], cert["witness"]
    if name == "openZ":
        if i1.open_z is None or i2.open_z is None:
            return False
        return (w in i1.open_z) != (w in i2.open_z)
    if name == "isoRankSpectrum":
        return (w in i1.spectrum) != (w in i2.spectrum)
    if name == "cardinality":
        return i1.cardinality != i2.cardinality
    if name == "countableForm":
        return i1.countable_form != i2.countable_form
    return False


EVEN_TAIL = (2, 2)


def family_member(i: int) -> EPSet:
    """Odd numbers picked by the binary digits of i+1, joined with the evens."""
    bits, odds, j = i + 1, [], 0
    while bits:
        if bits & 1:
            odds.append(2 * j + 1)
        bits >>= 1
        j += 1
    return EPSet.from_parts(odds, [EVEN_TAIL])


def family_generate(count: int) -> tuple[list[EPSet], list[dict]]:
    if count < 2:
        raise ValueError("family needs count >= 2 (certificates are pairwise)")
    sets = [family_member(i) for i in range(count)]
    exprs = [SpaceExpr((Atom("X", m),)) for m in sets]
    certs = []
    for i in range(count):
        for j in range(i + 1, count):
            v = decide_homeo(exprs[i], exprs[j])
            if v.kind != "NotHomeo" or not replay_certificate(exprs[i], exprs[j], v.certificate):
                raise AssertionError(f"family members {i} and {j} not separated")
            certs.append({"i": i, "j": j, **v.certificate})
    return sets, certs
