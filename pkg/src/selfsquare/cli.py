"""Command-line front end.

Exit codes: 0 decided or emitted, 1 error, 2 Unknown verdict.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import figures
from .algebra import decide_homeo, family_generate, invariants, normalize, normalize_with_trace
from .cb import derivative_stages, rank_and_mult
from .expr import ExprError, parse_expr
from .ordinal import ScatteredForm
from .partition import (
    ClauseViolation,
    partition_all_ranks,
    partition_member,
    partition_O,
    partition_Z,
    refine_null,
)
from .presentation import StageTooCoarse, present_expr
from .witness import HypothesisFailure, cell_side, extend_homeo, identity_kernel_map, square_witness

__all__ = ["main", "run", "build_parser"]

UNKNOWN = 2


class UsageError(ValueError):
    pass


def _fraction(text: str) -> Fraction:
    try:
        value = Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected p/q, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError("epsilon must be positive")
    return value


def _positive(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer, got {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return n


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=False) + "\n"


def _epset_arg(text: str):
    """Accept either ``X{...}`` or a bare ``{...}`` set literal."""
    src = text if text.lstrip().startswith("X") else "X" + text.strip()
    e = parse_expr(src)
    if len(e.factors) != 1 or e.factors[0].kind != "X":
        raise UsageError(f"expected a single set literal, got {text!r}")
    return e.factors[0].arg


# -- commands -----------------------------------------------------------------


def cmd_normalize(a):
    nf, trace = normalize_with_trace(parse_expr(a.expr))
    obj = {"input": a.expr, "normalForm": str(nf), "trace": trace}
    text = f"{nf}\n" + "".join(f"  {t['rule']}: {t['detail']}\n" for t in trace)
    return 0, obj, text, None


def cmd_invariants(a):
    inv = invariants(parse_expr(a.expr))
    obj = {"input": a.expr, **inv.to_json()}
    text = "".join(f"{k}: {v}\n" for k, v in inv.to_json().items())
    return 0, obj, text, None


def cmd_homeo(a):
    v = decide_homeo(parse_expr(a.left), parse_expr(a.right))
    obj = v.to_json()
    text = f"{v.kind}\n"
    if v.certificate:
        text += f"  certificate: {json.dumps(v.certificate)}\n"
    if v.reason:
        text += f"  reason: {v.reason}\n"
    return (UNKNOWN if v.kind == "Unknown" else 0), obj, text, None


def cmd_present(a):
    p = present_expr(parse_expr(a.expr), a.stage)
    counts = {}
    for c in p.cells:
        counts[str(c.label)] = counts.get(str(c.label), 0) + 1
    text = f"{p.space} at stage {p.stage}: {len(p.points)} points, {len(p.cells)} cells\n"
    text += "".join(f"  {k}: {n}\n" for k, n in sorted(counts.items()))
    return 0, {"space": str(p.space), **p.to_json()}, text, lambda: figures.presentation_figure(p, title=f"{a.expr}, stage {a.stage}")


def cmd_partition(a):
    e = parse_expr(a.expr)
    nf = normalize(e)
    p = present_expr(e, a.stage)
    if a.all_ranks:
        if not nf.z or len(nf.z) != 1 or not nf.countable.is_point() or nf.x:
            raise UsageError("--all-ranks needs a single Z(n) expression")
        rep = partition_all_ranks(p, nf.z[0])
        obj = {
            "space": str(nf),
            "stage": a.stage,
            "betas": rep.betas,
            "nets": [list(level) for level in rep.nets.nets],
            "clauses": rep.clauses,
            "cells": rep.family.to_json(),
        }
        text = f"{len(rep.family)} cells over {len(rep.betas)} levels\n"
        text += "".join(f"  clause {k}: {'ok' if v else 'FAILED'}\n" for k, v in rep.clauses.items())
        return 0, obj, text, lambda: figures.partition_figure(p, rep.family, title=f"{a.expr}: all ranks")
    if a.epsilon is None:
        raise UsageError("partition needs --epsilon p/q")
    if nf.is_countable():
        fam = partition_O(nf.countable, a.epsilon, p)
        kind = "O"
    elif len(nf.z) == 1 and nf.countable.is_point() and not nf.x:
        fam = partition_Z(nf.z[0], a.epsilon, p)
        kind = "Z"
    elif nf.is_member():
        fam = partition_member(nf, a.epsilon, p)
        kind = "member"
    else:
        raise UsageError(f"no partition lemma covers {nf}")
    if a.null:
        fam = refine_null(fam, p)
    obj = {"space": str(nf), "stage": a.stage, "epsilon": str(a.epsilon), "lemma": kind,
           "mesh": str(fam.mesh()), "cells": fam.to_json()}
    text = f"{len(fam)} cells, mesh {fam.mesh()} < {a.epsilon}\n"
    text += "".join(f"  {c.label}: {len(c.members)} points, diameter {c.diameter}\n" for c in fam.cells)
    return 0, obj, text, lambda: figures.partition_figure(p, fam, title=f"{a.expr}, eps {a.epsilon}")


def cmd_square(a):
    m = _epset_arg(a.set)
    w = square_witness(m, a.stage)
    obj = {"set": str(m), "stage": a.stage, "withinBound": w.within_bound, **w.to_json()}
    text = (f"X{m} x X{m} ~ X{m} at stage {a.stage}: {len(w.trace.pairs)} cells, "
            f"distortion {w.distortion} (bound {w.bound}), labels preserved: {w.labels_preserved}\n")
    bounds = w.trace.bounds()
    return 0, obj, text, lambda: figures.bounds_figure({f"stage {a.stage}": bounds}, title=f"square witness for X{m}")


def cmd_family(a):
    sets, certs = family_generate(a.count)
    obj = {"sets": [str(m) for m in sets], "certificates": certs}
    text = "".join(f"{i}: {m}\n" for i, m in enumerate(sets))
    text += f"{len(certs)} NotHomeo certificates\n"
    return 0, obj, text, lambda: figures.family_figure(sets)


def _countable_factors(text: str) -> list[ScatteredForm]:
    out = []
    for atom in parse_expr(text).factors:
        if atom.kind == "Fin":
            out.append(ScatteredForm.of(0, atom.arg))
        elif atom.kind == "O":
            out.append(ScatteredForm.of(atom.arg))
        else:
            raise UsageError(f"oracle-rank only takes Fin(k) and O(n) factors, got {atom}")
    return out


def cmd_oracle(a):
    factors = _countable_factors(a.expr)
    stages = derivative_stages(factors)
    rank, mult = rank_and_mult(factors)
    obj = {"factors": [str(f) for f in factors], "rank": str(rank), "mult": mult,
           "stages": [s.to_json() for s in stages]}
    text = f"rank {rank}, mult {mult}\n"
    text += "".join(f"  X^({n}): {' u '.join('x'.join(r) for r in s.to_json())}\n" for n, s in enumerate(stages))
    return 0, obj, text, None


def cmd_report(a):
    """Write JSON results and figures for a fixed battery of examples."""
    out = Path(a.out)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name, obj):
        (out / name).write_text(_dump(obj))
        written.append(name)

    stage = a.stage
    for label, text in (("z2", "Z(2)"), ("evens", "X{;2+2k}"), ("ordinal", "O(2)")):
        p = present_expr(text, stage)
        emit(f"present_{label}.json", {"space": str(p.space), **p.to_json()})
        figures.presentation_figure(p, title=f"{text}, stage {stage}", path=out / f"present_{label}.svg")
        written.append(f"present_{label}.svg")

    p = present_expr("Z(2)", stage)
    fam = partition_Z(2, Fraction(1, 4), p)
    emit("partition_z2.json", {"epsilon": "1/4", "mesh": str(fam.mesh()), "cells": fam.to_json()})
    figures.partition_figure(p, fam, title="Z(2), eps 1/4", path=out / "partition_z2.svg")
    written.append("partition_z2.svg")

    runs = {}
    for s in range(2, stage + 1):
        pz = present_expr("P", s)
        w = extend_homeo(cell_side(pz), cell_side(pz), identity_kernel_map(pz, pz))
        runs[f"stage {s}"] = w.trace.bounds()
    emit("pelczynski_bounds.json", {k: [str(b) for b in v] for k, v in runs.items()})
    figures.bounds_figure(runs, title="self-witness of P", path=out / "pelczynski_bounds.svg")
    written.append("pelczynski_bounds.svg")

    runs = {}
    for s in range(2, min(stage, 3) + 1):
        w = square_witness(_epset_arg("{;2+2k}"), s)
        runs[f"stage {s}"] = w.trace.bounds()
        emit(f"square_witness_s{s}.json", {"stage": s, "distortion": str(w.distortion), "bound": str(w.bound),
                                            "labelsPreserved": w.labels_preserved, "cells": len(w.trace.pairs)})
    figures.bounds_figure(runs, title="square witness bounds", path=out / "square_bounds.svg")
    written.append("square_bounds.svg")

    sets, certs = family_generate(a.count)
    emit("family.json", {"sets": [str(m) for m in sets], "certificates": certs})
    figures.family_figure(sets, path=out / "family.svg")
    written.append("family.svg")
    obj = {"out": str(out), "files": written}
    return 0, obj, "".join(f"{n}\n" for n in written), None


# -- wiring -------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="selfsquare", description="Homeomorphism types of products of compacta.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, func, help_text, *, stage=False, fmt=True):
        sp = sub.add_parser(name, help=help_text)
        sp.set_defaults(func=func)
        if fmt:
            sp.add_argument("--format", choices=("json", "svg", "text"), default="json")
            sp.add_argument("--figure", metavar="PATH", help="also write the figure to PATH (.svg or .png)")
        if stage:
            sp.add_argument("--stage", type=_positive, default=3)
        return sp

    add("normalize", cmd_normalize, "rewrite to normal form").add_argument("expr")
    add("invariants", cmd_invariants, "print the invariant record").add_argument("expr")
    sp = add("homeo", cmd_homeo, "decide homeomorphism (exit 2 on Unknown)")
    sp.add_argument("left")
    sp.add_argument("right")
    add("present", cmd_present, "finite stage presentation", stage=True).add_argument("expr")
    sp = add("partition", cmd_partition, "clopen partition at a stage", stage=True)
    sp.add_argument("expr")
    sp.add_argument("--epsilon", type=_fraction)
    sp.add_argument("--null", action="store_true", help="refine the result into a null family")
    sp.add_argument("--all-ranks", action="store_true", help="run the all-ranks construction on Z(n)")
    sp = add("square-witness", cmd_square, "stage witness for X(M) x X(M) ~ X(M)", stage=True)
    sp.add_argument("set", help="set literal such as '{;2+2k}' or 'X{1;2+2k}'")
    sp = add("family", cmd_family, "pairwise separated family")
    sp.add_argument("--count", type=_positive, default=8)
    add("oracle-rank", cmd_oracle, "brute-force derivative stages of a countable product").add_argument("expr")
    sp = add("report", cmd_report, "write JSON and SVG results to a directory", stage=True, fmt=False)
    sp.add_argument("--out", required=True)
    sp.add_argument("--count", type=_positive, default=16)
    return ap


def run(argv, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    ap = build_parser()
    try:
        a = ap.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        code, obj, text, fig = a.func(a)
    except ExprError as exc:
        stderr.write(f"error: {exc}\n{exc.caret()}\n")
        return 1
    except (StageTooCoarse, ClauseViolation, HypothesisFailure, UsageError, ValueError) as exc:
        stderr.write(f"error: {type(exc).__name__}: {exc}\n")
        return 1
    fmt = getattr(a, "format", "json")
    if fmt == "svg":
        if fig is None:
            stderr.write(f"error: {a.command} has no figure\n")
            return 1
        stdout.write(figures.to_svg(fig()))
    elif fmt == "text":
        stdout.write(text)
    else:
        stdout.write(_dump(obj))
    if getattr(a, "figure", None):
        if fig is None:
            stderr.write(f"error: {a.command} has no figure\n")
            return 1
        figures.save(fig(), a.figure)
    return code


def main(argv=None) -> int:
    return run(sys.argv[1:] if argv is None else argv)


if __name__ == "__main__":
    sys.exit(main())
