from __future__ import annotations

from fractions import Fraction as Q

import pytest

from selfsquare.algebra import FIN, O, Z
from selfsquare.epset import EPSet
from selfsquare.presentation import Catalog, StageTooCoarse, cantor_q, present_expr, present_K
from selfsquare.witness import (
    HypothesisFailure,
    StarConditionViolated,
    cell_side,
    color_backforth,
    extend_homeo,
    identity_kernel_map,
    point_side,
    remove_isolated_witness,
    square_witness,
)

EVENS = EPSet.from_parts([], [(2, 2)])
PEL = Catalog.explicit([FIN], Z(1))


def self_witness(p):
    return extend_homeo(cell_side(p), cell_side(p), identity_kernel_map(p, p))


def test_pelczynski_stage_three_trace():
    p = present_K(PEL, 3)
    trace = color_backforth(point_side(p), point_side(p), identity_kernel_map(p, p))
    assert trace.bounds() == [Q(2, 3), Q(1, 3), Q(1, 3), Q(1, 6), Q(1, 6), Q(1, 6)]
    assert [pr.parity for pr in trace.pairs] == [0, 1, 0, 1, 0, 1]
    for n, b in enumerate(trace.bounds()):
        assert b <= Q(2) ** (-(n // 2) + 1)


def test_missing_color_breaks_star_condition():
    p = present_K(PEL, 3)
    two = {i: k % 2 for k, i in enumerate(p.free_ids())}
    with pytest.raises(StarConditionViolated):
        color_backforth(point_side(p, two), point_side(p), identity_kernel_map(p, p))


def test_empty_sides_give_empty_trace():
    p = present_expr("Cantor", 2)
    trace = color_backforth(point_side(p), point_side(p), identity_kernel_map(p, p))
    assert trace.pairs == [] and len(trace.kernel_map) == 4


def test_kernel_map_must_be_bijective():
    p = present_K(PEL, 2)
    km = identity_kernel_map(p, p)
    km.pop(next(iter(km)))
    with pytest.raises(ValueError):
        color_backforth(point_side(p), point_side(p), km)


def test_rank_catalog_self_witness_is_identity():
    p = present_K(Catalog.ranks(2), 3)
    w = self_witness(p)
    assert w.distortion == 0 and w.labels_preserved
    assert all(pr.a == pr.b for pr in w.trace.pairs)
    assert w.sub_witnesses[0]["mode"] == "rank-preserving"


def test_reenumerated_copy():
    p1 = present_K(PEL, 3)
    p2 = present_K(PEL, 3, columns=[cantor_q(k) for k in (2, 0, 1)])
    w = extend_homeo(cell_side(p1), cell_side(p2), identity_kernel_map(p1, p2))
    assert w.labels_preserved
    assert any(pr.a != pr.b for pr in w.trace.pairs)
    assert w.distortion == Q(35, 54)


def test_label_sets_must_agree():
    p1 = present_K(PEL, 3)
    p2 = present_K(Catalog.explicit([O(1)], Z(2)), 3)
    with pytest.raises(HypothesisFailure) as info:
        extend_homeo(cell_side(p1), cell_side(p2), identity_kernel_map(p1, p2))
    assert info.value.clause == "3"


def test_remove_isolated_point_from_sequence():
    p = present_expr("O(1)", 4)
    out = remove_isolated_witness(p, 2)
    assert out["sequence"] == [4, 3, 2, 1]
    assert out["shift"] == [[2, 1]] and out["limit"] == 0
    assert out["label"] == "O(1)"


def test_remove_isolated_point_in_pelczynski_column():
    p = present_expr("P", 3)
    z = p.free_ids()[0]
    out = remove_isolated_witness(p, z)
    assert out["label"] == "Fin(1)" and p.points[out["limit"]].kernel
    assert z in out["sequence"]


def test_remove_isolated_errors():
    with pytest.raises(ValueError):
        remove_isolated_witness(present_expr("Fin(3)", 2), 0)
    p = present_expr("P", 3)
    with pytest.raises(ValueError):
        remove_isolated_witness(p, p.kernel_ids()[0])


def test_square_witness_stage_two():
    w = square_witness(EVENS, 2)
    assert (len(w.trace.pairs), w.distortion, w.bound) == (49, 0, 1)
    assert w.labels_preserved and w.within_bound
    assert set(w.to_json()) == {
        "pairs", "kernelMap", "distortion", "bound", "labelsPreserved", "starRadius", "subWitnesses",
    }


def test_square_witness_stage_three():
    w = square_witness(EVENS, 3)
    assert (len(w.trace.pairs), w.distortion, w.bound) == (142, Q(55, 324), Q(1, 2))
    assert w.labels_preserved


def test_square_witness_other_set():
    w = square_witness(EPSet.from_parts([1], [(3, 3)]), 3)
    assert w.labels_preserved and w.within_bound


def test_square_witness_needs_two_strips():
    with pytest.raises(StageTooCoarse):
        square_witness(EVENS, 1)
