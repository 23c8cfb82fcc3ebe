from __future__ import annotations

from fractions import Fraction as Q

import pytest

from selfsquare.algebra import FIN, O, Z, normalize
from selfsquare.ordinal import ScatteredForm, union_form
from selfsquare.partition import (
    CellFamily,
    ClauseViolation,
    gamma,
    partition_all_ranks,
    partition_countable_open,
    partition_member,
    partition_O,
    partition_Z,
    refine_null,
)
from selfsquare.presentation import Catalog, StageTooCoarse, present_countable, present_expr, present_K

F = ScatteredForm.of


def labels(fam):
    return [str(c.label) for c in fam]


def assert_partition_of(fam, ids):
    assert fam.disjoint()
    assert fam.union() == set(ids)


def test_two_sequences_split_at_the_gap():
    p = present_countable(F(1, 2), 4)
    fam = partition_O(F(1, 2), 1, p)
    assert labels(fam) == ["O(1)", "O(1)"]
    assert_partition_of(fam, range(len(p.points)))


def test_product_presentation_splits_into_members():
    p = present_expr("O(1)*Fin(2)", 3)
    assert labels(partition_O(F(1, 2), 1, p)) == ["O(1)", "O(1)"]


def test_finite_space_gives_singletons():
    p = present_countable(F(0, 3), 2)
    assert labels(partition_O(F(0, 3), Q(1, 100), p)) == ["Fin(1)"] * 3


def test_rank_two_peels_outer_sequence():
    p = present_countable(F(2), 4)
    fam = partition_O(F(2), Q(1, 4), p)
    assert labels(fam).count("O(2)") == 1
    assert fam.mesh() < Q(1, 4)
    assert union_form(c.label.countable for c in fam) == F(2)


def test_partition_O_rejects_bad_input():
    p = present_countable(F(1), 3)
    with pytest.raises(ValueError):
        partition_O(F(1), 0, p)
    with pytest.raises(ValueError):
        partition_O(F(2), Q(1, 2), p)


def test_partition_Z_examples():
    p = present_expr("Z(2)", 4)
    assert labels(partition_Z(2, 1, p)) == ["Z(2)"]
    fam = partition_Z(2, Q(1, 4), p)
    assert "Z(2)" in labels(fam) and set(labels(fam)) <= {"Z(2)", "O(1)", "Fin(1)"}
    assert fam.mesh() < Q(1, 4)
    assert_partition_of(fam, range(len(p.points)))
    with pytest.raises(StageTooCoarse):
        partition_Z(2, Q(1, 100), p)


def test_partition_member_examples():
    s = normalize("O(1)*Z(2)")
    p = present_expr("O(1)*Z(2)", 3)
    fam = partition_member(s, Q(1, 2), p)
    assert "O(1)*Z(2)" in labels(fam)
    assert all(c.label.is_member({2}) for c in fam)
    assert labels(partition_member(FIN, Q(1, 2), present_expr("Fin(1)", 3))) == ["Fin(1)"]
    with pytest.raises(ValueError):
        partition_member(normalize("Cantor"), Q(1, 2), present_expr("Cantor", 2))


def check_null_refinement(before: CellFamily, after: CellFamily):
    # (i) same union, (ii) refinement, (iii) each old cell keeps a piece with its label, (iv) labels stay members
    assert after.union() == before.union() and after.disjoint()
    for c in after:
        assert any(set(c.members) <= set(b.members) for b in before)
        assert c.diameter < Q(1, 2 ** c.index)
        assert c.label.is_member()
    for n, b in enumerate(before.cells):
        assert any(c.index == n and c.label == b.label for c in after)


def test_refine_null_examples():
    p = present_countable(F(1, 2), 4)
    fam = partition_O(F(1, 2), 1, p)
    out = refine_null(fam, p)
    check_null_refinement(fam, out)
    assert [c.label for c in out if c.index == 1].count(O(1)) == 1
    assert len(refine_null(CellFamily([], "empty"), p)) == 0
    single = partition_O(F(0), 1, present_countable(F(0), 2))
    assert labels(refine_null(single, present_countable(F(0), 2))) == ["Fin(1)"]


def test_refine_null_on_z():
    p = present_expr("Z(2)", 4)
    fam = partition_Z(2, Q(1, 2), p)
    check_null_refinement(fam, refine_null(fam, p))


def test_countable_open_examples():
    p = present_countable(F(2), 4)
    fam = partition_countable_open(p, p.root, 3)
    assert set(labels(fam)) <= {"Fin(1)", "O(1)", "O(2)"}
    for c in fam:
        assert c.diameter < Q(1, 2 ** c.index)
    with pytest.raises(ValueError):
        partition_countable_open(p, p.root, 0)
    with pytest.raises(ValueError):
        partition_countable_open(p, p.root, 2)
    assert len(partition_countable_open(p, [], 0)) == 0


def test_gamma_members():
    assert [gamma(b) for b in range(3)] == [FIN, O(1), O(2)]


def test_all_ranks_alpha_two():
    p = present_K(Catalog.ranks(2), 4)
    rep = partition_all_ranks(p, 2)
    assert all(rep.clauses.values())
    assert {c.label for c in rep.family} == {FIN, O(1)}
    assert rep.family.union() == set(p.free_ids())


def test_all_ranks_alpha_one_is_all_points():
    p = present_K(Catalog.ranks(1), 3)
    rep = partition_all_ranks(p, 1)
    assert {c.label for c in rep.family} == {FIN}
    assert all(rep.clauses.values())


def test_all_ranks_degenerate_and_coarse():
    p = present_K(Catalog.ranks(2), 3)
    assert len(partition_all_ranks(p, 0).family) == 0
    with pytest.raises(ClauseViolation) as info:
        partition_all_ranks(p, 2)
    assert info.value.clause == "6"
    with pytest.raises(ValueError):
        partition_all_ranks(p, -1)


def test_z_presentation_matches_rank_catalog():
    assert present_expr("Z(2)", 3).space == Z(2)
