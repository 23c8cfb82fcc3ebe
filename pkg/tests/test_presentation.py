from __future__ import annotations

from fractions import Fraction as Q

import pytest

from selfsquare.algebra import FIN, O, X, Z
from selfsquare.epset import EPSet
from selfsquare.ordinal import ScatteredForm
from selfsquare.presentation import (
    Catalog,
    cantor_points,
    cantor_q,
    density_radius,
    diameter,
    hausdorff_distance,
    linf,
    mesh,
    present_countable,
    present_expr,
    present_K,
    strip_bound,
)

F = ScatteredForm.of
EVENS = EPSet.from_parts([], [(2, 2)])


def test_linf_and_hausdorff():
    assert linf((0, 0), (Q(1, 3), Q(1, 2))) == Q(1, 2)
    assert hausdorff_distance([0], [1]) == 1
    assert hausdorff_distance([0, 1], [0]) == 1
    assert hausdorff_distance([(0, 0), (1, 1)], [(0, 0), (1, 1)]) == 0
    with pytest.raises(ValueError):
        hausdorff_distance([], [0])


def test_mesh_and_diameter():
    assert mesh([[(0,)], [(1,)]]) == 0
    assert mesh([[(0,), (Q(1, 3),)]]) == Q(1, 3)
    assert diameter([(0, 0), (Q(1, 3), Q(1, 9))]) == Q(1, 3)
    with pytest.raises(ValueError):
        mesh([])


def test_schedules():
    assert strip_bound(3) == Q(1, 8)
    assert density_radius(4) == Q(1, 4)
    assert cantor_points(2) == (0, Q(2, 9), Q(2, 3), Q(8, 9))
    assert [cantor_q(k) for k in range(4)] == [Q(2, 3), Q(2, 9), Q(8, 9), Q(2, 27)]


def test_convergent_sequence_layout():
    p = present_countable(F(1), 3)
    assert [pt.coords[0] for pt in p.points] == [0, Q(1, 27), Q(1, 9), Q(1, 3)]
    assert [pt.iso_rank for pt in p.points] == [1, 0, 0, 0]


def test_countable_counts():
    assert len(present_countable(F(0, 3), 4).points) == 3
    assert len(present_countable(F(2), 2).points) == 7
    p = present_expr("O(1)*O(1)", 2)
    assert len(p.points) == 9
    assert {pt.iso_rank for pt in p.points} == {0, 1, 2}


def test_point_unit_adds_a_coordinate():
    p, q = present_expr("Fin(1)*O(1)", 3), present_expr("O(1)", 3)
    assert p.dim() == 2 and len(p.points) == len(q.points)
    assert [pt.coords[1] for pt in p.points] == [pt.coords[0] for pt in q.points]


def test_pelczynski_stage_two():
    p = present_K(Catalog.explicit([FIN], Z(1)), 2)
    assert (len(p.points), len(p.kernel_ids()), len(p.free_ids())) == (7, 4, 3)
    assert p.space == Z(1)


def test_stage_one_has_one_strip():
    p = present_K(Catalog.explicit([FIN], Z(1)), 1)
    assert (len(p.points), len(p.kernel_ids())) == (3, 2)


def test_rank_catalog_uses_both_members():
    p = present_K(Catalog.ranks(2), 3)
    labels = {c.label for c in p.cells if not all(p.points[i].kernel for i in c.members)}
    assert labels == {FIN, O(1)}


def test_product_kernel_flags():
    p = present_expr("Z(1)*Z(1)", 2)
    assert len(p.points) == 49 and len(p.kernel_ids()) == 40


def test_catalog_of_m():
    cat = Catalog.of_M(EVENS)
    assert cat.space == X(EVENS)
    assert [str(s) for s in cat.prefix(8)] == ["Fin(1)", "Z(2)", "O(1)", "O(2)"]
    assert cat.contains(Z(2)) and not cat.contains(Z(3))
    # every member recurs along the ruler enumeration
    assert [cat.at(n) for n in (0, 2, 4)] == [FIN, FIN, FIN]


def test_strip_cells_shrink():
    p = present_K(Catalog.ranks(2), 4)
    for c in p.cells:
        ys = [p.points[i].coords[1] for i in c.members]
        if min(ys) > 0:
            n = next(k for k in range(p.stage) if min(ys) >= Q(1, 2 ** (k + 1)))
            assert p.diameter(c.members) < strip_bound(n)


def test_kernel_density_and_separation():
    p = present_expr("Z(3)", 4)
    assert len(p.points) == 94
    assert p.separated()
    assert present_K(Catalog.ranks(2), 4).kernel_density() <= density_radius(4)
    assert present_expr(f"X{EVENS}", 4).separated()


def test_larger_presentations():
    assert len(present_expr(f"X{EVENS}", 4).points) == 110
    assert len(present_expr("P*P", 3).points) == 196


def test_json_is_stable():
    a = present_expr("Z(2)", 3).to_json()
    b = present_expr("Z(2)", 3).to_json()
    assert a == b
    assert set(a) == {"stage", "points", "cells"}
    assert set(a["points"][0]) == {"xy", "cell", "kernel", "isoRank"}


def test_stage_must_be_positive():
    with pytest.raises(ValueError):
        present_expr("O(1)", 0)
