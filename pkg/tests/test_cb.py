from __future__ import annotations

import itertools

import pytest

from selfsquare.cb import PMult, RectSet, ZERO, derivative_stages, derive, point_rank, rank_and_mult
from selfsquare.ordinal import Ordinal, ScatteredForm, parse_ordinal, product_form

F = ScatteredForm.of


def test_derive_interval_leaves_the_limit():
    s = derive(RectSet.full([F(1)]))
    assert s.rects == ((PMult(1),),)
    assert s.points() == {(Ordinal.omega_power(1),)}


def test_derive_square_is_two_rectangles():
    s = derive(RectSet.full([F(1), F(1)]))
    assert sorted(map(tuple, s.to_json())) == sorted(
        [("P(1)", "{0}"), ("P(1)", "P(0)"), ("{0}", "P(1)"), ("P(0)", "P(1)")]
    )


def test_derive_square_matches_enumerated_limit_points():
    # points of [0,w]^2 over the grid {0..5, w}; limits are exactly the pairs with a w
    w = Ordinal.omega_power(1)
    grid = [Ordinal.of(i) for i in range(6)] + [w]
    d = derive(RectSet.full([F(1), F(1)]))
    for x, y in itertools.product(grid, grid):
        assert ((x, y) in d) == (x == w or y == w)


def test_finite_space_has_empty_derivative():
    assert not derive(RectSet.full([F(0, 3)]))


def test_rank_and_mult_examples():
    assert rank_and_mult([F(1)]) == (Ordinal.of(1), 1)
    assert rank_and_mult([F(1), F(1)]) == (Ordinal.of(2), 1)
    assert rank_and_mult([F(1, 2), F(2)]) == (Ordinal.of(3), 2)


def test_point_rank_examples():
    assert point_rank(parse_ordinal("w*3+1"), [F(2)]) == Ordinal.of(0)
    assert point_rank(parse_ordinal("w^2+w"), [F(2, 2)]) == Ordinal.of(1)
    assert point_rank(Ordinal(), [F(3)]) == Ordinal.of(0)
    with pytest.raises(ValueError):
        point_rank(parse_ordinal("w^3"), [F(2)])


def test_stages_end_at_top_points():
    stages = derivative_stages([F(2), F(0, 2)])
    assert len(stages) == 3
    assert len(stages[-1].points()) == 2


@pytest.mark.parametrize("a,b", [((1, 1), (1, 1)), ((0, 2), (0, 3)), ((2, 2), (1, 3)), ((3, 1), (0, 2))])
def test_oracle_agrees_with_natural_sum(a, b):
    fa, fb = F(*a), F(*b)
    r, m = rank_and_mult([fa, fb])
    assert ScatteredForm(r, m) == product_form(fa, fb)


def test_make_drops_contained_rectangles():
    s = RectSet.make([F(2)], [(PMult(0),), (PMult(1),), (ZERO,)])
    assert s.rects == ((ZERO,), (PMult(0),))
