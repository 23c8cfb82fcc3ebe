from __future__ import annotations

import pytest
from hypothesis import given, settings, strategies as st

from selfsquare.algebra import (
    CANTOR,
    O,
    Z,
    Spectrum,
    as_expr,
    check_r4_hypotheses,
    decide_homeo,
    family_generate,
    invariants,
    nf_product,
    normalize,
    normalize_with_trace,
    replay_certificate,
)
from selfsquare.epset import EPSet
from selfsquare.expr import Atom, SpaceExpr
from selfsquare.ordinal import ScatteredForm


def test_countable_merge():
    nf, trace = normalize_with_trace("Fin(2)*O(1)*O(1)")
    assert nf.countable == ScatteredForm.of(2, 2)
    assert [t["rule"] for t in trace] == ["R1"]


def test_square_collapse_applied_twice():
    nf = normalize("X{;2+2k}*X{;2+2k}*X{;2+2k}")
    assert nf.x == (EPSet.from_parts([], [(2, 2)]),) and not nf.z


def test_cantor_absorbs():
    nf, trace = normalize_with_trace("Cantor*Z(5)*O(3)")
    assert nf == CANTOR
    assert trace[0]["rule"] == "R3"


def test_z1_power_needs_hypotheses():
    nf, trace = normalize_with_trace("Z(1)*Z(1)*Z(1)")
    assert nf == Z(1)
    assert trace[0]["rule"] == "R4" and trace[0]["hypotheses"]
    with pytest.raises(ValueError):
        check_r4_hypotheses([1, 2])


def test_invariant_examples():
    assert invariants("Z(3)").to_json() == {
        "cardinality": "continuum", "countableForm": None, "isoRankSpectrum": "{0,1,2}", "openZ": "{3}",
    }
    assert invariants("O(2)").to_json()["countableForm"] == "O(2)"
    assert invariants("O(2)").to_json()["isoRankSpectrum"] == "{0,1,2}"
    inv = invariants("Fin(4)").to_json()
    assert inv["cardinality"] == "finite(4)" and inv["isoRankSpectrum"] == "{0}"


def test_spectrum_sumset():
    a, b = Spectrum.upto(1), Spectrum.upto(2)
    assert a.sumset(b) == Spectrum.upto(3)
    assert 7 in Spectrum.everything()
    assert Spectrum().sumset(a).is_empty()


def test_decide_examples():
    assert decide_homeo("X{;2+2k}*X{;2+2k}", "X{;2+2k}").kind == "Homeo"
    v = decide_homeo("X{;2+2k}", "X{;1+2k}")
    assert v.kind == "NotHomeo"
    assert v.certificate["invariant"] == "openZ" and v.certificate["witness"] == 2
    assert decide_homeo("O(1)*O(1)", "O(2)").kind == "Homeo"
    v = decide_homeo("Z(2)*Z(2)", "Z(2)")
    assert v.kind == "NotHomeo" and v.certificate["invariant"] == "isoRankSpectrum"
    assert decide_homeo("Z(2)*Z(3)", "Z(4)").kind == "Unknown"


def test_certificates_replay():
    v = decide_homeo("Z(2)*Z(2)", "Z(2)")
    assert replay_certificate("Z(2)*Z(2)", "Z(2)", v.certificate)
    assert not replay_certificate("Z(2)", "Z(2)", v.certificate)


def test_family_small():
    sets, certs = family_generate(2)
    assert [str(m) for m in sets] == ["{1;2+2k}", "{2,3;4+2k}"]
    assert certs == [{"i": 0, "j": 1, "invariant": "openZ", "witness": 1, "values": ["{1;2+2k}", "{2,3;4+2k}"]}]
    with pytest.raises(ValueError):
        family_generate(1)


def test_family_eight():
    sets, certs = family_generate(8)
    assert len(set(sets)) == 8 and len(certs) == 28


atoms = st.one_of(
    st.integers(1, 3).map(lambda k: Atom("Fin", k)),
    st.integers(1, 3).map(lambda n: Atom("O", n)),
    st.integers(1, 3).map(lambda n: Atom("Z", n)),
    st.sampled_from([EPSet.from_parts([], [(2, 2)]), EPSet.from_parts([1], [(3, 3)])]).map(lambda m: Atom("X", m)),
)


@settings(max_examples=150, deadline=None)
@given(st.lists(atoms, min_size=1, max_size=5), st.randoms(use_true_random=False))
def test_normal_form_ignores_factor_order(factors, rnd):
    shuffled = list(factors)
    rnd.shuffle(shuffled)
    assert normalize(SpaceExpr(tuple(factors))) == normalize(SpaceExpr(tuple(shuffled)))


@settings(max_examples=150, deadline=None)
@given(st.lists(atoms, min_size=1, max_size=4), st.lists(atoms, min_size=1, max_size=4))
def test_rewriting_is_confluent(left, right):
    # normalizing the parts first and then the whole gives the same result
    whole = normalize(SpaceExpr(tuple(left + right)))
    assert nf_product(normalize(SpaceExpr(tuple(left))), normalize(SpaceExpr(tuple(right)))) == whole
    assert normalize(as_expr(whole)) == whole


@settings(max_examples=100, deadline=None)
@given(st.lists(atoms, min_size=1, max_size=3), st.lists(atoms, min_size=1, max_size=3))
def test_verdicts_are_sound_and_symmetric(left, right):
    a, b = SpaceExpr(tuple(left)), SpaceExpr(tuple(right))
    v, w = decide_homeo(a, b), decide_homeo(b, a)
    assert v.kind == w.kind
    if v.kind == "NotHomeo":
        assert replay_certificate(a, b, v.certificate)
    if v.kind == "Homeo":
        assert invariants(a) == invariants(b)


def test_reference_forms():
    assert O(2).countable == ScatteredForm.of(2)
    assert nf_product(Z(1), Z(1)) == Z(1)
