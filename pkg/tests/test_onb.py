import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from basin_rkhs.dynamics import sample_basin
from basin_rkhs.onb import (
    CUNTZ_DEFECT_THRESHOLD,
    ONB_DEFECT_THRESHOLD,
    Word,
    apply_operator,
    build_basis,
    canonical_words,
    cuntz_isometry_check,
    dagger_applicability,
    display,
    one,
    orthonormality_check,
    word_evaluator,
    word_for_index,
)
from basin_rkhs.polynomial import evaluate

EXPECTED_8 = ["1", "z", "R(z)", "zR(z)", "R^∘2(z)", "zR^∘2(z)", "R(z)R^∘2(z)", "zR(z)R^∘2(z)"]


def test_operators_on_constant(r13):
    z = np.array([0.1 + 0.2j, -0.3j])
    s1 = apply_operator(r13, 1, one)
    s2 = apply_operator(r13, 2, one)
    np.testing.assert_array_equal(s1(z), np.ones(2))
    np.testing.assert_array_equal(s2(z), z)
    np.testing.assert_allclose(apply_operator(r13, 1, s2)(z), evaluate(r13, z))
    with pytest.raises(ValueError):
        apply_operator(r13, 3, one)


def test_display_strings(r13):
    assert [b.closed_form for b in build_basis(r13, 4)] == EXPECTED_8[:4]
    assert [b.closed_form for b in build_basis(r13, 8)] == EXPECTED_8
    assert display(Word.parse("1112")) == "R^∘3(z)"


def test_word_order_and_index(r13):
    words = [str(w) for w, _ in zip(canonical_words(), range(8))]
    assert words == ["", "2", "12", "22", "112", "212", "122", "222"]
    for k, w in zip(range(64), canonical_words()):
        assert word_for_index(k) == w
    assert build_basis(r13, 4)[3](np.array([0j]))[0] == 0


def test_degrees(r13):
    assert [b.degree for b in build_basis(r13, 8)] == [0, 1, 4, 5, 16, 17, 20, 21]


@given(st.lists(st.sampled_from([1, 2]), max_size=6), st.integers(0, 4))
def test_trailing_ones_collapse(letters, pad):
    from basin_rkhs.presets import example_13

    p = example_13()
    w = Word(tuple(letters) + (1,) * pad)
    z = np.array([0.1 - 0.05j, 0.2j])
    np.testing.assert_allclose(word_evaluator(p, w)(z), word_evaluator(p, w.canonicalize())(z), rtol=1e-13)
    assert w.canonicalize().canonical


def test_operator_chain_matches_product_form(r13):
    z = np.array(sample_basin(r13, 20, seed=4))
    for b in build_basis(r13, 16):
        np.testing.assert_allclose(b(z), b.product_form(r13, z), rtol=1e-12, atol=1e-15)


def test_bad_words():
    with pytest.raises(ValueError):
        Word((0, 2))
    with pytest.raises(ValueError):
        word_for_index(-1)


def test_defect_shrinks_with_samples(engine13):
    basis = build_basis(engine13.polynomial, 8)
    app = (True, "given")
    d = [orthonormality_check(engine13, basis, s, applicability=app).defect for s in (100, 200, 400)]
    assert d[2] <= d[0]
    assert d[2] < ONB_DEFECT_THRESHOLD


def test_constant_alone(engine13):
    rep = orthonormality_check(engine13, build_basis(engine13.polynomial, 1), 100, applicability=(True, ""))
    assert rep.defect < 1e-6 and rep.verdict == "consistent"


def test_quartic_is_consistent(engine13):
    basis = build_basis(engine13.polynomial, 8)
    rep = orthonormality_check(engine13, basis)
    doc = rep.to_json(basis)
    assert doc["verdict"] == "consistent" and doc["dagger_conditions_met"]
    assert [b["display"] for b in doc["basis"]] == EXPECTED_8


def test_cubic_is_not_applicable(engine14, q14):
    ok, note = dagger_applicability(q14)
    assert not ok and note
    rep = orthonormality_check(engine14, build_basis(q14, 4), 100)
    assert rep.verdict == "not-applicable"


def test_isometry_relations(engine13):
    rep = cuntz_isometry_check(engine13, [(0j, 0j)])
    assert rep.max_deviation < CUNTZ_DEFECT_THRESHOLD
    pts = sample_basin(engine13.polynomial, 6, seed=13)
    rep = cuntz_isometry_check(engine13, list(zip(pts[:3], pts[3:])))
    assert rep.max_deviation < CUNTZ_DEFECT_THRESHOLD
    assert rep.functional_residual < 1e-8
    assert set(rep.to_json()["by_relation"]) == {"S1*S1", "S1*S2", "S2*S1", "S2*S2"}
