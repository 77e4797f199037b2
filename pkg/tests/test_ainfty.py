"""Graded bases, multilinear operations, structure/morphism relations, and
the bar-construction cross-check."""

import json
import random

import pytest

from torusmirror.ainfty import (
    AInftyMorphismData,
    AInftyStructure,
    GradedBasis,
    MultilinearOp,
    assemble_sequence,
    bar_check,
    morphism_defect,
    pre_category_check,
    relation_defect,
    suspended_coefficient,
    zero_op,
)
from torusmirror.randomgen import corrupt_structure, random_dg_algebra


def exterior_algebra():
    """Exterior algebra on one generator of degree 1, with zero differential."""
    basis = GradedBasis(((("one",), 0), (("t",), 1)))
    mul = {
        (("one",), ("one",)): {("one",): 1},
        (("one",), ("t",)): {("t",): 1},
        (("t",), ("one",)): {("t",): 1},
    }
    return AInftyStructure(basis, {2: MultilinearOp(2, basis, basis, 0, mul)})


# -- bases and operations -----------------------------------------------------


def test_basis_rejects_duplicate_labels():
    with pytest.raises(ValueError):
        GradedBasis((("x", 0), ("x", 1)))


def test_op_enforces_degree_rule():
    basis = GradedBasis((("x", 0), ("y", 1)))
    with pytest.raises(ValueError):
        MultilinearOp(1, basis, basis, 1, {("y",): {"y": 1}})
    ok = MultilinearOp(1, basis, basis, 1, {("x",): {"y": 2}})
    assert ok(("x",)) == {"y": 2}
    assert ok(("y",)) == {}


def test_op_arithmetic_and_zero_cleanup():
    basis = GradedBasis((("x", 0), ("y", 1)))
    d = MultilinearOp(1, basis, basis, 1, {("x",): {"y": 3}})
    assert (d - d).is_zero()
    assert (d + d)(("x",)) == {"y": 6}
    assert d.scaled(0).is_zero()
    assert zero_op(2, basis, basis, 0).is_zero()
    assert list(d.reverse_index()["y"]) == [(("x",), 3)]


def test_structure_validates_arity_and_shift():
    basis = GradedBasis((("x", 0),))
    with pytest.raises(ValueError):
        AInftyStructure(basis, {2: MultilinearOp(1, basis, basis, 1, {})})


# -- structure relations ------------------------------------------------------


def test_associative_algebra_satisfies_relations():
    A = exterior_algebra()
    for n in range(1, 5):
        assert relation_defect(A, n).is_zero()
    assert bar_check(A, 3).ok


def test_corrupted_structure_fails_both_checks_at_the_same_arity():
    rng = random.Random(7)
    A = corrupt_structure(random_dg_algebra(rng), rng)
    rel_arity = next(
        (n for n in range(1, 4) if not relation_defect(A, n).is_zero()), None
    )
    bar = bar_check(A, 3)
    assert rel_arity is not None and not bar.ok
    bar_arity = min(int(f.split()[2].rstrip(":")) for f in bar.failures)
    assert rel_arity == bar_arity


@pytest.mark.parametrize("seed", range(6))
def test_relation_defect_and_bar_check_agree_on_valid_algebras(seed):
    A = random_dg_algebra(random.Random(seed))
    for n in range(1, 4):
        assert relation_defect(A, n).is_zero()
    assert bar_check(A, 3).ok


def test_suspension_sign_exponent():
    deg = {"a": 1, "b": 2, "c": 0}
    # sum_q (n - q)(deg_q - 1) with q = 1..n
    assert suspended_coefficient(("a", "b", "c"), deg) == 2 * 0 + 1 * 1 + 0 * (-1)
    assert suspended_coefficient(("a",), deg) == 0


# -- morphism relations -------------------------------------------------------


def test_identity_morphism_has_zero_defect():
    A = exterior_algebra()
    ident = MultilinearOp(
        1, A.basis, A.basis, 0, {(l,): {l: 1} for l in A.basis.labels}
    )
    F = AInftyMorphismData(source=A, target=A, components={1: ident})
    for n in range(1, 4):
        assert morphism_defect(F, n).is_zero()


def test_non_chain_map_has_nonzero_defect():
    basis = GradedBasis((("x", 0), ("y", 1)))
    d = MultilinearOp(1, basis, basis, 1, {("x",): {"y": 1}})
    A = AInftyStructure(basis, {1: d})
    B = AInftyStructure(basis, {})  # zero differential
    f1 = MultilinearOp(1, basis, basis, 0, {(l,): {l: 1} for l in basis.labels})
    F = AInftyMorphismData(source=A, target=B, components={1: f1})
    assert not morphism_defect(F, 1).is_zero()


# -- assembly and pre-category checks -----------------------------------------


def _circle_style_fixture():
    """Two-object hom spaces with a differential and a product, as produced
    by the Morse layer; small enough to assemble by hand."""
    hom = GradedBasis(((0, 0), (1, 1)))
    d = MultilinearOp(1, hom, hom, 1, {})
    m2 = MultilinearOp(2, hom, hom, 0, {(0, 0): {0: 1}})
    return hom, d, m2


def test_assemble_sequence_direct_sum_labels():
    hom, d, m2 = _circle_style_fixture()
    hom_spaces = {(a, b): hom for a in "XYZ" for b in "XYZ" if a < b}
    comps = {
        ("X", "Y"): d,
        ("Y", "Z"): d,
        ("X", "Z"): d,
        ("X", "Y", "Z"): m2,
    }
    A = assemble_sequence(("X", "Y", "Z"), hom_spaces, comps)
    assert len(A.basis) == 3 * len(hom)
    assert all(lab[0] < lab[1] for lab in A.basis.labels)
    # the product only acts on chained pairs
    out = A.m(2)(((0, 1, 0), (1, 2, 0)))
    assert out == {(0, 2, 0): 1}
    assert A.m(2)(((0, 1, 0), (0, 1, 0))) == {}


def test_pre_category_check_flags_missing_subsequence():
    hom, d, m2 = _circle_style_fixture()
    hom_spaces = {(a, b): hom for a in "XYZ" for b in "XYZ" if a < b}
    comps = {("X", "Y"): d, ("Y", "Z"): d, ("X", "Z"): d, ("X", "Y", "Z"): m2}
    rep = pre_category_check(
        "XYZ", [("X", "Y", "Z")], hom_spaces, comps
    )
    assert not rep.ok
    assert any("not transversal" in f for f in rep.failures)
    rep2 = pre_category_check(
        "XYZ",
        [("X", "Y", "Z"), ("X", "Y"), ("Y", "Z"), ("X", "Z")],
        hom_spaces,
        comps,
    )
    assert rep2.ok, rep2.failures


# -- serialization ------------------------------------------------------------


def test_structure_json_roundtrip_with_string_labels():
    basis = GradedBasis((("x", 0), ("y", 1)))
    A = AInftyStructure(
        basis, {1: MultilinearOp(1, basis, basis, 1, {("x",): {"y": 2}})}
    )
    obj = json.loads(json.dumps(A.to_obj()))
    B = AInftyStructure.from_obj(obj)
    assert B.basis.elements == A.basis.elements
    assert B.m(1).entries == A.m(1).entries
