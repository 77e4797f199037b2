"""Homotopy transfer: retraction validation, transferred structure
relations, the comparison morphism, and the tree-sum cross-check."""

import json
import random

import pytest

from torusmirror.ainfty import (
    AInftyStructure,
    GradedBasis,
    MultilinearOp,
    morphism_defect,
    relation_defect,
)
from torusmirror.randomgen import random_dg_algebra, retraction_onto_cohomology
from torusmirror.transfer import (
    RetractionData,
    transfer_morphism,
    transfer_structure,
    transfer_structure_by_trees,
    tree_term,
    validate,
)
from torusmirror.trees import enumerate_trees


@pytest.fixture(scope="module")
def corpus():
    rng = random.Random(20240901)
    out = []
    for _ in range(8):
        A = random_dg_algebra(rng)
        out.append(retraction_onto_cohomology(A, rng))
    return out


def test_generated_retractions_validate(corpus):
    for r in corpus:
        rep = validate(r)
        assert rep.ok, rep.failures[:3]


def test_transferred_structures_satisfy_relations(corpus):
    for r in corpus:
        B = transfer_structure(r, max_arity=4)
        for n in range(1, 5):
            assert relation_defect(B, n).is_zero()


def test_transfer_morphism_satisfies_morphism_equations(corpus):
    for r in corpus:
        F = transfer_morphism(r, max_arity=3)
        for n in range(1, 4):
            assert morphism_defect(F, n).is_zero()


def test_branch_recursion_matches_tree_sum(corpus):
    for r in corpus[:4]:
        B1 = transfer_structure(r, max_arity=4)
        B2 = transfer_structure_by_trees(r, max_arity=4)
        for n in range(1, 5):
            assert (B1.m(n) - B2.m(n)).is_zero()


def test_single_tree_terms_sum_to_ternary_product(corpus):
    """The arity-3 product is the signed sum of the three planar trees with
    three leaves, expanded one tree at a time."""
    r = corpus[0]
    total = {}
    for t in enumerate_trees(3, 2):
        for ins, row in tree_term(r, t).items():
            dst = total.setdefault(ins, {})
            for o, c in row.items():
                dst[o] = dst.get(o, 0) + c
    st = transfer_structure(r, max_arity=3)
    from torusmirror.transfer import _unsuspend_table

    expected = _unsuspend_table(total, r.sub_basis.degrees)
    got = st.m(3).entries
    cleaned = {
        ins: {o: c for o, c in row.items() if c != 0}
        for ins, row in expected.items()
    }
    cleaned = {ins: row for ins, row in cleaned.items() if row}
    assert cleaned == got


def test_invalid_retraction_is_rejected():
    basis = GradedBasis((("x", 0), ("y", 1)))
    A = AInftyStructure(
        basis, {1: MultilinearOp(1, basis, basis, 1, {("x",): {"y": 1}})}
    )
    sub = GradedBasis(((("b",), 0),))
    bad = RetractionData(
        ambient=A,
        sub_basis=sub,
        include=MultilinearOp(1, sub, basis, 0, {(("b",),): {"x": 1}}),
        project=MultilinearOp(1, basis, sub, 0, {("x",): {("b",): 1}}),
        homotopy=MultilinearOp(1, basis, basis, -1, {}),
    )
    rep = validate(bad)
    assert not rep.ok  # x is not a cocycle, so 1 - ip != dH + Hd
    with pytest.raises(ValueError):
        transfer_structure(bad)


def test_contractible_complex_transfers_to_zero():
    basis = GradedBasis((("x", 0), ("y", 1)))
    d = MultilinearOp(1, basis, basis, 1, {("x",): {"y": 1}})
    A = AInftyStructure(basis, {1: d})
    r = retraction_onto_cohomology(A, random.Random(1))
    assert len(r.sub_basis) == 0
    B = transfer_structure(r, max_arity=3)
    assert all(B.m(n).is_zero() for n in range(1, 4))


def test_retraction_json_roundtrip(corpus):
    r = corpus[0]
    obj = json.loads(json.dumps(r.to_obj()))
    r2 = RetractionData.from_obj(obj)
    assert validate(r2).ok
    B1 = transfer_structure(r, max_arity=3)
    B2 = transfer_structure(r2, max_arity=3)
    for n in range(1, 4):
        assert (B1.m(n) - B2.m(n)).is_zero()
