"""Planar tree enumeration against independent counting oracles."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from torusmirror.trees import LEAF, PlanarTree, enumerate_binary, enumerate_trees, subdivide


def catalan_oracle(n_max):
    """Binary planar trees with n leaves, via the Segner convolution
    t(n) = sum_{i=1}^{n-1} t(i) t(n-i), t(1) = 1."""
    t = {1: 1}
    for n in range(2, n_max + 1):
        t[n] = sum(t[i] * t[n - i] for i in range(1, n))
    return t


def schroeder_oracle(n_max):
    """Planar trees with all valencies >= 2 and n leaves, via the linear
    recurrence (n+1) a(n+1) = 3(2n-1) a(n) - (n-2) a(n-1), a(1) = a(2) = 1."""
    a = {1: 1, 2: 1}
    for n in range(2, n_max):
        num = 3 * (2 * n - 1) * a[n] - (n - 2) * a[n - 1]
        assert num % (n + 1) == 0
        a[n + 1] = num // (n + 1)
    return a


def test_counts_match_oracles_up_to_seven_leaves():
    cat = catalan_oracle(7)
    sch = schroeder_oracle(7)
    for n in range(1, 8):
        assert len(enumerate_binary(n)) == cat[n]
        assert len(enumerate_trees(n)) == sch[n]


def test_known_prefixes():
    assert [len(enumerate_trees(n)) for n in range(1, 7)] == [1, 1, 3, 11, 45, 197]
    assert [len(enumerate_binary(n)) for n in range(1, 7)] == [1, 1, 2, 5, 14, 42]


@pytest.mark.parametrize("n", range(1, 7))
def test_enumeration_is_duplicate_free_with_correct_leaf_counts(n):
    trees = enumerate_trees(n)
    assert len({t.to_text() for t in trees}) == len(trees)
    assert all(t.leaf_count() == n for t in trees)
    binaries = enumerate_binary(n)
    assert all(t.is_binary() for t in binaries)
    assert set(map(PlanarTree.to_text, binaries)) <= set(map(PlanarTree.to_text, trees))


@pytest.mark.parametrize("n", range(1, 7))
def test_min_valency_filter(n):
    wide = enumerate_trees(n, 3)
    assert all(
        all(len(v.children) >= 3 for v in t.internal_vertices()) for t in wide
    )
    assert set(map(PlanarTree.to_text, wide)) <= set(
        map(PlanarTree.to_text, enumerate_trees(n))
    )


def test_degenerate_inputs():
    with pytest.raises(ValueError):
        enumerate_binary(0)
    with pytest.raises(ValueError):
        PlanarTree((LEAF,))  # unary vertices are not allowed


trees_strategy = st.recursive(
    st.just(LEAF),
    lambda kids: st.lists(kids, min_size=2, max_size=4).map(
        lambda cs: PlanarTree(tuple(cs))
    ),
    max_leaves=12,
)


@given(trees_strategy)
def test_text_roundtrip(t):
    assert PlanarTree.from_text(t.to_text()) == t


@given(trees_strategy)
def test_internal_edge_count_is_internal_vertices_minus_one(t):
    internal = sum(1 for _ in t.internal_vertices())
    if internal:
        assert t.internal_edge_count() == internal - 1
    else:
        assert t.internal_edge_count() == 0


def test_parse_rejects_garbage():
    for bad in ("", "(", "(.", "(..", "(..))", "x"):
        with pytest.raises(ValueError):
            PlanarTree.from_text(bad)


@given(trees_strategy)
def test_subdivide_marks_one_midpoint_per_internal_edge(t):
    _, mids = subdivide(t)
    assert len(mids) == t.internal_edge_count()
    assert all(not p.is_leaf and not c.is_leaf for p, c in mids)
