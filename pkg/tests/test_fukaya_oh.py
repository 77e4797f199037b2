"""Affine Lagrangian sections: intersections, gradings, the triangle
product, associativity, and the degree certificate for higher products."""

from fractions import Fraction

import pytest

from torusmirror.fukaya_oh import (
    AffineLagrangian,
    associativity_defect,
    intersections,
    m1_vanishes,
    m2,
    mk_vanishing_certificate,
    transversal,
)


def line(slope, shift=0, holonomy=1):
    return AffineLagrangian(
        ((Fraction(slope),),), (Fraction(shift),), (Fraction(holonomy),)
    )


def test_lagrangian_validation():
    with pytest.raises(ValueError):
        AffineLagrangian(((0, 1), (2, 0)), (0, 0))  # non-symmetric
    with pytest.raises(ValueError):
        AffineLagrangian(((Fraction(1, 2),),), (0,))  # non-integral slope
    with pytest.raises(ValueError):
        AffineLagrangian(((1,),), (0,), (0,))  # zero holonomy


def test_intersection_count_is_slope_determinant():
    assert len(intersections(line(0), line(3))) == 3
    l0 = AffineLagrangian(((0, 0), (0, 0)), (0, 0))
    l1 = AffineLagrangian(((2, 1), (1, 3)), (Fraction(1, 2), 0))
    pts = intersections(l0, l1)
    assert len(pts) == 5  # det [[2,1],[1,3]]
    for p in pts:
        assert all(0 <= c < 1 for c in p.position)
        assert p.degree == 0
    assert len({p.coset for p in pts}) == 5


def test_grading_counts_negative_eigenvalues():
    assert all(p.degree == 0 for p in intersections(line(0), line(2)))
    assert all(p.degree == 1 for p in intersections(line(2), line(0)))
    assert m1_vanishes(line(0), line(2))


def test_non_transversal_pairs_are_rejected():
    assert not transversal([line(1), line(1)])
    with pytest.raises(ValueError):
        intersections(line(1), line(1))
    with pytest.raises(ValueError):
        m2(line(0), line(0), line(1), None, None, 10)


def test_m2_unit_triangle_has_weight_zero_term():
    l0, l1, l2 = line(0), line(1), line(2)
    (x0,) = intersections(l0, l1)
    (x1,) = intersections(l1, l2)
    out = m2(l0, l1, l2, x0, x1, Fraction(10))
    assert len(out) == 2  # the pair (l0, l2) has two intersection points
    by_coset = {tgt.coset: val for tgt, val in out.items()}
    # the three lifts coincide at y = 0: one triangle of area zero in the
    # trivial coset, and every other configuration has positive weight
    assert by_coset[(0,)].coeff(0) == 1
    for val in out.values():
        assert all(lam >= 0 for lam, _ in val.terms)


def test_m2_weights_respect_cutoff_and_grading():
    l0, l1, l2 = line(0, shift=Fraction(1, 3)), line(1), line(3)
    cut = Fraction(8)
    for x0 in intersections(l0, l1):
        for x1 in intersections(l1, l2):
            out = m2(l0, l1, l2, x0, x1, cut)
            for tgt, val in out.items():
                assert tgt.degree == x0.degree + x1.degree
                assert val.cutoff == cut
                assert all(0 <= lam < cut for lam, _ in val.terms)


def test_m2_refuses_non_convex_ordering_with_matching_degrees():
    l0 = AffineLagrangian(((0, 0), (0, 0)), (0, 0))
    l1 = AffineLagrangian(((1, 0), (0, 1)), (0, 0))
    l2 = AffineLagrangian(((2, 0), (0, -1)), (0, 0))
    (x0,) = [p for p in intersections(l0, l1)]
    x1 = intersections(l1, l2)[0]
    assert x0.degree == 0 and x1.degree == 1
    with pytest.raises(ValueError, match="convex-ordered"):
        m2(l0, l1, l2, x0, x1, 5)


def test_holonomy_weights_triangles_by_integer_windings():
    """A holonomy u on the middle object replaces the count of each weight
    class by sum u^{k_i} over the boundary windings k_i; u and 1/u give
    conjugate results, and their sum dominates twice the plain count."""
    l0, l1, l2 = line(0), line(1), line(2)
    (x0,) = intersections(l0, l1)
    (x1,) = intersections(l1, l2)

    def table(holonomy):
        out = m2(l0, line(1, holonomy=holonomy), l2, x0, x1, Fraction(6))
        return {tgt.coset: val for tgt, val in out.items()}

    plain, up, down = table(1), table(2), table(Fraction(1, 2))
    for coset, val in plain.items():
        assert [l for l, _ in up[coset].terms] == [l for l, _ in val.terms]
        for (lam, c), (_, cu), (_, cd) in zip(
            val.terms, up[coset].terms, down[coset].terms
        ):
            # sum of u^k + u^{-k} over the triangles of this weight class
            assert cu + cd >= 2 * c
            if lam == 0:
                assert cu == cd == c == 1  # the zero triangle has no winding


def test_associativity_holds_below_cutoff():
    ls = [line(s) for s in (0, 1, 2, 3)]
    assert associativity_defect(*ls, Fraction(8)) == {}
    ls_shift = [line(s, shift=b) for s, b in zip((0, 1, 3, 4), (0, Fraction(1, 2), 0, 0))]
    assert associativity_defect(*ls_shift, Fraction(8)) == {}


def test_vanishing_certificate():
    ls = [line(s) for s in (0, 1, 2, 3)]
    cert = mk_vanishing_certificate(ls, 3)
    assert cert.certified
    assert set(cert.generator_degrees) == {0}

    bad = [line(s) for s in (0, 2, 1, 3)]
    assert not mk_vanishing_certificate(bad, 3).certified

    with pytest.raises(ValueError):
        mk_vanishing_certificate(ls, 2)
    with pytest.raises(ValueError):
        mk_vanishing_certificate([line(0), line(0)], 3)
