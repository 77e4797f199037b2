"""Discrete Legendre duality: exactness on quadratics, the closed-form
quartic conjugate, involution and Hessian-duality errors, and input
validation."""

from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torusmirror.monge import (
    ConvexGridFunction,
    DomainMismatchError,
    GradientRangeError,
    hessian_determinants,
    hessian_duality_check,
    involution_error,
    legendre,
    ma_residual,
    validate_affine_chart,
)

H = Fraction(1, 32)


def quadratic(a):
    a = float(a)
    return ConvexGridFunction.sample(lambda x: 0.5 * a * x * x, [(-1, 1)], H)


# -- construction --------------------------------------------------------------


def test_grid_shape_and_convexity_are_validated():
    with pytest.raises(ValueError, match="not convex"):
        ConvexGridFunction.sample(lambda x: -x * x, [(-1, 1)], H)
    with pytest.raises(ValueError, match="shape"):
        ConvexGridFunction([(-1, 1)], H, np.zeros(5))
    with pytest.raises(ValueError, match="multiple"):
        ConvexGridFunction.sample(lambda x: x * x, [(0, Fraction(1, 3))], H)
    K = quadratic(2)
    assert K.convexity_margin == pytest.approx(2.0, abs=1e-9)


def test_dual_box_outside_gradient_range_is_rejected():
    K = quadratic(1)  # gradients in about [-1, 1]
    with pytest.raises(GradientRangeError):
        legendre(K, [(-3, 3)], H)
    with pytest.raises(DomainMismatchError):
        legendre(K, [(-1, 1), (-1, 1)], H)


# -- exact families --------------------------------------------------------------


@pytest.mark.parametrize("a", [Fraction(1), Fraction(2), Fraction(1, 2)])
def test_quadratic_conjugate_is_quadratic(a):
    """(a x^2 / 2)^ = y^2 / (2a), recovered to rounding error."""
    K = quadratic(a)
    dual_box = [(-a / 2, a / 2)]
    dual = legendre(K, dual_box, H)
    ys = np.array([float(y) for y in dual.axis_nodes(0)])
    assert np.max(np.abs(dual.values - ys * ys / (2 * float(a)))) < 1e-12
    assert involution_error(K, dual_box, H) < 1e-12
    assert ma_residual(K) < 1e-12
    assert ma_residual(dual) < 1e-10


def test_quadratic_2d_duality_identities():
    K = ConvexGridFunction.sample(
        lambda x, y: x * x + 0.25 * y * y, [(-1, 1), (-1, 1)], Fraction(1, 16)
    )
    dual_box = [(-1, 1), (Fraction(-1, 4), Fraction(1, 4))]
    assert involution_error(K, dual_box, Fraction(1, 16)) < 1e-12
    dual = legendre(K, dual_box, Fraction(1, 16))
    assert ma_residual(dual) < 1e-10
    rep = hessian_duality_check(K, dual_box, Fraction(1, 16))
    assert rep.matched_points > 0
    assert rep.max_det_error < 1e-9
    assert rep.max_metric_error < 1e-8


def test_quartic_conjugate_matches_closed_form():
    """(x^4 / 4)^ = (3/4) y^{4/3} on a domain away from the origin."""
    K = ConvexGridFunction.sample(
        lambda x: 0.25 * x**4, [(Fraction(1, 2), 1)], Fraction(1, 64)
    )
    dual = legendre(K, [(Fraction(1, 4), Fraction(3, 4))], Fraction(1, 64))
    ys = np.array([float(y) for y in dual.axis_nodes(0)])
    assert np.max(np.abs(dual.values - 0.75 * ys ** (4.0 / 3.0))) < 1e-10


def test_quartic_is_a_negative_control_for_ma():
    K = ConvexGridFunction.sample(
        lambda x: 0.25 * x**4, [(Fraction(1, 2), 1)], Fraction(1, 32)
    )
    assert ma_residual(K) > 1.0  # det Hess = 3 x^2 is far from constant


# -- convergence under refinement ----------------------------------------------


def test_quartic_duality_errors_shrink_at_second_order():
    box = [(Fraction(1, 2), 1)]
    dual_box = [(Fraction(1, 4), Fraction(3, 4))]
    errs = []
    for h in (Fraction(1, 16), Fraction(1, 32), Fraction(1, 64)):
        K = ConvexGridFunction.sample(lambda x: 0.25 * x**4, box, h)
        rep = hessian_duality_check(K, dual_box, h, margin=0.1)
        errs.append((involution_error(K, dual_box, h), rep.max_det_error))
    for e_coarse, e_fine in zip(errs, errs[1:]):
        assert e_fine[0] < e_coarse[0] and e_fine[1] < e_coarse[1]
    order_det = float(np.log2(errs[0][1] / errs[2][1]) / 2)
    assert order_det >= 1.8


# -- order reversal --------------------------------------------------------------


@settings(max_examples=25)
@given(st.floats(min_value=0.5, max_value=2.0), st.floats(min_value=0.0, max_value=0.5))
def test_conjugation_reverses_pointwise_order(a, bump):
    """K <= L implies Khat >= Lhat."""
    K = quadratic(a)
    L = ConvexGridFunction(
        K.box, K.h, K.values + bump + 0.1 * np.array(
            [float(x) ** 2 for x in K.axis_nodes(0)]
        )
    )
    dual_box = [(Fraction(-1, 4), Fraction(1, 4))]
    Kd = legendre(K, dual_box, H)
    Ld = legendre(L, dual_box, H)
    assert np.all(Kd.values >= Ld.values - 1e-12)


# -- affine chart metadata -------------------------------------------------------


def test_validate_affine_chart():
    assert validate_affine_chart([[1, 1], [0, 1]], [Fraction(1, 2), 0])
    assert not validate_affine_chart([[2, 0], [0, 1]], [0, 0])  # det 2
    assert not validate_affine_chart([[1, 0], [0, -1]], [0, 0])  # det -1
    assert not validate_affine_chart([[1, Fraction(1, 2)], [0, 1]], [0, 0])
    assert not validate_affine_chart([[1, 0]], [0])  # not square (1x2 row)


def test_hessian_determinants_shape():
    K = quadratic(1)
    dets = hessian_determinants(K)
    assert dets.shape == (len(K.axis_nodes(0)) - 2,)
    assert np.allclose(dets, 1.0)
