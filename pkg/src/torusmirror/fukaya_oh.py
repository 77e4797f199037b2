"""Affine Lagrangian sections of the torus fibration over R^n/Z^n.

Objects are graphs of d f with f(y) = (1/2) y^T A y + b^T y, A an integral
symmetric matrix, equipped with a rank-one local system given by rational
holonomies around the n base circles.  The module computes intersection
points with their integer gradings, the transversality predicate, the
triangle product m2 by exact lattice summation over the universal cover,
and the degree certificate that forces all higher products to vanish for
convex-ordered sequences.

Conventions (fixed once, shared with the theta-function side):
  * intersection points of (L_i, L_j) are the solutions of
    (A_j - A_i) y = (b_i - b_j) + m with m in Z^n, indexed by the coset of
    m in Z^n / (A_j - A_i) Z^n;
  * the grading of every such point is the number of negative eigenvalues
    of A_j - A_i, so convex ordering (positive-definite slope increments)
    gives degree 0 throughout;
  * the m2 weight of the configuration (m, k) is the normalized triangle
    area W = (1/2)(y0^T a y0 + y1^T b y1 - y2^T g y2) where a, b, g are the
    slope increments, y0, y1, y2 the lifted corners (g y2 = a y0 + b y1).
    W >= 0 always, with W = 0 exactly when the three lifts coincide.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import floor
from typing import Dict, Optional, Sequence, Tuple

from .lattice import (
    Mat,
    Vec,
    coset_reduce,
    coset_representatives,
    dot,
    enumerate_below,
    hnf,
    inertia,
    is_positive_definite,
    is_symmetric,
    mat,
    mat_det,
    mat_inv,
    mat_mul,
    mat_sub,
    mat_vec,
    quad_form,
    vec,
    vec_sub,
)
from .novikov import NovikovElem


@dataclass(frozen=True)
class AffineLagrangian:
    """Section y -> A y + b of the torus fibration, with rank-one holonomy.

    holonomy[d] is the (nonzero rational) monodromy of the local system
    around the d-th base circle; the scalar-u description lifts to the
    diagonal tuple (u, ..., u).
    """

    slope: Mat
    shift: Vec
    holonomy: Tuple[Fraction, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "slope", mat(self.slope))
        object.__setattr__(self, "shift", vec(self.shift))
        n = len(self.slope)
        if len(self.shift) != n:
            raise ValueError("shift dimension mismatch")
        if not is_symmetric(self.slope):
            raise ValueError("slope matrix must be symmetric")
        if any(e.denominator != 1 for row in self.slope for e in row):
            raise ValueError("slope matrix must be integral")
        hol = self.holonomy if self.holonomy else (Fraction(1),) * n
        hol = tuple(Fraction(u) for u in hol)
        if len(hol) != n or any(u == 0 for u in hol):
            raise ValueError("holonomy must be n nonzero rationals")
        object.__setattr__(self, "holonomy", hol)

    @property
    def n(self) -> int:
        return len(self.slope)

    def potential(self, y: Vec) -> Fraction:
        return Fraction(1, 2) * quad_form(self.slope, y) + dot(self.shift, y)


@dataclass(frozen=True)
class IntersectionPoint:
    """A transversal intersection of an ordered pair (L_i, L_j)."""

    coset: Tuple[int, ...]  # canonical representative of m in Z^n/(A_j-A_i)Z^n
    position: Vec  # base point y, entries normalized to [0, 1)
    degree: int


def _increment(li: AffineLagrangian, lj: AffineLagrangian) -> Mat:
    return mat_sub(lj.slope, li.slope)


def transversal(seq: Sequence[AffineLagrangian]) -> bool:
    """True iff every pairwise slope difference is nonsingular."""
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if mat_det(_increment(seq[i], seq[j])) == 0:
                return False
    return True


def intersections(li: AffineLagrangian, lj: AffineLagrangian) -> list:
    """All intersection points of the ordered pair, |det(A_j - A_i)| of them."""
    alpha = _increment(li, lj)
    det = mat_det(alpha)
    if det == 0:
        raise ValueError("non-transversal pair")
    delta = vec_sub(li.shift, lj.shift)
    alpha_inv = mat_inv(alpha)
    degree = inertia(alpha)[0]
    points = []
    for m in coset_representatives(alpha):
        y = mat_vec(alpha_inv, vec_sub(vec(m), vec(-d for d in delta)))
        y = tuple(c - floor(c) for c in y)
        points.append(IntersectionPoint(coset=m, position=y, degree=degree))
    assert len(points) == abs(det)
    return points


def m1_vanishes(li: AffineLagrangian, lj: AffineLagrangian) -> bool:
    """The differential vanishes on every transversal pair in this class.

    All intersection points of a pair carry the same degree (the inertia of
    the slope increment), so no degree-difference-one pairs exist.
    """
    degs = {p.degree for p in intersections(li, lj)}
    return len(degs) == 1


def _lift(alpha_inv: Mat, center: Vec, m: Vec) -> Vec:
    return mat_vec(alpha_inv, vec_sub(m, center))


def _holonomy_factor(
    lagrangians: Sequence[AffineLagrangian], y0: Vec, y1: Vec, y2: Vec
) -> Fraction:
    """Local-system contribution of the triangle boundary arcs.

    The arc on L_0 runs from the lift y2 to y0, on L_1 from y0 to y1, and on
    L_2 from y1 to y2; each contributes the holonomy raised to the integer
    winding numbers read off from componentwise floors of the lifts.
    """
    l0, l1, l2 = lagrangians
    factor = Fraction(1)
    for d in range(l0.n):
        f0, f1, f2 = floor(y0[d]), floor(y1[d]), floor(y2[d])
        factor *= l0.holonomy[d] ** (f0 - f2)
        factor *= l1.holonomy[d] ** (f1 - f0)
        factor *= l2.holonomy[d] ** (f2 - f1)
    return factor


def m2(
    l0: AffineLagrangian,
    l1: AffineLagrangian,
    l2: AffineLagrangian,
    x0: IntersectionPoint,
    x1: IntersectionPoint,
    cutoff,
) -> Dict[IntersectionPoint, NovikovElem]:
    """Triangle product on (x0, x1), as a map to Hom(L_0, L_2) over C_eps.

    The output assigns a truncated Novikov element to every intersection
    point of (L_0, L_2) whose degree equals deg x0 + deg x1; other degrees
    are excluded by the grading and the map is zero there.  Configurations
    are enumerated in the universal cover: the lift of x0 is fixed and the
    lift of x1 ranges over its full coset, which exhausts the deck orbits
    exactly once.  Termination: the weight is a positive-definite quadratic
    in the lattice translate.
    """
    cutoff = Fraction(cutoff)
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    if not transversal([l0, l1, l2]):
        raise ValueError("non-transversal triple")
    alpha, beta, gamma = _increment(l0, l1), _increment(l1, l2), _increment(l0, l2)
    targets = [p for p in intersections(l0, l2) if p.degree == x0.degree + x1.degree]
    if not targets:
        return {}
    if not (is_positive_definite(alpha) and is_positive_definite(beta)):
        raise ValueError(
            "m2 enumeration is implemented for convex-ordered triples "
            "(positive-definite slope increments) only"
        )
    ainv, binv, ginv = mat_inv(alpha), mat_inv(beta), mat_inv(gamma)
    c01 = vec_sub(l1.shift, l0.shift)
    c12 = vec_sub(l2.shift, l1.shift)
    c02 = vec_sub(l2.shift, l0.shift)
    gamma_h = hnf(gamma)
    by_coset = {p.coset: p for p in targets}
    result: Dict[IntersectionPoint, NovikovElem] = {
        p: NovikovElem.zero(cutoff) for p in targets
    }

    m = vec_sub(vec(x0.coset), c01)  # = alpha * y0, fixed lift of x0
    k0 = vec_sub(vec(x1.coset), c12)  # base lift of x1; translates k0 + beta*t

    # W(t) = Q(m, k0 + beta t) with Q(x, y) = (1/2)(x^T a^{-1} x + y^T b^{-1} y
    #        - (x+y)^T g^{-1} (x+y)); expand to (1/2) t^T M t + v^T t + c.
    bg = mat_sub(binv, ginv)
    mq = mat_mul(beta, mat_mul(bg, beta))
    vq = vec_sub(mat_vec(mat_mul(beta, bg), k0), mat_vec(mat_mul(beta, ginv), m))
    sk = vec(a + b for a, b in zip(m, k0))
    cq = (
        Fraction(1, 2) * quad_form(ainv, m)
        + Fraction(1, 2) * quad_form(binv, k0)
        - Fraction(1, 2) * quad_form(ginv, sk)
    )

    y0 = mat_vec(ainv, m)
    for t in enumerate_below(mq, vq, cq, cutoff):
        k = vec(a + b for a, b in zip(k0, mat_vec(beta, vec(t))))
        s = vec(a + b for a, b in zip(m, k))
        weight = (
            Fraction(1, 2) * quad_form(ainv, m)
            + Fraction(1, 2) * quad_form(binv, k)
            - Fraction(1, 2) * quad_form(ginv, s)
        )
        assert weight >= 0
        key = coset_reduce(gamma_h, [int(a + b) for a, b in zip(s, c02)])
        target = by_coset.get(key)
        if target is None:
            continue
        y1 = mat_vec(binv, k)
        y2 = mat_vec(ginv, s)
        hol = _holonomy_factor((l0, l1, l2), y0, y1, y2)
        result[target] = result[target] + NovikovElem.q_power(weight, hol, cutoff)
    return result


def associativity_defect(
    l0: AffineLagrangian,
    l1: AffineLagrangian,
    l2: AffineLagrangian,
    l3: AffineLagrangian,
    cutoff,
) -> Dict:
    """Nonzero entries of m2(m2(x0, x1), x2) - m2(x0, m2(x1, x2)), truncated.

    Both composites are complete below the cutoff because every triangle
    weight is nonnegative, so each side is compared after truncation there.
    Returns {} iff the product is associative up to the cutoff (which the
    vanishing of m3 predicts for convex-ordered quadruples).
    """
    cutoff = Fraction(cutoff)
    defects: Dict = {}
    i01 = intersections(l0, l1)
    i12 = intersections(l1, l2)
    i23 = intersections(l2, l3)
    m2_012 = {(a.coset, b.coset): m2(l0, l1, l2, a, b, cutoff) for a in i01 for b in i12}
    m2_123 = {(b.coset, c.coset): m2(l1, l2, l3, b, c, cutoff) for b in i12 for c in i23}
    for x0 in i01:
        for x1 in i12:
            for x2 in i23:
                acc: Dict = {}
                for y, cy in m2_012[(x0.coset, x1.coset)].items():
                    for z, cz in m2(l0, l2, l3, y, x2, cutoff).items():
                        acc[z] = acc.get(z, NovikovElem.zero(cutoff)) + cy * cz
                for w, cw in m2_123[(x1.coset, x2.coset)].items():
                    for z, cz in m2(l0, l1, l3, x0, w, cutoff).items():
                        acc[z] = acc.get(z, NovikovElem.zero(cutoff)) - cz * cw
                row = {
                    z: d.truncate(cutoff)
                    for z, d in acc.items()
                    if not d.truncate(cutoff).is_zero()
                }
                if row:
                    defects[(x0.coset, x1.coset, x2.coset)] = row
    return defects


@dataclass(frozen=True)
class VanishingCertificate:
    certified: bool
    arity: int
    reason: str
    generator_degrees: Tuple[int, ...] = ()


def mk_vanishing_certificate(seq: Sequence[AffineLagrangian], k: int) -> VanishingCertificate:
    """Degree certificate that m_k = 0 for k >= 3 on a convex-ordered sequence.

    All consecutive slope increments must be positive definite; then every
    generator has degree 0 while the target degree 2 - k is negative, so
    every component of m_k is empty.  Non-convex orderings are refused:
    vanishing is not certifiable by this degree count and computing m_k
    there is out of scope.
    """
    if k < 3:
        raise ValueError("certificate applies to arities k >= 3")
    if len(seq) < 2:
        raise ValueError("need at least two Lagrangians")
    if not transversal(seq):
        raise ValueError("sequence is not transversal")
    for a, b in zip(seq, seq[1:]):
        if not is_positive_definite(_increment(a, b)):
            return VanishingCertificate(
                certified=False,
                arity=k,
                reason="not certifiable: ordering is not convex "
                "(a slope increment is not positive definite)",
            )
    degrees = tuple(
        inertia(_increment(seq[i], seq[j]))[0]
        for i in range(len(seq))
        for j in range(i + 1, len(seq))
    )
    return VanishingCertificate(
        certified=True,
        arity=k,
        reason=f"all generators have degree 0 and the target degree 2-{k} < 0",
        generator_degrees=degrees,
    )
