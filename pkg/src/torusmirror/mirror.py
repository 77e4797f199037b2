"""Non-archimedean mirror side: Laurent series over the Novikov field,
convergence on rational polytopes, theta bases of line bundles on the dual
torus, their multiplication table, morphism spectra, and the exact
comparison against the lattice-triangle product of affine Lagrangians.

Weight normalization (shared with the triangle counts): the theta section
of the bundle attached to slope A and shift b, in the coset j of Z^n/AZ^n,
is theta_j = sum over m = j mod A of q^{w(m)} z^m with
w(m) = (1/2)(m - b)^T A^{-1} (m - b).  With this convention the structure
constants of theta multiplication coincide term-by-term with the triangle
product, and the basis rescaling relating the two sides is the identity.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .fukaya_oh import AffineLagrangian, intersections, m2, transversal
from .lattice import (
    Mat,
    Vec,
    coset_reduce,
    coset_representatives,
    dot,
    enumerate_below,
    hnf,
    is_positive_definite,
    mat,
    mat_add,
    mat_det,
    mat_inv,
    mat_vec,
    quad_form,
    vec,
    vec_add,
    vec_sub,
)
from .novikov import NovikovElem


# ---------------------------------------------------------------------------
# Laurent series and polytopes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LaurentSeriesNd:
    """Finitely many stored terms a_k z^k plus a declared tail bound.

    tail_bound is the caller's witness c > 0 asserting v(a_k) >= c|k|_1 - O(1)
    for the unstored terms; a truncation alone cannot certify convergence,
    so the witness is explicit data.  tail_bound = None declares the series
    finitely supported (no tail at all).
    """

    n: int
    terms: Tuple[Tuple[Tuple[int, ...], NovikovElem], ...]
    tail_bound: Optional[Fraction]

    def __post_init__(self):
        if self.tail_bound is not None:
            object.__setattr__(self, "tail_bound", Fraction(self.tail_bound))
            if self.tail_bound <= 0:
                raise ValueError("tail bound must be positive")
        seen = {}
        for k, a in self.terms:
            k = tuple(int(x) for x in k)
            if len(k) != self.n:
                raise ValueError("exponent dimension mismatch")
            if k in seen:
                raise ValueError("duplicate exponent vector")
            if a.is_zero() and a.cutoff is None:
                continue
            seen[k] = a
        object.__setattr__(
            self, "terms", tuple(sorted(seen.items()))
        )

    def coeff(self, k: Tuple[int, ...]) -> Optional[NovikovElem]:
        for kk, a in self.terms:
            if kk == tuple(k):
                return a
        return None

    def multiply(self, other: "LaurentSeriesNd") -> "LaurentSeriesNd":
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        acc: Dict[Tuple[int, ...], NovikovElem] = {}
        for k1, a1 in self.terms:
            for k2, a2 in other.terms:
                k = tuple(x + y for x, y in zip(k1, k2))
                p = a1 * a2
                acc[k] = acc[k] + p if k in acc else p
        tail = (
            None
            if self.tail_bound is None and other.tail_bound is None
            else min(t for t in (self.tail_bound, other.tail_bound) if t is not None)
        )
        return LaurentSeriesNd(self.n, tuple(acc.items()), tail)


@dataclass(frozen=True)
class RationalPolytope:
    """Intersection of rational half-spaces <a, y> <= b in R^n."""

    n: int
    halfspaces: Tuple[Tuple[Vec, Fraction], ...]

    def __post_init__(self):
        hs = tuple((vec(a), Fraction(b)) for a, b in self.halfspaces)
        if any(len(a) != self.n for a, _ in hs):
            raise ValueError("half-space dimension mismatch")
        object.__setattr__(self, "halfspaces", hs)
        if not self._nonempty():
            raise ValueError("empty polytope")
        if not self._bounded():
            raise ValueError("unbounded polytope")

    def _eliminate(self, constraints, j):
        """One Fourier-Motzkin step removing variable j."""
        pos, neg, zero = [], [], []
        for a, b in constraints:
            if a[j] > 0:
                pos.append((a, b))
            elif a[j] < 0:
                neg.append((a, b))
            else:
                zero.append((a, b))
        out = list(zero)
        for ap, bp in pos:
            for an, bn in neg:
                coef_p, coef_n = ap[j], -an[j]
                a = tuple(coef_n * x + coef_p * y for x, y in zip(ap, an))
                out.append((a, coef_n * bp + coef_p * bn))
        return out

    def _nonempty(self) -> bool:
        cons = list(self.halfspaces)
        for j in range(self.n):
            cons = self._eliminate(cons, j)
        return all(b >= 0 for _a, b in cons)

    def _bounded(self) -> bool:
        for d in range(self.n):
            cons = list(self.halfspaces)
            for j in range(self.n):
                if j != d:
                    cons = self._eliminate(cons, j)
            has_upper = any(a[d] > 0 for a, _ in cons)
            has_lower = any(a[d] < 0 for a, _ in cons)
            if not (has_upper and has_lower):
                return False
        return True

    def vertices(self) -> List[Vec]:
        """All vertices, from feasible intersections of n active half-spaces."""
        verts = set()
        for subset in itertools.combinations(self.halfspaces, self.n):
            a = mat([hs[0] for hs in subset])
            if mat_det(a) == 0:
                continue
            y = mat_vec(mat_inv(a), vec([hs[1] for hs in subset]))
            if all(dot(av, y) <= bv for av, bv in self.halfspaces):
                verts.add(y)
        return sorted(verts)


def converges_on(s: LaurentSeriesNd, p: RationalPolytope) -> bool:
    """Laurent-domain convergence test via polytope vertices.

    By convexity it suffices to check vertices: the stored terms give a
    finite minimum of v(a_k) + <k, y>, and the declared tail bound must
    dominate the linear growth of |<k, y>| over the polytope, i.e. the
    bound must exceed the largest vertex sup-norm.
    """
    if s.n != p.n:
        raise ValueError("dimension mismatch")
    verts = p.vertices()
    if not verts:
        raise ValueError("polytope has no vertices")
    for y in verts:
        for k, a in s.terms:
            _ = a.val() + dot(vec(k), y)  # finite by construction
    if s.tail_bound is None:
        return True  # finitely supported: convergence is automatic
    max_norm = max(max(abs(c) for c in y) for y in verts)
    return s.tail_bound > max_norm


# ---------------------------------------------------------------------------
# Line bundles and theta bases
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LineBundleObj:
    """Mirror line bundle of an affine Lagrangian with positive-definite slope.

    The zero-slope, zero-shift object is admitted as the unit (trivial
    bundle); every other slope must be positive definite.
    """

    lagrangian: AffineLagrangian

    def __post_init__(self):
        a = self.lagrangian.slope
        if self.is_unit:
            return
        if not is_positive_definite(a):
            raise ValueError("slope must be positive definite (no ample theta model)")

    @property
    def is_unit(self) -> bool:
        return all(e == 0 for row in self.lagrangian.slope for e in row) and all(
            c == 0 for c in self.lagrangian.shift
        )

    @property
    def n(self) -> int:
        return self.lagrangian.n

    @property
    def rank_of_sections(self) -> int:
        if self.is_unit:
            return 1
        return int(abs(mat_det(self.lagrangian.slope)))

    def tensor(self, other: "LineBundleObj") -> "LineBundleObj":
        a = mat_add(self.lagrangian.slope, other.lagrangian.slope)
        b = vec_add(self.lagrangian.shift, other.lagrangian.shift)
        hol = tuple(
            u * v for u, v in zip(self.lagrangian.holonomy, other.lagrangian.holonomy)
        )
        return LineBundleObj(AffineLagrangian(a, b, hol))


def unit_bundle(n: int) -> LineBundleObj:
    return LineBundleObj(AffineLagrangian([[0] * n for _ in range(n)], [0] * n))


def functor_on_objects(l: AffineLagrangian) -> LineBundleObj:
    """Mirror bundle of an affine Lagrangian; requires positive-definite slope."""
    if not is_positive_definite(l.slope):
        raise ValueError("slope must be positive definite (no ample theta model)")
    return LineBundleObj(l)


def _theta_weight(ainv: Mat, center: Vec, m: Vec) -> Fraction:
    d = vec_sub(m, center)
    return Fraction(1, 2) * quad_form(ainv, d)


def _coset_minimum(a: Mat, center: Vec, j: Tuple[int, ...]) -> Tuple[Tuple[int, ...], Fraction]:
    """Representative s = j mod A minimizing (1/2)(s-center)^T A^{-1} (s-center)."""
    ainv = mat_inv(a)
    j = vec(j)
    # w(j + A t) = (1/2) t^T A t + t . (j - center) + w(j); search with a
    # growing bound until nonempty, then take the exact argmin.
    vlin = vec_sub(j, center)
    c0 = _theta_weight(ainv, center, j)
    bound = Fraction(1)
    while True:
        pts = list(enumerate_below(a, vlin, c0, bound))
        if pts:
            break
        bound *= 2
    best = None
    for t in pts:
        s = tuple(int(x + y) for x, y in zip(j, mat_vec(a, vec(t))))
        w = _theta_weight(ainv, center, vec(s))
        if best is None or w < best[1]:
            best = (s, w)
    return best


@dataclass(frozen=True)
class ThetaBasis:
    bundle: LineBundleObj
    cutoff: Fraction
    sections: Tuple[Tuple[Tuple[int, ...], LaurentSeriesNd], ...]

    def section(self, j: Tuple[int, ...]) -> LaurentSeriesNd:
        for jj, s in self.sections:
            if jj == tuple(j):
                return s
        raise KeyError(j)

    @property
    def indices(self) -> List[Tuple[int, ...]]:
        return [j for j, _ in self.sections]


def theta_basis(e: LineBundleObj, cutoff) -> ThetaBasis:
    """Truncated theta sections, one per coset of Z^n modulo the slope lattice."""
    cutoff = Fraction(cutoff)
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    if e.is_unit:
        one = LaurentSeriesNd(
            e.n, (((0,) * e.n, NovikovElem.one(cutoff)),), Fraction(1)
        )
        return ThetaBasis(e, cutoff, (((0,) * e.n, one),))
    a = e.lagrangian.slope
    ainv = mat_inv(a)
    center = e.lagrangian.shift
    sections = []
    for j in coset_representatives(a):
        vlin = vec_sub(vec(j), center)
        c0 = _theta_weight(ainv, center, vec(j))
        terms = []
        for t in enumerate_below(a, vlin, c0, cutoff):
            m = tuple(int(x + y) for x, y in zip(j, mat_vec(a, vec(t))))
            w = _theta_weight(ainv, center, vec(m))
            terms.append((m, NovikovElem.q_power(w, 1, cutoff)))
        sections.append((j, LaurentSeriesNd(e.n, tuple(terms), Fraction(1))))
    return ThetaBasis(e, cutoff, tuple(sections))


@dataclass(frozen=True)
class ThetaProductTable:
    """Structure constants of theta multiplication in the target theta basis."""

    cutoff: Fraction
    coefficients: Tuple[Tuple[Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]], NovikovElem], ...]

    def coefficient(self, j1, j2, j3) -> NovikovElem:
        key = (tuple(j1), tuple(j2), tuple(j3))
        for k, c in self.coefficients:
            if k == key:
                return c
        return NovikovElem.zero(self.cutoff)

    def as_dict(self) -> Dict:
        return dict(self.coefficients)


class ThetaSolveError(ValueError):
    def __init__(self, message: str, required_cutoff: Fraction):
        super().__init__(f"{message}; retry with cutoff >= {required_cutoff}")
        self.required_cutoff = required_cutoff


def theta_multiply(e1: LineBundleObj, e2: LineBundleObj, cutoff) -> ThetaProductTable:
    """Expand products of theta sections in the tensor-bundle theta basis.

    The Laurent product is computed at an enlarged internal cutoff so that
    after dividing by the monomial leading weight of each target section the
    coefficients are complete below the requested cutoff; every stored
    product term is then checked for consistency with the solved
    coefficient, and a mismatch reports the cutoff that would be required.
    """
    cutoff = Fraction(cutoff)
    if cutoff <= 0:
        raise ValueError("cutoff must be positive")
    if e1.n != e2.n:
        raise ValueError("dimension mismatch")
    if e1.is_unit or e2.is_unit:
        other, unit_first = (e2, True) if e1.is_unit else (e1, False)
        basis = theta_basis(other, cutoff)
        zero = (0,) * other.n
        coeffs = []
        for j in basis.indices:
            key = (zero, j, j) if unit_first else (j, zero, j)
            coeffs.append((key, NovikovElem.one(cutoff)))
        return ThetaProductTable(cutoff, tuple(coeffs))

    e3 = e1.tensor(e2)
    gamma = e3.lagrangian.slope
    ginv = mat_inv(gamma)
    c3 = e3.lagrangian.shift
    gamma_h = hnf(gamma)
    target_cosets = coset_representatives(gamma)
    minima = {j3: _coset_minimum(gamma, c3, j3) for j3 in target_cosets}
    internal = cutoff + max(w for _s, w in minima.values()) + 1

    b1 = theta_basis(e1, internal)
    b2 = theta_basis(e2, internal)
    coeffs = []
    for j1 in b1.indices:
        for j2 in b2.indices:
            prod = b1.section(j1).multiply(b2.section(j2))
            solved: Dict[Tuple[int, ...], NovikovElem] = {}
            for j3 in target_cosets:
                s_star, w_star = minima[j3]
                a = prod.coeff(s_star)
                if a is None:
                    a = NovikovElem.zero(internal)
                c = (a * NovikovElem.q_power(-w_star, 1)).truncate(cutoff)
                solved[j3] = c
            # consistency of every stored product term with the solve, on
            # the range where both sides are provably complete: product
            # coefficients are complete below the internal cutoff (every
            # dropped theta term has weight >= internal), and the solved
            # coefficient times q^w is complete below cutoff + w.
            for s, a in prod.terms:
                j3 = coset_reduce(gamma_h, s)
                w = _theta_weight(ginv, c3, vec(s))
                predicted = solved[j3] * NovikovElem.q_power(w, 1)
                common = min(internal, cutoff + w)
                if a.truncate(common) != predicted.truncate(common):
                    raise ThetaSolveError(
                        f"inconsistent theta solve at z^{s} for pair ({j1}, {j2})",
                        cutoff + w + 1,
                    )
            for j3 in target_cosets:
                coeffs.append(((j1, j2, j3), solved[j3]))
    return ThetaProductTable(cutoff, tuple(coeffs))


# ---------------------------------------------------------------------------
# Spectra and the comparison oracle
# ---------------------------------------------------------------------------


def spectrum(
    alpha: LaurentSeriesNd, l0: AffineLagrangian, l1: AffineLagrangian, y: Sequence
) -> List[Fraction]:
    """Spectral values -lambda + <k, y> + f_0(y) - f_1(y), sorted descending."""
    y = vec(y)
    shift = l0.potential(y) - l1.potential(y)
    values = []
    for k, a in alpha.terms:
        for num, den, _cnum, _cden in a.to_obj()["terms"]:
            values.append(-Fraction(num, den) + dot(vec(k), y) + shift)
    return sorted(values, reverse=True)


@dataclass(frozen=True)
class MirrorReport:
    status: str  # "EQUAL" or "DIFFER"
    cutoff: Fraction
    first_discrepancy: Optional[Tuple] = None
    triangle_table: Tuple = ()
    theta_table: Tuple = ()

    @property
    def equal(self) -> bool:
        return self.status == "EQUAL"


def compare_tables(
    triangle: Dict[Tuple, NovikovElem], theta: Dict[Tuple, NovikovElem], cutoff
) -> MirrorReport:
    """Entrywise comparison of truncated coefficient tables."""
    cutoff = Fraction(cutoff)
    zero = NovikovElem.zero(cutoff)
    keys = sorted(set(triangle) | set(theta))
    for key in keys:
        a = triangle.get(key, zero).truncate(cutoff)
        b = theta.get(key, zero).truncate(cutoff)
        if a != b:
            return MirrorReport(
                status="DIFFER",
                cutoff=cutoff,
                first_discrepancy=(key, a, b),
                triangle_table=tuple(sorted(triangle.items())),
                theta_table=tuple(sorted(theta.items())),
            )
    return MirrorReport(
        status="EQUAL",
        cutoff=cutoff,
        triangle_table=tuple(sorted(triangle.items())),
        theta_table=tuple(sorted(theta.items())),
    )


def triangle_product_table(
    l0: AffineLagrangian, l1: AffineLagrangian, l2: AffineLagrangian, cutoff
) -> Dict[Tuple, NovikovElem]:
    """All m2 products of the triple, keyed by intersection-coset triples."""
    table: Dict[Tuple, NovikovElem] = {}
    for x0 in intersections(l0, l1):
        for x1 in intersections(l1, l2):
            out = m2(l0, l1, l2, x0, x1, cutoff)
            for x2, value in out.items():
                table[(x0.coset, x1.coset, x2.coset)] = value
    return table


def mirror_compare(
    l0: AffineLagrangian, l1: AffineLagrangian, l2: AffineLagrangian, cutoff
) -> MirrorReport:
    """Exact comparison of the triangle product with theta multiplication.

    Both sides use the shared weight normalization, under which the basis
    rescaling between them is the identity; the tables are compared
    entrywise as truncated Novikov elements.
    """
    cutoff = Fraction(cutoff)
    if not transversal([l0, l1, l2]):
        raise ValueError("non-transversal triple")
    for a, b in ((l0, l1), (l1, l2)):
        inc = mat([
            [x - y for x, y in zip(ra, rb)]
            for ra, rb in zip(b.slope, a.slope)
        ])
        if not is_positive_definite(inc):
            raise ValueError("mirror comparison requires convex ordering")
    for l in (l0, l1, l2):
        if any(u != 1 for u in l.holonomy):
            raise ValueError("mirror comparison implemented for trivial holonomy")

    triangle = triangle_product_table(l0, l1, l2, cutoff)

    inc01 = AffineLagrangian(
        [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(l1.slope, l0.slope)],
        vec_sub(l1.shift, l0.shift),
    )
    inc12 = AffineLagrangian(
        [[x - y for x, y in zip(ra, rb)] for ra, rb in zip(l2.slope, l1.slope)],
        vec_sub(l2.shift, l1.shift),
    )
    table = theta_multiply(LineBundleObj(inc01), LineBundleObj(inc12), cutoff)
    theta = dict(table.coefficients)
    return compare_tables(triangle, theta, cutoff)
