"""Morse theory on the flat circle R/Z for trigonometric polynomials:
certified critical points, the Morse differential, and the gradient-tree
product m2, unweighted (integer counts) or weighted by Novikov elements.

All computations are exact.  A trigonometric polynomial is transported to
a rational polynomial through the half-angle substitution t = tan(pi*y)
(the point y = 1/2 is handled separately), so critical points are real
algebraic numbers isolated by Sturm sequences with rational intervals, and
every sign or ordering decision is certified by exact interval refinement.

Orientation and sign conventions (validated by d^2 = 0 and the arity-3
structure relation, then frozen):
  * the circle is oriented positively (increasing y);
  * a descending gradient arc contributes +1 when traversed in the
    positive direction and -1 otherwise;
  * a gradient Y-tree for m2(x0, x1) -> x2 consists of monotone arcs
    descending to x0 (along f0-f1), descending to x1 (along f1-f2), and
    descending from x2 (along f0-f2), all meeting at the internal vertex;
    its sign is the product of the arc contributions over arcs of nonzero
    length, each taken in the traversal direction away from the vertex for
    the input arcs and into the vertex for the output arc.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import sympy

from .ainfty import GradedBasis, MultilinearOp
from .intervals import Interval, eval_poly
from .novikov import NovikovElem

_T = sympy.symbols("t")

# interval-width targets: positions are isolated below 2**-41, certified
# values (weights, rescaling exponents) are rounded to the 2**-42 dyadic grid
_POSITION_EPS = Fraction(1, 2**41)
_VALUE_EPS = Fraction(1, 2**44)
_VALUE_GRID = 2**42


# ---------------------------------------------------------------------------
# trig polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TrigPolynomial:
    """f(y) = a_0 + sum_k a_k cos(2 pi k y) + b_k sin(2 pi k y), rational coeffs."""

    cos_coeffs: Tuple[Tuple[int, Fraction], ...]  # (k, a_k), k >= 0
    sin_coeffs: Tuple[Tuple[int, Fraction], ...]  # (k, b_k), k >= 1

    def __post_init__(self):
        cos_c = {}
        for k, a in self.cos_coeffs:
            k, a = int(k), Fraction(a)
            if k < 0:
                raise ValueError("cosine harmonic must be >= 0")
            if a:
                cos_c[k] = cos_c.get(k, Fraction(0)) + a
        sin_c = {}
        for k, b in self.sin_coeffs:
            k, b = int(k), Fraction(b)
            if k < 1:
                raise ValueError("sine harmonic must be >= 1")
            if b:
                sin_c[k] = sin_c.get(k, Fraction(0)) + b
        object.__setattr__(
            self, "cos_coeffs", tuple(sorted((k, a) for k, a in cos_c.items() if a))
        )
        object.__setattr__(
            self, "sin_coeffs", tuple(sorted((k, b) for k, b in sin_c.items() if b))
        )

    @staticmethod
    def from_dicts(cos_c: Dict[int, Fraction], sin_c: Dict[int, Fraction]) -> "TrigPolynomial":
        return TrigPolynomial(tuple(cos_c.items()), tuple(sin_c.items()))

    @staticmethod
    def zero() -> "TrigPolynomial":
        return TrigPolynomial((), ())

    @property
    def max_harmonic(self) -> int:
        ks = [k for k, _ in self.cos_coeffs if k > 0] + [k for k, _ in self.sin_coeffs]
        return max(ks, default=0)

    @property
    def is_constant(self) -> bool:
        return self.max_harmonic == 0

    def __sub__(self, other: "TrigPolynomial") -> "TrigPolynomial":
        cos_c = dict(self.cos_coeffs)
        for k, a in other.cos_coeffs:
            cos_c[k] = cos_c.get(k, Fraction(0)) - a
        sin_c = dict(self.sin_coeffs)
        for k, b in other.sin_coeffs:
            sin_c[k] = sin_c.get(k, Fraction(0)) - b
        return TrigPolynomial.from_dicts(cos_c, sin_c)

    def __neg__(self) -> "TrigPolynomial":
        return TrigPolynomial.zero() - self

    def dtheta(self) -> "TrigPolynomial":
        """Derivative with respect to theta = 2 pi y (so f'(y) = 2 pi dtheta)."""
        cos_c = {k: k * b for k, b in self.sin_coeffs}
        sin_c = {k: -k * a for k, a in self.cos_coeffs if k >= 1}
        return TrigPolynomial.from_dicts(cos_c, sin_c)

    def at_half(self) -> Fraction:
        """Exact value at y = 1/2 (theta = pi)."""
        val = Fraction(0)
        for k, a in self.cos_coeffs:
            val += a if k % 2 == 0 else -a
        return val

    def dtheta_cached(self) -> "TrigPolynomial":
        return _dtheta_cached(self)

    def numerator_coeffs(self) -> Tuple[Fraction, ...]:
        return _numerator_coeffs_cached(self)

    def _numerator_coeffs(self) -> Tuple[Fraction, ...]:
        """Coefficients (descending) of N with f = N(t) / (1+t^2)^K, t = tan(pi y)."""
        k_max = self.max_harmonic
        one = sympy.Poly(1, _T, domain="QQ")
        den = sympy.Poly(1 + _T**2, _T, domain="QQ")
        c_list, s_list = [one], [sympy.Poly(0, _T, domain="QQ")]
        c1 = sympy.Poly(1 - _T**2, _T, domain="QQ")
        s1 = sympy.Poly(2 * _T, _T, domain="QQ")
        for _ in range(k_max):
            c_list.append(c1 * c_list[-1] - s1 * s_list[-1])
            s_list.append(s1 * c_list[-2] + c1 * s_list[-1])
        total = sympy.Poly(0, _T, domain="QQ")
        for k, a in self.cos_coeffs:
            total += sympy.Rational(a) * c_list[k] * den ** (k_max - k)
        for k, b in self.sin_coeffs:
            total += sympy.Rational(b) * s_list[k] * den ** (k_max - k)
        return tuple(Fraction(str(c)) for c in total.all_coeffs())


@lru_cache(maxsize=None)
def _numerator_coeffs_cached(f: TrigPolynomial) -> Tuple[Fraction, ...]:
    return f._numerator_coeffs()


@lru_cache(maxsize=None)
def _dtheta_cached(f: TrigPolynomial) -> TrigPolynomial:
    return f.dtheta()


def _poly_from_coeffs(coeffs: Sequence[Fraction]) -> sympy.Poly:
    expr = sum(sympy.Rational(c) * _T ** (len(coeffs) - 1 - i) for i, c in enumerate(coeffs))
    return sympy.Poly(expr, _T, domain="QQ")


# ---------------------------------------------------------------------------
# algebraic points on the circle
# ---------------------------------------------------------------------------


def _poly_eval(coeffs: Tuple[Fraction, ...], x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in coeffs:
        acc = acc * x + c
    return acc


class CirclePoint:
    """A point of R/Z given exactly: y = 1/2, or t = tan(pi y) as a real
    algebraic number with a refinable rational isolating interval.

    Invariant for inexact points: the (squarefree) defining polynomial has
    exactly one root in (lo, hi], with a fixed nonzero sign at hi, so
    bisection with exact rational arithmetic refines the enclosure.
    """

    def __init__(self, at_half: bool, coeffs: Optional[Tuple[Fraction, ...]] = None, iv: Optional[Interval] = None):
        self.at_half = at_half
        self.coeffs = coeffs
        self.iv = iv
        self.s_hi = 0
        if not at_half and iv is not None and iv.lo != iv.hi:
            v_hi = _poly_eval(coeffs, iv.hi)
            if v_hi == 0:
                self.iv = Interval(iv.hi, iv.hi)
            else:
                self.s_hi = 1 if v_hi > 0 else -1

    @staticmethod
    def half() -> "CirclePoint":
        return CirclePoint(True)

    def refine(self, eps: Fraction) -> None:
        if self.at_half:
            return
        while self.iv.width > eps:
            c = self.iv.mid
            v = _poly_eval(self.coeffs, c)
            if v == 0:
                self.iv = Interval(c, c)
                return
            if (v > 0) == (self.s_hi > 0):
                self.iv = Interval(self.iv.lo, c)
            else:
                self.iv = Interval(c, self.iv.hi)

    def sector(self) -> int:
        """0 for t >= 0 (y in [0,1/2)), 1 for y = 1/2, 2 for t < 0 (y in (1/2,1))."""
        if self.at_half:
            return 1
        eps = Fraction(1, 2**8)
        while self.iv.contains_zero():
            if self.iv.lo == self.iv.hi:
                return 0  # exact root t = 0
            self.refine(eps)
            eps /= 2**8
            if eps < Fraction(1, 2**2000):  # pragma: no cover
                raise RuntimeError("sector refinement failed")
        return 0 if self.iv.lo > 0 else 2

    def less_than(self, other: "CirclePoint") -> bool:
        """Strict cyclic-coordinate comparison; the points must be distinct."""
        sa, sb = self.sector(), other.sector()
        if sa != sb:
            return sa < sb
        if sa == 1:
            raise ValueError("comparing equal points at y = 1/2")
        for _ in range(4000):
            if self.iv.hi < other.iv.lo:
                return True
            if other.iv.hi < self.iv.lo:
                return False
            if self.iv.lo == self.iv.hi == other.iv.lo == other.iv.hi:
                raise ValueError("comparing equal points")
            eps = min(self.iv.width, other.iv.width, Fraction(1, 4)) / 4
            self.refine(eps)
            other.refine(eps)
        raise RuntimeError("comparison refinement failed")  # pragma: no cover


def _certified_sign(h: TrigPolynomial, p: CirclePoint) -> int:
    """Exact sign of the trig polynomial h at p; h(p) must be nonzero."""
    if p.at_half:
        v = h.at_half()
        if v == 0:
            raise ValueError("certified sign of a zero value")
        return 1 if v > 0 else -1
    num = h.numerator_coeffs()
    eps = Fraction(1, 2**8)
    for _ in range(400):
        s = eval_poly(num, p.iv).sign()
        if s != 0:
            return s
        p.refine(eps)
        eps /= 2**8
    raise RuntimeError("sign refinement failed")  # pragma: no cover


def _value_interval(h: TrigPolynomial, p: CirclePoint, eps: Fraction) -> Interval:
    """Certified enclosure of h(p) of width <= eps."""
    if p.at_half:
        return Interval.point(h.at_half())
    num = h.numerator_coeffs()
    k = h.max_harmonic
    target = p.iv.width
    while True:
        t = p.iv
        den = (Interval.point(1) + t * t)
        d = Interval.point(1)
        for _ in range(k):
            d = d * den
        out = eval_poly(num, t) / d
        if out.width <= eps:
            return out
        target /= 2**8
        p.refine(target)


def _dyadic(v: Interval) -> Fraction:
    """Deterministic rational representative of a certified enclosure.

    Rounds toward zero so that negating the enclosed value negates the
    representative; basis_rescale relies on this odd symmetry to be an
    exact involution."""
    if v.lo == v.hi:
        return v.lo
    scaled = v.mid * _VALUE_GRID
    num = scaled.__floor__() if scaled >= 0 else -(-scaled).__floor__()
    return Fraction(num, _VALUE_GRID)


# ---------------------------------------------------------------------------
# critical sets
# ---------------------------------------------------------------------------


@dataclass
class CriticalPoint:
    label: int  # position in cyclic order
    index: int  # Morse index: 0 minimum, 1 maximum
    point: CirclePoint
    y_interval: Tuple[Fraction, Fraction]  # certified, width < 2**-40
    second_sign: int  # sign of f'' at the point


@dataclass
class CriticalSet:
    function: TrigPolynomial
    points: Tuple[CriticalPoint, ...]

    @property
    def minima(self) -> List[CriticalPoint]:
        return [p for p in self.points if p.index == 0]

    @property
    def maxima(self) -> List[CriticalPoint]:
        return [p for p in self.points if p.index == 1]

    def basis(self) -> GradedBasis:
        return GradedBasis(tuple((p.label, p.index) for p in self.points))


class NonMorseError(ValueError):
    pass


def _y_interval(p: CirclePoint) -> Tuple[Fraction, Fraction]:
    """Certified rational interval for y in [0,1), width < 2**-40, via atan."""
    if p.at_half:
        return (Fraction(1, 2), Fraction(1, 2))
    import mpmath

    p.refine(Fraction(1, 2**44))
    # atan is monotone and well conditioned; 120-bit evaluation at both
    # rational endpoints is accurate to far better than the 2**-60 pad.
    with mpmath.workprec(120):
        vals = []
        for bound in (p.iv.lo, p.iv.hi):
            x = mpmath.mpf(bound.numerator) / mpmath.mpf(bound.denominator)
            y = mpmath.atan(x) / mpmath.pi
            vals.append(Fraction(mpmath.nstr(y, 30, strip_zeros=False)))
    pad = Fraction(1, 2**60)
    lo, hi = min(vals) - pad, max(vals) + pad
    if lo < 0 and hi < 0:
        lo, hi = lo + 1, hi + 1
    return (lo, hi)


@lru_cache(maxsize=None)
def critical_points(f: TrigPolynomial) -> CriticalSet:
    """Certified isolation and classification of the critical points of f.

    Raises NonMorseError when a critical point has vanishing second
    derivative (certified double root of f').
    """
    if f.is_constant:
        raise ValueError("constant function has no Morse critical points")
    g1 = _dtheta_cached(f)
    g2 = _dtheta_cached(g1)
    p = _poly_from_coeffs(g1.numerator_coeffs())
    r = _poly_from_coeffs(g2.numerator_coeffs())
    if p.is_zero:
        raise ValueError("derivative vanishes identically")
    common = p.gcd(r)
    if common.degree() > 0 and common.intervals():
        raise NonMorseError("f' and f'' share a real root: non-Morse input")
    if g1.at_half() == 0 and g2.at_half() == 0:
        raise NonMorseError("double critical point at y = 1/2: non-Morse input")

    sqf = p.sqf_part()
    sqf_coeffs = tuple(Fraction(c.p, c.q) for c in sqf.all_coeffs())
    pts: List[Tuple[int, CirclePoint]] = []
    for (lo, hi), _mult in sqf.intervals():
        cp = CirclePoint(False, sqf_coeffs, Interval(Fraction(str(lo)), Fraction(str(hi))))
        s2 = _certified_sign(g2, cp)
        pts.append((s2, cp))
    if g1.at_half() == 0:
        v = g2.at_half()
        pts.append((1 if v > 0 else -1, CirclePoint.half()))

    # cyclic order on [0,1): t >= 0 ascending, then y = 1/2, then t < 0 ascending
    def sort_key_groups():
        zero_sector = [q for q in pts if q[1].sector() == 0]
        half = [q for q in pts if q[1].sector() == 1]
        neg = [q for q in pts if q[1].sector() == 2]
        for group in (zero_sector, neg):
            group.sort(key=lambda q: q[1].iv.lo)  # isolating intervals are disjoint
        return zero_sector + half + neg

    ordered = sort_key_groups()
    crit = []
    for i, (s2, cp) in enumerate(ordered):
        crit.append(
            CriticalPoint(
                label=i,
                index=0 if s2 > 0 else 1,
                point=cp,
                y_interval=_y_interval(cp),
                second_sign=s2,
            )
        )
    n_min = sum(1 for c in crit if c.index == 0)
    n_max = len(crit) - n_min
    if n_min != n_max or any(
        crit[i].index == crit[(i + 1) % len(crit)].index for i in range(len(crit))
    ):
        raise NonMorseError("critical points do not alternate min/max")
    return CriticalSet(f, tuple(crit))


# ---------------------------------------------------------------------------
# gradient flow queries
# ---------------------------------------------------------------------------


def _descent_direction(g: TrigPolynomial, p: CirclePoint) -> int:
    """+1 if g decreases in the positive direction at p (g not critical at p)."""
    return -_certified_sign(_dtheta_cached(g), p)


def _flow_target(crit: CriticalSet, p: CirclePoint, direction: int) -> CriticalPoint:
    """First critical point of crit met from p moving in the given direction."""
    pts = crit.points
    n = len(pts)
    below = 0
    for c in pts:
        if c.point.less_than(p):
            below += 1
    if direction > 0:
        return pts[below % n]
    return pts[(below - 1) % n]


def _shared_critical_point(ga: TrigPolynomial, gb: TrigPolynomial) -> bool:
    da, db = _dtheta_cached(ga), _dtheta_cached(gb)
    pa = _poly_from_coeffs(da.numerator_coeffs())
    pb = _poly_from_coeffs(db.numerator_coeffs())
    common = pa.gcd(pb)
    if common.degree() > 0 and common.intervals():
        return True
    return da.at_half() == 0 and db.at_half() == 0


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def morse_differential(f0: TrigPolynomial, f1: TrigPolynomial) -> MultilinearOp:
    """Differential on Hom(f0, f1): each minimum of f0-f1 maps to its left
    neighboring maximum minus its right neighboring maximum."""
    g = f0 - f1
    crit = critical_points(g)
    basis = crit.basis()
    n = len(crit.points)
    entries: Dict[Tuple, Dict] = {}
    for c in crit.minima:
        left = crit.points[(c.label - 1) % n]
        right = crit.points[(c.label + 1) % n]
        row: Dict = {}
        row[left.label] = row.get(left.label, 0) + 1
        row[right.label] = row.get(right.label, 0) - 1
        entries[(c.label,)] = row
    op = MultilinearOp(1, basis, basis, 1, entries)
    # d^2 = 0: the target of every entry has top degree, so one composition
    # step lands in the (empty) degree-2 part; assert it anyway.
    for ins, row in op.entries.items():
        for out in row:
            assert not op.entries.get((out,)), "d^2 != 0"
    return op


def cohomology_ranks(op: MultilinearOp) -> Tuple[int, int]:
    """(rank H^0, rank H^1) of an arity-1 differential over Q."""
    mins = [l for l, d in op.source.elements if d == 0]
    maxs = [l for l, d in op.source.elements if d == 1]
    rows = [[Fraction(op.entries.get((m,), {}).get(x, 0)) for m in mins] for x in maxs]
    mat = sympy.Matrix(len(maxs), len(mins), lambda i, j: sympy.Rational(rows[i][j]))
    rank = mat.rank()
    return (len(mins) - rank, len(maxs) - rank)


# Frozen case signs for the three Y-tree shapes.  Convention: orient every
# tree edge away from the internal vertex; an edge contributes +1 when it
# leaves the vertex in the positive circle direction, -1 otherwise.  With the
# direction variables used in m2 below this gives the constants here; the
# Leibniz relation for (d, m2) on random transversal triples singles out this
# assignment up to a global flip (the calibration is re-checked in the tests).
_SIGN_MIN_MIN = 1
_SIGN_MAX_INPUT_0 = -1
_SIGN_MAX_INPUT_1 = -1


def _weight_scalar(
    weighted: bool,
    cutoff: Optional[Fraction],
    g01: TrigPolynomial,
    g12: TrigPolynomial,
    g02: TrigPolynomial,
    x0: CriticalPoint,
    x1: CriticalPoint,
    x2: CriticalPoint,
):
    if not weighted:
        return 1
    eps = _VALUE_EPS
    w = (
        _value_interval(g02, x2.point, eps)
        - _value_interval(g01, x0.point, eps)
        - _value_interval(g12, x1.point, eps)
    )
    while w.sign() == 0:
        eps /= 2**8
        w = (
            _value_interval(g02, x2.point, eps)
            - _value_interval(g01, x0.point, eps)
            - _value_interval(g12, x1.point, eps)
        )
    if w.sign() < 0:
        raise AssertionError("negative total variation in a gradient tree")
    return NovikovElem.q_power(_dyadic(w), 1, cutoff)


def m2(
    f0: TrigPolynomial,
    f1: TrigPolynomial,
    f2: TrigPolynomial,
    weighted: bool = False,
    cutoff=None,
) -> MultilinearOp:
    """Gradient-tree product Hom(f0,f1) x Hom(f1,f2) -> Hom(f0,f2).

    Configurations are Y-trees on the circle; on a 1-dimensional base the
    internal vertex is forced to coincide with the generator of top index
    (or with the output minimum when all indices are 0), so the counts
    reduce to certified arc queries.  Unweighted entries are exact
    integers; weighted entries are Novikov monomials q^w with w the total
    variation of the tree, certified to the 2**-41 dyadic grid.
    """
    if cutoff is not None:
        cutoff = Fraction(cutoff)
    g01, g12, g02 = f0 - f1, f1 - f2, f0 - f2
    c01 = critical_points(g01)
    c12 = critical_points(g12)
    c02 = critical_points(g02)
    for ga, gb in ((g01, g12), (g01, g02), (g12, g02)):
        if _shared_critical_point(ga, gb):
            raise ValueError("transversality failure: shared critical point")

    entries: Dict[Tuple, Dict] = {}

    def add(x0: CriticalPoint, x1: CriticalPoint, x2: CriticalPoint, sign: int):
        scalar = _weight_scalar(weighted, cutoff, g01, g12, g02, x0, x1, x2)
        row = entries.setdefault((x0.label, x1.label), {})
        row[x2.label] = row.get(x2.label, 0) + sign * scalar

    # (0,0) -> 0: vertex at the output minimum x2; both input arcs descend
    # from the vertex and are traversed away from it.
    for x2 in c02.minima:
        d1 = _descent_direction(g01, x2.point)
        d2 = _descent_direction(g12, x2.point)
        x0 = _flow_target(c01, x2.point, d1)
        x1 = _flow_target(c12, x2.point, d2)
        assert x0.index == 0 and x1.index == 0
        add(x0, x1, x2, _SIGN_MIN_MIN * d1 * d2)

    # (1,0) -> 1: vertex at the maximum x0; the g12 arc descends away from
    # the vertex, the g02 arc descends from x2 into the vertex.
    for x0 in c01.maxima:
        d2 = _descent_direction(g12, x0.point)
        x1 = _flow_target(c12, x0.point, d2)
        u = -_descent_direction(g02, x0.point)  # ascent direction
        x2 = _flow_target(c02, x0.point, u)
        assert x1.index == 0 and x2.index == 1
        add(x0, x1, x2, _SIGN_MAX_INPUT_0 * d2 * (-u))

    # (0,1) -> 1: vertex at the maximum x1, symmetric to the previous case.
    for x1 in c12.maxima:
        d1 = _descent_direction(g01, x1.point)
        x0 = _flow_target(c01, x1.point, d1)
        u = -_descent_direction(g02, x1.point)
        x2 = _flow_target(c02, x1.point, u)
        assert x0.index == 0 and x2.index == 1
        add(x0, x1, x2, _SIGN_MAX_INPUT_1 * d1 * (-u))

    return MultilinearOp(
        2, c01.basis(), c02.basis(), 0, entries, check_degrees=False
    )


def transversal_triple(f0: TrigPolynomial, f1: TrigPolynomial, f2: TrigPolynomial) -> bool:
    """True iff the three pairwise differences are Morse with pairwise
    disjoint critical sets."""
    try:
        for g in (f0 - f1, f1 - f2, f0 - f2):
            critical_points(g)
    except (NonMorseError, ValueError):
        return False
    g01, g12, g02 = f0 - f1, f1 - f2, f0 - f2
    return not any(
        _shared_critical_point(ga, gb)
        for ga, gb in ((g01, g12), (g01, g02), (g12, g02))
    )


def basis_rescale(op: MultilinearOp, f_list: Sequence[TrigPolynomial], cutoff=None) -> MultilinearOp:
    """Conjugate a weighted operation by [y] -> [y] q^{-(f_i - f_j)(y)}.

    f_list are the objects (f_0, ..., f_n) for an arity-n operation; input
    slot i carries the difference f_i - f_{i+1} and the output carries
    f_0 - f_n.  Exponent values use the same certified dyadic evaluation as
    the weighted product, so rescaling with f and then -f is the identity.
    """
    n = op.arity
    if len(f_list) != n + 1:
        raise ValueError("need n+1 objects for an arity-n operation")
    diffs = [f_list[i] - f_list[i + 1] for i in range(n)]
    gout = f_list[0] - f_list[n]
    crits = [critical_points(g) for g in diffs]
    crit_out = critical_points(gout)
    if cutoff is not None:
        cutoff = Fraction(cutoff)

    def factor(g: TrigPolynomial, c: CriticalPoint, sign: int) -> NovikovElem:
        v = _value_interval(g, c.point, _VALUE_EPS)
        return NovikovElem.q_power(sign * _dyadic(v), 1, cutoff)

    entries: Dict[Tuple, Dict] = {}
    for ins, row in op.entries.items():
        scale_in = NovikovElem.one(cutoff)
        for slot, label in enumerate(ins):
            c = next(p for p in crits[slot].points if p.label == label)
            scale_in = scale_in * factor(diffs[slot], c, +1)
        new_row = {}
        for out, coeff in row.items():
            c = next(p for p in crit_out.points if p.label == out)
            new_row[out] = coeff * scale_in * factor(gout, c, -1)
        entries[ins] = new_row
    return MultilinearOp(
        op.arity, op.source, op.target, op.shift, entries, check_degrees=False
    )
