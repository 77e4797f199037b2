"""Graded bases, sparse multilinear operations, and A-infinity checks.

Scalars may be exact rationals (``fractions.Fraction`` / ``int``) or
truncated Novikov series (:class:`~torusmirror.novikov.NovikovElem`); the
code only uses ring operations and zero tests.

Two independent implementations of the structure equations are provided:

* :func:`relation_defect` expands the explicit quadratic relations

      sum_{j, l} eps(l, j) m_i(a_0, ..., m_j(a_l, ..., a_{l+j-1}), ..., a_{n-1})

  with the sign  eps(l,j) = (-1)^{j * sum_{s<l} deg(a_s) + l(j-1) + j(i-1)}.

* :func:`bar_check` squares the induced coderivation on the shifted
  tensor coalgebra, where all signs are Koszul in deg-1.

They must agree; tests enforce it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

from .novikov import NovikovElem

Label = Hashable
Scalar = object  # Fraction | int | NovikovElem


def is_zero_scalar(s) -> bool:
    if isinstance(s, NovikovElem):
        return s.is_zero()
    return s == 0


@dataclass(frozen=True)
class GradedBasis:
    """Finite homogeneous basis: ordered (label, degree) pairs."""

    elements: Tuple[Tuple[Label, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple((l, int(d)) for l, d in self.elements))
        labels = [l for l, _ in self.elements]
        if len(set(labels)) != len(labels):
            raise ValueError("duplicate basis labels")

    @property
    def labels(self) -> Tuple[Label, ...]:
        return tuple(l for l, _ in self.elements)

    @property
    def degrees(self) -> Dict[Label, int]:
        return dict(self.elements)

    def degree(self, label: Label) -> int:
        for l, d in self.elements:
            if l == label:
                return d
        raise KeyError(label)

    def __len__(self):
        return len(self.elements)


class MultilinearOp:
    """Sparse n-linear map between graded bases with a fixed degree shift.

    Entries map an n-tuple of source labels to a linear combination of
    target labels; every stored entry must satisfy
    deg(output) = sum deg(inputs) + shift.
    """

    def __init__(
        self,
        arity: int,
        source: GradedBasis,
        target: GradedBasis,
        shift: int,
        entries: Optional[Dict[Tuple[Label, ...], Dict[Label, Scalar]]] = None,
        check_degrees: bool = True,
    ):
        if arity < 1:
            raise ValueError("arity must be >= 1")
        self.arity = arity
        self.source = source
        self.target = target
        self.shift = shift
        table: Dict[Tuple[Label, ...], Dict[Label, Scalar]] = {}
        src_deg = source.degrees
        tgt_deg = target.degrees
        for ins, outs in (entries or {}).items():
            ins = tuple(ins)
            if len(ins) != arity:
                raise ValueError(f"entry {ins} has wrong arity")
            row = {o: c for o, c in outs.items() if not is_zero_scalar(c)}
            if not row:
                continue
            if check_degrees:
                want = sum(src_deg[l] for l in ins) + shift
                for o in row:
                    if tgt_deg[o] != want:
                        raise ValueError(
                            f"degree rule violated at {ins} -> {o}: "
                            f"expected {want}, basis says {tgt_deg[o]}"
                        )
            table[ins] = row
        self.entries = table

    def __call__(self, labels: Sequence[Label]) -> Dict[Label, Scalar]:
        return dict(self.entries.get(tuple(labels), {}))

    def is_zero(self) -> bool:
        return not self.entries

    def nonzero_entries(self):
        for ins, row in sorted(self.entries.items(), key=lambda kv: repr(kv[0])):
            for out, c in sorted(row.items(), key=repr):
                yield ins, out, c

    def scaled(self, s) -> "MultilinearOp":
        return MultilinearOp(
            self.arity,
            self.source,
            self.target,
            self.shift,
            {ins: {o: s * c for o, c in row.items()} for ins, row in self.entries.items()},
            check_degrees=False,
        )

    def __add__(self, other: "MultilinearOp") -> "MultilinearOp":
        if (self.arity, self.shift) != (other.arity, other.shift):
            raise ValueError("cannot add ops of different arity/shift")
        merged: Dict[Tuple[Label, ...], Dict[Label, Scalar]] = {
            ins: dict(row) for ins, row in self.entries.items()
        }
        for ins, row in other.entries.items():
            dst = merged.setdefault(ins, {})
            for o, c in row.items():
                dst[o] = dst.get(o, 0) + c
        return MultilinearOp(
            self.arity, self.source, self.target, self.shift, merged, check_degrees=False
        )

    def __sub__(self, other: "MultilinearOp") -> "MultilinearOp":
        return self + other.scaled(-1)

    def __neg__(self):
        return self.scaled(-1)

    def reverse_index(self) -> Dict[Label, List[Tuple[Tuple[Label, ...], Scalar]]]:
        """output label -> [(input tuple, coefficient), ...]"""
        idx: Dict[Label, List[Tuple[Tuple[Label, ...], Scalar]]] = {}
        for ins, row in self.entries.items():
            for o, c in row.items():
                idx.setdefault(o, []).append((ins, c))
        return idx


def zero_op(arity: int, source: GradedBasis, target: GradedBasis, shift: int) -> MultilinearOp:
    return MultilinearOp(arity, source, target, shift, {})


@dataclass
class AInftyStructure:
    """A graded basis plus finitely many operations m_n of shift 2 - n."""

    basis: GradedBasis
    ops: Dict[int, MultilinearOp] = field(default_factory=dict)

    def __post_init__(self):
        for n, op in self.ops.items():
            if op.arity != n or op.shift != 2 - n:
                raise ValueError(f"m_{n} must have arity {n} and shift {2 - n}")
            if op.source is not self.basis and op.source.elements != self.basis.elements:
                raise ValueError("operation basis mismatch")

    def m(self, n: int) -> MultilinearOp:
        op = self.ops.get(n)
        if op is None:
            return zero_op(n, self.basis, self.basis, 2 - n)
        return op

    def max_arity(self) -> int:
        populated = [n for n, op in self.ops.items() if not op.is_zero()]
        return max(populated, default=1)

    # -- JSON schema ----------------------------------------------------

    def to_obj(self):
        return {
            "basis": [[l, d] for l, d in self.basis.elements],
            "ops": [
                {
                    "arity": n,
                    "entries": [
                        [list(ins), out, _scalar_obj(c)]
                        for ins, out, c in op.nonzero_entries()
                    ],
                }
                for n, op in sorted(self.ops.items())
            ],
        }

    @staticmethod
    def from_obj(obj) -> "AInftyStructure":
        basis = GradedBasis(tuple((l, d) for l, d in obj["basis"]))
        ops = {}
        for blk in obj["ops"]:
            n = blk["arity"]
            table: Dict[Tuple[Label, ...], Dict[Label, Scalar]] = {}
            for ins, out, c in blk["entries"]:
                table.setdefault(tuple(ins), {})[out] = _scalar_from_obj(c)
            ops[n] = MultilinearOp(n, basis, basis, 2 - n, table)
        return AInftyStructure(basis, ops)


@dataclass
class AInftyMorphismData:
    """Components f_n of shift 1 - n between two structures."""

    source: AInftyStructure
    target: AInftyStructure
    components: Dict[int, MultilinearOp] = field(default_factory=dict)

    def __post_init__(self):
        for n, op in self.components.items():
            if op.arity != n or op.shift != 1 - n:
                raise ValueError(f"f_{n} must have arity {n} and shift {1 - n}")

    def f(self, n: int) -> MultilinearOp:
        op = self.components.get(n)
        if op is None:
            return zero_op(n, self.source.basis, self.target.basis, 1 - n)
        return op


def _scalar_obj(c):
    if isinstance(c, NovikovElem):
        return {"nov": c.to_obj()}
    c = Fraction(c)
    return {"q": [c.numerator, c.denominator]}


def _scalar_from_obj(o):
    if "nov" in o:
        return NovikovElem.from_obj(o["nov"])
    return Fraction(o["q"][0], o["q"][1])


# ---------------------------------------------------------------------------
# structure relation
# ---------------------------------------------------------------------------


def _compose_insert(
    outer: MultilinearOp, inner: MultilinearOp, l: int, sign_fn
) -> Dict[Tuple[Label, ...], Dict[Label, Scalar]]:
    """Entries of  outer composed with inner in slot l (0-based).

    ``sign_fn(prefix, inner_inputs, suffix)`` supplies the +-1 factor from
    the combined input labels around and inside the inserted block.
    """
    out: Dict[Tuple[Label, ...], Dict[Label, Scalar]] = {}
    rev = inner.reverse_index()
    for o_ins, o_row in outer.entries.items():
        mid = o_ins[l]
        for i_ins, i_c in rev.get(mid, ()):  # inner entries producing mid
            combined = o_ins[:l] + i_ins + o_ins[l + 1 :]
            sgn = sign_fn(o_ins[:l], i_ins, o_ins[l + 1 :])
            dst = out.setdefault(combined, {})
            for o_lab, o_c in o_row.items():
                dst[o_lab] = dst.get(o_lab, 0) + sgn * i_c * o_c
    return out


def relation_defect(A: AInftyStructure, n: int) -> MultilinearOp:
    """Left-hand side of the arity-n structure relation as an operation.

    Zero iff the relation holds at arity n.  The output has shift 3 - n.
    """
    deg = A.basis.degrees
    acc: Dict[Tuple[Label, ...], Dict[Label, Scalar]] = {}
    for j in range(1, n + 1):
        i = n - j + 1
        inner = A.m(j)
        outer = A.m(i)
        if inner.is_zero() or outer.is_zero():
            continue
        for l in range(0, i):

            def sgn(prefix, _inner, _suffix, j=j, l=l, i=i):
                e = j * sum(deg[a] for a in prefix) + l * (j - 1) + j * (i - 1)
                return -1 if e % 2 else 1

            for ins, row in _compose_insert(outer, inner, l, sgn).items():
                dst = acc.setdefault(ins, {})
                for o, c in row.items():
                    dst[o] = dst.get(o, 0) + c
    return MultilinearOp(n, A.basis, A.basis, 3 - n, acc, check_degrees=False)


# ---------------------------------------------------------------------------
# morphism relation
# ---------------------------------------------------------------------------


def _partitions_to(n: int, i: int):
    """Increasing tuples 0 = l_0 < l_1 < ... < l_i = n."""
    def rec(prev, parts_left):
        if parts_left == 1:
            yield (n,)
            return
        for nxt in range(prev + 1, n - parts_left + 2):
            for rest in rec(nxt, parts_left - 1):
                yield (nxt,) + rest

    yield from rec(0, i)


def morphism_defect(F: AInftyMorphismData, n: int) -> MultilinearOp:
    """LHS minus RHS of the arity-n morphism equation; zero iff it holds.

    Signs are the ones induced by the coalgebra formulation: a morphism is
    a degree-0 map of shifted tensor coalgebras commuting with the
    codifferentials, and every sign below is the suspension bookkeeping of
    translating that statement back to unshifted operations.  At arities
    <= 2 this reduces to the familiar chain-map / multiplicativity signs.

    LHS term for a composition  m_i(f_{k_1} x ... x f_{k_i}):
        (-1)^{ S(w_1..w_i) + sum_t S(block_t) }
    RHS term for an insertion  f_s(..., m_r(...), ...) at position j:
        (-1)^{ sum_{t<j}(deg a_t - 1) + S(block) + S(new inputs) }
    where S is the suspension exponent sum_q (k-q)(deg_q - 1) and w_t is
    the degree of f_{k_t}(block_t).
    """
    V, W = F.source, F.target
    degV = V.basis.degrees
    acc: Dict[Tuple[Label, ...], Dict[Label, Scalar]] = {}

    def add(ins, o, c):
        dst = acc.setdefault(ins, {})
        dst[o] = dst.get(o, 0) + c

    def S(degs: Tuple[int, ...]) -> int:
        k = len(degs)
        return sum((k - q) * (d - 1) for q, d in enumerate(degs, start=1))

    # LHS: sum over block partitions of  m_i^W(f_{k_1}(..), ..., f_{k_i}(..))
    for i in range(1, n + 1):
        mi = W.m(i)
        if mi.is_zero():
            continue
        for ls in _partitions_to(n, i):
            cuts = (0,) + tuple(ls)
            blocks = tuple(cuts[t] - cuts[t - 1] for t in range(1, i + 1))
            fs = [F.f(b) for b in blocks]
            if any(f.is_zero() for f in fs):
                continue
            revs = [f.reverse_index() for f in fs]
            for w_ins, w_row in mi.entries.items():

                def walk(slot, ins_acc, coeff):
                    if slot == i:
                        full = tuple(x for blk in ins_acc for x in blk)
                        degs = tuple(degV[x] for x in full)
                        wdegs = tuple(
                            sum(degs[cuts[t - 1] : cuts[t]]) + 1 - blocks[t - 1]
                            for t in range(1, i + 1)
                        )
                        e = S(wdegs) + sum(
                            S(degs[cuts[t - 1] : cuts[t]]) for t in range(1, i + 1)
                        )
                        s = -1 if e % 2 else 1
                        for o, c in w_row.items():
                            add(full, o, s * coeff * c)
                        return
                    for f_ins, f_c in revs[slot].get(w_ins[slot], ()):
                        walk(slot + 1, ins_acc + [f_ins], coeff * f_c)

                walk(0, [], 1)

    # RHS (subtracted): insertions f_s(a_1, ..., m_r^V(...), ..., a_n)
    for r in range(1, n + 1):
        s = n - r + 1
        fs_op = F.f(s)
        mr = V.m(r)
        if fs_op.is_zero() or mr.is_zero():
            continue
        for l in range(0, s):

            def sgn(prefix, inner, suffix, r=r):
                pd = tuple(degV[x] for x in prefix)
                bd = tuple(degV[x] for x in inner)
                sd = tuple(degV[x] for x in suffix)
                mid = sum(bd) + 2 - r
                e = sum(d - 1 for d in pd) + S(bd) + S(pd + (mid,) + sd)
                return -1 if e % 2 else 1

            for ins, row in _compose_insert(fs_op, mr, l, sgn).items():
                for o, c in row.items():
                    add(ins, o, -c)

    return MultilinearOp(n, V.basis, W.basis, 2 - n, acc, check_degrees=False)


# ---------------------------------------------------------------------------
# bar construction cross-check
# ---------------------------------------------------------------------------


@dataclass
class CheckReport:
    ok: bool
    failures: List[str] = field(default_factory=list)

    def __bool__(self):
        return self.ok


def suspended_coefficient(op_inputs: Tuple[Label, ...], deg) -> int:
    """Exponent of the suspension sign for b_n vs m_n on the given inputs:
    sum_q (n - q) * (deg(a_q) - 1), q = 1..n."""
    n = len(op_inputs)
    return sum((n - q) * (deg[a] - 1) for q, a in enumerate(op_inputs, start=1))


def _apply_coderivation(
    A: AInftyStructure, word: Tuple[Label, ...], coeff: Scalar
) -> Dict[Tuple[Label, ...], Scalar]:
    """One application of the coderivation induced by the b_n on a tensor
    word in the shifted space.  Koszul signs use deg - 1."""
    deg = A.basis.degrees
    out: Dict[Tuple[Label, ...], Scalar] = {}
    w = len(word)
    for nn in range(1, w + 1):
        op = A.m(nn)
        if op.is_zero():
            continue
        for l in range(0, w - nn + 1):
            block = word[l : l + nn]
            row = op.entries.get(block)
            if not row:
                continue
            kos = sum(deg[x] - 1 for x in word[:l])
            susp = suspended_coefficient(block, deg)
            sgn = -1 if (kos + susp) % 2 else 1
            for o, c in row.items():
                new = word[:l] + (o,) + word[l + nn :]
                out[new] = out.get(new, 0) + sgn * coeff * c
    return out


def bar_check(A: AInftyStructure, max_word: int) -> CheckReport:
    """Verify d^2 = 0 for the induced coderivation on words of length <= max_word."""
    failures = []
    labels = A.basis.labels
    from itertools import product

    for w in range(1, max_word + 1):
        for word in product(labels, repeat=w):
            once = _apply_coderivation(A, word, 1)
            twice: Dict[Tuple[Label, ...], Scalar] = {}
            for mid, c in once.items():
                for fin, c2 in _apply_coderivation(A, mid, c).items():
                    twice[fin] = twice.get(fin, 0) + c2
            for fin, c in twice.items():
                if not is_zero_scalar(c):
                    failures.append(f"word length {w}: d^2({word}) has {fin}: {c}")
    return CheckReport(ok=not failures, failures=failures)


# ---------------------------------------------------------------------------
# pre-category assembly
# ---------------------------------------------------------------------------


def assemble_sequence(
    seq: Tuple[Hashable, ...],
    hom_spaces: Dict[Tuple[Hashable, Hashable], GradedBasis],
    compositions: Dict[Tuple[Hashable, ...], MultilinearOp],
) -> AInftyStructure:
    """Direct-sum structure on  A = (+)_{i<j} Hom(X_i, X_j)  for one sequence.

    Labels are (i, j, hom label).  m_n is nonzero only on chained inputs
    (i_0,i_1), (i_1,i_2), ..., and is given by the composition map of the
    corresponding object subsequence.
    """
    N = len(seq)
    elems = []
    for a in range(N):
        for b in range(a + 1, N):
            hom = hom_spaces.get((seq[a], seq[b]))
            if hom is None:
                continue
            for l, d in hom.elements:
                elems.append(((a, b, l), d))
    basis = GradedBasis(tuple(elems))
    tables: Dict[int, Dict[Tuple[Label, ...], Dict[Label, Scalar]]] = {}
    for objs, comp in compositions.items():
        n = comp.arity
        table = tables.setdefault(n, {})
        # positions of objs inside seq, as strictly increasing index chains
        for chain in _index_chains(seq, objs):
            for ins, out_row in comp.entries.items():
                key = tuple((chain[t], chain[t + 1], ins[t]) for t in range(n))
                dst = table.setdefault(key, {})
                for o, c in out_row.items():
                    lab = (chain[0], chain[-1], o)
                    dst[lab] = dst.get(lab, 0) + c
    built = {
        n: MultilinearOp(n, basis, basis, 2 - n, tab) for n, tab in tables.items()
    }
    return AInftyStructure(basis, built)


def _index_chains(seq, objs):
    """Strictly increasing index tuples (i_0 < ... < i_n) with seq[i_t] == objs[t]."""
    n = len(objs)

    def rec(start, t):
        if t == n:
            yield ()
            return
        for i in range(start, len(seq)):
            if seq[i] == objs[t]:
                for rest in rec(i + 1, t + 1):
                    yield (i,) + rest

    yield from rec(0, 0)


def pre_category_check(
    objects: Sequence[Hashable],
    transversal_sets: Sequence[Tuple[Hashable, ...]],
    hom_spaces: Dict[Tuple[Hashable, Hashable], GradedBasis],
    compositions: Dict[Tuple[Hashable, ...], MultilinearOp],
) -> CheckReport:
    """Check subsequence closure and the structure relations on every
    transversal sequence (assembled as a direct sum, arities <= length)."""
    failures = []
    tset = {tuple(t) for t in transversal_sets}
    for t in tset:
        for sub in _subsequences(t):
            if len(sub) >= 2 and sub not in tset:
                failures.append(f"subsequence {sub} of {t} not transversal")
    if failures:
        return CheckReport(ok=False, failures=failures)
    for t in sorted(tset, key=repr):
        A = assemble_sequence(t, hom_spaces, compositions)
        for n in range(1, len(t) + 1):
            d = relation_defect(A, n)
            if not d.is_zero():
                ins, out, c = next(d.nonzero_entries())
                failures.append(
                    f"sequence {t}: arity-{n} relation fails at {ins} -> {out}: {c}"
                )
    return CheckReport(ok=not failures, failures=failures)


def _subsequences(t):
    from itertools import combinations

    for k in range(2, len(t) + 1):
        for idx in combinations(range(len(t)), k):
            yield tuple(t[i] for i in idx)
