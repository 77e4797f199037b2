"""Seeded corpus of graded differential algebras and valid retractions.

Random structure constants are almost never associative, so the corpus is
drawn from structured families that are associative by construction —

* truncated polynomial times one odd generator,
* an exterior algebra on two odd generators,
* the path algebra of the quiver . -> . with a graded arrow —

with the differential given by the graded commutator against a square-zero
odd element, then conjugated by a random invertible degree-0 basis change.

Retractions onto cohomology are built by exact linear algebra: per degree,
split  A^k = B^k (+) im d (+) C^k  with random complements, set H = d^{-1}
on im d and 0 elsewhere.  These satisfy the usual side conditions
(H i = 0, p H = 0, H^2 = 0) on top of the required identities.
"""

from __future__ import annotations

import random
from fractions import Fraction
from typing import Dict, List, Tuple

import sympy

from .ainfty import AInftyStructure, GradedBasis, MultilinearOp
from .transfer import RetractionData

Q = Fraction


# ---------------------------------------------------------------------------
# associative families (basis labels with degrees, multiplication table)
# ---------------------------------------------------------------------------


def _family_poly_times_odd(rng: random.Random):
    """Lambda(theta) tensor Q[x]/(x^k); theta odd, x even."""
    k = rng.randint(2, 3)
    deg_t = rng.choice([1, 3])
    deg_x = rng.choice([0, 2])
    basis = []
    for e in (0, 1):
        for j in range(k):
            basis.append(((e, j), e * deg_t + j * deg_x))
    mul = {}
    for e1, j1 in (l for l, _ in basis):
        for e2, j2 in (l for l, _ in basis):
            if e1 + e2 <= 1 and j1 + j2 < k:
                mul[((e1, j1), (e2, j2))] = {(e1 + e2, j1 + j2): Q(1)}
    # square-zero elements of degree 1 for the differential
    units = [lab for lab, d in basis if d == 1 and lab[0] == 1]
    return basis, mul, units


def _family_exterior_two(rng: random.Random):
    """Lambda(theta_1, theta_2) with odd generator degrees."""
    d1 = 1
    d2 = rng.choice([1, 3])
    basis = [((), 0), ((1,), d1), ((2,), d2), ((1, 2), d1 + d2)]

    def wedge(a: Tuple[int, ...], b: Tuple[int, ...]):
        if set(a) & set(b):
            return None
        merged = list(a) + list(b)
        sign = 1
        # bubble sort counting transpositions of odd generators
        for i in range(len(merged)):
            for j in range(len(merged) - 1 - i):
                if merged[j] > merged[j + 1]:
                    merged[j], merged[j + 1] = merged[j + 1], merged[j]
                    sign = -sign
        return tuple(merged), sign

    mul = {}
    for a, _ in basis:
        for b, _ in basis:
            w = wedge(a, b)
            if w is not None:
                mul[(a, b)] = {w[0]: Q(w[1])}
    units = [(1,)] + ([(2,)] if d2 == 1 else [])
    return basis, mul, units


def _family_quiver(rng: random.Random):
    """Path algebra of . -> . : idempotents e1, e2 and an arrow of degree 1."""
    basis = [("e1", 0), ("e2", 0), ("a", 1)]
    mul = {
        ("e1", "e1"): {"e1": Q(1)},
        ("e2", "e2"): {"e2": Q(1)},
        ("e1", "a"): {"a": Q(1)},
        ("a", "e2"): {"a": Q(1)},
    }
    units = ["a"]
    return basis, mul, units


_FAMILIES = [_family_poly_times_odd, _family_exterior_two, _family_quiver]


def random_dg_algebra(rng: random.Random) -> AInftyStructure:
    """A seeded differential graded algebra (operations m_1, m_2 only)."""
    basis_pairs, mul, units = rng.choice(_FAMILIES)(rng)
    labels = [l for l, _ in basis_pairs]
    degs = dict(basis_pairs)

    # differential: graded commutator with u = c * (random square-zero unit)
    diff: Dict[Tuple, Dict] = {}
    if units and rng.random() < 0.8:
        u = rng.choice(units)
        c = Q(rng.choice([1, -1, 2]))
        for a in labels:
            row: Dict = {}
            for o, v in mul.get((u, a), {}).items():
                row[o] = row.get(o, 0) + c * v
            sgn = -1 if degs[a] % 2 else 1
            for o, v in mul.get((a, u), {}).items():
                row[o] = row.get(o, 0) - sgn * c * v
            row = {o: v for o, v in row.items() if v != 0}
            if row:
                diff[(a,)] = row

    A = _conjugate(basis_pairs, diff, {k: v for k, v in mul.items()}, rng)
    return A


def _conjugate(basis_pairs, diff, mul, rng: random.Random) -> AInftyStructure:
    """Apply a random invertible degree-0 change of basis."""
    labels = [l for l, _ in basis_pairs]
    degs = dict(basis_pairs)
    idx = {l: t for t, l in enumerate(labels)}
    n = len(labels)

    # block-diagonal random invertible matrix over Q (per degree)
    g = sympy.zeros(n, n)
    for d in sorted(set(degs.values())):
        block = [t for t, l in enumerate(labels) if degs[l] == d]
        while True:
            M = sympy.Matrix(
                [[rng.randint(-2, 2) for _ in block] for _ in block]
            )
            if M.det() != 0:
                break
        for bi, i in enumerate(block):
            for bj, j in enumerate(block):
                g[i, j] = M[bi, bj]
    ginv = g.inv()

    def transform_lin(table):
        out = {}
        for a in labels:
            # d'(a) = g^{-1} d (g a)
            vec = sympy.zeros(n, 1)
            ga = g[:, idx[a]]
            for t in range(n):
                c = ga[t]
                if c == 0:
                    continue
                for o, v in table.get((labels[t],), {}).items():
                    vec[idx[o]] += c * v
            res = ginv * vec
            row = {
                labels[t]: Q(sympy.nsimplify(res[t]))
                for t in range(n)
                if res[t] != 0
            }
            if row:
                out[(a,)] = row
        return out

    def transform_mul(table):
        out = {}
        for a in labels:
            for b in labels:
                ga, gb = g[:, idx[a]], g[:, idx[b]]
                vec = sympy.zeros(n, 1)
                for t in range(n):
                    if ga[t] == 0:
                        continue
                    for s in range(n):
                        if gb[s] == 0:
                            continue
                        for o, v in table.get((labels[t], labels[s]), {}).items():
                            vec[idx[o]] += ga[t] * gb[s] * v
                res = ginv * vec
                row = {
                    labels[t]: Q(sympy.nsimplify(res[t]))
                    for t in range(n)
                    if res[t] != 0
                }
                if row:
                    out[(a, b)] = row
        return out

    B = GradedBasis(tuple(basis_pairs))
    ops = {}
    d2 = transform_lin(diff)
    if d2:
        ops[1] = MultilinearOp(1, B, B, 1, d2)
    m2 = transform_mul(mul)
    if m2:
        ops[2] = MultilinearOp(2, B, B, 0, m2)
    return AInftyStructure(B, ops)


# ---------------------------------------------------------------------------
# retraction onto cohomology
# ---------------------------------------------------------------------------


def retraction_onto_cohomology(A: AInftyStructure, rng: random.Random) -> RetractionData:
    """Split each degree as  B (+) im d (+) C  with random complements.

    i embeds chosen cocycle representatives, p projects along im d (+) C,
    and H inverts d from im d back to C.
    """
    basis = A.basis
    labels = list(basis.labels)
    degs = basis.degrees
    idx = {l: t for t, l in enumerate(labels)}
    d_op = A.m(1)
    by_deg: Dict[int, List] = {}
    for l in labels:
        by_deg.setdefault(degs[l], []).append(l)

    def d_matrix(k):
        """Matrix of d: A^k -> A^{k+1} in the label bases."""
        src = by_deg.get(k, [])
        tgt = by_deg.get(k + 1, [])
        M = sympy.zeros(len(tgt), len(src))
        for cidx, l in enumerate(src):
            for o, v in d_op.entries.get((l,), {}).items():
                M[tgt.index(o), cidx] = v
        return M, src, tgt

    # per-degree decomposition data
    sub_elems = []  # (label, degree) for B
    i_table: Dict = {}
    p_table: Dict = {}
    h_table: Dict = {}

    all_degs = sorted(by_deg)
    # precompute C^k (complement of ker d in A^k) and its image basis in A^{k+1}
    C_vecs: Dict[int, sympy.Matrix] = {}
    dC_vecs: Dict[int, sympy.Matrix] = {}
    for k in all_degs:
        M, src, tgt = d_matrix(k)
        if not src:
            continue
        ker = M.nullspace()
        rank = len(src) - len(ker)
        C = _random_complement(ker, len(src), rank, rng)
        C_vecs[k] = C
        dC_vecs[k] = M * C if rank else sympy.zeros(len(tgt), 0)

    for k in all_degs:
        src = by_deg[k]
        nk = len(src)
        Mk, _, _ = d_matrix(k)
        ker = Mk.nullspace()
        ker_mat = (
            sympy.Matrix.hstack(*ker) if ker else sympy.zeros(nk, 0)
        )
        im_prev = dC_vecs.get(k - 1, sympy.zeros(nk, 0))
        if im_prev.rows != nk:
            im_prev = sympy.zeros(nk, 0)
        # B^k: random complement of im d inside ker d
        Bk = _random_complement_within(ker_mat, im_prev, rng)
        Ck = C_vecs.get(k, sympy.zeros(nk, 0))
        full = sympy.Matrix.hstack(Bk, im_prev, Ck)
        assert full.shape == (nk, nk), "decomposition must be a basis"
        inv = full.inv()
        nB, nIm = Bk.cols, im_prev.cols

        for t in range(nB):
            lab = ("h", k, t)
            sub_elems.append((lab, k))
            i_table[(lab,)] = {
                src[s]: Q(sympy.nsimplify(Bk[s, t])) for s in range(nk) if Bk[s, t] != 0
            }
        # p: coordinates in the B-part
        for s in range(nk):
            row = {}
            for t in range(nB):
                if inv[t, s] != 0:
                    row[("h", k, t)] = Q(sympy.nsimplify(inv[t, s]))
            if row:
                p_table[(src[s],)] = row
        # H on A^k: send the im-d coordinates back to C^{k-1}
        Cprev = C_vecs.get(k - 1)
        if Cprev is not None and nIm:
            prev_src = by_deg[k - 1]
            for s in range(nk):
                row = {}
                for t in range(nIm):
                    c = inv[nB + t, s]
                    if c == 0:
                        continue
                    for u in range(len(prev_src)):
                        if Cprev[u, t] != 0:
                            lab = prev_src[u]
                            row[lab] = row.get(lab, 0) + Q(sympy.nsimplify(c * Cprev[u, t]))
                row = {o: v for o, v in row.items() if v != 0}
                if row:
                    h_table[(src[s],)] = row

    sub = GradedBasis(tuple(sub_elems))
    return RetractionData(
        ambient=A,
        sub_basis=sub,
        include=MultilinearOp(1, sub, basis, 0, i_table),
        project=MultilinearOp(1, basis, sub, 0, p_table),
        homotopy=MultilinearOp(1, basis, basis, -1, h_table),
    )


def _random_complement(ker: List[sympy.Matrix], dim: int, rank: int, rng):
    """A random rank-column matrix whose columns complement span(ker) in Q^dim."""
    ker_mat = sympy.Matrix.hstack(*ker) if ker else sympy.zeros(dim, 0)
    cols = []
    while len(cols) < rank:
        v = sympy.Matrix([[rng.randint(-2, 2)] for _ in range(dim)])
        test = sympy.Matrix.hstack(ker_mat, *cols, v) if cols else sympy.Matrix.hstack(ker_mat, v)
        if test.rank() == ker_mat.cols + len(cols) + 1:
            cols.append(v)
    return sympy.Matrix.hstack(*cols) if cols else sympy.zeros(dim, 0)


def _random_complement_within(ambient: sympy.Matrix, sub: sympy.Matrix, rng):
    """Random columns of span(ambient) complementing span(sub) inside it."""
    want = ambient.rank() - sub.cols
    cols = []
    attempts = 0
    while len(cols) < want:
        attempts += 1
        coeffs = [rng.randint(-2, 2) for _ in range(ambient.cols)]
        if attempts > 50:
            coeffs = [rng.randint(-5, 5) for _ in range(ambient.cols)]
        v = ambient * sympy.Matrix([[c] for c in coeffs])
        test = sympy.Matrix.hstack(sub, *cols, v) if cols else sympy.Matrix.hstack(sub, v)
        if test.rank() == sub.cols + len(cols) + 1:
            cols.append(v)
    return sympy.Matrix.hstack(*cols) if cols else sympy.zeros(ambient.rows, 0)


def _violates_dg_axioms(A: AInftyStructure) -> bool:
    """Brute-force Leibniz/associativity test, independent of the relation
    and bar-construction checkers it serves as a negative control for."""
    labels = A.basis.labels
    degs = A.basis.degrees
    d = A.m(1).entries
    m = A.m(2).entries

    def combine(row_fn, inputs):
        out: Dict = {}
        for lab, c in inputs.items():
            for o, v in row_fn(lab).items():
                out[o] = out.get(o, 0) + c * v
        return {o: v for o, v in out.items() if v != 0}

    for a in labels:
        for b in labels:
            ab = m.get((a, b), {})
            # Leibniz: d(ab) = (da)b + (-1)^{deg a} a(db)
            lhs = combine(lambda x: d.get((x,), {}), ab)
            rhs: Dict = {}
            for mid, c in d.get((a,), {}).items():
                for o, v in m.get((mid, b), {}).items():
                    rhs[o] = rhs.get(o, 0) + c * v
            sgn = -1 if degs[a] % 2 else 1
            for mid, c in d.get((b,), {}).items():
                for o, v in m.get((a, mid), {}).items():
                    rhs[o] = rhs.get(o, 0) + sgn * c * v
            rhs = {o: v for o, v in rhs.items() if v != 0}
            if lhs != rhs:
                return True
            for c_lab in labels:
                left = combine(lambda x: m.get((x, c_lab), {}), ab)
                right = combine(
                    lambda x: m.get((a, x), {}), m.get((b, c_lab), {})
                )
                if left != right:
                    return True
    return False


def corrupt_structure(A: AInftyStructure, rng: random.Random) -> AInftyStructure:
    """Perturb one m_2 entry so the dg axioms demonstrably fail.

    Candidate single-entry perturbations are tried in seeded random order
    until one breaks Leibniz or associativity under the brute-force check
    above, so every returned structure is a genuine negative control."""
    B = A.basis
    m2 = A.m(2)
    entries = {k: dict(v) for k, v in m2.entries.items()}
    candidates = sorted(
        ((k, o) for k, row in entries.items() for o in row), key=repr
    )
    if not candidates:
        raise ValueError("nothing to corrupt")
    rng.shuffle(candidates)
    for k, o in candidates:
        perturbed = {kk: dict(vv) for kk, vv in entries.items()}
        perturbed[k][o] = perturbed[k][o] + 1
        ops = dict(A.ops)
        ops[2] = MultilinearOp(2, B, B, 0, perturbed)
        bad = AInftyStructure(B, ops)
        if _violates_dg_axioms(bad):
            return bad
    raise ValueError("no single-entry perturbation breaks the structure")
