"""sigma-modules, Higgs modules and the correspondence functors M_q and H_q.

Modules are free with a chosen basis e_1..e_r.  Matrices act on columns:
column j holds the image of e_j.
"""
from __future__ import annotations

import random

from . import linalg
from .errors import HypothesisViolated, NotCertifiedQuasiNilpotent, RankDeficient
from .frobenius import divided_frobenius, phi_operator
from .ore import OreOp
from .qarith import CoordPoly, TwistPoly, frobenius_embed, frobenius_restrict, q_derive, q_int, sigma_apply
from .qarith.rings import BaseRing


# ---------------------------------------------------------------------------
# generic matrices with entries in a commutative ring of polynomials

def mat_zero(cls, ring, r, c=None):
    return [[cls.zero(ring) for _ in range(r if c is None else c)] for _ in range(r)]


def mat_identity(cls, ring, r):
    m = mat_zero(cls, ring, r)
    for i in range(r):
        m[i][i] = cls.one(ring)
    return m


def mat_mul(A, B):
    out = []
    for i in range(len(A)):
        row = []
        for j in range(len(B[0]) if B else 0):
            acc = A[i][0] * B[0][j]
            for t in range(1, len(B)):
                acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A, c):
    return [[a * c for a in r] for r in A]


def mat_is_zero(A):
    return all(not a for r in A for a in r)


def mat_apply(A, v):
    return [sum((A[i][j] * v[j] for j in range(len(v))), type(v[0]).zero(v[0].ring)) if v else None
            for i in range(len(A))]


def _entry_json(e):
    return [[str(c) for c in e.coeff(n).c] for n in range(e.degree() + 1)]


def _require(ring: BaseRing, p: int):
    if p is None:
        raise HypothesisViolated("a prime p is required")
    if q_int(p, ring) or ring.q ** p != ring.one:
        raise HypothesisViolated(f"(p)_q = 0 and q^p = 1 are required in {ring!r}")
    if not ring.is_q_divisible:
        raise HypothesisViolated(f"{ring!r} is not q-divisible")


# ---------------------------------------------------------------------------

class HiggsModule:
    """Free A'-module of rank r with endomorphism Theta (r x r over A')."""

    def __init__(self, ring: BaseRing, theta, p: int | None = None):
        self.ring = ring
        self.p = p or ring.p
        self.theta = [[e if isinstance(e, TwistPoly) else TwistPoly.const(ring, e) for e in row] for row in theta]
        self.rank = len(self.theta)

    def apply(self, v):
        if not self.rank:
            return []
        return [sum((self.theta[i][j] * v[j] for j in range(self.rank)), TwistPoly.zero(self.ring))
                for i in range(self.rank)]

    def nilpotency_index(self, bound=None):
        """Least n with Theta^n = 0 (n <= bound, default rank), or None."""
        bound = self.rank if bound is None else bound
        if self.rank == 0:
            return 0
        P = mat_identity(TwistPoly, self.ring, self.rank)
        for n in range(1, bound + 1):
            P = mat_mul(P, self.theta)
            if mat_is_zero(P):
                return n
        return None

    def __eq__(self, other):
        return isinstance(other, HiggsModule) and self.ring == other.ring and self.theta == other.theta

    def to_json(self):
        return {"ring": self.ring.name, "rank": self.rank,
                "matrix": [[_entry_json(e) for e in row] for row in self.theta]}

    def __repr__(self):
        return f"HiggsModule(rank={self.rank}, theta={[[str(e) for e in r] for r in self.theta]})"


class SigmaModule:
    """Free A-module of rank r with sigma-derivation given by its matrix on the basis."""

    def __init__(self, ring: BaseRing, matrix, p: int | None = None):
        self.ring = ring
        self.p = p or ring.p
        self.matrix = [[e if isinstance(e, CoordPoly) else CoordPoly.const(ring, e) for e in row] for row in matrix]
        self.rank = len(self.matrix)

    @classmethod
    def trivial(cls, ring, p=None):
        """(A, d_sigma)."""
        return cls(ring, [[CoordPoly.zero(ring)]], p)

    def zero_vec(self):
        return [CoordPoly.zero(self.ring) for _ in range(self.rank)]

    def basis_vec(self, j, a=None):
        v = self.zero_vec()
        v[j] = CoordPoly.one(self.ring) if a is None else a
        return v

    def apply_d(self, v):
        """d_M(sum a_j e_j) = sum d(a_j) e_j + sigma(a_j) d_M(e_j)."""
        out = [q_derive(a) for a in v]
        for j, a in enumerate(v):
            if not a:
                continue
            s = sigma_apply(a)
            for i in range(self.rank):
                m = self.matrix[i][j]
                if m:
                    out[i] = out[i] + s * m
        return out

    def apply_d_power(self, v, k):
        for _ in range(k):
            v = self.apply_d(v)
        return v

    def apply_op(self, D: OreOp, v):
        out = self.zero_vec()
        cur = v
        for k in range(D.order() + 1):
            if k:
                cur = self.apply_d(cur)
            c = D.terms.get(k)
            if c is not None:
                out = [o + c * w for o, w in zip(out, cur)]
        return out

    def to_json(self):
        return {"ring": self.ring.name, "rank": self.rank,
                "matrix": [[_entry_json(e) for e in row] for row in self.matrix]}

    def __repr__(self):
        return f"SigmaModule(rank={self.rank}, matrix={[[str(e) for e in r] for r in self.matrix]})"


def is_zero_vec(v):
    return all(not a for a in v)


# ---------------------------------------------------------------------------
# quasi-nilpotence

def quasi_nilpotence_certificate(obj, K: int = None):
    """Witnesses that every generator is killed by a power of the operator.

    Higgs: least n <= K with Theta^n = 0.  sigma-modules (with q^p = 1): for
    each A'-generator x^i e_j (i < p) the least n <= K with d^n(x^i e_j) = 0;
    since d^p is A'-linear these generators control all of M.
    """
    if isinstance(obj, HiggsModule):
        K = obj.rank if K is None else K
        n = obj.nilpotency_index(K)
        return {"kind": "higgs", "certified": n is not None, "n": n, "witnesses": []}
    M = obj
    p = M.p
    if M.ring.q ** p != M.ring.one:
        raise HypothesisViolated("generator-wise certificate needs q^p = 1")
    K = p * (M.rank + 1) if K is None else K
    wits = []
    certified = True
    for j in range(M.rank):
        for i in range(p):
            v = M.basis_vec(j, CoordPoly.monomial(M.ring, i))
            n = None
            for k in range(K + 1):
                if is_zero_vec(v):
                    n = k
                    break
                v = M.apply_d(v)
            wits.append({"generator": (i, j), "n": n})
            if n is None:
                certified = False
    return {"kind": "sigma", "certified": certified,
            "n": max((w["n"] for w in wits), default=0) if certified else None, "witnesses": wits}


# ---------------------------------------------------------------------------
# M_q

def mq_functor(H: HiggsModule) -> SigmaModule:
    """M = A (x)_{A'} H with d_M(1 (x) h) = x^(p-1) (x) Theta(h)."""
    ring, p = H.ring, H.p
    _require(ring, p)
    if H.rank and H.nilpotency_index() is None:
        raise NotCertifiedQuasiNilpotent("Theta is not nilpotent")
    xp1 = CoordPoly.monomial(ring, p - 1)
    mat = [[xp1 * frobenius_embed(e, p) for e in row] for row in H.theta]
    return SigmaModule(ring, mat, p)


def mq_morphism(F):
    """M_q on morphisms: the A'-matrix F viewed over A."""
    return [[frobenius_embed(e) for e in row] for row in F]


def is_higgs_morphism(F, H1: HiggsModule, H2: HiggsModule):
    """F Theta_1 = Theta_2 F."""
    return mat_is_zero(mat_sub(mat_mul(F, H1.theta), mat_mul(H2.theta, F)))


def is_sigma_morphism(F, M1: SigmaModule, M2: SigmaModule, degree_bound: int = 6):
    """Check F d_1(m) = d_2(F m) on m = x^n e_j for n <= degree_bound."""
    ring = M1.ring
    for j in range(M1.rank):
        for n in range(degree_bound + 1):
            m = M1.basis_vec(j, CoordPoly.monomial(ring, n))
            lhs = _mat_vec(F, M1.apply_d(m), ring)
            rhs = M2.apply_d(_mat_vec(F, m, ring))
            if lhs != rhs:
                return False
    return True


def _mat_vec(F, v, ring):
    return [sum((F[i][j] * v[j] for j in range(len(v))), CoordPoly.zero(ring)) for i in range(len(F))]


# ---------------------------------------------------------------------------
# H_q

class _Flat:
    """Flattening of vectors of M in x-degree <= D to coordinates over Z or F_p."""

    def __init__(self, ring, r, D):
        self.ring = ring
        self.r = r
        self.D = D
        self.rr = ring.rank
        self.size = r * (D + 1) * self.rr
        self.basis = ring.basis()

    def index(self, j, n, t):
        return (j * (self.D + 1) + n) * self.rr + t

    def columns(self):
        for j in range(self.r):
            for n in range(self.D + 1):
                for t in range(self.rr):
                    yield j, n, t

    def vec_of(self, j, n, t):
        v = [CoordPoly.zero(self.ring) for _ in range(self.r)]
        v[j] = CoordPoly.monomial(self.ring, n, self.basis[t])
        return v

    def unflatten(self, coords):
        v = [dict() for _ in range(self.r)]
        for (j, n, t), z in zip(self.columns(), coords):
            if z:
                v[j][n] = v[j].get(n, self.ring.zero) + self.basis[t] * z
        return [CoordPoly(self.ring, d) for d in v]

    def degree_of(self, coords):
        deg = -1
        for (j, n, t), z in zip(self.columns(), coords):
            if z and n > deg:
                deg = n
        return deg


def _coords_dict(vecs, ring, key_prefix, out):
    for j, a in enumerate(vecs):
        for n, c in a.terms.items():
            for t, z in enumerate(ring.coords(c)):
                if z:
                    out[key_prefix + (j, n, t)] = z


def _solution_lattice(M: SigmaModule, K: int, D: int, modulus: int, nil: int | None = None):
    """Z- (or F_p-) kernel of m -> (Phi(d^k) m - d^k m)_{k <= K} in x-degree <= D.

    With ``nil`` = n such that d^n kills M, the terms d^(pj) with pj >= n
    act as zero and the conditions with k >= n hold trivially, so both are
    dropped.
    """
    ring, p = M.ring, M.p
    flat = _Flat(ring, M.rank, D)
    if nil is not None:
        K = min(K, max(nil - 1, 0))
        jterms = (nil - 1) // p + 1 if nil else 0
    else:
        jterms = None
    ops = [phi_operator(k, (k + 1) if jterms is None else min(k + 1, jterms), ring, p) for k in range(1, K + 1)]
    rowkeys = {}
    cols = []
    for (j, n, t) in flat.columns():
        v = flat.vec_of(j, n, t)
        out = {}
        cur = v
        for k in range(1, K + 1):
            cur = M.apply_d(cur)
            lhs = M.apply_op(ops[k - 1], v)
            diff = [a - b for a, b in zip(lhs, cur)]
            _coords_dict(diff, ring, (k,), out)
        for key in out:
            rowkeys.setdefault(key, len(rowkeys))
        cols.append(out)
    mat = [[0] * flat.size for _ in range(len(rowkeys))]
    for ci, out in enumerate(cols):
        for key, z in out.items():
            mat[rowkeys[key]][ci] = z
    if not rowkeys:
        ker = [[1 if i == c else 0 for i in range(flat.size)] for c in range(flat.size)]
    else:
        ker = linalg.kernel(mat, flat.size, modulus)
    return flat, mat, ker


def _nilpotency_bound(M: SigmaModule, n_gen):
    """n with d^n = 0 on all of M, from the generator-wise certificate.

    d^p is central, so for m = pc + s with pc >= n_gen,
    d^m(x^(pa) x^i e_j) = d^s(x^(pa) d^(pc)(x^i e_j)) = 0.
    """
    if n_gen is None:
        return None
    p = M.p
    return p * (-(-n_gen // p))


def _restrict_columns(mat, flat, Dlow):
    keep = [flat.index(j, n, t) for (j, n, t) in flat.columns() if n <= Dlow]
    return keep, [[row[c] for c in keep] for row in mat]


def _mul_xp(vec_coords, flat, p):
    """Coordinates of x^p * v (requires degree <= D - p)."""
    out = [0] * flat.size
    for (j, n, t), z in zip(flat.columns(), vec_coords):
        if z:
            out[flat.index(j, n + p, t)] = z
    return out


def _mul_basis(vec_coords, flat, b, modulus):
    v = flat.unflatten(vec_coords)
    w = [a.scale(b) for a in v]
    out = [0] * flat.size
    for j, a in enumerate(w):
        for n, c in a.terms.items():
            for t, z in enumerate(flat.ring.coords(c)):
                out[flat.index(j, n, t)] = z % modulus if modulus else z
    return out


def _modulus(ring):
    m = ring.int_modulus
    if m == 0:
        return 0
    if ring.N == 1 or ring.q_one:
        return ring.p
    raise HypothesisViolated(f"kernels over Z/p^N with N > 1 are not supported ({ring!r})")


class HqResult:
    def __init__(self, higgs, generators, raw_theta, report):
        self.higgs = higgs
        self.generators = generators
        self.raw_theta = raw_theta
        self.report = report


def hq_functor(M: SigmaModule, K: int, D: int, expected_rank: int | None = None) -> HqResult:
    """H = {m : Phi(d^k) m = d^k m, 1 <= k <= K} computed in x-degree <= D.

    Returns the generators found, the literal matrix of d^p on them (the
    Higgs field of H_q(M)) and a report.  Raises RankDeficient when the
    solution space does not yield ``expected_rank`` (default: rank of M)
    A'-generators within the bounds.
    """
    ring, p = M.ring, M.p
    _require(ring, p)
    expected_rank = M.rank if expected_rank is None else expected_rank
    if M.rank == 0:
        return HqResult(HiggsModule(ring, [], p), [], [], {"rank": 0, "ok": True})
    qn = quasi_nilpotence_certificate(M, K=p * (M.rank + 1))
    if not qn["certified"]:
        raise NotCertifiedQuasiNilpotent("d_M is not certified quasi-nilpotent on generators")
    modulus = _modulus(ring)
    flat, mat, ker = _solution_lattice(M, K, D, modulus, _nilpotency_bound(M, qn["n"]))
    rr = ring.rank
    # sub-lattice x^p * (solutions of degree <= D - p)
    if D - p >= 0:
        keep, sub = _restrict_columns(mat, flat, D - p)
        ker_low_small = linalg.kernel(sub, len(keep), modulus) if sub else [
            [1 if i == c else 0 for i in range(len(keep))] for c in range(len(keep))]
        ker_low = []
        for v in ker_low_small:
            full = [0] * flat.size
            for c, z in zip(keep, v):
                full[c] = z
            ker_low.append(_mul_xp(full, flat, p))
    else:
        ker_low = []
    target_rank = len(ker)
    # echelon form of the solution lattice with high degrees first
    order = sorted(range(flat.size), key=lambda c: -list(flat.columns())[c][1])
    perm_rows = [[v[c] for c in order] for v in ker]
    if modulus:
        ech, _ = linalg.rref_mod_p(perm_rows, flat.size, modulus)
    else:
        ech, _ = linalg.rref_int(perm_rows, flat.size)
    inv = [0] * flat.size
    for pos, c in enumerate(order):
        inv[c] = pos
    cands = [[row[inv[c]] for c in range(flat.size)] for row in ech]
    cands.sort(key=lambda v: (flat.degree_of(v), [abs(z) for z in v]))
    span = list(ker_low)
    cur_rank = linalg.rank(span, flat.size, modulus) if span else 0
    gens = []
    for c in cands:
        if cur_rank == target_rank:
            break
        trial = span + [c]
        r_new = linalg.rank(trial, flat.size, modulus)
        if r_new > cur_rank:
            gens.append(c)
            span = span + [_mul_basis(c, flat, b, modulus) for b in flat.basis]
            cur_rank = linalg.rank(span, flat.size, modulus)
    saturated = True
    if modulus == 0 and span:
        saturated = linalg.is_saturated(span, flat.size)
    gen_vecs = [flat.unflatten(g) for g in gens]
    degs = [flat.degree_of(g) for g in gens]
    free_count = sum(rr * ((D - d) // p + 1) for d in degs)
    report = {
        "solution_rank": target_rank,
        "generators": len(gens),
        "generator_degrees": degs,
        "saturated": saturated,
        "free": free_count == target_rank,
        "K": K,
        "D": D,
    }
    if len(gens) != expected_rank or not saturated or free_count != target_rank:
        raise RankDeficient(
            f"H_q within bounds K={K}, D={D} produced {len(gens)} generators (expected {expected_rank})",
            achieved_rank=len(gens),
        )
    raw = _induced_dp_matrix(M, gen_vecs, p, modulus)
    report["ok"] = True
    return HqResult(HiggsModule(ring, raw, p), gen_vecs, raw, report)


def _induced_dp_matrix(M: SigmaModule, gens, p, modulus):
    """Matrix over A' of d^p on the A'-span of ``gens``."""
    ring = M.ring
    r = len(gens)
    images = [M.apply_d_power(g, p) for g in gens]
    top = max([max((a.degree() for a in v), default=0) for v in images + gens] + [0])
    Dg = top + p
    # unknowns: x'^a * b_t * g_i, for p*a + deg(g_i) <= Dg
    unknowns = []
    colvecs = []
    for i, g in enumerate(gens):
        dg = max(a.degree() for a in g)
        for a in range((Dg - dg) // p + 1):
            for t, b in enumerate(ring.basis()):
                unknowns.append((i, a, t))
                colvecs.append([c.shift(p * a).scale(b) for c in g])
    rowkeys = {}
    cols = []
    for v in colvecs:
        out = {}
        _coords_dict(v, ring, (), out)
        for k in out:
            rowkeys.setdefault(k, len(rowkeys))
        cols.append(out)
    theta = [[TwistPoly.zero(ring) for _ in range(r)] for _ in range(r)]
    for j, w in enumerate(images):
        out = {}
        _coords_dict(w, ring, (), out)
        for k in out:
            rowkeys.setdefault(k, len(rowkeys))
        mat = [[0] * len(cols) for _ in range(len(rowkeys))]
        for ci, o in enumerate(cols):
            for k, z in o.items():
                mat[rowkeys[k]][ci] = z
        rhs = [0] * len(rowkeys)
        for k, z in out.items():
            rhs[rowkeys[k]] = z
        if modulus:
            sol = linalg.solve_mod_p(mat, rhs, len(cols), modulus)
        else:
            sol = linalg.solve_q(mat, rhs, len(cols))
            if sol is not None and any(s.denominator != 1 for s in sol):
                sol = None
            elif sol is not None:
                sol = [int(s) for s in sol]
        if sol is None:
            raise RankDeficient("d^p does not preserve the A'-span of the generators", achieved_rank=r)
        basis = ring.basis()
        for (i, a, t), z in zip(unknowns, sol):
            if z:
                theta[i][j] = theta[i][j] + TwistPoly.monomial(ring, a, basis[t] * z)
    return theta


# ---------------------------------------------------------------------------
# normalization of the Higgs field

def dp_series(ring, p, order):
    """Coefficients b_k (k = 1..order) in A' of g(u) = sum_k B_{k,p}(q) x'^(k-1) u^k."""
    out = []
    for k in range(1, order + 1):
        c = divided_frobenius(k, p, ring).coeff(p)
        b = c.coeff(p * k - p) if c else ring.zero
        if c and set(c.terms) != {p * k - p}:
            raise AssertionError("unexpected shape of [F*] coefficient")
        out.append(TwistPoly.monomial(ring, k - 1, b))
    return out


def _series_mul(a, b, order, ring):
    out = [TwistPoly.zero(ring) for _ in range(order + 1)]
    for i, x in enumerate(a):
        if not x:
            continue
        for j, y in enumerate(b):
            if i + j > order:
                break
            out[i + j] = out[i + j] + x * y
    return out


def inverse_series(ring, p, order):
    """Coefficients h_1..h_order of the compositional inverse of g."""
    g = [TwistPoly.zero(ring)] + dp_series(ring, p, order)
    b1 = g[1].coeff(0)
    b1inv = ring.invert(b1)
    h = [TwistPoly.zero(ring), TwistPoly.const(ring, b1inv)]
    gpows = [[TwistPoly.one(ring)] + [TwistPoly.zero(ring)] * order, g]
    for k in range(2, order + 1):
        gpows.append(_series_mul(gpows[-1], g, order, ring))
    for n in range(2, order + 1):
        acc = TwistPoly.zero(ring)
        for k in range(1, n):
            acc = acc + h[k] * gpows[k][n]
        h.append((-acc).scale(b1inv ** n))
    return h[1:]


def apply_series(coeffs, Theta, ring):
    """sum_{k>=1} c_k Theta^k (coefficient list c_1, c_2, ...)."""
    r = len(Theta)
    out = mat_zero(TwistPoly, ring, r)
    P = mat_identity(TwistPoly, ring, r)
    for c in coeffs:
        P = mat_mul(P, Theta)
        if mat_is_zero(P):
            break
        out = mat_add(out, mat_scale(P, c))
    return out


def normalize_higgs(H: HiggsModule) -> HiggsModule:
    """Replace the literal d^p-field u by g^{-1}(u), the field of the Higgs module."""
    if H.rank == 0:
        return H
    h = inverse_series(H.ring, H.p, H.rank)
    return HiggsModule(H.ring, apply_series(h, H.theta, H.ring), H.p)


def expected_dp_field(H: HiggsModule):
    """g(Theta): the predicted matrix of d^p on 1 (x) H inside M_q(H)."""
    if H.rank == 0:
        return []
    return apply_series(dp_series(H.ring, H.p, H.rank), H.theta, H.ring)


# ---------------------------------------------------------------------------
# round trip and randomized examples

def generator_matrix(gens, p):
    """A'-matrix whose column j holds the coordinates of generator j (must lie in 1 (x) H)."""
    r = len(gens)
    Pm = []
    for i in range(r):
        row = []
        for j in range(r):
            t = frobenius_restrict(gens[j][i], p)
            if t is None:
                return None
            row.append(t)
        Pm.append(row)
    return Pm


def round_trip(H: HiggsModule, K: int | None = None, D: int | None = None):
    """H_q(M_q(H)) compared with H after normalization and change of generators."""
    p = H.p
    r = H.rank
    M = mq_functor(H)
    if r == 0:
        return {"ok": True, "rank": 0}
    K = K if K is not None else p * (r + 1)
    D = D if D is not None else 2 * p
    try:
        res = hq_functor(M, K, D)
    except RankDeficient as exc:
        return {
            "ok": False,
            "rank": exc.achieved_rank,
            "error": "RankDeficient",
            "message": str(exc),
            "raw_dp_is_theta_on_flat_part": mat_is_zero(mat_sub(expected_dp_field(H), H.theta)),
        }
    Pm = generator_matrix(res.generators, p)
    ok_contained = Pm is not None
    # the flat sections 1 (x) e_j must themselves be solutions
    raw_expected = expected_dp_field(H)
    Hn = normalize_higgs(res.higgs)
    ok_theta = False
    ok_raw = False
    if ok_contained:
        ok_theta = mat_is_zero(mat_sub(mat_mul(Pm, Hn.theta), mat_mul(H.theta, Pm)))
        ok_raw = mat_is_zero(mat_sub(mat_mul(Pm, res.raw_theta), mat_mul(raw_expected, Pm)))
    unimodular = ok_contained and _unit_det(Pm, H.ring)
    return {
        "ok": ok_contained and ok_theta and unimodular,
        "rank": len(res.generators),
        "generators_in_flat_part": ok_contained,
        "change_of_basis_unimodular": unimodular,
        "normalized_theta_equal": ok_theta,
        "raw_dp_equals_g_theta": ok_raw,
        "raw_dp_equals_theta": ok_contained and mat_is_zero(
            mat_sub(mat_mul(Pm, res.raw_theta), mat_mul(H.theta, Pm))),
        "report": res.report,
    }


def _unit_det(Pm, ring):
    """Determinant of a square A'-matrix is a unit of R (Leibniz expansion; r <= 4)."""
    from itertools import permutations
    r = len(Pm)
    det = TwistPoly.zero(ring)
    for perm in permutations(range(r)):
        sign = 1
        for i in range(r):
            for j in range(i + 1, r):
                if perm[i] > perm[j]:
                    sign = -sign
        term = TwistPoly.one(ring)
        for i in range(r):
            term = term * Pm[i][perm[i]]
        det = det + term * sign
    return det.degree() == 0 and ring.is_unit(det.coeff(0))


def random_ring_value(ring, rng, size=2):
    if ring.rank is None:
        return ring.element([rng.randint(-size, size) for _ in range(3)])
    if ring.rank == 1:
        return ring.element([rng.randint(-size, size)])
    return ring.element([rng.randint(-size, size) for _ in range(ring.rank)])


def random_twist(ring, rng, degree=2, size=2):
    return TwistPoly(ring, {a: random_ring_value(ring, rng, size) for a in range(degree + 1)})


def random_nilpotent_higgs(ring, p, r, rng: random.Random, degree=2):
    """Random graded nilpotent field, conjugated by a random graded unipotent matrix.

    Basis vectors get weights p*a_j with a_1 < ... < a_r (gaps at most
    ``degree``); entry (i, j) is c * x'^(a_j - a_i - 1), so Theta is strictly
    upper triangular and the Higgs and q-de Rham complexes are graded.
    """
    a = [0]
    for _ in range(r - 1):
        a.append(a[-1] + rng.randint(1, max(1, degree)))
    T = mat_zero(TwistPoly, ring, r)
    for i in range(r):
        for j in range(i + 1, r):
            c = random_ring_value(ring, rng)
            if i + 1 == j and not c:
                c = ring.one
            T[i][j] = TwistPoly(ring, {a[j] - a[i] - 1: c})
    U = mat_identity(TwistPoly, ring, r)
    Uinv = mat_identity(TwistPoly, ring, r)
    if r >= 2:
        c = random_ring_value(ring, rng, 1)
        i, j = sorted(rng.sample(range(r), 2))
        U[i][j] = TwistPoly(ring, {a[j] - a[i]: c})
        Uinv[i][j] = TwistPoly(ring, {a[j] - a[i]: -c})
    return HiggsModule(ring, mat_mul(mat_mul(U, T), Uinv), p)


def nilpotent_example(ring, p, r=2):
    """Theta = the nilpotent Jordan block (1 above the diagonal)."""
    T = mat_zero(TwistPoly, ring, r)
    for i in range(r - 1):
        T[i][i + 1] = TwistPoly.one(ring)
    return HiggsModule(ring, T, p)


def leibniz_check(M: SigmaModule, a: CoordPoly, v):
    """d_M(a m) = d(a) m + sigma(a) d_M(m)."""
    lhs = M.apply_d([a * c for c in v])
    dm = M.apply_d(v)
    da = q_derive(a)
    sa = sigma_apply(a)
    rhs = [da * c + sa * d for c, d in zip(v, dm)]
    return lhs == rhs


def in_column_image(A, v, ring, degree_bound):
    """Is v = A w for some w over A' with x'-degree <= degree_bound?  (bounded linear solve)"""
    r = len(A)
    c = len(A[0]) if A else 0
    basis = ring.basis()
    cols = []
    for j in range(c):
        for a in range(degree_bound + 1):
            for b in basis:
                cols.append([A[i][j] * TwistPoly.monomial(ring, a, b) for i in range(r)])
    rowkeys = {}
    outs = []
    for col in cols + [v]:
        o = {}
        _coords_dict(col, ring, (), o)
        for k in o:
            rowkeys.setdefault(k, len(rowkeys))
        outs.append(o)
    if not rowkeys:
        return True
    mat = [[0] * len(cols) for _ in range(len(rowkeys))]
    for ci, o in enumerate(outs[:-1]):
        for k, z in o.items():
            mat[rowkeys[k]][ci] = z
    rhs = [0] * len(rowkeys)
    for k, z in outs[-1].items():
        rhs[rowkeys[k]] = z
    modulus = _modulus(ring)
    if modulus:
        return linalg.solve_mod_p(mat, rhs, len(cols), modulus) is not None
    sol = linalg.solve_q(mat, rhs, len(cols))
    if sol is None:
        return False
    if all(z.denominator == 1 for z in sol):
        return True
    # rational solution exists; look for an integral one through the Smith form
    aug = [row + [b] for row, b in zip(mat, rhs)]
    return linalg.smith_diagonal(mat, len(cols)) == linalg.smith_diagonal(aug, len(cols) + 1)


def dp_theta_check(H: HiggsModule, degree_bound: int = 4):
    """Is d_M^p(1 (x) e_j) - 1 (x) Theta(e_j) in the image of Theta^2 for every j?

    The difference is computed literally in M_q(H) and pulled back to H.
    """
    M = mq_functor(H)
    p = H.p
    ring = H.ring
    T2 = mat_mul(H.theta, H.theta) if H.rank else []
    results = []
    for j in range(H.rank):
        lhs = M.apply_d_power(M.basis_vec(j), p)
        ej = [TwistPoly.one(ring) if i == j else TwistPoly.zero(ring) for i in range(H.rank)]
        th = H.apply(ej)
        diff = [a - frobenius_embed(t, p) for a, t in zip(lhs, th)]
        pulled = [frobenius_restrict(d, p) for d in diff]
        if any(t is None for t in pulled):
            results.append(False)
            continue
        results.append(in_column_image(T2, pulled, ring, degree_bound))
    return {"ok": all(results), "per_generator": results}
