"""q-twisted differential operators as an Ore extension of A = R[x].

An ``OreRing`` fixes the commutation rule

    d * z = sigma^e(z) d + c * d_{sigma^e}(z)

with e = 1, c = 1 for the usual ring D_{A,sigma} and e = p, c = (p)_q for the
level -1 operators.  Operators are kept in left-normal form sum_k a_k d^k.
"""
from __future__ import annotations

from .errors import HypothesisViolated, NotAUnit, ParamMismatch
from .qarith import CoordPoly, TwistPoly, frobenius_embed, q_int, sigma_apply
from .qarith import q_derive as _q_derive
from .qarith.rings import BaseRing, RingValue
from . import linalg
from .tpd import TPDParams, TwistedPDElem, taylor, tpd_mul


class OreRing:
    __slots__ = ("ring", "e", "c", "_cache", "_key")

    def __init__(self, ring: BaseRing, e: int = 1, c=None):
        self.ring = ring
        self.e = e
        self.c = ring.one if c is None else ring.coerce(c)
        self._cache = {}
        self._key = (ring, e, self.c)

    @classmethod
    def standard(cls, ring):
        return _standard(ring)

    @classmethod
    def level_minus_one(cls, ring, p=None):
        p = p or ring.p
        return cls(ring, e=p, c=q_int(p, ring))

    def __eq__(self, other):
        return isinstance(other, OreRing) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"OreRing({self.ring!r}, e={self.e}, c={self.c})"

    def sigma(self, a):
        return sigma_apply(a, self.e)

    def derive(self, a):
        return _q_derive(a, self.e)

    def op(self, terms):
        return OreOp(self, terms)

    def one(self):
        return OreOp(self, {0: CoordPoly.one(self.ring)})

    def d(self, k=1):
        return OreOp(self, {k: CoordPoly.one(self.ring)})

    def x(self, n=1):
        return OreOp(self, {0: CoordPoly.monomial(self.ring, n)})

    def coord(self, a):
        return OreOp(self, {0: a})

    def d_times_mono(self, k, n):
        """Left-normal form of d^k * x^n, cached."""
        key = (k, n)
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        if k == 0:
            res = {0: CoordPoly.monomial(self.ring, n)}
        else:
            prev = self.d_times_mono(k - 1, n)
            res = {}
            for j, b in prev.items():
                s = self.sigma(b)
                if s:
                    res[j + 1] = res[j + 1] + s if j + 1 in res else s
                t = self.derive(b).scale(self.c)
                if t:
                    res[j] = res[j] + t if j in res else t
            res = {j: v for j, v in res.items() if v}
        self._cache[key] = res
        return res


_STANDARD = {}


def _standard(ring):
    r = _STANDARD.get(ring)
    if r is None:
        r = _STANDARD[ring] = OreRing(ring)
    return r


class OreOp:
    """Operator sum_k a_k d^k in left-normal form."""

    __slots__ = ("R", "terms", "_hash")

    def __init__(self, R: OreRing, terms=None):
        self.R = R
        self.terms = {k: c for k, c in (terms or {}).items() if c}
        self._hash = None

    @property
    def ring(self):
        return self.R.ring

    def _coerce(self, other):
        if isinstance(other, OreOp):
            if other.R != self.R:
                raise ParamMismatch("operators from different rings")
            return other
        if isinstance(other, CoordPoly):
            return OreOp(self.R, {0: other})
        if isinstance(other, (RingValue, int)):
            return OreOp(self.R, {0: CoordPoly.const(self.ring, other)})
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for k, c in o.terms.items():
            out[k] = out[k] + c if k in out else c
        return OreOp(self.R, out)

    __radd__ = __add__

    def __neg__(self):
        return OreOp(self.R, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ore_mul(self, o)

    def __rmul__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return ore_mul(o, self)

    def __pow__(self, e):
        result = self.R.one()
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.R, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, k):
        return self.terms.get(k, CoordPoly.zero(self.ring))

    def order(self):
        return max(self.terms) if self.terms else -1

    def items(self):
        return sorted(self.terms.items())

    def truncate(self, K):
        """Drop d-degrees >= K."""
        return OreOp(self.R, {k: c for k, c in self.terms.items() if k < K})

    def __repr__(self):
        return f"OreOp({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for k, c in sorted(self.terms.items()):
            d = "" if k == 0 else ("d" if k == 1 else f"d^{k}")
            parts.append(f"[{c}]*{d}" if d else f"[{c}]")
        return " + ".join(parts)


def ore_mul(D1: OreOp, D2: OreOp) -> OreOp:
    if D1.R != D2.R:
        raise ParamMismatch("operators from different rings")
    R = D1.R
    out = {}
    for k, a in D1.terms.items():
        for l, b in D2.terms.items():
            # a d^k b d^l = a * (d^k b) * d^l
            for n, bn in b.terms.items():
                for j, c in R.d_times_mono(k, n).items():
                    v = (a * c).scale(bn)
                    if v:
                        out[j + l] = out[j + l] + v if j + l in out else v
    return OreOp(R, out)


def ore_apply(D: OreOp, a: CoordPoly) -> CoordPoly:
    """Action on A: d acts by c * d_{sigma^e}."""
    R = D.R
    out = CoordPoly.zero(R.ring)
    cur = a
    for k in range(D.order() + 1):
        if k:
            cur = R.derive(cur).scale(R.c)
        if not cur:
            break
        ck = D.terms.get(k)
        if ck is not None:
            out = out + ck * cur
    return out


def pairing(D: OreOp, e: TwistedPDElem) -> CoordPoly:
    """<sum a_k d^k, sum b_m xi^[m]> = sum_k a_k b_k."""
    if e.params != TPDParams.principal(D.ring):
        raise ParamMismatch("pairing is defined against the principal A<xi>_{q,y}")
    out = CoordPoly.zero(D.ring)
    for k, a in D.terms.items():
        b = e.terms.get(k)
        if b is not None:
            out = out + a * b
    return out


def duality_rhs(D1: OreOp, D2: OreOp, e: TwistedPDElem) -> CoordPoly:
    """<D1 (x) D2, Delta(e)>: contraction through the comultiplication.

    For e = sum_n a_n xi^[n] this is
        sum_n a_n <D1, sum_i xi^[n-i] T(<D2, xi^[i]>)>
    with T the Taylor map (the right A-structure on principal parts), so that it equals <D1 D2, e> when the Ore product is
    dual to the comultiplication.
    """
    P = e.params
    top = max(D1.order(), 0)
    out = CoordPoly.zero(D1.ring)
    for n, a in e.terms.items():
        acc = P.zero()
        for i in range(n + 1):
            c = pairing(D2, P.gen(i))
            if not c:
                continue
            acc = acc + tpd_mul(taylor(c, top, P), P.gen(n - i), trunc=top)
        out = out + a * pairing(D1, acc)
    return out


def _require_p_curvature_ring(ring, p):
    if p is None or q_int(p, ring) or ring.q ** p != ring.one:
        raise HypothesisViolated(f"{ring!r} does not satisfy (p)_q = 0 and q^p = 1")


class CenterElem:
    """sum_k f_k theta^k with f_k in A' = R[x']."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms=None):
        self.ring = ring
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def theta(cls, ring, k=1, coeff=None):
        c = TwistPoly.one(ring) if coeff is None else coeff
        return cls(ring, {k: c})

    def __add__(self, other):
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return CenterElem(self.ring, out)

    def __mul__(self, other):
        if isinstance(other, TwistPoly):
            return CenterElem(self.ring, {k: c * other for k, c in self.terms.items()})
        out = {}
        for k, a in self.terms.items():
            for l, b in other.terms.items():
                v = a * b
                out[k + l] = out[k + l] + v if k + l in out else v
        return CenterElem(self.ring, out)

    def __eq__(self, other):
        return isinstance(other, CenterElem) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __repr__(self):
        return "CenterElem(" + " + ".join(f"[{c}]*theta^{k}" for k, c in sorted(self.terms.items())) + ")"


def center_embed(f: CenterElem, p: int | None = None) -> OreOp:
    """theta -> d^p, x' -> x^p."""
    ring = f.ring
    p = p or ring.p
    _require_p_curvature_ring(ring, p)
    R = OreRing.standard(ring)
    return OreOp(R, {p * k: frobenius_embed(c, p) for k, c in f.terms.items()})


def commutator(A: OreOp, B: OreOp) -> OreOp:
    return ore_mul(A, B) - ore_mul(B, A)


def is_central(D: OreOp):
    """Certificate dict: central iff [D, x] = 0 and [D, d] = 0."""
    R = D.R
    cx = commutator(D, R.x())
    cd = commutator(D, R.d())
    return {"central": not cx and not cd, "comm_x": cx, "comm_d": cd}


def commutes_with_A(D: OreOp) -> bool:
    return not commutator(D, D.R.x())


def centralizer_of_A(ring: BaseRing, K: int, wmax: int, p: int | None = None):
    """Degreewise computation of {D : [D, x] = 0} with d-degree < pK.

    Grades by weight w = n - j on monomials x^n d^j, for -(pK-1) <= w <= wmax,
    and solves each graded piece over the Z-lattice of R.  Returns a report
    comparing the kernel with the span of {x^n d^(pk)}.
    """
    p = p or ring.p
    rank_R = ring.rank
    if rank_R is None:
        raise ValueError("centralizer computation needs a finite Z-basis of R")
    R = OreRing.standard(ring)
    basis_R = ring.basis()
    jmax = p * K
    pieces = []
    ok = True
    for w in range(-(jmax - 1), wmax + 1):
        mons = [(w + j, j) for j in range(jmax) if w + j >= 0]
        if not mons:
            continue
        # columns: (monomial, basis element of R); rows: coordinates of [D, x]
        targets = {}
        cols = []
        for (n, j) in mons:
            for b in basis_R:
                D = OreOp(R, {j: CoordPoly.monomial(ring, n, b)})
                C = commutator(D, R.x())
                vec = {}
                for k, c in C.terms.items():
                    for m, v in c.terms.items():
                        for t, z in enumerate(ring.coords(v)):
                            if z:
                                vec[(m, k, t)] = z
                                targets.setdefault((m, k, t), len(targets))
                cols.append(vec)
        nrows = len(targets)
        mat = [[0] * len(cols) for _ in range(nrows)]
        for ci, vec in enumerate(cols):
            for key, z in vec.items():
                mat[targets[key]][ci] = z
        ker = linalg.nullspace_q(mat, len(cols)) if nrows else [
            [1 if i == c else 0 for i in range(len(cols))] for c in range(len(cols))
        ]
        expected_cols = [
            idx * rank_R + t
            for idx, (n, j) in enumerate(mons)
            if j % p == 0
            for t in range(rank_R)
        ]
        # containment: every expected coordinate vector is in the kernel
        contained = all(all(not row[c] for row in mat) for c in expected_cols)
        piece_ok = contained and len(ker) == len(expected_cols)
        ok = ok and piece_ok
        pieces.append({
            "weight": w,
            "kernel_rank": len(ker),
            "expected_rank": len(expected_cols),
            "contained": contained,
            "ok": piece_ok,
        })
    return {"ok": ok, "pieces": pieces}


# ---------------------------------------------------------------------------
# right-normal form (needs q to be a unit)

def _sigma_inv(a: CoordPoly, e: int) -> CoordPoly:
    ring = a.ring
    try:
        qinv = ring.invert(ring.q)
    except NotAUnit as exc:
        raise HypothesisViolated("right-normal form needs q invertible") from exc
    Qinv = qinv ** e
    return CoordPoly(ring, {n: c * Qinv ** n for n, c in a.terms.items()})


def to_right_normal(D: OreOp) -> dict:
    """Return {k: b_k} with D = sum_k d^k b_k."""
    R = D.R
    out = {}

    def add(k, b):
        if b:
            out[k] = out[k] + b if k in out else b
            if not out[k]:
                del out[k]

    def convert(a, k):
        # returns right-normal dict of a d^k
        if k == 0:
            return {0: a}
        if not a:
            return {}
        # a d = d sigma^{-1}(a) - c d_{sigma^e}(sigma^{-1}(a))
        s = _sigma_inv(a, R.e)
        res = {}
        for j, b in convert(s, k - 1).items():
            res[j + 1] = res[j + 1] + b if j + 1 in res else b
        t = R.derive(s).scale(R.c)
        for j, b in convert(-t, k - 1).items():
            res[j] = res[j] + b if j in res else b
        return {j: b for j, b in res.items() if b}

    for k, a in D.terms.items():
        for j, b in convert(a, k).items():
            add(j, b)
    return out


def from_right_normal(R: OreRing, rn: dict) -> OreOp:
    out = OreOp(R, {})
    for k, b in rn.items():
        out = out + ore_mul(R.d(k), OreOp(R, {0: b}))
    return out


# ---------------------------------------------------------------------------
# level -1 operators

LevelMinusOneOp = OreOp


def level_minus_one_ring(ring: BaseRing, p: int | None = None) -> OreRing:
    """Ore ring with d<1> r = sigma^p(r) d<1> + (p)_q d_{sigma^p}(r)."""
    return OreRing.level_minus_one(ring, p)


def level_minus_one_is_higgs(ring: BaseRing, p: int | None = None, bound: int = 6):
    """In a ring with q^p = 1 and (p)_q = 0 the generator d<1> commutes with A.

    Returns (ok, witnesses) where witnesses lists [d<1>, x^n] for n <= bound.
    """
    L = level_minus_one_ring(ring, p)
    wit = []
    for n in range(bound + 1):
        c = commutator(L.d(), L.x(n))
        wit.append((n, c))
    return all(not c for _, c in wit), wit
