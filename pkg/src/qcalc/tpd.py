"""Twisted divided-power algebras A<xi>_{Q,Y} over A = R[x].

The algebra is the free A-module on symbols xi^[n] with

    xi^[n] xi^[m] = sum_i (-1)^i Q^(i(i-1)/2) binom(m+n-i, m)_Q binom(m, i)_Q
                          Y^i xi^[m+n-i].

Q is a scalar of R and Y an element of A.  The principal instance is
Q = q, Y = (1-q)x; Frobenius-side instances use Q = 1 or Q = q^p.
"""
from __future__ import annotations

from functools import lru_cache

from .errors import NotExactlyDivisible, NotIntegral, NotTorsionFree, ParamMismatch
from .qarith import CoordPoly, q_binom, q_derive, q_fact, q_int
from .qarith.rings import BaseRing, RingValue


class TPDParams:
    """Parameters (R, Q, Y) of a twisted divided-power algebra."""

    __slots__ = ("ring", "Q", "Y", "name", "_ypow", "_key")

    def __init__(self, ring: BaseRing, Q, Y: CoordPoly, name: str = ""):
        self.ring = ring
        self.Q = ring.coerce(Q)
        if not isinstance(Y, CoordPoly):
            Y = CoordPoly.const(ring, Y)
        if Y.ring != ring:
            raise ParamMismatch("Y lives over a different ring")
        self.Y = Y
        self.name = name
        self._ypow = [CoordPoly.one(ring)]
        self._key = (ring, self.Q, Y)

    @classmethod
    def principal(cls, ring):
        """Q = q, Y = y = (1-q)x."""
        x = CoordPoly.gen(ring)
        return cls(ring, ring.q, x.scale(1 - ring.q), name="q,y")

    def __eq__(self, other):
        return isinstance(other, TPDParams) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        return f"TPDParams({self.ring!r}, Q={self.Q}, Y={self.Y})"

    def ypow(self, i):
        while len(self._ypow) <= i:
            self._ypow.append(self._ypow[-1] * self.Y)
        return self._ypow[i]

    def struct_scalar(self, n, m, i):
        """The R-scalar in front of Y^i xi^[n+m-i] in xi^[n] xi^[m]."""
        return _struct_scalar(self.ring, self.Q, n, m, i)

    def one(self):
        return TwistedPDElem(self, {0: CoordPoly.one(self.ring)})

    def gen(self, n=1, coeff=None):
        """coeff * xi^[n] (coeff defaults to 1)."""
        c = CoordPoly.one(self.ring) if coeff is None else _as_poly(self.ring, coeff)
        return TwistedPDElem(self, {n: c})

    def zero(self):
        return TwistedPDElem(self, {})


@lru_cache(maxsize=None)
def _struct_scalar(ring, Q, n, m, i):
    if i > min(n, m):
        return ring.zero
    sign = -1 if i % 2 else 1
    v = Q ** (i * (i - 1) // 2) * q_binom(m + n - i, m, ring, Q) * q_binom(m, i, ring, Q)
    return v * sign


def _as_poly(ring, c):
    if isinstance(c, CoordPoly):
        return c
    return CoordPoly.const(ring, c)


class TwistedPDElem:
    """Sparse vector {divided degree n: CoordPoly coefficient of xi^[n]}."""

    __slots__ = ("params", "terms", "_hash")

    def __init__(self, params: TPDParams, terms=None):
        self.params = params
        self.terms = {n: c for n, c in (terms or {}).items() if c}
        self._hash = None

    @property
    def ring(self):
        return self.params.ring

    def _check(self, other):
        if not isinstance(other, TwistedPDElem):
            return None
        if other.params != self.params:
            raise ParamMismatch(f"{self.params!r} vs {other.params!r}")
        return other

    def __add__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for n, c in o.terms.items():
            out[n] = out[n] + c if n in out else c
        return TwistedPDElem(self.params, out)

    def __neg__(self):
        return TwistedPDElem(self.params, {n: -c for n, c in self.terms.items()})

    def __sub__(self, other):
        o = self._check(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __mul__(self, other):
        if isinstance(other, TwistedPDElem):
            return tpd_mul(self, other)
        if isinstance(other, (CoordPoly, RingValue, int)):
            c = _as_poly(self.ring, other)
            return TwistedPDElem(self.params, {n: a * c for n, a in self.terms.items()})
        return NotImplemented

    __rmul__ = __mul__

    def __pow__(self, e):
        result = self.params.one()
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, TwistedPDElem):
            return NotImplemented
        return self.params == other.params and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.params, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def coeff(self, n):
        return self.terms.get(n, CoordPoly.zero(self.ring))

    def degree(self):
        return max(self.terms) if self.terms else -1

    def low_degree(self):
        return min(self.terms) if self.terms else -1

    def items(self):
        return sorted(self.terms.items())

    def map_coeffs(self, f, params=None):
        params = params or self.params
        return TwistedPDElem(params, {n: f(c) for n, c in self.terms.items()})

    def specialize(self, params: TPDParams):
        """Push an element over Z[u] to the ring of ``params``."""
        return self.map_coeffs(lambda c: c.specialize(params.ring), params)

    def __repr__(self):
        return f"TwistedPDElem({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for n, c in sorted(self.terms.items()):
            parts.append(f"[{c}]*xi^[{n}]" if n else f"[{c}]")
        return " + ".join(parts)

    def to_json(self):
        return {str(n): c.to_json() for n, c in sorted(self.terms.items())}


def tpd_mul(e1: TwistedPDElem, e2: TwistedPDElem, trunc: int | None = None) -> TwistedPDElem:
    """Product in A<xi>_{Q,Y}; with ``trunc`` the result is taken in P_trunc."""
    if e1.params != e2.params:
        raise ParamMismatch(f"{e1.params!r} vs {e2.params!r}")
    P = e1.params
    out = {}
    for n, a in e1.terms.items():
        for m, b in e2.terms.items():
            ab = a * b
            for i in range(min(n, m) + 1):
                d = n + m - i
                if trunc is not None and d > trunc:
                    continue
                s = P.struct_scalar(n, m, i)
                if not s:
                    continue
                term = (P.ypow(i) * ab).scale(s)
                out[d] = out[d] + term if d in out else term
    return TwistedPDElem(P, out)


def truncate(e: TwistedPDElem, n: int) -> TwistedPDElem:
    """Image in P_n = A<xi>/I^[n+1]."""
    return TwistedPDElem(e.params, {k: c for k, c in e.terms.items() if k <= n})


def comul(n: int):
    """xi^[n] -> sum_i xi^[n-i] (x)' xi^[i], as a list of (left, right, coefficient)."""
    return [(n - i, i, 1) for i in range(n + 1)]


def taylor(z: CoordPoly, order: int, params: TPDParams | None = None) -> TwistedPDElem:
    """T(z) = sum_{k <= order} d^k(z) xi^[k] with d the q-derivation."""
    params = params or TPDParams.principal(z.ring)
    out = {}
    cur = z
    for k in range(order + 1):
        if not cur:
            break
        out[k] = cur
        cur = q_derive(cur)
    return TwistedPDElem(params, out)


# ---------------------------------------------------------------------------
# ordinary polynomials in xi and the embedding xi^[n] -> xi^(n)/(n)_Q!

class XiPoly:
    """Polynomial in an ordinary variable xi with CoordPoly coefficients."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring, terms=None):
        self.ring = ring
        self.terms = {k: c for k, c in (terms or {}).items() if c}

    @classmethod
    def xi(cls, ring):
        return cls(ring, {1: CoordPoly.one(ring)})

    @classmethod
    def const(cls, ring, c):
        return cls(ring, {0: _as_poly(ring, c)})

    def __add__(self, other):
        if not isinstance(other, XiPoly):
            other = XiPoly.const(self.ring, other)
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out[k] + c if k in out else c
        return XiPoly(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return XiPoly(self.ring, {k: -c for k, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, XiPoly):
            other = XiPoly.const(self.ring, other)
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, XiPoly):
            c = _as_poly(self.ring, other)
            return XiPoly(self.ring, {k: a * c for k, a in self.terms.items()})
        out = {}
        for k, a in self.terms.items():
            for l, b in other.terms.items():
                v = a * b
                out[k + l] = out[k + l] + v if k + l in out else v
        return XiPoly(self.ring, out)

    __rmul__ = __mul__

    def __pow__(self, e):
        result = XiPoly.const(self.ring, 1)
        for _ in range(e):
            result = result * self
        return result

    def __eq__(self, other):
        return isinstance(other, XiPoly) and self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def degree(self):
        return max(self.terms) if self.terms else -1

    def coeff(self, k):
        return self.terms.get(k, CoordPoly.zero(self.ring))

    def __repr__(self):
        return "XiPoly(" + " + ".join(f"[{c}]*xi^{k}" for k, c in sorted(self.terms.items())) + ")"


def twisted_power(params: TPDParams, n: int) -> XiPoly:
    """xi^(n) = prod_{i<n} (xi + (i)_Q Y)."""
    return _twisted_power(params, n)


@lru_cache(maxsize=None)
def _twisted_power(params, n):
    ring = params.ring
    if n == 0:
        return XiPoly.const(ring, 1)
    prev = _twisted_power(params, n - 1)
    return prev * (XiPoly.xi(ring) + XiPoly.const(ring, params.Y.scale(q_int(n - 1, ring, params.Q))))


def to_poly(e: TwistedPDElem):
    """Return ``(numerator, denominator)`` with e = numerator/denominator in Frac(A)[xi].

    The denominator is (N)_Q! for N the top divided degree of e.
    """
    P = e.params
    ring = P.ring
    if not ring.is_torsion_free:
        raise NotTorsionFree(f"{ring!r} has torsion; the embedding into A[xi] is undefined")
    N = max(e.degree(), 0)
    den = q_fact(N, ring, P.Q)
    if not den:
        raise NotTorsionFree(f"({N})_Q! vanishes in {ring!r}")
    num = XiPoly(ring)
    for n, c in e.terms.items():
        # den / (n)_Q! = (n+1)_Q ... (N)_Q
        mult = ring.one
        for k in range(n + 1, N + 1):
            mult = mult * q_int(k, ring, P.Q)
        num = num + twisted_power(P, n) * c.scale(mult)
    return num, den


def from_poly(f: XiPoly, params: TPDParams, denominator=None) -> TwistedPDElem:
    """Inverse of to_poly: write f/denominator in the divided basis.

    Uses the monic triangular basis xi^(n) = (n)_Q! xi^[n]; the only division is
    by ``denominator`` and must be exact in A.
    """
    ring = params.ring
    rem = XiPoly(ring, dict(f.terms))
    coeffs = {}
    while rem.terms:
        n = rem.degree()
        c = rem.coeff(n)
        coeffs[n] = c.scale(q_fact(n, ring, params.Q))
        rem = rem - twisted_power(params, n) * c
    out = TwistedPDElem(params, coeffs)
    if denominator is None:
        return out
    return divide_elem(out, denominator)


def divide_poly(c: CoordPoly, d: RingValue) -> CoordPoly:
    ring = c.ring
    try:
        return CoordPoly(ring, {n: ring.exact_div(v, d) for n, v in c.terms.items()})
    except NotExactlyDivisible as exc:
        raise NotIntegral(f"{c} is not divisible by {d}") from exc


def divide_elem(e: TwistedPDElem, d: RingValue) -> TwistedPDElem:
    """Exact coefficientwise division by a scalar; NotIntegral on failure."""
    return TwistedPDElem(e.params, {n: divide_poly(c, d) for n, c in e.terms.items()})
