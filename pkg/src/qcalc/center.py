"""The truncated center A'[theta]/theta^N and square matrices over it."""
from __future__ import annotations

from .errors import NotAUnit
from .qarith import TwistPoly


class ThetaPoly:
    """Element of R[x'][theta]/theta^N stored as {(x'-degree, theta-degree): RingValue}."""

    __slots__ = ("ring", "N", "terms")

    def __init__(self, ring, N, terms=None):
        self.ring = ring
        self.N = N
        self.terms = {k: v for k, v in (terms or {}).items() if v and k[1] < N}

    @classmethod
    def const(cls, ring, N, c):
        return cls(ring, N, {(0, 0): ring.coerce(c)})

    @classmethod
    def zero(cls, ring, N):
        return cls(ring, N)

    @classmethod
    def theta(cls, ring, N, k=1):
        return cls(ring, N, {(0, k): ring.one})

    @classmethod
    def xprime(cls, ring, N, a=1):
        return cls(ring, N, {(a, 0): ring.one})

    @classmethod
    def from_twist(cls, f: TwistPoly, N, theta_degree=0):
        return cls(f.ring, N, {(a, theta_degree): c for a, c in f.terms.items()})

    def _lift(self, other):
        if isinstance(other, ThetaPoly):
            return other
        return ThetaPoly.const(self.ring, self.N, other)

    def __add__(self, other):
        o = self._lift(other)
        out = dict(self.terms)
        for k, v in o.terms.items():
            out[k] = out[k] + v if k in out else v
        return ThetaPoly(self.ring, self.N, out)

    __radd__ = __add__

    def __neg__(self):
        return ThetaPoly(self.ring, self.N, {k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._lift(other)
        out = {}
        N = self.N
        for (a, b), v in self.terms.items():
            for (c, d), w in o.terms.items():
                if b + d >= N:
                    continue
                k = (a + c, b + d)
                z = v * w
                out[k] = out[k] + z if k in out else z
        return ThetaPoly(self.ring, N, out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, ThetaPoly):
            other = self._lift(other)
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __bool__(self):
        return bool(self.terms)

    def theta_part(self, b) -> TwistPoly:
        return TwistPoly(self.ring, {a: v for (a, d), v in self.terms.items() if d == b})

    def truncate(self, M):
        return ThetaPoly(self.ring, self.N, {k: v for k, v in self.terms.items() if k[1] < M})

    def is_unit(self):
        """Units: theta^0 part is a unit constant of R (R a domain)."""
        p0 = self.theta_part(0)
        if p0.degree() != 0:
            return False
        return self.ring.is_unit(p0.coeff(0))

    def inverse(self):
        if not self.is_unit():
            raise NotAUnit(f"{self} is not a unit of A'[theta]/theta^{self.N}")
        c = self.theta_part(0).coeff(0)
        cinv = self.ring.invert(c)
        nil = (self * cinv) - 1  # nilpotent: theta-degree >= 1
        out = ThetaPoly.const(self.ring, self.N, 1)
        term = ThetaPoly.const(self.ring, self.N, 1)
        for _ in range(self.N):
            term = term * (-nil)
            out = out + term
        return out * cinv

    def __repr__(self):
        return f"ThetaPoly({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for (a, b), v in sorted(self.terms.items(), key=lambda kv: (kv[0][1], kv[0][0])):
            mono = "*".join(m for m in (
                "" if a == 0 else ("x'" if a == 1 else f"x'^{a}"),
                "" if b == 0 else ("theta" if b == 1 else f"theta^{b}"),
            ) if m)
            parts.append(f"({v})*{mono}" if mono else f"({v})")
        return " + ".join(parts)


def mat_zero(ring, N, n):
    return [[ThetaPoly.zero(ring, N) for _ in range(n)] for _ in range(n)]


def mat_identity(ring, N, n):
    m = mat_zero(ring, N, n)
    for i in range(n):
        m[i][i] = ThetaPoly.const(ring, N, 1)
    return m


def mat_mul(A, B):
    n = len(A)
    m = len(B[0])
    k = len(B)
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = A[i][0] * B[0][j]
            for t in range(1, k):
                acc = acc + A[i][t] * B[t][j]
            row.append(acc)
        out.append(row)
    return out


def mat_add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def mat_scale(A, c):
    return [[a * c for a in r] for r in A]


def mat_eq(A, B):
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def unit_pivot_det(rows):
    """Determinant over A'[theta]/theta^N by elimination with unit pivots.

    Returns ``(det, None)`` on success or ``(None, step)`` when no unit pivot
    exists at elimination step ``step`` (then the determinant is not a unit).
    """
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return None, None
    ring, N = a[0][0].ring, a[0][0].N
    det = ThetaPoly.const(ring, N, 1)
    for s in range(n):
        piv = None
        for i in range(s, n):
            if a[i][s].is_unit():
                piv = i
                break
        if piv is None:
            return None, s
        if piv != s:
            a[s], a[piv] = a[piv], a[s]
            det = -det
        inv = a[s][s].inverse()
        det = det * a[s][s]
        for i in range(s + 1, n):
            f = a[i][s] * inv
            if f:
                a[i] = [x - f * y for x, y in zip(a[i], a[s])]
    return det, None
