"""The coordinate algebra A = R[x] and its Frobenius twist A' = R[x']."""
from __future__ import annotations

from fractions import Fraction

from .qcomb import q_int
from .rings import BaseRing, RingValue


class CoordPoly:
    """Sparse polynomial {x-degree: RingValue} with no stored zeros."""

    __slots__ = ("ring", "terms", "_hash")
    var = "x"

    def __init__(self, ring: BaseRing, terms=None):
        self.ring = ring
        clean = {}
        if terms:
            for n, c in terms.items():
                if n < 0:
                    raise ValueError("negative degree")
                c = ring.coerce(c)
                if c:
                    clean[n] = c
        self.terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, ring, terms):
        obj = cls.__new__(cls)
        obj.ring = ring
        obj.terms = terms
        obj._hash = None
        return obj

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, ring):
        return cls._raw(ring, {})

    @classmethod
    def one(cls, ring):
        return cls.const(ring, ring.one)

    @classmethod
    def const(cls, ring, c):
        return cls(ring, {0: c})

    @classmethod
    def monomial(cls, ring, n, c=1):
        return cls(ring, {n: c})

    @classmethod
    def gen(cls, ring):
        return cls.monomial(ring, 1)

    # -- basic protocol ---------------------------------------------------
    def _coerce(self, other):
        if isinstance(other, type(self)):
            if other.ring != self.ring:
                raise ValueError("ring mismatch")
            return other
        if isinstance(other, CoordPoly):
            return None
        try:
            return self.const(self.ring, self.ring.coerce(other))
        except TypeError:
            return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = dict(self.terms)
        for n, c in o.terms.items():
            s = out.get(n)
            s = c if s is None else s + c
            if s:
                out[n] = s
            else:
                out.pop(n, None)
        return self._raw(self.ring, out)

    __radd__ = __add__

    def __neg__(self):
        return self._raw(self.ring, {n: -c for n, c in self.terms.items()})

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (RingValue, int, Fraction)):
            c = self.ring.coerce(other)
            return self.scale(c)
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        out = {}
        for n, a in self.terms.items():
            for m, b in o.terms.items():
                v = a * b
                if v:
                    s = out.get(n + m)
                    out[n + m] = v if s is None else s + v
        return self._raw(self.ring, {k: v for k, v in out.items() if v})

    __rmul__ = __mul__

    def scale(self, c):
        c = self.ring.coerce(c)
        if not c:
            return self.zero(self.ring)
        out = {}
        for n, a in self.terms.items():
            v = a * c
            if v:
                out[n] = v
        return self._raw(self.ring, out)

    def __pow__(self, e):
        result = self.one(self.ring)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def shift(self, k):
        """Multiply by var^k (k may be negative when it stays integral)."""
        return self._raw(self.ring, {n + k: c for n, c in self.terms.items()})

    def __eq__(self, other):
        if isinstance(other, CoordPoly):
            return type(other) is type(self) and self.ring == other.ring and self.terms == other.terms
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self.terms == o.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((type(self).__name__, self.ring, frozenset(self.terms.items())))
        return self._hash

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def degree(self):
        return max(self.terms) if self.terms else -1

    def low_degree(self):
        return min(self.terms) if self.terms else -1

    def coeff(self, n):
        return self.terms.get(n, self.ring.zero)

    def items(self):
        return sorted(self.terms.items())

    def map_coeffs(self, f, ring=None):
        ring = ring or self.ring
        return type(self)(ring, {n: f(c) for n, c in self.terms.items()})

    def specialize(self, ring):
        """Image under Z[u] -> ring, u -> q (self must live over IntPoly)."""
        return self.map_coeffs(lambda c: ring.from_intpoly(c.c), ring)

    def __repr__(self):
        return f"{type(self).__name__}({self})"

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for n, c in sorted(self.terms.items(), reverse=True):
            cs = str(c)
            mono = "" if n == 0 else (self.var if n == 1 else f"{self.var}^{n}")
            if not mono:
                parts.append(cs)
            elif cs == "1":
                parts.append(mono)
            else:
                parts.append(f"({cs})*{mono}")
        return " + ".join(parts)

    def to_json(self):
        return {str(n): [str(v) for v in c.c] for n, c in sorted(self.terms.items())}


class TwistPoly(CoordPoly):
    """Element of A' = R[x'], the Frobenius twist of A."""

    __slots__ = ()
    var = "x'"


def sigma_apply(a: CoordPoly, power: int = 1) -> CoordPoly:
    """sigma^power: the coefficient of x^n is multiplied by q^(power*n)."""
    ring = a.ring
    Q = ring.q ** power
    out = {}
    for n, c in a.terms.items():
        v = c * Q ** n
        if v:
            out[n] = v
    return type(a)._raw(ring, out)


def q_derive(a: CoordPoly, power: int = 1) -> CoordPoly:
    """The sigma^power-derivation x^n -> (n)_{q^power} x^(n-1)."""
    ring = a.ring
    Q = ring.q ** power
    out = {}
    for n, c in a.terms.items():
        if n == 0:
            continue
        v = c * q_int(n, ring, Q)
        if v:
            out[n - 1] = v
    return type(a)._raw(ring, out)


def frobenius_embed(a: TwistPoly, p: int | None = None) -> CoordPoly:
    """A' -> A, x' -> x^p."""
    p = p or a.ring.p
    if p is None:
        raise ValueError("frobenius_embed needs a prime p")
    return CoordPoly._raw(a.ring, {p * n: c for n, c in a.terms.items()})


def frobenius_restrict(a: CoordPoly, p: int | None = None) -> TwistPoly | None:
    """Inverse of frobenius_embed on its image; None if a is not in R[x^p]."""
    p = p or a.ring.p
    if any(n % p for n in a.terms):
        return None
    return TwistPoly._raw(a.ring, {n // p: c for n, c in a.terms.items()})
