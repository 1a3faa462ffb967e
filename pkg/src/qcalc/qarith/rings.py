"""Exact commutative base rings R and their elements.

Four kinds are supported:

* ``IntPoly``       Z[u] with u generic (q = u).
* ``Cyclotomic(p)`` Z[u]/Phi_p(u); canonical form has degree < p - 1.
* ``TruncSeries(M)`` Z[[t]]/t^M or Q[[t]]/t^M with t = q - 1.
* ``ModCyclotomic(p, N)`` Cyclotomic(p) reduced mod p^N.  The ``q_one`` flag
  gives its degenerate quotient Z[u]/(Phi_p, u - 1) = F_p, where q = 1.

Elements are stored as tuples of coefficients in the ring's variable (u, or t
for series) with trailing zeros stripped, so structural equality is equality.
"""
from __future__ import annotations

import sys
from array import array
from fractions import Fraction
from functools import lru_cache

from ..errors import NotAUnit, NotExactlyDivisible
from .. import linalg

INTPOLY = "intpoly"
CYCLOTOMIC = "cyclotomic"
SERIES = "series"
MODCYCLOTOMIC = "modcyclotomic"


def _strip(c):
    n = len(c)
    while n and not c[n - 1]:
        n -= 1
    return tuple(c[:n])


_KRONECKER_MIN = 64  # len(a) * len(b) above which schoolbook loses
# array typecode holding a signed machine integer of each byte width
_SIGNED = {array(c).itemsize: c for c in "qlihb"}
_SWAP = sys.byteorder != "little"


@lru_cache(maxsize=4096)
def _top_bits(n, nbytes):
    """sum_{i<n} 2^(8 nbytes i + 8 nbytes - 1): the sign bit of every digit."""
    return int.from_bytes((b"\x00" * (nbytes - 1) + b"\x80") * n, "little")


def _pack(a, nbytes):
    """sum a_i 2^(8 nbytes i) for |a_i| < 2^(8 nbytes - 1)."""
    mask = _top_bits(len(a), nbytes)
    code = _SIGNED.get(nbytes)
    if code:
        arr = array(code, a)
        if _SWAP:
            arr.byteswap()
        raw = arr.tobytes()
    else:
        raw = b"".join(x.to_bytes(nbytes, "little", signed=True) for x in a)
    # flipping each sign bit turns two's complement digits into a_i + 2^(k-1)
    return (int.from_bytes(raw, "little") ^ mask) - mask


def _kronecker(a, b):
    """Exact product of integer coefficient lists through one big-integer multiplication."""
    ma, mb = max(map(abs, a)), max(map(abs, b))
    bound = max(ma * mb * min(len(a), len(b)), ma, mb)
    nbytes = (bound.bit_length() + 1 + 7) // 8
    if nbytes <= 8:
        nbytes = 1 << (nbytes - 1).bit_length()
    n = len(a) + len(b) - 1
    mask = _top_bits(n, nbytes)
    buf = ((_pack(a, nbytes) * _pack(b, nbytes) + mask) ^ mask).to_bytes(nbytes * n, "little")
    code = _SIGNED.get(nbytes)
    if code:
        arr = array(code)
        arr.frombytes(buf)
        if _SWAP:
            arr.byteswap()
        return arr.tolist()
    fb = int.from_bytes
    return [fb(buf[i:i + nbytes], "little", signed=True) for i in range(0, nbytes * n, nbytes)]


def _stride(a):
    """Largest g > 1 with a supported on exponents divisible by g, found from the first gap; else 1."""
    n = len(a)
    j = 1
    while j < n and not a[j]:
        j += 1
    if j == 1 or j >= n:
        return 1
    for r in range(1, j):
        if any(a[r::j]):
            return 1
    return j


def _conv(a, b):
    if not a or not b:
        return []
    if len(a) * len(b) >= _KRONECKER_MIN and min(len(a), len(b)) > 1:
        # a factor u^(i+j) in front is peeled off rather than multiplied through
        i = j = 0
        while i < len(a) - 1 and not a[i]:
            i += 1
        while j < len(b) - 1 and not b[j]:
            j += 1
        a, b = a[i:], b[j:]
        g = _stride(a)
        if g == 1:
            g = _stride(b)
            a, b = b, a
        if g > 1:
            # a = A(u^g): one product A * b_r per residue class b_r of b mod g
            A = a[::g]
            out = [0] * (i + j + len(a) + len(b) - 1)
            for r in range(min(g, len(b))):
                prod = _conv(A, b[r::g])
                out[i + j + r:i + j + r + g * len(prod):g] = prod
            return out
        try:
            return [0] * (i + j) + _kronecker(a, b)
        except (TypeError, AttributeError):
            # rational coefficients have no integer packing
            return [0] * (i + j) + _schoolbook(a, b)
    return _schoolbook(a, b)


def _schoolbook(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def is_prime(n):
    if n < 2:
        return False
    f = 2
    while f * f <= n:
        if n % f == 0:
            return False
        f += 1
    return True


class BaseRing:
    """A base ring together with its distinguished element q."""

    __slots__ = ("kind", "p", "N", "M", "rational", "q_one", "_key", "_q", "_one", "_zero")

    def __init__(self, kind, p=None, N=None, M=None, rational=False, q_one=False):
        if kind in (CYCLOTOMIC, MODCYCLOTOMIC) and not is_prime(p or 0):
            raise ValueError(f"p must be prime, got {p}")
        if kind == SERIES and (M is None or M < 1):
            raise ValueError("TruncSeries needs M >= 1")
        if kind == MODCYCLOTOMIC and (N is None or N < 1):
            raise ValueError("ModCyclotomic needs N >= 1")
        self.kind = kind
        self.p = p
        self.N = N
        self.M = M
        self.rational = bool(rational)
        self.q_one = bool(q_one)
        self._key = (kind, p, N, M, self.rational, self.q_one)
        self._zero = RingValue(self, ())
        self._one = self.element((1,))
        if kind == SERIES:
            self._q = self.element((1, 1))
        elif kind == MODCYCLOTOMIC and q_one:
            self._q = self._one
        else:
            self._q = self.element((0, 1))

    # -- identity ---------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, BaseRing) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        if self.kind == INTPOLY:
            return "IntPoly()"
        if self.kind == CYCLOTOMIC:
            return f"Cyclotomic({self.p})"
        if self.kind == SERIES:
            return f"TruncSeries({self.M}, rational={self.rational})"
        if self.q_one:
            return f"ModCyclotomic({self.p}, {self.N}, q_one=True)"
        return f"ModCyclotomic({self.p}, {self.N})"

    @property
    def name(self):
        return repr(self)

    # -- canonical forms --------------------------------------------------
    @property
    def int_modulus(self):
        """0 when R is a Z-lattice (or Q-space), else m with R a Z/m-module."""
        if self.kind == MODCYCLOTOMIC:
            return self.p if self.q_one else self.p ** self.N
        return 0

    @property
    def rank(self):
        """Length of the canonical coordinate vector (None for Z[u])."""
        if self.kind == INTPOLY:
            return None
        if self.kind == SERIES:
            return self.M
        if self.kind == MODCYCLOTOMIC and self.q_one:
            return 1
        return self.p - 1

    def reduce(self, c):
        kind = self.kind
        if kind == INTPOLY:
            return _strip(c)
        if kind == SERIES:
            c = list(c[: self.M])
            if self.rational:
                c = [Fraction(x) for x in c]
            return _strip(c)
        p = self.p
        if kind == MODCYCLOTOMIC and self.q_one:
            # u = 1 and Phi_p(1) = p
            return _strip([sum(c) % p])
        if len(c) >= p:
            folded = [0] * p
            for i, x in enumerate(c):
                folded[i % p] += x
        else:
            folded = list(c) + [0] * (p - len(c))
        top = folded[p - 1]
        out = [x - top for x in folded[: p - 1]]
        if kind == MODCYCLOTOMIC:
            m = self.p ** self.N
            out = [x % m for x in out]
        return _strip(out)

    def element(self, coeffs):
        return RingValue(self, self.reduce(list(coeffs)))

    def __call__(self, v):
        return self.coerce(v)

    def coerce(self, v):
        if isinstance(v, RingValue):
            if v.ring != self:
                raise ValueError(f"element of {v.ring!r} used in {self!r}")
            return v
        if isinstance(v, (int, Fraction)):
            return self.element((v,))
        raise TypeError(f"cannot coerce {type(v).__name__} into {self!r}")

    @property
    def zero(self):
        return self._zero

    @property
    def one(self):
        return self._one

    @property
    def q(self):
        return self._q

    # -- derived flags ----------------------------------------------------
    @property
    def is_torsion_free(self):
        return self.kind in (INTPOLY, CYCLOTOMIC, SERIES)

    @property
    def q_p_is_zero(self):
        return self.kind in (CYCLOTOMIC, MODCYCLOTOMIC)

    @property
    def q_p_is_one(self):
        return self.kind in (CYCLOTOMIC, MODCYCLOTOMIC)

    @property
    def is_q_divisible(self):
        if self.kind in (CYCLOTOMIC, MODCYCLOTOMIC):
            return True
        return self.kind == SERIES and self.rational

    @property
    def char_p(self):
        """The prime p attached to the ring, if any."""
        return self.p

    # -- raw arithmetic on coefficient tuples -----------------------------
    def _add(self, a, b):
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, x in enumerate(b):
            out[i] += x
        return self.reduce(out) if self.kind == MODCYCLOTOMIC else _strip(out)

    def _neg(self, a):
        return self.reduce([-x for x in a])

    def _mul(self, a, b):
        if not a or not b:
            return ()
        if self.kind == SERIES:
            M = self.M
            out = [0] * min(M, len(a) + len(b) - 1)
            for i, x in enumerate(a):
                if x:
                    for j in range(min(len(b), M - i)):
                        out[i + j] += x * b[j]
            return _strip(out)
        return self.reduce(_conv(a, b))

    # -- conversions ------------------------------------------------------
    def from_intpoly(self, coeffs):
        """Image of a polynomial in Z[u] (or Q[u]) under u -> q."""
        coeffs = list(coeffs)
        if self.kind != SERIES:
            return self.element(coeffs)
        # Horner in t with q = 1 + t
        acc = self.zero
        for c in reversed(coeffs):
            acc = acc * self.q + c
        return acc

    def at_one(self, v):
        """Image of v under q -> 1, as (integer, modulus); modulus 0 means Z.

        For Cyclotomic(p) this is the map Z[zeta_p] -> F_p; for series it is
        the constant term (a rational for rational series).
        """
        v = self.coerce(v)
        if self.kind == INTPOLY:
            return sum(v.c), 0
        if self.kind == SERIES:
            return (v.c[0] if v.c else 0), 0
        return sum(v.c) % self.p, self.p

    def coords(self, v):
        """Coordinate vector of length ``rank`` on the canonical Z-basis."""
        r = self.rank
        c = list(v.c)
        return c + [0] * (r - len(c))

    def basis(self):
        r = self.rank
        if r is None:
            raise ValueError("Z[u] has no finite Z-basis")
        out = []
        for i in range(r):
            c = [0] * (i + 1)
            c[i] = 1
            out.append(self.element(c))
        return out

    def mult_matrix(self, v):
        """Matrix (rows) of multiplication by v on the canonical Z-basis."""
        cols = [self.coords(v * b) for b in self.basis()]
        r = self.rank
        return [[cols[j][i] for j in range(r)] for i in range(r)]

    # -- division ---------------------------------------------------------
    def exact_div(self, a, b):
        """Return w with b*w = a, raising NotExactlyDivisible otherwise."""
        a = self.coerce(a)
        b = self.coerce(b)
        if not a:
            return self.zero
        if not b:
            raise NotExactlyDivisible(f"division of {a} by zero in {self!r}")
        if self.kind == INTPOLY:
            return RingValue(self, _intpoly_divexact(a.c, b.c))
        if self.kind == MODCYCLOTOMIC and self.q_one:
            x, y = a.c[0], b.c[0]
            return self.element((x * pow(y, -1, self.p),))
        rows = self.mult_matrix(b)
        rhs = self.coords(a)
        if self.kind == MODCYCLOTOMIC:
            sol = linalg.solve_mod_prime_power(rows, rhs, self.p, self.N)
            if sol is None:
                raise NotExactlyDivisible(f"{b} does not divide {a} in {self!r}")
            w = self.element(sol)
        else:
            sol = linalg.solve_q(rows, rhs, self.rank)
            if sol is None:
                raise NotExactlyDivisible(f"{b} does not divide {a} in {self!r}")
            if not self.rational:
                if any(x.denominator != 1 for x in sol):
                    raise NotExactlyDivisible(f"{b} does not divide {a} in {self!r}")
                sol = [int(x) for x in sol]
            w = self.element(sol)
        if w * b != a:  # singular multiplication matrix with inconsistent system
            raise NotExactlyDivisible(f"{b} does not divide {a} in {self!r}")
        return w

    def invert(self, v):
        v = self.coerce(v)
        try:
            return self.exact_div(self.one, v)
        except NotExactlyDivisible:
            raise NotAUnit(f"{v} is not a unit of {self!r}") from None

    def is_unit(self, v):
        v = self.coerce(v)
        if not v:
            return False
        if self.kind == INTPOLY:
            return len(v.c) == 1 and v.c[0] in (1, -1)
        try:
            self.invert(v)
            return True
        except NotAUnit:
            return False

    def format(self, v):
        var = "t" if self.kind == SERIES else "q"
        terms = []
        for i, x in enumerate(v.c):
            if not x:
                continue
            if i == 0:
                mono = ""
            elif i == 1:
                mono = var
            else:
                mono = f"{var}^{i}"
            if mono and x == 1:
                terms.append(mono)
            elif mono and x == -1:
                terms.append("-" + mono)
            elif mono:
                terms.append(f"{x}*{mono}")
            else:
                terms.append(str(x))
        if not terms:
            return "0"
        return " + ".join(terms).replace("+ -", "- ")


def _intpoly_divexact(a, b):
    a = list(a)
    db = len(b) - 1
    lead = b[-1]
    q = [0] * max(len(a) - db, 0)
    for k in range(len(a) - 1, db - 1, -1):
        c = a[k]
        if not c:
            continue
        if isinstance(c, Fraction) or isinstance(lead, Fraction):
            f = Fraction(c) / lead
        else:
            if c % lead:
                raise NotExactlyDivisible("non-integral quotient in Z[u]")
            f = c // lead
        q[k - db] = f
        for j, y in enumerate(b):
            a[k - db + j] -= f * y
    if any(a[:db] if db else []):
        raise NotExactlyDivisible("nonzero remainder in Z[u]")
    return _strip(q)


class RingValue:
    """Immutable element of a BaseRing."""

    __slots__ = ("ring", "c", "_hash")

    def __init__(self, ring, c):
        self.ring = ring
        self.c = c
        self._hash = None

    def _other(self, other):
        if isinstance(other, RingValue):
            if other.ring is not self.ring and other.ring != self.ring:
                raise ValueError(f"ring mismatch: {self.ring!r} vs {other.ring!r}")
            return other.c
        if isinstance(other, (int, Fraction)):
            return self.ring.reduce([other])
        return None

    def __add__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return RingValue(self.ring, self.ring._add(self.c, o))

    __radd__ = __add__

    def __neg__(self):
        return RingValue(self.ring, self.ring._neg(self.c))

    def __sub__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return RingValue(self.ring, self.ring._add(self.c, self.ring._neg(o)))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = self._other(other)
        if o is None:
            return NotImplemented
        return RingValue(self.ring, self.ring._mul(self.c, o))

    __rmul__ = __mul__

    def __pow__(self, n):
        if n < 0:
            return self.ring.invert(self) ** (-n)
        result = self.ring.one
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __bool__(self):
        return bool(self.c)

    def is_zero(self):
        return not self.c

    def __eq__(self, other):
        if isinstance(other, RingValue):
            return self.ring == other.ring and self.c == other.c
        if isinstance(other, (int, Fraction)):
            return self.c == self.ring.reduce([other])
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring._key, self.c))
        return self._hash

    def __repr__(self):
        return f"RingValue({self.ring.format(self)})"

    def __str__(self):
        return self.ring.format(self)

    def coeffs(self):
        return list(self.c)


@lru_cache(maxsize=None)
def IntPoly():
    return BaseRing(INTPOLY)


@lru_cache(maxsize=None)
def Cyclotomic(p):
    return BaseRing(CYCLOTOMIC, p=p)


@lru_cache(maxsize=None)
def TruncSeries(M, rational=True):
    return BaseRing(SERIES, M=M, rational=rational)


@lru_cache(maxsize=None)
def ModCyclotomic(p, N=1, q_one=False):
    return BaseRing(MODCYCLOTOMIC, p=p, N=N, q_one=q_one)
