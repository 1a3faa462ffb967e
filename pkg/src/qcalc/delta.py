"""delta-structures on twisted divided powers, the q-PD condition, the v_n
basis of the q-PD envelope, the prismatic instance A<eta>_{q^p,y} and the
level -1 operators.

The Frobenius lift is q -> q^p, x -> x^p, xi^[n] -> phi(xi^[n]).  It is
defined on the principal ring over Z[u] (exact) or over a truncated
series ring in t = q - 1 with rational coefficients; delta(a) =
(phi(a) - a^p)/p is computed by exact division and then certified
p-integral.
"""
from __future__ import annotations

from fractions import Fraction
from math import comb

from .errors import BasisFailure, HypothesisViolated, NotExactlyDivisible, NotIntegral
from .frobenius import divided_frobenius, phi_coord, phi_oracle, phi_scalar
from .ore import LevelMinusOneOp, level_minus_one_is_higgs, level_minus_one_ring
from .qarith import CoordPoly, IntPoly, TruncSeries, q_fact, q_int
from .qarith.rings import SERIES, BaseRing
from .tpd import TPDParams, TwistedPDElem, XiPoly, from_poly, tpd_mul


class Certificate:
    """{kind, n, status, witness}."""

    def __init__(self, kind, n, status, witness=None):
        self.kind = kind
        self.n = n
        self.status = status
        self.witness = witness

    @property
    def ok(self):
        return self.status == "pass"

    def to_json(self):
        return {"kind": self.kind, "n": self.n, "status": self.status, "witness": self.witness}

    def __repr__(self):
        return f"Certificate({self.kind}, n={self.n}, {self.status})"


# ---------------------------------------------------------------------------
# p-integrality

def _p_integral_value(v, p):
    for c in v.c:
        if isinstance(c, Fraction) and c.denominator % p == 0:
            return False
    return True


def p_integral(e, p):
    """All coefficients of a CoordPoly / TwistedPDElem are p-integral (denominators prime to p)."""
    if isinstance(e, TwistedPDElem):
        return all(p_integral(c, p) for c in e.terms.values())
    return all(_p_integral_value(v, p) for v in e.terms.values())


def p_unit(v, p):
    """v is a unit of Z_(p)[[t]] (or of Z[u] after u -> 1 in Z_(p)) : p-integral with unit constant term."""
    if not _p_integral_value(v, p) or not v.c:
        return False
    c0 = v.ring.at_one(v)[0] if v.ring.kind != SERIES else v.c[0]
    c0 = Fraction(c0)
    return c0 != 0 and c0.numerator % p != 0 and c0.denominator % p != 0


# ---------------------------------------------------------------------------

class DeltaRing:
    """The principal A<xi>_{q,y} with its Frobenius lift and delta.

    ``ring`` is IntPoly() (default) or a rational TruncSeries; the latter
    is the Z_p[[q-1]] approximation where (p)_q and (p)_{q^p} are invertible.
    """

    def __init__(self, p: int, ring: BaseRing | None = None):
        self.p = p
        self.ring = ring or IntPoly()
        if not self.ring.is_torsion_free:
            raise HypothesisViolated("delta needs a p-torsion-free base")
        if self.ring.kind not in ("intpoly", SERIES):
            raise HypothesisViolated("delta is defined over Z[u] or a truncated series ring")
        self.params = TPDParams.principal(self.ring)
        self._phi_xi = {}

    @property
    def generic(self):
        return self.ring.kind == "intpoly"

    # -- Frobenius --------------------------------------------------------
    def phi_scalar(self, v):
        if self.generic:
            return phi_scalar(v, self.p)
        ring = self.ring
        s = ring.q ** self.p - ring.one
        acc = ring.zero
        for c in reversed(v.c):
            acc = acc * s + c
        return acc

    def phi_coord(self, c: CoordPoly) -> CoordPoly:
        if self.generic:
            return phi_coord(c, self.p)
        return CoordPoly(self.ring, {self.p * n: self.phi_scalar(v) for n, v in c.terms.items()})

    def phi_xi(self, n):
        if n not in self._phi_xi:
            e = phi_oracle(n, self.p)
            self._phi_xi[n] = e if self.generic else e.specialize(self.params)
        return self._phi_xi[n]

    def phi(self, e: TwistedPDElem) -> TwistedPDElem:
        out = self.params.zero()
        for n, c in e.terms.items():
            out = out + self.phi_xi(n) * self.phi_coord(c)
        return out

    def power(self, e: TwistedPDElem, k: int) -> TwistedPDElem:
        out = self.params.one()
        for _ in range(k):
            out = tpd_mul(out, e)
        return out

    def xi_power(self, k):
        """The ordinary power xi^k in the divided basis."""
        return self.power(self.params.gen(1), k)

    def delta(self, e: TwistedPDElem) -> TwistedPDElem:
        """(phi(e) - e^p)/p; NotIntegral when the quotient is not p-integral."""
        diff = self.phi(e) - self.power(e, self.p)
        terms = {}
        for n, c in diff.terms.items():
            try:
                terms[n] = CoordPoly(self.ring, {d: self.ring.exact_div(v, self.p) for d, v in c.terms.items()})
            except NotExactlyDivisible as exc:
                raise NotIntegral(f"phi(e) - e^p is not divisible by {self.p} at xi^[{n}]") from exc
        out = TwistedPDElem(self.params, terms)
        if not p_integral(out, self.p):
            raise NotIntegral("delta(e) is not p-integral")
        return out

    def delta_scalar(self, v):
        d = self.phi_scalar(v) - v ** self.p
        q = self.ring.exact_div(d, self.p)
        if not _p_integral_value(q, self.p):
            raise NotIntegral(f"delta({v}) is not p-integral")
        return q

    def elem(self, c):
        return TwistedPDElem(self.params, {0: c if isinstance(c, CoordPoly) else CoordPoly.const(self.ring, c)})


# ---------------------------------------------------------------------------

def delta_xi(p: int, ring: BaseRing | None = None) -> TwistedPDElem:
    """sum_{1<=i<=p-1} (1/p) binom(p, i) x^(p-i) xi^i (ordinary powers of xi)."""
    D = DeltaRing(p, ring)
    out = D.params.zero()
    for i in range(1, p):
        c = Fraction(comb(p, i), p)
        if c.denominator != 1:
            raise NotIntegral(f"binom({p},{i})/{p} is not an integer")
        out = out + D.xi_power(i) * CoordPoly.monomial(D.ring, p - i, int(c))
    return out


def delta_xi_check(p: int, ring: BaseRing | None = None) -> Certificate:
    """phi(xi) = xi^p + p delta(xi), and delta(xi) agrees with the delta-operator."""
    D = DeltaRing(p, ring)
    xi = D.params.gen(1)
    dx = delta_xi(p, ring)
    lhs = D.phi(xi)
    rhs = D.xi_power(p) + dx * CoordPoly.const(D.ring, p)
    ok = lhs == rhs and D.delta(xi) == dx
    return Certificate("delta_xi", 1, "pass" if ok else "fail", {"delta_xi": str(dx)} if ok else
                       {"phi_xi": str(lhs), "xi^p + p delta": str(rhs)})


def delta_composition_check(D: DeltaRing, a: TwistedPDElem, b: TwistedPDElem) -> bool:
    """delta(ab) = a^p delta(b) + b^p delta(a) + p delta(a) delta(b)."""
    p = D.p
    da, db = D.delta(a), D.delta(b)
    lhs = D.delta(tpd_mul(a, b))
    rhs = (tpd_mul(D.power(a, p), db) + tpd_mul(D.power(b, p), da)
           + tpd_mul(da, db) * CoordPoly.const(D.ring, p))
    return lhs == rhs


def phi_multiplicative_check(D: DeltaRing, total: int = 4) -> bool:
    """phi(xi^[a] xi^[b]) = phi(xi^[a]) phi(xi^[b]) for a + b <= total."""
    P = D.params
    for a in range(total + 1):
        for b in range(total + 1 - a):
            if D.phi(tpd_mul(P.gen(a), P.gen(b))) != tpd_mul(D.phi(P.gen(a)), D.phi(P.gen(b))):
                return False
    return True


# ---------------------------------------------------------------------------

def qpd_condition_check(p: int, bound: int = 6):
    """phi(xi^[n]) in (p)_u A<xi> for 1 <= n <= bound, by exact division over Z[u]."""
    Z = IntPoly()
    pq = q_int(p, Z)
    certs = []
    for n in range(1, bound + 1):
        e = phi_oracle(n, p)
        bad = None
        for k, c in e.items():
            for d, v in c.terms.items():
                try:
                    Z.exact_div(v, pq)
                except NotExactlyDivisible:
                    bad = {"xi_degree": k, "x_degree": d, "coefficient": str(v)}
                    break
            if bad:
                break
        certs.append(Certificate("qpd_condition", n, "fail" if bad else "pass",
                                 bad or {"divisor": str(pq), "terms": len(e.terms)}))
    return certs


# ---------------------------------------------------------------------------
# v_n basis of the q-PD envelope

def p_digits(n: int, p: int, rmax: int | None = None):
    """Base-p digits, least significant first; overflow past rmax+1 digits raises."""
    out = []
    m = n
    while m:
        out.append(m % p)
        m //= p
    if not out:
        out = [0]
    if rmax is not None and len(out) > rmax + 1:
        raise ValueError(f"{n} needs more than {rmax + 1} base-{p} digits")
    return out


class VnBuilder:
    """v_n = xi^{k_0} prod_r (delta^r([phi](xi)))^{e_r} in A<xi> over a series ring."""

    READINGS = ("k_r+1_digit", "k_r_plus_one")

    def __init__(self, p: int, M: int | None = None, ring: BaseRing | None = None):
        self.p = p
        self.ring = ring or TruncSeries(M or 2 * p * p, rational=True)
        self.D = DeltaRing(p, self.ring)
        self._dr = [divided_frobenius(1, p, self.ring)]

    def delta_power(self, r):
        """delta^r([phi](xi))."""
        while len(self._dr) <= r:
            self._dr.append(self.D.delta(self._dr[-1]))
        return self._dr[r]

    def exponents(self, n, reading):
        k = p_digits(n, self.p)
        if reading == "k_r+1_digit":
            return k[0], [(r, k[r + 1]) for r in range(len(k) - 1)]
        # alternate reading: exponent k_r + 1 for every digit position r
        return k[0], [(r, k[r] + 1) for r in range(len(k))]

    def vn(self, n, reading="k_r+1_digit"):
        k0, ex = self.exponents(n, reading)
        out = self.D.xi_power(k0)
        for r, e in ex:
            if e:
                out = tpd_mul(out, self.D.power(self.delta_power(r), e))
        return out


def vn_basis(n: int, D: int, p: int, reading: str = "k_r+1_digit", builder: VnBuilder | None = None):
    """v_n and the certificate that {v_m : m <= D} is unitriangular against {xi^[m]}.

    For each m <= D: v_m has divided degree exactly m, its xi^[m]-coefficient
    is a unit of Z_(p)[[q-1]] (a constant in x), and all coefficients are
    p-integral.  Raises BasisFailure with the first offending m.
    """
    B = builder or VnBuilder(p)
    witness = []
    for m in range(D + 1):
        v = B.vn(m, reading)
        lead = v.coeff(m)
        ok = (v.degree() == m and lead.degree() == 0 and p_unit(lead.coeff(0), p)
              and p_integral(v, p))
        witness.append({"n": m, "degree": v.degree(), "leading_at_q1": str(_at_q1(lead))})
        if not ok:
            raise BasisFailure(f"v_{m} ({reading}) is not a unit-leading element of degree {m}", n=m)
    return B.vn(n, reading), Certificate("vn_basis", D, "pass", {"reading": reading, "rows": witness})


def _at_q1(c: CoordPoly):
    if not c:
        return 0
    return c.coeff(0).c[0] if c.coeff(0).c else 0


def vn_basis_adjudicated(D: int, p: int, M: int | None = None):
    """Try the k_{r+1} reading first, then the alternate one; record both outcomes."""
    B = VnBuilder(p, M)
    out = {}
    for reading in VnBuilder.READINGS:
        try:
            _, cert = vn_basis(D, D, p, reading, B)
            out[reading] = cert.to_json()
        except BasisFailure as exc:
            out[reading] = Certificate("vn_basis", exc.n, "fail", {"reading": reading, "error": str(exc)}).to_json()
        except NotIntegral as exc:
            out[reading] = Certificate("vn_basis", D, "fail", {"reading": reading, "error": str(exc)}).to_json()
    chosen = next((r for r in VnBuilder.READINGS if out[r]["status"] == "pass"), None)
    return {"chosen": chosen, "results": out}


# ---------------------------------------------------------------------------
# the prismatic instance A<eta>_{q^p, Y}, eta = xi/(p)_q

PRISMATIC_Y = ("y", "y/(p)_q")


class PrismaticRing:
    """A<eta>_{q^p, Y} over Z[u] with eta standing for xi/(p)_u."""

    def __init__(self, p: int, choice: str = "y"):
        self.p = p
        self.choice = choice
        Z = IntPoly()
        self.ring = Z
        x = CoordPoly.gen(Z)
        y = x.scale(1 - Z.q)
        if choice == "y":
            Y = y
        elif choice == "y/(p)_q":
            try:
                Y = CoordPoly(Z, {d: Z.exact_div(v, q_int(p, Z)) for d, v in y.terms.items()})
            except NotExactlyDivisible as exc:
                raise NotIntegral("y/(p)_q is not an element of A") from exc
        else:
            raise ValueError(f"unknown prismatic offset {choice!r}")
        self.params = TPDParams(Z, Z.q ** p, Y, name=f"q^p,{choice}")

    def eta(self, n=1):
        return self.params.gen(n)

    def phi_eta_poly(self) -> XiPoly:
        """Numerator of phi(eta) = ((x + (p)_u eta)^p - x^p)/(p)_{u^p} as a polynomial in eta."""
        Z = self.ring
        x = CoordPoly.gen(Z)
        lin = XiPoly.xi(Z) * CoordPoly.const(Z, q_int(self.p, Z)) + XiPoly.const(Z, x)
        return lin ** self.p - XiPoly.const(Z, x ** self.p)

    def phi_eta(self) -> TwistedPDElem:
        """phi(eta) in the eta-divided basis; NotIntegral when it leaves A<eta>."""
        Z = self.ring
        return from_poly(self.phi_eta_poly(), self.params, denominator=q_int(self.p, Z, Z.q ** self.p))

    def delta_eta(self) -> TwistedPDElem:
        """(phi(eta) - eta^p)/p in A<eta>."""
        Z = self.ring
        e = self.eta()
        pw = self.params.one()
        for _ in range(self.p):
            pw = tpd_mul(pw, e)
        diff = self.phi_eta() - pw
        try:
            return TwistedPDElem(self.params, {
                n: CoordPoly(Z, {d: Z.exact_div(v, self.p) for d, v in c.terms.items()})
                for n, c in diff.terms.items()})
        except NotExactlyDivisible as exc:
            raise NotIntegral("delta(eta) is not integral") from exc

    def certificate(self) -> Certificate:
        try:
            f = self.phi_eta()
        except NotIntegral as exc:
            return Certificate("prismatic_phi_eta", 1, "fail", {"Y": self.choice, "error": str(exc)})
        try:
            d = self.delta_eta()
            dwit = str(d)
        except NotIntegral as exc:
            dwit = f"not integral: {exc}"
        return Certificate("prismatic_phi_eta", 1, "pass", {"Y": self.choice, "phi_eta": str(f), "delta_eta": dwit})


def prismatic_ring(p: int, choice: str | None = None):
    """Instance plus integrality certificate; with ``choice=None`` every offset is tried."""
    if choice is not None:
        R = PrismaticRing(p, choice)
        cert = R.certificate()
        if not cert.ok:
            raise NotIntegral(cert.witness["error"])
        return R, cert
    results = []
    for c in PRISMATIC_Y:
        try:
            R = PrismaticRing(p, c)
        except NotIntegral as exc:
            results.append(Certificate("prismatic_phi_eta", 1, "fail", {"Y": c, "error": str(exc)}))
            continue
        cert = R.certificate()
        results.append(cert)
        if cert.ok:
            return R, cert
    raise NotIntegral("no offset choice gives an integral phi(eta): "
                      + "; ".join(str(c.witness) for c in results))


__all__ = [
    "Certificate", "DeltaRing", "delta_xi", "delta_xi_check", "delta_composition_check",
    "phi_multiplicative_check", "qpd_condition_check", "p_digits", "VnBuilder", "vn_basis",
    "vn_basis_adjudicated", "PrismaticRing", "prismatic_ring", "p_integral", "p_unit",
    "LevelMinusOneOp", "level_minus_one_ring", "level_minus_one_is_higgs",
]
