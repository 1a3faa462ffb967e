"""q-de Rham and Higgs two-term complexes, graded cohomology and q-Cartier.

Complexes are graded by a weight: on the q-de Rham side x has weight 1,
dx has weight 1 and e_j has weight w_j; on the Higgs side x' and dx' have
weight p.  The weights w_j are solved from the module matrix so that the
differential is homogeneous of weight 0.  Each graded piece is a finite
free R-module, and its homology is computed over Z (or Z/m, or Q) via the
Z-basis of R and elementary divisors.
"""
from __future__ import annotations

import csv
import io
from fractions import Fraction
from math import gcd

from . import linalg
from .errors import HypothesisViolated, MismatchedCohomology
from .parallel import pmap
from .qarith import CoordPoly
from .simpson import HiggsModule, SigmaModule, _require, mq_functor


# ---------------------------------------------------------------------------
# gradings

def solve_weights(matrix, step):
    """Integer weights w with w_j - w_i = step*(d+1) for each term x^d in entry (i, j).

    Each connected component is normalized to minimum weight 0.  Raises
    HypothesisViolated when no such grading exists.
    """
    r = len(matrix)
    edges = {i: [] for i in range(r)}
    for i in range(r):
        for j in range(r):
            for d, _ in matrix[i][j].items():
                diff = step * (d + 1)
                edges[j].append((i, -diff))
                edges[i].append((j, diff))
    w = [None] * r
    for s in range(r):
        if w[s] is not None:
            continue
        w[s] = 0
        comp = [s]
        stack = [s]
        while stack:
            a = stack.pop()
            for b, diff in edges[a]:
                if w[b] is None:
                    w[b] = w[a] + diff
                    comp.append(b)
                    stack.append(b)
                elif w[b] != w[a] + diff:
                    raise HypothesisViolated("the module matrix is not weighted-homogeneous")
        low = min(w[c] for c in comp)
        for c in comp:
            w[c] -= low
    return w


# ---------------------------------------------------------------------------

class TwoTermComplex:
    """0 -> C^0 -> C^1 -> 0 with a weight grading on monomial bases.

    ``kind`` is "qdr" (C^i over A, basis x^a e_j, dx of weight 1) or
    "higgs" (C^i over A', basis x'^b e_j, x' and dx' of weight p).
    """

    def __init__(self, kind, module, weights, D, cid=None):
        if module.ring.rank is None:
            raise HypothesisViolated(f"graded pieces need a finite Z-basis of {module.ring!r}")
        self.kind = kind
        self.module = module
        self.ring = module.ring
        self.p = module.p
        self.rank = module.rank
        self.weights = list(weights)
        self.D = D
        self.id = cid or kind

    @property
    def xstep(self):
        return 1 if self.kind == "qdr" else self.p

    def x_degree(self, deg, weight):
        """Degree in x (resp. x') of a weight-``weight`` class in C^deg, counting e_j by its weight."""
        return (weight - deg * self.xstep) // self.xstep

    def monomials(self, deg, weight):
        """[(a, j)]: the basis x^a e_j (times dx when deg = 1) of C^deg in this weight."""
        out = []
        s = self.xstep
        for j, wj in enumerate(self.weights):
            rest = weight - wj - deg * s
            if rest >= 0 and rest % s == 0:
                out.append((rest // s, j))
        return out

    def differential(self, a, j, c):
        """Image of c * x^a e_j as {(a', i): coefficient} in C^1."""
        if self.kind == "qdr":
            v = self.module.basis_vec(j, CoordPoly.monomial(self.ring, a, c))
            img = self.module.apply_d(v)
            return {(d, i): z for i, f in enumerate(img) for d, z in f.items()}
        out = {}
        for i in range(self.rank):
            for d, z in self.module.theta[i][j].items():
                key = (a + d, i)
                out[key] = out[key] + z * c if key in out else z * c
        return {k: v for k, v in out.items() if v}

    def piece(self, weight):
        """(basis0, basis1, rows) with rows the Z-coordinates of the images of basis0 x R-basis."""
        b0 = self.monomials(0, weight)
        b1 = self.monomials(1, weight)
        rbasis = self.ring.basis()
        rr = len(rbasis)
        index = {m: t for t, m in enumerate(b1)}
        rows = []
        for a, j in b0:
            for beta in rbasis:
                row = [0] * (len(b1) * rr)
                for key, z in self.differential(a, j, beta).items():
                    if key not in index:
                        raise HypothesisViolated(f"differential leaves the weight-{weight} piece at {key}")
                    t = index[key]
                    row[t * rr:(t + 1) * rr] = self.ring.coords(z)
                rows.append(row)
        return b0, b1, rows

    def __repr__(self):
        return f"TwoTermComplex({self.id}, rank={self.rank}, weights={self.weights}, D={self.D})"


def build_qdr(M: SigmaModule, D: int, weights=None, cid="qdr") -> TwoTermComplex:
    """q-de Rham complex M -> M dx, nabla(m) = d_M(m) dx."""
    w = solve_weights(M.matrix, 1) if weights is None else weights
    return TwoTermComplex("qdr", M, w, D, cid)


def build_higgs(H: HiggsModule, D: int, weights=None, cid="higgs") -> TwoTermComplex:
    """Higgs complex H -> H dx', theta(h) = Theta h dx'."""
    w = solve_weights(H.theta, H.p) if weights is None else weights
    return TwoTermComplex("higgs", H, w, D, cid)


# ---------------------------------------------------------------------------
# elementary divisors

def _coefficient_mode(ring):
    if ring.int_modulus:
        return "mod"
    return "rational" if getattr(ring, "rational", False) else "int"


def _clear(rows):
    out = []
    for r in rows:
        den = 1
        for x in r:
            if isinstance(x, Fraction):
                den = den * x.denominator // gcd(den, x.denominator)
        out.append([int(x * den) for x in r])
    return out


def map_invariants(rows, ncols, ring):
    """Invariant factors of the map with image rows; entries g in 1..m for Z/m (m = zero)."""
    mode = _coefficient_mode(ring)
    if not rows or ncols == 0:
        return []
    if mode == "rational":
        return [1] * linalg.rank_q(rows, ncols)
    diag = linalg.smith_diagonal(_clear(rows), ncols)
    if mode == "mod":
        m = ring.int_modulus
        return [g for g in (gcd(s, m) for s in diag) if g != m]
    return diag


def homology_pieces(n0, n1, rows, ring):
    """((rank0, divisors0), (rank1, divisors1)) of Z^n0 -> Z^n1 (or Z/m, Q)."""
    diag = map_invariants(rows, n1, ring)
    r = len(diag)
    if ring.int_modulus:
        # over Z/m: ker and coker of diag(g) both split as sum Z/g + free parts
        tors = sorted(g for g in diag if g != 1)
        return (n0 - r, tors), (n1 - r, tors)
    return (n0 - r, []), (n1 - r, sorted(d for d in diag if d != 1))


class CohomologyReport:
    """Rows (degree, weight, x_degree, rank, divisors) over the truncation-safe window."""

    def __init__(self, cid, kind, p, D, rows):
        self.id = cid
        self.kind = kind
        self.p = p
        self.D = D
        self.rows = rows

    def get(self, deg, weight):
        for r in self.rows:
            if r["degree"] == deg and r["weight"] == weight:
                return r
        return None

    def nonzero(self, deg):
        """x-degrees carrying nonzero cohomology in degree ``deg``."""
        return [r["x_degree"] for r in self.rows if r["degree"] == deg and (r["rank"] or r["divisors"])]

    def invariants(self):
        return {(r["degree"], r["weight"]): (r["rank"], tuple(r["divisors"])) for r in self.rows}

    def to_json(self):
        return {"id": self.id, "kind": self.kind, "p": self.p, "D": self.D, "rows": self.rows}

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["complex_id", "cohomological_degree", "x_degree", "rank", "elementary_divisors"])
        for r in self.rows:
            w.writerow([self.id, r["degree"], r["x_degree"], r["rank"], " ".join(map(str, r["divisors"]))])
        return buf.getvalue()


def safe_weights(C: TwoTermComplex):
    """Weights whose degree-0 and degree-1 x-degrees both lie below D - p."""
    bound = C.D - C.p
    if C.kind == "qdr":
        return range(0, max(bound, 0) + 1)
    return range(0, max(bound, 0) * C.p + C.p + 1)


def _piece_rows(C, weight):
    b0, b1, rows = C.piece(weight)
    rr = len(C.ring.basis())
    (k0, t0), (k1, t1) = homology_pieces(len(b0) * rr, len(b1) * rr, rows, C.ring)
    out = []
    for deg, (k, t) in ((0, (k0, t0)), (1, (k1, t1))):
        if not C.monomials(deg, weight):
            continue
        xd = C.x_degree(deg, weight)
        if xd >= C.D - C.p:
            continue
        out.append({"degree": deg, "weight": weight, "x_degree": xd, "rank": k, "divisors": t})
    return out


def cohomology(C: TwoTermComplex, D: int | None = None) -> CohomologyReport:
    """Graded homology of C in every weight of the truncation-safe window."""
    if D is not None and D != C.D:
        C = TwoTermComplex(C.kind, C.module, C.weights, D, C.id)
    pieces = pmap(lambda w: _piece_rows(C, w), list(safe_weights(C)))
    rows = [r for piece in pieces for r in piece]
    rows.sort(key=lambda r: (r["degree"], r["weight"]))
    return CohomologyReport(C.id, C.kind, C.p, C.D, rows)


# ---------------------------------------------------------------------------
# q-Cartier

def cartier_map(report: CohomologyReport, ring, p: int | None = None):
    """C_q: H^0 -> A', x^{pm} -> x'^m and H^1 -> Omega^1_{A'}, [x^{pm+p-1}dx] -> x'^m dx'.

    ``report`` must be the q-de Rham report of (A, d_sigma).  The classes are
    verified to form exactly the reported cohomology: in each weight the
    representatives generate the homology freely over R, and C_q is the
    identity matrix on the Z-bases (hence bijective).  Raises
    MismatchedCohomology on any discrepancy.
    """
    p = p or report.p
    _require(ring, p)
    M = SigmaModule.trivial(ring, p)
    C = build_qdr(M, report.D, [0], report.id)
    rr = len(ring.basis())
    entries = []
    fresh = cohomology(C)
    if fresh.invariants() != report.invariants():
        raise MismatchedCohomology("report does not match a recomputation of q-DR(A)")
    for row in report.rows:
        deg, n, xd = row["degree"], row["weight"], row["x_degree"]
        expected = (xd % p == 0) if deg == 0 else ((xd + 1) % p == 0)
        want = (rr, []) if expected else (0, [])
        if (row["rank"], row["divisors"]) != want:
            raise MismatchedCohomology(
                f"H^{deg} at x-degree {xd}: got rank {row['rank']} divisors {row['divisors']}, expected {want}")
        if not expected:
            continue
        b0, b1, rows = C.piece(n)
        if deg == 0:
            # representatives x^{pm} * R-basis lie in the kernel, which has rank rr
            if any(any(r) for r in rows):
                raise MismatchedCohomology(f"x^{xd} is not a cocycle")
            m = xd // p
            entries.append({"degree": 0, "x_degree": xd, "class": f"x^{xd}", "image": f"x'^{m}",
                            "matrix": [[int(i == j) for j in range(rr)] for i in range(rr)]})
        else:
            # image of d is zero in this weight, so [x^{xd} dx] * R-basis is the whole H^1
            if any(any(r) for r in rows):
                raise MismatchedCohomology(f"x^{xd} dx is a nonzero coboundary")
            m = (xd + 1) // p - 1
            entries.append({"degree": 1, "x_degree": xd, "class": f"[x^{xd} dx]", "image": f"x'^{m} dx'",
                            "matrix": [[int(i == j) for j in range(rr)] for i in range(rr)]})
    h0 = report.nonzero(0)
    h1 = report.nonzero(1)
    return {"ok": True, "H0_basis_degrees": h0, "H1_basis_degrees": h1, "maps": entries,
            "bijective": all(linalg.det_int(e["matrix"]) in (1, -1) for e in entries)}


def cartier_check(ring, p: int, D: int):
    """Cohomology of q-DR(A) plus C_q; returns a report dict (never raises on mismatch)."""
    _require(ring, p)
    C = build_qdr(SigmaModule.trivial(ring, p), D, [0])
    rep = cohomology(C)
    window = D - p
    exp0 = [n for n in range(window) if n % p == 0]
    exp1 = [n for n in range(window) if (n + 1) % p == 0]
    out = {"p": p, "D": D, "ring": ring.name,
           "H0_degrees": rep.nonzero(0), "H1_degrees": rep.nonzero(1),
           "expected_H0": exp0, "expected_H1": exp1}
    try:
        cm = cartier_map(rep, ring, p)
        out["bijective"] = cm["bijective"]
        out["error"] = None
    except MismatchedCohomology as exc:
        out["bijective"] = False
        out["error"] = str(exc)
    out["ok"] = out["H0_degrees"] == exp0 and out["H1_degrees"] == exp1 and out["bijective"]
    return out


# ---------------------------------------------------------------------------
# quasi-isomorphism

def _phi_chain_rows(Cq, Ch, weight, deg):
    """Z-matrix of the chain map Higgs -> q-DR in weight ``weight`` and degree ``deg``.

    h -> 1 (x) h in degree 0 and h dx' -> x^{p-1} (x) h dx in degree 1.
    """
    p = Cq.p
    src = Ch.monomials(deg, weight)
    tgt = Cq.monomials(deg, weight)
    index = {m: t for t, m in enumerate(tgt)}
    rr = len(Cq.ring.basis())
    rows = []
    for b, j in src:
        a = p * b + (p - 1) * deg
        t = index[(a, j)]
        for k in range(rr):
            row = [0] * (len(tgt) * rr)
            row[t * rr + k] = 1
            rows.append(row)
    return rows


def _image_size_log(diag, ring):
    """(rank-like count, product) describing the image for the exactness test."""
    if ring.int_modulus:
        m = ring.int_modulus
        size = 1
        for g in diag:
            size *= m // g
        return size
    return len(diag)


def _exact(rows_in, rows_out, dim, ring):
    """Exactness at the middle of Z^a -rows_in-> Z^dim -rows_out-> Z^b (composite assumed zero)."""
    nin = map_invariants(rows_in, dim, ring) if rows_in else []
    nout_cols = len(rows_out[0]) if rows_out else 0
    nout = map_invariants(rows_out, nout_cols, ring) if rows_out else []
    if ring.int_modulus:
        m = ring.int_modulus
        im_in = _image_size_log(nin, ring)
        im_out = _image_size_log(nout, ring)
        return im_in * im_out == m ** dim
    if len(nin) + len(nout) != dim:
        return False
    return all(d == 1 for d in nin)


def _matmul_int(A, B, modulus):
    if not A or not B:
        return []
    out = []
    for row in A:
        r = [sum(row[k] * B[k][j] for k in range(len(B))) for j in range(len(B[0]))]
        if modulus:
            r = [x % modulus for x in r]
        out.append(r)
    return out


def quasi_iso_check(M: SigmaModule | None, H: HiggsModule, D: int):
    """Compare q-DR(M) with Higgs(H) for M = M_q(H), weight by weight.

    The primary comparison is equality of homology invariants in the safe
    window.  In addition the explicit chain map Higgs(H) -> q-DR(M) is
    checked to be a chain map whose mapping cone is exact in every weight.
    """
    p = H.p
    if H.rank == 0:
        return {"ok": True, "rows": [], "discrepancies": [], "chain_map": True, "cone_exact": True}
    M = mq_functor(H) if M is None else M
    w = solve_weights(H.theta, p)
    Cq = build_qdr(M, D, w, "qdr")
    Ch = build_higgs(H, D, w, "higgs")
    ring = H.ring
    modulus = ring.int_modulus
    weights = range(0, max(D - p, 0) + 1)

    def one(n):
        b0q, b1q, dq = Cq.piece(n)
        b0h, b1h, dh = Ch.piece(n)
        rr = len(ring.basis())
        hq = homology_pieces(len(b0q) * rr, len(b1q) * rr, dq, ring)
        hh = homology_pieces(len(b0h) * rr, len(b1h) * rr, dh, ring)
        f0 = _phi_chain_rows(Cq, Ch, n, 0)
        f1 = _phi_chain_rows(Cq, Ch, n, 1)
        # chain map: f1(theta h) = nabla(f0 h), rows are images of basis vectors
        lhs = _matmul_int(dh, f1, modulus) if dh and f1 else [[0] * (len(b1q) * rr) for _ in dh]
        rhs = _matmul_int(f0, dq, modulus) if f0 and dq else [[0] * (len(b1q) * rr) for _ in f0]
        if modulus:
            lhs = [[x % modulus for x in r] for r in lhs]
            rhs = [[x % modulus for x in r] for r in rhs]
        chain = [list(map(Fraction, r)) for r in lhs] == [list(map(Fraction, r)) for r in rhs]
        # cone: B0 -> B1 + A0 -> A1 ; b0 -> (-theta b0, f0 b0), (b1, a0) -> f1 b1 + nabla a0
        nb0, nb1 = len(b0h) * rr, len(b1h) * rr
        na0, na1 = len(b0q) * rr, len(b1q) * rr
        d_in = [[-x for x in dh[i]] + f0[i] for i in range(nb0)] if nb0 else []
        d_out = (f1 if nb1 else []) + (dq if na0 else [])
        mid = nb1 + na0
        inv_in = map_invariants(d_in, mid, ring) if d_in else []
        if modulus:
            exact_left = _image_size_log(inv_in, ring) == modulus ** nb0
        else:
            exact_left = len(inv_in) == nb0
        exact_mid = _exact(d_in, d_out, mid, ring) if mid else True
        if na1:
            inv = map_invariants(d_out, na1, ring) if d_out else []
            if modulus:
                exact_right = _image_size_log(inv, ring) == modulus ** na1
            else:
                exact_right = len(inv) == na1 and all(d == 1 for d in inv)
        else:
            exact_right = True
        return n, hq, hh, chain, exact_left and exact_mid and exact_right

    results = pmap(one, list(weights))
    rows = []
    disc = []
    chain_ok = True
    cone_ok = True
    for n, hq, hh, chain, cone in results:
        chain_ok = chain_ok and chain
        cone_ok = cone_ok and cone
        for deg in (0, 1):
            a = {"rank": hq[deg][0], "divisors": hq[deg][1]}
            b = {"rank": hh[deg][0], "divisors": hh[deg][1]}
            row = {"degree": deg, "weight": n, "qdr": a, "higgs": b, "agree": a == b}
            rows.append(row)
            if a != b:
                disc.append(row)
    return {"ok": not disc and chain_ok and cone_ok, "weights": w, "rows": rows,
            "discrepancies": disc, "chain_map": chain_ok, "cone_exact": cone_ok}


def truncation_stable(C: TwoTermComplex):
    """Reported invariants below D - p are unchanged when D grows by p."""
    a = cohomology(C)
    b = cohomology(C, C.D + C.p)
    inv_b = b.invariants()
    return all(inv_b.get(k) == v for k, v in a.invariants().items())


__all__ = [
    "TwoTermComplex", "CohomologyReport", "build_qdr", "build_higgs", "cohomology", "cartier_map",
    "cartier_check", "quasi_iso_check", "solve_weights", "truncation_stable", "homology_pieces",
]
