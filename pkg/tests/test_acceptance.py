"""The ten acceptance criteria, evaluated literally at exact (zero) tolerance.

Each test prints one line ``CRITERION k [...]: PASS|FAIL (detail; seconds)``;
the lines are repeated in the pytest terminal summary.  Run standalone with
``python tests/test_acceptance.py`` to get just the ten lines.

A criterion that does not hold is reported as FAIL with the witness; no
criterion is weakened to make it pass.
"""
from __future__ import annotations

import json
import random
import subprocess
import sys
import threading
import time
from math import comb
from pathlib import Path

import pytest

from qcalc.complexes import cartier_check, quasi_iso_check
from qcalc.delta import delta_xi_check, prismatic_ring, qpd_condition_check, vn_basis
from qcalc import frobenius as F
from qcalc.ore import OreRing, centralizer_of_A, duality_rhs, is_central, ore_mul, pairing
from qcalc.qarith import CoordPoly, Cyclotomic, IntPoly, ModCyclotomic, TruncSeries, q_binom, q_int
from qcalc.simpson import HiggsModule, SigmaModule, hq_functor, mq_functor, round_trip
from qcalc.suites import RunConfig, random_examples
from qcalc.tpd import TPDParams, from_poly, to_poly, tpd_mul

GOLDEN = Path(__file__).parent / "golden" / "a_diff_report.json"
PRIMES = (2, 3, 5)
RESULTS: dict[int, str] = {}


def _record(k, title, ok, detail, seconds, limit):
    in_time = limit is None or seconds < limit
    status = "PASS" if ok and in_time else "FAIL"
    budget = f"{seconds:.1f}s" + (f" < {limit}s" if limit and in_time else (f" >= {limit}s" if limit else ""))
    line = f"CRITERION {k:>2} [{title}]: {status} ({detail}; {budget})"
    RESULTS[k] = line
    print(line)
    return ok and in_time, line


def _evaluate(k, title, fn, limit):
    t0 = time.perf_counter()
    ok, detail = fn()
    return _record(k, title, ok, detail, time.perf_counter() - t0, limit)


# ---------------------------------------------------------------------------
# 1. q-combinatorics

def _all_kind_rings():
    rings = [IntPoly(), TruncSeries(8)]
    for p in PRIMES + (7,):
        rings += [Cyclotomic(p), ModCyclotomic(p, 2), ModCyclotomic(p, 1, q_one=True)]
    return rings


def criterion_1():
    bad = []
    rings = _all_kind_rings()
    for R in rings:
        for n in range(31):
            row = [q_binom(n, k, R) for k in range(n + 1)]
            for k in range(n + 1):
                if 1 <= k and n >= 1:
                    if row[k] != q_binom(n - 1, k - 1, R) + q_binom(n - 1, k, R) * R.q ** k:
                        bad.append((R.name, "pascal", n, k))
                v, m = R.at_one(row[k])
                if v != (comb(n, k) % m if m else comb(n, k)):
                    bad.append((R.name, "u=1", n, k))
    return not bad, f"{len(rings)} rings, 4 kinds, n<=30; failures={bad[:3]}"


# ---------------------------------------------------------------------------
# 2. twisted divided powers

def _tpd_instances(p):
    Z = IntPoly()
    R = Cyclotomic(p)
    xz = CoordPoly.gen(Z)
    yp = CoordPoly.gen(R).scale(1 - R.q) ** p
    return [("A<xi>_{q,y}/Z[u]", TPDParams.principal(Z)),
            ("A<xi>_{q,y}/C_p", TPDParams.principal(R)),
            ("A<w>_{1,y^p}/C_p", TPDParams(R, R.one, yp)),
            ("A'<w>_{1,y}/C_p", F.domain_params(R, p)),
            ("A<eta>_{q^p,y}/Z[u]", TPDParams(Z, Z.q ** p, xz.scale(1 - Z.q)))]


def _monomial(P, rng, top):
    R = P.ring
    c = rng.choice([1, -1, 2, -3])
    return P.gen(rng.randint(0, top), CoordPoly.monomial(R, rng.randint(0, 2), c))


def criterion_2():
    rng = random.Random(20240)
    bad = []
    count = 0
    for p in PRIMES:
        top = 3 * p
        for name, P in _tpd_instances(p):
            for _ in range(300):
                a, b, c = (_monomial(P, rng, top) for _ in range(3))
                count += 1
                if tpd_mul(tpd_mul(a, b), c) != tpd_mul(a, tpd_mul(b, c)):
                    bad.append((p, name, "assoc"))
                if tpd_mul(a, b) != tpd_mul(b, a):
                    bad.append((p, name, "comm"))
        Z = IntPoly()
        P = TPDParams.principal(Z)
        for _ in range(40):
            a, b = _monomial(P, rng, top), _monomial(P, rng, top)
            prod = tpd_mul(a, b)
            n1, d1 = to_poly(a)
            n2, d2 = to_poly(b)
            n3, d3 = to_poly(prod)
            if (n1 * n2) * CoordPoly.const(Z, d3) != n3 * CoordPoly.const(Z, d1 * d2):
                bad.append((p, "embedding"))
            if from_poly(n3, P, denominator=d3) != prod:
                bad.append((p, "embedding-inverse"))
    return not bad, f"{count} triples over 5 instances x p in {PRIMES}, 120 embedding pairs; failures={bad[:3]}"


# ---------------------------------------------------------------------------
# 3. Ore / duality

def criterion_3():
    bad = []
    for p in PRIMES:
        for R in (IntPoly(), Cyclotomic(p)):
            O_ = OreRing.standard(R)
            for n in range(1, 3 * p + 1):
                lhs = ore_mul(O_.d(n), O_.x())
                rhs = (ore_mul(O_.x(), O_.d(n)) * CoordPoly.const(R, R.q ** n)
                       + O_.d(n - 1) * CoordPoly.const(R, q_int(n, R)))
                if lhs != rhs:
                    bad.append((p, R.name, "commutation", n))
        R = Cyclotomic(p)
        O_ = OreRing.standard(R)
        P = TPDParams.principal(R)
        top = 2 * p
        for k1 in range(top + 1):
            for k2 in range(top + 1 - k1):
                for a, b in ((0, 0), (1, 0), (0, 1)):
                    D1 = O_.op({k1: CoordPoly.monomial(R, a)})
                    D2 = O_.op({k2: CoordPoly.monomial(R, b)})
                    prod = ore_mul(D1, D2)
                    for n in range(top + 1):
                        for c in (0, 1):
                            e = P.gen(n, CoordPoly.monomial(R, c))
                            if pairing(prod, e) != duality_rhs(D1, D2, e):
                                bad.append((p, "duality", k1, k2, n))
    return not bad, f"commutation n<=3p over Z[u] and C_p, duality degrees<=2p; failures={bad[:3]}"


# ---------------------------------------------------------------------------
# 4. centrality

def criterion_4():
    bad = []
    for p in PRIMES:
        R = Cyclotomic(p)
        if not is_central(OreRing.standard(R).d(p))["central"]:
            bad.append((p, "d^p"))
        for K in (1, 2, 3):
            if not centralizer_of_A(R, K, 2 * p, p)["ok"]:
                bad.append((p, "centralizer", K))
    return not bad, f"p in {PRIMES}, K<=3; failures={bad}"


# ---------------------------------------------------------------------------
# 5. Frobenius layer

def criterion_5():
    nonintegral = {}
    fstar_bad, basis_bad = [], []
    for p in PRIMES:
        for n in range(4):
            for i in range(p * n + 1):
                if F.b_from_relation(n, i, p) is None:
                    nonintegral.setdefault(p, []).append((n, i))
        R = Cyclotomic(p)
        dom = F.choose_domain(R, p, 4)
        if dom["default"] is None:
            fstar_bad.append(p)
        for N in range(3 * p + 1):
            if not F.basis_certificate(R, p, N)["ok"]:
                basis_bad.append((p, N))
    ok_defb = not nonintegral
    detail = (f"defB integrality {'ok' if ok_defb else 'FAILS'}"
              f" (first non-integral (n,i): {({p: v[0] for p, v in nonintegral.items()})});"
              f" [F*] multiplicative a+b<=4: {'ok' if not fstar_bad else fstar_bad};"
              f" basis certificate N<=3p: {'ok' if not basis_bad else basis_bad}")
    return ok_defb and not fstar_bad and not basis_bad, detail


# ---------------------------------------------------------------------------
# 6. neutralization

def criterion_6():
    det_bad, theta_bad = [], []
    for p in (2, 3):
        R = Cyclotomic(p)
        for N in (1, 2, 3):
            r = F.neutralization_check(R, p, N)
            if not (r["ore_relation"] and r["determinant_unit"]):
                det_bad.append((p, N))
            if not r["dp_equiv_theta_mod_theta2"]:
                theta_bad.append((p, N, r["dp_value"]))
    detail = (f"determinant unit: {'ok' if not det_bad else det_bad};"
              f" d^p = theta mod theta^2: {'ok' if not theta_bad else 'FAILS at ' + str(theta_bad[0])}")
    return not det_bad and not theta_bad, detail


# ---------------------------------------------------------------------------
# 7. correspondence

def _round_trip_examples():
    return random_examples(RunConfig(seed=0), 20, primes=(2, 3))


def criterion_7():
    exs = _round_trip_examples()
    results = [round_trip(H) for H in exs]
    fails = [(i, H.p, H.rank, r.get("error")) for i, (H, r) in enumerate(zip(exs, results)) if not r["ok"]]
    triv_ok = True
    for p in (2, 3):
        R = Cyclotomic(p)
        res = hq_functor(SigmaModule.trivial(R, p), p, 2 * p)
        triv_ok = triv_ok and len(res.generators) == 1 and all(not e for row in res.higgs.theta for e in row)
        triv_ok = triv_ok and mq_functor(HiggsModule(R, [[0]], p)).matrix == SigmaModule.trivial(R, p).matrix
    detail = (f"(A',0)<->(A,d_sigma): {'ok' if triv_ok else 'FAILS'};"
              f" round trip {20 - len(fails)}/20 equal"
              + (f", failing (index, p, rank, error): {fails[:4]}{' ...' if len(fails) > 4 else ''}" if fails else ""))
    return triv_ok and not fails, detail


# ---------------------------------------------------------------------------
# 8. cohomology and Cartier

def criterion_8():
    bad = []
    for p in PRIMES:
        for R in (Cyclotomic(p), ModCyclotomic(p, 1, q_one=True)):
            r = cartier_check(R, p, 4 * p)
            window = 4 * p - p
            want0 = [p * m for m in range(window) if p * m < window]
            want1 = [p * m + p - 1 for m in range(window) if p * m + p - 1 < window]
            if r["H0_degrees"] != want0 or r["H1_degrees"] != want1 or not r["bijective"]:
                bad.append((p, R.name, r["H0_degrees"], r["H1_degrees"], r["error"]))
    qi_bad = []
    for i, H in enumerate(_round_trip_examples()):
        if not quasi_iso_check(None, H, 4 * H.p)["ok"]:
            qi_bad.append(i)
    return not bad and not qi_bad, (f"Cartier p in {PRIMES} (q generic and q=1/F_p): "
                                    f"{'ok' if not bad else bad}; quasi-iso on 20 examples: "
                                    f"{'ok' if not qi_bad else qi_bad}")


# ---------------------------------------------------------------------------
# 9. delta structures and envelopes

def criterion_9():
    bad = []
    for p in PRIMES:
        if not delta_xi_check(p).ok:
            bad.append((p, "delta_xi"))
        if not all(c.ok for c in qpd_condition_check(p, 6)):
            bad.append((p, "qpd"))
        try:
            _, cert = prismatic_ring(p, "y")
            if not cert.ok:
                bad.append((p, "prismatic"))
        except Exception as exc:  # noqa: BLE001 - the witness is reported
            bad.append((p, "prismatic", str(exc)))
    for p in (2, 3):
        try:
            _, cert = vn_basis(p * p, p * p, p)
            if not cert.ok:
                bad.append((p, "v_n"))
        except Exception as exc:  # noqa: BLE001
            bad.append((p, "v_n", str(exc)))
    return not bad, f"delta(xi), q-PD n<=6, prismatic phi(eta) for p in {PRIMES}; v_n n<=p^2 p in (2,3); failures={bad}"


# ---------------------------------------------------------------------------
# 10. documented divergence

class _CallCounter:
    """Counts calls of one code object on every thread (profiling hook)."""

    def __init__(self, code):
        self.code = code
        self.calls = 0

    def __call__(self, frame, event, arg):
        if event == "call" and frame.f_code is self.code:
            self.calls += 1

    def __enter__(self):
        sys.setprofile(self)
        threading.setprofile(self)
        return self

    def __exit__(self, *exc):
        sys.setprofile(None)
        threading.setprofile(None)


def _downstream_5_to_9():
    """The computations behind criteria 5-9, run from cold caches."""
    F.phi_oracle.cache_clear()
    F.divided_frobenius_generic.cache_clear()
    F.phi_xi_poly.cache_clear()
    for p in PRIMES:
        for n in range(4):
            for i in range(p * n + 1):
                F.b_from_relation(n, i, p)
        R = Cyclotomic(p)
        F.choose_domain(R, p, 4)
        F.basis_certificate(R, p, 3 * p)
        cartier_check(R, p, 4 * p)
        delta_xi_check(p)
        qpd_condition_check(p, 6)
        prismatic_ring(p, "y")
    for p in (2, 3):
        F.neutralization_check(Cyclotomic(p), p, 3)
        vn_basis(p * p, p * p, p)
    for H in _round_trip_examples()[:6]:
        round_trip(H)
        quasi_iso_check(None, H, 4 * H.p)


def criterion_10():
    first = F.a_diff_report()
    second = F.a_diff_report()
    stored = json.loads(GOLDEN.read_text())
    canon = json.loads(json.dumps(first, sort_keys=True))
    proc = subprocess.run([sys.executable, "-c",
                           "import json; from qcalc.frobenius import a_diff_report;"
                           "print(json.dumps(a_diff_report(), sort_keys=True))"],
                          capture_output=True, text=True)
    fresh = json.loads(proc.stdout) if proc.returncode == 0 else None
    stable = first == second and canon == stored and fresh == stored
    with _CallCounter(F.a_poly_formula.__code__) as counter:
        _downstream_5_to_9()
    independent = counter.calls == 0
    return stable and bool(stored["entries"]) and independent, (
        f"diff report: {len(first['entries'])} entries, golden {'match' if stable else 'MISMATCH'};"
        f" closed-formula calls during criteria 5-9 computations: {counter.calls}")


# ---------------------------------------------------------------------------

CRITERIA = [
    (1, "q-combinatorics", criterion_1, 5),
    (2, "twisted divided powers", criterion_2, 30),
    (3, "Ore/duality", criterion_3, None),
    (4, "centrality", criterion_4, None),
    (5, "Frobenius layer", criterion_5, 120),
    (6, "neutralization", criterion_6, 60),
    (7, "correspondence", criterion_7, 120),
    (8, "cohomology and Cartier", criterion_8, None),
    (9, "delta/envelopes", criterion_9, 120),
    (10, "documented divergence", criterion_10, None),
]


@pytest.mark.parametrize("k,title,fn,limit", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(k, title, fn, limit):
    ok, line = _evaluate(k, title, fn, limit)
    assert ok, line


if __name__ == "__main__":
    passed = [_evaluate(*c)[0] for c in CRITERIA]
    sys.exit(0 if all(passed) else 1)
