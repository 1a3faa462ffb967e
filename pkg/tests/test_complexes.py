from __future__ import annotations

import csv
import io
import random

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

import oracles as O
from qcalc.complexes import (build_higgs, build_qdr, cartier_check, cartier_map, cohomology, map_invariants,
                             quasi_iso_check, solve_weights, truncation_stable)
from qcalc.errors import HypothesisViolated, MismatchedCohomology
from qcalc.qarith import Cyclotomic, IntPoly, ModCyclotomic, TruncSeries, TwistPoly
from qcalc.simpson import HiggsModule, SigmaModule, mq_functor, nilpotent_example, random_nilpotent_higgs


@pytest.mark.parametrize("p", [2, 3, 5])
def test_trivial_qdr_matches_sympy_smith_form(p):
    R = Cyclotomic(p)
    D = 4 * p
    rep = cohomology(build_qdr(SigmaModule.trivial(R, p), D, [0]))
    for row in rep.rows:
        n = row["x_degree"] + row["degree"]  # weight of x^n resp. x^(n-1) dx
        h0, h1, div = O.qdr_trivial_homology(p, n)
        if row["degree"] == 0:
            assert row["rank"] == h0
        elif n > 0:
            assert row["rank"] == h1
            assert row["divisors"] == div


@given(rows=st.lists(st.lists(st.integers(-6, 6), min_size=3, max_size=3), min_size=1, max_size=4))
def test_map_invariants_match_sympy(rows):
    R = Cyclotomic(2)  # rank-one lattice, integer coefficients
    got = map_invariants(rows, 3, R)
    want = O.smith_invariants(sp.Matrix(rows))
    assert sorted(got) == sorted(want)


@given(rows=st.lists(st.lists(st.integers(-9, 9), min_size=2, max_size=2), min_size=1, max_size=3))
def test_map_invariants_mod_m(rows):
    R = ModCyclotomic(3, 2)
    m = R.int_modulus
    got = map_invariants(rows, 2, R)
    want = [g for g in (sp.gcd(d, m) for d in O.smith_invariants(sp.Matrix(rows))) if g != m]
    assert sorted(got) == sorted(int(g) for g in want)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_cartier_pattern(p):
    r = cartier_check(Cyclotomic(p), p, 4 * p)
    assert r["H0_degrees"] == [0, p, 2 * p]
    assert r["H1_degrees"] == [p - 1, 2 * p - 1, 3 * p - 1]
    assert r["bijective"] and r["ok"]


@pytest.mark.parametrize("p", [2, 3, 5])
def test_classical_cartier_at_q_one(p):
    r = cartier_check(ModCyclotomic(p, 1, q_one=True), p, 4 * p)
    assert r["ok"]
    assert r["H1_degrees"] == [p - 1, 2 * p - 1, 3 * p - 1]


def test_cartier_map_detects_tampered_report():
    R = Cyclotomic(3)
    rep = cohomology(build_qdr(SigmaModule.trivial(R, 3), 12, [0]))
    rep.rows[0] = dict(rep.rows[0], rank=0)
    with pytest.raises(MismatchedCohomology):
        cartier_map(rep, R, 3)


def test_cartier_needs_pq_zero():
    with pytest.raises(HypothesisViolated):
        cartier_check(IntPoly(), 3, 12)
    with pytest.raises(HypothesisViolated):
        build_qdr(SigmaModule.trivial(IntPoly(), 3), 8, [0])


@pytest.mark.parametrize("p,r", [(2, 1), (2, 2), (2, 3), (3, 1), (3, 2), (3, 3), (5, 2)])
def test_quasi_iso_jordan(p, r):
    H = nilpotent_example(Cyclotomic(p), p, r)
    q = quasi_iso_check(None, H, 4 * p)
    assert q["ok"] and q["chain_map"] and q["cone_exact"] and not q["discrepancies"]


@pytest.mark.parametrize("p", [2, 3])
@given(seed=st.integers(0, 10 ** 6))
def test_quasi_iso_random_graded(p, seed):
    rng = random.Random(seed)
    H = random_nilpotent_higgs(Cyclotomic(p), p, rng.randint(1, 3), rng)
    assert quasi_iso_check(None, H, 4 * p)["ok"]


def test_quasi_iso_other_rings():
    for R, p in ((ModCyclotomic(3, 2), 3), (ModCyclotomic(3, 1, q_one=True), 3), (TruncSeries(4), 2)):
        try:
            H = nilpotent_example(R, p, 2)
            assert quasi_iso_check(None, H, 4 * p)["ok"]
        except HypothesisViolated:
            assert R.kind == "series"


def test_solve_weights():
    R = Cyclotomic(2)
    T = [[TwistPoly.zero(R), TwistPoly.monomial(R, 1)], [TwistPoly.zero(R), TwistPoly.zero(R)]]
    assert solve_weights(T, 2) == [0, 4]
    bad = [[TwistPoly.zero(R), TwistPoly(R, {0: R.one, 1: R.one})], [TwistPoly.zero(R), TwistPoly.zero(R)]]
    with pytest.raises(HypothesisViolated):
        solve_weights(bad, 2)


@pytest.mark.parametrize("p", [2, 3])
def test_truncation_stable(p):
    H = nilpotent_example(Cyclotomic(p), p, 2)
    assert truncation_stable(build_qdr(mq_functor(H), 4 * p))
    assert truncation_stable(build_higgs(H, 4 * p))


def test_safe_window_and_csv():
    R = Cyclotomic(3)
    rep = cohomology(build_qdr(SigmaModule.trivial(R, 3), 12, [0], cid="A"))
    assert all(r["x_degree"] < 12 - 3 for r in rep.rows)
    rows = list(csv.reader(io.StringIO(rep.to_csv())))
    assert rows[0] == ["complex_id", "cohomological_degree", "x_degree", "rank", "elementary_divisors"]
    assert all(r[0] == "A" for r in rows[1:])
    assert rep.to_csv() == cohomology(build_qdr(SigmaModule.trivial(R, 3), 12, [0], cid="A")).to_csv()


def test_differential_lowers_x_degree_by_one():
    R = Cyclotomic(3)
    C = build_qdr(SigmaModule.trivial(R, 3), 12, [0])
    for w in range(1, 8):
        assert C.x_degree(0, w) == C.x_degree(1, w) + 1


def test_rank_zero_higgs():
    H = HiggsModule(Cyclotomic(2), [], 2)
    assert quasi_iso_check(None, H, 8)["ok"]
