from __future__ import annotations

import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import coord_polys
from qcalc.errors import HypothesisViolated, NotCertifiedQuasiNilpotent
from qcalc.qarith import CoordPoly, Cyclotomic, IntPoly, ModCyclotomic, TwistPoly, frobenius_embed
from qcalc.simpson import (HiggsModule, SigmaModule, dp_theta_check, expected_dp_field, hq_functor,
                           is_higgs_morphism, is_sigma_morphism, leibniz_check, mq_functor, mq_morphism,
                           nilpotent_example, normalize_higgs, quasi_nilpotence_certificate,
                           random_nilpotent_higgs, round_trip)


def test_trivial_pair():
    for p in (2, 3):
        R = Cyclotomic(p)
        res = hq_functor(SigmaModule.trivial(R, p), p, 2 * p)
        assert len(res.generators) == 1
        g = res.generators[0][0]
        assert g.degree() == 0 and R.is_unit(g.coeff(0))
        assert all(not e for row in res.higgs.theta for e in row)
        assert mq_functor(HiggsModule(R, [[0]], p)).matrix == SigmaModule.trivial(R, p).matrix


@pytest.mark.parametrize("p", [2, 3])
@given(data=st.data())
def test_mq_satisfies_leibniz(p, data):
    R = Cyclotomic(p)
    H = random_nilpotent_higgs(R, p, data.draw(st.integers(1, 3)), random.Random(data.draw(st.integers(0, 99))))
    M = mq_functor(H)
    a = data.draw(coord_polys(R, 4, 2))
    v = [data.draw(coord_polys(R, 3, 2)) for _ in range(M.rank)]
    assert leibniz_check(M, a, v)


@pytest.mark.parametrize("p", [2, 3])
def test_mq_matrix(p):
    R = Cyclotomic(p)
    H = nilpotent_example(R, p, 2)
    M = mq_functor(H)
    assert M.matrix[0][1] == CoordPoly.monomial(R, p - 1)
    assert not M.matrix[1][0]


def test_mq_rejects_non_nilpotent():
    R = Cyclotomic(2)
    with pytest.raises(NotCertifiedQuasiNilpotent):
        mq_functor(HiggsModule(R, [[1]], 2))


def test_requires_pq_zero():
    with pytest.raises(HypothesisViolated):
        mq_functor(nilpotent_example(IntPoly(), 3, 2))


@pytest.mark.parametrize("p", [2, 3])
def test_quasi_nilpotence_certificates(p):
    R = Cyclotomic(p)
    H = nilpotent_example(R, p, 3)
    assert quasi_nilpotence_certificate(H)["n"] == 3
    qn = quasi_nilpotence_certificate(mq_functor(H))
    assert qn["certified"]


@pytest.mark.parametrize("p", [2, 3])
def test_functoriality(p):
    R = Cyclotomic(p)
    H = nilpotent_example(R, p, 2)
    # Theta itself and polynomials in it intertwine Theta
    F = [[TwistPoly.one(R), TwistPoly.gen(R)], [TwistPoly.zero(R), TwistPoly.one(R)]]
    assert is_higgs_morphism(F, H, H)
    M = mq_functor(H)
    assert is_sigma_morphism(mq_morphism(F), M, M)
    G = [[TwistPoly.one(R), TwistPoly.zero(R)], [TwistPoly.gen(R), TwistPoly.one(R)]]
    assert not is_higgs_morphism(G, H, H)
    assert not is_sigma_morphism(mq_morphism(G), M, M)


@pytest.mark.parametrize("p", [2, 3])
@given(seed=st.integers(0, 10 ** 6))
def test_normalization_inverts_dp_field(p, seed):
    R = Cyclotomic(p)
    H = random_nilpotent_higgs(R, p, 3, random.Random(seed))
    G = HiggsModule(R, expected_dp_field(H), p)
    assert normalize_higgs(G) == H


def test_dp_field_frozen():
    # d^p on 1 (x) H is g(Theta) = Theta - x' Theta^2 + ... at p = 2
    R = Cyclotomic(2)
    H = nilpotent_example(R, 2, 3)
    g = expected_dp_field(H)
    assert g[0][1] == TwistPoly.one(R)
    assert g[0][2] == TwistPoly.monomial(R, 1, -1)


def test_round_trip_square_zero_p2():
    rt = round_trip(nilpotent_example(Cyclotomic(2), 2, 2))
    assert rt["ok"] and rt["rank"] == 2 and rt["normalized_theta_equal"]


def test_round_trip_rank_one():
    for p in (2, 3):
        assert round_trip(nilpotent_example(Cyclotomic(p), p, 1))["ok"]


@pytest.mark.parametrize("p,r", [(2, 3), (3, 2)])
def test_round_trip_rank_deficient_when_dp_is_not_linear_field(p, r):
    """Solutions of the fixed-point system do not span when g(Theta) != Theta."""
    rt = round_trip(nilpotent_example(Cyclotomic(p), p, r))
    assert not rt["ok"]
    assert rt["error"] == "RankDeficient"
    assert rt["rank"] < r


def test_dp_theta_congruence():
    assert dp_theta_check(nilpotent_example(Cyclotomic(2), 2, 3))["ok"]
    assert not dp_theta_check(nilpotent_example(Cyclotomic(3), 3, 2))["ok"]


def test_random_examples_are_nilpotent_and_deterministic():
    R = Cyclotomic(3)
    a = random_nilpotent_higgs(R, 3, 3, random.Random(5))
    b = random_nilpotent_higgs(R, 3, 3, random.Random(5))
    assert a == b
    assert a.nilpotency_index() is not None


def test_q_one_field():
    R = ModCyclotomic(3, 1, q_one=True)
    H = nilpotent_example(R, 3, 1)
    assert round_trip(H)["ok"]
    assert frobenius_embed(TwistPoly.gen(R), 3) == CoordPoly.monomial(R, 3)
