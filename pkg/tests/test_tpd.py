from __future__ import annotations

from math import comb

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

import oracles as O
from helpers import coord_polys, coord_to_sym
from qcalc.errors import NotTorsionFree
from qcalc.frobenius import domain_params
from qcalc.qarith import CoordPoly, Cyclotomic, IntPoly, ModCyclotomic, TruncSeries
from qcalc.tpd import TPDParams, from_poly, taylor, to_poly, tpd_mul, truncate


def _instances():
    Z = IntPoly()
    x = CoordPoly.gen(Z)
    out = [("principal-Z[u]", TPDParams.principal(Z)),
           ("prismatic-Z[u]", TPDParams(Z, Z.q ** 3, x.scale(1 - Z.q)))]
    for p in (2, 3, 5):
        R = Cyclotomic(p)
        out.append((f"principal-C{p}", TPDParams.principal(R)))
        out.append((f"domain-C{p}", domain_params(R, p)))
    out.append(("principal-series", TPDParams.principal(TruncSeries(6))))
    out.append(("principal-mod9", TPDParams.principal(ModCyclotomic(3, 2))))
    return out


INSTANCES = _instances()


@pytest.mark.parametrize("n,m", [(n, m) for n in range(4) for m in range(4)])
def test_product_matches_fraction_field_oracle(n, m):
    P = TPDParams.principal(IntPoly())
    got = tpd_mul(P.gen(n), P.gen(m))
    want = O.divided_product(n, m)
    assert set(got.terms) == set(want)
    for k, c in got.terms.items():
        assert sp.expand(coord_to_sym(c) - want[k]) == 0


def test_frozen_product():
    # xi^[1] xi^[1] = (1 + q) xi^[2] - y xi^[1]  with y = (1 - q) x
    Z = IntPoly()
    P = TPDParams.principal(Z)
    e = tpd_mul(P.gen(1), P.gen(1))
    assert e.coeff(2) == CoordPoly.const(Z, Z.element([1, 1]))
    assert e.coeff(1) == CoordPoly.monomial(Z, 1, Z.element([-1, 1]))


@pytest.mark.parametrize("name,P", INSTANCES, ids=[n for n, _ in INSTANCES])
@given(data=st.data())
def test_associative_and_commutative(name, P, data):
    p = P.ring.p or 3
    degs = st.integers(0, 3 * p)
    ea, eb, ec = (P.gen(data.draw(degs), data.draw(coord_polys(P.ring, 2, 2))) for _ in range(3))
    assert tpd_mul(tpd_mul(ea, eb), ec) == tpd_mul(ea, tpd_mul(eb, ec))
    assert tpd_mul(ea, eb) == tpd_mul(eb, ea)


@pytest.mark.parametrize("name,P", INSTANCES, ids=[n for n, _ in INSTANCES])
def test_augmentation_powers_form_ideals(name, P):
    for a in range(5):
        for b in range(5):
            e = tpd_mul(P.gen(a), P.gen(b))
            assert e.low_degree() >= max(a, b)


@given(a=st.integers(0, 6), b=st.integers(0, 6))
def test_embedding_is_homomorphism(a, b):
    Z = IntPoly()
    P = TPDParams.principal(Z)
    n1, d1 = to_poly(P.gen(a))
    n2, d2 = to_poly(P.gen(b))
    prod = tpd_mul(P.gen(a), P.gen(b))
    n3, d3 = to_poly(prod)
    assert (n1 * n2) * CoordPoly.const(Z, d3) == n3 * CoordPoly.const(Z, d1 * d2)
    assert from_poly(n3, P, denominator=d3) == prod


def test_embedding_refuses_torsion():
    P = TPDParams.principal(Cyclotomic(3))
    with pytest.raises(NotTorsionFree):
        to_poly(P.gen(3))


def test_ordinary_divided_powers_at_q_one_y_zero():
    Z = IntPoly()
    P = TPDParams(Z, Z.one, CoordPoly.zero(Z))
    for n in range(6):
        for m in range(6):
            assert tpd_mul(P.gen(n), P.gen(m)) == P.gen(n + m, CoordPoly.const(Z, comb(n + m, n)))


@pytest.mark.parametrize("R", [IntPoly(), Cyclotomic(3), Cyclotomic(5)], ids=repr)
@given(data=st.data())
def test_taylor_is_multiplicative(R, data):
    z1 = data.draw(coord_polys(R, 5, 2))
    z2 = data.draw(coord_polys(R, 5, 2))
    N = data.draw(st.integers(0, 2 * (R.p or 3)))
    lhs = taylor(z1 * z2, N)
    rhs = truncate(tpd_mul(taylor(z1, N), taylor(z2, N), trunc=N), N)
    assert lhs == rhs


def test_one_is_degree_zero_and_unit():
    P = TPDParams.principal(Cyclotomic(3))
    e = P.gen(4, CoordPoly.monomial(P.ring, 2))
    assert tpd_mul(P.one(), e) == e
    assert P.one().terms.keys() == {0}
