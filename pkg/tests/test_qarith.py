from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

import oracles as O
from helpers import ALL_RINGS, RING_IDS, coord_polys, intpoly_to_sym, ring_values
from qcalc.errors import NotAUnit, NotExactlyDivisible
from qcalc.qarith import (CoordPoly, Cyclotomic, IntPoly, ModCyclotomic, TruncSeries, TwistPoly,
                          frobenius_embed, frobenius_restrict, q_binom, q_derive, q_fact, q_int,
                          sigma_apply)


@pytest.mark.parametrize("n", range(0, 9))
def test_q_binom_matches_product_formula(n):
    Z = IntPoly()
    for k in range(n + 1):
        assert sp.expand(intpoly_to_sym(q_binom(n, k, Z)) - O.qbinom(n, k)) == 0


@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_q_binom_in_cyclotomic_is_reduced_product_formula(p):
    R = Cyclotomic(p)
    for n in range(0, 2 * p + 1):
        for k in range(n + 1):
            got = intpoly_to_sym(q_binom(n, k, R))
            assert sp.expand(got - O.cyclotomic_reduce(O.qbinom(n, k), p)) == 0


def test_frozen_small_values():
    Z = IntPoly()
    assert q_binom(4, 2, Z).c == (1, 1, 2, 1, 1)
    assert q_fact(3, Z).c == (1, 2, 2, 1)
    assert q_int(0, Z).c == ()
    assert q_binom(3, 5, Z).c == ()


@pytest.mark.parametrize("R", ALL_RINGS, ids=RING_IDS)
def test_q_pascal_all_rings(R):
    for n in range(1, 31):
        for k in range(1, n + 1):
            assert q_binom(n, k, R) == q_binom(n - 1, k - 1, R) + q_binom(n - 1, k, R) * R.q ** k


@pytest.mark.parametrize("R", ALL_RINGS, ids=RING_IDS)
def test_specialization_at_one(R):
    for n in range(31):
        for k in range(n + 1):
            v, m = R.at_one(q_binom(n, k, R))
            assert v == (comb(n, k) % m if m else comb(n, k))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_q_integer_unit_iff_prime_to_p(p):
    R = Cyclotomic(p)
    for m in range(1, 4 * p + 1):
        assert R.is_unit(q_int(m, R)) == (m % p != 0)
        if m % p == 0:
            assert not q_int(m, R)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_canonical_form_degree(p):
    R = Cyclotomic(p)
    for n in range(12):
        assert len((R.q ** n).c) <= p - 1
    assert R.q ** p == R.one


@pytest.mark.parametrize("R", ALL_RINGS, ids=RING_IDS)
@given(data=st.data())
def test_ring_axioms(R, data):
    a, b, c = (data.draw(ring_values(R)) for _ in range(3))
    assert (a + b) + c == a + (b + c)
    assert a + b == b + a
    assert (a * b) * c == a * (b * c)
    assert a * b == b * a
    assert a * (b + c) == a * b + a * c
    assert a - a == R.zero
    assert a * R.one == a


@pytest.mark.parametrize("R", ALL_RINGS, ids=RING_IDS)
@given(data=st.data())
def test_twisted_leibniz(R, data):
    a = data.draw(coord_polys(R))
    b = data.draw(coord_polys(R))
    assert q_derive(a * b) == sigma_apply(a) * q_derive(b) + q_derive(a) * b


@given(coeffs=st.lists(st.integers(-5, 5), max_size=6))
def test_q_derive_matches_sympy(coeffs):
    Z = IntPoly()
    a = CoordPoly(Z, {n: Z.element([c, 1]) for n, c in enumerate(coeffs)})
    f = sum(((c + O.q) * O.x ** n for n, c in enumerate(coeffs)), sp.Integer(0))
    got = sum((intpoly_to_sym(v) * O.x ** n for n, v in q_derive(a).terms.items()), sp.Integer(0))
    assert sp.expand(got - O.q_derivative(f)) == 0


@pytest.mark.parametrize("p", [2, 3, 5])
@given(data=st.data())
def test_sigma_commutes_with_frobenius_embed(p, data):
    Z = IntPoly()
    a = TwistPoly(Z, data.draw(st.dictionaries(st.integers(0, 3), ring_values(Z), max_size=4)))
    # sigma on A restricted to A' is sigma' with q replaced by q^p
    lhs = sigma_apply(frobenius_embed(a, p))
    rhs = frobenius_embed(sigma_apply(a, p), p)
    assert lhs == rhs
    R = Cyclotomic(p)
    b = TwistPoly(R, data.draw(st.dictionaries(st.integers(0, 3), ring_values(R), max_size=4)))
    assert sigma_apply(frobenius_embed(b, p)) == frobenius_embed(b, p)
    assert frobenius_restrict(frobenius_embed(b, p), p) == b


def test_frobenius_restrict_rejects_non_image():
    R = Cyclotomic(3)
    assert frobenius_restrict(CoordPoly.monomial(R, 2), 3) is None


@pytest.mark.parametrize("R", [Cyclotomic(3), Cyclotomic(5), TruncSeries(6), ModCyclotomic(3, 2)],
                         ids=repr)
def test_invert_units(R):
    for m in (1, 2, 4):
        if m % (R.p or 7) == 0:
            continue
        v = q_int(m, R) if R.kind != "series" else R.from_intpoly([m, 1])
        if R.is_unit(v):
            assert v * R.invert(v) == R.one


def test_non_unit_raises():
    R = Cyclotomic(3)
    with pytest.raises(NotAUnit):
        R.invert(R.element([3]))
    Z = IntPoly()
    with pytest.raises(NotExactlyDivisible):
        Z.exact_div(Z.element([1, 1]), Z.element([2]))
    assert Z.exact_div(Z.element([2, 2]), Z.element([1, 1])) == Z.element([2])


def test_no_stored_zero_coefficients():
    Z = IntPoly()
    a = CoordPoly(Z, {0: Z.one, 3: Z.zero})
    assert 3 not in a.terms
    assert a - a == CoordPoly.zero(Z)
    assert CoordPoly.zero(Z).degree() < 0


def _long_coeffs(draw, stride):
    size = draw(st.integers(1, 90))
    width = draw(st.sampled_from([2, 2 ** 7, 2 ** 40, 2 ** 200]))
    cs = draw(st.lists(st.integers(-width, width), min_size=size, max_size=size))
    cs = [c if k % stride == 0 else 0 for k, c in enumerate(cs)]
    return [0] * draw(st.integers(0, 6)) + cs


@st.composite
def long_polys(draw):
    stride = draw(st.sampled_from([1, 1, 2, 5]))
    return _long_coeffs(draw, stride), _long_coeffs(draw, draw(st.sampled_from([1, stride])))



def _sym_product(a, b):
    """Coefficients (low to high) of the product computed by sympy."""
    t = sp.Symbol("t")
    prod = sp.Poly(list(reversed(a)), t, domain="QQ") * sp.Poly(list(reversed(b)), t, domain="QQ")
    return [sp.Rational(c) for c in reversed(prod.all_coeffs())]


def _strip_zeros(cs):
    cs = list(cs)
    while cs and not cs[-1]:
        cs.pop()
    return cs


@given(long_polys())
def test_long_intpoly_products_match_sympy(pair):
    # long, strided and wide-coefficient inputs exercise every multiplication path
    a, b = pair
    Z = IntPoly()
    got = (Z.element(a) * Z.element(b)).c
    assert list(got) == _strip_zeros(_sym_product(a, b))


@given(long_polys())
def test_long_rational_series_products_match_sympy(pair):
    a, b = pair
    R = TruncSeries(400)
    a3 = [Fraction(c, 3) for c in a]
    got = (R.element(a3) * R.element(b)).c
    want = _strip_zeros(_sym_product([sp.Rational(c, 3) for c in a], b))
    assert [sp.Rational(c.numerator, c.denominator) for c in got] == want
