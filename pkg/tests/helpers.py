"""Shared hypothesis strategies and conversions to sympy."""
from __future__ import annotations

import sympy as sp
from hypothesis import strategies as st

from oracles import q, x
from qcalc.qarith import CoordPoly, Cyclotomic, IntPoly, ModCyclotomic, TruncSeries

ALL_RINGS = [IntPoly(), Cyclotomic(2), Cyclotomic(3), Cyclotomic(5), TruncSeries(6),
             ModCyclotomic(3, 2), ModCyclotomic(5, 1, q_one=True)]
RING_IDS = [repr(R) for R in ALL_RINGS]


def ring_values(R, size=4, length=4):
    n = length if R.rank is None else R.rank
    return st.lists(st.integers(-size, size), min_size=0, max_size=n).map(R.element)


def coord_polys(R, degree=4, size=3):
    return st.dictionaries(st.integers(0, degree), ring_values(R, size), max_size=degree + 1).map(
        lambda d: CoordPoly(R, d))


def intpoly_to_sym(v):
    return sum((sp.Integer(a) * q ** k for k, a in enumerate(v.c)), sp.Integer(0))


def coord_to_sym(c):
    return sp.expand(sum((intpoly_to_sym(v) * x ** n for n, v in c.terms.items()), sp.Integer(0)))


def sym_to_coord(expr, R):
    """Polynomial in q, x with integer coefficients -> CoordPoly over Z[u] (or its image in R)."""
    poly = sp.Poly(sp.expand(expr), x, q)
    terms = {}
    for (n, k), c in poly.terms():
        terms.setdefault(n, {})[k] = int(c)
    out = {}
    for n, cs in terms.items():
        top = max(cs)
        out[n] = R.from_intpoly([cs.get(k, 0) for k in range(top + 1)])
    return CoordPoly(R, out)
