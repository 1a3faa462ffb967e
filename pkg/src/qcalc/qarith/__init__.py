"""Base rings, q-combinatorics and the coordinate algebra A = R[x]."""
from .rings import (
    BaseRing,
    RingValue,
    IntPoly,
    Cyclotomic,
    TruncSeries,
    ModCyclotomic,
    is_prime,
)
from .qcomb import q_int, q_fact, q_binom
from .poly import CoordPoly, TwistPoly, sigma_apply, q_derive, frobenius_embed, frobenius_restrict


def invert(v: RingValue) -> RingValue:
    return v.ring.invert(v)


def exact_div(a: RingValue, b: RingValue) -> RingValue:
    return b.ring.exact_div(a, b)


__all__ = [
    "BaseRing", "RingValue", "IntPoly", "Cyclotomic", "TruncSeries", "ModCyclotomic",
    "is_prime", "q_int", "q_fact", "q_binom", "CoordPoly", "TwistPoly", "sigma_apply",
    "q_derive", "frobenius_embed", "frobenius_restrict", "invert", "exact_div",
]
