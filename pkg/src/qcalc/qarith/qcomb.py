"""q-integers, q-factorials and q-binomials evaluated at a chosen scalar Q.

Q defaults to the ring's q; the Frobenius layer also needs Q = q^p.  Binomials
come from the q-Pascal recurrence so they are valid in rings with zero
divisors.
"""
from __future__ import annotations

from functools import lru_cache

from .rings import BaseRing, RingValue


def _scalar(ring: BaseRing, Q):
    return ring.q if Q is None else ring.coerce(Q)


@lru_cache(maxsize=None)
def _q_int(ring, Q, n):
    if n == 0:
        return ring.zero
    return _q_int(ring, Q, n - 1) * Q + 1 if n > 1 else ring.one


def q_int(n: int, ring: BaseRing, Q: RingValue | None = None) -> RingValue:
    """(n)_Q = 1 + Q + ... + Q^(n-1)."""
    if n < 0:
        raise ValueError("q_int needs n >= 0")
    return _q_int(ring, _scalar(ring, Q), n)


@lru_cache(maxsize=None)
def _q_fact(ring, Q, n):
    if n == 0:
        return ring.one
    return _q_fact(ring, Q, n - 1) * _q_int(ring, Q, n)


def q_fact(n: int, ring: BaseRing, Q: RingValue | None = None) -> RingValue:
    """(n)_Q! = (1)_Q (2)_Q ... (n)_Q."""
    if n < 0:
        raise ValueError("q_fact needs n >= 0")
    return _q_fact(ring, _scalar(ring, Q), n)


@lru_cache(maxsize=None)
def _pascal_row(ring, Q, n):
    if n == 0:
        return (ring.one,)
    prev = _pascal_row(ring, Q, n - 1)
    row = [ring.one]
    Qk = ring.one
    for k in range(1, n):
        Qk = Qk * Q
        row.append(prev[k - 1] + Qk * prev[k])
    row.append(ring.one)
    return tuple(row)


def q_binom(n: int, k: int, ring: BaseRing, Q: RingValue | None = None) -> RingValue:
    """Gaussian binomial binom(n, k)_Q; zero outside 0 <= k <= n."""
    if k < 0 or n < 0 or k > n:
        return ring.zero
    return _pascal_row(ring, _scalar(ring, Q), n)[k]
