"""Exact linear algebra over Z, Q and Z/p^N on plain Python lists.

Rows are lists of ints (or Fractions where noted).  Nothing here knows about
rings or polynomials; callers flatten their data to coordinate vectors first.
"""
from __future__ import annotations

from fractions import Fraction
from math import gcd


def _primitive(row):
    g = 0
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


def _to_int_rows(rows):
    out = []
    for r in rows:
        if any(isinstance(v, Fraction) for v in r):
            den = 1
            for v in r:
                if isinstance(v, Fraction):
                    den = den * v.denominator // gcd(den, v.denominator)
            out.append([int(v * den) for v in r])
        else:
            out.append([int(v) for v in r])
    return out


def rref_int(rows, ncols):
    """Gauss-Jordan over Q kept in primitive integer rows.

    Returns ``(reduced_rows, pivot_columns)``; row i has its pivot at
    ``pivot_columns[i]`` and zeros in every other pivot column.
    """
    work = [_primitive(r) for r in _to_int_rows(rows) if any(r)]
    pivots = []
    reduced = []
    col = 0
    while work and col < ncols:
        best = None
        for i, r in enumerate(work):
            if r[col]:
                if best is None or abs(r[col]) < abs(work[best][col]):
                    best = i
        if best is None:
            col += 1
            continue
        prow = work.pop(best)
        a = prow[col]
        nxt = []
        for r in work:
            b = r[col]
            if b:
                g = gcd(a, b)
                ma, mb = a // g, b // g
                r = [ma * x - mb * y for x, y in zip(r, prow)]
                if not any(r):
                    continue
                r = _primitive(r)
            nxt.append(r)
        work = nxt
        for k, r in enumerate(reduced):
            b = r[col]
            if b:
                g = gcd(a, b)
                ma, mb = a // g, b // g
                reduced[k] = _primitive([ma * x - mb * y for x, y in zip(r, prow)])
        if a < 0:
            prow = [-x for x in prow]
        reduced.append(prow)
        pivots.append(col)
        col += 1
    return reduced, pivots


def rank_q(rows, ncols):
    return len(rref_int(rows, ncols)[1])


def nullspace_q(rows, ncols):
    """Basis of the rational kernel of ``rows`` as primitive integer vectors."""
    reduced, pivots = rref_int(rows, ncols)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        lcm = 1
        for r, c in zip(reduced, pivots):
            if r[f]:
                lcm = lcm * r[c] // gcd(lcm, r[c])
        v = [0] * ncols
        v[f] = lcm
        for r, c in zip(reduced, pivots):
            if r[f]:
                v[c] = -r[f] * lcm // r[c]
        basis.append(_primitive(v))
    return basis


def solve_q(rows, rhs, ncols):
    """One rational solution of ``rows . x = rhs`` or None."""
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = rref_int(aug, ncols + 1)
    if pivots and pivots[-1] == ncols:
        return None
    x = [Fraction(0)] * ncols
    for r, c in zip(reduced, pivots):
        x[c] = Fraction(r[ncols], r[c])
    return x


def solve_mod_prime_power(rows, rhs, p, N):
    """One solution of ``rows . x = rhs`` over Z/p^N, or None.

    Z/p^N is a chain ring, so full pivoting on minimal p-adic valuation keeps
    every elimination step exact.
    """
    mod = p ** N
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    a = [[v % mod for v in r] + [b % mod] for r, b in zip(rows, rhs)]
    colperm = list(range(ncols))

    def val(v):
        if v == 0:
            return N
        k = 0
        while v % p == 0:
            v //= p
            k += 1
        return k

    rank = 0
    pivvals = []
    for step in range(min(nrows, ncols)):
        best = None
        for i in range(step, nrows):
            for j in range(step, ncols):
                if a[i][j]:
                    v = val(a[i][j])
                    if best is None or v < best[0]:
                        best = (v, i, j)
                        if v == 0:
                            break
            if best is not None and best[0] == 0:
                break
        if best is None:
            break
        v, i, j = best
        a[step], a[i] = a[i], a[step]
        if j != step:
            for r in a:
                r[step], r[j] = r[j], r[step]
            colperm[step], colperm[j] = colperm[j], colperm[step]
        piv = a[step][step]
        unit = piv // p ** v
        uinv = pow(unit, -1, mod)
        a[step] = [(x * uinv) % mod for x in a[step]]
        # pivot is now p^v
        for i2 in range(nrows):
            if i2 != step and a[i2][step]:
                f = a[i2][step] // p ** v
                a[i2] = [(x - f * y) % mod for x, y in zip(a[i2], a[step])]
        pivvals.append(v)
        rank += 1
    for i in range(rank, nrows):
        if a[i][ncols] % mod:
            return None
    x = [0] * ncols
    for k in range(rank):
        v = pivvals[k]
        b = a[k][ncols]
        if b % p ** v:
            return None
        x[k] = (b // p ** v) % mod
    out = [0] * ncols
    for k in range(ncols):
        out[colperm[k]] = x[k]
    return out


def smith_diagonal(rows, ncols):
    """Nonzero invariant factors of an integer matrix (d1 | d2 | ...)."""
    a = [list(map(int, r)) for r in rows if any(r)]
    m = len(a)
    n = ncols
    diag = []
    t = 0
    while t < m and t < n:
        # locate smallest nonzero entry in the remaining block
        best = None
        for i in range(t, m):
            for j in range(t, n):
                if a[i][j] and (best is None or abs(a[i][j]) < best[0]):
                    best = (abs(a[i][j]), i, j)
        if best is None:
            break
        _, i, j = best
        a[t], a[i] = a[i], a[t]
        for r in a:
            r[t], r[j] = r[j], r[t]
        while True:
            done = True
            piv = a[t][t]
            for i in range(t + 1, m):
                if a[i][t]:
                    q = a[i][t] // piv
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                    if a[i][t]:
                        done = False
            for j in range(t + 1, n):
                if a[t][j]:
                    q = a[t][j] // piv
                    for r in a:
                        r[j] -= q * r[t]
                    if a[t][j]:
                        done = False
            if done:
                # divisibility condition on the remaining block
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if a[i][j] % piv:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad])]
                continue
            # move the smallest entry of row/column t into the pivot
            best = None
            for i in range(t, m):
                if a[i][t] and (best is None or abs(a[i][t]) < best[0]):
                    best = (abs(a[i][t]), i, t)
            for j in range(t, n):
                if a[t][j] and (best is None or abs(a[t][j]) < best[0]):
                    best = (abs(a[t][j]), t, j)
            _, i, j = best
            a[t], a[i] = a[i], a[t]
            for r in a:
                r[t], r[j] = r[j], r[t]
        diag.append(abs(a[t][t]))
        t += 1
    return diag


def det_int(rows):
    """Bareiss determinant of a square integer matrix."""
    a = [list(map(int, r)) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k]:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def rref_mod_p(rows, ncols, p):
    """Reduced row echelon form over the prime field F_p."""
    work = [[v % p for v in r] for r in rows]
    work = [r for r in work if any(r)]
    reduced = []
    pivots = []
    for col in range(ncols):
        piv = None
        for i, r in enumerate(work):
            if r[col]:
                piv = i
                break
        if piv is None:
            continue
        prow = work.pop(piv)
        inv = pow(prow[col], -1, p)
        prow = [(v * inv) % p for v in prow]
        nxt = []
        for r in work:
            if r[col]:
                f = r[col]
                r = [(a - f * b) % p for a, b in zip(r, prow)]
                if not any(r):
                    continue
            nxt.append(r)
        work = nxt
        for k, r in enumerate(reduced):
            if r[col]:
                f = r[col]
                reduced[k] = [(a - f * b) % p for a, b in zip(r, prow)]
        reduced.append(prow)
        pivots.append(col)
        if not work:
            break
    return reduced, pivots


def nullspace_mod_p(rows, ncols, p):
    reduced, pivots = rref_mod_p(rows, ncols, p)
    pivset = set(pivots)
    basis = []
    for f in range(ncols):
        if f in pivset:
            continue
        v = [0] * ncols
        v[f] = 1
        for r, c in zip(reduced, pivots):
            if r[f]:
                v[c] = (-r[f]) % p
        basis.append(v)
    return basis


def rank_mod_p(rows, ncols, p):
    return len(rref_mod_p(rows, ncols, p)[1])


def solve_mod_p(rows, rhs, ncols, p):
    aug = [list(r) + [b] for r, b in zip(rows, rhs)]
    reduced, pivots = rref_mod_p(aug, ncols + 1, p)
    if pivots and pivots[-1] == ncols:
        return None
    x = [0] * ncols
    for r, c in zip(reduced, pivots):
        x[c] = r[ncols]
    return x


def kernel(rows, ncols, modulus=0):
    """Kernel basis over Z (modulus 0, saturated) or over F_p (prime modulus)."""
    if modulus == 0:
        return nullspace_q(rows, ncols)
    return nullspace_mod_p(rows, ncols, modulus)


def rank(rows, ncols, modulus=0):
    if modulus == 0:
        return rank_q(rows, ncols)
    return rank_mod_p(rows, ncols, modulus)


def is_saturated(rows, ncols):
    """True when the Z-span of ``rows`` is saturated in Z^ncols (all invariant factors 1)."""
    return all(d == 1 for d in smith_diagonal(rows, ncols))
