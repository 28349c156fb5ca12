"""Exact integer linear algebra on small dense matrices.

Matrices are sequences of rows of Python ints; results are tuples of tuples
so they can live inside frozen dataclasses.  Nothing here touches floating
point.
"""

from __future__ import annotations

import logging
import math
from fractions import Fraction
from functools import lru_cache

from sympy import prevprime

from .errors import DomainError, InternalInconsistencyError

log = logging.getLogger(__name__)

# switch SNF to a modular determinant cross-check past this size
SNF_GROWTH_LIMIT = 1 << 256


def as_matrix(m):
    return tuple(tuple(int(x) for x in row) for row in m)


def identity(n):
    return tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n))


def transpose(m):
    return tuple(zip(*m)) if m else ()


def matmul(a, b):
    bt = transpose(b)
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def matvec(m, v):
    return tuple(sum(x * y for x, y in zip(row, v)) for row in m)


def is_square(m):
    return all(len(row) == len(m) for row in m)


def bareiss_det(m) -> int:
    """Fraction-free Gaussian elimination (Bareiss); exact for any size."""
    a = [list(row) for row in m]
    n = len(a)
    if not is_square(a):
        raise DomainError("determinant of a non-square matrix")
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        rowk = a[k]
        for i in range(k + 1, n):
            rowi = a[i]
            aik = rowi[k]
            for j in range(k + 1, n):
                rowi[j] = (rowi[j] * akk - aik * rowk[j]) // prev
        prev = akk
    return sign * a[n - 1][n - 1]


def det_mod_p(m, p: int) -> int:
    """Determinant reduced into [0, p)."""
    a = [[x % p for x in row] for row in m]
    n = len(a)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            det = -det
        pc = a[c][c]
        det = det * pc % p
        inv = pow(pc, -1, p)
        rowc = a[c]
        for r in range(c + 1, n):
            f = a[r][c] * inv % p
            if f:
                rowr = a[r]
                for j in range(c, n):
                    rowr[j] = (rowr[j] - f * rowc[j]) % p
    return det % p


@lru_cache(maxsize=None)
def large_primes(count: int) -> tuple[int, ...]:
    out = []
    p = 1 << 61
    while len(out) < count:
        p = prevprime(p)
        out.append(p)
    return tuple(out)


def hadamard_bound(m) -> int:
    bound = 1
    for row in m:
        bound *= math.isqrt(sum(x * x for x in row)) + 1
    return bound


def det_modular(m) -> int:
    """Determinant by Chinese remaindering over 61-bit primes.

    Independent of :func:`bareiss_det`; the two are cross-checked in
    verification code.
    """
    if not is_square(m):
        raise DomainError("determinant of a non-square matrix")
    if len(m) == 0:
        return 1
    bound = 2 * hadamard_bound(m) + 1
    modulus, residue = 1, 0
    count = 8
    while True:
        for p in large_primes(count):
            if modulus > bound:
                break
            if modulus % p == 0:
                continue
            r = det_mod_p(m, p)
            # CRT merge of residue (mod modulus) with r (mod p)
            t = (r - residue) * pow(modulus, -1, p) % p
            residue += modulus * t
            modulus *= p
        if modulus > bound:
            break
        count *= 2
    if residue > modulus // 2:
        residue -= modulus
    return residue


def rank_mod_p(m, p: int) -> int:
    return len(m[0]) - len(nullspace_mod_p(m, p)) if m else 0


def row_reduce_mod_p(m, p: int):
    """Reduced row echelon form mod p; returns (rows, pivot_columns)."""
    a = [[x % p for x in row] for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        inv = pow(a[r][c], -1, p)
        a[r] = [x * inv % p for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    return a[:r], pivots


def nullspace_mod_p(m, p: int, cols: int | None = None):
    """Basis of {v : m v = 0 mod p} as a list of tuples."""
    if cols is None:
        cols = len(m[0]) if m else 0
    if not m:
        return [tuple(1 if i == j else 0 for i in range(cols)) for j in range(cols)]
    rref, pivots = row_reduce_mod_p(m, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * cols
        v[f] = 1
        for row, pc in zip(rref, pivots):
            v[pc] = -row[f] % p
        basis.append(tuple(v))
    return basis


def rank_q(m) -> int:
    """Rank over the rationals by fraction-free elimination."""
    a = [list(row) for row in m]
    if not a:
        return 0
    rows, cols = len(a), len(a[0])
    r = 0
    prev = 1
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        for i in range(r + 1, rows):
            for j in range(c + 1, cols):
                a[i][j] = (a[i][j] * a[r][c] - a[i][c] * a[r][j]) // prev
            a[i][c] = 0
        prev = a[r][c]
        r += 1
        if r == rows:
            break
    return r


def inverse_q(m):
    """Exact inverse over Q (Gauss-Jordan on Fractions)."""
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)]
         for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            raise DomainError("matrix is singular")
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c] != 0:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def unimodular_inverse(m):
    inv = inverse_q(m)
    if any(x.denominator != 1 for row in inv for x in row):
        raise DomainError("matrix is not invertible over Z")
    return tuple(tuple(int(x) for x in row) for row in inv)


def xgcd(a: int, b: int):
    """Return (g, x, y) with x*a + y*b == g >= 0."""
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def smith_diagonal(m) -> tuple[int, ...]:
    """Elementary divisors d1 | d2 | ... (nonnegative, zeros last).

    Naive pivoting on the smallest nonzero entry.  If entries grow past
    ``SNF_GROWTH_LIMIT`` the product of divisors of a square nonsingular
    input is cross-checked against :func:`det_modular`.
    """
    a = [list(row) for row in m]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    grew = False
    diag = []
    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    v = a[i][j]
                    if v and (best is None or abs(v) < best[0]):
                        best = (abs(v), i, j)
            if best is None:
                break
            _, i, j = best
            a[t], a[i] = a[i], a[t]
            for row in a:
                row[t], row[j] = row[j], row[t]
            piv = a[t][t]
            clean = True
            for i in range(t + 1, rows):
                q = a[i][t] // piv
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    clean = False
            for j in range(t + 1, cols):
                q = a[t][j] // piv
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    clean = False
            if not clean:
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % piv),
                None,
            )
            if bad is None:
                break
            a[t] = [x + y for x, y in zip(a[t], a[bad])]
        if not grew and any(abs(x) > SNF_GROWTH_LIMIT for row in a for x in row):
            grew = True
            log.debug("smith_diagonal: entries exceeded growth limit")
        if best is None:
            diag.extend([0] * (min(rows, cols) - t))
            break
        diag.append(abs(a[t][t]))
    if grew and rows == cols and all(diag):
        det = det_modular(m)
        if abs(det) != math.prod(diag):
            raise InternalInconsistencyError("Smith diagonal disagrees with modular determinant")
    return tuple(diag)
