"""Hot loops of the search screen.

Each kernel is written once as plain Python over numpy arrays.  When numba
is importable and ``GEOGRAPHY4_DISABLE_NUMBA`` is unset, the same source is
compiled with ``@njit``; otherwise the vectorized numpy versions below are
used.  Results are identical either way (all arithmetic is exact int64 mod
a prime below 2**31).
"""

from __future__ import annotations

import math
import os
from functools import lru_cache

import numpy as np

from .classes import pairing_table

# largest prime below 2**31; products of two residues fit in int64
SCREEN_PRIME = 2147483647

_DISABLED = os.environ.get("GEOGRAPHY4_DISABLE_NUMBA", "").strip() not in ("", "0")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    HAVE_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]):
            return args[0]
        return lambda f: f


@lru_cache(maxsize=None)
def pairing_arrays(n: int):
    """(index table, sign table) of shape (C(n,2), C(n,2)).

    Index C(n, n-4) points at a padding slot that always holds 0.
    """
    m = math.comb(n, 2)
    pad = math.comb(n, n - 4)
    idx = np.full((m, m), pad, dtype=np.int64)
    sgn = np.zeros((m, m), dtype=np.int64)
    for r, s, pos, sign in pairing_table(n):
        idx[r, s] = idx[s, r] = pos
        sgn[r, s] = sgn[s, r] = sign
    idx.setflags(write=False)
    sgn.setflags(write=False)
    return idx, sgn


# ---------------------------------------------------------------- numba path


@njit(cache=True)
def _gram_batch_jit(coeffs, idx, sgn):
    b, width = coeffs.shape
    m = idx.shape[0]
    out = np.zeros((b, m, m), dtype=np.int64)
    for t in range(b):
        for r in range(m):
            for s in range(m):
                j = idx[r, s]
                if j < width:
                    out[t, r, s] = sgn[r, s] * coeffs[t, j]
    return out


@njit(cache=True)
def _det_mod_p_jit(grams, p):
    b, m, _ = grams.shape
    out = np.zeros(b, dtype=np.int64)
    a = np.empty((m, m), dtype=np.int64)
    for t in range(b):
        for i in range(m):
            for j in range(m):
                a[i, j] = grams[t, i, j] % p
        det = 1
        for c in range(m):
            piv = -1
            for r in range(c, m):
                if a[r, c] != 0:
                    piv = r
                    break
            if piv < 0:
                det = 0
                break
            if piv != c:
                for j in range(m):
                    tmp = a[c, j]
                    a[c, j] = a[piv, j]
                    a[piv, j] = tmp
                det = (p - det) % p
            pc = a[c, c]
            det = det * pc % p
            # inverse by Fermat
            inv = 1
            base = pc
            e = p - 2
            while e > 0:
                if e & 1:
                    inv = inv * base % p
                base = base * base % p
                e >>= 1
            for r in range(c + 1, m):
                f = a[r, c] * inv % p
                if f != 0:
                    for j in range(c, m):
                        a[r, j] = (a[r, j] - f * a[c, j]) % p
        out[t] = det
    return out


# ---------------------------------------------------------------- numpy path


def _gram_batch_np(coeffs, idx, sgn):
    padded = np.concatenate([coeffs, np.zeros((coeffs.shape[0], 1), dtype=np.int64)], axis=1)
    return sgn[None, :, :] * padded[:, idx]


def _det_mod_p_np(grams, p):
    a = np.mod(grams, p).astype(np.int64)
    b, m, _ = a.shape
    det = np.ones(b, dtype=np.int64)
    alive = np.ones(b, dtype=bool)
    rows = np.arange(b)
    for c in range(m):
        col = a[:, c:, c]
        has = col != 0
        alive &= has.any(axis=1)
        piv = c + np.argmax(has, axis=1)
        swap = (piv != c) & alive
        if swap.any():
            top = a[rows, c].copy()
            a[rows, c] = a[rows, piv]
            a[rows, piv] = top
            det = np.where(swap, (p - det) % p, det)
        pc = a[:, c, c]
        det = np.where(alive, det * pc % p, 0)
        safe = np.where(pc == 0, 1, pc)
        inv = np.array([pow(int(x), p - 2, p) for x in safe], dtype=np.int64)
        f = a[:, c + 1:, c] * inv[:, None] % p
        # row update: a[r, j] -= f[r] * a[c, j]
        a[:, c + 1:, c:] = (a[:, c + 1:, c:] - f[:, :, None] * a[:, c, None, c:] % p) % p
    return np.where(alive, det, 0)


# ---------------------------------------------------------------- dispatch


def gram_batch(n: int, coeffs, use_numba: bool | None = None):
    """Pairing Gram matrices for a batch of degree n-4 classes (int64)."""
    idx, sgn = pairing_arrays(n)
    coeffs = np.ascontiguousarray(coeffs, dtype=np.int64)
    if coeffs.ndim == 1:
        coeffs = coeffs[None, :]
    if _use(use_numba):
        return _gram_batch_jit(coeffs, idx, sgn)
    return _gram_batch_np(coeffs, idx, sgn)


def det_mod_p_batch(grams, p: int = SCREEN_PRIME, use_numba: bool | None = None):
    """Determinants mod p in [0, p); p must be below 2**31."""
    if p >= 1 << 31:
        raise ValueError("modulus must be below 2**31 for int64 kernels")
    grams = np.ascontiguousarray(grams, dtype=np.int64)
    if _use(use_numba):
        return _det_mod_p_jit(grams, np.int64(p))
    return _det_mod_p_np(grams, p)


def _use(flag):
    if flag is None:
        return HAVE_NUMBA
    return bool(flag) and HAVE_NUMBA
