"""Compensated (double-double) reduction of polynomial phases modulo 1.

A Weyl sum term e(n**k * t) only depends on the fractional part of
n**k * t.  Forming the product in plain double precision throws that
fractional part away as soon as n**k * t exceeds 2**53, which happens for
k >= 4 at very modest N.  Here the integer n**k is carried exactly as an
unevaluated sum hi + lo of two doubles, every product with t is split
into a rounded value plus its exact rounding error (Dekker), and the
fractional parts of the four resulting pieces are taken separately.
Each piece is reduced exactly, so the only rounding left is in the final
four-term addition.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import PrecisionError

# n**k must stay below this so that hi + lo represents it exactly.
MAX_EXACT_POWER = 2**100

_SPLITTER = 134217729.0  # 2**27 + 1
_INT64_SAFE = 2**62


def two_sum(a, b):
    """Knuth's error-free sum: a + b == s + err exactly."""
    s = a + b
    bb = s - a
    err = (a - (s - bb)) + (b - bb)
    return s, err


def split(a):
    c = _SPLITTER * a
    hi = c - (c - a)
    return hi, a - hi


def two_prod(a, b):
    """Dekker's error-free product: a * b == p + err exactly (no FMA needed)."""
    p = a * b
    ah, al = split(a)
    bh, bl = split(b)
    err = ((ah * bh - p) + ah * bl + al * bh) + al * bl
    return p, err


def frac(a):
    """Fractional part in [0, 1); exact for every finite double."""
    r = a - np.floor(a)
    # a tiny negative input rounds up to exactly 1.0
    return np.where(r >= 1.0, 0.0, r)


def check_power_guard(N: int, k: int) -> None:
    if N < 1 or k < 1:
        return
    if N**k > MAX_EXACT_POWER:
        raise PrecisionError(
            f"N**k = {N}**{k} exceeds the exact phase guard 2**100; "
            "use an exact rational t or smaller N"
        )


@lru_cache(maxsize=64)
def power_split(N: int, j: int) -> tuple[np.ndarray, np.ndarray]:
    """Exact split of n**j (n = 1..N) into doubles hi + lo.

    Arrays are returned read-only since they are shared through the cache.
    """
    check_power_guard(N, j)
    if N**j <= _INT64_SAFE:
        exact = np.arange(1, N + 1, dtype=np.int64) ** j
        hi = exact.astype(np.float64)
        # |exact - round(exact)| < 2**10, both fit in int64
        lo = (exact - hi.astype(np.int64)).astype(np.float64)
    else:
        vals = [n**j for n in range(1, N + 1)]
        hi = np.array([float(v) for v in vals])
        lo = np.array([float(v - int(h)) for v, h in zip(vals, hi)])
    hi.setflags(write=False)
    lo.setflags(write=False)
    return hi, lo


def frac_times(hi, lo, t):
    """frac((hi + lo) * t) where hi + lo is an exact integer.

    ``t`` may be a scalar or an array broadcastable against ``hi``.
    """
    p1, e1 = two_prod(hi, t)
    p2, e2 = two_prod(lo, t)
    s = (frac(p1) + frac(e1)) + (frac(p2) + frac(e2))
    return frac(s)


def monomial_phase(N: int, j: int, coeff) -> np.ndarray:
    """frac(coeff * n**j) for n = 1..N.

    With an array ``coeff`` of shape (P, 1) the result has shape (P, N).
    """
    hi, lo = power_split(N, j)
    return frac_times(hi, lo, coeff)
