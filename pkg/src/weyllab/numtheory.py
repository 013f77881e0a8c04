"""Integer arithmetic behind the power-class analysis of Gauss sum moduli.

Factorisation, primality, sieving, power-free / power-full classification,
the coprime splitting of a modulus by prime-exponent class, enumeration of
power-full numbers, and Dirichlet rational approximation.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidInputError

Factorization = list[tuple[int, int]]

TRIAL_LIMIT = 10**6
MAX_FACTOR_INPUT = 2**63
MAX_SIEVE = 2**40

# Deterministic for every n < 3.3e24, in particular all of uint64.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def sieve_primes(limit: int) -> np.ndarray:
    """All primes p <= limit (plain Eratosthenes on odd numbers)."""
    if limit < 2:
        return np.zeros(0, dtype=np.int64)
    is_p = np.ones(limit // 2 + 1, dtype=bool)  # index i <-> 2i + 1
    is_p[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if is_p[i]:
            p = 2 * i + 1
            is_p[p * p // 2 :: p] = False
    odd = 2 * np.nonzero(is_p)[0] + 1
    odd = odd[odd <= limit]
    return np.concatenate(([2], odd)).astype(np.int64)


@lru_cache(maxsize=1)
def _trial_primes() -> np.ndarray:
    return sieve_primes(TRIAL_LIMIT).astype(np.uint64)


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 2**64."""
    if n < 2:
        return False
    for p in _MR_BASES:
        if n % p == 0:
            return n == p
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_BASES:
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _pollard_brent(n: int, rng: random.Random) -> int:
    """A nontrivial factor of the odd composite n."""
    while True:
        y, c, m = rng.randrange(1, n), rng.randrange(1, n), 128
        g = r = q = 1
        x = ys = y
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def _split_large(n: int, rng: random.Random, out: dict[int, int]) -> None:
    if n == 1:
        return
    if is_prime(n):
        out[n] = out.get(n, 0) + 1
        return
    r = math.isqrt(n)
    if r * r == n:
        _split_large(r, rng, out)
        _split_large(r, rng, out)
        return
    d = _pollard_brent(n, rng)
    _split_large(d, rng, out)
    _split_large(n // d, rng, out)


def factorize(m: int) -> Factorization:
    """Prime factorisation of 1 <= m <= 2**63 as sorted (prime, exponent) pairs.

    Trial division by every prime below 10**6, then Pollard-Brent rho on the
    cofactor, with each reported prime certified by Miller-Rabin.
    """
    m = int(m)
    if not 1 <= m <= MAX_FACTOR_INPUT:
        raise InvalidInputError(f"factorize expects 1 <= m <= 2**63, got {m}")
    found: dict[int, int] = {}
    if m < 2**32:
        # cheap pure-python loop, bounded by sqrt(m) < 65536
        n = m
        for p in (2, 3):
            while n % p == 0:
                found[p] = found.get(p, 0) + 1
                n //= p
        p = 5
        while p * p <= n:
            for d in (p, p + 2):
                while n % d == 0:
                    found[d] = found.get(d, 0) + 1
                    n //= d
            p += 6
        if n > 1:
            found[n] = found.get(n, 0) + 1
        return sorted(found.items())

    primes = _trial_primes()
    hits = primes[np.uint64(m) % primes == 0]
    n = m
    for p in hits.tolist():
        e = 0
        while n % p == 0:
            n //= p
            e += 1
        found[p] = e
    if n > 1:
        if n < TRIAL_LIMIT * TRIAL_LIMIT:
            # every factor left is >= 10**6, so n itself is prime
            found[n] = found.get(n, 0) + 1
        else:
            # seeded per input so results never depend on call order
            _split_large(n, random.Random(n), found)
    return sorted(found.items())


def classify_power(m: int, r: int) -> tuple[bool, bool]:
    """(is r-th power free, is r-th power full); 1 is both."""
    if m < 1 or r < 2:
        raise InvalidInputError("classify_power needs m >= 1 and r >= 2")
    exps = [e for _, e in factorize(m)]
    return all(e < r for e in exps), all(e >= r for e in exps)


def enumerate_power_full(i: int, x: int) -> list[int]:
    """Sorted list of the i-th power full integers in [1, x], including 1."""
    if i < 2 or x < 1:
        raise InvalidInputError("enumerate_power_full needs i >= 2 and x >= 1")
    root = int(round(x ** (1.0 / i)))
    while root**i > x:
        root -= 1
    while (root + 1) ** i <= x:
        root += 1
    primes = sieve_primes(root).tolist()
    out = [1]

    def extend(start: int, cur: int) -> None:
        for j in range(start, len(primes)):
            p = primes[j]
            v = cur * p**i
            if v > x:
                break
            while v <= x:
                out.append(v)
                extend(j + 1, v)
                v *= p

    extend(0, 1)
    out.sort()
    return out


@dataclass(frozen=True)
class ModulusDecomposition:
    """Coprime splitting q = q_2 * ... * q_k by prime-exponent class."""

    k: int
    parts: tuple[int, ...]  # (q_2, ..., q_k)

    @property
    def q(self) -> int:
        return math.prod(self.parts)

    def part(self, j: int) -> int:
        return self.parts[j - 2]

    def violations(self) -> list[str]:
        """Human-readable list of broken invariants (empty when valid)."""
        bad = []
        if len(self.parts) != self.k - 1:
            bad.append("wrong number of parts")
        for a in range(len(self.parts)):
            for b in range(a + 1, len(self.parts)):
                if math.gcd(self.parts[a], self.parts[b]) != 1:
                    bad.append(f"q_{a + 2} and q_{b + 2} share a factor")
        for j, qj in enumerate(self.parts, start=2):
            exps = [e for _, e in factorize(qj)]
            if j == 2 and any(e >= 3 for e in exps):
                bad.append("q_2 is not cube free")
            elif 3 <= j < self.k and any(e != j for e in exps):
                bad.append(f"q_{j} is not {j}-th power full and {j + 1}-th power free")
            elif j == self.k and j > 2 and any(e < j for e in exps):
                bad.append(f"q_{j} is not {j}-th power full")
        return bad

    def weight(self, power: float = 1.0) -> float:
        """prod_j q_j ** (power / j)."""
        return math.prod(qj ** (power / j) for j, qj in enumerate(self.parts, start=2))


def decompose_modulus(q: int, k: int) -> ModulusDecomposition:
    """Route each prime power p**e of q: e <= 2 -> q_2, e = i -> q_i, e >= k -> q_k."""
    if q < 1 or k < 3:
        raise InvalidInputError("decompose_modulus needs q >= 1 and k >= 3")
    parts = [1] * (k - 1)
    for p, e in factorize(q):
        slot = 2 if e <= 2 else min(e, k)
        parts[slot - 2] *= p**e
    return ModulusDecomposition(k, tuple(parts))


def gauss_bound_ratio(k: int, q: int, b: Sequence[int]) -> float:
    """|S_k(b/q; q)| divided by prod_j q_j**(1 - 1/j) for the class splitting of q."""
    from .sums import complete_sum

    if len(b) != k:
        raise InvalidInputError(f"need {k} coefficients, got {len(b)}")
    if math.gcd(q, *b) != 1:
        raise InvalidInputError("gcd(q, b_1, ..., b_k) must be 1")
    dec = decompose_modulus(q, k)
    bound = math.prod(qj ** (1 - 1 / j) for j, qj in enumerate(dec.parts, start=2))
    return abs(complete_sum(b, q)) / bound


def continued_fraction(alpha: Fraction) -> Iterator[int]:
    x = alpha
    while True:
        a = math.floor(x)
        yield a
        x -= a
        if x == 0:
            return
        x = 1 / x


def convergents(alpha: float | Fraction) -> Iterator[Fraction]:
    """Continued-fraction convergents of alpha, computed in exact arithmetic."""
    p0, q0, p1, q1 = 0, 1, 1, 0
    for a in continued_fraction(Fraction(alpha)):
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        yield Fraction(p1, q1)


def dirichlet_approx(alpha: float | Fraction, M: float) -> Fraction:
    """a/q with 1 <= q <= M and |alpha - a/q| <= 1/(q M).

    The last convergent with denominator <= M; if the next convergent has
    denominator q' > M then |alpha - a/q| <= 1/(q q') < 1/(q M).
    """
    if not M >= 1:
        raise InvalidInputError(f"dirichlet_approx needs M >= 1, got {M}")
    best = None
    for c in convergents(alpha):
        if c.denominator > M:
            break
        best = c
    return best


def primes_in(lo: int, hi: int, segment: int = 1 << 18) -> list[int]:
    """All primes in [lo, hi] by a segmented sieve of Eratosthenes."""
    if lo < 1 or hi < lo or hi > MAX_SIEVE:
        raise InvalidInputError(f"primes_in needs 1 <= lo <= hi <= 2**40, got [{lo}, {hi}]")
    base = sieve_primes(math.isqrt(hi))
    out: list[np.ndarray] = []
    start = max(lo, 2)
    while start <= hi:
        stop = min(start + segment - 1, hi)
        mark = np.ones(stop - start + 1, dtype=bool)
        for p in base.tolist():
            if p * p > stop:
                break
            first = max(p * p, -(-start // p) * p)
            mark[first - start :: p] = False
        out.append(np.nonzero(mark)[0] + start)
        start = stop + 1
    if not out:
        return []
    return [int(v) for v in np.concatenate(out)]
