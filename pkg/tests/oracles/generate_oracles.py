"""Independent reference values frozen into the test suite.

Nothing here imports weyllab.  Run with ``python3 tests/oracles/generate_oracles.py [--heavy]``;
the light part takes seconds, ``--heavy`` adds the brute-force maximal
function values (several minutes).  Output is JSON on stdout.
"""

from __future__ import annotations

import argparse
import cmath
import json
import math
from fractions import Fraction

import mpmath
import numpy as np

mpmath.mp.dps = 50


def e_frac(r: Fraction):
    """e(r) to 50 digits for an exact rational phase."""
    r = r - math.floor(r)
    return mpmath.expjpi(2 * mpmath.mpf(r.numerator) / r.denominator)


def weyl_mp(N: int, k: int, x: float, t: float) -> complex:
    X, T = Fraction(x), Fraction(t)  # the exact binary values of the doubles
    s = mpmath.mpc(0)
    for n in range(1, N + 1):
        s += e_frac(n * X + n**k * T)
    return complex(s)


def general_mp(u, N: int) -> complex:
    U = [Fraction(c) for c in u]
    s = mpmath.mpc(0)
    for n in range(1, N + 1):
        s += e_frac(sum(c * n ** (j + 1) for j, c in enumerate(U)))
    return complex(s)


def gauss_mp(k: int, a: int, b: int, q: int) -> complex:
    s = mpmath.mpc(0)
    for n in range(1, q + 1):
        s += e_frac(Fraction((a * n**k + b * n) % q, q))
    return complex(s)


def integral_mp(xi, N) -> complex:
    xi = [mpmath.mpf(c) for c in xi]
    f = lambda z: mpmath.expjpi(2 * sum(c * z ** (j + 1) for j, c in enumerate(xi)))  # noqa: E731
    pts = mpmath.linspace(0, N, 41)
    return complex(mpmath.quad(f, pts))


def census_brute(k: int, q: int) -> list[int]:
    counts = []
    for b in range(1, q + 1):
        c = 0
        for a in range(1, q + 1):
            s = sum(cmath.exp(2j * math.pi * ((b * n**k + a * n) % q) / q) for n in range(1, q + 1))
            c += abs(s) >= math.sqrt(q) / 2 - 1e-9
        counts.append(c)
    return counts


def powerfull_counts(x: int) -> dict[int, int]:
    """#F_2(x), #F_3(x) from a smallest-prime-factor sieve."""
    spf = np.zeros(x + 1, dtype=np.int64)
    for p in range(2, x + 1):
        if spf[p] == 0:
            spf[p::p] = np.where(spf[p::p] == 0, p, spf[p::p])
    min_exp = np.full(x + 1, 10**9, dtype=np.int64)
    out = {2: 1, 3: 1}  # 1 belongs to both
    for n in range(2, x + 1):
        m, lo = n, 10**9
        while m > 1:
            p, e = spf[m], 0
            while m % p == 0:
                m //= p
                e += 1
            lo = min(lo, e)
        min_exp[n] = lo
    for i in (2, 3):
        out[i] += int(np.count_nonzero(min_exp[2:] >= i))
    return out, min_exp


def light() -> dict:
    res = {}
    res["weyl_100_3_0.3_0.7"] = weyl_mp(100, 3, 0.3, 0.7)
    res["general_0.1_0.2_0.3_N50"] = general_mp((0.1, 0.2, 0.3), 50)
    res["gauss_3_1_0_9"] = gauss_mp(3, 1, 0, 9)
    res["integral_0.01_0_0.001_N20"] = integral_mp((0.01, 0.0, 0.001), 20)
    res["weyl_4_2000_0.123_0.456"] = weyl_mp(2000, 4, 0.123, 0.456)
    res["weyl_5_1000_0.77_0.31"] = weyl_mp(1000, 5, 0.77, 0.31)
    res["census_3_7"] = census_brute(3, 7)
    res["census_3_5"] = census_brute(3, 5)
    res["census_4_5"] = census_brute(4, 5)
    _, min_exp = powerfull_counts(10**6)
    table = {}
    for i in (2, 3):
        for x in (10**3, 10**4, 10**5, 10**6):
            table[f"{i}_{x}"] = 1 + int(np.count_nonzero(min_exp[2 : x + 1] >= i))
    table["2_100"] = 1 + int(np.count_nonzero(min_exp[2:101] >= 2))
    res["powerfull"] = table
    return res


def sup_brute(N: int, k: int, x: float, T: int) -> float:
    """max over t = m/T of |omega(x, t)| by direct summation in chunks."""
    n = np.arange(1, N + 1)
    lin = np.array([complex(mpmath.expjpi(2 * int(v) * mpmath.mpf(x))) for v in n])
    nk = np.array([pow(int(v), k, T) for v in n], dtype=np.int64)  # exact n**k mod T
    best = 0.0
    chunk = 1 << 14
    for s in range(0, T, chunk):
        m = np.arange(s, min(s + chunk, T), dtype=np.int64)
        ph = (m[:, None] * nk[None, :]) % T
        best = max(best, float(np.abs(np.exp(2j * np.pi * ph / T) @ lin).max()))
    return best


def heavy() -> dict:
    return {"sup_32_3_0.41_grid2^24": sup_brute(32, 3, 0.41, 1 << 24)}


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--heavy", action="store_true")
    args = ap.parse_args()
    res = light()
    if args.heavy:
        res.update(heavy())

    def enc(v):
        if isinstance(v, complex):
            return [repr(v.real), repr(v.imag)]
        return v

    print(json.dumps({k: enc(v) for k, v in res.items()}, indent=1))


if __name__ == "__main__":
    main()
