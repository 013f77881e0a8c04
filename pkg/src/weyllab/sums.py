"""Weyl sums, polynomial exponential sums and complete Gauss sums.

    omega_{N,k}(x, t) = sum_{n=1}^N e(n x + n**k t),        e(u) = exp(2 pi i u)
    S_k(u; N)         = sum_{n=1}^N e(u_1 n + ... + u_k n**k)
    S_k(a, b, q)      = sum_{n=1}^q e((a n**k + b n) / q)

Real phases go through the compensated reduction in :mod:`weyllab.ddphase`;
rational phases are reduced with exact integers before one division by q.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from . import ddphase
from .errors import InvalidInputError
from .quadrature import oscillatory_integral

TWO_PI = 2.0 * np.pi
_BATCH_CELLS = 1 << 21


@dataclass(frozen=True)
class WeylParams:
    N: int
    k: int

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 1:
            raise InvalidInputError(f"N must be a positive integer, got {self.N}")
        if int(self.k) != self.k or self.k < 2:
            raise InvalidInputError(f"k must be an integer >= 2, got {self.k}")


def _mod1(v: float) -> float:
    r = float(v) % 1.0
    return 0.0 if r >= 1.0 else r


@dataclass(frozen=True)
class PhasePoint:
    """A point (x, t) of the torus, both coordinates reduced to [0, 1).

    ``exact_t`` pins t to a rational b/q so complete-period phases are exact.
    """

    x: float
    t: float
    exact_t: Fraction | None = None

    def __post_init__(self):
        object.__setattr__(self, "x", _mod1(self.x))
        if self.exact_t is not None:
            r = Fraction(self.exact_t) % 1
            object.__setattr__(self, "exact_t", r)
            object.__setattr__(self, "t", float(r))
        else:
            object.__setattr__(self, "t", _mod1(self.t))

    @classmethod
    def rational(cls, x, t: Fraction) -> "PhasePoint":
        return cls(float(x), float(t), Fraction(t))


def cis(phase) -> np.ndarray:
    """e(phase) for phases already reduced to [0, 1)."""
    return np.exp(1j * TWO_PI * np.asarray(phase))


def _is_pow2(M: int) -> bool:
    return M >= 1 and M & (M - 1) == 0


def int_powers_mod(N: int, k: int, q: int) -> np.ndarray:
    """n**k mod q for n = 1..N in exact integer arithmetic."""
    if q < 2**31:
        n = np.arange(1, N + 1, dtype=np.int64) % q
        acc = np.ones(N, dtype=np.int64) % q
        for _ in range(k):
            acc = acc * n % q
        return acc
    return np.array([pow(n, k, q) for n in range(1, N + 1)], dtype=object)


def _linear_phase(N: int, x) -> np.ndarray:
    return ddphase.monomial_phase(N, 1, x) if N > 0 else np.zeros(0)


def weyl_terms(params: WeylParams, pt: PhasePoint) -> np.ndarray:
    """The N individual terms e(n x + n**k t)."""
    N, k = params.N, params.k
    px = _linear_phase(N, pt.x)
    if pt.exact_t is not None:
        b, q = pt.exact_t.numerator, pt.exact_t.denominator
        r = int_powers_mod(N, k, q) * b % q
        pt_phase = np.asarray(r, dtype=np.float64) / q
    else:
        pt_phase = ddphase.monomial_phase(N, k, pt.t)
    return cis(ddphase.frac(px + pt_phase))


def eval_weyl_sum(params: WeylParams, pt: PhasePoint) -> complex:
    """omega_{N,k}(x, t) by direct summation (pairwise, deterministic)."""
    return complex(weyl_terms(params, pt).sum())


def weyl_sum_batch(params: WeylParams, xs, ts) -> np.ndarray:
    """omega_{N,k} at many real points; xs and ts broadcast to a common 1-d shape."""
    xs, ts = np.broadcast_arrays(np.asarray(xs, float) % 1.0, np.asarray(ts, float) % 1.0)
    xs, ts = xs.ravel(), ts.ravel()
    N, k = params.N, params.k
    out = np.empty(len(xs), dtype=complex)
    step = max(1, _BATCH_CELLS // N)
    for s in range(0, len(xs), step):
        x = xs[s : s + step, None]
        t = ts[s : s + step, None]
        ph = ddphase.monomial_phase(N, 1, x) + ddphase.monomial_phase(N, k, t)
        out[s : s + step] = cis(ddphase.frac(ph)).sum(axis=1)
    return out


def eval_general_sum(u: Sequence[float], N: int) -> complex:
    """S_k(u; N) = sum_{n<=N} e(u_1 n + u_2 n**2 + ... + u_k n**k)."""
    if len(u) < 2:
        raise InvalidInputError("u must have length k >= 2")
    if int(N) != N or N < 1:
        raise InvalidInputError("N must be a positive integer")
    ddphase.check_power_guard(N, len(u))
    phase = np.zeros(N)
    for j, c in enumerate(u, start=1):
        c = _mod1(c)
        if c != 0.0:
            phase = phase + ddphase.monomial_phase(N, j, c)
    return complex(cis(ddphase.frac(phase)).sum())


def eval_weyl_grid_x(params: WeylParams, t: float, M: int) -> np.ndarray:
    """omega_{N,k}(m/M, t) for m = 0..M-1.

    a_n = e(n**k t) is folded into bin n mod M and the M-point inverse FFT
    (times M) sums the bins against e(j m / M).
    """
    if not _is_pow2(M):
        raise InvalidInputError(f"grid size must be a power of two, got {M}")
    N, k = params.N, params.k
    a = cis(ddphase.monomial_phase(N, k, _mod1(t)))
    idx = np.arange(1, N + 1) % M
    bins = np.bincount(idx, weights=a.real, minlength=M) + 1j * np.bincount(
        idx, weights=a.imag, minlength=M
    )
    return M * np.fft.ifft(bins)


def power_indices_pow2(N: int, k: int, M: int) -> np.ndarray:
    """n**k mod M for a power-of-two M (uint64 wrap-around is exact mod 2**64)."""
    n = np.arange(1, N + 1, dtype=np.uint64)
    acc = np.ones(N, dtype=np.uint64)
    for _ in range(k):
        acc = acc * n
    return (acc & np.uint64(M - 1)).astype(np.int64)


def t_grid_spectrum(params: WeylParams, x: float, M: int) -> np.ndarray:
    """Length-M coefficient vector with e(n x) placed at bin n**k mod M."""
    N, k = params.N, params.k
    c = cis(_linear_phase(N, _mod1(x)))
    idx = power_indices_pow2(N, k, M)
    return np.bincount(idx, weights=c.real, minlength=M) + 1j * np.bincount(
        idx, weights=c.imag, minlength=M
    )


def eval_weyl_grid_t(params: WeylParams, x: float, M: int) -> np.ndarray:
    """omega_{N,k}(x, m/M) for m = 0..M-1 via one M-point FFT."""
    if not _is_pow2(M):
        raise InvalidInputError(f"grid size must be a power of two, got {M}")
    return M * np.fft.ifft(t_grid_spectrum(params, x, M))


def complete_sum(coeffs: Sequence[int], q: int) -> complex:
    """sum_{n=1}^q e((c_1 n + c_2 n**2 + ... + c_k n**k) / q) with exact residues."""
    if q < 1:
        raise InvalidInputError("q must be positive")
    r = np.zeros(q, dtype=np.int64 if q < 2**31 else object)
    for j, c in enumerate(coeffs, start=1):
        c = int(c) % q
        if c:
            r = (r + c * int_powers_mod(q, j, q)) % q
    return _sum_residues(r, q)


def _sum_residues(r, q: int) -> complex:
    # histogram of residues against the q-th roots of unity
    if q < 2**31:
        counts = np.bincount(np.asarray(r, dtype=np.int64), minlength=q)
        nz = np.nonzero(counts)[0]
        return complex((counts[nz] * cis(nz / q)).sum())
    return complex(cis(np.array([int(v) for v in r], dtype=np.float64) / q).sum())


def eval_gauss_sum(k: int, a: int, b: int, q: int) -> complex:
    """S_k(a, b, q) = sum_{n=1}^q e((a n**k + b n) / q).

    Argument order is (coefficient of n**k, coefficient of n).
    """
    if q < 1:
        raise InvalidInputError("q must be positive")
    a, b = int(a) % q, int(b) % q
    r = (a * int_powers_mod(q, k, q) + b * (np.arange(1, q + 1, dtype=np.int64) % q)) % q
    return _sum_residues(r, q)


def gauss_sum_table(k: int, q: int) -> np.ndarray:
    """|S_k(a, b, q)| for all a, b in [1, q]; row a-1 holds the n**k coefficient a."""
    n = np.arange(1, q + 1, dtype=np.int64)
    pk = int_powers_mod(q, k, q)
    roots = cis(np.arange(q) / q)
    coef = np.arange(1, q + 1, dtype=np.int64)
    out = np.empty((q, q))
    for a in coef:
        base = a * pk % q
        res = (base[None, :] + coef[:, None] * n[None, :]) % q
        out[a - 1] = np.abs(roots[res].sum(axis=1))
    return out


def eval_oscillatory_integral(xi: Sequence[float], N: float, tol: float | None = None) -> complex:
    """I(xi) = int_0^N e(xi_1 z + ... + xi_k z**k) dz."""
    return oscillatory_integral(xi, N, tol)


@dataclass(frozen=True)
class MajorArcDecomposition:
    main_term: complex
    delta: complex
    delta_bound: float
    exact: complex
    xi1: float
    xik: float

    @property
    def constant(self) -> float:
        """|delta| / delta_bound, the measured implied constant."""
        return abs(self.delta) / self.delta_bound


def _centered(v: float) -> float:
    return v - math.floor(v + 0.5)


def major_arc_decompose(
    params: WeylParams, pt: PhasePoint, center: tuple[int, int, int], tol: float | None = None
) -> MajorArcDecomposition:
    """Split omega at (x, t) into q^-1 S_k(r/q; q) I(xi) + delta around r/q.

    ``center`` is (q, r_1, r_k).  The offsets xi_1 = x - r_1/q and
    xi_k = t - r_k/q are taken as the representatives in [-1/2, 1/2).
    """
    q, r1, rk = (int(v) for v in center)
    if q < 1 or math.gcd(q, r1, rk) != 1:
        raise InvalidInputError(f"invalid arc center {center}: need q >= 1 and gcd(q, r1, rk) = 1")
    N, k = params.N, params.k
    xi1 = _centered(pt.x - r1 / q)
    if pt.exact_t is not None:
        xik = float(_centered_fraction(pt.exact_t - Fraction(rk, q)))
    else:
        xik = _centered(pt.t - rk / q)
    xi = [xi1] + [0.0] * (k - 2) + [xik]
    if tol is None:
        tol = 1e-10 * N
    integral = oscillatory_integral(xi, N, tol)
    gauss = eval_gauss_sum(k, rk, r1, q)
    main = gauss * integral / q
    exact = eval_weyl_sum(params, pt)
    bound = q * (1.0 + abs(xi1) * N + abs(xik) * float(N) ** k)
    return MajorArcDecomposition(main, exact - main, bound, exact, xi1, xik)


def _centered_fraction(v: Fraction) -> Fraction:
    return v - math.floor(v + Fraction(1, 2))
