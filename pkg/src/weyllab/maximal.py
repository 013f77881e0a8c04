"""The maximal function sup_t |omega_{N,k}(x, t)| and what is measured from it.

L^p norms, super-level-set measures, the layer-cake reconstruction, major
arc location for large values, scaling-exponent fits and the conjectural
pointwise-bound scan.

All x-integrals run over a fundamental domain of the maximal function.
If every prime p with (p - 1) | (k - 1) divides g, then n**k = n (mod g),
so omega(x, t + j/g) = omega(x + j/g, t) and the maximal function has
period 1/g in x.  Together with omega(-x, -t) = conj(omega(x, t)) it is
even, so [0, 1/(2g)] carries everything; grid points on the full circle
map onto it with multiplicity 2 (interior) or 1 (the two ends) per period.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

import numpy as np
import scipy.fft
from scipy.optimize import minimize_scalar

from . import ddphase
from .errors import InvalidInputError, ResourceError
from .numtheory import ModulusDecomposition, decompose_modulus, dirichlet_approx, sieve_primes
from .sums import PhasePoint, WeylParams, cis, eval_weyl_sum, power_indices_pow2, weyl_sum_batch

log = logging.getLogger(__name__)

DEFAULT_BUDGET = 1 << 27
DEFAULT_OVERSAMPLE = 8
_POLISH_CANDIDATES = 4


def exponent_D(k: int) -> int:
    """min(2**(k-1), k(k-1)): the large-value threshold exponent."""
    return min(2 ** (k - 1), k * (k - 1))


def symmetry_modulus(k: int) -> int:
    """Largest g with g | n**k - n for every integer n."""
    return math.prod(int(p) for p in sieve_primes(k) if (k - 1) % (int(p) - 1) == 0)


@dataclass(frozen=True)
class MaximalValue:
    value: float
    t_star: float
    grid_size: int
    refined: bool


def _abs_direct(params: WeylParams, x: float, t: float) -> float:
    N, k = params.N, params.k
    ph = ddphase.monomial_phase(N, 1, x) + ddphase.monomial_phase(N, k, t % 1.0)
    return float(abs(cis(ddphase.frac(ph)).sum()))


def t_grid_size(params: WeylParams, oversample: int) -> int:
    need = oversample * params.N**params.k
    return 1 << max(0, (need - 1).bit_length())


def _grid_magnitudes(params: WeylParams, x: float, M: int) -> np.ndarray:
    # single precision is plenty to pick candidates; values are recomputed directly
    c = cis(ddphase.monomial_phase(params.N, 1, x)).astype(np.complex64)
    spec = np.zeros(M, dtype=np.complex64)
    np.add.at(spec, power_indices_pow2(params.N, params.k, M), c)
    vals = scipy.fft.ifft(spec, norm="forward", overwrite_x=True)
    return vals.real**2 + vals.imag**2


def sup_over_t(
    params: WeylParams,
    x: float,
    oversample: int = DEFAULT_OVERSAMPLE,
    budget: int = DEFAULT_BUDGET,
) -> MaximalValue:
    """sup over t in [0, 1) of |omega_{N,k}(x, t)|.

    Dense FFT grid of M >= oversample * N**k points, then the best few grid
    maxima are refined by a parabola through |omega|**2 at the three nearest
    grid points and polished with a bounded Brent search on direct sums.
    The reported value is always a direct evaluation at ``t_star``; ties
    keep the smallest t.
    """
    if oversample < 4:
        raise InvalidInputError("oversample must be at least 4")
    M = t_grid_size(params, oversample)
    if M > budget:
        raise ResourceError(
            f"t-grid of {M} points exceeds the budget of {budget}; "
            f"rerun with --budget {M} or smaller N/oversample",
            required=M,
        )
    x = float(x) % 1.0
    N = params.N
    if N == 1:
        return MaximalValue(1.0, 0.0, M, False)
    mag2 = _grid_magnitudes(params, x, M)
    top = int(np.argmax(mag2))
    best_t = top / M
    best = _abs_direct(params, x, best_t)
    refined = False
    kcand = min(_POLISH_CANDIDATES, M)
    cands = np.argpartition(mag2, -kcand)[-kcand:] if M > kcand else np.arange(M)
    cands = sorted(set(int(c) for c in cands) | {top}, key=lambda m: (-float(mag2[m]), m))
    for m in cands:
        y0, ym, yp = float(mag2[m]), float(mag2[m - 1]), float(mag2[(m + 1) % M])
        curv = ym - 2.0 * y0 + yp
        shift = 0.5 * (ym - yp) / curv if curv < 0 else 0.0
        shift = min(max(shift, -0.5), 0.5)
        t0 = (m + shift) / M
        res = minimize_scalar(
            lambda t: -_abs_direct(params, x, t),
            bounds=(t0 - 1.0 / M, t0 + 1.0 / M),
            method="bounded",
            options={"xatol": 1e-3 / M},
        )
        for t_try in (t0, float(res.x)):
            v = _abs_direct(params, x, t_try)
            if v > best * (1 + 1e-12) + 1e-300:
                best, best_t, refined = v, t_try % 1.0, True
    return MaximalValue(min(best, float(N)), best_t % 1.0, M, refined)


@lru_cache(maxsize=1 << 16)
def _sup_cached(N: int, k: int, x: float, oversample: int, budget: int) -> MaximalValue:
    return sup_over_t(WeylParams(N, k), x, oversample, budget)


def maximal_profile(
    params: WeylParams,
    xs: Sequence[float],
    oversample: int = DEFAULT_OVERSAMPLE,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> np.ndarray:
    """sup_t |omega(x, t)| at every x (memoised, results in input order)."""
    key = (params.N, params.k)
    xs = [float(x) for x in xs]
    job = lambda x: _sup_cached(*key, x, oversample, budget).value  # noqa: E731
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            vals = list(pool.map(job, xs))
    else:
        vals = [job(x) for x in xs]
    return np.array(vals)


def fold_to_domain(x: Fraction, g: int) -> Fraction:
    """Image of x in the fundamental domain [0, 1/(2g)]."""
    r = Fraction(x) % Fraction(1, g)
    return Fraction(1, g) - r if r > Fraction(1, 2 * g) else r


@dataclass(frozen=True)
class DomainGrid:
    """Quadrature nodes on [0, 1/(2g)] with weights summing to 1 (full circle)."""

    points: tuple[Fraction, ...]
    weights: np.ndarray
    x_grid: int  # uniform resolution actually used on the full circle
    g: int

    @property
    def floats(self) -> np.ndarray:
        return np.array([float(p) for p in self.points])


def domain_grid(k: int, x_grid: int, N: int | None = None, farey: bool = False) -> DomainGrid:
    """Uniform grid m / x_grid folded onto the fundamental domain.

    ``x_grid`` is rounded up to a multiple of 2g so the folding is exact.
    With ``farey`` the images of all r/q with q <= sqrt(N) are added and
    every node is weighted by its midpoint cell.
    """
    g = symmetry_modulus(k)
    X = -(-x_grid // (2 * g)) * 2 * g
    P = X // (2 * g)
    pts = {Fraction(m, X) for m in range(P + 1)}
    if farey:
        if N is None:
            raise InvalidInputError("Farey augmentation needs N")
        for q in range(1, math.isqrt(N) + 1):
            for r in range(q):
                if math.gcd(r, q) == 1:
                    pts.add(fold_to_domain(Fraction(r, q), g))
    pts = sorted(pts)
    end = Fraction(1, 2 * g)
    mids = [Fraction(0)] + [(a + b) / 2 for a, b in zip(pts, pts[1:])] + [end]
    w = np.array([float(b - a) for a, b in zip(mids, mids[1:])]) * (2 * g)
    return DomainGrid(tuple(pts), w, X, g)


def _default_x_grid(N: int) -> int:
    return 8 * N


def lp_norm_max(
    params: WeylParams,
    p: float,
    x_grid: int | None = None,
    oversample: int = DEFAULT_OVERSAMPLE,
    farey: bool = True,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> float:
    """Riemann approximation of || sup_t |omega(., t)| ||_{L^p(T)}."""
    if p < 1:
        raise InvalidInputError("p must be >= 1")
    x_grid = _default_x_grid(params.N) if x_grid is None else int(x_grid)
    if x_grid < 4 * params.N:
        raise InvalidInputError(f"x_grid must be >= 4N = {4 * params.N}")
    grid = domain_grid(params.k, x_grid, params.N, farey)
    vals = maximal_profile(params, grid.floats, oversample, budget, threads)
    return float(np.sum(grid.weights * vals**p)) ** (1.0 / p)


@dataclass(frozen=True)
class NormEstimate:
    value: float
    value_doubled: float
    rel_change: float
    x_grid: int

    @property
    def converged(self) -> bool:
        return self.rel_change < 0.02


def lp_norm_report(
    params: WeylParams,
    p: float,
    x_grid: int | None = None,
    oversample: int = DEFAULT_OVERSAMPLE,
    farey: bool = True,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> NormEstimate:
    """lp_norm_max at x_grid and 2 * x_grid; the finer grid reuses every coarse node."""
    x_grid = _default_x_grid(params.N) if x_grid is None else int(x_grid)
    a = lp_norm_max(params, p, x_grid, oversample, farey, budget, threads)
    b = lp_norm_max(params, p, 2 * x_grid, oversample, farey, budget, threads)
    if not b >= 0.0:
        raise ArithmeticError("non-finite norm")
    return NormEstimate(a, b, abs(b - a) / b if b else 0.0, x_grid)


@dataclass(frozen=True)
class LevelSetReport:
    A: float
    measure: float
    paper_bound: float
    ratio: float


def _interp_length(xs: np.ndarray, vals: np.ndarray, A: float) -> float:
    """Length of {F > A} for the piecewise-linear interpolant of (xs, vals)."""
    total = 0.0
    for a, b, fa, fb in zip(xs[:-1], xs[1:], vals[:-1], vals[1:]):
        above_a, above_b = fa > A, fb > A
        if above_a and above_b:
            total += b - a
        elif above_a or above_b:
            cross = (A - fa) / (fb - fa)
            total += (b - a) * ((1.0 - cross) if above_b else cross)
    return total


def superlevel_measure(
    params: WeylParams,
    A: float,
    x_grid: int | None = None,
    oversample: int = DEFAULT_OVERSAMPLE,
    method: str = "count",
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> LevelSetReport:
    """|{x : sup_t |omega(x, t)| > A}| on a uniform x-grid.

    ``method="count"`` is the fraction of grid points above A;
    ``method="interp"`` measures where the linear interpolant between
    neighbouring grid values exceeds A.  The reference bound is
    N**k * A**-(k+1).
    """
    N, k = params.N, params.k
    if not 0 < A:
        raise InvalidInputError("A must be positive")
    bound = float(N) ** k * A ** -(k + 1)
    if A >= N:
        return LevelSetReport(A, 0.0, bound, 0.0)
    x_grid = _default_x_grid(N) if x_grid is None else int(x_grid)
    grid = domain_grid(k, x_grid)
    vals = maximal_profile(params, grid.floats, oversample, budget, threads)
    if method == "count":
        measure = float(np.sum(grid.weights[vals > A]))
    elif method == "interp":
        measure = 2 * grid.g * _interp_length(grid.floats, vals, A)
    else:
        raise InvalidInputError(f"unknown measure method {method!r}")
    measure = min(max(measure, 0.0), 1.0)
    return LevelSetReport(A, measure, bound, measure / bound)


class LayerCake(tuple):
    """(direct, reconstructed, lemma_bound)."""

    __slots__ = ()

    def __new__(cls, direct: float, reconstructed: float, lemma_bound: float):
        return super().__new__(cls, (direct, reconstructed, lemma_bound))

    direct = property(lambda self: self[0])
    reconstructed = property(lambda self: self[1])
    lemma_bound = property(lambda self: self[2])


def layer_cake_integral(
    F_samples: Sequence[float], p: float, M: float, N_cap: float, a: float, b: float
) -> LayerCake:
    """Compare mean(F**p) with its dyadic level-set reconstruction.

    ``reconstructed`` charges the samples below M with M**p and each sample
    in [2**j M, 2**(j+1) M) with (2**(j+1) M)**p, so
    direct <= reconstructed <= 2**p direct + M**p.  ``lemma_bound`` is
    nu M**p + N**a M**(p-b) log N + N**(p+a-b) for the probability measure
    on the samples.
    """
    F = np.asarray(F_samples, dtype=float)
    if F.size == 0:
        raise InvalidInputError("need at least one sample")
    if np.any(F < 0) or np.any(F > N_cap) or not np.all(np.isfinite(F)):
        raise InvalidInputError("samples must lie in [0, N_cap]")
    if not 0 < M <= N_cap:
        raise InvalidInputError("need 0 < M <= N_cap")
    n = F.size
    direct = float(np.sum(F**p)) / n
    low = np.count_nonzero(F < M)
    recon = M**p * low / n
    j = 0
    while True:
        lo, hi = 2.0**j * M, 2.0 ** (j + 1) * M
        band = np.count_nonzero((F >= lo) & (F < hi))
        recon += hi**p * band / n
        if hi > F.max():
            break
        j += 1
    bound = M**p + N_cap**a * M ** (p - b) * math.log(N_cap) + N_cap ** (p + a - b)
    return LayerCake(direct, recon, bound)


def layer_cake_exact(F_samples: Sequence[float], p: float, M: float) -> float:
    """M**p + int_M^inf p s**(p-1) nu(F > s) ds, evaluated exactly on the samples.

    Between consecutive sample values nu(F > s) is constant, so the integral
    is the mean of (F**p - M**p) over samples above M; the result lies in
    [mean F**p, mean F**p + M**p].
    """
    F = np.sort(np.asarray(F_samples, dtype=float))
    n = F.size
    levels = F[F > M]
    # nu(F > s) on (levels[i-1], levels[i]] equals (count of samples >= levels[i]) / n
    edges = np.concatenate(([M], levels))
    tail = (len(levels) - np.arange(len(levels))) / n
    return float(M**p + np.sum(tail * (edges[1:] ** p - edges[:-1] ** p)))


@dataclass(frozen=True)
class MajorArc:
    q: int
    r1: int
    rk: int
    x_radius: float
    t_radius: float
    refined_x_radius: float
    refined_t_radius: float
    decomposition: ModulusDecomposition
    x_offset: float
    t_offset: float
    in_arc: bool
    in_refined_arc: bool
    refined_q_ok: bool


def _centered(v: Fraction) -> Fraction:
    return v - math.floor(v + Fraction(1, 2))


def locate_major_arc(
    params: WeylParams,
    pt: PhasePoint,
    A: float,
    eps_report: float = 0.0,
    diagnostics: dict | None = None,
) -> MajorArc | None:
    """Rational center (r_1/q, r_k/q) explaining a large value |omega(x, t)| >= A.

    t is approximated by a/q_0 with q_0 <= A**k, then q_0 x by b/q_1 with
    q_1 <= 2k**2; the center is (q_0 q_1, b, a q_1) reduced by its gcd.
    Containment is checked in the plain form (q <= Q N**eps and radii
    Q N**(eps-j) / q) and in the class-refined form driven by the splitting
    of q, where Q = (N/A)**k.  Returns None when q exceeds Q N**eps.
    """
    N, k = params.N, params.k
    thr = N ** (1 - 1 / exponent_D(k))
    if not A > thr:
        raise InvalidInputError(f"A = {A} must exceed N**(1-1/D) = {thr:.6g}")
    val = abs(eval_weyl_sum(params, pt))
    if val < A * (1 - 1e-12):
        raise InvalidInputError(f"|omega(x, t)| = {val:.6g} is below A = {A}")
    x = Fraction(pt.x)
    t = pt.exact_t if pt.exact_t is not None else Fraction(pt.t)
    t_approx = dirichlet_approx(t, max(1.0, A**k))
    q0, a = t_approx.denominator, t_approx.numerator
    x_approx = dirichlet_approx(q0 * x, 2 * k * k)
    q1, b = x_approx.denominator, x_approx.numerator
    q, r1, rk = q0 * q1, b, a * q1
    g = math.gcd(q, r1, rk)
    q, r1, rk = q // g, (r1 // g) % (q // g), (rk // g) % (q // g)
    Q = (N / A) ** k
    ne = float(N) ** eps_report
    dx = abs(float(_centered(x - Fraction(r1, q))))
    dt = abs(float(_centered(t - Fraction(rk, q))))
    info = {"q": q, "r1": r1, "rk": rk, "q_bound": Q * ne, "x_offset": dx, "t_offset": dt, "value": val}
    if diagnostics is not None:
        diagnostics.update(info)
    if q > Q * ne:
        log.info("no admissible arc: %s", info)
        return None
    dec = decompose_modulus(q, k) if k >= 3 else ModulusDecomposition(k, (q,))
    W = dec.weight(k)
    xr, tr = Q * N ** (-1 + eps_report) / q, Q * N ** (-k + eps_report) / q
    rxr, rtr = Q * N ** (-1 + eps_report) / W, Q * N ** (-k + eps_report) / W
    q_ok = dec.weight(1.0) <= N ** (1 + eps_report) / A
    return MajorArc(
        q, r1, rk, xr, tr, rxr, rtr, dec, dx, dt,
        in_arc=dx <= xr and dt <= tr,
        in_refined_arc=q_ok and dx <= rxr and dt <= rtr,
        refined_q_ok=q_ok,
    )


def exponent_predictions(k: int, p: float) -> dict[str, float]:
    """Predicted norm exponents 1/2 + s: upper, lower and conditional."""
    pk = exponent_D(k)
    s_upper = 0.5 - 1 / pk if p <= pk else 0.5 - 1 / p
    gamma = 0.25 if p <= 4 else 0.5 - 1 / p
    s_cond = 0.5 - 1 / (k + 1) if p <= k + 1 else 0.5 - 1 / p
    return {"upper": 0.5 + s_upper, "lower": 0.5 + gamma, "conditional": 0.5 + s_cond}


@dataclass(frozen=True)
class ExponentFit:
    k: int
    p: float
    N_values: list[int]
    norm_values: list[float]
    fitted_slope: float
    intercept: float
    predicted_upper: float
    predicted_lower: float
    predicted_conditional: float
    rel_changes: list[float] = field(default_factory=list)


def exponent_fit(
    k: int,
    p: float,
    N_values: Sequence[int],
    oversample: int = DEFAULT_OVERSAMPLE,
    x_grid_factor: int = 8,
    farey: bool = True,
    budget: int = DEFAULT_BUDGET,
    threads: int = 1,
) -> ExponentFit:
    """Least-squares slope of log ||sup_t |omega|||_p against log N.

    Each norm is taken on the doubled grid of its convergence check.
    """
    N_values = [int(n) for n in N_values]
    if len(N_values) < 3:
        raise InvalidInputError("exponent_fit needs at least three N values")
    norms, changes = [], []
    for N in N_values:
        est = lp_norm_report(WeylParams(N, k), p, x_grid_factor * N, oversample, farey, budget, threads)
        norms.append(est.value_doubled)
        changes.append(est.rel_change)
    slope, icpt = np.polyfit(np.log(N_values), np.log(norms), 1)
    pred = exponent_predictions(k, p)
    return ExponentFit(
        k, p, N_values, norms, float(slope), float(icpt),
        pred["upper"], pred["lower"], pred["conditional"], changes,
    )


def conjecture_ratio(k: int, N: int, x: float, t: float) -> tuple[float, int]:
    """|omega| / (N (1/q + q/N**k)**(1/k)) with q from dirichlet_approx(t, N**(k/2))."""
    q = dirichlet_approx(Fraction(t) % 1, float(N) ** (k / 2)).denominator
    val = abs(eval_weyl_sum(WeylParams(N, k), PhasePoint(x, t)))
    return val / (N * (1 / q + q / float(N) ** k) ** (1 / k)), q


@dataclass(frozen=True)
class ConjectureScan:
    max_ratio: float
    argmax: tuple[float, float, int]
    max_ratio_random: float
    max_ratio_rational: float
    samples: int


def conjecture_scan_report(k: int, N: int, samples: int, seed: int = 0) -> ConjectureScan:
    """Scan half uniform (x, t) and half t = a/q (q <= N) with uniform x."""
    if samples < 1:
        raise InvalidInputError("samples must be >= 1")
    rng = np.random.default_rng(seed)
    n_rand = (samples + 1) // 2
    n_rat = samples - n_rand
    xs = rng.random(samples)
    ts = np.empty(samples)
    ts[:n_rand] = rng.random(n_rand)
    qs = rng.integers(1, N + 1, size=n_rat)
    nums = (rng.random(n_rat) * qs).astype(np.int64)
    ts[n_rand:] = nums / qs
    Mq = float(N) ** (k / 2)
    dq = np.array([dirichlet_approx(Fraction(t), Mq).denominator for t in ts.tolist()], dtype=float)
    vals = np.abs(weyl_sum_batch(WeylParams(N, k), xs, ts))
    ratios = vals / (N * (1 / dq + dq / float(N) ** k) ** (1 / k))
    i = int(np.argmax(ratios))
    return ConjectureScan(
        float(ratios[i]),
        (float(xs[i]), float(ts[i]), int(dq[i])),
        float(ratios[:n_rand].max()),
        float(ratios[n_rand:].max()) if n_rat else 0.0,
        samples,
    )


def conjecture_scan(k: int, N: int, samples: int, seed: int = 0) -> float:
    """Largest observed ratio |omega| / (N (1/q + q/N**k)**(1/k)); report only."""
    return conjecture_scan_report(k, N, samples, seed).max_ratio
