"""Lower-bound certificate for the maximal L^1 norm.

For each prime q in (c1 sqrt N, sqrt N] we choose a t-numerator b with
many "good" linear coefficients a, i.e. |S_k(b, a, q)| >= sqrt(q)/2.  Near
every (a/q, b/q) with a good the sum has size about N / sqrt(q), so the
thin intervals J(q, a) = [a/q - 1/(100N), a/q + 1/(100N)] together carry
an L^1 mass of order N**(3/4).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError
from .numtheory import is_prime, primes_in
from .sums import PhasePoint, WeylParams, eval_gauss_sum, eval_weyl_sum, gauss_sum_table, weyl_sum_batch

ALPHA1 = 0.5
# sample lattice used to estimate inf_x sup_t on each rectangle
_X_SAMPLES = 9
_T_SAMPLES = 9
_VERIFY_RANDOM = 8


@dataclass(frozen=True)
class GoodSetCensus:
    k: int
    q: int
    alpha1: float
    counts_per_b: list[int]  # entry b-1 is #G(b)
    total: int
    best_b: int

    @property
    def alpha2(self) -> float:
        return self.k**-2 / 4

    def good_set(self, b: int) -> list[int]:
        return list(_good_sets(self.k, self.q)[b - 1])


def _check_prime_modulus(k: int, q: int) -> None:
    if q < 3 or not is_prime(q):
        raise InvalidInputError(f"q must be a prime >= 3, got {q}")
    if k % q == 0:
        raise InvalidInputError(f"q = {q} divides k = {k}")


def _good_mask(k: int, q: int) -> np.ndarray:
    # mask[b-1, a-1]: |S_k(b, a, q)| >= sqrt(q)/2, allowing for round-off
    table = gauss_sum_table(k, q)
    return table >= ALPHA1 * math.sqrt(q) - 1e-10 * q


def _good_sets(k: int, q: int) -> list[tuple[int, ...]]:
    mask = _good_mask(k, q)
    return [tuple(int(a) + 1 for a in np.nonzero(row)[0]) for row in mask]


def good_set_census(k: int, q: int) -> GoodSetCensus:
    """Count the pairs (b, a) in [1, q]**2 with |S_k(b, a, q)| >= sqrt(q)/2."""
    _check_prime_modulus(k, q)
    counts = [int(c) for c in _good_mask(k, q).sum(axis=1)]
    best = max(range(q), key=lambda i: (counts[i], -i)) + 1
    return GoodSetCensus(k, q, ALPHA1, counts, sum(counts), best)


@dataclass(frozen=True)
class CertificateInterval:
    q: int
    a: int
    b: int
    center: float
    radius: float
    inf_sup: float  # min over sampled x of max over sampled t of |omega|


@dataclass(frozen=True)
class LowerBoundCertificate:
    N: int
    k: int
    c1: float
    primes: list[int]
    chosen_b: dict[int, int]
    intervals: list[CertificateInterval]
    l1_lower: float
    target: float
    censuses: dict[int, GoodSetCensus] = field(default_factory=dict, compare=False)

    @property
    def ratio(self) -> float:
        return self.l1_lower / self.target


def certificate_primes(N: int, k: int, c1: float) -> list[int]:
    """Primes q with c1 sqrt(N) < q <= sqrt(N), q >= 3 and q not dividing k."""
    lo = math.floor(c1 * math.sqrt(N)) + 1
    hi = math.isqrt(N)
    if hi < max(lo, 3):
        return []
    return [q for q in primes_in(max(lo, 3), hi) if k % q != 0]


def _sample_offsets(n: int, radius: float) -> np.ndarray:
    return np.linspace(-radius, radius, n)


def _rectangle_radii(N: int, k: int) -> tuple[float, float]:
    return 1.0 / (100 * N), 1.0 / (100 * float(N) ** k)


def _inf_sup_batch(params: WeylParams, center_x: float, center_t: float) -> float:
    rx, rt = _rectangle_radii(params.N, params.k)
    xs = center_x + _sample_offsets(_X_SAMPLES, rx)
    ts = center_t + _sample_offsets(_T_SAMPLES, rt)
    X, T = np.meshgrid(xs, ts, indexing="ij")
    vals = np.abs(weyl_sum_batch(params, X.ravel(), T.ravel())).reshape(X.shape)
    return float(vals.max(axis=1).min())


def _inf_sup_scalar(params: WeylParams, center_x: float, center_t: float) -> float:
    rx, rt = _rectangle_radii(params.N, params.k)
    best_per_x = []
    for dx in _sample_offsets(_X_SAMPLES, rx):
        best = 0.0
        for dt in _sample_offsets(_T_SAMPLES, rt):
            best = max(best, abs(eval_weyl_sum(params, PhasePoint(center_x + dx, center_t + dt))))
        best_per_x.append(best)
    return min(best_per_x)


def build_certificate(N: int, k: int, c1: float = 0.5) -> LowerBoundCertificate:
    """Assemble the intervals J(q, a) and the L^1 lower bound they certify.

    Every interval contributes its width times the sampled inf over x of
    the sampled sup over |t - b/q| <= 1/(100 N**k).
    """
    params = WeylParams(N, k)
    if not 0 < c1 < 1:
        raise InvalidInputError("c1 must lie in (0, 1)")
    primes = certificate_primes(N, k, c1)
    if not primes:
        raise InvalidInputError(
            f"no admissible prime in ({c1} sqrt(N), sqrt(N)] for N = {N}; use a larger N or smaller c1"
        )
    rx, _ = _rectangle_radii(N, k)
    censuses, chosen = {}, {}
    raw: list[tuple[int, int, int]] = []
    for q in primes:
        census = good_set_census(k, q)
        censuses[q] = census
        chosen[q] = census.best_b
        raw.extend((q, a, census.best_b) for a in census.good_set(census.best_b) if a < q)
    # distinct primes never share a reduced fraction a/q; keep the guard anyway
    seen: dict[Fraction, int] = {}
    for q, a, _ in raw:
        f = Fraction(a, q)
        seen[f] = seen.get(f, 0) + 1
    intervals = []
    for q, a, b in raw:
        if seen[Fraction(a, q)] > 1:
            continue
        val = _inf_sup_batch(params, a / q, b / q)
        intervals.append(CertificateInterval(q, a, b, a / q, rx, val))
    l1 = math.fsum(2 * iv.radius * iv.inf_sup for iv in intervals)
    return LowerBoundCertificate(N, k, c1, primes, chosen, intervals, l1, float(N) ** 0.75, censuses)


@dataclass(frozen=True)
class CertificateReport:
    theta: float
    l1_lower: float
    l1_reported: float
    rel_diff: float
    ratio: float
    disjoint: bool
    center_errors: float  # max | |omega(center)| - (N/q) |S| | / q when q | N, else nan
    n_intervals: int


def verify_certificate(cert: LowerBoundCertificate, seed: int = 0) -> CertificateReport:
    """Re-evaluate a certificate with scalar direct sums only.

    theta is the smallest |omega| sqrt(q) / N seen at the exact center
    and at random points of each rectangle.
    """
    params = WeylParams(cert.N, cert.k)
    N, k = cert.N, cert.k
    if not cert.intervals:
        return CertificateReport(0.0, 0.0, cert.l1_lower, 0.0, 0.0, True, float("nan"), 0)
    rng = np.random.default_rng(seed)
    rx, rt = _rectangle_radii(N, k)
    theta = math.inf
    center_err = 0.0
    any_complete = False
    for iv in cert.intervals:
        q, a, b = iv.q, iv.a, iv.b
        center = abs(eval_weyl_sum(params, PhasePoint.rational(Fraction(a, q), Fraction(b, q))))
        vals = [center]
        for _ in range(_VERIFY_RANDOM):
            dx, dt = rng.uniform(-rx, rx), rng.uniform(-rt, rt)
            vals.append(abs(eval_weyl_sum(params, PhasePoint(a / q + dx, b / q + dt))))
        theta = min(theta, min(vals) * math.sqrt(q) / N)
        if N % q == 0:
            any_complete = True
            expect = N / q * abs(eval_gauss_sum(k, b, a, q))
            center_err = max(center_err, abs(center - expect) / q)
    l1 = math.fsum(2 * iv.radius * _inf_sup_scalar(params, iv.center, iv.b / iv.q) for iv in cert.intervals)
    centers = sorted(iv.center for iv in cert.intervals)
    disjoint = all(b - a > 2 * rx for a, b in zip(centers, centers[1:]))
    rel = abs(l1 - cert.l1_lower) / abs(l1) if l1 else abs(cert.l1_lower)
    return CertificateReport(
        theta, l1, cert.l1_lower, rel, l1 / float(N) ** 0.75, disjoint,
        center_err if any_complete else float("nan"), len(cert.intervals),
    )


def trivial_lower_bound(N: int, k: int, p: float) -> float:
    """0.99 N (1e-6 / N)**(1/p), after checking |omega| >= 0.99 N near the origin.

    The check is the inf of |omega| over a 16 x 16 grid of
    [0, 1e-6/N] x [0, 1e-6/N**k].
    """
    params = WeylParams(N, k)
    if p < 1:
        raise InvalidInputError("p must be >= 1")
    xs = np.linspace(0.0, 1e-6 / N, 16)
    ts = np.linspace(0.0, 1e-6 / float(N) ** k, 16)
    X, T = np.meshgrid(xs, ts, indexing="ij")
    inf = float(np.abs(weyl_sum_batch(params, X.ravel(), T.ravel())).min())
    if inf < 0.99 * N:
        raise ArithmeticError(f"|omega| fell to {inf} near the origin")
    return 0.99 * N * (1e-6 / N) ** (1.0 / p)
