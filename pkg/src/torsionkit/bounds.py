"""Tail bounds for the norm of a uniformly random F_p vector, with Monte Carlo checks.

With x uniform over balanced residues, Z_i = x_i^2 has mean (p^2-1)/12 and
variance p^4/180 - p^2/36 + 1/45, and |Z_i - E Z_i| <= ((p-1)/2)^2, so the
third absolute central moment is at most ((p-1)/2)^6.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .errors import EvenPrimeUnsupported, OutsideValidityRegion
from .ff_linalg import check_prime
from .rank_sketch import ROLE_NORM, sample_fp_block, stream

BERRY_ESSEEN_C = 0.56
_BATCH = 8192


@dataclass(frozen=True)
class NormMoments:
    N: int
    p: int
    mean: float
    variance: float
    coord_variance: float
    rho_bound: float


def _check(N: int, p: int) -> None:
    check_prime(p)
    if p == 2:
        raise EvenPrimeUnsupported("the balanced-residue moments need an odd prime")
    if N < 1:
        raise ValueError("N must be >= 1")


def norm_sq_moments(N: int, p: int) -> NormMoments:
    """Mean and variance of ||x||^2 for x uniform in F_p^N."""
    _check(N, p)
    var1 = p**4 / 180 - p**2 / 36 + 1 / 45
    return NormMoments(
        N=N,
        p=p,
        mean=N * (p * p - 1) / 12,
        variance=N * var1,
        coord_variance=var1,
        rho_bound=((p - 1) / 2) ** 6,
    )


def normal_cdf(x: float) -> float:
    return 0.5 * math.erfc(-x / math.sqrt(2.0))


def cantelli_bound(N: int, p: int, S: float) -> float:
    """Lower bound on Pr(||x|| <= S) from the one-sided Chebyshev inequality."""
    m = norm_sq_moments(N, p)
    gap = S * S - m.mean
    if gap < 0:
        raise OutsideValidityRegion(f"S^2 = {S * S:.6g} below the mean {m.mean:.6g}")
    return 1.0 - m.variance / (m.variance + gap * gap)


def berry_esseen_bound(N: int, p: int, S: float) -> float:
    """Normal approximation to Pr(||x|| <= S) minus the Berry-Esseen error term."""
    m = norm_sq_moments(N, p)
    z = (S * S - m.mean) / math.sqrt(m.variance)
    corr = BERRY_ESSEEN_C * m.rho_bound / (m.coord_variance**1.5 * math.sqrt(N))
    return min(1.0, max(-1.0, normal_cdf(z) - corr))


def combined_bound(N: int, p: int, S: float) -> float:
    """max of both bounds, with Cantelli taken as 0 below its validity region."""
    try:
        c = cantelli_bound(N, p, S)
    except OutsideValidityRegion:
        c = 0.0
    return max(c, berry_esseen_bound(N, p, S))


def sample_norms_sq(N: int, p: int, trials: int, seed: int) -> np.ndarray:
    """||x||^2 for ``trials`` vectors; batch b comes from stream (seed, ROLE_NORM, b)."""
    check_prime(p)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    out = np.empty(trials, dtype=np.int64)
    for b, start in enumerate(range(0, trials, _BATCH)):
        k = min(_BATCH, trials - start)
        x = sample_fp_block((k, N), p, stream(seed, ROLE_NORM, b))
        out[start : start + k] = (x * x).sum(axis=1)
    return out


def monte_carlo_norm_prob(N: int, p: int, S: float, trials: int, seed: int) -> float:
    """Fraction of sampled x with ||x|| <= S."""
    sq = sample_norms_sq(N, p, trials, seed)
    return float(np.count_nonzero(sq <= S * S * (1 + 1e-12))) / trials


@dataclass(frozen=True)
class BoundRow:
    N: int
    p: int
    S: float
    cantelli: float | None  # None below the validity region
    berry_esseen: float
    empirical: float
    trials: int
    seed: int

    @property
    def stderr(self) -> float:
        q = self.empirical
        return math.sqrt(max(q * (1 - q), 1e-300) / self.trials)

    @property
    def dominated(self) -> bool:
        """Empirical CDF >= max bound, up to three binomial standard errors."""
        best = max(self.cantelli or 0.0, self.berry_esseen)
        return self.empirical >= best - 3 * self.stderr


QUANTILES = tuple(round(0.1 * k, 1) for k in range(1, 10))


def bound_sweep(Ns=(8, 32, 128), primes=(3, 5, 7), trials: int = 100_000, seed: int = 0, quantiles=QUANTILES):
    """Bounds against the empirical CDF on a grid of S at empirical norm quantiles."""
    rows = []
    for N in Ns:
        for p in primes:
            sq = np.sort(sample_norms_sq(N, p, trials, seed))
            for q in quantiles:
                s2 = int(sq[min(trials - 1, int(q * trials))])
                S = math.sqrt(s2)
                empirical = float(np.searchsorted(sq, s2, side="right")) / trials
                try:
                    cant = cantelli_bound(N, p, S)
                except OutsideValidityRegion:
                    cant = None
                rows.append(BoundRow(N, p, S, cant, berry_esseen_bound(N, p, S), empirical, trials, seed))
    return rows


CSV_FIELDS = ("N", "p", "S", "cantelli", "berry_esseen", "empirical", "trials", "seed")


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_FIELDS)
    for r in rows:
        cant = "" if r.cantelli is None else repr(r.cantelli)
        w.writerow([r.N, r.p, repr(r.S), cant, repr(r.berry_esseen), repr(r.empirical), r.trials, r.seed])
    return buf.getvalue()
