"""Floating spectral data of symmetric matrices, with exact nullity checks."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotSymmetric
from .ff_linalg import rank_exact_rational


@dataclass(frozen=True)
class SpectralExtent:
    sigma_max: float
    sigma_min_pos: float  # smallest nonzero singular value; 0.0 if the matrix is zero
    nullity: int

    @property
    def kappa(self) -> float:
        if self.sigma_min_pos == 0.0:
            return 1.0
        return self.sigma_max / self.sigma_min_pos


def spectral_extent(A) -> SpectralExtent:
    """Largest and smallest nonzero singular value of a symmetric matrix.

    For integer input the number of zero eigenvalues is taken from the exact
    rank over Q rather than from a floating threshold.
    """
    A = np.asarray(A)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or not np.array_equal(A, A.T):
        raise NotSymmetric(f"matrix of shape {A.shape} is not symmetric")
    n = A.shape[0]
    if n == 0:
        return SpectralExtent(0.0, 0.0, 0)
    sv = np.sort(np.abs(np.linalg.eigvalsh(A.astype(float))))
    if np.issubdtype(A.dtype, np.integer):
        nullity = n - rank_exact_rational(A)
    else:
        tol = n * np.finfo(float).eps * (sv[-1] if sv[-1] > 0 else 1.0)
        nullity = int(np.count_nonzero(sv <= tol))
    if nullity == n:
        return SpectralExtent(0.0, 0.0, n)
    return SpectralExtent(float(sv[-1]), float(sv[nullity]), nullity)


def condition_number(A) -> float:
    """sigma_max / smallest nonzero sigma; 1 for the zero matrix."""
    return spectral_extent(A).kappa
