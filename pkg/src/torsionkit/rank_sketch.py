"""Randomized rank estimation.

Two estimators:

* ``sketch_rank_ff`` -- over F_p, the rank of the small s x t sketch U A V.
* ``stochastic_rank_real`` -- over R, a Hutchinson-style trace of a damped
  Chebyshev approximation to the indicator of the nonzero spectrum.

All randomness comes from counter-based streams keyed by (seed, role, index),
so u_i, v_j and probe i are the same vectors whatever the sketch size, and
growing s or t only appends rows or columns to the sketch.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .errors import InvalidThreshold, NormTooLarge, NotSymmetric
from .ff_linalg import FpMatrix, FpVector, check_prime, matmul_mod, rank_ff
from .spectral import spectral_extent

# Stream roles.
ROLE_U, ROLE_V, ROLE_NOISE, ROLE_PROBE, ROLE_SIGNS, ROLE_NORM = range(6)

_SEED_MASK = (1 << 64) - 1


def stream(seed: int, *key: int) -> np.random.Generator:
    """Independent generator for the counter ``key`` under a 64-bit seed."""
    ss = np.random.SeedSequence(int(seed) & _SEED_MASK, spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.PCG64(ss))


def sample_fp_block(shape, p: int, rng: np.random.Generator) -> np.ndarray:
    """I.i.d. uniform residues, balanced representation."""
    raw = rng.integers(0, p, size=shape, dtype=np.int64)
    return raw if p == 2 else raw - (p - 1) // 2


def sample_fp_vector(n: int, p: int, rng: np.random.Generator) -> FpVector:
    check_prime(p)
    if n < 1:
        raise ValueError("vector length must be positive")
    return FpMatrix(sample_fp_block(n, p, rng), p)


@dataclass(frozen=True)
class SketchParams:
    """Sketch sizes; ``s`` / ``t`` left as None select the adaptive sizing."""

    p: int
    s: int | None = None
    t: int | None = None
    delta: float = 0.05
    seed: int = 0

    def __post_init__(self):
        check_prime(self.p)
        for name in ("s", "t"):
            v = getattr(self, name)
            if v is not None and v < 1:
                raise ValueError(f"{name} must be >= 1")
        if not 0.0 < self.delta < 1.0:
            raise ValueError("delta must lie in (0, 1)")

    @property
    def adaptive(self) -> bool:
        return self.s is None or self.t is None


@dataclass(frozen=True)
class RankEstimate:
    value: float
    method: str
    params: dict = field(default_factory=dict)
    prime: int | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def safety_margin(p: int, delta: float) -> int:
    """ceil(log_p(1/delta)) + 1 extra rows and columns beyond the rank bound."""
    return max(0, math.ceil(math.log(1.0 / delta) / math.log(p) - 1e-12)) + 1


def adaptive_rank(rank_at: Callable[[int], int], cap: int, p: int, delta: float):
    """Grow a rank bound until a sketch of size ``bound + margin`` leaves slack.

    ``rank_at(k)`` must return the rank of a k x k sketch.  The bound starts
    at 1 and doubles (or jumps to the observed rank) while the sketch rank
    exceeds it.  Returns ``(rank, k, bound)``.
    """
    margin = safety_margin(p, delta)
    if cap == 0:
        return 0, 0, 0
    bound = 1
    while True:
        k = min(bound, cap) + margin
        r = rank_at(k)
        if r <= bound or bound >= cap:
            return r, k, bound
        bound = min(max(2 * bound, r), cap)


def fp_sketch_vectors(count: int, n: int, p: int, seed: int, role: int) -> np.ndarray:
    """``count`` vectors of length n as rows, vector i drawn from stream (seed, role, i)."""
    out = np.empty((count, n), dtype=np.int64)
    for i in range(count):
        out[i] = sample_fp_block(n, p, stream(seed, role, i))
    return out


def sketch_matrix(A: FpMatrix, s: int, t: int, seed: int) -> FpMatrix:
    """M = U A V over F_p with U (s x rows) and V (cols x t)."""
    p = A.p
    m, n = A.shape
    U = fp_sketch_vectors(s, m, p, seed, ROLE_U)
    V = fp_sketch_vectors(t, n, p, seed, ROLE_V).T
    return FpMatrix(matmul_mod(matmul_mod(U, A.canonical(), p), V, p), p)


def sketch_rank_ff(A: FpMatrix, params: SketchParams) -> RankEstimate:
    """Rank of A over F_p estimated as rank(U A V); never exceeds the true rank."""
    if A.p != params.p:
        raise ValueError(f"matrix is over F_{A.p}, params ask for F_{params.p}")
    m, n = A.shape
    if params.adaptive:
        r, k, bound = adaptive_rank(
            lambda k: rank_ff(sketch_matrix(A, k, k, params.seed)),
            min(m, n), params.p, params.delta,
        )
        s = t = k
        extra = {"rank_bound": bound, "adaptive": True}
    else:
        s, t = params.s, params.t
        r = rank_ff(sketch_matrix(A, s, t, params.seed))
        extra = {"adaptive": False}
    return RankEstimate(
        value=r,
        method="sketch",
        params={"s": s, "t": t, "delta": params.delta, "seed": params.seed, **extra},
        prime=params.p,
    )


# ---------------------------------------------------------------------------
# Stochastic Chebyshev estimation over R


@dataclass(frozen=True)
class ChebParams:
    s: int = 100
    m: int = 64
    theta: float | None = None  # None: half the smallest nonzero |eigenvalue|
    seed: int = 0
    probes: str = "hadamard"  # or "rademacher"
    first_probe: int = 0

    def __post_init__(self):
        if self.s < 1 or self.m < 0:
            raise ValueError("need s >= 1 and m >= 0")
        if self.theta is not None and not 0.0 < self.theta < 1.0:
            raise InvalidThreshold(f"theta={self.theta} not in (0, 1)")
        if self.probes not in ("hadamard", "rademacher"):
            raise ValueError(f"unknown probe mode {self.probes!r}")


def jackson_damping(m: int) -> np.ndarray:
    """Jackson kernel multipliers g_0..g_m."""
    a = math.pi / (m + 2)
    j = np.arange(m + 1)
    return ((1 - j / (m + 2)) * math.sin(a) * np.cos(j * a) + math.cos(a) * np.sin(j * a) / (m + 2)) / math.sin(a)


def chebyshev_step_coeffs(m: int, theta: float, damping: bool = True) -> np.ndarray:
    """Chebyshev coefficients of the indicator of ``|x| >= theta`` on [-1, 1].

    For a symmetric matrix with spectrum in [-1, 1] and no eigenvalue in
    (0, theta), the trace of this function of the matrix is its rank.
    """
    if not 0.0 < theta < 1.0:
        raise InvalidThreshold(f"theta={theta} not in (0, 1)")
    a = math.acos(theta)
    j = np.arange(1, m + 1)
    c = np.empty(m + 1)
    c[0] = 2 * a / math.pi
    c[1:] = np.where(j % 2 == 0, 4 * np.sin(j * a) / (math.pi * j), 0.0)
    if damping:
        c *= jackson_damping(m)
    return c


def chebyshev_eval(c: np.ndarray, x) -> np.ndarray:
    return np.polynomial.chebyshev.chebval(np.asarray(x, dtype=float), c)


def _hadamard_column(n: int, col: int) -> np.ndarray:
    k = np.arange(n)
    parity = np.array([bin(v).count("1") & 1 for v in (k & col)])
    return 1 - 2 * parity


def probe_block(n: int, params: ChebParams) -> np.ndarray:
    """n x s matrix of +-1 probes for indices first_probe .. first_probe+s-1.

    Hadamard mode uses sign-flipped columns D h_c of the Sylvester matrix
    with one random diagonal D per seed; n must be a power of two.
    """
    idx = range(params.first_probe, params.first_probe + params.s)
    Z = np.empty((n, params.s))
    if params.probes == "rademacher":
        for col, i in enumerate(idx):
            Z[:, col] = 1 - 2 * stream(params.seed, ROLE_PROBE, i).integers(0, 2, n)
        return Z
    if n & (n - 1):
        raise ValueError("hadamard probes need a power-of-two dimension")
    signs = 1 - 2 * stream(params.seed, ROLE_SIGNS).integers(0, 2, n)
    for col, i in enumerate(idx):
        c = int(stream(params.seed, ROLE_PROBE, i).integers(0, n))
        Z[:, col] = signs * _hadamard_column(n, c)
    return Z


def probe_values(A: np.ndarray, c: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Per-probe sums  sum_j c_j z^T T_j(A) z  via the three-term recurrence."""
    prev = Z
    vals = c[0] * np.einsum("ij,ij->j", Z, Z)
    if len(c) == 1:
        return vals
    cur = A @ Z
    vals = vals + c[1] * np.einsum("ij,ij->j", Z, cur)
    for cj in c[2:]:
        prev, cur = cur, 2 * (A @ cur) - prev
        vals = vals + cj * np.einsum("ij,ij->j", Z, cur)
    return vals


def stochastic_rank_real(A, params: ChebParams) -> RankEstimate:
    """Rank of a symmetric real matrix with ||A|| <= 1."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != A.shape[1] or not np.allclose(A, A.T, atol=1e-12):
        raise NotSymmetric("stochastic rank needs a symmetric matrix")
    ext = spectral_extent(A)
    if ext.sigma_max > 1.0 + 1e-9:
        raise NormTooLarge(f"||A|| = {ext.sigma_max:.6g} > 1")
    theta = params.theta
    if theta is None:
        theta = 0.5 * ext.sigma_min_pos if ext.sigma_min_pos > 0 else 0.5
    n = A.shape[0]
    if params.probes == "hadamard" and n & (n - 1):
        size = 1 << max(0, (n - 1).bit_length())
        padded = np.zeros((size, size))
        padded[:n, :n] = A
        A = padded
    c = chebyshev_step_coeffs(params.m, theta)
    vals = probe_values(A, c, probe_block(A.shape[0], params))
    value = math.fsum(vals.tolist()) / params.s
    return RankEstimate(
        value=value,
        method="stochastic",
        params={
            "s": params.s, "m": params.m, "theta": theta, "seed": params.seed,
            "probes": params.probes, "first_probe": params.first_probe, "n": n,
        },
    )
