"""Classical emulation of the block-encoding torsion pipeline.

The quantum subroutines are replaced by exact linear algebra plus a bounded
additive error on every estimated overlap:

1. Build Delta_r (for p = 2 from the 0/1 incidence matrices) and record the
   block-encoding normalization: 2 ||B_r||_F^2 ||B_{r+1}||_F^2 in the
   non-oracle model, 2 N (r+1)(r+2) in the oracle model.
2. Remove the normalization: the emulated unitary block-encodes
   Delta_r / (kappa * lambda_min), i.e. Delta_r / sigma_max, so its spectrum
   lies in [1/kappa, 1] off the kernel.
3. Sample u_i, v_j uniformly over F_p (balanced residues).
4. Estimate each overlap u_i^T Delta v_j / (|u_i| |v_j| sigma_max) up to an
   additive error eps.
5. Rescale, round to the nearest integer, reduce mod p, and take the rank of
   the resulting s x t matrix.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .complex_core import SimplicialComplex, boundary_matrix, incidence_matrix, laplacian
from .errors import AmbiguousRounding, DimensionOutOfRange, NoiseBudgetExceeded, ZeroVector
from .ff_linalg import FpMatrix, FpScalar, check_prime, rank_ff
from .rank_sketch import (
    ROLE_NOISE,
    ROLE_U,
    ROLE_V,
    RankEstimate,
    SketchParams,
    adaptive_rank,
    fp_sketch_vectors,
    stream,
)
from .spectral import condition_number, spectral_extent

__all__ = [
    "EmulatorConfig",
    "PipelineTrace",
    "condition_number",
    "emulate_detection",
    "noisy_overlap",
    "recover_entry",
]

NOISE_MODELS = ("none", "uniform", "gaussian_clipped")
DEFAULT_MARGIN = 0.45


@dataclass(frozen=True)
class EmulatorConfig:
    """``overlap_eps`` None picks 0.45 / (scale * max|u| * max|v|), inside the
    rounding budget; ``epsilon_prime`` is the largest recovered-entry error
    the run accepts as within budget."""

    epsilon_prime: float = 0.49
    noise_model: str = "none"
    normalization_mode: str = "non_oracle"
    seed: int = 0
    overlap_eps: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.epsilon_prime < 0.5:
            raise ValueError("epsilon_prime must lie in [0, 0.5)")
        if self.noise_model == "gaussian":
            object.__setattr__(self, "noise_model", "gaussian_clipped")
        if self.noise_model not in NOISE_MODELS:
            raise ValueError(f"unknown noise model {self.noise_model!r}")
        if self.normalization_mode not in ("non_oracle", "oracle"):
            raise ValueError(f"unknown normalization mode {self.normalization_mode!r}")
        if self.overlap_eps is not None and self.overlap_eps < 0:
            raise ValueError("overlap_eps must be non-negative")


@dataclass
class PipelineTrace:
    order: int
    p: int
    seed: int
    frobenius_norms: tuple[float, float]
    normalization_mode: str
    normalization_factor: float
    normalized_norm: float  # sigma_max / normalization_factor, must be <= 1
    kappa: float
    sigma_min_pos: float
    scale: float  # sigma_max = kappa * sigma_min_pos, the divisor actually applied
    noise_model: str
    eps: float
    recovered_error_bound: float  # eps * scale * max|u| * max|v|
    within_budget: bool
    s: int
    t: int
    overlaps: np.ndarray
    recovered: FpMatrix
    norms_u: np.ndarray
    norms_v: np.ndarray
    zero_vectors: int
    rank: int
    extra: dict = field(default_factory=dict)

    @property
    def C(self) -> float:
        """Largest single probe norm max_{i,j}{|u_i|, |v_j|}."""
        return float(max(self.norms_u.max(initial=0.0), self.norms_v.max(initial=0.0)))

    @property
    def C_product(self) -> float:
        """max_i |u_i| * max_j |v_j|."""
        return float(self.norms_u.max(initial=0.0) * self.norms_v.max(initial=0.0))

    def to_dict(self, include_matrices: bool = False) -> dict:
        out = {
            "order": self.order,
            "p": self.p,
            "seed": self.seed,
            "s": self.s,
            "t": self.t,
            "rank": self.rank,
            "norms": {
                "frobenius_r": self.frobenius_norms[0],
                "frobenius_r_plus_1": self.frobenius_norms[1],
                "u": self.norms_u.tolist(),
                "v": self.norms_v.tolist(),
            },
            "kappa": self.kappa,
            "sigma_min_pos": self.sigma_min_pos,
            "scale": self.scale,
            "factor": self.normalization_factor,
            "normalization_mode": self.normalization_mode,
            "normalized_norm": self.normalized_norm,
            "C": self.C,
            "C_product": self.C_product,
            "noise_model": self.noise_model,
            "eps": self.eps,
            "recovered_error_bound": self.recovered_error_bound,
            "within_budget": self.within_budget,
            "zero_vectors": self.zero_vectors,
            **self.extra,
        }
        if include_matrices:
            out["overlaps"] = self.overlaps.tolist()
            out["recovered"] = self.recovered.data.tolist()
        return out


def _noise_row(model: str, eps: float, t: int, rng: np.random.Generator) -> np.ndarray:
    """Noise for one row of overlaps; entry j does not depend on t."""
    if model == "uniform":
        return rng.uniform(-eps, eps, size=t)
    return np.clip(rng.normal(0.0, eps / 3.0, size=t), -eps, eps)


def noisy_overlap(Delta, u, v, scale: float, eps: float, rng=None, noise_model: str = "uniform") -> float:
    """u^T Delta v / (|u| |v| scale) plus additive noise bounded by ``eps``."""
    u = np.asarray(getattr(u, "data", u), dtype=np.int64)
    v = np.asarray(getattr(v, "data", v), dtype=np.int64)
    nu, nv = math.sqrt(int(u @ u)), math.sqrt(int(v @ v))
    if nu == 0.0 or nv == 0.0:
        raise ZeroVector("overlap with a zero vector is undefined")
    exact = int(u @ (np.asarray(Delta, dtype=np.int64) @ v)) / (nu * nv * scale)
    if noise_model == "none" or eps == 0.0:
        return exact
    if rng is None:
        raise ValueError("a noisy overlap needs a random stream")
    return exact + float(_noise_row(noise_model, eps, 1, rng)[0])


def recover_entry(overlap: float, norm_u: float, norm_v: float, scale: float, p: int) -> FpScalar:
    """Undo the normalization, round to the nearest integer, reduce mod p."""
    x = overlap * norm_u * norm_v * scale
    frac = x - math.floor(x)
    if abs(frac - 0.5) < 1e-9:
        raise AmbiguousRounding(f"rescaled overlap {x!r} is a half-integer")
    return FpScalar(math.floor(x + 0.5), p)


def _operator(K: SimplicialComplex, r: int, p: int):
    """Laplacian and the Frobenius norms of the two maps that build it.

    Over F_2 the boundary maps are their 0/1 incidence matrices.  A missing
    map (r = 0 or r = dim K) contributes norm 1 to the normalization.
    """
    face = incidence_matrix if p == 2 else boundary_matrix
    fro_r = math.sqrt(float(np.sum(face(K, r) ** 2))) if r >= 1 else 1.0
    fro_up = math.sqrt(float(np.sum(face(K, r + 1) ** 2))) if r < K.dim else 1.0
    return laplacian(K, r, signed=(p != 2)), (fro_r, fro_up)


def emulate_detection(K: SimplicialComplex, r: int, p: int, params: SketchParams, cfg: EmulatorConfig):
    """Run the emulated pipeline; returns (RankEstimate of Delta_r mod p, trace)."""
    if not 0 <= r <= K.dim:
        raise DimensionOutOfRange(f"order {r} outside 0..{K.dim}")
    check_prime(p)
    if params.p != p:
        raise ValueError(f"params are for p={params.p}, pipeline runs at p={p}")
    Delta, fro = _operator(K, r, p)
    n = Delta.shape[0]
    if cfg.normalization_mode == "oracle":
        factor = 2.0 * K.n_vertices * (r + 1) * (r + 2)
    else:
        factor = 2.0 * fro[0] ** 2 * fro[1] ** 2
    ext = spectral_extent(Delta)
    scale = ext.sigma_max if ext.sigma_max > 0 else 1.0
    seed = params.seed

    def run(s: int, t: int):
        U = fp_sketch_vectors(s, n, p, seed, ROLE_U)
        V = fp_sketch_vectors(t, n, p, seed, ROLE_V)
        nu = np.sqrt((U * U).sum(axis=1).astype(float))
        nv = np.sqrt((V * V).sum(axis=1).astype(float))
        exact = U @ Delta @ V.T
        max_u, max_v = nu.max(initial=0.0), nv.max(initial=0.0)
        if cfg.overlap_eps is not None:
            eps = cfg.overlap_eps
        elif cfg.noise_model == "none" or max_u * max_v == 0:
            eps = 0.0
        else:
            eps = float(DEFAULT_MARGIN / (scale * max_u * max_v))
        live = np.outer(nu > 0, nv > 0)  # a zero probe is known classically; its row/column stays 0
        denom = np.where(live, np.outer(nu, nv) * scale, 1.0)
        overlaps = np.where(live, exact / denom, 0.0)
        if cfg.noise_model != "none" and eps > 0:
            for i in range(s):
                overlaps[i] += _noise_row(cfg.noise_model, eps, t, stream(seed, ROLE_NOISE, i))
            overlaps[~live] = 0.0
        x = overlaps * denom
        ties = np.argwhere(live & (np.abs(x - np.floor(x) - 0.5) < 1e-9))
        if len(ties):
            i, j = ties[0]
            raise NoiseBudgetExceeded(f"entry ({i}, {j}): rescaled overlap {x[i, j]!r} is a half-integer")
        recovered = np.where(live, np.floor(x + 0.5), 0).astype(np.int64)
        M = FpMatrix(recovered, p)
        zeros = int(np.count_nonzero(nu == 0.0) + np.count_nonzero(nv == 0.0))
        return M, overlaps, nu, nv, eps, zeros

    cache: dict[int, tuple] = {}

    def rank_at(k: int) -> int:
        cache[k] = run(k, k)
        return rank_ff(cache[k][0])

    if params.adaptive:
        rank, k, bound = adaptive_rank(rank_at, n, p, params.delta)
        s = t = k
        result = cache[k]
        extra = {"adaptive": True, "rank_bound": bound}
    else:
        s, t = params.s, params.t
        result = run(s, t)
        rank = rank_ff(result[0])
        extra = {"adaptive": False}
    M, overlaps, nu, nv, eps, zeros = result
    bound_err = float(eps * scale * nu.max(initial=0.0) * nv.max(initial=0.0))
    trace = PipelineTrace(
        order=r,
        p=p,
        seed=seed,
        frobenius_norms=fro,
        normalization_mode=cfg.normalization_mode,
        normalization_factor=factor,
        normalized_norm=ext.sigma_max / factor,
        kappa=ext.kappa,
        sigma_min_pos=ext.sigma_min_pos,
        scale=scale,
        noise_model=cfg.noise_model,
        eps=eps,
        recovered_error_bound=bound_err,
        within_budget=bound_err <= cfg.epsilon_prime,
        s=s,
        t=t,
        overlaps=overlaps,
        recovered=M,
        norms_u=nu,
        norms_v=nv,
        zero_vectors=zeros,
        rank=rank,
        extra=extra,
    )
    estimate = RankEstimate(
        value=rank,
        method="emulate",
        params={
            "s": s, "t": t, "delta": params.delta, "seed": seed,
            "noise": cfg.noise_model, "eps": eps, **extra,
        },
        prime=p,
    )
    return estimate, trace
