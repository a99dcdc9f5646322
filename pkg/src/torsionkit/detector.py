"""Field sweep and torsion verdicts.

H_r over F_p has dimension beta_r + t_r + t_{r-1}, where t_k counts the
cyclic summands of H_k(Z) whose order is divisible by p.  Comparing the F_p
dimension with the real one therefore exposes p-torsion in degrees r and r-1.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field

from .complex_core import SimplicialComplex, boundary_matrix, laplacian
from .emulator import EmulatorConfig, emulate_detection
from .errors import DimensionOutOfRange
from .ff_linalg import check_prime, homology_over_Z, mod_reduce, rank_exact_rational, rank_ff
from .rank_sketch import SketchParams, sketch_rank_ff

METHODS = ("exact", "sketch", "emulate")
DEFAULT_PRIMES = (2, 3, 5, 7)
# Failure target for a whole report; split evenly over its sketches.
REPORT_DELTA = 1e-3


def _check(K: SimplicialComplex, r: int) -> None:
    if not 0 <= r <= K.dim:
        raise DimensionOutOfRange(f"order {r} outside 0..{K.dim}")


def _boundary_ranks(K: SimplicialComplex, r: int, rank) -> tuple[int, int]:
    down = rank(boundary_matrix(K, r)) if r >= 1 else 0
    up = rank(boundary_matrix(K, r + 1)) if r < K.dim else 0
    return down, up


def dim_homology(K: SimplicialComplex, r: int, p: int | None = None) -> int:
    """dim H_r over R (``p=None``) or F_p, as |S_r| - rank B_r - rank B_{r+1}."""
    _check(K, r)
    if p is None:
        down, up = _boundary_ranks(K, r, rank_exact_rational)
    else:
        check_prime(p)
        down, up = _boundary_ranks(K, r, lambda B: rank_ff(mod_reduce(B, p)))
    return K.count(r) - down - up


def dim_homology_laplacian(K: SimplicialComplex, r: int, p: int | None = None) -> int:
    """Nullity of Delta_r over R or F_p.

    Over R this always equals beta_r.  Over F_p it can exceed dim H_r(F_p),
    since the standard bilinear form is degenerate there.
    """
    _check(K, r)
    L = laplacian(K, r)
    if p is None:
        return K.count(r) - rank_exact_rational(L)
    return K.count(r) - rank_ff(mod_reduce(L, check_prime(p)))


@dataclass(frozen=True)
class UctCheck:
    holds: bool
    p: int
    order: int
    dim_Fp: int
    betti: int
    t_r: int
    t_prev: int
    torsion_r: tuple[int, ...]
    torsion_prev: tuple[int, ...]


def verify_uct(K: SimplicialComplex, r: int, p: int) -> UctCheck:
    """Check dim H_r(F_p) = beta_r + t_r + t_{r-1} against the Smith-form oracle."""
    check_prime(p)
    betti, tors = homology_over_Z(K, r)
    tors_prev = homology_over_Z(K, r - 1)[1] if r >= 1 else []
    t_r = sum(1 for d in tors if d % p == 0)
    t_prev = sum(1 for d in tors_prev if d % p == 0)
    dim = dim_homology(K, r, p)
    return UctCheck(
        holds=dim == betti + t_r + t_prev,
        p=p,
        order=r,
        dim_Fp=dim,
        betti=betti,
        t_r=t_r,
        t_prev=t_prev,
        torsion_r=tuple(tors),
        torsion_prev=tuple(tors_prev),
    )


@dataclass
class PrimeEntry:
    p: int
    dim_Fp: int
    method: str
    seed: int | None
    params: dict = field(default_factory=dict)
    rank_nullity: int = 0  # exact dim H_r(F_p), the reference
    laplacian_nullity: int = 0  # exact nullity of Delta_r mod p

    @property
    def agrees(self) -> bool:
        return self.dim_Fp == self.rank_nullity

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["agrees_with_rank_nullity"] = self.agrees
        d["laplacian_agrees"] = self.laplacian_nullity == self.rank_nullity
        return d


@dataclass
class TorsionReport:
    order: int
    dim_R: int
    method: str
    entries: list[PrimeEntry]
    oracle: dict | None = None

    @property
    def torsion_primes(self) -> list[int]:
        return sorted(e.p for e in self.entries if e.dim_Fp > self.dim_R)

    @property
    def torsion_detected(self) -> bool:
        return bool(self.torsion_primes)

    @property
    def verdict(self) -> str:
        return "torsion_detected" if self.torsion_detected else "no_torsion_detected"

    @property
    def orders_implicated(self) -> list[int]:
        """The F_p excess cannot tell t_r from t_{r-1}; both orders are named."""
        if not self.torsion_detected:
            return []
        return [self.order, self.order - 1] if self.order >= 1 else [self.order]

    def to_dict(self) -> dict:
        return {
            "order": self.order,
            "dim_R": self.dim_R,
            "dim_R_method": "exact_rational",
            "method": self.method,
            "primes": [e.to_dict() for e in sorted(self.entries, key=lambda e: e.p)],
            "verdict": self.verdict,
            "torsion_primes": self.torsion_primes,
            "orders_implicated": self.orders_implicated,
            "oracle": self.oracle,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    def to_table(self) -> str:
        lines = [
            f"order r = {self.order}   dim H_r(R) = {self.dim_R}   method = {self.method}",
            f"{'p':>4} {'dim H_r(F_p)':>13} {'rank-nullity':>13} {'lap. nullity':>13}  note",
        ]
        for e in sorted(self.entries, key=lambda e: e.p):
            notes = []
            if e.dim_Fp > self.dim_R:
                notes.append("excess")
            if not e.agrees:
                notes.append("method differs from rank-nullity")
            if e.laplacian_nullity != e.rank_nullity:
                notes.append("Laplacian kernel differs mod p")
            lines.append(
                f"{e.p:>4} {e.dim_Fp:>13} {e.rank_nullity:>13} {e.laplacian_nullity:>13}  {', '.join(notes)}"
            )
        verdict = self.verdict
        if self.torsion_detected:
            verdict += f" at p in {self.torsion_primes}, orders {self.orders_implicated}"
        lines.append(f"verdict: {verdict}")
        if self.oracle:
            for key, val in self.oracle.items():
                lines.append(f"oracle {key}: betti={val['betti']} torsion={val['torsion']}")
        return "\n".join(lines)


def _oracle(K: SimplicialComplex, r: int) -> dict:
    out = {}
    for k in (r - 1, r):
        if k >= 0:
            betti, tors = homology_over_Z(K, k)
            out[f"H_{k}"] = {"betti": betti, "torsion": tors}
    return out


def detect_torsion(
    K: SimplicialComplex,
    r: int,
    primes=DEFAULT_PRIMES,
    method: str = "exact",
    params: SketchParams | None = None,
    cfg: EmulatorConfig | None = None,
    with_oracle: bool = True,
) -> TorsionReport:
    """Compare dim H_r over R with dim H_r over each F_p.

    ``exact``: rank-nullity with exact elimination.  ``sketch``: the same
    formula with both boundary ranks from the F_p sketch.  ``emulate``: the
    nullity of Delta_r mod p from the emulated pipeline.  ``params`` supplies
    s, t, delta and seed; its prime is replaced per sweep cell.  For the
    sketch method ``delta`` bounds the failure probability of the whole
    report: each of its boundary sketches runs at delta / (number of sketches).
    """
    _check(K, r)
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
    primes = sorted({check_prime(p) for p in primes})
    if not primes:
        raise ValueError("at least one prime is required")
    template = params or SketchParams(p=2, delta=REPORT_DELTA)
    cfg = cfg or EmulatorConfig()
    n = K.count(r)
    maps = [k for k in (r, r + 1) if 1 <= k <= K.dim]
    per_sketch = template.delta / max(1, len(maps) * len(primes))
    entries = []
    for p in primes:
        reference = dim_homology(K, r, p)
        lap = dim_homology_laplacian(K, r, p)
        if method == "exact":
            entries.append(PrimeEntry(p, reference, method, None, {}, reference, lap))
            continue
        sp = dataclasses.replace(template, p=p)
        if method == "sketch":
            sp_k = dataclasses.replace(sp, delta=per_sketch)
            ranks = {k: sketch_rank_ff(mod_reduce(boundary_matrix(K, k), p), sp_k) for k in maps}
            dim = n - sum(int(est.value) for est in ranks.values())
            info = {
                "report_delta": template.delta,
                "rank_boundary_r": ranks[r].to_dict() if r in ranks else None,
                "rank_boundary_r_plus_1": ranks[r + 1].to_dict() if r + 1 in ranks else None,
            }
        else:
            est, trace = emulate_detection(K, r, p, sp, cfg)
            dim = n - int(est.value)
            info = {"rank_laplacian": est.to_dict(), "trace": trace.to_dict()}
        entries.append(PrimeEntry(p, dim, method, sp.seed, info, reference, lap))
    return TorsionReport(
        order=r,
        dim_R=dim_homology(K, r),
        method=method,
        entries=entries,
        oracle=_oracle(K, r) if with_oracle else None,
    )


def scan_orders(K: SimplicialComplex, primes=DEFAULT_PRIMES, method: str = "exact", **kwargs) -> list[TorsionReport]:
    """detect_torsion at every order 0..dim K."""
    return [detect_torsion(K, r, primes, method, **kwargs) for r in range(K.dim + 1)]
