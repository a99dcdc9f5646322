"""Exact linear algebra over F_p, Q and Z.

Everything that feeds a torsion verdict is exact: F_p elimination runs on
int64 residues (products stay below p^2), and all Q / Z work uses Python
integers so Smith-form intermediates can grow without overflow.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .complex_core import SimplicialComplex, boundary_matrix
from .errors import DimensionOutOfRange, NotPrime

# Above this modulus int64 products of residues may overflow.
_INT64_SAFE_P = 3_000_000_000


def is_prime(n: int) -> bool:
    n = int(n)
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    return all(n % k for k in range(3, math.isqrt(n) + 1, 2))


def check_prime(p: int) -> int:
    if not is_prime(p):
        raise NotPrime(f"{p} is not prime")
    return int(p)


def balanced(x, p: int):
    """Canonical residue: {-(p-1)/2 .. (p-1)/2} for odd p, {0, 1} for p = 2."""
    if p == 2:
        return np.mod(x, 2) if isinstance(x, np.ndarray) else int(x) % 2
    h = (p - 1) // 2
    if isinstance(x, np.ndarray):
        return np.mod(x + h, p) - h
    return (int(x) + h) % p - h


@dataclass(frozen=True)
class FpScalar:
    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", balanced(self.value, self.p))

    def __int__(self) -> int:
        return self.value


@dataclass(frozen=True, eq=False)
class FpMatrix:
    """Array (matrix or vector) over F_p in balanced representation."""

    data: np.ndarray
    p: int

    def __post_init__(self):
        arr = np.asarray(self.data)
        dtype = np.int64 if self.p < _INT64_SAFE_P else object
        object.__setattr__(self, "data", balanced(arr.astype(dtype), self.p))

    @property
    def shape(self) -> tuple[int, ...]:
        return self.data.shape

    def canonical(self) -> np.ndarray:
        """Residues in 0..p-1."""
        return np.mod(self.data, self.p)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FpMatrix)
            and self.p == other.p
            and self.shape == other.shape
            and bool(np.all(self.data == other.data))
        )

    def __repr__(self) -> str:
        return f"FpMatrix(p={self.p}, shape={self.shape})"


FpVector = FpMatrix


def mod_reduce(A, p: int) -> FpMatrix:
    return FpMatrix(np.asarray(A), check_prime(p))


def matmul_mod(A: np.ndarray, B: np.ndarray, p: int) -> np.ndarray:
    """(A @ B) mod p in 0..p-1, falling back to Python ints when int64 could overflow."""
    A = np.mod(np.asarray(A), p)
    B = np.mod(np.asarray(B), p)
    inner = A.shape[-1] if A.ndim else 1
    if inner * (p - 1) ** 2 < 2**62:
        return np.mod(A.astype(np.int64) @ B.astype(np.int64), p)
    return np.mod(A.astype(object) @ B.astype(object), p)


def rank_ff(A: FpMatrix) -> int:
    """Rank over F_p by row reduction with first-nonzero pivot search."""
    p = A.p
    M = A.canonical().copy()
    if M.ndim == 1:
        M = M.reshape(1, -1)
    m, n = M.shape
    row = 0
    for col in range(n):
        if row == m:
            break
        nz = np.flatnonzero(M[row:, col])
        if nz.size == 0:
            continue
        piv = row + nz[0]
        if piv != row:
            M[[row, piv]] = M[[piv, row]]
        inv = pow(int(M[row, col]), -1, p)
        M[row] = np.mod(M[row] * inv, p)
        below = M[row + 1 :, col].copy()
        if below.any():
            M[row + 1 :] = np.mod(M[row + 1 :] - np.outer(below, M[row]), p)
        row += 1
    return row


def _int_rows(A) -> list[list[int]]:
    arr = np.asarray(A)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-d integer matrix, got shape {arr.shape}")
    return [[int(x) for x in row] for row in arr.tolist()]


def rank_exact_rational(A) -> int:
    """Rank over Q by fraction-free (Bareiss) elimination on Python ints."""
    M = _int_rows(A)
    if not M or not M[0]:
        return 0
    m, n = len(M), len(M[0])
    prev = 1
    r = 0
    for c in range(n):
        piv = next((i for i in range(r, m) if M[i][c] != 0), None)
        if piv is None:
            continue
        M[r], M[piv] = M[piv], M[r]
        pr = M[r]
        for i in range(r + 1, m):
            row = M[i]
            a = row[c]
            for j in range(c + 1, n):
                row[j] = (pr[c] * row[j] - a * pr[j]) // prev
            row[c] = 0
        prev = pr[c]
        r += 1
        if r == m:
            break
    return r


@dataclass(frozen=True)
class SnfResult:
    invariant_factors: tuple[int, ...]
    rank: int
    # D = left @ A @ right, only when requested
    left: np.ndarray | None = None
    right: np.ndarray | None = None

    @property
    def torsion(self) -> tuple[int, ...]:
        return tuple(d for d in self.invariant_factors if d > 1)


def smith_normal_form(A, transforms: bool = False) -> SnfResult:
    """Invariant factors d_1 | d_2 | ... of an integer matrix.

    With ``transforms=True`` also returns unimodular ``left``, ``right``
    (object arrays of Python ints) such that ``left @ A @ right`` is the
    diagonal form.
    """
    M = _int_rows(A)
    m, n = np.shape(A)
    P = [[int(i == j) for j in range(m)] for i in range(m)] if transforms else None
    Q = [[int(i == j) for j in range(n)] for i in range(n)] if transforms else None

    def swap_rows(i, j):
        M[i], M[j] = M[j], M[i]
        if P is not None:
            P[i], P[j] = P[j], P[i]

    def swap_cols(i, j):
        for row in M:
            row[i], row[j] = row[j], row[i]
        if Q is not None:
            for row in Q:
                row[i], row[j] = row[j], row[i]

    def add_row(dst, src, k):
        # row_dst += k * row_src
        a, b = M[dst], M[src]
        for j in range(n):
            if b[j]:
                a[j] += k * b[j]
        if P is not None:
            a, b = P[dst], P[src]
            for j in range(m):
                a[j] += k * b[j]

    def add_col(dst, src, k):
        for row in M:
            if row[src]:
                row[dst] += k * row[src]
        if Q is not None:
            for row in Q:
                row[dst] += k * row[src]

    t = 0
    while t < min(m, n):
        best = None
        for i in range(t, m):
            for j in range(t, n):
                v = M[i][j]
                if v and (best is None or abs(v) < best[0]):
                    best = (abs(v), i, j)
                    if best[0] == 1:
                        break
            if best is not None and best[0] == 1:
                break
        if best is None:
            break
        _, i, j = best
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            piv = M[t][t]
            for i in range(t + 1, m):
                if M[i][t]:
                    add_row(i, t, -(M[i][t] // piv))
            for j in range(t + 1, n):
                if M[t][j]:
                    add_col(j, t, -(M[t][j] // piv))
            rest = [(abs(M[i][t]), i, t) for i in range(t + 1, m) if M[i][t]]
            rest += [(abs(M[t][j]), t, j) for j in range(t + 1, n) if M[t][j]]
            if rest:
                _, i, j = min(rest)
                swap_rows(t, i)
                swap_cols(t, j)
                continue
            bad = next(
                (i for i in range(t + 1, m) for j in range(t + 1, n) if M[i][j] % piv),
                None,
            )
            if bad is None:
                break
            add_row(t, bad, 1)
        if M[t][t] < 0:
            M[t] = [-x for x in M[t]]
            if P is not None:
                P[t] = [-x for x in P[t]]
        t += 1

    factors = tuple(M[i][i] for i in range(t))
    left = np.array(P, dtype=object).reshape(m, m) if transforms else None
    right = np.array(Q, dtype=object).reshape(n, n) if transforms else None
    return SnfResult(invariant_factors=factors, rank=len(factors), left=left, right=right)


def homology_over_Z(K: SimplicialComplex, r: int) -> tuple[int, list[int]]:
    """(betti number, torsion coefficients) of H_r(K; Z).

    The torsion coefficients are the invariant factors of the (r+1)-boundary
    that exceed 1.
    """
    if not 0 <= r <= K.dim:
        raise DimensionOutOfRange(f"order {r} outside 0..{K.dim}")
    rank_down = rank_exact_rational(boundary_matrix(K, r)) if r >= 1 else 0
    if r < K.dim:
        snf = smith_normal_form(boundary_matrix(K, r + 1))
        rank_up, torsion = snf.rank, sorted(snf.torsion)
    else:
        rank_up, torsion = 0, []
    return K.count(r) - rank_down - rank_up, torsion
