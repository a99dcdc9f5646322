"""Simplicial complexes, fixture triangulations, facet files and the
incidence / boundary / Laplacian matrices built from them.

Simplices are strictly increasing vertex tuples.  Within each dimension the
simplices are kept in lexicographic order, which fixes row and column order
of every matrix produced here, and therefore every sign.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    ComplexSyntaxError,
    DimensionOutOfRange,
    DuplicateVertexInSimplex,
    EmptyComplex,
    UnsupportedSpace,
    VertexIdOutOfRange,
)

Simplex = tuple[int, ...]


@dataclass(frozen=True)
class SimplicialComplex:
    """A finite abstract simplicial complex on vertex ids ``0..n_vertices-1``.

    ``simplices[r]`` is the sorted list S_r of r-simplices.  Only simplices
    in the downward closure of the facets are present, so an id below
    ``n_vertices`` need not be a vertex of the complex.
    """

    n_vertices: int
    simplices: tuple[tuple[Simplex, ...], ...]

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    def count(self, r: int) -> int:
        """|S_r|, zero outside ``0..dim``."""
        if 0 <= r <= self.dim:
            return len(self.simplices[r])
        return 0

    @property
    def counts(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.simplices)

    @cached_property
    def index(self) -> tuple[dict[Simplex, int], ...]:
        return tuple({s: i for i, s in enumerate(level)} for level in self.simplices)

    def facets(self) -> list[Simplex]:
        """Maximal simplices, sorted lexicographically."""
        out: list[Simplex] = []
        for r, level in enumerate(self.simplices):
            if r == self.dim:
                out.extend(level)
                continue
            covered = {face for s in self.simplices[r + 1] for face in _faces(s)}
            out.extend(s for s in level if s not in covered)
        return sorted(out)

    def __repr__(self) -> str:
        return f"SimplicialComplex(n_vertices={self.n_vertices}, counts={self.counts})"


def _faces(s: Simplex):
    for i in range(len(s)):
        yield s[:i] + s[i + 1 :]


def from_facets(facets, n_vertices: int) -> SimplicialComplex:
    """Downward closure of ``facets``; vertex tuples are stored sorted."""
    facets = [tuple(int(v) for v in f) for f in facets]
    if not facets or all(len(f) == 0 for f in facets):
        raise EmptyComplex("no simplices given")
    levels: dict[int, set[Simplex]] = {}
    for f in facets:
        if len(set(f)) != len(f):
            raise DuplicateVertexInSimplex(f"repeated vertex in {f}")
        for v in f:
            if v < 0 or v >= n_vertices:
                raise VertexIdOutOfRange(f"vertex {v} not in 0..{n_vertices - 1}")
        f = tuple(sorted(f))
        for k in range(1, len(f) + 1):
            levels.setdefault(k - 1, set()).update(itertools.combinations(f, k))
    top = max(levels)
    simplices = tuple(tuple(sorted(levels[r])) for r in range(top + 1))
    return SimplicialComplex(n_vertices=n_vertices, simplices=simplices)


# Fixture triangulations.  Each one is checked in the test suite against its
# Euler characteristic and its integral homology (Smith normal form).

# Moebius' 7-vertex torus: the translates of {0,1,3} and {0,2,3} mod 7.
_TORUS_7 = [
    (0, 1, 3), (0, 1, 5), (0, 2, 3), (0, 2, 6), (0, 4, 5), (0, 4, 6), (1, 2, 4),
    (1, 2, 6), (1, 3, 4), (1, 5, 6), (2, 3, 5), (2, 4, 5), (3, 4, 6), (3, 5, 6),
]

# Hemi-icosahedron: the 6-vertex real projective plane.
_RP2_6 = [
    (0, 1, 2), (0, 1, 5), (0, 2, 3), (0, 3, 4), (0, 4, 5),
    (1, 2, 4), (1, 3, 4), (1, 3, 5), (2, 3, 5), (2, 4, 5),
]

# 3x3 grid on the square with the orientation-reversing identification on
# one pair of sides; vertex (i, j) has id 3*i + j.
_KLEIN_9 = [
    (0, 1, 4), (0, 1, 8), (0, 2, 3), (0, 2, 6), (0, 3, 4), (0, 6, 8),
    (1, 2, 5), (1, 2, 7), (1, 4, 5), (1, 7, 8), (2, 3, 5), (2, 6, 7),
    (3, 4, 7), (3, 5, 6), (3, 6, 7), (4, 5, 8), (4, 7, 8), (5, 6, 8),
]

SPACES = ("sphere2", "sphere3", "torus", "rp2", "klein")


def generate(space: str, d: int | None = None) -> SimplicialComplex:
    """Built-in triangulations.

    ``space`` is one of ``sphere`` (with ``d``), ``sphereN``, ``torus`` /
    ``torus2``, ``rp2`` or ``klein``.  ``sphere`` of dimension d is the
    boundary of the (d+1)-simplex.
    """
    name = space.lower()
    m = re.fullmatch(r"sphere(\d+)", name)
    if m:
        name, d = "sphere", int(m.group(1))
    if name == "sphere":
        if d is None or d < 1:
            raise UnsupportedSpace("sphere needs a dimension d >= 1")
        facets = list(itertools.combinations(range(d + 2), d + 1))
        return from_facets(facets, d + 2)
    if name in ("torus", "torus2"):
        return from_facets(_TORUS_7, 7)
    if name == "rp2":
        return from_facets(_RP2_6, 6)
    if name == "klein":
        return from_facets(_KLEIN_9, 9)
    raise UnsupportedSpace(f"unknown space {space!r}")


_ID = re.compile(r"\d+")


def parse_complex(text: str) -> SimplicialComplex:
    """Read the facet-file format (``facet`` lines, optional ``vertices N``)."""
    facets: list[Simplex] = []
    declared: int | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        keyword, *fields = line.split()
        if any(not _ID.fullmatch(f) for f in fields):
            raise ComplexSyntaxError(lineno, f"expected decimal vertex ids: {raw!r}")
        if keyword == "facet":
            if not fields:
                raise ComplexSyntaxError(lineno, "facet without vertices")
            facets.append(tuple(int(f) for f in fields))
        elif keyword == "vertices":
            if len(fields) != 1 or declared is not None:
                raise ComplexSyntaxError(lineno, "expected a single 'vertices N' header")
            declared = int(fields[0])
        else:
            raise ComplexSyntaxError(lineno, f"unknown keyword {keyword!r}")
    if not facets:
        raise EmptyComplex("facet file lists no facets")
    n = declared if declared is not None else 1 + max(v for f in facets for v in f)
    return from_facets(facets, n)


def serialize(K: SimplicialComplex) -> str:
    lines = [f"vertices {K.n_vertices}"]
    lines.extend("facet " + " ".join(map(str, f)) for f in K.facets())
    return "\n".join(lines) + "\n"


def _check_order(K: SimplicialComplex, r: int, lo: int) -> None:
    if not lo <= r <= K.dim:
        raise DimensionOutOfRange(f"order {r} outside {lo}..{K.dim}")


def _face_matrix(K: SimplicialComplex, r: int, signed: bool) -> np.ndarray:
    _check_order(K, r, 1)
    rows = K.index[r - 1]
    out = np.zeros((K.count(r - 1), K.count(r)), dtype=np.int64)
    for j, s in enumerate(K.simplices[r]):
        for i, face in enumerate(_faces(s)):
            out[rows[face], j] = (-1) ** i if signed else 1
    return out


def incidence_matrix(K: SimplicialComplex, r: int) -> np.ndarray:
    """0/1 face-incidence matrix of shape |S_{r-1}| x |S_r|."""
    return _face_matrix(K, r, signed=False)


def boundary_matrix(K: SimplicialComplex, r: int) -> np.ndarray:
    """Signed boundary map; dropping the i-th smallest vertex carries (-1)^i."""
    return _face_matrix(K, r, signed=True)


def laplacian(K: SimplicialComplex, r: int, signed: bool = True) -> np.ndarray:
    """Combinatorial Laplacian ``B_{r+1} B_{r+1}^T + B_r^T B_r``.

    Terms whose boundary map does not exist (r = 0, r = dim) are zero.  With
    ``signed=False`` the incidence matrices are used instead, which is the
    real lift of the mod-2 Laplacian.
    """
    _check_order(K, r, 0)
    n = K.count(r)
    out = np.zeros((n, n), dtype=np.int64)
    if r < K.dim:
        up = _face_matrix(K, r + 1, signed)
        out += up @ up.T
    if r >= 1:
        down = _face_matrix(K, r, signed)
        out += down.T @ down
    return out


def euler_characteristic(K: SimplicialComplex) -> int:
    return sum((-1) ** r * c for r, c in enumerate(K.counts))
