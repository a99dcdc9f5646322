from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from torsionkit.complex_core import (
    SPACES,
    boundary_matrix,
    euler_characteristic,
    from_facets,
    generate,
    incidence_matrix,
    laplacian,
    parse_complex,
    serialize,
)
from torsionkit.errors import (
    ComplexSyntaxError,
    DimensionOutOfRange,
    DuplicateVertexInSimplex,
    EmptyComplex,
    UnsupportedSpace,
    VertexIdOutOfRange,
)

COUNTS = {
    "sphere2": (4, 6, 4),
    "sphere3": (5, 10, 10, 5),
    "torus": (7, 21, 14),
    "rp2": (6, 15, 10),
    "klein": (9, 27, 18),
}
EULER = {"sphere2": 2, "sphere3": 0, "torus": 0, "rp2": 1, "klein": 0}


@pytest.mark.parametrize("space", SPACES)
def test_fixture_counts_and_euler(fixtures, space):
    K = fixtures[space]
    assert K.counts == COUNTS[space]
    assert euler_characteristic(K) == EULER[space]


@pytest.mark.parametrize("space", ["torus", "rp2", "klein"])
def test_surfaces_are_closed_manifolds(fixtures, space):
    K = fixtures[space]
    for e in K.simplices[1]:
        assert sum(set(e) <= set(t) for t in K.simplices[2]) == 2
    for v in range(K.n_vertices):
        link = [tuple(x for x in t if x != v) for t in K.simplices[2] if v in t]
        # the link edges form one cycle: connected and every vertex of degree 2
        deg = {}
        for a, b in link:
            deg[a] = deg.get(a, 0) + 1
            deg[b] = deg.get(b, 0) + 1
        assert set(deg.values()) == {2}
        seen, todo = set(), [link[0][0]]
        while todo:
            x = todo.pop()
            if x not in seen:
                seen.add(x)
                todo.extend(b if a == x else a for a, b in link if x in (a, b))
        assert seen == set(deg)


def test_sphere_generator_matches_named():
    assert generate("sphere", 2) == generate("sphere2")
    assert generate("torus2") == generate("torus")
    assert generate("sphere", 1).counts == (3, 3)


def test_simplices_sorted_lexicographically(fixtures):
    for K in fixtures.values():
        for level in K.simplices:
            assert list(level) == sorted(level)
            assert all(list(s) == sorted(set(s)) for s in level)


def test_boundary_signs_triangle():
    K = from_facets([(0, 1, 2)], 3)
    # edges (0,1), (0,2), (1,2); dropping vertex i gives sign (-1)^i
    np.testing.assert_array_equal(boundary_matrix(K, 2).ravel(), [1, -1, 1])
    np.testing.assert_array_equal(
        boundary_matrix(K, 1), [[-1, -1, 0], [1, 0, -1], [0, 1, 1]]
    )


@pytest.mark.parametrize("space", SPACES)
def test_boundary_squares_to_zero(fixtures, space):
    K = fixtures[space]
    for r in range(1, K.dim):
        assert not np.any(boundary_matrix(K, r) @ boundary_matrix(K, r + 1))


@pytest.mark.parametrize("space", SPACES)
def test_frobenius_and_incidence(fixtures, space):
    K = fixtures[space]
    for r in range(1, K.dim + 1):
        B = boundary_matrix(K, r)
        assert int((B * B).sum()) == (r + 1) * K.count(r)
        np.testing.assert_array_equal(np.abs(B), incidence_matrix(K, r))
        assert set((incidence_matrix(K, r) != 0).sum(axis=0)) == {r + 1}


def test_k4_laplacian():
    L = laplacian(generate("sphere2"), 0)
    np.testing.assert_array_equal(L, 4 * np.eye(4, dtype=int) - np.ones((4, 4), dtype=int))


@pytest.mark.parametrize("space", SPACES)
def test_laplacian_symmetric_psd(fixtures, space):
    K = fixtures[space]
    for r in range(K.dim + 1):
        L = laplacian(K, r)
        assert L.shape == (K.count(r), K.count(r))
        np.testing.assert_array_equal(L, L.T)
        assert np.linalg.eigvalsh(L.astype(float)).min() > -1e-9


def test_top_dimensional_laplacian_has_no_up_term():
    K = generate("sphere2")
    B = boundary_matrix(K, 2)
    np.testing.assert_array_equal(laplacian(K, 2), B.T @ B)


def test_order_errors():
    K = generate("rp2")
    with pytest.raises(DimensionOutOfRange):
        boundary_matrix(K, 0)
    with pytest.raises(DimensionOutOfRange):
        boundary_matrix(K, 3)
    with pytest.raises(DimensionOutOfRange):
        laplacian(K, -1)


def test_construction_errors():
    with pytest.raises(DuplicateVertexInSimplex):
        from_facets([(0, 0, 1)], 3)
    with pytest.raises(VertexIdOutOfRange):
        from_facets([(0, 5)], 3)
    with pytest.raises(EmptyComplex):
        from_facets([], 3)
    with pytest.raises(UnsupportedSpace):
        generate("mobius")
    with pytest.raises(UnsupportedSpace):
        generate("sphere")


def test_parse_format_and_errors():
    K = parse_complex("# a triangle\nvertices 4\nfacet 2 0 1\n\nfacet 3\n")
    assert K.n_vertices == 4
    assert K.counts == (4, 3, 1)
    with pytest.raises(ComplexSyntaxError) as info:
        parse_complex("facet 0 1\nface 1 2\n")
    assert info.value.line == 2
    with pytest.raises(ComplexSyntaxError):
        parse_complex("facet 0 x\n")
    with pytest.raises(EmptyComplex):
        parse_complex("# nothing\n")


def test_isolated_ids_are_not_vertices():
    K = parse_complex("vertices 5\nfacet 0 1\n")
    assert K.n_vertices == 5
    assert K.count(0) == 2


@pytest.mark.parametrize("space", SPACES)
def test_fixture_roundtrip(fixtures, space):
    K = fixtures[space]
    assert parse_complex(serialize(K)) == K


facet_lists = st.lists(
    st.lists(st.integers(0, 7), min_size=1, max_size=4, unique=True),
    min_size=1,
    max_size=8,
)


@settings(max_examples=60, deadline=None)
@given(facet_lists)
def test_roundtrip_and_closure_property(facets):
    K = from_facets(facets, 8)
    assert parse_complex(serialize(K)) == K
    # closure: every face of every simplex is present
    for r in range(1, K.dim + 1):
        have = set(K.simplices[r - 1])
        for s in K.simplices[r]:
            assert all(f in have for f in itertools.combinations(s, r))
    for r in range(1, K.dim):
        assert not np.any(boundary_matrix(K, r) @ boundary_matrix(K, r + 1))
