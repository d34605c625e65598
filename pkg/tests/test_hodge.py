import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from hosp.complex import boundary_matrix, boundary_or_zero, build_complex
from hosp.datasets import CIRCULATION_FLOW, two_triangle_complex
from hosp.hodge import (
    edge_laplacian,
    harmonic_basis,
    hodge_decompose,
    hodge_laplacian,
    line_graph_laplacian,
    spectral_components,
)

from oracles import exact_rank, random_complex, skeleton_laplacian


def _kernel_dim(M):
    return int(np.sum(np.abs(np.linalg.eigvalsh(M)) < 1e-9))


def test_node_laplacian_is_graph_laplacian():
    X = two_triangle_complex()
    np.testing.assert_array_equal(hodge_laplacian(X, 0), skeleton_laplacian(7, X.simplices[1]))


def test_two_triangle_edge_laplacian_kernel():
    X = two_triangle_complex()
    L1 = hodge_laplacian(X, 1)
    assert L1.shape == (10, 10)
    # 10 edges - rank(B1) - rank(B2) = 10 - 6 - 2
    assert exact_rank(boundary_matrix(X, 1)) == 6 and exact_rank(boundary_matrix(X, 2)) == 2
    assert _kernel_dim(L1) == 2


def test_single_triangle():
    X = build_complex([(0, 1, 2)], 3)
    L1 = hodge_laplacian(X, 1)
    np.testing.assert_array_equal(L1, 3 * np.eye(3))
    assert _kernel_dim(L1) == 0


def test_edge_laplacian_cycles():
    assert _kernel_dim(edge_laplacian(build_complex([(0, 1), (1, 2), (0, 2)], 3))) == 1
    assert _kernel_dim(edge_laplacian(build_complex([(0, 1), (1, 2), (1, 3)], 4))) == 0
    # cycle rank E - N + components
    assert _kernel_dim(edge_laplacian(two_triangle_complex())) == 10 - 7 + 1


def test_line_graph_laplacian():
    L = line_graph_laplacian(build_complex([(0, 1), (1, 2)], 3))
    np.testing.assert_array_equal(L, [[1, -1], [-1, 1]])
    star = line_graph_laplacian(build_complex([(0, 1), (0, 2), (0, 3)], 4))
    np.testing.assert_array_equal(star, 3 * np.eye(3) - np.ones((3, 3)))
    np.testing.assert_allclose(line_graph_laplacian(two_triangle_complex()).sum(axis=1), 0)


def test_circulation_example():
    X = two_triangle_complex()
    d = hodge_decompose(X, CIRCULATION_FLOW)
    np.testing.assert_allclose(d.triangle_potentials, [-1, -5 / 3], atol=1e-10)
    np.testing.assert_allclose(d.gradient + d.curl + d.harmonic, CIRCULATION_FLOW, atol=1e-10)
    for a, b in ((d.gradient, d.curl), (d.gradient, d.harmonic), (d.curl, d.harmonic)):
        assert abs(a @ b) < 1e-10


def test_pure_gradient():
    X = two_triangle_complex()
    f = boundary_matrix(X, 1).T @ np.eye(7)[0]
    d = hodge_decompose(X, f)
    np.testing.assert_allclose(d.gradient, f, atol=1e-12)
    np.testing.assert_allclose(d.curl, 0, atol=1e-12)
    np.testing.assert_allclose(d.harmonic, 0, atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_decomposition_matches_least_squares(seed):
    rng = np.random.default_rng(seed)
    X = random_complex(rng, max_nodes=12, p_edge=0.6)
    if X.count(1) == 0:
        return
    f = rng.normal(size=X.count(1))
    d = hodge_decompose(X, f)
    B1 = boundary_matrix(X, 1).astype(float)
    B2 = boundary_or_zero(X, 2).astype(float)
    g_ref = B1.T @ np.linalg.lstsq(B1.T, f, rcond=None)[0]
    r_ref = B2 @ np.linalg.lstsq(B2, f, rcond=None)[0] if B2.shape[1] else np.zeros_like(f)
    np.testing.assert_allclose(d.gradient, g_ref, atol=1e-9)
    np.testing.assert_allclose(d.curl, r_ref, atol=1e-9)
    np.testing.assert_allclose(d.gradient + d.curl + d.harmonic, f, atol=1e-10)
    np.testing.assert_allclose(hodge_laplacian(X, 1) @ d.harmonic, 0, atol=1e-9)


def test_two_triangle_spectral_counts():
    B = spectral_components(two_triangle_complex())
    assert B.counts() == {"gradient": 6, "curl": 2, "harmonic": 2}


def test_no_triangles_no_curl():
    B = spectral_components(build_complex([(0, 1), (1, 2), (0, 2)], 3))
    assert B.counts()["curl"] == 0


def test_single_triangle_curl_eigenvalue():
    B = spectral_components(build_complex([(0, 1, 2)], 3))
    assert B.counts()["curl"] == 1
    assert B.eigenvalues[B.tags.index("curl")] == pytest.approx(3.0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_lifted_eigenvectors(seed):
    X = random_complex(np.random.default_rng(seed))
    if X.count(1) == 0:
        return
    L1 = hodge_laplacian(X, 1)
    B = spectral_components(X)
    U = B.eigenvectors
    r = np.linalg.norm(L1 @ U - U * B.eigenvalues, axis=0)
    assert np.all(r <= 1e-8 * np.maximum(1, np.linalg.norm(U, axis=0)))
    assert np.all(np.linalg.eigvalsh(L1) >= -1e-10)
    c = B.counts()
    assert c["gradient"] == exact_rank(boundary_matrix(X, 1))
    assert c["curl"] == exact_rank(boundary_or_zero(X, 2))
    assert c["harmonic"] + c["gradient"] + c["curl"] == X.count(1)


def test_harmonic_basis():
    assert harmonic_basis(build_complex([(0, 1, 2)], 3)).shape == (3, 0)
    H = harmonic_basis(build_complex([(0, 1), (1, 2), (0, 2)], 3))
    assert H.shape == (3, 1)
    H = harmonic_basis(two_triangle_complex())
    np.testing.assert_allclose(H.T @ H, np.eye(2), atol=1e-12)
