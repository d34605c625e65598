import numpy as np
import pytest

from hosp.datasets import (
    CIRCULATION_FLOW,
    CONSERVED_FLOW,
    TRAJECTORY_ROUTES,
    two_triangle_complex,
    grid_complex,
    route_trajectory,
    smoothing_fixture,
)
from hosp.flows import divergence
from hosp.hodge import harmonic_basis, hodge_laplacian


def test_two_triangle_flows():
    X = two_triangle_complex()
    assert X.count(1) == len(CIRCULATION_FLOW) == len(CONSERVED_FLOW)
    np.testing.assert_array_equal(divergence(X, CONSERVED_FLOW), 0)
    assert divergence(X, CIRCULATION_FLOW).any()


def test_grid_complex_counts():
    X = grid_complex(2)
    assert [X.count(k) for k in range(3)] == [9, 16, 8]
    assert harmonic_basis(X).shape[1] == 0
    Y = grid_complex(2, holes=[(0, 0)])
    assert [Y.count(k) for k in range(3)] == [9, 15, 6]
    assert harmonic_basis(Y).shape[1] == 1


def test_smoothing_fixture_truth_is_harmonic():
    fx = smoothing_fixture()
    assert np.linalg.norm(fx.truth) == pytest.approx(10.0)
    np.testing.assert_allclose(hodge_laplacian(fx.complex, 1) @ fx.truth, 0, atol=1e-10)


def test_route_trajectory_is_a_walk():
    X = grid_complex(3)
    walk = route_trajectory(X, [(0, 0), (3, 0), (3, 3)])
    assert walk[0] == 0 and walk[-1] == 15
    edges = set(X.simplices[1])
    assert all(tuple(sorted(p)) in edges for p in zip(walk, walk[1:]))
    with pytest.raises(ValueError):
        route_trajectory(two_triangle_complex(), [(0, 0)])
    assert {r[0] for r in TRAJECTORY_ROUTES} == {"A", "B", "C"}
