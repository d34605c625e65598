"""Small built-in complexes, flows and trajectories used by the examples and tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .complex import SimplicialComplex, build_complex, delaunay_complex
from .hodge import harmonic_basis

# 7 vertices, two filled triangles, 10 edges (vertex labels are 0-based)
TWO_TRIANGLE_FACETS = ((0, 2, 3), (4, 5, 6), (0, 1), (1, 2), (2, 5), (3, 4))

# edge flows on the two-triangle complex in canonical edge order
# (0,1) (0,2) (0,3) (1,2) (2,3) (2,5) (3,4) (4,5) (4,6) (5,6)
CIRCULATION_FLOW = np.array([-4.0, -2.0, 4.0, -2.0, 3.0, -7.0, 7.0, 3.0, 4.0, -4.0])
CONSERVED_FLOW = np.array([-2.0, -2.0, 4.0, -2.0, 3.0, -7.0, 7.0, 3.0, 4.0, -4.0])
# edges (0,2), (0,3), (2,5), (3,4), (4,5)
CONSERVED_FLOW_LABELED = (1, 2, 5, 6, 7)


def two_triangle_complex() -> SimplicialComplex:
    return build_complex(TWO_TRIANGLE_FACETS, 7)


def grid_complex(n: int, holes=()) -> SimplicialComplex:
    """(n+1) x (n+1) lattice; each unit square is split into two triangles
    along its main diagonal unless its (row, col) is listed in ``holes``, in
    which case only its four sides are kept."""
    holes = set(map(tuple, holes))

    def idx(r, c):
        return r * (n + 1) + c

    facets = []
    for r in range(n):
        for c in range(n):
            a, b, d, e = idx(r, c), idx(r, c + 1), idx(r + 1, c), idx(r + 1, c + 1)
            if (r, c) in holes:
                facets += [(a, b), (a, d), (b, e), (d, e)]
            else:
                facets += [(a, b, e), (a, d, e)]
    pos = np.array([(c, r) for r in range(n + 1) for c in range(n + 1)], dtype=float)
    X = build_complex(facets, (n + 1) ** 2)
    return SimplicialComplex(X.n_vertices, X.simplices, positions=pos)


@dataclass(frozen=True)
class SmoothingFixture:
    complex: SimplicialComplex
    truth: np.ndarray
    alpha: float
    sigma: float


def smoothing_fixture() -> SmoothingFixture:
    """4 x 4 triangulated grid with one empty square; truth = harmonic flow of norm 10."""
    X = grid_complex(4, holes=[(1, 1)])
    h = harmonic_basis(X)[:, 0]
    return SmoothingFixture(X, 10.0 * h / np.linalg.norm(h), alpha=1.0, sigma=0.5)


# -- trajectories on a punctured Delaunay lattice ---------------------------

LATTICE_POINTS = 400
LATTICE_SEED = 0
LATTICE_HOLES = ((0.3, 0.7), (0.7, 0.3))

# Waypoint routes from the lower-left to the upper-right corner. Routes
# sharing a class letter pass the two holes on the same sides.
TRAJECTORY_ROUTES = {
    "A1": [(0.05, 0.05), (0.10, 0.90), (0.95, 0.95)],
    "A2": [(0.05, 0.05), (0.20, 0.85), (0.95, 0.95)],
    "B1": [(0.05, 0.05), (0.50, 0.50), (0.95, 0.95)],
    "B2": [(0.05, 0.05), (0.45, 0.55), (0.60, 0.45), (0.95, 0.95)],
    "C1": [(0.05, 0.05), (0.90, 0.10), (0.95, 0.95)],
}


def trajectory_lattice() -> SimplicialComplex:
    return delaunay_complex(LATTICE_POINTS, LATTICE_HOLES, seed=LATTICE_SEED)


def _nearest(X: SimplicialComplex, p) -> int:
    return int(np.argmin(np.linalg.norm(X.positions - np.asarray(p), axis=1)))


def route_trajectory(X: SimplicialComplex, waypoints) -> list[int]:
    """Concatenated Euclidean shortest paths between the vertices nearest each waypoint."""
    if X.positions is None:
        raise ValueError("complex has no vertex positions")
    edges = np.array(X.simplices[1])
    length = np.linalg.norm(X.positions[edges[:, 0]] - X.positions[edges[:, 1]], axis=1)
    G = coo_matrix((length, (edges[:, 0], edges[:, 1])), shape=(X.n_vertices,) * 2).tocsr()
    stops = [_nearest(X, p) for p in waypoints]
    walk = [stops[0]]
    for a, b in zip(stops, stops[1:]):
        _, pred = dijkstra(G, directed=False, indices=a, return_predecessors=True)
        leg = [b]
        while leg[-1] != a:
            prev = pred[leg[-1]]
            if prev < 0:
                raise ValueError(f"no path from {a} to {b}")
            leg.append(int(prev))
        walk.extend(reversed(leg[:-1]))
    return walk


def lattice_trajectories(X: SimplicialComplex | None = None) -> dict[str, list[int]]:
    X = trajectory_lattice() if X is None else X
    return {name: route_trajectory(X, pts) for name, pts in TRAJECTORY_ROUTES.items()}
