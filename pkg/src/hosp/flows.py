"""Denoising, smoothing and interpolation of node and edge signals; trajectories."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np
import scipy.linalg
from scipy.sparse.csgraph import connected_components

from .complex import SimplicialComplex, boundary_matrix, boundary_or_zero
from .hodge import edge_laplacian, harmonic_basis, hodge_laplacian, line_graph_laplacian
from .spectral import sym_eig


def _spd_solve(A: np.ndarray, b: np.ndarray) -> np.ndarray:
    return scipy.linalg.solve(A, b, assume_a="pos")


def denoise_node(L: np.ndarray, y: np.ndarray, alpha: float) -> np.ndarray:
    """(I + alpha L)^{-1} y, the minimizer of ||x - y||^2 + alpha x^T L x."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    L = np.asarray(L, dtype=float)
    return _spd_solve(np.eye(L.shape[0]) + alpha * L, np.asarray(y, dtype=float))


def iterative_smooth(L: np.ndarray, y: np.ndarray, mu: float, k: int) -> np.ndarray:
    """(I - mu L)^k y. Requires 0 < mu < 2 / lambda_max(L)."""
    if k < 0:
        raise ValueError("k must be non-negative")
    L = np.asarray(L, dtype=float)
    lam_max = sym_eig(L).eigenvalues[-1] if L.size else 0.0
    if not (mu > 0 and mu * lam_max < 2):
        raise ValueError(f"step mu={mu} is unstable for lambda_max={lam_max:.6g}")
    out = np.asarray(y, dtype=float).copy()
    for _ in range(k):
        out = out - mu * (L @ out)
    return out


FLOW_OPERATORS = {
    "hodge": lambda X: hodge_laplacian(X, 1),
    "edge": edge_laplacian,
    "linegraph": line_graph_laplacian,
}


def denoise_flow(X: SimplicialComplex, f: np.ndarray, alpha: float, operator_kind: str = "hodge") -> np.ndarray:
    """(I + alpha Q)^{-1} f with Q the Hodge, edge, or line-graph Laplacian."""
    try:
        Q = FLOW_OPERATORS[operator_kind](X)
    except KeyError:
        raise ValueError(f"unknown operator kind {operator_kind!r}") from None
    return denoise_node(Q, f, alpha)


@dataclass(frozen=True)
class LabeledFlow:
    """Measured values on a subset of the edges of a complex."""

    indices: tuple[int, ...]
    values: tuple[float, ...]
    n_edges: int

    def __post_init__(self):
        if len(self.indices) != len(self.values):
            raise ValueError("indices and values differ in length")
        if len(set(self.indices)) != len(self.indices):
            raise ValueError("labeled edge indices must be unique")
        if any(not 0 <= i < self.n_edges for i in self.indices):
            raise ValueError("labeled edge index out of range")

    @classmethod
    def from_mapping(cls, labels: Mapping[int, float], n_edges: int) -> "LabeledFlow":
        keys = sorted(labels)
        return cls(tuple(int(k) for k in keys), tuple(float(labels[k]) for k in keys), n_edges)

    @property
    def unlabeled(self) -> np.ndarray:
        mask = np.ones(self.n_edges, dtype=bool)
        mask[list(self.indices)] = False
        return np.flatnonzero(mask)

    def feasible(self) -> np.ndarray:
        """Labels in place, zeros elsewhere."""
        f0 = np.zeros(self.n_edges)
        f0[list(self.indices)] = self.values
        return f0

    def expansion(self) -> np.ndarray:
        """Phi: embeds unlabeled-edge values into the full edge space."""
        U = self.unlabeled
        Phi = np.zeros((self.n_edges, len(U)))
        Phi[U, np.arange(len(U))] = 1.0
        return Phi


def interpolate_flow(
    X: SimplicialComplex, labels: LabeledFlow, alpha: float, use_triangles: bool = False
) -> np.ndarray:
    """Fill unlabeled edges by least squares on divergence (and curl) plus alpha^2 ||f_U||^2.

    Solves the stacked system ``[B1 Phi; alpha I; B2^T Phi] f_U ~ [-B1 f0; 0; -B2^T f0]``
    through its normal equations. Labeled entries are copied, not estimated.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if labels.n_edges != X.count(1):
        raise ValueError("label set does not match the complex")
    f0 = labels.feasible()
    U = labels.unlabeled
    if len(U) == 0:
        return f0
    Phi = labels.expansion()
    B1 = boundary_matrix(X, 1).astype(float)
    blocks = [B1]
    if use_triangles:
        blocks.append(boundary_or_zero(X, 2).T.astype(float))
    G = alpha**2 * np.eye(len(U))
    rhs = np.zeros(len(U))
    for B in blocks:
        BPhi = B @ Phi
        G += BPhi.T @ BPhi
        rhs -= BPhi.T @ (B @ f0)
    out = f0.copy()
    out[U] = _spd_solve(G, rhs)
    return out


def divergence(X: SimplicialComplex, f: np.ndarray) -> np.ndarray:
    """B_1 f: net inflow at each node."""
    return boundary_matrix(X, 1) @ np.asarray(f, dtype=float)


def trajectory_flow(X: SimplicialComplex, trajectory: Sequence[int]) -> np.ndarray:
    """Signed edge indicator of a vertex walk; repeated edges accumulate."""
    edges = X.index(1) if X.order >= 1 else {}
    f = np.zeros(X.count(1))
    for a, b in zip(trajectory, trajectory[1:]):
        key = (a, b) if a < b else (b, a)
        if key not in edges:
            raise ValueError(f"vertices {a} and {b} are not adjacent")
        f[edges[key]] += 1.0 if a < b else -1.0
    return f


def embed_trajectory(
    X: SimplicialComplex, trajectory: Sequence[int], basis: np.ndarray | None = None
) -> np.ndarray:
    """Running harmonic embedding of a walk, one row per step, starting at the origin.

    Row t is the projection onto ker(L_1) of the first t traversed edges.
    Pass ``basis`` to reuse a precomputed harmonic basis.
    """
    U = harmonic_basis(X) if basis is None else basis
    if U.shape[1] == 0:
        raise ValueError("complex has no harmonic flows to embed into")
    edges = X.index(1)
    out = np.zeros((len(trajectory), U.shape[1]))
    for t, (a, b) in enumerate(zip(trajectory, trajectory[1:]), start=1):
        key = (a, b) if a < b else (b, a)
        if key not in edges:
            raise ValueError(f"vertices {a} and {b} are not adjacent")
        step = U[edges[key]] if a < b else -U[edges[key]]
        out[t] = out[t - 1] + step
    return out


def interpolate_node(L: np.ndarray, labels: Mapping[int, float]) -> np.ndarray:
    """Harmonic extension: minimize y^T L y with the labeled entries fixed.

    ``L`` may be a Laplacian (square, symmetric) or a node-edge incidence
    matrix B, in which case L = B B^T is used.
    """
    L = np.asarray(L, dtype=float)
    if L.shape[0] != L.shape[1] or not np.allclose(L, L.T):
        L = L @ L.T
    N = L.shape[0]
    if not labels:
        raise ValueError("no labeled nodes")
    lab = np.array(sorted(labels), dtype=int)
    y = np.zeros(N)
    y[lab] = [labels[i] for i in lab]
    free = np.setdiff1d(np.arange(N), lab)
    if len(free) == 0:
        return y

    adjacency = (np.abs(L) > 0) & ~np.eye(N, dtype=bool)
    _, comp = connected_components(adjacency, directed=False)
    missing = set(comp[free]) - set(comp[lab])
    if missing:
        raise ValueError(f"{len(missing)} connected component(s) carry no label")

    y[free] = _spd_solve(L[np.ix_(free, free)], -L[np.ix_(free, lab)] @ y[lab])
    return y
