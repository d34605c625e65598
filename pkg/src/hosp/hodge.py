"""Hodge Laplacians, the Hodge decomposition of edge flows, and its spectral split."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complex import SimplicialComplex, boundary_matrix, boundary_or_zero
from .spectral import SpectralBasis, sym_eig

# eigenvalues below KERNEL_RTOL * lambda_max count as zero
KERNEL_RTOL = 1e-9
PINV_CUTOFF = 1e-10


def hodge_laplacian(X: SimplicialComplex, k: int) -> np.ndarray:
    """L_k = B_k^T B_k + B_{k+1} B_{k+1}^T, with B_0 = 0 and B_{K+1} = 0."""
    if not 0 <= k <= X.order:
        raise ValueError(f"order k={k} outside 0..{X.order}")
    down = boundary_or_zero(X, k) if k >= 1 else np.zeros((0, X.count(0)), dtype=np.int64)
    up = boundary_or_zero(X, k + 1)
    return (down.T @ down + up @ up.T).astype(float)


def _require_edges(X: SimplicialComplex) -> None:
    if X.order < 1:
        raise ValueError("complex has no edges")


def edge_laplacian(X: SimplicialComplex) -> np.ndarray:
    """B_1^T B_1: the Hodge 1-Laplacian with every 2-simplex ignored."""
    _require_edges(X)
    B1 = boundary_matrix(X, 1)
    return (B1.T @ B1).astype(float)


def line_graph_laplacian(X: SimplicialComplex) -> np.ndarray:
    """Combinatorial Laplacian of the unweighted line graph of the 1-skeleton."""
    _require_edges(X)
    Z = np.abs(boundary_matrix(X, 1))
    A = Z.T @ Z
    np.fill_diagonal(A, 0)
    A = (A > 0).astype(float)
    return np.diag(A.sum(axis=1)) - A


def pinv_psd(G: np.ndarray, cutoff: float = PINV_CUTOFF) -> np.ndarray:
    """Pseudo-inverse of a PSD Gram matrix via its eigendecomposition."""
    if G.size == 0:
        return np.zeros_like(G, dtype=float)
    basis = sym_eig(G)
    w, U = basis.eigenvalues, basis.eigenvectors
    keep = w > cutoff * max(1.0, w.max())
    return (U[:, keep] / w[keep]) @ U[:, keep].T


@dataclass(frozen=True)
class HodgeDecomposition:
    gradient: np.ndarray
    curl: np.ndarray
    harmonic: np.ndarray
    node_potentials: np.ndarray
    triangle_potentials: np.ndarray

    def as_dict(self) -> dict[str, list[float]]:
        return {
            "gradient": self.gradient.tolist(),
            "curl": self.curl.tolist(),
            "harmonic": self.harmonic.tolist(),
            "node_potentials": self.node_potentials.tolist(),
            "triangle_potentials": self.triangle_potentials.tolist(),
        }


def hodge_decompose(X: SimplicialComplex, f: np.ndarray) -> HodgeDecomposition:
    """Split an edge flow into gradient, curl and harmonic parts.

    Potentials are the minimum-norm least-squares solutions of
    ``B_1^T p ~ f`` and ``B_2 w ~ f``; the harmonic part is what remains.
    """
    _require_edges(X)
    f = np.asarray(f, dtype=float)
    if f.shape != (X.count(1),):
        raise ValueError(f"flow has shape {f.shape}, complex has {X.count(1)} edges")
    B1 = boundary_matrix(X, 1).astype(float)
    B2 = boundary_or_zero(X, 2).astype(float)
    p = pinv_psd(B1 @ B1.T) @ (B1 @ f)
    w = pinv_psd(B2.T @ B2) @ (B2.T @ f)
    g = B1.T @ p
    r = B2 @ w
    return HodgeDecomposition(g, r, f - g - r, p, w)


def _kernel_mask(w: np.ndarray) -> np.ndarray:
    scale = max(np.abs(w).max(initial=0.0), 1.0)
    return np.abs(w) < KERNEL_RTOL * scale


def harmonic_basis(X: SimplicialComplex) -> np.ndarray:
    """Orthonormal basis of ker(L_1), one column per independent hole."""
    _require_edges(X)
    basis = sym_eig(hodge_laplacian(X, 1))
    return basis.eigenvectors[:, _kernel_mask(basis.eigenvalues)]


@dataclass(frozen=True)
class LabeledBasis(SpectralBasis):
    """Eigenbasis of L_1 whose columns carry a gradient/curl/harmonic tag."""

    tags: tuple[str, ...] = ()

    def columns(self, tag: str) -> np.ndarray:
        return self.eigenvectors[:, [i for i, t in enumerate(self.tags) if t == tag]]

    def counts(self) -> dict[str, int]:
        return {t: self.tags.count(t) for t in ("gradient", "curl", "harmonic")}


def spectral_components(X: SimplicialComplex) -> LabeledBasis:
    """Eigenbasis of L_1 assembled from lifted L_0 and B_2^T B_2 eigenvectors.

    Nonzero eigenpairs (lam, v) of L_0 lift to B_1^T v (gradient); nonzero
    eigenpairs (theta, t) of B_2^T B_2 lift to B_2 t (curl); the kernel of L_1
    supplies the harmonic columns.
    """
    _require_edges(X)
    B1 = boundary_matrix(X, 1).astype(float)
    B2 = boundary_or_zero(X, 2).astype(float)
    vals, vecs, tags = [], [], []

    for tag, lift, gram in (("gradient", B1.T, B1 @ B1.T), ("curl", B2, B2.T @ B2)):
        if gram.size == 0:
            continue
        basis = sym_eig(gram)
        nz = ~_kernel_mask(basis.eigenvalues)
        for lam, v in zip(basis.eigenvalues[nz], basis.eigenvectors[:, nz].T):
            u = lift @ v
            vals.append(lam)
            vecs.append(u / np.sqrt(lam))
            tags.append(tag)

    H = harmonic_basis(X)
    for col in H.T:
        vals.append(0.0)
        vecs.append(col)
        tags.append("harmonic")

    order = np.argsort(vals, kind="stable")
    U = np.array(vecs).T[:, order] if vecs else np.zeros((X.count(1), 0))
    return LabeledBasis(np.asarray(vals)[order], U, tuple(tags[i] for i in order))
