"""Symmetric eigendecomposition, graph Fourier transform, filters, eigenmaps."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

# Above this size sym_eig hands off to LAPACK; cyclic Jacobi in Python is O(n^2)
# interpreter-level rotations per sweep.
JACOBI_MAX_N = 64


@dataclass(frozen=True)
class SpectralBasis:
    """Ascending eigenvalues and matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def __len__(self) -> int:
        return len(self.eigenvalues)

    def filter_matrix(self, h: Callable[[np.ndarray], np.ndarray]) -> np.ndarray:
        U = self.eigenvectors
        return (U * np.asarray(h(self.eigenvalues), dtype=float)) @ U.T


def jacobi_eigh(M: np.ndarray, tol: float = 1e-14, max_sweeps: int = 100) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic-by-row Jacobi eigenvalue iteration for a dense symmetric matrix.

    Returns unsorted eigenvalues and eigenvectors (columns). Pivot order is the
    fixed row-cyclic sequence, so the output is a deterministic function of M.
    """
    A = np.array(M, dtype=float)
    n = A.shape[0]
    V = np.eye(n)
    scale = np.linalg.norm(A) or 1.0
    for _ in range(max_sweeps):
        off = np.linalg.norm(A - np.diag(np.diag(A)))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                if abs(apq) <= 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.copysign(1.0, theta) / (abs(theta) + np.hypot(1.0, theta))
                c = 1.0 / np.hypot(1.0, t)
                s = t * c
                Ap, Aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * Ap - s * Aq
                A[:, q] = s * Ap + c * Aq
                Ap, Aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * Ap - s * Aq
                A[q, :] = s * Ap + c * Aq
                A[p, q] = A[q, p] = 0.0
                Vp, Vq = V[:, p].copy(), V[:, q].copy()
                V[:, p] = c * Vp - s * Vq
                V[:, q] = s * Vp + c * Vq
    return np.diag(A).copy(), V


def _fix_signs(U: np.ndarray) -> np.ndarray:
    if U.size == 0:
        return U
    mags = np.abs(U)
    # near-ties (relative 1e-12) go to the lowest index
    lead = np.argmax(mags >= mags.max(axis=0) * (1 - 1e-12), axis=0)
    signs = np.sign(U[lead, np.arange(U.shape[1])])
    signs[signs == 0] = 1.0
    return U * signs


def sym_eig(M: np.ndarray, method: str = "auto") -> SpectralBasis:
    """Full eigendecomposition of a real symmetric matrix.

    ``method`` is "jacobi", "lapack", or "auto" (Jacobi up to JACOBI_MAX_N).
    Each eigenvector is signed so that its largest-magnitude entry is positive.
    """
    M = np.asarray(M, dtype=float)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise ValueError("matrix must be square")
    if not np.allclose(M, M.T, rtol=0.0, atol=1e-12 * max(1.0, np.abs(M).max(initial=0.0))):
        raise ValueError("matrix is not symmetric")
    M = (M + M.T) / 2
    if method == "auto":
        method = "jacobi" if M.shape[0] <= JACOBI_MAX_N else "lapack"
    if method == "jacobi":
        w, U = jacobi_eigh(M)
    elif method == "lapack":
        w, U = np.linalg.eigh(M)
    else:
        raise ValueError(f"unknown method {method!r}")
    order = np.argsort(w, kind="stable")
    return SpectralBasis(w[order], _fix_signs(U[:, order]))


def _check_dim(basis: SpectralBasis, x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.shape[0] != basis.eigenvectors.shape[0]:
        raise ValueError(f"signal has length {x.shape[0]}, basis has {basis.eigenvectors.shape[0]}")
    return x


def gft(basis: SpectralBasis, s: np.ndarray) -> np.ndarray:
    """Fourier coefficients U^T s."""
    return basis.eigenvectors.T @ _check_dim(basis, s)


def igft(basis: SpectralBasis, coefficients: np.ndarray) -> np.ndarray:
    return basis.eigenvectors @ _check_dim(basis, coefficients)


def apply_filter(basis: SpectralBasis, h: Callable[[np.ndarray], np.ndarray], s: np.ndarray) -> np.ndarray:
    """U h(Lambda) U^T s for a frequency response h evaluated on the eigenvalues."""
    s_hat = gft(basis, s)
    response = np.asarray(h(basis.eigenvalues), dtype=float)
    response = np.broadcast_to(response, basis.eigenvalues.shape)
    if s_hat.ndim > 1:
        response = response[:, None]
    return igft(basis, response * s_hat)


def rayleigh(M: np.ndarray, s: np.ndarray) -> float:
    s = np.asarray(s, dtype=float)
    denom = s @ s
    if denom == 0:
        raise ValueError("Rayleigh quotient of the zero signal")
    return float(s @ np.asarray(M, dtype=float) @ s / denom)


def normalized_laplacian(L: np.ndarray) -> np.ndarray:
    """D^{-1/2} L D^{-1/2} with D = diag(L); rows of isolated nodes stay zero."""
    d = np.diag(L).astype(float)
    inv = np.zeros_like(d)
    inv[d > 0] = 1.0 / np.sqrt(d[d > 0])
    return inv[:, None] * L * inv[None, :]


def laplacian_eigenmap(L: np.ndarray, d: int, normalized: bool = False) -> np.ndarray:
    """Node coordinates from the d lowest nontrivial Laplacian eigenvectors.

    The trivial direction (constant vector, or D^{1/2} 1 when normalized) is
    pushed to the top of the spectrum before diagonalizing, so it is skipped
    even when the graph has several components. Returns an (N, d) array.
    """
    L = np.asarray(L, dtype=float)
    N = L.shape[0]
    if not 0 < d < N:
        raise ValueError(f"need 0 < d < N, got d={d}, N={N}")
    if normalized:
        M = normalized_laplacian(L)
        trivial = np.sqrt(np.clip(np.diag(L), 0.0, None))
    else:
        M = L
        trivial = np.ones(N)
    trivial = trivial / np.linalg.norm(trivial)
    shift = 2.0 * np.abs(M).sum(axis=1).max() + 1.0
    basis = sym_eig(M + shift * np.outer(trivial, trivial))
    return basis.eigenvectors[:, :d]
