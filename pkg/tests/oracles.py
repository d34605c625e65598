"""Independent reference computations used by the tests."""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations

import numpy as np

from hosp.complex import build_complex
from hosp.hypergraph import Hypergraph


def exact_rank(M) -> int:
    """Rank by Gaussian elimination over the rationals."""
    rows = [[Fraction(int(v)) if float(v).is_integer() else Fraction(v) for v in r] for r in np.asarray(M).tolist()]
    if not rows or not rows[0]:
        return 0
    rank, ncols = 0, len(rows[0])
    for c in range(ncols):
        pivot = next((r for r in range(rank, len(rows)) if rows[r][c] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        for r in range(len(rows)):
            if r != rank and rows[r][c] != 0:
                q = rows[r][c] / rows[rank][c]
                rows[r] = [a - q * b for a, b in zip(rows[r], rows[rank])]
        rank += 1
    return rank


def random_complex(rng: np.random.Generator, max_nodes: int = 15, p_edge: float = 0.4, p_tri: float = 0.5):
    """Random graph on <= max_nodes vertices, each of its triangles filled with probability p_tri."""
    n = int(rng.integers(3, max_nodes + 1))
    edges = [e for e in combinations(range(n), 2) if rng.random() < p_edge]
    eset = set(edges)
    tris = [t for t in combinations(range(n), 3) if {t[:2], t[1:], (t[0], t[2])} <= eset and rng.random() < p_tri]
    facets = edges + tris + [(v,) for v in range(n)]
    return build_complex(facets, n)


def random_hypergraph(rng: np.random.Generator, max_vertices: int = 12, max_edges: int = 8, weighted: bool = True):
    n = int(rng.integers(3, max_vertices + 1))
    m = int(rng.integers(1, max_edges + 1))
    edges = []
    for _ in range(m):
        k = int(rng.integers(2, min(n, 5) + 1))
        edges.append(tuple(sorted(rng.choice(n, size=k, replace=False).tolist())))
    weights = rng.uniform(0.5, 2.0, size=m).round(3) if weighted else np.ones(m)
    return Hypergraph(n, tuple(edges), tuple(weights.tolist()))


def random_uniform_hypergraph(rng: np.random.Generator, n: int, k: int, m: int):
    edges = {tuple(sorted(rng.choice(n, size=k, replace=False).tolist())) for _ in range(m)}
    return Hypergraph(n, tuple(sorted(edges)))


def skeleton_laplacian(n: int, edges) -> np.ndarray:
    """D - A built directly from degrees and adjacency."""
    A = np.zeros((n, n))
    for a, b in edges:
        A[a, b] = A[b, a] = 1.0
    return np.diag(A.sum(axis=1)) - A


def lovasz_oracle(H: Hypergraph, y: np.ndarray, alpha: float, p: int, fixed: dict | None = None) -> tuple[np.ndarray, float]:
    """Minimize ||x - y||^2 + alpha * Omega_p(x) (or Omega_p alone with fixed
    labels) as a lifted convex program with per-hyperedge max/min variables."""
    import cvxpy as cp

    N = H.n_vertices
    x = cp.Variable(N)
    hi = cp.Variable(H.n_edges)
    lo = cp.Variable(H.n_edges)
    cons = []
    for j, e in enumerate(H.hyperedges):
        cons += [x[list(e)] <= hi[j], x[list(e)] >= lo[j]]
    w = np.array(H.weights)
    span = hi - lo
    reg = w @ span if p == 1 else cp.sum(cp.multiply(w, cp.square(span)))
    if fixed:
        keys = sorted(fixed)
        cons.append(x[keys] == np.array([fixed[k] for k in keys]))
        obj = reg
    else:
        obj = cp.sum_squares(x - y) + alpha * reg
    prob = cp.Problem(cp.Minimize(obj), cons)
    prob.solve(solver=cp.CLARABEL)
    return np.asarray(x.value), float(prob.value)


def _dual_block(z: np.ndarray, c: float) -> np.ndarray:
    """argmax over sum-zero r of <r, z> - |r|^2 / 4 - |r|_1^2 / (16 c).

    The maximizer is positive on the top-a entries of z, negative on the
    bottom-b and zero in between; for each (a, b) the two optimality
    equations are linear in (nu, kappa), so every pattern is tried.
    """
    order = np.argsort(z, kind="stable")
    k = len(z)

    def phi(r):
        return r @ z - r @ r / 4 - np.abs(r).sum() ** 2 / (16 * c)

    best, best_val = np.zeros(k), 0.0
    for a in range(1, k):
        for b in range(1, k - a + 1):
            P, N = order[k - a :], order[:b]
            SP, SN = z[P].sum(), z[N].sum()
            M = np.array([[a + b, a - b], [a - b, a + b + 4 * c]])
            nu, kappa = np.linalg.solve(M, [SP + SN, SP - SN])
            r = np.zeros(k)
            r[P] = 2 * (z[P] - nu - kappa)
            r[N] = 2 * (z[N] - nu + kappa)
            val = phi(r)
            if val > best_val:
                best, best_val = r, val
    return best


def dual_coordinate_oracle(H: Hypergraph, y: np.ndarray, alpha: float, sweeps: int = 200000, tol: float = 1e-14):
    """Block coordinate ascent on the dual of ||x - y||^2 + alpha * sum_e w_e (max x_e - min x_e)^2.

    The dual is max_r <R, y> - |R|^2 / 4 - sum_e |r_e|_1^2 / (16 alpha w_e)
    with R = sum_e r_e and each r_e supported on e with zero sum. Its
    nonsmooth part separates over hyperedges, so exact cyclic block updates
    converge to the optimum. Returns (x, primal objective, converged).
    """
    y = np.asarray(y, dtype=float)
    idx = [np.array(e) for e in H.hyperedges]
    cs = alpha * np.asarray(H.weights, dtype=float)
    r = [np.zeros(len(e)) for e in idx]
    R = np.zeros(H.n_vertices)
    converged = False
    for _ in range(sweeps):
        moved = 0.0
        for j, e in enumerate(idx):
            R[e] -= r[j]
            new = _dual_block(y[e] - R[e] / 2, cs[j])
            moved = max(moved, float(np.max(np.abs(new - r[j]))))
            r[j] = new
            R[e] += new
        if moved <= tol:
            converged = True
            break
    x = y - R / 2
    obj = float((x - y) @ (x - y) + sum(c * (x[e].max() - x[e].min()) ** 2 for c, e in zip(cs, idx)))
    return x, obj, converged
