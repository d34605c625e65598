"""Weighted hypergraphs, their incidence matrix, dual, and graph expansions."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np


@dataclass(frozen=True)
class Hypergraph:
    """Vertices 0..n_vertices-1 and weighted hyperedges (sorted vertex tuples).

    Duplicate hyperedges are kept; ``duplicates`` lists the indices of every
    hyperedge that repeats an earlier one.
    """

    n_vertices: int
    hyperedges: tuple[tuple[int, ...], ...]
    weights: tuple[float, ...] = ()
    duplicates: tuple[int, ...] = field(init=False, compare=False)

    def __post_init__(self):
        edges = tuple(tuple(sorted(set(int(v) for v in e))) for e in self.hyperedges)
        weights = tuple(float(w) for w in self.weights) if self.weights else (1.0,) * len(edges)
        if len(weights) != len(edges):
            raise ValueError(f"{len(weights)} weights for {len(edges)} hyperedges")
        for e in edges:
            if not e:
                raise ValueError("empty hyperedge")
            if e[0] < 0 or e[-1] >= self.n_vertices:
                raise ValueError(f"hyperedge {e} has a vertex outside 0..{self.n_vertices - 1}")
        if any(not w > 0 for w in weights):
            raise ValueError("hyperedge weights must be positive")
        seen, dup = set(), []
        for i, e in enumerate(edges):
            if e in seen:
                dup.append(i)
            seen.add(e)
        object.__setattr__(self, "hyperedges", edges)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "duplicates", tuple(dup))

    @property
    def n_edges(self) -> int:
        return len(self.hyperedges)

    @property
    def cardinalities(self) -> list[int]:
        return [len(e) for e in self.hyperedges]

    def is_uniform(self, k: int | None = None) -> bool:
        sizes = set(self.cardinalities)
        return len(sizes) <= 1 and (k is None or sizes <= {k})

    def degrees(self) -> np.ndarray:
        """Number of hyperedges containing each vertex (unweighted)."""
        d = np.zeros(self.n_vertices, dtype=int)
        for e in self.hyperedges:
            d[list(e)] += 1
        return d

    @classmethod
    def from_graph(cls, n_vertices: int, edges: Iterable[Sequence[int]], weights: Sequence[float] = ()) -> "Hypergraph":
        return cls(n_vertices, tuple(tuple(e) for e in edges), tuple(weights))


def incidence(H: Hypergraph) -> tuple[np.ndarray, np.ndarray]:
    """0/1 vertex-by-hyperedge matrix Z and diagonal weight matrix W."""
    Z = np.zeros((H.n_vertices, H.n_edges))
    for j, e in enumerate(H.hyperedges):
        Z[list(e), j] = 1.0
    return Z, np.diag(np.asarray(H.weights, dtype=float))


@dataclass(frozen=True)
class ExpansionGraph:
    """Weighted graph from a hypergraph; ``provenance[i]`` says what node i stands for.

    Provenance entries are ("vertex", v), ("hyperedge", e) or ("incidence", (v, e)).
    """

    adjacency: np.ndarray
    provenance: tuple[tuple[str, object], ...]
    kind: str = ""

    @property
    def n_nodes(self) -> int:
        return self.adjacency.shape[0]


def _zero_diag(A: np.ndarray) -> np.ndarray:
    A = A.copy()
    np.fill_diagonal(A, 0.0)
    return A


def star_expansion(H: Hypergraph) -> ExpansionGraph:
    """Bipartite vertex/hyperedge graph [[0, ZW], [WZ^T, 0]]."""
    Z, W = incidence(H)
    N, E = Z.shape
    A = np.zeros((N + E, N + E))
    A[:N, N:] = Z @ W
    A[N:, :N] = W @ Z.T
    prov = tuple(("vertex", v) for v in range(N)) + tuple(("hyperedge", e) for e in range(E))
    return ExpansionGraph(A, prov, "star")


def clique_expansion(H: Hypergraph) -> ExpansionGraph:
    """Each hyperedge becomes a clique; pair weight = sum of weights of hyperedges holding both."""
    Z, W = incidence(H)
    return ExpansionGraph(_zero_diag(Z @ W @ Z.T), tuple(("vertex", v) for v in range(H.n_vertices)), "clique")


def line_graph(H: Hypergraph) -> ExpansionGraph:
    """Hyperedge graph weighted by the number of shared vertices (off-diagonal of Z^T Z)."""
    Z, _ = incidence(H)
    return ExpansionGraph(_zero_diag(Z.T @ Z), tuple(("hyperedge", e) for e in range(H.n_edges)), "line_graph")


def line_expansion(H: Hypergraph) -> ExpansionGraph:
    """Graph on incident (vertex, hyperedge) pairs; unit edge when they share either member."""
    pairs = [(v, j) for j, e in enumerate(H.hyperedges) for v in e]
    pairs.sort()
    n = len(pairs)
    A = np.zeros((n, n))
    for a in range(n):
        for b in range(a + 1, n):
            if pairs[a][0] == pairs[b][0] or pairs[a][1] == pairs[b][1]:
                A[a, b] = A[b, a] = 1.0
    return ExpansionGraph(A, tuple(("incidence", p) for p in pairs), "line_expansion")


def dual(H: Hypergraph) -> Hypergraph:
    """Swap roles: vertex v of H becomes hyperedge {e : v in e}, weight 1.

    Raises ValueError if some vertex lies in no hyperedge, since it would
    become an empty hyperedge.
    """
    members = [[] for _ in range(H.n_vertices)]
    for j, e in enumerate(H.hyperedges):
        for v in e:
            members[v].append(j)
    empty = [v for v, m in enumerate(members) if not m]
    if empty:
        raise ValueError(f"vertices {empty} belong to no hyperedge; dual would have empty hyperedges")
    return Hypergraph(H.n_edges, tuple(tuple(m) for m in members))


EXPANSIONS = {
    "star": star_expansion,
    "clique": clique_expansion,
    "line_graph": line_graph,
    "line_expansion": line_expansion,
    "dual": dual,
}


def expand(H: Hypergraph, kind: str) -> ExpansionGraph | Hypergraph:
    try:
        return EXPANSIONS[kind](H)
    except KeyError:
        raise ValueError(f"unknown expansion {kind!r}; choose from {sorted(EXPANSIONS)}") from None


def expansion_laplacian(G: ExpansionGraph | np.ndarray, normalized: bool = False) -> np.ndarray:
    """D - A, or I - D^{-1/2} A D^{-1/2} with zero rows for isolated nodes."""
    A = G.adjacency if isinstance(G, ExpansionGraph) else np.asarray(G, dtype=float)
    d = A.sum(axis=1)
    if not normalized:
        return np.diag(d) - A
    inv = np.zeros_like(d)
    inv[d > 0] = 1.0 / np.sqrt(d[d > 0])
    return np.diag((d > 0).astype(float)) - inv[:, None] * A * inv[None, :]


def graph_laplacian(n_vertices: int, edges: Sequence[Sequence[int]], weights: Sequence[float] | None = None) -> np.ndarray:
    """Weighted combinatorial Laplacian of an ordinary graph."""
    L = np.zeros((n_vertices, n_vertices))
    w = np.ones(len(edges)) if weights is None else np.asarray(weights, dtype=float)
    for (a, b), c in zip(edges, w):
        L[a, a] += c
        L[b, b] += c
        L[a, b] -= c
        L[b, a] -= c
    return L
