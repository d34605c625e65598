"""Oriented simplicial complexes and their boundary operators."""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

import numpy as np

from .rng import CounterRNG

Simplex = tuple[int, ...]


@dataclass(frozen=True)
class SimplicialComplex:
    """Simplices grouped by order, each a strictly increasing vertex tuple.

    ``simplices[k]`` lists the k-simplices in lexicographic order; that order
    is the canonical index used by every signal and matrix on the complex.
    Instances built by :func:`build_complex` satisfy inclusion closure; a raw
    instance may not, which is what :func:`validate` is for.
    """

    n_vertices: int
    simplices: tuple[tuple[Simplex, ...], ...]
    positions: np.ndarray | None = field(default=None, compare=False, repr=False)

    @property
    def order(self) -> int:
        """Top simplex order K (-1 for the empty complex)."""
        return len(self.simplices) - 1

    def count(self, k: int) -> int:
        if 0 <= k < len(self.simplices):
            return len(self.simplices[k])
        return 0

    @property
    def shape(self) -> tuple[int, ...]:
        return tuple(len(s) for s in self.simplices)

    def index(self, k: int) -> dict[Simplex, int]:
        return {s: i for i, s in enumerate(self.simplices[k])}

    def facets(self) -> list[Simplex]:
        """Simplices that are not a face of any other simplex."""
        out = []
        for k, level in enumerate(self.simplices):
            covered = set()
            if k + 1 < len(self.simplices):
                for s in self.simplices[k + 1]:
                    covered.update(combinations(s, k + 1))
            out.extend(s for s in level if s not in covered)
        return out


def build_complex(facets: Iterable[Iterable[int]], n_vertices: int) -> SimplicialComplex:
    """Close ``facets`` under taking subsets and index everything canonically.

    Every vertex ``0..n_vertices-1`` becomes a 0-simplex, whether or not a facet
    mentions it.
    """
    levels: list[set[Simplex]] = [set((v,) for v in range(n_vertices))]
    for facet in facets:
        simplex = tuple(sorted(set(int(v) for v in facet)))
        if not simplex:
            raise ValueError("empty facet")
        if simplex[0] < 0 or simplex[-1] >= n_vertices:
            raise ValueError(f"facet {simplex} has a vertex outside 0..{n_vertices - 1}")
        while len(levels) < len(simplex):
            levels.append(set())
        for size in range(2, len(simplex) + 1):
            levels[size - 1].update(combinations(simplex, size))
    if n_vertices == 0:
        levels = []
    return SimplicialComplex(n_vertices, tuple(tuple(sorted(level)) for level in levels))


def boundary_matrix(X: SimplicialComplex, k: int) -> np.ndarray:
    """Integer matrix B_k of shape (N_{k-1}, N_k).

    Entry (f, s) is (-1)**j when f is s with its j-th vertex deleted.
    """
    if not 1 <= k <= X.order:
        raise ValueError(f"boundary order k={k} outside 1..{X.order}")
    rows = X.index(k - 1)
    B = np.zeros((X.count(k - 1), X.count(k)), dtype=np.int64)
    for col, s in enumerate(X.simplices[k]):
        for j in range(len(s)):
            B[rows[s[:j] + s[j + 1:]], col] = -1 if j % 2 else 1
    return B


def boundary_or_zero(X: SimplicialComplex, k: int) -> np.ndarray:
    """B_k, or an all-zero block of the right shape when order k is absent."""
    if 1 <= k <= X.order:
        return boundary_matrix(X, k)
    return np.zeros((X.count(k - 1), X.count(k)), dtype=np.int64)


@dataclass(frozen=True)
class Violation:
    kind: str
    simplex: Simplex
    message: str


def validate(X: SimplicialComplex) -> Violation | None:
    """First ordering or inclusion-closure violation, or None when X is valid."""
    for k, level in enumerate(X.simplices):
        seen = set()
        prev = None
        for s in level:
            if len(s) != k + 1:
                return Violation("cardinality", s, f"{s} listed among {k}-simplices")
            if any(a >= b for a, b in zip(s, s[1:])):
                return Violation("orientation", s, f"{s} is not strictly increasing")
            if s[0] < 0 or s[-1] >= X.n_vertices:
                return Violation("range", s, f"{s} has a vertex outside 0..{X.n_vertices - 1}")
            if s in seen:
                return Violation("duplicate", s, f"{s} appears twice")
            if prev is not None and s < prev:
                return Violation("ordering", s, f"{s} listed after {prev}")
            seen.add(s)
            prev = s
    for k in range(1, len(X.simplices)):
        lower = set(X.simplices[k - 1])
        for s in X.simplices[k]:
            for face in combinations(s, k):
                if face not in lower:
                    return Violation("closure", s, f"face {face} of {s} is missing")
    return None


# -- Delaunay lattices ------------------------------------------------------


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def _in_circumcircle(a, b, c, p) -> bool:
    """True if p lies strictly inside the circumcircle of ccw triangle abc."""
    ax, ay = a[0] - p[0], a[1] - p[1]
    bx, by = b[0] - p[0], b[1] - p[1]
    cx, cy = c[0] - p[0], c[1] - p[1]
    det = (
        (ax * ax + ay * ay) * (bx * cy - cx * by)
        - (bx * bx + by * by) * (ax * cy - cx * ay)
        + (cx * cx + cy * cy) * (ax * by - bx * ay)
    )
    return det > 0.0


def bowyer_watson(points: np.ndarray) -> list[Simplex]:
    """Delaunay triangles of 2-D points by incremental Bowyer-Watson insertion.

    Returns sorted vertex triples. Raises ValueError if all points are collinear.
    """
    pts = np.asarray(points, dtype=float)
    n = len(pts)
    if n < 3:
        raise ValueError("need at least 3 points")
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ValueError("points must be an (n, 2) array")
    if np.linalg.matrix_rank(pts[1:] - pts[0], tol=1e-12 * max(1.0, np.ptp(pts))) < 2:
        raise ValueError("all points are collinear")

    lo, hi = pts.min(axis=0), pts.max(axis=0)
    center = (lo + hi) / 2
    span = max(hi - lo) or 1.0
    big = 1e4 * span
    work = [tuple(p) for p in pts] + [
        (center[0] - big, center[1] - big),
        (center[0] + big, center[1] - big),
        (center[0], center[1] + big),
    ]
    tris: set[tuple[int, int, int]] = {(n, n + 1, n + 2)}  # ccw

    for i in range(n):
        p = work[i]
        bad = [t for t in tris if _in_circumcircle(work[t[0]], work[t[1]], work[t[2]], p)]
        edge_count: dict[tuple[int, int], int] = {}
        directed = {}
        for t in bad:
            for a, b in ((t[0], t[1]), (t[1], t[2]), (t[2], t[0])):
                key = (min(a, b), max(a, b))
                edge_count[key] = edge_count.get(key, 0) + 1
                directed[key] = (a, b)
        for t in bad:
            tris.discard(t)
        for key, cnt in edge_count.items():
            if cnt == 1:
                a, b = directed[key]
                if _orient(work[a], work[b], p) > 0:
                    tris.add((a, b, i))
                else:
                    tris.add((b, a, i))

    return sorted(tuple(sorted(t)) for t in tris if max(t) < n)


def delaunay_complex(
    points: np.ndarray,
    hole_centers: Sequence[Sequence[float]] = (),
    seed: int | None = None,
) -> SimplicialComplex:
    """Delaunay lattice with one vertex punched out per hole center.

    Every Delaunay triangle becomes a 2-simplex. For each hole center the
    nearest vertex (lowest index on ties) is deleted together with all of its
    incident simplices, which leaves an unfilled cycle around it. Remaining
    vertices are renumbered in their original order and their coordinates are
    kept in ``positions``.

    ``points`` may also be an integer count, in which case that many points are
    drawn uniformly from the unit square with ``CounterRNG(seed)``.
    """
    if np.isscalar(points):
        pts = CounterRNG(0 if seed is None else seed).uniform((int(points), 2))
    else:
        pts = np.asarray(points, dtype=float)
    triangles = bowyer_watson(pts)

    removed = set()
    for c in hole_centers:
        d = np.linalg.norm(pts - np.asarray(c, dtype=float), axis=1)
        removed.add(int(np.argmin(d)))
    keep = [v for v in range(len(pts)) if v not in removed]
    relabel = {v: i for i, v in enumerate(keep)}
    facets = [tuple(relabel[v] for v in t) for t in triangles if not removed.intersection(t)]
    X = build_complex(facets, len(keep))
    return SimplicialComplex(X.n_vertices, X.simplices, positions=pts[keep])
