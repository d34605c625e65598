"""Symmetric adjacency/Laplacian tensors of hypergraphs, the tensor shift,
orthogonal symmetric CP decomposition and the hypergraph Fourier transform."""

from __future__ import annotations

import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement, permutations

import numpy as np

from .hypergraph import Hypergraph
from .rng import CounterRNG

Key = tuple[int, ...]


def _perm_count(key: Key) -> int:
    """Number of distinct orderings of a multiset."""
    out = math.factorial(len(key))
    for c in Counter(key).values():
        out //= math.factorial(c)
    return out


def _drop_one(key: Key, i: int) -> Key:
    j = key.index(i)
    return key[:j] + key[j + 1:]


@dataclass(frozen=True)
class SymTensor:
    """Symmetric order-m tensor over N indices, stored by sorted index multiset.

    The full tensor has value ``entries[tuple(sorted(idx))]`` at every index
    tuple ``idx``; missing keys are zero. Values may be Fractions (exact) or
    floats. ``kind`` records how the tensor was built.
    """

    order: int
    dim: int
    entries: dict[Key, object] = field(default_factory=dict)
    kind: str = ""

    def __post_init__(self):
        clean = {}
        for key, val in self.entries.items():
            key = tuple(sorted(int(i) for i in key))
            if len(key) != self.order:
                raise ValueError(f"key {key} does not have {self.order} indices")
            if key and (key[0] < 0 or key[-1] >= self.dim):
                raise ValueError(f"key {key} outside 0..{self.dim - 1}")
            total = clean.get(key, 0) + val
            if total == 0:
                clean.pop(key, None)
            else:
                clean[key] = total
        object.__setattr__(self, "entries", clean)

    def __getitem__(self, idx) -> object:
        return self.entries.get(tuple(sorted(idx)), 0)

    def to_dense(self) -> np.ndarray:
        T = np.zeros((self.dim,) * self.order)
        for key, val in self.entries.items():
            for p in set(permutations(key)):
                T[p] = float(val)
        return T

    @classmethod
    def from_dense(cls, T: np.ndarray, tol: float = 0.0, kind: str = "") -> "SymTensor":
        T = np.asarray(T, dtype=float)
        m, N = T.ndim, T.shape[0]
        if any(s != N for s in T.shape):
            raise ValueError("tensor must be cubical")
        entries = {}
        for key in combinations_with_replacement(range(N), m):
            vals = [T[p] for p in set(permutations(key))]
            if max(vals) - min(vals) > 1e-12 * max(1.0, max(abs(v) for v in vals)):
                raise ValueError(f"tensor is not symmetric at {key}")
            if abs(vals[0]) > tol:
                entries[key] = float(vals[0])
        return cls(m, N, entries, kind)

    def frobenius_sq(self) -> float:
        return float(sum(_perm_count(k) * float(v) ** 2 for k, v in self.entries.items()))

    def first_mode_sums(self) -> list:
        """sum_{i2..im} A[i, i2, ..., im] for each i, exact when entries are exact."""
        out = [0] * self.dim
        for key, val in self.entries.items():
            for i in set(key):
                out[i] += val * _perm_count(_drop_one(key, i))
        return out


def _weight(w: float):
    return Fraction(w) if float(w).is_integer() else w


def _weighted_degrees(H: Hypergraph) -> list:
    d = [0] * H.n_vertices
    for e, w in zip(H.hyperedges, H.weights):
        for v in e:
            d[v] += _weight(w)
    return d


def adjacency_tensor(H: Hypergraph, normalization: str = "none") -> SymTensor:
    """Order-k adjacency tensor of a k-uniform hypergraph.

    Each hyperedge sets all permutations of its index tuple to
    ``omega(e) * c`` with c = 1 ("none"), 1/(k-1)! ("cooper"), or
    1/(k-1)! * prod_j deg(v_j)^(-1/k) ("hu", weighted degrees, float).
    """
    if H.n_edges == 0:
        raise ValueError("hypergraph has no hyperedges")
    if not H.is_uniform():
        raise ValueError("hypergraph is not uniform; use adjacency_tensor_general")
    k = H.cardinalities[0]
    deg = _weighted_degrees(H)
    entries: dict[Key, object] = {}
    for e, w in zip(H.hyperedges, H.weights):
        w = _weight(w)
        if normalization == "none":
            val = w
        elif normalization == "cooper":
            val = w * Fraction(1, math.factorial(k - 1))
        elif normalization == "hu":
            val = float(w) / math.factorial(k - 1) * math.prod(float(deg[v]) ** (-1.0 / k) for v in e)
        else:
            raise ValueError(f"unknown normalization {normalization!r}")
        entries[e] = entries.get(e, 0) + val
    return SymTensor(k, H.n_vertices, entries, normalization)


def _compositions(m: int, s: int):
    """All (l_1..l_s) with l_j >= 1 summing to m."""
    if s == 1:
        yield (m,)
        return
    for first in range(1, m - s + 2):
        for rest in _compositions(m - first, s - 1):
            yield (first,) + rest


def general_entry_value(s: int, m: int) -> Fraction:
    """s / sum over compositions of m into s positive parts of m!/(l_1!...l_s!)."""
    total = sum(
        math.factorial(m) // math.prod(math.factorial(l) for l in ls) for ls in _compositions(m, s)
    )
    return Fraction(s, total)


def adjacency_tensor_general(H: Hypergraph) -> SymTensor:
    """Order-m adjacency tensor for hyperedges of mixed size (m = largest size).

    A hyperedge of size s fills every index tuple that uses each of its
    members at least once with omega(e) * general_entry_value(s, m).
    """
    if H.n_edges == 0:
        raise ValueError("hypergraph has no hyperedges")
    m = max(H.cardinalities)
    entries: dict[Key, object] = {}
    for e, w in zip(H.hyperedges, H.weights):
        s = len(e)
        val = _weight(w) * general_entry_value(s, m)
        for ls in _compositions(m, s):
            key = tuple(v for v, l in zip(e, ls) for _ in range(l))
            entries[key] = entries.get(key, 0) + val
    return SymTensor(m, H.n_vertices, entries, "general")


def laplacian_tensor(A: SymTensor, kind: str, H: Hypergraph) -> SymTensor:
    """J - A ("hu", J_{i..i} = 1 where deg > 0) or D - A ("general", D_{i..i} = deg)."""
    if A.dim != H.n_vertices:
        raise ValueError("tensor and hypergraph sizes differ")
    if kind == "hu":
        if A.kind != "hu":
            raise ValueError("hu Laplacian needs the hu-normalized adjacency tensor")
        diag = [1 if d > 0 else 0 for d in _weighted_degrees(H)]
    elif kind == "general":
        if A.kind != "general":
            raise ValueError("general Laplacian needs adjacency_tensor_general")
        diag = _weighted_degrees(H)
    else:
        raise ValueError(f"unknown Laplacian kind {kind!r}")
    entries = {k: -v for k, v in A.entries.items()}
    for i, d in enumerate(diag):
        if d:
            key = (i,) * A.order
            entries[key] = entries.get(key, 0) + d
    return SymTensor(A.order, A.dim, entries, f"laplacian-{kind}")


def _check_signal(S: SymTensor, y: np.ndarray) -> np.ndarray:
    y = np.asarray(y, dtype=float)
    if y.shape != (S.dim,):
        raise ValueError(f"signal has shape {y.shape}, tensor dimension is {S.dim}")
    return y


def hg_shift(S: SymTensor, y: np.ndarray) -> np.ndarray:
    """y_out[i] = sum over j_1..j_{m-1} of S[i, j_1, ..., j_{m-1}] y_{j_1} ... y_{j_{m-1}}.

    Each stored key contributes, for every distinct index i it contains, the
    product over the remaining m-1 indices times the number of their orderings.
    """
    y = _check_signal(S, y)
    out = np.zeros(S.dim)
    for key, val in S.entries.items():
        val = float(val)
        for i in set(key):
            rest = _drop_one(key, i)
            out[i] += val * _perm_count(rest) * math.prod(y[j] for j in rest)
    return out


def shift_jacobian(S: SymTensor, y: np.ndarray) -> np.ndarray:
    """d y_out / d y for the tensor shift (equals (m-1) S y^{m-2} by symmetry)."""
    y = _check_signal(S, y)
    J = np.zeros((S.dim, S.dim))
    for key, val in S.entries.items():
        val = float(val)
        for i in set(key):
            rest = _drop_one(key, i)
            c = val * _perm_count(rest)
            for k, mult in Counter(rest).items():
                J[i, k] += c * mult * math.prod(y[j] for j in _drop_one(rest, k))
    return J


# -- dense helpers used by the CP solver ------------------------------------


def _contract(T: np.ndarray, x: np.ndarray, times: int) -> np.ndarray:
    for _ in range(times):
        T = T @ x
    return T


def _restrict(T: np.ndarray, Q: np.ndarray) -> np.ndarray:
    """T multiplied by Q^T along every mode."""
    # contracting the leading axis appends the new one last, so m passes cycle back
    for _ in range(T.ndim):
        T = np.tensordot(T, Q, axes=([0], [0]))
    return T


def _outer_power(v: np.ndarray, m: int) -> np.ndarray:
    T = np.array(1.0)
    for _ in range(m):
        T = np.multiply.outer(T, v)
    return T


@dataclass(frozen=True)
class HgFourierBasis:
    """Orthonormal basis V (columns); the first ``rank`` carry CP weights.

    ``completed`` marks columns added only to fill out the basis.
    """

    V: np.ndarray
    frequencies: np.ndarray
    rank: int
    order: int
    residual: float
    residual_history: tuple[float, ...]
    converged: tuple[bool, ...]

    @property
    def completed(self) -> np.ndarray:
        flags = np.zeros(self.V.shape[1], dtype=bool)
        flags[self.rank:] = True
        return flags

    def reconstruct(self) -> np.ndarray:
        T = np.zeros((self.V.shape[0],) * self.order)
        for lam, v in zip(self.frequencies, self.V[:, : self.rank].T):
            T += lam * _outer_power(v, self.order)
        return T


def _hopm(T: np.ndarray, x: np.ndarray, shift: float, sign: float, tol: float, max_iter: int) -> tuple[np.ndarray, float, bool]:
    """Shifted symmetric power iteration for the extreme Z-eigenpair of sign * T."""
    m = T.ndim
    lam = sign * float(_contract(T, x, m))
    for _ in range(max_iter):
        y = sign * _contract(T, x, m - 1) + shift * x
        nrm = np.linalg.norm(y)
        if nrm == 0:
            return x, lam, True
        x = y / nrm
        new = sign * float(_contract(T, x, m))
        if abs(new - lam) <= tol * max(1.0, abs(new)):
            return x, new, True
        lam = new
    return x, lam, False


def _newton_polish(T: np.ndarray, x: np.ndarray, lam: float, iters: int = 30) -> tuple[np.ndarray, float]:
    """Newton on [T x^{m-1} - lam x = 0, x^T x = 1]; keeps the best residual seen."""
    m = T.ndim
    d = len(x)

    def resid(x, lam):
        return np.concatenate([_contract(T, x, m - 1) - lam * x, [(1.0 - x @ x) / 2]])

    best = (x, lam, np.linalg.norm(resid(x, lam)))
    for _ in range(iters):
        r = resid(x, lam)
        J = np.zeros((d + 1, d + 1))
        J[:d, :d] = (m - 1) * _contract(T, x, m - 2) - lam * np.eye(d) if m > 2 else T - lam * np.eye(d)
        J[:d, d] = -x
        J[d, :d] = -x
        step = np.linalg.lstsq(J, -r, rcond=None)[0]
        x, lam = x + step[:d], lam + step[d]
        x = x / np.linalg.norm(x)
        lam = float(_contract(T, x, m))
        err = np.linalg.norm(resid(x, lam))
        if err < best[2]:
            best = (x, lam, err)
        if err < 1e-15 * max(1.0, abs(lam)):
            break
    return best[0], best[1]


def _complement(Vs: list[np.ndarray], N: int) -> np.ndarray:
    """Orthonormal basis of span(Vs)^perp by Gram-Schmidt over e_1..e_N in order."""
    basis = [v for v in Vs]
    out = []
    for i in range(N):
        u = np.zeros(N)
        u[i] = 1.0
        for _ in range(2):
            for b in basis + out:
                u = u - (b @ u) * b
        n = np.linalg.norm(u)
        if n > 1e-8:
            out.append(u / n)
        if len(basis) + len(out) == N:
            break
    return np.array(out).T if out else np.zeros((N, 0))


def sym_cp_decompose(
    A: SymTensor | np.ndarray,
    R: int | None = None,
    seed: int = 0,
    restarts: int = 10,
    tol: float = 1e-10,
    max_iter: int = 500,
) -> HgFourierBasis:
    """Greedy orthogonal symmetric CP decomposition A ~ sum_r lam_r v_r^{om}.

    Component r is the largest-|lam| Z-eigenpair of A restricted to the
    orthogonal complement of v_1..v_{r-1}, found by shifted symmetric power
    iteration from ``restarts`` seeded starts (maximizing, and for even order
    also minimizing) followed by Newton refinement. Restricting to the
    complement is the same as deflating, because the removed rank-one terms
    vanish there. Because the v_r are orthonormal, the squared residual equals
    ||A||^2 - sum lam_r^2, which cannot increase with r; it is evaluated
    directly on the deflated tensor to avoid cancellation. When R < N the
    basis is completed by Gram-Schmidt. Non-convergent components are kept and
    reported through ``converged`` and a RuntimeWarning.
    """
    T = A.to_dense() if isinstance(A, SymTensor) else np.asarray(A, dtype=float)
    m, N = T.ndim, T.shape[0]
    if m < 2:
        raise ValueError("order must be at least 2")
    R = N if R is None else R
    if not 0 <= R <= N:
        raise ValueError(f"rank R={R} outside 0..{N}")
    rng = CounterRNG(seed)
    left = T.copy()
    vecs, lams, conv, history = [], [], [], []
    for r in range(R):
        Q = _complement(vecs, N)
        Tr = _restrict(T, Q)
        d = Q.shape[1]
        shift = (m - 1) * float(np.sqrt(np.sum(Tr * Tr)))
        best = None
        for trial in range(restarts):
            x0 = rng.normal(d)
            x0 = x0 / (np.linalg.norm(x0) or 1.0)
            for sign in (1.0, -1.0) if m % 2 == 0 else (1.0,):
                x, lam, ok = _hopm(Tr, x0, shift, sign, tol, max_iter)
                x, lam = _newton_polish(Tr, x, float(_contract(Tr, x, m)))
                if best is None or abs(lam) > abs(best[1]) * (1 + 1e-12) + 1e-15:
                    best = (x, lam, ok)
        x, lam, ok = best
        if m % 2 == 1 and lam < 0:
            x, lam = -x, -lam
        v = Q @ x
        v = v / np.linalg.norm(v)
        vecs.append(v)
        lams.append(lam)
        conv.append(ok)
        left = left - lam * _outer_power(v, m)
        history.append(float(np.sqrt(np.sum(left * left))))
    if not all(conv):
        warnings.warn(f"{conv.count(False)} CP component(s) did not converge", RuntimeWarning, stacklevel=2)
    V = np.column_stack(vecs + list(_complement(vecs, N).T)) if N else np.zeros((0, 0))
    residual = history[-1] if history else float(np.sqrt(np.sum(T * T)))
    return HgFourierBasis(V, np.array(lams), R, m, residual, tuple(history), tuple(conv))


@dataclass(frozen=True)
class HgftCoefficients:
    """(V^T y)^(m-1) with the signs of V^T y kept for inversion."""

    values: np.ndarray
    signs: np.ndarray
    order: int
    ambiguous: bool


def hgft(basis: HgFourierBasis, y: np.ndarray, m: int | None = None) -> HgftCoefficients:
    """Entrywise (m-1)-th power of V^T y. Warns when m-1 is even and signs are lost."""
    m = basis.order if m is None else m
    if m < 2:
        raise ValueError("m must be at least 2")
    y = np.asarray(y, dtype=float)
    if y.shape != (basis.V.shape[0],):
        raise ValueError(f"signal has shape {y.shape}, basis has {basis.V.shape[0]} rows")
    c = basis.V.T @ y
    ambiguous = (m - 1) % 2 == 0 and bool(np.any(c < 0))
    if ambiguous:
        warnings.warn("even power discards signs of V^T y; stored signs are needed to invert", RuntimeWarning, stacklevel=2)
    return HgftCoefficients(c ** (m - 1), np.where(c < 0, -1.0, 1.0), m, ambiguous)


def ihgft(basis: HgFourierBasis, coefficients: HgftCoefficients | np.ndarray, m: int | None = None) -> np.ndarray:
    """V times the entrywise (m-1)-th root.

    With an ``HgftCoefficients`` the stored signs are reapplied. A raw array
    uses the real root for odd m-1 and the nonnegative root for even m-1.
    """
    if isinstance(coefficients, HgftCoefficients):
        p = coefficients.order - 1
        mag = np.abs(coefficients.values) ** (1.0 / p)
        return basis.V @ (coefficients.signs * mag)
    m = basis.order if m is None else m
    c = np.asarray(coefficients, dtype=float)
    p = m - 1
    if p % 2 == 0 and np.any(c < 0):
        raise ValueError("negative coefficient has no real even root")
    return basis.V @ (np.sign(c) * np.abs(c) ** (1.0 / p))
