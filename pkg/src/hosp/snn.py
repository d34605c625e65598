"""Forward passes of graph and simplicial convolutional networks, with property checks."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .complex import SimplicialComplex, boundary_or_zero
from .rng import CounterRNG

Activation = Callable[[np.ndarray], np.ndarray]

ACTIVATIONS: dict[str, Activation] = {
    "identity": lambda x: x,
    "tanh": np.tanh,
    "relu": lambda x: np.maximum(x, 0.0),
}
ODD = {"identity", "tanh"}


def is_odd(sigma: Activation, grid: np.ndarray | None = None, tol: float = 1e-12) -> bool:
    """Sampled check of sigma(-x) == -sigma(x)."""
    x = np.linspace(-5.0, 5.0, 201) if grid is None else np.asarray(grid, dtype=float)
    a, b = np.asarray(sigma(-x), dtype=float), -np.asarray(sigma(x), dtype=float)
    return bool(np.all(np.abs(a - b) <= tol * np.maximum(1.0, np.abs(b))))


def resolve_activation(activation: str | Activation) -> tuple[str, Activation]:
    if callable(activation):
        if not is_odd(activation):
            raise ValueError("custom activation is not odd")
        return "odd-custom", activation
    try:
        return activation, ACTIVATIONS[activation]
    except KeyError:
        raise ValueError(f"unknown activation {activation!r}") from None


@dataclass(frozen=True)
class LayerStack:
    """Weights W_1..W_K (W_k is F_{k-1} x F_k) and a shared activation.

    ``activation`` is a tag from ACTIVATIONS or an odd callable.
    """

    weights: tuple[np.ndarray, ...]
    activation: str | Activation = "identity"
    sigma: Activation = field(init=False, repr=False, compare=False)
    tag: str = field(init=False, compare=False)

    def __post_init__(self):
        ws = tuple(np.atleast_2d(np.asarray(w, dtype=float)) for w in self.weights)
        for k in range(1, len(ws)):
            if ws[k - 1].shape[1] != ws[k].shape[0]:
                raise ValueError(f"layer {k} outputs {ws[k - 1].shape[1]} features, layer {k + 1} expects {ws[k].shape[0]}")
        tag, sigma = resolve_activation(self.activation)
        object.__setattr__(self, "weights", ws)
        object.__setattr__(self, "sigma", sigma)
        object.__setattr__(self, "tag", tag)

    @property
    def depth(self) -> int:
        return len(self.weights)

    @property
    def dims(self) -> list[int]:
        if not self.weights:
            return []
        return [self.weights[0].shape[0]] + [w.shape[1] for w in self.weights]

    @classmethod
    def identity(cls, depth: int, features: int = 1, activation: str | Activation = "identity") -> "LayerStack":
        return cls(tuple(np.eye(features) for _ in range(depth)), activation)


def gcn_forward(H: np.ndarray, Y0: np.ndarray, stack: LayerStack) -> np.ndarray:
    """Y_k = sigma(H Y_{k-1} W_k), k = 1..K. A 1-D Y0 is treated as one feature column."""
    H = np.asarray(H, dtype=float)
    Y = np.asarray(Y0, dtype=float)
    flat = Y.ndim == 1
    if flat:
        Y = Y[:, None]
    if H.shape != (Y.shape[0], Y.shape[0]):
        raise ValueError(f"filter {H.shape} does not act on {Y.shape[0]} nodes")
    for k, W in enumerate(stack.weights, start=1):
        if Y.shape[1] != W.shape[0]:
            raise ValueError(f"layer {k} expects {W.shape[0]} features, got {Y.shape[1]}")
        Y = stack.sigma(H @ Y @ W)
    return Y[:, 0] if flat and Y.shape[1] == 1 else Y


@dataclass(frozen=True)
class SimplicialOperators:
    """Boundary and Hodge-Laplacian blocks of a complex up to order 2."""

    B1: np.ndarray
    B2: np.ndarray

    @classmethod
    def from_complex(cls, X: SimplicialComplex) -> "SimplicialOperators":
        if X.order < 1:
            raise ValueError("complex has no edges")
        return cls(boundary_or_zero(X, 1).astype(float), boundary_or_zero(X, 2).astype(float))

    @property
    def L0(self) -> np.ndarray:
        return self.B1 @ self.B1.T

    @property
    def L1(self) -> np.ndarray:
        return self.B1.T @ self.B1 + self.B2 @ self.B2.T

    @property
    def L2(self) -> np.ndarray:
        return self.B2.T @ self.B2

    def flipped(self, theta: np.ndarray) -> "SimplicialOperators":
        """Operators after re-orienting edges by the diagonal +-1 matrix Theta."""
        theta = _check_flip(theta, self.B1.shape[1])
        return SimplicialOperators(self.B1 * theta[None, :], theta[:, None] * self.B2)


def _check_flip(theta: np.ndarray, n_edges: int) -> np.ndarray:
    theta = np.asarray(theta, dtype=float)
    if theta.shape != (n_edges,):
        raise ValueError(f"flip vector has shape {theta.shape}, expected ({n_edges},)")
    if not np.all(np.abs(theta) == 1):
        raise ValueError("flip entries must be +1 or -1")
    return theta


def orientation_flip(X: SimplicialComplex | SimplicialOperators, theta: np.ndarray, f: np.ndarray | None = None) -> dict:
    """Theta f, Theta L_1 Theta, Theta B_2 and B_1 Theta for an edge re-orientation."""
    ops = X if isinstance(X, SimplicialOperators) else SimplicialOperators.from_complex(X)
    new = ops.flipped(theta)
    theta = np.asarray(theta, dtype=float)
    out = {"L1": new.L1, "B1": new.B1, "B2": new.B2}
    if f is not None:
        f = np.asarray(f, dtype=float)
        out["f"] = theta * f if f.ndim == 1 else theta[:, None] * f
    return out


def _as_block(x, n: int, trailing: tuple[int, ...]) -> np.ndarray:
    if x is None:
        return np.zeros((n,) + trailing)
    x = np.asarray(x, dtype=float)
    if x.shape[0] != n:
        raise ValueError(f"signal of length {x.shape[0]} where {n} was expected")
    return x


def snn_forward(
    X: SimplicialComplex | SimplicialOperators,
    inputs: Sequence[np.ndarray | None],
    depth: int,
    activation: str | Activation = "identity",
    weights: Sequence[Sequence[np.ndarray]] | None = None,
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Three-level message passing between nodes, edges and triangles.

    Each layer computes, from the previous layer's (v, f, t)::

        v <- sigma(L0 v + B1 f)
        f <- sigma(L1 f + B2 t + B1^T v)
        t <- sigma(L2 t + B2^T f)

    ``weights``, if given, holds one (W_v, W_f, W_t) triple per layer that
    right-multiplies each level before the activation. Without it the layers
    are weightless. A complex without triangles has empty t and zero B2.
    """
    ops = X if isinstance(X, SimplicialOperators) else SimplicialOperators.from_complex(X)
    if depth < 0:
        raise ValueError("depth must be non-negative")
    if weights is not None and len(weights) != depth:
        raise ValueError(f"{len(weights)} weight triples for depth {depth}")
    _, sigma = resolve_activation(activation)
    N0, N1 = ops.B1.shape
    N2 = ops.B2.shape[1]
    v, f, t = inputs if len(inputs) == 3 else (*inputs, None)
    given = [np.shape(x)[1:] for x in (v, f, t) if x is not None]
    trailing = given[0] if given else ()
    v, f, t = _as_block(v, N0, trailing), _as_block(f, N1, trailing), _as_block(t, N2, trailing)
    L0, L1, L2, B1, B2 = ops.L0, ops.L1, ops.L2, ops.B1, ops.B2
    for layer in range(depth):
        nv = L0 @ v + B1 @ f
        nf = L1 @ f + B2 @ t + B1.T @ v
        nt = L2 @ t + B2.T @ f
        if weights is not None:
            Wv, Wf, Wt = (np.atleast_2d(np.asarray(w, dtype=float)) for w in weights[layer])
            nv, nf, nt = _right(nv, Wv), _right(nf, Wf), _right(nt, Wt)
        v, f, t = sigma(nv), sigma(nf), sigma(nt)
    return v, f, t


def _right(x: np.ndarray, W: np.ndarray) -> np.ndarray:
    if x.ndim == 1:
        if W.shape != (1, 1):
            raise ValueError("1-D signals take 1x1 weights")
        return x * W[0, 0]
    return x @ W


def snn_depth2_closed_form(ops: SimplicialOperators, v0, f0, t0) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Two weightless linear layers written out as polynomials in the operators."""
    L0, L1, L2, B1, B2 = ops.L0, ops.L1, ops.L2, ops.B1, ops.B2
    I0, I1, I2 = (np.eye(n) for n in (L0.shape[0], L1.shape[0], L2.shape[0]))
    v2 = 2 * L0 @ B1 @ f0 + L0 @ (L0 + I0) @ v0
    f2 = (L1 @ B2 + B2 @ L2) @ t0 + L1 @ (L1 + I1) @ f0 + (L1 + B1.T @ B1) @ B1.T @ v0
    t2 = L2 @ (L2 + I2) @ t0 + (L2 @ B2.T + B2.T @ L1) @ f0
    return v2, f2, t2


@dataclass(frozen=True)
class EquivarianceReport:
    deviation: float
    activation: str


def check_orientation_equivariance(
    X: SimplicialComplex | SimplicialOperators,
    f: np.ndarray,
    theta: np.ndarray,
    stack: LayerStack,
    architecture: str = "gcn",
) -> EquivarianceReport:
    """max |g'(Theta f) - Theta g(f)| where g' runs on the re-oriented operators.

    ``architecture`` "gcn" applies the stack with H = L_1 to the edge signal;
    "snn" runs ``stack.depth`` weightless simplicial layers with v = t = 0 inputs
    and compares the edge outputs.
    """
    ops = X if isinstance(X, SimplicialOperators) else SimplicialOperators.from_complex(X)
    theta = _check_flip(theta, ops.B1.shape[1])
    flipped = ops.flipped(theta)
    f = np.asarray(f, dtype=float)
    tf = theta * f if f.ndim == 1 else theta[:, None] * f
    if architecture == "gcn":
        plain = gcn_forward(ops.L1, f, stack)
        moved = gcn_forward(flipped.L1, tf, stack)
    elif architecture == "snn":
        plain = snn_forward(ops, (None, f, None), stack.depth, stack.sigma)[1]
        moved = snn_forward(flipped, (None, tf, None), stack.depth, stack.sigma)[1]
    else:
        raise ValueError(f"unknown architecture {architecture!r}")
    expect = theta * plain if plain.ndim == 1 else theta[:, None] * plain
    return EquivarianceReport(float(np.max(np.abs(moved - expect), initial=0.0)), stack.tag)


def random_flip(n_edges: int, rng: CounterRNG) -> np.ndarray:
    return rng.signs(n_edges)


def search_counterexample(
    X: SimplicialComplex | SimplicialOperators,
    stack: LayerStack,
    draws: int = 100,
    seed: int = 0,
    threshold: float = 1e-3,
    architecture: str = "gcn",
) -> tuple[np.ndarray, np.ndarray, float] | None:
    """First random (f, Theta) whose equivariance deviation exceeds ``threshold``."""
    ops = X if isinstance(X, SimplicialOperators) else SimplicialOperators.from_complex(X)
    rng = CounterRNG(seed)
    n = ops.B1.shape[1]
    for _ in range(draws):
        f = rng.normal(n)
        theta = rng.signs(n)
        dev = check_orientation_equivariance(ops, f, theta, stack, architecture).deviation
        if dev > threshold:
            return f, theta, dev
    return None
