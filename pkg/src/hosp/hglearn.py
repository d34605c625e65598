"""Denoising and interpolation of hypergraph vertex signals.

Regularizers: the quadratic form of the clique expansion, the Lovász
extension of the hypergraph cut (p = 1 or 2), and a tensor total variation
built from the hypergraph shift.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .flows import denoise_node, interpolate_node
from .hypergraph import Hypergraph, clique_expansion, expansion_laplacian
from .tensor import adjacency_tensor_general, hg_shift, shift_jacobian, sym_cp_decompose

KINDS = ("quadratic_clique", "lovasz_p1", "lovasz_p2", "tensor_tv")


@dataclass(frozen=True)
class RegularizerSpec:
    kind: str
    alpha: float
    max_iter: int = 10_000
    tol: float = 1e-13
    step_rule: str = "armijo"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown regularizer {self.kind!r}; choose from {KINDS}")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if self.step_rule != "armijo":
            raise ValueError("only the armijo step rule is implemented")

    @property
    def p(self) -> int | None:
        return {"lovasz_p1": 1, "lovasz_p2": 2}.get(self.kind)


@dataclass
class SolverResult:
    """Estimate plus diagnostics.

    ``objective_history`` holds the objective at each accepted iterate and is
    non-increasing. ``gap`` is a certified bound on objective - optimum where
    the solver provides one (Lovász kinds), else NaN.
    """

    x: np.ndarray
    objective: float
    objective_history: list[float] = field(default_factory=list)
    converged: bool = True
    iterations: int = 0
    gap: float = float("nan")


def lovasz_tv(H: Hypergraph, y: np.ndarray, p: int = 1) -> float:
    """sum_e omega(e) (max_{u in e} y_u - min_{v in e} y_v)^p."""
    if p not in (1, 2):
        raise ValueError("p must be 1 or 2")
    y = np.asarray(y, dtype=float)
    return float(sum(w * (y[list(e)].max() - y[list(e)].min()) ** p for e, w in zip(H.hyperedges, H.weights)))


# -- Lovász extension: dual solver ------------------------------------------
#
# For p = 2, alpha * omega * (max x_e - min x_e)^2 equals
#     max over mu_e, nu_e >= 0 with sum(mu_e) = sum(nu_e) = c_e of
#     (mu_e - nu_e)^T x_e - c_e^2 / (4 alpha omega),
# and for p = 1 the same without the c_e^2 term but with c_e <= alpha omega.
# Minimizing over x in closed form (x = z - g/2 on free vertices, g the
# vertex sums of mu - nu) leaves a concave quadratic in (mu, nu) that is
# maximized by accelerated projected gradient. Every dual iterate yields a
# primal point, and primal minus dual objective bounds the suboptimality.


def _project_balanced(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Row-wise projection of (a, b) onto {mu, nu >= 0, sum mu = sum nu}.

    The solution is mu = max(a - t, 0), nu = max(b + t, 0) where t balances
    the two sums; the balance function is piecewise linear and decreasing in
    t, so t is found between consecutive sorted breakpoints.
    """
    bp = np.sort(np.concatenate([a, -b], axis=1), axis=1)

    def balance(t):
        return np.maximum(a[:, :, None] - t[:, None, :], 0).sum(1) - np.maximum(b[:, :, None] + t[:, None, :], 0).sum(1)

    h = balance(bp)  # (rows, n_breakpoints), non-increasing along axis 1
    idx = np.maximum((h >= 0).sum(axis=1) - 1, 0)
    rows = np.arange(len(a))
    t0 = bp[rows, idx]
    h0 = h[rows, idx]
    nxt = bp[rows, np.minimum(idx + 1, bp.shape[1] - 1)]
    mid = np.where(nxt > t0, (t0 + nxt) / 2, t0 + 1.0)
    slope = (a > mid[:, None]).sum(1) + (b > -mid[:, None]).sum(1)
    t = t0 + np.where(slope > 0, h0 / np.maximum(slope, 1), 0.0)
    return np.maximum(a - t[:, None], 0), np.maximum(b + t[:, None], 0)


def _project_simplex(a: np.ndarray, total: np.ndarray) -> np.ndarray:
    """Row-wise Euclidean projection onto {x >= 0, sum x = total}."""
    s = -np.sort(-a, axis=1)
    cs = np.cumsum(s, axis=1) - total[:, None]
    k = np.arange(1, a.shape[1] + 1)
    cond = s - cs / k > 0
    r = cond.shape[1] - 1 - np.argmax(cond[:, ::-1], axis=1)
    theta = cs[np.arange(len(a)), r] / (r + 1)
    return np.maximum(a - theta[:, None], 0)


class _LovaszDual:
    def __init__(self, H: Hypergraph, z: np.ndarray, alpha: float, p: int, fixed: np.ndarray):
        self.H, self.z, self.alpha, self.p = H, z, alpha, p
        self.fixed = fixed
        self.N = H.n_vertices
        self.w = np.asarray(H.weights, dtype=float)
        groups: dict[int, list[int]] = {}
        for j, e in enumerate(H.hyperedges):
            groups.setdefault(len(e), []).append(j)
        # per cardinality: hyperedge ids and member matrix
        self.groups = [(np.array(ids), np.array([H.hyperedges[j] for j in ids])) for ids in groups.values()]
        self.cap = alpha * self.w if p == 1 else None
        deg = np.zeros(self.N)
        for e in H.hyperedges:
            deg[list(e)] += 1
        L = deg.max(initial=1.0)
        if p == 2:
            L += max(len(e) / (2 * alpha * w) for e, w in zip(H.hyperedges, self.w))
        self.L0 = L

    def zeros(self):
        return [(np.zeros(M.shape), np.zeros(M.shape)) for _, M in self.groups]

    def g(self, z):
        g = np.zeros(self.N)
        for (_, M), (mu, nu) in zip(self.groups, z):
            np.add.at(g, M, mu - nu)
        return g

    def primal(self, g):
        return np.where(self.fixed, self.z, self.z - g / 2)

    def value(self, z):
        g = self.g(z)
        free = ~self.fixed
        D = float(g[free] @ self.z[free] - g[free] @ g[free] / 4 + g[self.fixed] @ self.z[self.fixed])
        if self.p == 2:
            for (ids, _), (mu, _) in zip(self.groups, z):
                c = mu.sum(axis=1)
                D -= float(np.sum(c * c / (4 * self.alpha * self.w[ids])))
        return D, g

    def grad(self, z, g):
        x = self.primal(g)
        out = []
        for (ids, M), (mu, _) in zip(self.groups, z):
            xe = x[M]
            if self.p == 2:
                pen = (mu.sum(axis=1) / (2 * self.alpha * self.w[ids]))[:, None]
            else:
                pen = 0.0
            # c_e is read off mu, so only mu feels the c_e^2 term
            out.append((xe - pen, -xe))
        return out

    def project(self, z):
        out = []
        for (ids, _), (a, b) in zip(self.groups, z):
            mu, nu = _project_balanced(a, b)
            if self.p == 1:
                cap = self.cap[ids]
                over = mu.sum(axis=1) > cap
                if np.any(over):
                    mu[over] = _project_simplex(a[over], cap[over])
                    nu[over] = _project_simplex(b[over], cap[over])
            out.append((mu, nu))
        return out

    def objective(self, x):
        free = ~self.fixed
        return float(np.sum((x[free] - self.z[free]) ** 2) + self.alpha * lovasz_tv(self.H, x, self.p))


def _axpy(z, d, s):
    return [(a + s * c, b + s * e) for (a, b), (c, e) in zip(z, d)]


def _sub(z, w):
    return [(a - c, b - e) for (a, b), (c, e) in zip(z, w)]


def _dot(z, w):
    return float(sum(np.sum(a * c) + np.sum(b * e) for (a, b), (c, e) in zip(z, w)))


def _clusters(n: int, groups: list[list[int]]) -> np.ndarray:
    """Union-find labels (0..k-1, in order of first vertex) for merged index groups."""
    parent = list(range(n))

    def find(a):
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    for grp in groups:
        for a in grp[1:]:
            ra, rb = find(grp[0]), find(a)
            if ra != rb:
                parent[max(ra, rb)] = min(ra, rb)
    roots = [find(a) for a in range(n)]
    _, labels = np.unique(roots, return_inverse=True)
    return labels


def _polish(prob: _LovaszDual, x_approx: np.ndarray, eps: float, rho: float = 1.0):
    """Exact minimizer for the tie pattern of ``x_approx``, with a dual certificate.

    The objective is rho ||x_free - z_free||^2 + alpha Omega_p(x). Vertices
    within ``eps`` of a hyperedge's max (min) are merged, making every
    hyperedge penalty a function of two cluster values; the reduced problem
    is solved in closed form. The candidate is returned together with a dual
    point (mu, nu) meeting the optimality conditions, found by nonnegative
    least squares, or None when no certificate exists.
    """
    from scipy.optimize import nnls

    H, z, fixed, a, p = prob.H, prob.z, prob.fixed, prob.alpha, prob.p
    N, E = H.n_vertices, H.n_edges
    tops, bots, merges = [], [], []
    for e in H.hyperedges:
        xe = x_approx[list(e)]
        hi, lo = xe.max(), xe.min()
        top = [v for v in e if x_approx[v] >= hi - eps]
        bot = [v for v in e if x_approx[v] <= lo + eps]
        if hi - lo <= eps:
            top = bot = list(e)
        tops.append(top)
        bots.append(bot)
        merges += [top, bot]
    lab = _clusters(N, merges)
    K = lab.max() + 1

    # cluster values: fixed clusters pinned, the rest from the reduced normal equations
    pinned = np.full(K, np.nan)
    for v in np.flatnonzero(fixed):
        c = lab[v]
        if not np.isnan(pinned[c]) and pinned[c] != z[v]:
            return None
        pinned[c] = z[v]
    Q = np.zeros((K, K))
    r = np.zeros(K)
    for v in np.flatnonzero(~fixed):
        Q[lab[v], lab[v]] += 2.0 * rho
        r[lab[v]] += 2.0 * rho * z[v]
    for e, w, top, bot in zip(H.hyperedges, prob.w, tops, bots):
        s, t = lab[top[0]], lab[bot[0]]
        if s == t:
            continue
        if p == 2:
            k = 2.0 * a * w
            Q[s, s] += k
            Q[t, t] += k
            Q[s, t] -= k
            Q[t, s] -= k
        else:
            r[s] -= a * w
            r[t] += a * w
    known = ~np.isnan(pinned)
    vals = pinned.copy()
    free = ~known
    if free.any():
        rhs = r[free] - Q[np.ix_(free, known)] @ pinned[known]
        Qf = Q[np.ix_(free, free)]
        if np.linalg.cond(Qf) > 1e12:
            return None
        vals[free] = np.linalg.solve(Qf, rhs)
    x = vals[lab]

    # certificate: mu_e on argmax(x_e), nu_e on argmin(x_e)
    cols, rows_v, rows_e, signs = [], [], [], []
    scale = max(1.0, float(np.abs(x).max()))
    targets = []
    for j, (e, w) in enumerate(zip(H.hyperedges, prob.w)):
        xe = x[list(e)]
        hi, lo = xe.max(), xe.min()
        d = hi - lo
        for v in e:
            if x[v] >= hi - 1e-12 * scale:
                cols.append(("mu", j, v))
            if x[v] <= lo + 1e-12 * scale:
                cols.append(("nu", j, v))
        if p == 2:
            targets.append(("sum", j, 2.0 * a * w * d))
        elif d > 1e-12 * scale:
            targets.append(("sum", j, a * w))
        else:
            targets.append(("cap", j, a * w))
            cols.append(("slack", j, -1))
    free_v = np.flatnonzero(~fixed)
    row_of_v = {v: i for i, v in enumerate(free_v)}
    n_rows = len(free_v) + 2 * E
    A = np.zeros((n_rows, len(cols)))
    b = np.zeros(n_rows)
    for v in free_v:
        b[row_of_v[v]] = 2.0 * rho * (z[v] - x[v])
    for kind, j, c in targets:
        base = len(free_v) + 2 * j
        b[base] = c
        b[base + 1] = c if kind == "sum" else 0.0
    for col, (kind, j, v) in enumerate(cols):
        base = len(free_v) + 2 * j
        if kind == "mu":
            if v in row_of_v:
                A[row_of_v[v], col] = 1.0
            A[base, col] = 1.0
            A[base + 1, col] = 0.0 if targets[j][0] == "sum" else 1.0
        elif kind == "nu":
            if v in row_of_v:
                A[row_of_v[v], col] = -1.0
            A[base + 1, col] = 1.0 if targets[j][0] == "sum" else -1.0
        else:
            A[base, col] = 1.0
    sol, res = nnls(A, b, maxiter=50 * max(1, A.shape[1]))
    if res > 1e-9 * max(1.0, float(np.linalg.norm(b))):
        return None
    dual = [(np.zeros(M.shape), np.zeros(M.shape)) for _, M in prob.groups]
    where = {}
    for gi, (ids, M) in enumerate(prob.groups):
        for ri, j in enumerate(ids):
            for ci, v in enumerate(M[ri]):
                where[(j, int(v))] = (gi, ri, ci)
    for val, (kind, j, v) in zip(sol, cols):
        if kind == "slack":
            continue
        gi, ri, ci = where[(j, v)]
        dual[gi][0 if kind == "mu" else 1][ri, ci] = val
    return x, prob.project(dual)


def _polish_ladder(prob: _LovaszDual, x: np.ndarray, gap: float, rho: float = 1.0):
    """Try tie thresholds from the gap-implied error bound down to 1e-10 * scale."""
    scale = max(1.0, float(np.abs(x).max()))
    eps = min(10.0 * np.sqrt(max(gap, 0.0)), 1e-1) * scale
    tried = set()
    while eps >= 1e-10 * scale:
        out = _polish(prob, x, eps, rho)
        if out is not None:
            key = tuple(np.round(out[0], 12))
            if key not in tried:
                return out
            tried.add(key)
        eps /= 10.0
    return None


def _lovasz_solve(
    H: Hypergraph,
    z: np.ndarray,
    alpha: float,
    p: int,
    fixed: np.ndarray,
    max_iter: int,
    tol: float,
    warm: list | None = None,
    polish_every: int = 25,
) -> tuple[SolverResult, list]:
    """min ||x_free - z_free||^2 + alpha * Omega_p(x) with x_fixed = z_fixed.

    Accelerated projected gradient on the dual, restarted whenever the dual
    value drops. Every ``polish_every`` iterations the tie pattern of the best
    primal point is solved exactly and kept if it carries a dual certificate.
    """
    prob = _LovaszDual(H, z, alpha, p, fixed)
    zk = prob.project(warm) if warm is not None else prob.zeros()
    Dk, gk = prob.value(zk)
    best_x = z.copy()
    best_F = prob.objective(best_x)
    history = [best_F]
    w, Dw, gw = zk, Dk, gk
    t = 1.0
    L = prob.L0
    gap = best_F - Dk
    it = 0

    def done():
        return gap <= tol * max(1.0, abs(best_F))

    for it in range(1, max_iter + 1):
        G = prob.grad(w, gw)
        while True:  # Armijo backtracking on the concave dual
            cand = prob.project(_axpy(w, G, 1.0 / L))
            Dc, gc = prob.value(cand)
            diff = _sub(cand, w)
            if Dc >= Dw + _dot(G, diff) - L / 2 * _dot(diff, diff) - 1e-14 * max(1.0, abs(Dw)):
                break
            L *= 2.0
        x = prob.primal(gc)
        F = prob.objective(x)
        if F < best_F:
            best_F, best_x = F, x
            history.append(F)
        if Dc < Dk - 1e-15 * max(1.0, abs(Dk)):  # lost monotonicity: restart momentum
            t = 1.0
            w, Dw, gw = zk, Dk, gk
            continue
        t_next = (1 + np.sqrt(1 + 4 * t * t)) / 2
        w = prob.project(_axpy(cand, _sub(cand, zk), (t - 1) / t_next))
        Dw, gw = prob.value(w)
        if Dc > Dk:
            zk, Dk, gk = cand, Dc, gc
        t = t_next
        gap = best_F - Dk
        if done():
            break
        if it % polish_every == 0:
            out = _polish_ladder(prob, best_x, gap)
            if out is not None:
                xp, zp = out
                Fp = prob.objective(xp)
                Dp, gp = prob.value(zp)
                if Fp < best_F:
                    best_F, best_x = Fp, xp
                    history.append(Fp)
                if Dp > Dk:
                    zk, Dk, gk = zp, Dp, gp
                    w, Dw, gw, t = zk, Dk, gk, 1.0
                gap = best_F - Dk
                if done():
                    break
    return SolverResult(best_x, best_F, history, done(), it, gap), zk


# -- tensor total variation --------------------------------------------------


def _tensor_tv_parts(H: Hypergraph):
    A = adjacency_tensor_general(H)
    lam = abs(sym_cp_decompose(A, R=1, seed=0).frequencies[0])
    if lam == 0:
        raise ValueError("adjacency tensor has no nonzero spectral scale")
    return A, lam


def tensor_tv(H: Hypergraph, y: np.ndarray) -> float:
    """||y - hg_shift(A, y) / lambda||^2 with A the general adjacency tensor."""
    A, lam = _tensor_tv_parts(H)
    r = np.asarray(y, dtype=float) - hg_shift(A, y) / lam
    return float(r @ r)


def _tensor_tv_denoise(H: Hypergraph, y: np.ndarray, spec: RegularizerSpec) -> SolverResult:
    """Gauss-Newton with Armijo backtracking on ||x - y||^2 + alpha ||x - S(x)/lam||^2.

    Exact in one step when the shift is linear (2-uniform hypergraphs).
    """
    A, lam = _tensor_tv_parts(H)
    a = spec.alpha
    N = H.n_vertices

    def parts(x):
        r = x - hg_shift(A, x) / lam
        return float((x - y) @ (x - y) + a * r @ r), r

    x = y.copy()
    F, r = parts(x)
    history = [F]
    converged = False
    it = 0
    for it in range(1, spec.max_iter + 1):
        Jr = np.eye(N) - shift_jacobian(A, x) / lam
        grad = 2 * (x - y) + 2 * a * Jr.T @ r
        if np.linalg.norm(grad) <= 1e-12 * max(1.0, np.linalg.norm(y)):
            converged = True
            break
        step = np.linalg.solve(np.eye(N) + a * Jr.T @ Jr, -grad / 2)
        s = 1.0
        while s > 1e-20:
            Fn, rn = parts(x + s * step)
            if Fn <= F + 1e-4 * s * (grad @ step):
                break
            s /= 2
        else:
            break
        if F - Fn <= spec.tol * max(1.0, F):
            x, F, r = x + s * step, min(F, Fn), rn
            history.append(F)
            converged = True
            break
        x, F, r = x + s * step, Fn, rn
        history.append(F)
    return SolverResult(x, F, history, converged, it)


# -- public API --------------------------------------------------------------


def clique_laplacian(H: Hypergraph) -> np.ndarray:
    return expansion_laplacian(clique_expansion(H))


def denoise(H: Hypergraph, y: np.ndarray, spec: RegularizerSpec) -> SolverResult:
    """Minimize ||x - y||^2 + alpha * Omega(x) for the regularizer in ``spec``."""
    y = np.asarray(y, dtype=float)
    if y.shape != (H.n_vertices,):
        raise ValueError(f"signal has shape {y.shape}, hypergraph has {H.n_vertices} vertices")
    if spec.kind == "quadratic_clique":
        L = clique_laplacian(H)
        x = denoise_node(L, y, spec.alpha)
        F = float((x - y) @ (x - y) + spec.alpha * x @ L @ x)
        F0 = float(spec.alpha * y @ L @ y)
        return SolverResult(x, F, [F0, F] if F < F0 else [F], True, 1)
    if spec.kind == "tensor_tv":
        return _tensor_tv_denoise(H, y, spec)
    fixed = np.zeros(H.n_vertices, dtype=bool)
    return _lovasz_solve(H, y, spec.alpha, spec.p, fixed, spec.max_iter, spec.tol)[0]


def interpolate_hg(
    H: Hypergraph,
    labels: Mapping[int, float],
    spec: RegularizerSpec,
    outer_iter: int = 500,
    outer_tol: float = 1e-11,
) -> SolverResult:
    """Minimize Omega(x) subject to x_v = labels[v] on the labeled vertices.

    Quadratic: reduced Laplacian system. Lovász: proximal-point iterations
    x <- argmin Omega(x) + ||x - x_prev||^2 / alpha (labels held fixed), each
    solved by the dual method; ``objective_history`` tracks Omega.
    """
    if not labels:
        raise ValueError("label set is empty")
    N = H.n_vertices
    lab = np.array(sorted(labels), dtype=int)
    if lab[0] < 0 or lab[-1] >= N:
        raise ValueError("labeled vertex out of range")
    if spec.kind == "quadratic_clique":
        L = clique_laplacian(H)
        x = interpolate_node(L, labels)
        return SolverResult(x, float(x @ L @ x), [float(x @ L @ x)], True, 1)
    if spec.kind == "tensor_tv":
        raise ValueError("interpolation is implemented for quadratic and Lovász regularizers")
    p = spec.p
    fixed = np.zeros(N, dtype=bool)
    fixed[lab] = True
    x = np.zeros(N)
    x[lab] = [labels[v] for v in lab]
    free = ~fixed
    if free.any():
        # start from the mean label: feasible, and inside the label range
        x[free] = np.mean(x[lab])
    omega = lovasz_tv(H, x, p)
    history = [omega]
    warm = None
    converged = not free.any()
    it = 0
    for it in range(1, outer_iter + 1 if free.any() else 1):
        res, warm = _lovasz_solve(H, x, spec.alpha, p, fixed, spec.max_iter, spec.tol, warm)
        new = res.x
        new_omega = lovasz_tv(H, new, p)
        step = float(np.max(np.abs(new - x)))
        if new_omega <= omega:
            x, omega = new, new_omega
            history.append(omega)
        if p == 2:
            # the constrained problem itself, certified on the current tie pattern
            exact = _polish_ladder(_LovaszDual(H, x, 1.0, 2, fixed), x, 1e-4, rho=0.0)
            if exact is not None and lovasz_tv(H, exact[0], 2) <= omega + 1e-14 * max(1.0, omega):
                x = exact[0]
                if lovasz_tv(H, x, 2) < omega:
                    omega = lovasz_tv(H, x, 2)
                    history.append(omega)
                converged = True
                break
        if step <= outer_tol * max(1.0, float(np.max(np.abs(x)))):
            converged = True
            break
    return SolverResult(x, omega, history, converged, it)
