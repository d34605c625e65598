"""Acceptance suite: ten end-to-end criteria, one PASS/FAIL line each.

Run with ``pytest tests/test_acceptance.py -s`` or plain ``python
tests/test_acceptance.py``; the report lines are printed in both cases.
"""

import time
import warnings
from fractions import Fraction
from itertools import combinations, permutations

import numpy as np
import pytest

from hosp.complex import boundary_matrix, boundary_or_zero
from hosp.datasets import (
    CIRCULATION_FLOW,
    CONSERVED_FLOW,
    CONSERVED_FLOW_LABELED,
    two_triangle_complex,
    lattice_trajectories,
    smoothing_fixture,
    trajectory_lattice,
)
from hosp.flows import (
    LabeledFlow,
    denoise_flow,
    denoise_node,
    embed_trajectory,
    interpolate_flow,
    interpolate_node,
    trajectory_flow,
)
from hosp.hglearn import RegularizerSpec, clique_laplacian, denoise, interpolate_hg, lovasz_tv, tensor_tv
from hosp.hodge import harmonic_basis, hodge_decompose, hodge_laplacian, spectral_components
from hosp.hypergraph import (
    Hypergraph,
    clique_expansion,
    dual,
    expansion_laplacian,
    graph_laplacian,
    incidence,
    line_expansion,
    line_graph,
    star_expansion,
)
from hosp.rng import CounterRNG
from hosp.snn import (
    LayerStack,
    SimplicialOperators,
    check_orientation_equivariance,
    random_flip,
    search_counterexample,
    snn_depth2_closed_form,
    snn_forward,
)
from hosp.spectral import gft, sym_eig
from hosp.tensor import (
    SymTensor,
    adjacency_tensor,
    adjacency_tensor_general,
    hg_shift,
    hgft,
    ihgft,
    laplacian_tensor,
    sym_cp_decompose,
)

from oracles import (
    dual_coordinate_oracle,
    exact_rank,
    lovasz_oracle,
    random_complex,
    random_hypergraph,
    random_uniform_hypergraph,
)
from test_complex import B1_REF, B2_REF
from test_snn import GLUED


def report(n, ok, detail):
    print(f"ACCEPTANCE {n:2d} {'PASS' if ok else 'FAIL'}: {detail}", flush=True)
    return ok


def criterion_1():
    t = time.perf_counter()
    X = two_triangle_complex()
    B1, B2 = boundary_matrix(X, 1), boundary_matrix(X, 2)
    prod = B1 @ B2
    elapsed = time.perf_counter() - t
    ok = (
        B1.dtype.kind == "i"
        and B2.dtype.kind == "i"
        and np.array_equal(B1, B1_REF)
        and np.array_equal(B2, B2_REF)
        and not prod.any()
        and elapsed < 1.0
    )
    return report(1, ok, f"B1 {B1.shape} and B2 {B2.shape} exact, B1 B2 = 0, {elapsed * 1e3:.1f} ms")


def criterion_2():
    d = hodge_decompose(two_triangle_complex(), CIRCULATION_FLOW)
    w_err = float(np.max(np.abs(d.triangle_potentials - [-1.0, -5 / 3])))
    parts = (d.gradient, d.curl, d.harmonic)
    orth = max(abs(float(a @ b)) for a, b in combinations(parts, 2))
    rec = float(np.max(np.abs(sum(parts) - CIRCULATION_FLOW)))
    ok = w_err <= 1e-10 and orth <= 1e-10 and rec <= 1e-10
    return report(2, ok, f"w = {np.round(d.triangle_potentials, 6).tolist()}, |dw| {w_err:.1e}, orth {orth:.1e}, recon {rec:.1e}")


def _complexes(count, seed=0):
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        X = random_complex(rng, max_nodes=15)
        if X.count(1):
            out.append(X)
    return out


def criterion_3():
    worst, rank_ok = 0.0, True
    for X in _complexes(50):
        B1 = boundary_matrix(X, 1).astype(float)
        B2 = boundary_or_zero(X, 2).astype(float)
        L1 = hodge_laplacian(X, 1)
        lifts = []
        b0 = sym_eig(B1 @ B1.T)
        lifts += [(lam, B1.T @ v) for lam, v in zip(b0.eigenvalues, b0.eigenvectors.T) if lam > 1e-9]
        if B2.shape[1]:
            b2 = sym_eig(B2.T @ B2)
            lifts += [(lam, B2 @ v) for lam, v in zip(b2.eigenvalues, b2.eigenvectors.T) if lam > 1e-9]
        for lam, u in lifts:
            u = u / np.linalg.norm(u)
            worst = max(worst, float(np.linalg.norm(L1 @ u - lam * u)))
        dim_h = spectral_components(X).counts()["harmonic"]
        rank_ok &= dim_h + exact_rank(B1) + exact_rank(B2) == X.count(1)
    ok = worst <= 1e-8 and rank_ok
    return report(3, ok, f"50 complexes, max lifted residual {worst:.1e}, rank identity {'exact' if rank_ok else 'violated'}")


def criterion_4():
    t = time.perf_counter()
    fx = smoothing_fixture()
    errs = {k: [] for k in ("hodge", "edge", "linegraph")}
    raw = []
    for seed in range(100):
        noise = CounterRNG(seed).normal(len(fx.truth), fx.sigma)
        noisy = fx.truth + noise
        raw.append(np.linalg.norm(noise))
        for k in errs:
            errs[k].append(np.linalg.norm(denoise_flow(fx.complex, noisy, fx.alpha, k) - fx.truth))
    elapsed = time.perf_counter() - t
    m = {k: float(np.mean(v)) for k, v in errs.items()}
    r = float(np.mean(raw))
    ok = m["hodge"] < m["edge"] < m["linegraph"] and m["linegraph"] > r and elapsed < 10.0
    return report(
        4, ok, f"mean errors hodge {m['hodge']:.3f} < edge {m['edge']:.3f} < linegraph {m['linegraph']:.3f}, raw {r:.3f}, {elapsed:.2f} s"
    )


def criterion_5():
    X = two_triangle_complex()
    lab = LabeledFlow.from_mapping({i: CONSERVED_FLOW[i] for i in CONSERVED_FLOW_LABELED}, 10)
    best, exact = None, True
    for a in np.logspace(-3, -1, 7):
        fh = interpolate_flow(X, lab, a)
        exact &= all(fh[i] == CONSERVED_FLOW[i] for i in CONSERVED_FLOW_LABELED)
        r = float(np.corrcoef(CONSERVED_FLOW, fh)[0, 1])
        err = float(np.linalg.norm(CONSERVED_FLOW - fh))
        if best is None or r > best[0]:
            best = (r, err, a)
    ok = best[0] >= 0.99 and best[1] <= 0.1 and exact
    return report(5, ok, f"best alpha {best[2]:.3g}: pearson {best[0]:.6f}, l2 {best[1]:.2e}, labels exact {exact}")


def criterion_6():
    t = time.perf_counter()
    X = trajectory_lattice()
    U = harmonic_basis(X)
    trajs = lattice_trajectories(X)
    final, inc_err = {}, 0.0
    for name, walk in trajs.items():
        E = embed_trajectory(X, walk, U)
        full = U.T @ trajectory_flow(X, walk)
        inc_err = max(inc_err, float(np.max(np.abs(E[-1] - full))))
        final[name] = E[-1]
    elapsed = time.perf_counter() - t
    within, between = [], []
    for a, b in combinations(sorted(final), 2):
        d = float(np.linalg.norm(final[a] - final[b]))
        (within if a[0] == b[0] else between).append(d)
    ok = U.shape[1] == 2 and inc_err <= 1e-10 and max(within) < min(between) and elapsed < 30.0
    return report(
        6,
        ok,
        f"lattice {tuple(X.count(k) for k in range(3))}, harmonic dim {U.shape[1]}, incremental err {inc_err:.1e}, "
        f"max within {max(within):.2e} < min between {min(between):.3f}, {elapsed:.2f} s",
    )


def criterion_7():
    X = two_triangle_complex()
    ops = SimplicialOperators.from_complex(X)
    rng = CounterRNG(7)
    stack = LayerStack((np.array([[0.8, -0.3]]), np.array([[0.6], [1.2]])), "tanh")
    eq = 0.0
    for _ in range(100):
        theta = random_flip(10, rng)
        f = rng.normal(10)
        eq = max(eq, check_orientation_equivariance(X, f, theta, stack).deviation)
    found = search_counterexample(X, LayerStack.identity(2, activation="relu"), draws=100, seed=0)
    relu = found[2] if found else 0.0
    r = np.random.default_rng(7)
    v0, f0, t0 = r.normal(size=7), r.normal(size=10), r.normal(size=2)
    closed = max(
        float(np.max(np.abs(a - b))) for a, b in zip(snn_forward(ops, (v0, f0, t0), 2), snn_depth2_closed_form(ops, v0, f0, t0))
    )
    local = all(
        not snn_forward(Y, (None, None, t), d, "identity")[0].any()
        for Y, t in ((X, np.array([3.0, -2.0])), (GLUED, np.array([3.0, -2.0])))
        for d in (1, 2, 3)
    )
    v_tanh = float(np.max(np.abs(snn_forward(GLUED, (None, None, np.array([3.0, -2.0])), 2, "tanh")[0])))
    ok = eq <= 1e-10 and relu > 1e-3 and closed <= 1e-10 and local and v_tanh > 0
    return report(
        7,
        ok,
        f"tanh deviation {eq:.1e}, relu counterexample {relu:.3f}, closed form {closed:.1e}, "
        f"identity v from t0 exactly 0: {local}, tanh v {v_tanh:.3f}",
    )


def _sym(T):
    perms = list(permutations(range(T.ndim)))
    return sum(np.transpose(T, p) for p in perms) / len(perms)


def criterion_8():
    A6 = adjacency_tensor_general(Hypergraph(4, ((0, 1, 2), (2, 3))))
    ex6 = A6[(0, 1, 2)] == Fraction(1, 2) and A6[(2, 3, 3)] == Fraction(1, 3)
    ex6 &= isinstance(A6[(0, 1, 2)], Fraction) and isinstance(A6[(2, 3, 3)], Fraction)
    rng = np.random.default_rng(8)
    cooper = True
    for _ in range(100):
        H = random_uniform_hypergraph(rng, int(rng.integers(4, 10)), int(rng.integers(2, 5)), int(rng.integers(1, 8)))
        cooper &= adjacency_tensor(H, "cooper").first_mode_sums() == list(H.degrees())
    S7 = adjacency_tensor(Hypergraph(5, ((0, 1, 2), (2, 3, 4))))
    shift7 = 0.0
    for _ in range(100):
        y = rng.normal(size=5)
        shift7 = max(shift7, abs(hg_shift(S7, y)[2] - (2 * y[0] * y[1] + 2 * y[3] * y[4])))
    m2 = 0.0
    for _ in range(10):
        n = int(rng.integers(3, 8))
        M = _sym(rng.normal(size=(n, n)))
        S = SymTensor.from_dense(M)
        y = rng.normal(size=n)
        m2 = max(m2, float(np.max(np.abs(hg_shift(S, y) - M @ y))))
        B = sym_cp_decompose(S, seed=0)
        m2 = max(m2, float(np.max(np.abs(np.sort(B.frequencies) - np.linalg.eigvalsh(M)))))
        m2 = max(m2, float(np.max(np.abs(B.reconstruct() - M))))
        basis = sym_eig(M)
        order = [int(np.argmin(np.abs(basis.eigenvalues - lam))) for lam in B.frequencies]
        signs = np.sign(np.sum(B.V * basis.eigenvectors[:, order], axis=0))
        c = hgft(B, y)
        m2 = max(m2, float(np.max(np.abs(c.values - signs * gft(basis, y)[order]))))
        m2 = max(m2, float(np.max(np.abs(ihgft(B, c) - y))))
    ok = ex6 and cooper and shift7 <= 1e-12 and m2 <= 1e-8
    return report(
        8, ok, f"A_123 = {A6[(0, 1, 2)]}, A_344 = {A6[(2, 3, 3)]}, cooper identity {cooper}, shift err {shift7:.1e}, m=2 err {m2:.1e}"
    )


def _random_graph(rng):
    n = int(rng.integers(4, 10))
    edges = [(int(rng.integers(0, v)), v) for v in range(1, n)]
    edges += [e for e in combinations(range(n), 2) if e not in edges and (e[1], e[0]) not in edges and rng.random() < 0.25]
    edges = sorted(tuple(sorted(e)) for e in edges)
    return n, edges, rng.uniform(0.5, 2.0, len(edges)).round(3)


def _reduction_errors(n, edges, w, rng):
    H = Hypergraph.from_graph(n, edges, w.tolist())
    m = len(edges)
    A = np.zeros((n, n))
    Binc = np.zeros((n, m))
    for j, ((a, b), c) in enumerate(zip(edges, w)):
        A[a, b] = A[b, a] = c
        Binc[a, j] = Binc[b, j] = 1.0
    L = graph_laplacian(n, edges, w)
    d = A.sum(axis=1)
    Ln = np.eye(n) - A / np.sqrt(np.outer(d, d))
    errs = {}

    def diff(key, got, ref):
        errs[key] = max(errs.get(key, 0.0), float(np.max(np.abs(np.asarray(got, dtype=float) - ref), initial=0.0)))

    # hypergraph-core
    Z, W = incidence(H)
    diff("incidence", Z, Binc)
    diff("weights", np.diag(W), w)
    diff("clique", clique_expansion(H).adjacency, A)
    diff("clique laplacian", expansion_laplacian(clique_expansion(H)), L)
    diff("normalized laplacian", expansion_laplacian(clique_expansion(H), normalized=True), Ln)
    shared = np.array([[float(i != j and bool(set(edges[i]) & set(edges[j]))) for j in range(m)] for i in range(m)])
    diff("line graph", line_graph(H).adjacency, shared)
    sub = np.zeros((n + m, n + m))
    sub[:n, n:] = Binc * w
    sub[n:, :n] = (Binc * w).T
    diff("star", star_expansion(H).adjacency, sub)
    # line expansion of a graph is the line graph of its subdivision
    G = line_expansion(H)
    pairs = [p[1] for p in G.provenance]
    ref = np.array([[float(p != q and (p[0] == q[0] or p[1] == q[1])) for q in pairs] for p in pairs])
    diff("line expansion", G.adjacency, ref)
    diff("dual", incidence(dual(H))[0], Binc.T)
    # hg-learn
    y = rng.normal(size=n)
    diff("lovasz p2", lovasz_tv(H, y, 2), y @ L @ y)
    diff("lovasz p1", lovasz_tv(H, y, 1), sum(c * abs(y[a] - y[b]) for (a, b), c in zip(edges, w)))
    diff("clique laplacian (hg-learn)", clique_laplacian(H), L)
    alpha = float(rng.uniform(0.2, 2.0))
    for kind in ("quadratic_clique", "lovasz_p2"):
        diff(f"denoise {kind}", denoise(H, y, RegularizerSpec(kind, alpha)).x, denoise_node(L, y, alpha))
    _, tv_ref = lovasz_oracle(H, y, alpha, 1)
    diff("denoise lovasz_p1 objective", denoise(H, y, RegularizerSpec("lovasz_p1", alpha)).objective, tv_ref)
    picks = rng.choice(n, size=3, replace=False)
    labels = {int(v): float(rng.normal()) for v in picks}
    for kind in ("quadratic_clique", "lovasz_p2"):
        diff(f"interpolate {kind}", interpolate_hg(H, labels, RegularizerSpec(kind, 1.0)).x, interpolate_node(L, labels))
    _, tvi_ref = lovasz_oracle(H, None, 1.0, 1, fixed=labels)
    diff("interpolate lovasz_p1 objective", interpolate_hg(H, labels, RegularizerSpec("lovasz_p1", 1.0)).objective, tvi_ref)
    # tensor operations reduce to matrices on 2-uniform input
    diff("adjacency tensor", adjacency_tensor(H).to_dense(), A)
    diff("general tensor", adjacency_tensor_general(H).to_dense(), A)
    diff("shift", hg_shift(adjacency_tensor(H), y), A @ y)
    diff("laplacian tensor", laplacian_tensor(adjacency_tensor_general(H), "general", H).to_dense(), L)
    lam = np.max(np.abs(np.linalg.eigvalsh(A)))
    Mtv = np.eye(n) - A / lam
    diff("tensor tv", tensor_tv(H, y), float(np.sum((Mtv @ y) ** 2)))
    diff("denoise tensor_tv", denoise(H, y, RegularizerSpec("tensor_tv", alpha)).x, np.linalg.solve(np.eye(n) + alpha * Mtv.T @ Mtv, y))
    return errs


def criterion_9():
    rng = np.random.default_rng(9)
    worst = {}
    for _ in range(20):
        n, edges, w = _random_graph(rng)
        for k, v in _reduction_errors(n, edges, w, rng).items():
            worst[k] = max(worst.get(k, 0.0), v)
    key = max(worst, key=worst.get)
    ok = all(v <= 1e-6 for v in worst.values())
    return report(9, ok, f"{len(worst)} operations on 20 graphs, worst {key} {worst[key]:.1e}")


def _monotone(h):
    return all(b <= a + 1e-12 * max(1.0, abs(a)) for a, b in zip(h, h[1:]))


def criterion_10():
    rng = np.random.default_rng(10)
    worst, mono, oracle_conv = 0.0, True, True
    for _ in range(20):
        H = random_hypergraph(rng, max_vertices=12, max_edges=8)
        y = rng.normal(size=H.n_vertices)
        alpha = float(rng.uniform(0.2, 2.0))
        res = denoise(H, y, RegularizerSpec("lovasz_p2", alpha))
        _, ref, conv = dual_coordinate_oracle(H, y, alpha)
        worst = max(worst, abs(res.objective - ref))
        mono &= _monotone(res.objective_history)
        oracle_conv &= conv
    ok = worst <= 1e-3 and mono and oracle_conv
    return report(10, ok, f"20 hypergraphs, max |F - F_oracle| {worst:.1e}, histories non-increasing {mono}, oracle converged {oracle_conv}")


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6, criterion_7, criterion_8, criterion_9, criterion_10]


@pytest.mark.parametrize("criterion", CRITERIA, ids=[f"criterion_{i}" for i in range(1, 11)])
def test_acceptance(criterion, capsys):
    with capsys.disabled(), warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        print()
        assert criterion()


if __name__ == "__main__":
    results = [c() for c in CRITERIA]
    print(f"{sum(results)}/{len(results)} criteria passed")
