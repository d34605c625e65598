"""Command-line front end.

Every leaf command takes ``--seed``, ``-o/--out`` and ``--format``. JSON
results carry a ``meta`` block with the command, the seed and the sha256 of
each input file; readers ignore it, so outputs can be fed back in. CSV output
is available for commands whose result is a single signal.

Exit codes: 0 success, 1 bad input, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

import numpy as np

from . import complex as cx
from . import flows, hodge, hypergraph, snn, spectral, tensor
from .fileio import (
    FormatError,
    atomic_write,
    complex_to_dict,
    dumps,
    file_sha256,
    hypergraph_to_dict,
    load_json,
    read_architecture,
    read_complex,
    read_facets,
    read_hypergraph,
    read_labels,
    read_matrix,
    read_signal,
    read_tensor,
    read_trajectory,
    signal_csv,
    tensor_to_dict,
)
from .hglearn import RegularizerSpec, denoise, interpolate_hg
from .plot import render_svg
from .rng import CounterRNG


class NumericalFailure(RuntimeError):
    """A computation ran but did not produce a trustworthy answer."""


REGULARIZERS = {
    "quadratic": "quadratic_clique",
    "lovasz1": "lovasz_p1",
    "lovasz2": "lovasz_p2",
    "tensor-tv": "tensor_tv",
}

FILTERS = {
    "tikhonov": lambda a: (lambda lam: 1.0 / (1.0 + a * lam)),
    "heat": lambda a: (lambda lam: np.exp(-a * lam)),
    "lowpass": lambda a: (lambda lam: (lam <= a).astype(float)),
}


class Run:
    """Input bookkeeping for one command: file hashes in the order they were read."""

    def __init__(self, args):
        self.args = args
        self.inputs: dict[str, str] = {}

    def path(self, name: str) -> str:
        p = getattr(self.args, name)
        self.inputs[name] = file_sha256(p)
        return p

    def complex(self, name: str = "complex", check: bool = True):
        return read_complex(self.path(name), check)

    def signal(self, name: str, length: int | None = None):
        return read_signal(self.path(name), length)

    def operator(self):
        """Matrix from --matrix, else the order-k Hodge Laplacian of --complex."""
        a = self.args
        if a.matrix:
            M = read_matrix(self.path("matrix"))
            if M.shape[0] != M.shape[1] or not np.allclose(M, M.T, rtol=0, atol=1e-12):
                raise FormatError("operator matrix must be square and symmetric")
            return M
        if not a.complex:
            raise FormatError("give --complex or --matrix")
        return hodge.hodge_laplacian(self.complex(), a.order)


# -- handlers: each returns (payload dict, signal for CSV or None) ----------


def complex_build(run):
    X = read_facets(run.path("facets"))
    return complex_to_dict(X), None


def complex_validate(run):
    X = run.complex(check=False)
    bad = cx.validate(X)
    out = {"valid": bad is None}
    if bad is not None:
        out["violation"] = {"kind": bad.kind, "simplex": list(bad.simplex), "message": bad.message}
    return out, None


def complex_boundary(run):
    X = run.complex()
    k = run.args.order
    if not 1 <= k <= max(X.order, 1) + 1:
        raise ValueError(f"order {k} outside 1..{X.order + 1}")
    B = cx.boundary_or_zero(X, k)
    return {"order": k, "shape": list(B.shape), "matrix": B.tolist()}, None


def complex_delaunay(run):
    a = run.args
    holes = [tuple(float(t) for t in h.split(",")) for h in a.hole]
    if any(len(h) != 2 for h in holes):
        raise ValueError("holes are given as x,y")
    pts = a.points
    if a.points_file:
        pts = read_matrix(run.path("points_file"))
    elif pts is None or pts < 3:
        raise ValueError("need --points N >= 3 or --points-file")
    return complex_to_dict(cx.delaunay_complex(pts, holes, seed=a.seed)), None


def spectral_eig(run):
    basis = spectral.sym_eig(run.operator(), method=run.args.method)
    return {"eigenvalues": basis.eigenvalues, "eigenvectors": basis.eigenvectors}, None


def spectral_gft(run):
    M = run.operator()
    s = run.signal("signal", M.shape[0])
    c = spectral.gft(spectral.sym_eig(M), s)
    return {"coefficients": c}, c


def spectral_filter(run):
    M = run.operator()
    s = run.signal("signal", M.shape[0])
    h = FILTERS[run.args.response](run.args.param)
    y = spectral.apply_filter(spectral.sym_eig(M), h, s)
    return {"response": run.args.response, "param": run.args.param, "signal": y}, y


def spectral_eigenmap(run):
    a = run.args
    if a.matrix:
        L = read_matrix(run.path("matrix"))
    elif a.complex:
        L = hodge.hodge_laplacian(run.complex(), 0)
    else:
        raise FormatError("give --complex or --matrix")
    Y = spectral.laplacian_eigenmap(L, a.dims, normalized=a.normalized)
    return {"coordinates": Y}, None


def hodge_laplacian(run):
    L = hodge.hodge_laplacian(run.complex(), run.args.order)
    return {"order": run.args.order, "matrix": L}, None


def hodge_decompose(run):
    X = run.complex()
    f = run.signal("flow", X.count(1))
    return hodge.hodge_decompose(X, f).as_dict(), None


def hodge_basis(run):
    B = hodge.spectral_components(run.complex())
    return {
        "eigenvalues": B.eigenvalues,
        "eigenvectors": B.eigenvectors,
        "tags": list(B.tags),
        "counts": B.counts(),
    }, None


def flow_denoise(run):
    X = run.complex()
    f = run.signal("flow", X.count(1))
    out = flows.denoise_flow(X, f, run.args.alpha, run.args.op)
    return {"operator": run.args.op, "alpha": run.args.alpha, "flow": out}, out


def flow_interpolate(run):
    X = run.complex()
    labels = flows.LabeledFlow.from_mapping(read_labels(run.path("labels"), "edge_index"), X.count(1))
    out = flows.interpolate_flow(X, labels, run.args.alpha, run.args.triangles)
    return {"alpha": run.args.alpha, "triangles": run.args.triangles, "flow": out}, out


def flow_divergence(run):
    X = run.complex()
    d = flows.divergence(X, run.signal("flow", X.count(1)))
    return {"divergence": d}, d


def traj_flow(run):
    X = run.complex()
    f = flows.trajectory_flow(X, read_trajectory(run.path("traj")))
    return {"flow": f}, f


def traj_embed(run):
    X = run.complex()
    E = flows.embed_trajectory(X, read_trajectory(run.path("traj")))
    return {"embedding": E, "final": E[-1]}, None


def _snn_inputs(run, X):
    a = run.args
    sizes = {"v": X.count(0), "f": X.count(1), "t": X.count(2)}
    return [run.signal(k, n) if getattr(a, k) else None for k, n in sizes.items()]


def snn_forward(run):
    X = run.complex()
    arch = read_architecture(run.path("arch"))
    v, f, t = snn.snn_forward(X, _snn_inputs(run, X), arch["depth"], arch["activation"])
    return {"activation": arch["activation"], "depth": arch["depth"], "v": v, "f": f, "t": t}, None


def snn_check(run):
    a = run.args
    X = run.complex()
    arch = read_architecture(run.path("arch"))
    stack = snn.LayerStack(tuple(arch["weights"]), arch["activation"])
    rng = CounterRNG(a.seed)
    n = X.count(1)
    F = stack.dims[0] if stack.depth else 1
    worst, devs = 0.0, []
    for _ in range(a.draws):
        theta = snn.random_flip(n, rng)
        f = rng.normal((n, F)) if F > 1 else rng.normal(n)
        r = snn.check_orientation_equivariance(X, f, theta, stack, a.architecture)
        devs.append(r.deviation)
        worst = max(worst, r.deviation)
    return {
        "activation": stack.tag,
        "architecture": a.architecture,
        "draws": a.draws,
        "max_deviation": worst,
        "deviations": devs,
        "equivariant": worst <= a.tol,
    }, None


def _expansion_payload(G):
    if isinstance(G, hypergraph.Hypergraph):
        return {"kind": "dual", "hypergraph": hypergraph_to_dict(G)}
    prov = [[t, list(x) if isinstance(x, tuple) else x] for t, x in G.provenance]
    return {"kind": G.kind, "adjacency": G.adjacency, "provenance": prov}


def hg_expand(run):
    H = read_hypergraph(run.path("hypergraph"))
    return _expansion_payload(hypergraph.expand(H, run.args.kind)), None


def hg_laplacian(run):
    H = read_hypergraph(run.path("hypergraph"))
    if run.args.kind == "dual":
        raise ValueError("the dual is a hypergraph; expand it and pass the result")
    G = hypergraph.expand(H, run.args.kind)
    L = hypergraph.expansion_laplacian(G, run.args.normalized)
    return {"kind": run.args.kind, "normalized": run.args.normalized, "matrix": L}, None


def hg_tensor(run):
    a = run.args
    H = read_hypergraph(run.path("hypergraph"))
    if a.normalization == "general":
        A = tensor.adjacency_tensor_general(H)
    else:
        A = tensor.adjacency_tensor(H, a.normalization)
    if a.laplacian:
        A = tensor.laplacian_tensor(A, a.laplacian, H)
    return tensor_to_dict(A), None


def hg_shift(run):
    S = read_tensor(run.path("tensor"))
    y = run.signal("signal", S.dim)
    out = tensor.hg_shift(S, y)
    return {"signal": out}, out


def _cp(run, S):
    with warnings.catch_warnings():
        warnings.simplefilter("error", RuntimeWarning)
        try:
            return tensor.sym_cp_decompose(S, run.args.rank, seed=run.args.seed)
        except RuntimeWarning as exc:
            raise NumericalFailure(str(exc)) from None


def _basis_payload(B):
    return {
        "order": B.order,
        "rank": B.rank,
        "frequencies": B.frequencies,
        "V": B.V,
        "residual": B.residual,
        "residual_history": list(B.residual_history),
    }


def hg_cp(run):
    return _basis_payload(_cp(run, read_tensor(run.path("tensor")))), None


def hg_hgft(run):
    S = read_tensor(run.path("tensor"))
    y = run.signal("signal", S.dim)
    B = _cp(run, S)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        c = tensor.hgft(B, y)
    back = tensor.ihgft(B, c)
    return {
        "coefficients": c.values,
        "signs": c.signs,
        "sign_ambiguous": c.ambiguous,
        "reconstruction": back,
        "basis": _basis_payload(B),
    }, c.values


def _solver_payload(res, kind, alpha):
    if not np.all(np.isfinite(res.x)):
        raise NumericalFailure("solver produced non-finite values")
    return {
        "regularizer": kind,
        "alpha": alpha,
        "signal": res.x,
        "objective": res.objective,
        "objective_history": res.objective_history,
        "converged": res.converged,
        "iterations": res.iterations,
        "gap": None if np.isnan(res.gap) else res.gap,
    }


def hg_denoise(run):
    a = run.args
    H = read_hypergraph(run.path("hypergraph"))
    y = run.signal("signal", H.n_vertices)
    res = denoise(H, y, RegularizerSpec(REGULARIZERS[a.reg], a.alpha))
    return _solver_payload(res, a.reg, a.alpha), res.x


def hg_interpolate(run):
    a = run.args
    H = read_hypergraph(run.path("hypergraph"))
    labels = read_labels(run.path("labels"), "vertex")
    res = interpolate_hg(H, labels, RegularizerSpec(REGULARIZERS[a.reg], a.alpha))
    return _solver_payload(res, a.reg, a.alpha), res.x


def _series(data, path):
    for key in ("embedding", "coordinates", "points"):
        if key in data:
            P = np.asarray(data[key], dtype=float)
            break
    else:
        raise FormatError(f"{path}: no embedding, coordinates or points to plot")
    if P.ndim != 2 or P.shape[1] < 1:
        raise FormatError(f"{path}: expected a list of points")
    if P.shape[1] == 1:
        P = np.column_stack([np.arange(len(P)), P[:, 0]])
    return P[:, :2]


def plot(run):
    a = run.args
    series = []
    for i, p in enumerate(a.input):
        run.inputs[f"input{i}"] = file_sha256(p)
        series.append(_series(load_json(p), p))
    labels = a.label or [Path(p).stem for p in a.input]
    return render_svg(series, a.kind, labels, a.title), None


# -- parser ------------------------------------------------------------------


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--seed", type=int, default=0, help="seed for any randomness (default 0)")
    p.add_argument("-o", "--out", help="output path (default stdout)")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    return p


def _operator_args(p):
    p.add_argument("--complex")
    p.add_argument("--order", type=int, default=0, help="Hodge Laplacian order (default 0)")
    p.add_argument("--matrix", help="JSON file {\"matrix\": [[...]]} instead of a complex")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    parser = argparse.ArgumentParser(prog="hosp", description="Signal processing on simplicial complexes and hypergraphs.")
    groups = parser.add_subparsers(dest="group", required=True)

    def leaf(group, name, handler, help_text):
        p = group.add_parser(name, parents=[common], help=help_text)
        p.set_defaults(handler=handler)
        return p

    g = groups.add_parser("complex").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "build", complex_build, "close a facet list into a complex")
    p.add_argument("--facets", required=True)
    p = leaf(g, "validate", complex_validate, "check ordering and inclusion closure")
    p.add_argument("--complex", required=True)
    p = leaf(g, "boundary", complex_boundary, "signed boundary matrix B_k")
    p.add_argument("--complex", required=True)
    p.add_argument("--order", type=int, default=1)
    p = leaf(g, "delaunay", complex_delaunay, "punctured Delaunay lattice")
    p.add_argument("--points", type=int, help="number of uniform random points")
    p.add_argument("--points-file", help="JSON {\"matrix\": [[x, y], ...]}")
    p.add_argument("--hole", action="append", default=[], help="hole center x,y (repeatable)")

    g = groups.add_parser("spectral").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "eig", spectral_eig, "eigendecomposition")
    _operator_args(p)
    p.add_argument("--method", choices=("auto", "jacobi", "lapack"), default="auto")
    p = leaf(g, "gft", spectral_gft, "Fourier coefficients of a signal")
    _operator_args(p)
    p.add_argument("--signal", required=True)
    p = leaf(g, "filter", spectral_filter, "spectral filter")
    _operator_args(p)
    p.add_argument("--signal", required=True)
    p.add_argument("--response", choices=sorted(FILTERS), default="tikhonov")
    p.add_argument("--param", type=float, default=1.0, help="alpha, diffusion time, or cutoff")
    p = leaf(g, "eigenmap", spectral_eigenmap, "Laplacian eigenmap coordinates")
    p.add_argument("--complex")
    p.add_argument("--matrix")
    p.add_argument("--dims", type=int, default=2)
    p.add_argument("--normalized", action="store_true")

    g = groups.add_parser("hodge").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "laplacian", hodge_laplacian, "Hodge Laplacian L_k")
    p.add_argument("--complex", required=True)
    p.add_argument("--order", type=int, default=1)
    p = leaf(g, "decompose", hodge_decompose, "gradient/curl/harmonic split of an edge flow")
    p.add_argument("--complex", required=True)
    p.add_argument("--flow", required=True)
    p = leaf(g, "basis", hodge_basis, "tagged eigenbasis of L_1")
    p.add_argument("--complex", required=True)

    g = groups.add_parser("flow").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "denoise", flow_denoise, "regularized edge-flow denoising")
    p.add_argument("--complex", required=True)
    p.add_argument("--flow", required=True)
    p.add_argument("--op", choices=sorted(flows.FLOW_OPERATORS), default="hodge")
    p.add_argument("--alpha", type=float, required=True)
    p = leaf(g, "interpolate", flow_interpolate, "fill unlabeled edges")
    p.add_argument("--complex", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--triangles", action="store_true", help="also penalize curl")
    p = leaf(g, "divergence", flow_divergence, "B_1 f")
    p.add_argument("--complex", required=True)
    p.add_argument("--flow", required=True)

    g = groups.add_parser("traj").add_subparsers(dest="cmd", required=True)
    for name, handler, text in (("flow", traj_flow, "edge flow of a walk"), ("embed", traj_embed, "harmonic embedding of a walk")):
        p = leaf(g, name, handler, text)
        p.add_argument("--complex", required=True)
        p.add_argument("--traj", required=True)

    g = groups.add_parser("snn").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "forward", snn_forward, "weightless simplicial message passing")
    p.add_argument("--complex", required=True)
    p.add_argument("--arch", required=True)
    for k in ("v", "f", "t"):
        p.add_argument(f"--{k}", help=f"{k} input signal CSV (default zeros)")
    p = leaf(g, "check-equivariance", snn_check, "orientation-flip test over random draws")
    p.add_argument("--complex", required=True)
    p.add_argument("--arch", required=True)
    p.add_argument("--draws", type=int, default=100)
    p.add_argument("--architecture", choices=("gcn", "snn"), default="gcn")
    p.add_argument("--tol", type=float, default=1e-10)

    g = groups.add_parser("hg").add_subparsers(dest="cmd", required=True)
    p = leaf(g, "expand", hg_expand, "graph expansion or dual")
    p.add_argument("--hypergraph", required=True)
    p.add_argument("--kind", choices=sorted(hypergraph.EXPANSIONS), required=True)
    p = leaf(g, "laplacian", hg_laplacian, "Laplacian of an expansion")
    p.add_argument("--hypergraph", required=True)
    p.add_argument("--kind", choices=sorted(hypergraph.EXPANSIONS), default="clique")
    p.add_argument("--normalized", action="store_true")
    p = leaf(g, "tensor", hg_tensor, "adjacency or Laplacian tensor")
    p.add_argument("--hypergraph", required=True)
    p.add_argument("--normalization", choices=("none", "cooper", "hu", "general"), default="none")
    p.add_argument("--laplacian", choices=("hu", "general"))
    p = leaf(g, "shift", hg_shift, "tensor shift of a vertex signal")
    p.add_argument("--tensor", required=True)
    p.add_argument("--signal", required=True)
    for name, handler, text in (("cp", hg_cp, "orthogonal symmetric CP basis"), ("hgft", hg_hgft, "hypergraph Fourier transform")):
        p = leaf(g, name, handler, text)
        p.add_argument("--tensor", required=True)
        p.add_argument("--rank", type=int)
        if name == "hgft":
            p.add_argument("--signal", required=True)
    p = leaf(g, "denoise", hg_denoise, "regularized vertex-signal denoising")
    p.add_argument("--hypergraph", required=True)
    p.add_argument("--signal", required=True)
    p.add_argument("--reg", choices=sorted(REGULARIZERS), required=True)
    p.add_argument("--alpha", type=float, required=True)
    p = leaf(g, "interpolate", hg_interpolate, "fill unlabeled vertices")
    p.add_argument("--hypergraph", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--reg", choices=("quadratic", "lovasz1", "lovasz2"), required=True)
    p.add_argument("--alpha", type=float, default=1.0, help="proximal step for the Lovász solvers")

    p = groups.add_parser("plot", parents=[common], help="SVG of embedding or coordinate results")
    p.set_defaults(handler=plot)
    p.add_argument("--input", action="append", required=True, help="result JSON (repeatable, one series each)")
    p.add_argument("--kind", choices=("line", "scatter"), default="line")
    p.add_argument("--label", action="append")
    p.add_argument("--title", default="")
    return parser


def _render(args, run, payload, signal) -> str:
    if isinstance(payload, str):
        return payload
    if args.format == "csv":
        if signal is None:
            raise ValueError("this command has no single-signal result; use --format json")
        return signal_csv(signal)
    command = args.group if args.group == "plot" else f"{args.group} {args.cmd}"
    meta = {"command": command, "seed": args.seed, "inputs": run.inputs}
    return dumps({**payload, "meta": meta})


def _finite(obj) -> bool:
    if isinstance(obj, dict):
        return all(_finite(v) for v in obj.values())
    if isinstance(obj, (list, tuple)):
        return all(_finite(v) for v in obj)
    if isinstance(obj, np.ndarray):
        return bool(np.all(np.isfinite(obj)))
    if isinstance(obj, float):
        return np.isfinite(obj)
    return True


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    run = Run(args)
    try:
        payload, signal = args.handler(run)
        if not _finite(payload):
            raise NumericalFailure("result contains non-finite values")
        text = _render(args, run, payload, signal)
    except (NumericalFailure, np.linalg.LinAlgError, FloatingPointError) as exc:
        print(f"hosp: numerical failure: {exc}", file=sys.stderr)
        return 2
    except (ValueError, KeyError, TypeError, OSError) as exc:
        print(f"hosp: error: {exc}", file=sys.stderr)
        return 1
    if args.out:
        try:
            atomic_write(args.out, text)
        except OSError as exc:
            print(f"hosp: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return 1
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
