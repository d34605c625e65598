"""Readers and writers for complexes, signals, hypergraphs, tensors and results.

Floats are written with 17 significant digits, so reading a file back gives
the same doubles. Writes go to a temporary file that is renamed into place,
so a failed run never leaves a partial output.
"""

from __future__ import annotations

import csv
import hashlib
import io
import json
import math
import os
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .complex import SimplicialComplex, build_complex, validate
from .hypergraph import Hypergraph
from .tensor import SymTensor


class FormatError(ValueError):
    """Input file is missing, unreadable, or does not match its format."""


# -- JSON with fixed float formatting ---------------------------------------


def format_float(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"cannot serialize non-finite value {x}")
    s = format(x, ".17g")
    return s if any(c in s for c in ".e") else s + ".0"


def _encode(obj: Any, indent: int, level: int) -> str:
    pad = "\n" + " " * (indent * (level + 1))
    end = "\n" + " " * (indent * level)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (np.integer,)):
        obj = int(obj)
    if isinstance(obj, (np.floating,)):
        obj = float(obj)
    if obj is None or isinstance(obj, bool):
        return json.dumps(obj)
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return format_float(obj)
    if isinstance(obj, Fraction):
        return json.dumps(f"{obj.numerator}/{obj.denominator}") if obj.denominator != 1 else str(obj.numerator)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, Mapping):
        if not obj:
            return "{}"
        items = [json.dumps(str(k)) + ": " + _encode(v, indent, level + 1) for k, v in obj.items()]
        return "{" + pad + ("," + pad).join(items) + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, np.number)) and not isinstance(v, bool) for v in obj):
            return "[" + ", ".join(_encode(v, indent, level + 1) for v in obj) + "]"
        return "[" + pad + ("," + pad).join(_encode(v, indent, level + 1) for v in obj) + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj: Any, indent: int = 2) -> str:
    return _encode(obj, indent, 0) + "\n"


def atomic_write(path: str | Path, text: str) -> None:
    path = Path(path)
    directory = path.parent if str(path.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def file_sha256(path: str | Path) -> str:
    try:
        return hashlib.sha256(Path(path).read_bytes()).hexdigest()
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None


def load_json(path: str | Path) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path} is not valid JSON: {exc}") from None


def _require(data: Any, keys: tuple[str, ...], what: str) -> None:
    if not isinstance(data, dict) or any(k not in data for k in keys):
        raise FormatError(f"{what} file needs keys {list(keys)}")


# -- complexes --------------------------------------------------------------


def complex_to_dict(X: SimplicialComplex) -> dict:
    out = {
        "n_vertices": X.n_vertices,
        "simplices": {str(k): [list(s) for s in X.simplices[k]] for k in range(1, len(X.simplices))},
    }
    if X.positions is not None:
        out["positions"] = X.positions.tolist()
    return out


def complex_from_dict(data: dict, check: bool = True) -> SimplicialComplex:
    """Parse a complex; with ``check`` the result must pass validate()."""
    _require(data, ("n_vertices", "simplices"), "complex")
    N = int(data["n_vertices"])
    levels = [tuple((v,) for v in range(N))]
    orders = sorted(int(k) for k in data["simplices"])
    if orders and orders != list(range(1, orders[-1] + 1)):
        raise FormatError(f"complex file skips an order: {orders}")
    for k in orders:
        levels.append(tuple(tuple(int(v) for v in s) for s in data["simplices"][str(k)]))
    positions = np.asarray(data["positions"], dtype=float) if "positions" in data else None
    if positions is not None and positions.shape != (N, 2):
        raise FormatError(f"positions must be an ({N}, 2) array")
    X = SimplicialComplex(N, tuple(levels) if N else (), positions=positions)
    bad = validate(X) if check else None
    if bad is not None:
        raise FormatError(f"invalid complex: {bad.message}")
    return X


def write_complex(X: SimplicialComplex, path: str | Path) -> None:
    atomic_write(path, dumps(complex_to_dict(X)))


def read_complex(path: str | Path, check: bool = True) -> SimplicialComplex:
    return complex_from_dict(load_json(path), check)


def read_facets(path: str | Path) -> SimplicialComplex:
    data = load_json(path)
    _require(data, ("n_vertices", "facets"), "facet")
    try:
        return build_complex(data["facets"], int(data["n_vertices"]))
    except (TypeError, ValueError) as exc:
        raise FormatError(str(exc)) from None


def write_facets(facets, n_vertices: int, path: str | Path) -> None:
    atomic_write(path, dumps({"n_vertices": n_vertices, "facets": [list(f) for f in facets]}))


# -- CSV signals and labels -------------------------------------------------


def signal_csv(values: np.ndarray, header: tuple[str, str] = ("index", "value")) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for i, v in enumerate(np.asarray(values, dtype=float)):
        w.writerow([i, format(float(v), ".17g")])
    return buf.getvalue()


def labels_csv(labels: Mapping[int, float], header: tuple[str, str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for k in sorted(labels):
        w.writerow([k, format(float(labels[k]), ".17g")])
    return buf.getvalue()


def _read_pairs(path: str | Path, header: tuple[str, str]) -> list[tuple[int, float]]:
    try:
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise FormatError(f"cannot read {path}: {exc.strerror}") from None
    if not rows or tuple(c.strip() for c in rows[0]) != header:
        raise FormatError(f"{path}: expected header {','.join(header)}")
    out = []
    for n, row in enumerate(rows[1:], start=2):
        if not row:
            continue
        if len(row) != 2:
            raise FormatError(f"{path}:{n}: expected two columns")
        try:
            out.append((int(row[0]), float(row[1])))
        except ValueError:
            raise FormatError(f"{path}:{n}: cannot parse {row}") from None
    return out


def read_signal(path: str | Path, length: int | None = None) -> np.ndarray:
    pairs = _read_pairs(path, ("index", "value"))
    idx = [i for i, _ in pairs]
    if idx != list(range(len(pairs))):
        raise FormatError(f"{path}: indices must be 0..n-1 in order")
    if length is not None and len(pairs) != length:
        raise FormatError(f"{path}: has {len(pairs)} entries, expected {length}")
    return np.array([v for _, v in pairs])


def write_signal(values: np.ndarray, path: str | Path) -> None:
    atomic_write(path, signal_csv(values))


def read_labels(path: str | Path, key: str = "edge_index") -> dict[int, float]:
    pairs = _read_pairs(path, (key, "value"))
    labels = dict(pairs)
    if len(labels) != len(pairs):
        raise FormatError(f"{path}: repeated {key}")
    return labels


def write_labels(labels: Mapping[int, float], path: str | Path, key: str = "edge_index") -> None:
    atomic_write(path, labels_csv(labels, (key, "value")))


# -- trajectories, hypergraphs, tensors, architectures ----------------------


def read_trajectory(path: str | Path) -> list[int]:
    data = load_json(path)
    _require(data, ("vertices",), "trajectory")
    return [int(v) for v in data["vertices"]]


def write_trajectory(vertices, path: str | Path) -> None:
    atomic_write(path, dumps({"vertices": [int(v) for v in vertices]}))


def hypergraph_to_dict(H: Hypergraph) -> dict:
    return {
        "n_vertices": H.n_vertices,
        "hyperedges": [{"nodes": list(e), "weight": w} for e, w in zip(H.hyperedges, H.weights)],
    }


def hypergraph_from_dict(data: dict) -> Hypergraph:
    _require(data, ("n_vertices", "hyperedges"), "hypergraph")
    try:
        edges = tuple(tuple(int(v) for v in e["nodes"]) for e in data["hyperedges"])
        weights = tuple(float(e.get("weight", 1.0)) for e in data["hyperedges"])
        return Hypergraph(int(data["n_vertices"]), edges, weights)
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid hypergraph: {exc}") from None


def read_hypergraph(path: str | Path) -> Hypergraph:
    return hypergraph_from_dict(load_json(path))


def write_hypergraph(H: Hypergraph, path: str | Path) -> None:
    atomic_write(path, dumps(hypergraph_to_dict(H)))


def _parse_number(v) -> Fraction | float:
    if isinstance(v, str):
        try:
            return Fraction(v)
        except ValueError:
            raise FormatError(f"cannot parse tensor value {v!r}") from None
    if isinstance(v, int):
        return Fraction(v)
    return float(v)


def tensor_to_dict(T: SymTensor) -> dict:
    out = {
        "order": T.order,
        "dim": T.dim,
        "entries": [{"key": list(k), "value": v} for k, v in sorted(T.entries.items())],
    }
    if T.kind:
        out["kind"] = T.kind
    return out


def tensor_from_dict(data: dict) -> SymTensor:
    _require(data, ("order", "dim", "entries"), "tensor")
    try:
        entries = {}
        for item in data["entries"]:
            key = tuple(int(i) for i in item["key"])
            if list(key) != sorted(key):
                raise FormatError(f"tensor key {list(key)} is not sorted")
            entries[key] = _parse_number(item["value"])
        return SymTensor(int(data["order"]), int(data["dim"]), entries, str(data.get("kind", "")))
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"invalid tensor: {exc}") from None


def read_tensor(path: str | Path) -> SymTensor:
    return tensor_from_dict(load_json(path))


def write_tensor(T: SymTensor, path: str | Path) -> None:
    atomic_write(path, dumps(tensor_to_dict(T)))


def read_matrix(path: str | Path) -> np.ndarray:
    data = load_json(path)
    _require(data, ("matrix",), "matrix")
    M = np.asarray(data["matrix"], dtype=float)
    if M.ndim != 2:
        raise FormatError("matrix must be two-dimensional")
    return M


def read_architecture(path: str | Path) -> dict:
    """{"depth", "dims", "activation", "weights"} with weights as row-major flat lists."""
    data = load_json(path)
    _require(data, ("depth", "activation"), "architecture")
    depth = int(data["depth"])
    dims = [int(d) for d in data.get("dims", [1] * (depth + 1))]
    if len(dims) != depth + 1:
        raise FormatError(f"architecture needs depth + 1 = {depth + 1} feature dims, got {len(dims)}")
    flat = data.get("weights")
    if flat is None:
        weights = [np.eye(dims[k], dims[k + 1]) for k in range(depth)]
    else:
        if len(flat) != depth:
            raise FormatError(f"{len(flat)} weight arrays for depth {depth}")
        weights = []
        for k, w in enumerate(flat):
            w = np.asarray(w, dtype=float)
            if w.size != dims[k] * dims[k + 1]:
                raise FormatError(f"layer {k + 1} weights have {w.size} entries, expected {dims[k] * dims[k + 1]}")
            weights.append(w.reshape(dims[k], dims[k + 1]))
    return {"depth": depth, "dims": dims, "activation": str(data["activation"]), "weights": weights}
