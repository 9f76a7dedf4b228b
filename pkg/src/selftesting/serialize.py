"""JSON and CSV encodings for matrices, games, strategies, sweeps and GH reports.

Errors carry a field path such as ``strategy.alice["0"][1].data[3]``.
"""
from __future__ import annotations

import csv
import io
import json
from typing import Any

import numpy as np

from .errors import InvalidInputError
from .games import NonlocalGame, SyncGame, XorGame
from .strategies import QuantumModel


def _fail(path: str, msg: str):
    raise InvalidInputError(f"{path}: {msg}")


def _complex(v, path: str) -> complex:
    if isinstance(v, (int, float)) and not isinstance(v, bool):
        return complex(v)
    if not (isinstance(v, (list, tuple)) and len(v) == 2
            and all(isinstance(t, (int, float)) and not isinstance(t, bool) for t in v)):
        _fail(path, f"expected a complex number [re, im], got {v!r}")
    z = complex(v[0], v[1])
    if not np.isfinite(z):
        _fail(path, "complex entry is not finite")
    return z


def complex_to_json(z: complex) -> list[float]:
    return [float(np.real(z)), float(np.imag(z))]


def matrix_to_json(M) -> dict:
    M = np.asarray(M, dtype=np.complex128)
    return {"rows": int(M.shape[0]), "cols": int(M.shape[1]), "data": [complex_to_json(z) for z in M.reshape(-1)]}


def matrix_from_json(obj, path: str = "matrix") -> np.ndarray:
    if not isinstance(obj, dict):
        _fail(path, "expected an object with rows, cols, data")
    for key in ("rows", "cols", "data"):
        if key not in obj:
            _fail(path, f"missing field {key!r}")
    rows, cols, data = obj["rows"], obj["cols"], obj["data"]
    if not (isinstance(rows, int) and isinstance(cols, int) and rows >= 0 and cols >= 0):
        _fail(path, "rows and cols must be nonnegative integers")
    if not isinstance(data, list) or len(data) != rows * cols:
        _fail(f"{path}.data", f"expected {rows * cols} entries, got {len(data) if isinstance(data, list) else data!r}")
    vals = [_complex(v, f"{path}.data[{k}]") for k, v in enumerate(data)]
    return np.array(vals, dtype=np.complex128).reshape(rows, cols)


def vector_from_json(obj, path: str = "vector") -> np.ndarray:
    if not isinstance(obj, list):
        _fail(path, "expected a list of [re, im] pairs")
    return np.array([_complex(v, f"{path}[{k}]") for k, v in enumerate(obj)], dtype=np.complex128)


def _real_array(obj, path: str, ndim: int) -> np.ndarray:
    try:
        arr = np.array(obj, dtype=float)
    except (TypeError, ValueError):
        _fail(path, "expected a rectangular numeric array")
    if arr.ndim != ndim:
        _fail(path, f"expected a {ndim}-d array, got {arr.ndim}-d")
    return arr


def game_from_json(obj, path: str = "game"):
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    kind = obj.get("type", "general")
    if kind == "xor":
        if "omega" not in obj:
            _fail(path, "missing field 'omega'")
        return XorGame(_real_array(obj["omega"], f"{path}.omega", 2), name=obj.get("name", ""))
    if kind == "sync":
        for key in ("X", "A", "V"):
            if key not in obj:
                _fail(path, f"missing field {key!r}")
        return SyncGame(obj["X"], obj["A"], _real_array(obj["V"], f"{path}.V", 4), name=obj.get("name", ""))
    if kind == "general":
        for key in ("X", "Y", "A", "B", "mu", "V"):
            if key not in obj:
                _fail(path, f"missing field {key!r}")
        return NonlocalGame(obj["X"], obj["Y"], obj["A"], obj["B"], _real_array(obj["mu"], f"{path}.mu", 2),
                            _real_array(obj["V"], f"{path}.V", 4), name=obj.get("name", ""))
    _fail(f"{path}.type", f"unknown game type {kind!r}")


def game_to_json(G) -> dict:
    if isinstance(G, XorGame):
        return {"type": "xor", "name": G.name, "omega": G.omega.tolist()}
    if isinstance(G, SyncGame):
        return {"type": "sync", "name": G.name, "X": _labels(G.X), "A": _labels(G.A), "V": G.V.tolist()}
    return {"type": "general", "name": G.name, "X": _labels(G.X), "Y": _labels(G.Y), "A": _labels(G.A),
            "B": _labels(G.B), "mu": G.mu.tolist(), "V": G.V.tolist()}


def _labels(xs):
    return [list(x) if isinstance(x, tuple) else x for x in xs]


def _measurements(obj, path: str, labels=None) -> np.ndarray:
    if not isinstance(obj, dict):
        _fail(path, "expected an object mapping question labels to lists of effects")
    keys = list(obj)
    if labels is not None:
        want = [str(x) for x in labels]
        missing = [k for k in want if k not in obj]
        if missing:
            _fail(path, f"missing question {missing[0]!r}")
        keys = want
    out = []
    for k in keys:
        effects = obj[k]
        if not isinstance(effects, list) or not effects:
            _fail(f"{path}[{k!r}]", "expected a nonempty list of matrices")
        out.append([matrix_from_json(m, f"{path}[{k!r}][{a}]") for a, m in enumerate(effects)])
    sizes = {len(e) for e in out}
    if len(sizes) != 1:
        _fail(path, "questions have different numbers of answers")
    dims = {m.shape for e in out for m in e}
    if len(dims) != 1:
        _fail(path, f"effects have different shapes {sorted(dims)}")
    return np.array(out, dtype=np.complex128)


def strategy_from_json(obj, path: str = "strategy", game=None) -> QuantumModel:
    if not isinstance(obj, dict):
        _fail(path, "expected an object")
    for key in ("dA", "dB", "psi", "alice", "bob"):
        if key not in obj:
            _fail(path, f"missing field {key!r}")
    g = game.to_game() if game is not None else None
    alice = _measurements(obj["alice"], f"{path}.alice", g.X if g else None)
    bob = _measurements(obj["bob"], f"{path}.bob", g.Y if g else None)
    psi = vector_from_json(obj["psi"], f"{path}.psi")
    if alice.shape[-1] != obj["dA"]:
        _fail(f"{path}.dA", f"declared {obj['dA']} but effects have dimension {alice.shape[-1]}")
    if bob.shape[-1] != obj["dB"]:
        _fail(f"{path}.dB", f"declared {obj['dB']} but effects have dimension {bob.shape[-1]}")
    if g is not None and (alice.shape[1], bob.shape[1]) != (len(g.A), len(g.B)):
        _fail(path, "answer counts do not match the game")
    return QuantumModel(alice, bob, psi)


def strategy_to_json(S: QuantumModel, game=None) -> dict:
    g = game.to_game() if game is not None else None
    xs = [str(x) for x in g.X] if g else [str(x) for x in range(S.alice.shape[0])]
    ys = [str(y) for y in g.Y] if g else [str(y) for y in range(S.bob.shape[0])]
    return {"dA": S.dA, "dB": S.dB, "psi": [complex_to_json(z) for z in S.psi],
            "alice": {x: [matrix_to_json(M) for M in S.alice[i]] for i, x in enumerate(xs)},
            "bob": {y: [matrix_to_json(M) for M in S.bob[j]] for j, y in enumerate(ys)}}


def load_json(path: str) -> Any:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InvalidInputError(f"{path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise InvalidInputError(f"{path}: invalid JSON at line {exc.lineno} column {exc.colno}: {exc.msg}") from None


def fmt12(x: float) -> str:
    return f"{x:.12g}"


def sweep_to_csv(report) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(report.rows[0].FIELDS if report.rows else
               ("param", "eps", "condI", "condII", "condIII", "delta", "bound", "achieved"))
    for r in report.rows:
        w.writerow([fmt12(v) for v in r.values()])
    return buf.getvalue()


def sweep_to_json(report, extra: dict | None = None) -> dict:
    out = {"family": report.family, "gap": report.gap, "quantumValue": report.w_q,
           "rows": [dict(zip(r.FIELDS, r.values())) for r in report.rows],
           "fits": {k: (v.as_dict() if v else None) for k, v in report.fits.items()},
           "allWithinBound": report.all_within_bound()}
    if extra:
        out.update(extra)
    return out


def gh_report_to_json(rows, extra: dict | None = None) -> dict:
    out = {"generators": {r.generator: r.as_dict() for r in rows}, "ok": all(r.ok for r in rows)}
    if extra:
        out.update(extra)
    return out


def to_jsonable(x):
    """Convert numpy values for json.dumps; complex arrays with nonzero imaginary parts become [re, im] pairs."""
    if isinstance(x, dict):
        return {str(k): to_jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [to_jsonable(v) for v in x]
    if isinstance(x, np.ndarray):
        if np.iscomplexobj(x):
            if np.all(np.abs(x.imag) < 1e-13):
                return x.real.tolist()
            return np.stack([x.real, x.imag], axis=-1).tolist()
        return x.tolist()
    if isinstance(x, np.generic):
        return to_jsonable(x.item())
    if isinstance(x, complex):
        return complex_to_json(x)
    return x
