"""Scenario files, instance parsing and deterministic report/CSV writers.

Scenario files are JSON objects::

    {"name": "...", "task": "dual", "seed": 0,
     "instance": {...} | "instance_file": "relative/path.json",
     "grids": {...}, "tolerances": {...}, "probe_res": 41}

Map values in instances are given either as tables (``"values"``) or as
arithmetic expressions in ``x`` (``x0, x1, ...`` for components), evaluated
by a restricted AST walker: numbers, ``+ - * / **``, unary signs and the
functions listed in ``_FUNCS``.
"""

import ast
import csv
import json
import math
import os

import numpy as np

from vecdual.cone_order import TOL_STRICT, ConeError, PolyhedralCone
from vecdual.weak_sets import Label, classify_points

__all__ = ["SchemaError", "TASKS", "load_scenario", "parse_grid", "parse_cone", "eval_expr",
           "map_values", "emit_front_csv", "write_json", "dumps", "tolerances"]

TASKS = ("primal", "dual", "farkas", "representation", "a2", "properties", "example_p1")

_FUNCS = {"abs": np.abs, "sqrt": np.sqrt, "exp": np.exp, "log": np.log,
          "maximum": np.maximum, "minimum": np.minimum, "sin": np.sin, "cos": np.cos}
_CONSTS = {"pi": math.pi, "e": math.e}
_BINOPS = {ast.Add: np.add, ast.Sub: np.subtract, ast.Mult: np.multiply,
           ast.Div: np.divide, ast.Pow: np.power}


class SchemaError(ValueError):
    """Invalid scenario content; ``path`` locates the offending field."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path
        self.message = message

    def to_dict(self):
        return {"error": "schema", "path": self.path, "message": self.message}


def tolerances():
    """The numerical tolerances embedded in every report."""
    from vecdual.lp import PIVOT_TOL
    return {"strict": TOL_STRICT, "lp_pivot": PIVOT_TOL}


def _require(d, key, kind, path):
    if key not in d:
        raise SchemaError(f"{path}.{key}", "missing required field")
    v = d[key]
    if not isinstance(v, kind):
        raise SchemaError(f"{path}.{key}", f"expected {getattr(kind, '__name__', kind)}")
    return v


def load_scenario(path):
    """Read and validate a scenario file.

    Raises :class:`json.JSONDecodeError` for malformed JSON, ``OSError``
    for missing files and :class:`SchemaError` for invalid content.  An
    ``instance_file`` reference is resolved relative to the scenario and
    inlined as ``instance``.
    """
    with open(path, encoding="utf-8") as fh:
        sc = json.load(fh)
    if not isinstance(sc, dict):
        raise SchemaError("$", "scenario must be a JSON object")
    _require(sc, "name", str, "$")
    task = _require(sc, "task", str, "$")
    if task not in TASKS:
        raise SchemaError("$.task", f"unknown task {task!r}; expected one of {', '.join(TASKS)}")
    seed = sc.get("seed", 0)
    if not isinstance(seed, int) or isinstance(seed, bool) or seed < 0:
        raise SchemaError("$.seed", "seed must be a nonnegative integer")
    for key in ("grids", "tolerances"):
        if key in sc and not isinstance(sc[key], dict):
            raise SchemaError(f"$.{key}", "expected object")
    if "probe_res" in sc and (not isinstance(sc["probe_res"], int) or sc["probe_res"] < 1):
        raise SchemaError("$.probe_res", "expected a positive integer")
    if "instance_file" in sc:
        ref = os.path.join(os.path.dirname(os.path.abspath(path)), sc["instance_file"])
        if not os.path.exists(ref):
            raise SchemaError("$.instance_file", f"referenced file not found: {sc['instance_file']}")
        with open(ref, encoding="utf-8") as fh:
            sc["instance"] = json.load(fh)
    if task not in ("properties", "example_p1"):
        inst = _require(sc, "instance", dict, "$")
        if task == "a2":
            _require(inst, "pieces", list, "$.instance")
        else:
            for key in ("x_grid", "z_grid", "F", "G", "K", "S"):
                if key not in inst:
                    raise SchemaError(f"$.instance.{key}", "missing required field")
    return sc


def parse_grid(spec, path="grid", dim=None):
    """A grid from ``{"lo", "hi", "step"}``, ``{"axes": [...]}``, ``{"points": [...]}`` or a list."""
    if isinstance(spec, list):
        P = np.asarray(spec, dtype=float)
        return P if P.ndim == 2 or dim is None else P.reshape(-1, dim)
    if not isinstance(spec, dict):
        raise SchemaError(path, "grid must be a list or an object")
    if "points" in spec:
        return np.asarray(spec["points"], dtype=float)
    if "axes" in spec:
        axes = [parse_grid(a, f"{path}.axes[{i}]") for i, a in enumerate(spec["axes"])]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([g.ravel() for g in mesh], axis=1)
    try:
        lo, hi, step = float(spec["lo"]), float(spec["hi"]), float(spec["step"])
    except (KeyError, TypeError, ValueError):
        raise SchemaError(path, "grid object needs numeric lo, hi and step") from None
    if step <= 0 or hi < lo:
        raise SchemaError(path, "need step > 0 and lo <= hi")
    n = int(round((hi - lo) / step)) + 1
    if n > 10_000_000:
        raise SchemaError(path, "grid too large")
    return np.round(np.linspace(lo, hi, n), 10) + 0.0


def parse_cone(spec, path="cone"):
    """A cone from ``"orthant"``-style shorthands or the serialized dictionary."""
    try:
        return PolyhedralCone.from_dict(spec)
    except (ConeError, KeyError, TypeError, ValueError) as exc:
        raise SchemaError(path, f"invalid cone: {exc}") from None


def _eval_node(node, env):
    if isinstance(node, ast.Expression):
        return _eval_node(node.body, env)
    if isinstance(node, ast.Constant) and isinstance(node.value, (int, float)):
        return float(node.value)
    if isinstance(node, ast.Name):
        if node.id in env:
            return env[node.id]
        if node.id in _CONSTS:
            return _CONSTS[node.id]
        raise ValueError(f"unknown name {node.id!r}")
    if isinstance(node, ast.BinOp) and type(node.op) in _BINOPS:
        return _BINOPS[type(node.op)](_eval_node(node.left, env), _eval_node(node.right, env))
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
        v = _eval_node(node.operand, env)
        return -v if isinstance(node.op, ast.USub) else v
    if isinstance(node, ast.Call) and isinstance(node.func, ast.Name) and node.func.id in _FUNCS \
            and not node.keywords:
        return _FUNCS[node.func.id](*[_eval_node(a, env) for a in node.args])
    raise ValueError(f"unsupported expression element {type(node).__name__}")


def eval_expr(expr, X):
    """Evaluate an arithmetic expression on the rows of ``X`` (variables ``x``, ``x0``, ...)."""
    X = np.asarray(X, dtype=float)
    X = X.reshape(-1, 1) if X.ndim == 1 else X
    env = {f"x{i}": X[:, i] for i in range(X.shape[1])}
    env["x"] = X[:, 0]
    tree = ast.parse(str(expr), mode="eval")
    with np.errstate(all="ignore"):
        out = np.broadcast_to(np.asarray(_eval_node(tree, env), dtype=float), (len(X),))
    return np.array(out)


def map_values(spec, X, dim, path):
    """Values of a map on the rows of ``X``: ``{"expr": [...]}`` or ``{"values": [[...]]}``."""
    if isinstance(spec, dict) and "values" in spec:
        V = np.asarray(spec["values"], dtype=float)
        if V.size != len(X) * dim:
            raise SchemaError(path, f"expected {len(X)}x{dim} values")
        return V.reshape(len(X), dim)
    exprs = spec.get("expr") if isinstance(spec, dict) else spec
    if isinstance(exprs, str):
        exprs = [exprs]
    if not isinstance(exprs, list) or len(exprs) != dim:
        raise SchemaError(path, f"expected {dim} expressions or a values table")
    try:
        return np.column_stack([eval_expr(e, X) for e in exprs])
    except (SyntaxError, ValueError) as exc:
        raise SchemaError(path, f"bad expression: {exc}") from None


def _fmt(v):
    return format(float(v) + 0.0, ".12g")


def emit_front_csv(front, window, resolution, path):
    """Write a labelled probe lattice around a front.

    ``window`` is ``[[lo, hi], ...]`` per axis and ``resolution`` the probe
    step.  Columns are ``y0, y1, ..., label`` with labels ``Below``, ``On``
    and ``Above``; rows run over the lattice in C order (last axis fastest).
    An empty window yields a header-only file.
    """
    W = np.asarray(window, dtype=float).reshape(-1, 2)
    m = len(W)
    header = [f"y{i}" for i in range(m)] + ["label"]
    empty = np.any(W[:, 1] < W[:, 0])
    rows = []
    if not empty:
        axes = []
        for lo, hi in W:
            n = int(math.floor((hi - lo) / resolution + 1e-9)) + 1
            axes.append(np.round(lo + resolution * np.arange(n), 10) + 0.0)
        mesh = np.meshgrid(*axes, indexing="ij")
        P = np.stack([g.ravel() for g in mesh], axis=1)
        labels = classify_points(front, P) if len(P) else np.zeros(0, dtype=int)
        rows = [[_fmt(v) for v in p] + [Label(int(lab)).name.capitalize()] for p, lab in zip(P, labels)]
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return len(rows)


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.bool_,)):
        return bool(o)
    raise TypeError(f"not serializable: {type(o).__name__}")


def _clean(o):
    """Replace non-finite floats by strings so the output is strict JSON."""
    if isinstance(o, dict):
        return {str(k): _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, np.ndarray):
        return _clean(o.tolist())
    if isinstance(o, (float, np.floating)):
        f = float(o)
        if math.isnan(f):
            return "nan"
        if math.isinf(f):
            return "inf" if f > 0 else "-inf"
        return f + 0.0
    return o


def dumps(obj):
    return json.dumps(_clean(obj), sort_keys=True, indent=2, default=_default) + "\n"


def write_json(obj, path):
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(obj))
