"""Scalar piecewise-linear problems: conjugates, epigraph sums and dual problems.

The scalar composite problem is

    inf { f(x) + kappa(H x + h) : A_C x <= b_C,  G x + g in -S }

with ``f`` and ``kappa`` convex piecewise-linear (maxima of affine pieces).
Every conjugate of such data is a small linear program:

* ``f*(x*) = min { -sum mu_i b_i : sum mu_i a_i = x*, mu in simplex }``,
* ``i_C*(y*) = min { b_C . theta : A_C^T theta = y*, theta >= 0 }``,
* the conjugate of an affine map ``u.x + c`` is ``-c`` at ``u`` and ``+inf``
  elsewhere,

and ``S+`` is generated by the halfspace normals of ``S``.  Each dual problem
therefore becomes one joint LP, which makes this module an exact oracle for
the sampled vector machinery when ``Y = R``.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from vecdual.cone_order import PolyhedralCone
from vecdual.linop import LinOp
from vecdual.lp import LPResult, LPStatus, lp_solve
from vecdual.mappings import SampledMap, conjugate
from vecdual.weak_sets import winf

__all__ = [
    "LPResult",
    "LPStatus",
    "lp_solve",
    "PLFunction",
    "ScalarInstance",
    "DUAL_VARIANTS",
    "A2Report",
    "scalar_conjugate",
    "scalar_primal",
    "slater_point",
    "verify_A2",
    "build_scalar_dual",
    "vertex_samples",
    "scalar_crosscheck",
]

DUAL_VARIANTS = ("CCD1", "CCD1l", "CCD2", "CCD2l", "CCD3", "CCD3l", "D2", "D3")
SLATER_EPS = 1e-6


@dataclass(frozen=True)
class PLFunction:
    """``x -> max_i (slopes[i] . x + intercepts[i])``."""

    slopes: np.ndarray
    intercepts: np.ndarray

    def __post_init__(self):
        a = np.atleast_2d(np.asarray(self.slopes, dtype=float))
        b = np.asarray(self.intercepts, dtype=float).ravel()
        if len(a) != len(b) or len(b) == 0:
            raise ValueError("a piecewise-linear function needs matching, nonempty pieces")
        object.__setattr__(self, "slopes", a)
        object.__setattr__(self, "intercepts", b)

    @classmethod
    def from_pieces(cls, pieces):
        """From ``[[a, b], ...]`` with ``a`` a scalar or a list."""
        a = [np.ravel(np.asarray(p[0], dtype=float)) for p in pieces]
        return cls(np.array(a), [float(p[1]) for p in pieces])

    @classmethod
    def zero(cls, n):
        return cls(np.zeros((1, n)), [0.0])

    @property
    def dim(self):
        return self.slopes.shape[1]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        return np.max(x @ self.slopes.T + self.intercepts, axis=-1)

    def compose_affine(self, A, c):
        """``x -> self(A x + c)``."""
        A = np.atleast_2d(np.asarray(A, dtype=float))
        return PLFunction(self.slopes @ A, self.intercepts + self.slopes @ np.ravel(c))

    def __add__(self, other):
        a = (self.slopes[:, None, :] + other.slopes[None, :, :]).reshape(-1, self.dim)
        b = (self.intercepts[:, None] + other.intercepts[None, :]).ravel()
        return PLFunction(a, b)

    def to_list(self):
        return [[a.tolist(), float(b)] for a, b in zip(self.slopes, self.intercepts)]


def _affine(A, b, rows, n):
    A = np.zeros((0, n)) if A is None else np.asarray(A, dtype=float).reshape(-1, n)
    b = np.zeros(len(A)) if b is None else np.asarray(b, dtype=float).ravel()
    if len(b) != len(A) or (rows is not None and len(A) != rows):
        raise ValueError("affine data have inconsistent sizes")
    return A, b


@dataclass(frozen=True, eq=False)
class ScalarInstance:
    """Data of ``inf { f(x) + kappa(H x + h) : x in C, G x + g in -S }``.

    ``C = {x : C_A x <= C_b}`` (no rows means ``R^n``); ``kappa`` is optional
    and ordered by the cone ``P`` on its domain.
    """

    f: PLFunction
    C_A: object = None
    C_b: object = None
    G_A: object = None
    G_b: object = None
    S: PolyhedralCone = None
    kappa: PLFunction = None
    H_A: object = None
    H_b: object = None
    P: PolyhedralCone = None
    name: str = "scalar"

    def __post_init__(self):
        n = self.f.dim
        CA, Cb = _affine(self.C_A, self.C_b, None, n)
        k = 0 if self.S is None else self.S.dim
        GA, Gb = _affine(self.G_A, self.G_b, k, n)
        object.__setattr__(self, "C_A", CA)
        object.__setattr__(self, "C_b", Cb)
        object.__setattr__(self, "G_A", GA)
        object.__setattr__(self, "G_b", Gb)
        if self.kappa is not None:
            q = self.kappa.dim
            HA, Hb = _affine(self.H_A, self.H_b, q, n)
            object.__setattr__(self, "H_A", HA)
            object.__setattr__(self, "H_b", Hb)
            if self.P is None:
                object.__setattr__(self, "P", PolyhedralCone.orthant(q))
        res = scalar_primal(self)
        if res.status is LPStatus.INFEASIBLE:
            raise ValueError("infeasible instance: C ∩ G^-1(-S) is empty")

    @property
    def n(self):
        return self.f.dim

    @property
    def k(self):
        return len(self.G_b)

    def S_normals(self):
        return np.zeros((0, 0)) if self.S is None else self.S.normals

    def objective(self):
        """``f + kappa∘H`` as one piecewise-linear function."""
        if self.kappa is None:
            return self.f
        return self.f + self.kappa.compose_affine(self.H_A, self.H_b)

    def feasible(self, x, tol=1e-9):
        x = np.asarray(x, dtype=float)
        ok = np.all(self.C_A @ x <= self.C_b + tol)
        if self.k:
            ok = ok and np.all(self.S.coords(-(self.G_A @ x + self.G_b)) >= -tol)
        return bool(ok)

    def constraint_rows(self):
        """``(A, b)`` with ``A x <= b`` describing ``C ∩ G^-1(-S)``."""
        A, b = [self.C_A], [self.C_b]
        if self.k:
            N = self.S.normals
            A.append(N @ self.G_A)
            b.append(-N @ self.G_b)
        return np.vstack(A), np.concatenate(b)

    def to_dict(self):
        d = {"name": self.name, "pieces": self.f.to_list(),
             "C_halfspaces": {"A": self.C_A.tolist(), "b": self.C_b.tolist()}}
        if self.k:
            d["G"] = {"A": self.G_A.tolist(), "b": self.G_b.tolist()}
            d["S"] = self.S.to_dict()
        if self.kappa is not None:
            d["kappa"] = self.kappa.to_list()
            d["H"] = {"A": self.H_A.tolist(), "b": self.H_b.tolist()}
            d["P"] = self.P.to_dict()
        return d

    @classmethod
    def from_dict(cls, d):
        f = PLFunction.from_pieces(d["pieces"])
        n = f.dim
        C = d.get("C_halfspaces") or {}
        kw = {"C_A": np.asarray(C.get("A", np.zeros((0, n))), dtype=float).reshape(-1, n),
              "C_b": C.get("b", [])}
        if "G" in d:
            kw["S"] = PolyhedralCone.from_dict(d["S"])
            kw["G_A"], kw["G_b"] = d["G"]["A"], d["G"]["b"]
        if "kappa" in d:
            kw["kappa"] = PLFunction.from_pieces(d["kappa"])
            kw["H_A"], kw["H_b"] = d["H"]["A"], d["H"]["b"]
            if "P" in d:
                kw["P"] = PolyhedralCone.from_dict(d["P"])
        return cls(f, name=d.get("name", "scalar"), **kw)


class _LP:
    """Tiny builder for ``maximize`` problems over named variable blocks."""

    def __init__(self):
        self.blocks = {}
        self.size = 0
        self.bounds = []
        self.eq_rows, self.eq_rhs = [], []
        self.ub_rows, self.ub_rhs = [], []
        self.obj = {}

    def var(self, name, size, lo=None):
        self.blocks[name] = (self.size, size)
        self.size += size
        self.bounds += [(lo, None)] * size

    def _matrix(self, terms, nrows):
        M = np.zeros((nrows, self.size))
        for name, coef in terms:
            start, size = self.blocks[name]
            M[:, start:start + size] += np.asarray(coef, dtype=float).reshape(nrows, size)
        return M

    def eq(self, terms, rhs):
        """Vector equality ``sum_j coef_j @ var_j = rhs`` (``coef_j`` of shape ``(r, size_j)``)."""
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        if len(rhs):
            self.eq_rows.append(terms)
            self.eq_rhs.append(rhs)

    def ge(self, terms, rhs):
        rhs = np.atleast_1d(np.asarray(rhs, dtype=float))
        if len(rhs):
            self.ub_rows.append([(name, -np.asarray(coef, dtype=float)) for name, coef in terms])
            self.ub_rhs.append(-rhs)

    def maximize(self, terms):
        self.obj = terms

    def _stack(self, rows, rhs):
        if not rows:
            return None, None
        return np.vstack([self._matrix(t, len(r)) for t, r in zip(rows, rhs)]), np.concatenate(rhs)

    def solve(self):
        c = -self._matrix(self.obj, 1)[0]
        A_eq, b_eq = self._stack(self.eq_rows, self.eq_rhs)
        A_ub, b_ub = self._stack(self.ub_rows, self.ub_rhs)
        res = lp_solve(c, A_ub, b_ub, A_eq, b_eq, bounds=self.bounds)
        value = {LPStatus.OPTIMAL: -res.value if res.optimal else None,
                 LPStatus.UNBOUNDED: np.inf, LPStatus.INFEASIBLE: -np.inf}[res.status]
        return value, res

    def get(self, res, name):
        start, size = self.blocks[name]
        return res.x[start:start + size] if res.optimal else None


def scalar_conjugate(f, x_star, C=None):
    """``sup { <x*, x> - f(x) : x in C }`` for piecewise-linear ``f`` (``+inf`` if unbounded).

    ``C`` is ``None`` or a pair ``(A, b)`` describing ``A x <= b``.
    """
    n = f.dim
    x_star = np.ravel(np.asarray(x_star, dtype=float))
    A, b = _affine(*(C if C is not None else (None, None)), None, n)
    p = len(f.intercepts)
    # variables (x, t): minimize t - <x*, x>
    c = np.concatenate([-x_star, [1.0]])
    A_ub = np.vstack([np.hstack([f.slopes, -np.ones((p, 1))]), np.hstack([A, np.zeros((len(A), 1))])])
    b_ub = np.concatenate([-f.intercepts, b])
    res = lp_solve(c, A_ub, b_ub, bounds=[(None, None)] * (n + 1))
    if res.status is LPStatus.UNBOUNDED:
        return np.inf
    if res.status is LPStatus.INFEASIBLE:
        return -np.inf
    return -res.value + 0.0


def scalar_primal(inst):
    """The primal LP ``min t`` over the epigraph of ``f + kappa∘H`` on the feasible set."""
    g = inst.objective()
    n = inst.n
    A, b = inst.constraint_rows()
    p = len(g.intercepts)
    c = np.concatenate([np.zeros(n), [1.0]])
    A_ub = np.vstack([np.hstack([g.slopes, -np.ones((p, 1))]), np.hstack([A, np.zeros((len(A), 1))])])
    b_ub = np.concatenate([-g.intercepts, b])
    return lp_solve(c, A_ub, b_ub, bounds=[(None, None)] * (n + 1))


def slater_point(inst, eps=SLATER_EPS):
    """A point of ``int C`` with ``G(x) in -int S`` (margin ``>= eps``), or ``None``.

    Maximizes ``s <= 1`` subject to ``C_A x + s <= C_b`` and
    ``N_S (G x + g) + s <= 0`` row by row.
    """
    A, b = inst.constraint_rows()
    n = inst.n
    if len(A) == 0:
        return np.zeros(n)
    c = np.zeros(n + 1)
    c[-1] = -1.0
    res = lp_solve(c, np.hstack([A, np.ones((len(A), 1))]), b, bounds=[(None, None)] * n + [(None, 1.0)])
    if res.optimal and -res.value >= eps:
        return res.x[:n]
    return None


@dataclass
class A2Report:
    """Probe comparison for the epigraph-sum identity."""

    slater: bool
    probes: list = field(default_factory=list)

    @property
    def n_agree(self):
        return sum(p["lhs"] == p["rhs"] for p in self.probes)

    @property
    def rhs_not_lhs(self):
        """Probes in the epigraph sum but not in the left epigraph (never expected)."""
        return sum(p["rhs"] and not p["lhs"] for p in self.probes)

    @property
    def all_agree(self):
        return self.n_agree == len(self.probes)

    def to_dict(self):
        return {"slater": self.slater, "n_probes": len(self.probes), "n_agree": self.n_agree,
                "rhs_not_lhs": self.rhs_not_lhs, "probes": self.probes}


def _epigraph_sum_value(inst, x_star):
    """``min f*(x1) + i_C*(x2) + (z*∘G)*(x3)`` over splits ``x1 + x2 + x3 = x*``, ``z* in S+``."""
    g = inst.objective()
    n = inst.n
    lp = _LP()
    lp.var("mu", len(g.intercepts), 0.0)
    lp.var("theta", len(inst.C_b), 0.0)
    N = inst.S_normals()
    lp.var("eta", len(N), 0.0)
    # x1 = a^T mu, x2 = C_A^T theta, x3 = G_A^T N^T eta
    GtN = inst.G_A.T @ N.T if inst.k else np.zeros((n, 0))
    lp.eq([("mu", g.slopes.T), ("theta", inst.C_A.T), ("eta", GtN)], x_star)
    lp.eq([("mu", np.ones((1, len(g.intercepts))))], [1.0])
    # maximize -(value) = sum mu b - theta b_C + z* . g
    lp.maximize([("mu", g.intercepts), ("theta", -inst.C_b), ("eta", N @ inst.G_b if inst.k else [])])
    value, res = lp.solve()
    return -value


def verify_A2(inst, probes, tol=1e-9):
    """Compare both sides of ``epi (f + i_A)* = epi f* + epi i_C* + ∪_{z* in S+} epi (z*∘G)*``.

    ``probes`` are pairs ``(x*, r)``.  The left side tests
    ``(f + i_A)*(x*) <= r``; the right side asks for a split of ``(x*, r)``
    across the three epigraphs, decided by one LP.  With a composite term
    ``f`` stands for ``f + kappa∘H``.
    """
    A, b = inst.constraint_rows()
    rep = A2Report(slater=slater_point(inst) is not None)
    for x_star, r in probes:
        x_star = np.ravel(np.asarray(x_star, dtype=float))
        lhs_val = scalar_conjugate(inst.objective(), x_star, (A, b))
        rhs_val = _epigraph_sum_value(inst, x_star)
        rep.probes.append({"x_star": x_star.tolist(), "r": float(r),
                           "lhs_value": float(lhs_val), "rhs_value": float(rhs_val),
                           "lhs": bool(lhs_val <= r + tol), "rhs": bool(rhs_val <= r + tol)})
    return rep


def _dual_lp(inst, variant):
    loose = variant.endswith("l")
    base = variant.rstrip("l")
    n = inst.n
    N = inst.S_normals()
    k = inst.k
    lp = _LP()
    composite = inst.kappa is not None and base != "D2" and base != "D3"
    f = inst.f if composite else inst.objective()
    p = len(f.intercepts)
    lp.var("mu", p, 0.0)
    lp.var("theta", len(inst.C_b), 0.0)
    lp.var("eta", len(N), 0.0)
    lam2 = N.T if k else np.zeros((0, 0))            # lambda2 = N^T eta
    G_part = inst.G_A.T @ lam2 if k else np.zeros((n, 0))
    obj = [("mu", f.intercepts), ("theta", -inst.C_b), ("eta", N @ inst.G_b if k else [])]
    lp.eq([("mu", np.ones((1, p)))], [1.0])
    lin = [("eta", G_part)]                           # the slope of (lambda1 H + lambda2 G)
    if composite:
        q = inst.kappa.dim
        lp.var("lam1", q)
        lp.var("nu", len(inst.kappa.intercepts), 0.0)
        lp.eq([("nu", inst.kappa.slopes.T), ("lam1", -np.eye(q))], np.zeros(q))
        lp.eq([("nu", np.ones((1, len(inst.kappa.intercepts))))], [1.0])
        obj += [("nu", inst.kappa.intercepts), ("lam1", inst.H_b)]
        lin.append(("lam1", inst.H_A.T))
        if loose:
            lp.ge([("lam1", inst.P.generators)], np.zeros(len(inst.P.generators)))
    if base == "CCD1":
        # inf_{x in C} [f + lambda1 H + lambda2 G] by LP duality
        lp.eq([("mu", f.slopes.T), ("theta", inst.C_A.T)] + lin, np.zeros(n))
    elif base in ("CCD2", "D2"):
        lp.var("xs", n)
        lp.eq([("mu", f.slopes.T), ("xs", -np.eye(n))], np.zeros(n))
        # (lambda1 H + lambda2 G + i_C)*(-x*) = i_C*(-x* - slope) - const
        lp.eq([("theta", inst.C_A.T), ("xs", np.eye(n))] + lin, np.zeros(n))
    elif base in ("CCD3", "D3"):
        lp.var("xs", n)
        lp.var("ys", n)
        lp.eq([("mu", f.slopes.T), ("xs", -np.eye(n))], np.zeros(n))
        # the affine conjugate is finite only at -x* - y* = slope
        lp.eq([("xs", np.eye(n)), ("ys", np.eye(n))] + lin, np.zeros(n))
        lp.eq([("theta", inst.C_A.T), ("ys", -np.eye(n))], np.zeros(n))
    else:
        raise ValueError(f"unknown dual variant {variant!r}")
    lp.maximize(obj)
    return lp


def build_scalar_dual(inst, variant):
    """Optimal value of a scalar dual problem and its multipliers.

    Variants: ``CCD1``/``CCD1l`` (Lagrange), ``CCD2``/``CCD2l`` and
    ``CCD3``/``CCD3l`` (Fenchel-Lagrange), and ``D2``/``D3`` for the problem
    without composite term (``f + kappa∘H`` folded into one function).  The
    ``l`` variants restrict ``lambda1`` to ``P+``.  Returns
    ``(value, multipliers)``; ``value`` is ``+inf`` for an unbounded dual.
    """
    if variant not in DUAL_VARIANTS:
        raise ValueError(f"unknown dual variant {variant!r}")
    lp = _dual_lp(inst, variant)
    value, res = lp.solve()
    mult = {"status": res.status.value}
    if res.optimal:
        N = inst.S_normals()
        eta = lp.get(res, "eta")
        mult["lambda2"] = (N.T @ eta).tolist() if inst.k else []
        for name, key in (("lam1", "lambda1"), ("xs", "x_star"), ("ys", "y_star")):
            if name in lp.blocks:
                mult[key] = lp.get(res, name).tolist()
    return value, mult


def vertex_samples(inst, with_constraints=True):
    """x-projections of the vertices of the epigraph of ``f + kappa∘H`` over the domain.

    Every linear functional ``<x*, x> - t`` attains its maximum over that
    polyhedron at a vertex, so a map sampled at these points has exactly the
    same conjugate and minimum.  The domain must be bounded.
    """
    g = inst.objective()
    n = inst.n
    A, b = inst.constraint_rows() if with_constraints else (inst.C_A, inst.C_b)
    rows = np.vstack([np.hstack([g.slopes, -np.ones((len(g.intercepts), 1))]),
                      np.hstack([A, np.zeros((len(A), 1))])])
    rhs = np.concatenate([-g.intercepts, b])
    pts = []
    for idx in itertools.combinations(range(len(rows)), n + 1):
        M = rows[list(idx)]
        if abs(np.linalg.det(M)) < 1e-12:
            continue
        v = np.linalg.solve(M, rhs[list(idx)])
        if np.all(rows @ v <= rhs + 1e-9):
            pts.append(v[:n])
    if not pts:
        raise ValueError("no vertices: the domain must be a nonempty polytope")
    P = np.round(np.array(pts), 12) + 0.0
    return np.unique(P, axis=0)


def scalar_crosscheck(inst, probes, tol=1e-6, return_details=False):
    """Run the vector machinery with ``Y = R`` and compare with the LP oracle.

    The objective ``f + kappa∘H + i_A`` is sampled at :func:`vertex_samples`
    and ordered by ``K = R_+``; its conjugate fronts (single points) and its
    weak infimum must match :func:`scalar_conjugate` and the primal LP.
    """
    K = PolyhedralCone.orthant(1)
    X = vertex_samples(inst)
    g = inst.objective()
    F = SampledMap(X, g(X).reshape(-1, 1), K)
    A, b = inst.constraint_rows()
    details = []
    primal = scalar_primal(inst)
    vec_min = float(winf(F.values, K).generators.min())
    ok = primal.optimal and abs(vec_min - primal.value) <= tol
    details.append({"kind": "primal", "vector": vec_min, "lp": float(primal.value)})
    for x_star in probes:
        x_star = np.ravel(np.asarray(x_star, dtype=float))
        front = conjugate(F, LinOp(x_star.reshape(1, -1)))
        v = float(front.generators.max())
        lp_v = scalar_conjugate(g, x_star, (A, b))
        good = abs(v - lp_v) <= tol
        ok = ok and good
        details.append({"kind": "conjugate", "x_star": x_star.tolist(), "vector": v, "lp": float(lp_v)})
    return (ok, details) if return_details else ok
