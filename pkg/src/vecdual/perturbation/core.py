"""Perturbation mappings on sampled grids and the dual problems they generate.

A :class:`PerturbationProblem` tabulates ``Phi: X x Z -> Y ∪ {+inf}`` on a
product grid ``x_samples x z_samples``.  From it come

* the primal problem ``WInf_x [Phi(x, 0) - L x]``,
* the dual problem ``WSup_T -Phi*(L, T)`` over admissible operators ``T``,
* the loose dual, restricted to positive operators ``T(S) ⊆ K``.

The admissible operators are those with ``Phi*(L, T) != +inf``.  On a bounded
grid every sampled conjugate is finite, so admissibility is decided from the
*recession rays* a builder declares: pairs ``(dz, dy)`` with
``Phi(x, z + t dz) = Phi(x, z) + t dy`` for all ``t >= 0`` on the continuum
mapping.  Along such a ray ``L x + T z - Phi`` moves by ``t (T dz - dy)``, so
the conjugate is ``+inf`` exactly when a conic combination of these vectors
enters ``int K``.
"""

import hashlib
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from vecdual import kernels
from vecdual.cone_order import TOL_STRICT, PolyhedralCone
from vecdual.linop import LinOp
from vecdual.lp import LPStatus, lp_solve
from vecdual.mappings import SampledMap, image_meets_interior, is_positive_operator
from vecdual.weak_sets import (FrontSet, _meet_staircases, _sup_crossing_2d, crossing_offsets,
                               front_sample_points, precedes, sup_of_infs, winf, wsup)

__all__ = [
    "MAX_TABLE",
    "max_table",
    "PerturbationProblem",
    "DualReport",
    "Verdict",
    "ConditionResult",
    "operator_grid",
    "primal_value",
    "perturbation_conjugate",
    "is_admissible",
    "admissible_operators",
    "positive_operators",
    "dual_value",
    "loose_dual_value",
    "weak_duality_check",
    "strong_duality_check",
    "check_condition",
]

MAX_TABLE = 5_000_000


def max_table():
    """Cap on product-grid table entries (overridable by ``VECDUAL_MAX_TABLE``)."""
    import os

    raw = os.environ.get("VECDUAL_MAX_TABLE")
    return int(raw) if raw else MAX_TABLE


def _grid_digest(*arrays):
    h = hashlib.sha256()
    for a in arrays:
        a = np.ascontiguousarray(a, dtype=float)
        h.update(str(a.shape).encode())
        h.update(a.tobytes())
    return h.hexdigest()[:16]


def operator_grid(shape, values):
    """All matrices of ``shape`` whose entries range over ``values`` (row-major product).

    Entries are rounded to 12 decimals so that grids such as
    ``np.linspace(-3, 3, 61)`` contain exact zeros.
    """
    import itertools

    vals = np.round(np.asarray(values, dtype=float), 12) + 0.0
    rows, cols = shape
    return [LinOp(np.array(c, dtype=float).reshape(rows, cols))
            for c in itertools.product(vals, repeat=rows * cols)]


def _as_rows(A, dim=None):
    A = np.asarray(A, dtype=float)
    if A.ndim == 1:
        A = A.reshape(-1, 1) if dim in (None, 1) else A.reshape(1, -1)
    return A


@dataclass(frozen=True, eq=False)
class PerturbationProblem:
    """A perturbation mapping tabulated on ``x_samples x z_samples``.

    ``values`` has shape ``(Nx, Nz, m)``; rows of ``inf`` encode ``+inf``.
    ``recession`` lists declared rays ``(dz, dy)`` of the continuum mapping
    (see the module docstring).  ``operator_grid`` holds candidate operators
    ``T`` of shape ``(m, z_dim)`` used by the dual problems.
    """

    x_samples: np.ndarray
    z_samples: np.ndarray
    values: np.ndarray
    K: PolyhedralCone
    S: PolyhedralCone
    operator_grid: tuple = ()
    recession: tuple = ()
    name: str = "phi"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        X = _as_rows(self.x_samples)
        Z = _as_rows(self.z_samples)
        V = np.array(self.values, dtype=float)
        m = self.K.dim
        if V.ndim == 2 and m == 1:
            V = V[:, :, None]
        if V.shape != (len(X), len(Z), m):
            raise ValueError(f"values must have shape {(len(X), len(Z), m)}, got {V.shape}")
        if Z.shape[1] != self.S.dim:
            raise ValueError("z dimension does not match the cone S")
        if V.size > max_table():
            raise ValueError(f"table of {V.size} entries exceeds the cap {max_table()}")
        if np.any(np.isnan(V)) or np.any(V == -np.inf):
            raise ValueError("values must be finite or +inf")
        inf_cells = np.any(np.isinf(V), axis=2)
        V[inf_cells] = np.inf
        zero = np.nonzero(np.all(np.abs(Z) <= 1e-12, axis=1))[0]
        if len(zero) == 0:
            raise ValueError("z_samples must contain the origin")
        if inf_cells[:, zero[0]].all():
            raise ValueError("infeasible: Phi(x, 0) is +inf for every sample x")
        rays = []
        for dz, dy in self.recession:
            dz = np.asarray(dz, dtype=float).ravel()
            dy = np.asarray(dy, dtype=float).ravel()
            if dz.shape != (self.S.dim,) or dy.shape != (m,):
                raise ValueError("recession ray has wrong dimensions")
            rays.append((dz, dy))
        ops = tuple(t if isinstance(t, LinOp) else LinOp(t) for t in self.operator_grid)
        for t in ops:
            if t.shape != (m, self.S.dim):
                raise ValueError(f"operator of shape {t.shape}, expected {(m, self.S.dim)}")
        for a in (X, Z, V):
            a.setflags(write=False)
        object.__setattr__(self, "x_samples", X)
        object.__setattr__(self, "z_samples", Z)
        object.__setattr__(self, "values", V)
        object.__setattr__(self, "recession", tuple(rays))
        object.__setattr__(self, "operator_grid", ops)
        object.__setattr__(self, "zero_index", int(zero[0]))

    @classmethod
    def from_function(cls, x_samples, z_samples, func, K, S, **kw):
        """Tabulate ``func(x, z)`` (a vector, or ``None`` for ``+inf``)."""
        X = _as_rows(x_samples)
        Z = _as_rows(z_samples, S.dim)
        V = np.full((len(X), len(Z), K.dim), np.inf)
        for i, x in enumerate(X):
            for j, z in enumerate(Z):
                v = func(x, z)
                if v is not None:
                    V[i, j] = np.asarray(v, dtype=float).ravel()
        return cls(X, Z, V, K, S, **kw)

    def with_operators(self, operators):
        return PerturbationProblem(self.x_samples, self.z_samples, self.values, self.K, self.S,
                                   tuple(operators), self.recession, self.name)

    @property
    def x_dim(self):
        return self.x_samples.shape[1]

    @property
    def z_dim(self):
        return self.z_samples.shape[1]

    @property
    def dim(self):
        return self.K.dim

    @property
    def finite(self):
        if "finite" not in self._cache:
            self._cache["finite"] = np.isfinite(self.values[:, :, 0])
        return self._cache["finite"]

    @property
    def grid_id(self):
        if "grid_id" not in self._cache:
            self._cache["grid_id"] = _grid_digest(self.x_samples, self.z_samples)
        return self._cache["grid_id"]

    def zero_slice(self):
        """The primal objective ``x -> Phi(x, 0)`` as a :class:`SampledMap`."""
        return SampledMap(self.x_samples, self.values[:, self.zero_index], self.K)

    def as_sampled_map(self):
        """``Phi`` as a map on the flattened product grid (rows ``(x, z)``)."""
        Nx, Nz = len(self.x_samples), len(self.z_samples)
        XZ = np.hstack([np.repeat(self.x_samples, Nz, axis=0), np.tile(self.z_samples, (Nx, 1))])
        return SampledMap(XZ, self.values.reshape(Nx * Nz, -1), self.K)

    def shift(self, y0):
        """``Phi + y0``."""
        return PerturbationProblem(self.x_samples, self.z_samples, self.values + np.asarray(y0, dtype=float),
                                   self.K, self.S, self.operator_grid, self.recession, self.name)

    def _compact_coords(self, L):
        """Candidate cells for planar conjugates at ``L``, row-compressed.

        Inside one z-column the term ``T z`` is common to all cells, so a cell
        weakly dominated within its column is never a corner of any
        ``Phi*(L, T)``; only column-maximal cells are kept.  Returns
        ``(indptr, cols, u, u0_range)`` with ``u`` the normal coordinates of
        ``Phi - L x`` on the kept cells.
        """
        key = ("compact", L.key())
        if key not in self._cache:
            N = self.K.normals
            fin = self.finite
            LU = L(self.x_samples) @ N.T
            keep = np.zeros_like(fin)
            U = np.where(fin[:, :, None], self.values, 0.0) @ N.T
            for j in range(fin.shape[1]):
                rows = np.nonzero(fin[:, j])[0]
                if len(rows):
                    keep[rows[kernels.maximal_2d_index(LU[rows] - U[rows, j])], j] = True
            r, c = np.nonzero(keep)
            u = np.ascontiguousarray(U[r, c] - LU[r])
            indptr = np.concatenate([[0], np.cumsum(keep.sum(axis=1))]).astype(np.int64)
            self._cache[key] = (indptr, c.astype(np.int32), u, (float(u[:, 0].min()), float(u[:, 0].max())))
        return self._cache[key]


def _op(L, rows, cols):
    if L is None:
        return LinOp.zero(rows, cols)
    L = L if isinstance(L, LinOp) else LinOp(L)
    if L.shape != (rows, cols):
        raise ValueError(f"operator of shape {L.shape}, expected {(rows, cols)}")
    return L


def primal_value(P, L=None):
    """``WInf {Phi(x, 0) - L x : (x, 0) in dom Phi}`` as an inf front."""
    L = _op(L, P.dim, P.x_dim)
    fin = P.finite[:, P.zero_index]
    X = P.x_samples[fin]
    return winf(P.values[fin, P.zero_index] - L(X), P.K)


def perturbation_conjugate(P, L, T):
    """The sampled conjugate ``Phi*(L, T) = WSup{L x + T z - Phi(x, z)}``."""
    L = _op(L, P.dim, P.x_dim)
    T = _op(T, P.dim, P.z_dim)
    N = P.K.normals
    LX = L(P.x_samples)
    TZ = T(P.z_samples)
    if P.dim == 2 and N.shape[0] == 2:
        indptr, cols, u, u0 = P._compact_coords(L)
        U = kernels.conjugate_corners_2d(np.zeros((len(LX), 2)), TZ @ N.T, indptr, cols, u, None, u0)[0]
        pts = U @ np.linalg.inv(N).T
    else:
        fin = P.finite
        pts = (LX[:, None, :] + TZ[None, :, :] - np.where(fin[:, :, None], P.values, 0.0))[fin]
    return wsup(pts, P.K)


def is_admissible(P, T):
    """``Phi*(L, T) != +inf`` as decided by the declared recession rays."""
    T = _op(T, P.dim, P.z_dim)
    if not P.recession:
        return True
    V = np.array([T(dz) - dy for dz, dy in P.recession]).T
    return not image_meets_interior(V, P.K)


def admissible_operators(P, operators=None):
    ops = P.operator_grid if operators is None else operators
    return [T for T in ops if is_admissible(P, T)]


def positive_operators(P, operators=None):
    """Admissible operators with ``T(S) ⊆ K``."""
    return [T for T in admissible_operators(P, operators) if is_positive_operator(T, P.S, P.K)]


def _fast2d(P):
    return P.dim == 2 and P.K.normals.shape[0] == 2


def _neg_conjugate_corners(P, L, T, hint=None):
    """Corners of the inf front ``-Phi*(L, T)`` in normal coordinates (first coordinate
    ascending) and the table cells attaining them."""
    L = _op(L, P.dim, P.x_dim)
    N = P.K.normals
    indptr, cols, u, u0 = P._compact_coords(L)
    zero = np.zeros((len(P.x_samples), 2))
    U, cells = kernels.conjugate_corners_2d(zero, T(P.z_samples) @ N.T, indptr, cols, u, hint, u0)
    return np.ascontiguousarray(-U), cells


def _stair_height(C, q):
    """Height of the staircase ``C + R^2_+`` boundary at abscissae ``q`` (``inf`` left of it)."""
    idx = np.searchsorted(C[:, 0], q, side="right") - 1
    out = np.full(len(q), np.inf)
    ok = idx >= 0
    out[ok] = C[idx[ok], 1]
    return out


class _DualParts:
    """Per-operator inf fronts ``-Phi*(L, T)`` and their join.

    In the plane the fronts are kept as staircases in normal coordinates;
    otherwise as :class:`FrontSet` objects.
    """

    def __init__(self, P, L, ops):
        self.P = P
        self.ops = list(ops)
        self.fast = _fast2d(P)
        self.parts = []
        if not self.ops:
            self.front = FrontSet.minus_infinity(P.K)
            return
        if self.fast:
            acc = None
            hint = None
            for T in self.ops:
                C, hint = _neg_conjugate_corners(P, L, T, hint)
                self.parts.append(C)
                acc = C if acc is None else _meet_staircases(acc, C)
            self.front = winf(acc @ np.linalg.inv(P.K.normals).T, P.K)
        else:
            self.parts = [-perturbation_conjugate(P, L, T) for T in self.ops]
            self.front = sup_of_infs(self.parts, P.K)

    def subset(self, keep):
        """The join over the operators selected by the boolean list ``keep``."""
        sub = _DualParts.__new__(_DualParts)
        sub.P, sub.fast = self.P, self.fast
        sub.ops = [T for T, k in zip(self.ops, keep) if k]
        sub.parts = [c for c, k in zip(self.parts, keep) if k]
        if not sub.ops:
            sub.front = FrontSet.minus_infinity(self.P.K)
        elif self.fast:
            acc = sub.parts[0]
            for C in sub.parts[1:]:
                acc = _meet_staircases(acc, C)
            sub.front = winf(acc @ np.linalg.inv(self.P.K.normals).T, self.P.K)
        else:
            sub.front = sup_of_infs(sub.parts, self.P.K)
        return sub

    def each_precedes(self, primal):
        """``-Phi*(L, T) ≼_K primal`` for every operator."""
        if not self.fast:
            return all(precedes(f, primal) for f in self.parts)
        Pu = primal.coords()
        for C in self.parts:
            if np.any(_stair_height(C, Pu[:, 0] + TOL_STRICT) > Pu[:, 1] + TOL_STRICT):
                return False
        return True

    def offsets(self, i, Y, k):
        """Crossing offsets of the points ``Y`` against the ``i``-th front along ``k``."""
        if not self.fast:
            return crossing_offsets(self.parts[i], Y, k)
        C = self.parts[i]
        c = self.P.K.coords(k)
        return -_sup_crossing_2d((-C)[::-1], -self.P.K.coords(Y), c)


def _dual_from(P, L, ops):
    parts = _DualParts(P, L, ops)
    return parts.front, parts


def dual_value(P, L=None):
    """``WSup`` of ``-Phi*(L, T)`` over the admissible grid operators."""
    return _dual_from(P, L, admissible_operators(P))[0]


def loose_dual_value(P, L=None):
    """``WSup`` of ``-Phi*(L, T)`` over the positive grid operators."""
    return _dual_from(P, L, positive_operators(P))[0]


def weak_duality_check(P, L=None):
    """Every ``-Phi*(L, T)`` precedes the primal front, and loose ≼ dual ≼ primal."""
    primal = primal_value(P, L)
    adm = admissible_operators(P)
    parts = _DualParts(P, L, adm)
    if not parts.each_precedes(primal):
        return False
    loose = parts.subset([is_positive_operator(T, P.S, P.K) for T in adm]).front
    return precedes(loose, parts.front) and precedes(parts.front, primal)


@dataclass
class DualReport:
    """Outcome of a primal/dual comparison on one grid."""

    primal_front: FrontSet
    dual_front: FrontSet
    loose_dual_front: FrontSet
    weak_duality_ok: bool
    strong_duality_gap: float
    attaining_operators: list
    grid_id: str = ""
    n_operators: int = 0
    n_admissible: int = 0
    n_positive: int = 0
    window: object = None
    notes: list = field(default_factory=list)

    def to_dict(self):
        def front(f):
            return f.to_dict()

        return {
            "grid_id": self.grid_id,
            "primal_front": front(self.primal_front),
            "dual_front": front(self.dual_front),
            "loose_dual_front": front(self.loose_dual_front),
            "weak_duality_ok": bool(self.weak_duality_ok),
            "strong_duality_gap": float(self.strong_duality_gap),
            "attaining_operators": [T.tolist() for T in self.attaining_operators],
            "n_operators": self.n_operators,
            "n_admissible": self.n_admissible,
            "n_positive": self.n_positive,
            "window": None if self.window is None else np.asarray(self.window).tolist(),
            "notes": list(self.notes),
        }


def _default_window(front, pad=1.0):
    G = front.generators
    lo, hi = G.min(axis=0) - pad, G.max(axis=0) + pad
    return np.column_stack([lo, hi])


def front_gap(primal, dual, window, resolution=201):
    """Largest offset, along the interior direction, from primal-front samples to ``dual``.

    This bounds the one-sided Hausdorff distance from the primal front to the
    dual front inside ``window``; ``inf`` when the dual is ``-inf``.
    """
    if not dual.is_finite:
        return np.inf
    pts = front_sample_points(primal, window, resolution)
    if len(pts) == 0:
        return 0.0
    k = primal.cone.interior_point()
    return float(np.abs(crossing_offsets(dual, pts, k)).max())


def _attaining(parts, primal, window, tolerance, max_points=64):
    """Operators whose ``-Phi*(L, T)`` passes within ``tolerance`` of a primal-front sample."""
    pts = front_sample_points(primal, window, 201)
    if len(pts) == 0:
        return []
    if len(pts) > max_points:
        pts = pts[np.linspace(0, len(pts) - 1, max_points).astype(int)]
    k = primal.cone.interior_point()
    return [T for i, T in enumerate(parts.ops)
            if np.min(np.abs(parts.offsets(i, pts, k))) <= tolerance]


def strong_duality_check(P, L=None, tolerance=1e-6, window=None, resolution=201, loose=False):
    """Compare the primal front with the dual fronts and build a :class:`DualReport`.

    The gap is measured on primal-front samples in ``window`` (default: the
    primal generators' bounding box padded by one).  With ``loose=True`` the
    gap and attaining operators refer to the loose dual.
    """
    primal = primal_value(P, L)
    adm = admissible_operators(P)
    parts = _DualParts(P, L, adm)
    lparts = parts.subset([is_positive_operator(T, P.S, P.K) for T in adm])
    dual, loose_front = parts.front, lparts.front
    weak = parts.each_precedes(primal) and precedes(loose_front, dual) and precedes(dual, primal)
    if window is None:
        window = _default_window(primal)
    used = lparts if loose else parts
    gap = front_gap(primal, used.front, window, resolution)
    attaining = _attaining(used, primal, window, tolerance)
    notes = []
    if not P.recession:
        notes.append("no recession rays declared: every grid operator treated as admissible")
    return DualReport(primal, dual, loose_front, bool(weak), gap, attaining, P.grid_id,
                      len(P.operator_grid), len(adm), len(lparts.ops), np.asarray(window), notes)


# ---------------------------------------------------------------------------
# Regularity conditions on the sample grid


class Verdict(str, Enum):
    HOLDS = "Holds"
    FAILS = "Fails"
    UNDETERMINED = "Undetermined"


@dataclass
class ConditionResult:
    condition: str
    verdict: Verdict
    witness: object = None
    note: str = ""

    def __eq__(self, other):
        if isinstance(other, (Verdict, str)):
            return self.verdict == Verdict(other)
        return NotImplemented

    __hash__ = None


def _in_cone(cone, D, negate=False):
    U = cone.coords(-D if negate else D)
    return np.all(U >= -TOL_STRICT, axis=-1)


def _leq(K, A, B):
    """Rowwise ``A ≦_K B``."""
    return np.all(K.coords(B - A) >= -TOL_STRICT, axis=-1)


def _relint_witness(Z):
    """Whether ``0`` lies in the relative interior of ``conv Z``.

    LP: maximize ``t`` with ``lam_i >= t``, ``sum lam = 1``, ``sum lam_i z_i = 0``.
    """
    Z = np.unique(np.round(np.asarray(Z, dtype=float), 12), axis=0)
    n, d = Z.shape
    if n == 1:
        return bool(np.all(np.abs(Z) <= 1e-12))
    c = np.zeros(n + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-np.eye(n), np.ones((n, 1))])
    A_eq = np.zeros((d + 1, n + 1))
    A_eq[:d, :n] = Z.T
    A_eq[d, :n] = 1.0
    b_eq = np.zeros(d + 1)
    b_eq[d] = 1.0
    bounds = [(0, None)] * n + [(None, 1.0)]
    res = lp_solve(c, A_ub, np.zeros(n), A_eq, b_eq, bounds=bounds)
    return res.status is LPStatus.OPTIMAL and -res.value > TOL_STRICT


def _rank(Z):
    Z = np.asarray(Z, dtype=float)
    return 0 if len(Z) == 0 else int(np.linalg.matrix_rank(Z, tol=1e-9))


_CONVEX_NOTE = "witness implies the condition for a K-convex mapping"


def check_condition(P, which, sampling_policy=None):
    """Decide condition ``which`` (``"C0"`` ... ``"C7"``) on the sample grid.

    ``C0``, ``C6`` and ``C7`` involve only finitely many quantifiers over the
    grid and return Holds or Fails.  ``C1``-``C5`` quantify over
    neighbourhoods; they return Holds when a finite witness is found (a point
    ``x`` whose finite ``z``-samples surround the origin relative to the
    sampled ``Z0 = lin pi(dom Phi)``, which suffices for convex mappings) and
    Undetermined otherwise -- never Fails.

    ``sampling_policy`` may set ``max_candidates`` (default 16), the number of
    ``x`` samples tried as witnesses.
    """
    policy = {"max_candidates": 16}
    policy.update(sampling_policy or {})
    which = str(which).upper()
    fin = P.finite
    Z = P.z_samples
    z0 = P.zero_index
    K, S = P.K, P.S
    if which == "C0":
        neg = _in_cone(S, Z, negate=True)
        for i in np.nonzero(fin[:, z0])[0]:
            if not fin[i, neg].all():
                continue
            if _leq(K, P.values[i, neg], P.values[i, z0][None, :]).all():
                return ConditionResult("C0", Verdict.HOLDS, witness=P.x_samples[i].tolist())
        return ConditionResult("C0", Verdict.FAILS, note="no sample x dominates its -S perturbations")
    if which in ("C6", "C7"):
        if which == "C6":
            zmask = np.ones(len(Z), dtype=bool)
        else:
            zmask = _in_cone(S, Z)
        cells = fin & zmask[None, :]
        rows, cols = np.nonzero(cells)
        base = P.values[rows, z0]
        mono = bool(np.all(np.isfinite(base[:, 0])) and _leq(K, base, P.values[rows, cols]).all())
        if not mono:
            return ConditionResult(which, Verdict.FAILS, note="monotonicity in z fails on the grid")
        proj = Z[fin.any(axis=0)]
        if which == "C7":
            if not S.has_interior:
                return ConditionResult(which, Verdict.FAILS, note="int S is empty")
            interior = np.all(S.coords(proj) > TOL_STRICT, axis=1)
            if not interior.any():
                return ConditionResult(which, Verdict.FAILS, note="no sampled pi(dom) point in int S")
            return ConditionResult(which, Verdict.HOLDS, witness=proj[interior][0].tolist())
        if _rank(proj - proj[0]) == P.z_dim:
            return ConditionResult(which, Verdict.HOLDS, note="pi(dom) samples are full-dimensional")
        return ConditionResult(which, Verdict.UNDETERMINED,
                               note="monotone, but sampled pi(dom) is not full-dimensional")
    if which in ("C1", "C2", "C3", "C4", "C5"):
        proj = Z[fin.any(axis=0)]
        if which in ("C4", "C5"):
            if _relint_witness(proj):
                return ConditionResult(which, Verdict.HOLDS, note="0 in ri of sampled pi(dom)")
            return ConditionResult(which, Verdict.UNDETERMINED)
        r = _rank(proj)
        counts = fin.sum(axis=1) * fin[:, z0]
        order = np.argsort(-counts, kind="stable")[: policy["max_candidates"]]
        for i in order:
            if counts[i] == 0:
                break
            Zi = Z[fin[i]]
            if _rank(Zi) == r and _relint_witness(Zi):
                return ConditionResult(which, Verdict.HOLDS, witness=P.x_samples[i].tolist(), note=_CONVEX_NOTE)
        return ConditionResult(which, Verdict.UNDETERMINED)
    raise ValueError(f"unknown condition {which!r}")
