"""Perturbation mappings for cone-constrained composite vector problems.

The composite problem is ``WInf {F(x) + kappa(H(x)) : x in C, G(x) in -S}``.
Its data are sampled: ``F``, ``H`` and ``G`` on an x-grid, ``kappa`` on a
w-grid, and ``-S`` on a finite set ``S_samp`` (containing the origin and
every feasible ``G(x)``).  The builders choose the perturbation grids as
exact difference sets, e.g. ``Wgrid = dom(kappa) - H(X)`` and
``Zgrid = S_samp - G(X)``, so every perturbed argument ``H(x) + w`` or
``G(x) + z`` that matters lands on a stored sample.  The conjugate
decompositions of the four mappings then hold exactly on the grid.
"""

import itertools
from dataclasses import dataclass, field

import numpy as np

from vecdual.cone_order import TOL_STRICT, PolyhedralCone
from vecdual.linop import LinOp
from vecdual.mappings import SampledMap, is_positive_operator, is_weakly_positive
from vecdual.perturbation.core import (DualReport, PerturbationProblem, _default_window, _op,
                                       front_gap, max_table, primal_value)
from vecdual.weak_sets import FrontSet, precedes, sup_of_infs, winf, ws_sum, wsup

__all__ = [
    "CCVPInstance",
    "build_cone_constrained",
    "build_phi1",
    "build_phi2",
    "build_phi3",
    "build_phi4",
    "phi1_conjugate_rhs",
    "phi1_conjugate_identity",
    "ccvd_objective",
    "build_ccvd",
]

_KEY = 1e-9


def _keys(P):
    return [k.tobytes() for k in np.round(np.asarray(P, dtype=float) / _KEY).astype(np.int64)]


def _unique_rows(P):
    P = np.round(np.asarray(P, dtype=float), 12) + 0.0
    return np.unique(P, axis=0)


def _diff_grid(A, B):
    """All differences ``a - b`` (deduplicated, lexicographically sorted)."""
    return _unique_rows((A[:, None, :] - B[None, :, :]).reshape(-1, A.shape[1]))


class _Table:
    """Exact-match lookup of a sampled map (``+inf`` off the samples)."""

    def __init__(self, samples, values):
        self.index = {k: i for i, k in enumerate(_keys(samples))}
        self.values = np.asarray(values, dtype=float)

    def rows(self, P):
        idx = np.array([self.index.get(k, -1) for k in _keys(P)], dtype=np.intp)
        out = np.full((len(idx), self.values.shape[1]), np.inf)
        ok = idx >= 0
        out[ok] = self.values[idx[ok]]
        return out

    def member(self, P):
        return np.array([k in self.index for k in _keys(P)], dtype=bool)


def build_cone_constrained(x_samples, z_samples, F, G, B, K, S, operators=(), name="cone-constrained"):
    """``Phi(x, z) = F(x) + B z`` if ``G(x) + z in -S``, else ``+inf``.

    ``F`` and ``G`` are arrays of values on ``x_samples`` (or callables);
    ``B`` is an ``m x k`` matrix.  For every generator ``s`` of ``S`` the
    direction ``z -> z - t s`` keeps feasibility and shifts the value by
    ``-t B s``; these are declared as recession rays.
    """
    X = np.asarray(x_samples, dtype=float)
    X = X.reshape(-1, 1) if X.ndim == 1 else X
    Z = np.asarray(z_samples, dtype=float)
    Z = Z.reshape(-1, S.dim) if Z.ndim == 1 else Z
    Fv = np.array([np.ravel(F(x)) for x in X]) if callable(F) else np.asarray(F, dtype=float).reshape(len(X), -1)
    Gv = np.array([np.ravel(G(x)) for x in X]) if callable(G) else np.asarray(G, dtype=float).reshape(len(X), -1)
    B = np.asarray(B, dtype=float).reshape(K.dim, S.dim)
    if len(X) * len(Z) * K.dim > max_table():
        raise ValueError("product grid exceeds the table cap")
    V = Fv[:, None, :] + (Z @ B.T)[None, :, :]
    arg = Gv[:, None, :] + Z[None, :, :]
    feasible = np.all(S.coords(-arg) >= -TOL_STRICT, axis=2) & np.isfinite(Fv[:, :1]) & np.isfinite(Gv[:, :1])
    V[~feasible] = np.inf
    rays = tuple((-s, -(B @ s)) for s in S.generators)
    return PerturbationProblem(X, Z, V, K, S, tuple(operators), rays, name)


@dataclass(frozen=True, eq=False)
class CCVPInstance:
    """Sampled data of a cone-constrained composite vector problem.

    ``H`` and ``G`` share the x-grid; ``F`` may be sampled on a larger grid
    that contains it.  ``C`` is a boolean mask (or predicate) over the x-grid.
    ``s_samples`` adds further sample points of ``-S``.
    """

    F: SampledMap
    kappa: SampledMap
    H: SampledMap
    G: SampledMap
    C: object
    K: PolyhedralCone
    P: PolyhedralCone
    S: PolyhedralCone
    s_samples: object = None
    _derived: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not np.allclose(self.H.samples, self.G.samples):
            raise ValueError("H and G must share the x-grid")
        X = self.H.samples
        C = self.C
        mask = np.array([bool(C(x)) for x in X]) if callable(C) else np.asarray(C, dtype=bool)
        if mask.shape != (len(X),):
            raise ValueError("C must give one flag per x sample")
        object.__setattr__(self, "C", mask)
        Fx, found = self.F.lookup(X)
        if not found.all():
            raise ValueError("F must be sampled at every x-grid point")
        if self.H.dim != self.kappa.domain_dim or self.G.dim != self.S.dim:
            raise ValueError("dimension mismatch between H/kappa or G/S")
        d = self._derived
        d["Fx"] = Fx
        d["kappa"] = _Table(self.kappa.dom(), self.kappa.values[self.kappa.finite])
        # sampled -S: origin, feasible constraint values, user samples
        Gx = self.G.values
        gfin = self.G.finite
        negS = lambda P: np.all(self.S.coords(-P) >= -TOL_STRICT, axis=1)
        pts = [np.zeros((1, self.S.dim)), Gx[gfin][negS(Gx[gfin])]]
        if self.s_samples is not None:
            extra = np.asarray(self.s_samples, dtype=float).reshape(-1, self.S.dim)
            pts.append(extra[negS(extra)])
        d["S_samp"] = _unique_rows(np.vstack(pts))
        d["S_table"] = _Table(d["S_samp"], np.zeros((len(d["S_samp"]), 1)))
        Hx = self.H.values
        kx = d["kappa"].rows(np.where(np.isfinite(Hx), Hx, 0.0))
        kx[~self.H.finite] = np.inf
        d["kHx"] = kx
        inA = mask & gfin & d["S_table"].member(np.where(np.isfinite(Gx), Gx, 0.0))
        d["A"] = inA
        ok = inA & np.isfinite(Fx[:, 0]) & np.isfinite(kx[:, 0])
        if not ok.any():
            raise ValueError("infeasible instance: A ∩ dom F ∩ H^-1(dom kappa) is empty")

    @property
    def x_samples(self):
        return self.H.samples

    @property
    def dim(self):
        return self.K.dim

    @property
    def S_samp(self):
        return self._derived["S_samp"]

    def objective(self):
        """``F + kappa∘H + I_A`` on the x-grid."""
        d = self._derived
        V = d["Fx"] + d["kHx"]
        V[~d["A"]] = np.inf
        return V

    def primal_front(self, L=None):
        L = _op(L, self.dim, self.x_samples.shape[1])
        V = self.objective()
        fin = np.isfinite(V[:, 0])
        return winf(V[fin] - L(self.x_samples[fin]), self.K)

    def w_grid(self):
        fin = self.H.finite
        return _diff_grid(self.kappa.dom(), self.H.values[fin])

    def z_grid(self):
        fin = self.G.finite
        return _diff_grid(self.S_samp, self.G.values[fin])


def _product(*grids):
    """Rows of the Cartesian product of several point grids (row-major)."""
    out = grids[0]
    for g in grids[1:]:
        out = np.hstack([np.repeat(out, len(g), axis=0), np.tile(g, (len(out), 1))])
    return out




def _check_cap(nx, nz, m):
    if nx * nz * m > max_table():
        raise ValueError(f"product grid of {nx * nz * m} entries exceeds the cap {max_table()}")


def _cone_rays(I, offset, total):
    """Recession rays ``(0, ..., -s)`` in the Z block of the perturbation space."""
    rays = []
    for s in I.S.generators:
        dz = np.zeros(total)
        dz[offset:offset + I.S.dim] = -s
        rays.append((dz, np.zeros(I.dim)))
    return tuple(rays)


def build_phi1(I, operators=()):
    """``Phi1(x, w, z) = F(x) + kappa(H(x) + w)`` if ``x in C`` and ``G(x) + z in -S``.

    The perturbation space is ``W x Z`` ordered by ``P x S``.
    """
    d = I._derived
    X = I.x_samples
    W, Z = I.w_grid(), I.z_grid()
    nx, m = len(X), I.dim
    _check_cap(nx, len(W) * len(Z), m)
    V = np.full((nx, len(W), len(Z), m), np.inf)
    ok = I.C & I.H.finite & I.G.finite & np.isfinite(d["Fx"][:, 0])
    for i in np.nonzero(ok)[0]:
        kv = d["kappa"].rows(I.H.values[i] + W)
        sv = d["S_table"].member(I.G.values[i] + Z)
        V[i] = d["Fx"][i] + kv[:, None, :]
        V[i][:, ~sv] = np.inf
    Zt = _product(W, Z)
    cone = PolyhedralCone.product(I.P, I.S)
    rays = _cone_rays(I, W.shape[1], Zt.shape[1])
    return PerturbationProblem(X, Zt, V.reshape(nx, -1, m), I.K, cone, tuple(operators), rays, "phi1")


def _F_table(I):
    return _Table(I.F.dom(), I.F.values[I.F.finite])


def build_phi2(I, operators=()):
    """``Phi2(x, v, w, z) = F(x + v) + kappa(H(x) + w)`` if ``x in C`` and ``G(x) + z in -S``."""
    d = I._derived
    X = I.x_samples
    Vg = _diff_grid(I.F.dom(), X)
    W, Z = I.w_grid(), I.z_grid()
    nx, m = len(X), I.dim
    _check_cap(nx, len(Vg) * len(W) * len(Z), m)
    Ft = _F_table(I)
    T = np.full((nx, len(Vg), len(W), len(Z), m), np.inf)
    ok = I.C & I.H.finite & I.G.finite
    for i in np.nonzero(ok)[0]:
        fv = Ft.rows(X[i] + Vg)
        kv = d["kappa"].rows(I.H.values[i] + W)
        sv = d["S_table"].member(I.G.values[i] + Z)
        T[i] = fv[:, None, None, :] + kv[None, :, None, :]
        T[i][:, :, ~sv] = np.inf
    Zt = _product(Vg, W, Z)
    cone = PolyhedralCone.product(PolyhedralCone.zero(X.shape[1]), I.P, I.S)
    rays = _cone_rays(I, Vg.shape[1] + W.shape[1], Zt.shape[1])
    return PerturbationProblem(X, Zt, T.reshape(nx, -1, m), I.K, cone, tuple(operators), rays, "phi2")


def build_phi3(I, operators=()):
    """``Phi3(x, x', x'', w, z) = F(x + x') + kappa(H(x) + w)`` if ``x + x'' in C`` and ``G(x) + z in -S``."""
    d = I._derived
    X = I.x_samples
    V1 = _diff_grid(I.F.dom(), X)
    Csamp = X[I.C]
    V2 = _diff_grid(Csamp, X)
    W, Z = I.w_grid(), I.z_grid()
    nx, m = len(X), I.dim
    _check_cap(nx, len(V1) * len(V2) * len(W) * len(Z), m)
    Ft = _F_table(I)
    Ct = _Table(Csamp, np.zeros((len(Csamp), 1)))
    T = np.full((nx, len(V1), len(V2), len(W), len(Z), m), np.inf)
    ok = I.H.finite & I.G.finite
    for i in np.nonzero(ok)[0]:
        fv = Ft.rows(X[i] + V1)
        cv = Ct.member(X[i] + V2)
        kv = d["kappa"].rows(I.H.values[i] + W)
        sv = d["S_table"].member(I.G.values[i] + Z)
        T[i] = fv[:, None, None, None, :] + kv[None, None, :, None, :]
        T[i][:, ~cv] = np.inf
        T[i][:, :, :, ~sv] = np.inf
    Zt = _product(V1, V2, W, Z)
    n = X.shape[1]
    cone = PolyhedralCone.product(PolyhedralCone.zero(n), PolyhedralCone.zero(n), I.P, I.S)
    rays = _cone_rays(I, 2 * n + W.shape[1], Zt.shape[1])
    return PerturbationProblem(X, Zt, T.reshape(nx, -1, m), I.K, cone, tuple(operators), rays, "phi3")


def build_phi4(I, operators=()):
    """``Phi4(x, x', x'', x''', w, z) = F(x + x') + kappa(H(x + x'') + w)``
    if ``x + x''' in C`` and ``G(x) + z in -S``."""
    d = I._derived
    X = I.x_samples
    V1 = _diff_grid(I.F.dom(), X)
    V2 = _diff_grid(X[I.H.finite], X)
    Csamp = X[I.C]
    V3 = _diff_grid(Csamp, X)
    W, Z = I.w_grid(), I.z_grid()
    nx, m = len(X), I.dim
    _check_cap(nx, len(V1) * len(V2) * len(V3) * len(W) * len(Z), m)
    Ft = _F_table(I)
    Ht = _Table(X[I.H.finite], I.H.values[I.H.finite])
    Ct = _Table(Csamp, np.zeros((len(Csamp), 1)))
    T = np.full((nx, len(V1), len(V2), len(V3), len(W), len(Z), m), np.inf)
    ok = I.G.finite
    for i in np.nonzero(ok)[0]:
        fv = Ft.rows(X[i] + V1)
        cv = Ct.member(X[i] + V3)
        sv = d["S_table"].member(I.G.values[i] + Z)
        hv = Ht.rows(X[i] + V2)
        for a in range(len(V2)):
            if not np.isfinite(hv[a, 0]):
                continue
            kv = d["kappa"].rows(hv[a] + W)
            T[i, :, a] = fv[:, None, None, None, :] + kv[None, None, :, None, :]
        T[i][:, :, ~cv] = np.inf
        T[i][..., ~sv, :] = np.inf
    Zt = _product(V1, V2, V3, W, Z)
    n = X.shape[1]
    zero = PolyhedralCone.zero(n)
    cone = PolyhedralCone.product(zero, zero, zero, I.P, I.S)
    rays = _cone_rays(I, 3 * n + W.shape[1], Zt.shape[1])
    return PerturbationProblem(X, Zt, T.reshape(nx, -1, m), I.K, cone, tuple(operators), rays, "phi4")


# ---------------------------------------------------------------------------
# Conjugate decompositions


def _wsup_of(values, cone):
    fin = np.isfinite(values[:, 0])
    if not fin.any():
        return FrontSet.minus_infinity(cone)
    return wsup(values[fin], cone)


def _kappa_conj(I, T1):
    d = I._derived
    U = I.kappa.dom()
    return wsup(T1(U) - I.kappa.values[I.kappa.finite], I.K)


def _negS_conj(I, T2):
    return wsup(T2(I.S_samp), I.K)


def _composite_conj(I, L, T1, T2, use_F=True, use_C=True):
    """``(F + T1∘H + T2∘G + I_C)*(L)`` with the optional terms toggled."""
    d = I._derived
    X = I.x_samples
    ok = I.H.finite & I.G.finite
    if use_C:
        ok = ok & I.C
    if use_F:
        ok = ok & np.isfinite(d["Fx"][:, 0])
    vals = L(X[ok]) - T1(I.H.values[ok]) - T2(I.G.values[ok])
    if use_F:
        vals = vals - d["Fx"][ok]
    return wsup(vals, I.K)


def _F_conj(I, Lp):
    return wsup(Lp(I.F.dom()) - I.F.values[I.F.finite], I.K)


def _C_conj(I, Lpp):
    return wsup(Lpp(I.x_samples[I.C]), I.K)


def _sum(*fronts):
    out = fronts[0]
    for f in fronts[1:]:
        out = ws_sum(out, f)
    return out


def phi1_conjugate_rhs(I, L, T1, T2, drop_indicator=False):
    """Right-hand side ``(F + T1∘H + T2∘G + I_C)*(L) ⊎ kappa*(T1) ⊎ I*_{-S}(T2)``."""
    m, n = I.dim, I.x_samples.shape[1]
    L = _op(L, m, n)
    T1 = _op(T1, m, I.H.dim)
    T2 = _op(T2, m, I.G.dim)
    terms = [_composite_conj(I, L, T1, T2), _kappa_conj(I, T1)]
    if not drop_indicator:
        terms.append(_negS_conj(I, T2))
    return _sum(*terms)


def phi1_conjugate_identity(I, L, T1, T2, drop_indicator=None, phi=None):
    """Check the conjugate decomposition of ``Phi1`` at ``(L, (T1, T2))``.

    With ``drop_indicator=None`` the indicator term is dropped exactly when
    ``T2`` is positive.  Returns ``True`` when the direct product-grid
    conjugate equals the decomposed front.
    """
    from vecdual.perturbation.core import perturbation_conjugate
    from vecdual.weak_sets import fronts_equal

    m = I.dim
    T1 = _op(T1, m, I.H.dim)
    T2 = _op(T2, m, I.G.dim)
    if drop_indicator is None:
        drop_indicator = is_positive_operator(T2, I.S, I.K)
    phi = build_phi1(I) if phi is None else phi
    lhs = perturbation_conjugate(phi, L, T1.hstack(T2))
    rhs = phi1_conjugate_rhs(I, L, T1, T2, drop_indicator)
    return fronts_equal(lhs, rhs)


def ccvd_objective(I, variant, ops, L=None, loose=False):
    """The ``⊎``-objective ``Phi_i*(L, T)`` of a dual variant, assembled from parts.

    ``ops`` is a dict with keys among ``Lp``, ``Lpp``, ``Lppp``, ``T1``, ``T2``.
    The indicator term ``I*_{-S}(T2)`` is omitted for the loose variants.
    """
    m, n = I.dim, I.x_samples.shape[1]
    L = _op(L, m, n)
    T1 = _op(ops.get("T1"), m, I.H.dim)
    T2 = _op(ops.get("T2"), m, I.G.dim)
    tail = [_kappa_conj(I, T1)]
    if not loose:
        tail.append(_negS_conj(I, T2))
    if variant == 1:
        head = [_composite_conj(I, L, T1, T2)]
    elif variant == 2:
        Lp = _op(ops.get("Lp"), m, n)
        head = [_F_conj(I, Lp), _composite_conj(I, L - Lp, T1, T2, use_F=False)]
    elif variant == 3:
        Lp = _op(ops.get("Lp"), m, n)
        Lpp = _op(ops.get("Lpp"), m, n)
        head = [_F_conj(I, Lp), _composite_conj(I, L - Lp - Lpp, T1, T2, use_F=False, use_C=False),
                _C_conj(I, Lpp)]
    elif variant == 4:
        Lp = _op(ops.get("Lp"), m, n)
        Lpp = _op(ops.get("Lpp"), m, n)
        Lppp = _op(ops.get("Lppp"), m, n)
        X = I.x_samples
        hf = I.H.finite
        gf = I.G.finite
        head = [_F_conj(I, Lp),
                wsup(Lpp(X[hf]) - T1(I.H.values[hf]), I.K),
                wsup((L - Lp - Lpp - Lppp)(X[gf]) - T2(I.G.values[gf]), I.K),
                _C_conj(I, Lppp)]
    else:
        raise ValueError("variant must be 1, 2, 3 or 4")
    return _sum(*(head + tail))


_VARIANT_KEYS = {1: ("T1", "T2"), 2: ("Lp", "T1", "T2"), 3: ("Lp", "Lpp", "T1", "T2"),
                 4: ("Lp", "Lpp", "Lppp", "T1", "T2")}


def _grid_tuples(variant, operator_grids, I):
    keys = _VARIANT_KEYS[variant]
    m, n = I.dim, I.x_samples.shape[1]
    shapes = {"Lp": (m, n), "Lpp": (m, n), "Lppp": (m, n), "T1": (m, I.H.dim), "T2": (m, I.G.dim)}
    lists = []
    for k in keys:
        g = operator_grids.get(k)
        if g is None:
            g = [LinOp.zero(*shapes[k])]
        g = [t if isinstance(t, LinOp) else LinOp(t) for t in g]
        if not g:
            raise ValueError(f"empty operator grid for {k}")
        lists.append(g)
    return [dict(zip(keys, combo)) for combo in itertools.product(*lists)]


def build_ccvd(I, variant, loose=False, operator_grids=None, L=None, window=None, resolution=201):
    """Dual problem of a variant over finite operator grids, with its primal.

    Non-loose duals range over ``T2`` weakly positive (``T2(S) ∩ -int K``
    empty); loose duals over ``T1(P) ⊆ K`` and ``T2(S) ⊆ K`` and drop the
    indicator term.  Both are reported; ``loose`` selects which one the gap
    refers to.  Weak duality is asserted for every operator tuple.
    """
    operator_grids = operator_grids or {}
    tuples = _grid_tuples(variant, operator_grids, I)
    primal = I.primal_front(L)
    dual_fronts, loose_fronts = [], []
    n_adm = n_pos = 0
    for ops in tuples:
        T1 = ops.get("T1")
        T2 = ops.get("T2")
        T2m = _op(T2, I.dim, I.G.dim)
        T1m = _op(T1, I.dim, I.H.dim)
        if is_weakly_positive(T2m, I.S, I.K):
            n_adm += 1
            dual_fronts.append(-ccvd_objective(I, variant, ops, L, loose=False))
        if is_positive_operator(T2m, I.S, I.K) and is_positive_operator(T1m, I.P, I.K):
            n_pos += 1
            loose_fronts.append(-ccvd_objective(I, variant, ops, L, loose=True))
    dual = sup_of_infs(dual_fronts, I.K) if dual_fronts else FrontSet.minus_infinity(I.K)
    loose_front = sup_of_infs(loose_fronts, I.K) if loose_fronts else FrontSet.minus_infinity(I.K)
    weak = (all(precedes(f, primal) for f in dual_fronts + loose_fronts)
            and precedes(loose_front, dual) and precedes(dual, primal))
    if window is None:
        window = _default_window(primal)
    gap = front_gap(primal, loose_front if loose else dual, window, resolution)
    notes = [f"variant {variant}", "loose" if loose else "standard"]
    return DualReport(primal, dual, loose_front, bool(weak), gap, [], "", len(tuples), n_adm, n_pos,
                      np.asarray(window), notes)
