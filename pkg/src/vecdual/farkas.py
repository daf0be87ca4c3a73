"""Vector Farkas lemmas and constructive dual certificates on sampled grids.

For a perturbation mapping ``Phi``, an operator ``L`` and a point ``y``:

* (alpha)  ``Phi(x, 0) - L x + y`` avoids ``-int K`` for every ``x``;
* (beta)   some admissible ``T`` has ``Phi(x, z) - L x - T z + y`` avoiding
  ``-int K`` for every ``(x, z)``;
* (gamma)  as (beta) with ``T`` positive, ``T(S) ⊆ K``.

(beta) always implies (alpha) (take ``z = 0``); the converse is the content of
the Farkas lemmas and needs convexity plus regularity.  Besides searching a
finite operator grid, :func:`construct_certificate` builds ``T`` directly: it
separates ``(y, 0)`` from the convex hull of the sampled set
``Delta = {(L x - Phi(x, z) - k, z) : k in K}`` with a linear program and sets
``T(z) = -<z*, z> k0``.
"""

from dataclasses import dataclass, field

import numpy as np

from vecdual import kernels
from vecdual.cone_order import TOL_STRICT
from vecdual.linop import LinOp
from vecdual.lp import LPStatus, lp_solve
from vecdual.mappings import epi_membership, is_positive_operator
from vecdual.perturbation.core import _op, is_admissible

__all__ = [
    "FarkasInstance",
    "Certificate",
    "CertificateError",
    "RepresentationReport",
    "FarkasReport",
    "verify_alpha",
    "alpha_on_segments",
    "beta_holds",
    "search_certificate",
    "construct_certificate",
    "convexity_check",
    "verify_M_representation",
    "check_farkas_equivalence",
]


class CertificateError(RuntimeError):
    """The sampled set cannot be separated from the probe point."""


@dataclass(frozen=True)
class FarkasInstance:
    """A perturbation problem with an operator ``L`` and a point ``y``."""

    problem: object
    L: object
    y: object

    def __post_init__(self):
        P = self.problem
        object.__setattr__(self, "L", _op(self.L, P.dim, P.x_dim))
        y = np.asarray(self.y, dtype=float).ravel()
        if y.shape != (P.dim,):
            raise ValueError(f"y must have {P.dim} coordinates")
        object.__setattr__(self, "y", y)


@dataclass
class Certificate:
    """``T_bar(z) = -<z_star, z> k0`` with ``<y_star, k0> = -1``."""

    T_bar: LinOp
    z_star: np.ndarray
    y_star: np.ndarray
    k0: np.ndarray
    verified: bool
    positive: bool
    margin: float
    convexity_ok: bool = True
    note: str = ""

    def to_dict(self):
        return {"T_bar": self.T_bar.tolist(), "z_star": self.z_star.tolist(),
                "y_star": self.y_star.tolist(), "k0": self.k0.tolist(),
                "verified": bool(self.verified), "positive": bool(self.positive),
                "margin": float(self.margin), "convexity_ok": bool(self.convexity_ok),
                "note": self.note}


def verify_alpha(inst):
    """Statement (alpha) on the x-grid."""
    return epi_membership(inst.problem.zero_slice(), inst.L, inst.y)


def _segment_meets(p, q, y, K):
    """Whether some point of the segment ``[p, q]`` lies in ``y + int K``."""
    a = K.coords(p - y)
    b = K.coords(q - y)
    lo, hi = 0.0, 1.0
    # coordinate j along the segment: a_j + t (b_j - a_j) > tol
    for aj, bj in zip(a, b):
        d = bj - aj
        if abs(d) <= 1e-15:
            if aj <= TOL_STRICT:
                return False
            continue
        t = (TOL_STRICT - aj) / d
        if d > 0:
            lo = max(lo, t)
        else:
            hi = min(hi, t)
        if lo >= hi:
            return False
    return lo < hi


def alpha_on_segments(inst):
    """Statement (alpha) for the piecewise-linear interpolant of ``Phi(., 0)``.

    For a one-dimensional x-grid, the values ``L x - Phi(x, 0)`` at
    consecutive finite samples are joined by segments; the statement fails if
    any segment point lies in ``y + int K``.  This is exact for mappings that
    are affine between grid points.
    """
    P = inst.problem
    if P.x_dim != 1:
        raise ValueError("segment interpolation needs a one-dimensional x-grid")
    order = np.argsort(P.x_samples[:, 0], kind="stable")
    vals = P.values[order, P.zero_index]
    X = P.x_samples[order]
    fin = np.isfinite(vals[:, 0])
    pts = inst.L(X) - np.where(fin[:, None], vals, 0.0)
    K = P.K
    if not verify_alpha(inst):
        return False
    for i in range(len(X) - 1):
        if fin[i] and fin[i + 1] and _segment_meets(pts[i], pts[i + 1], inst.y, K):
            return False
    return True


def _cell_points(P, L):
    fin = P.finite
    LX = L(P.x_samples)
    rows, cols = np.nonzero(fin)
    return LX[rows] - P.values[rows, cols], P.z_samples[cols]


def beta_holds(P, L, T, y):
    """Statement (beta) for a fixed operator: ``(L, y) in epi Phi*(., T)`` on the grid."""
    L = _op(L, P.dim, P.x_dim)
    T = _op(T, P.dim, P.z_dim)
    A, Z = _cell_points(P, L)
    U = P.K.coords(A + T(Z) - np.asarray(y, dtype=float))
    return not bool(np.any(np.all(U > TOL_STRICT, axis=1)))


def _ordered(ops):
    return sorted(ops, key=lambda T: tuple(np.ravel(T.matrix)))


def search_certificate(inst, T_grid=None, positive=False):
    """First operator of the grid (lexicographic order) satisfying (beta).

    Operators must be admissible; with ``positive=True`` they must also map
    ``S`` into ``K`` (statement (gamma)).  Returns ``None`` when the grid has
    no certificate.
    """
    P = inst.problem
    grid = P.operator_grid if T_grid is None else [T if isinstance(T, LinOp) else LinOp(T) for T in T_grid]
    for T in _ordered(grid):
        if not is_admissible(P, T):
            continue
        if positive and not is_positive_operator(T, P.S, P.K):
            continue
        if beta_holds(P, inst.L, T, inst.y):
            return T
    return None


def _delta_generators(P, L):
    """Points of the sampled set ``Delta`` that are not dominated within their z-column."""
    A, Z = _cell_points(P, L)
    if P.dim == 2 and P.K.normals.shape[0] == 2:
        fin = P.finite
        rows, cols = np.nonzero(fin)
        U = P.K.coords(A)
        keep = []
        for j in np.unique(cols):
            idx = np.nonzero(cols == j)[0]
            keep.append(idx[kernels.maximal_2d_index(U[idx])])
        sel = np.sort(np.concatenate(keep))
        A, Z = A[sel], Z[sel]
    return A, Z


def convexity_check(P, n_triples=200, seed=0):
    """Midpoint test of K-convexity: ``Phi(mid) ≦_K (Phi(p) + Phi(q)) / 2``.

    Pairs of finite cells are drawn at random; only pairs whose midpoint is a
    grid cell are tested.  Returns ``(n_tested, n_violations)``.
    """
    rng = np.random.default_rng(seed)
    fin = P.finite
    rows, cols = np.nonzero(fin)
    if len(rows) < 2:
        return 0, 0
    xkey = {k.tobytes(): i for i, k in enumerate(np.round(P.x_samples * 1e9).astype(np.int64))}
    zkey = {k.tobytes(): j for j, k in enumerate(np.round(P.z_samples * 1e9).astype(np.int64))}
    tested = bad = 0
    for _ in range(n_triples):
        a, b = rng.integers(len(rows), size=2)
        (i1, j1), (i2, j2) = (rows[a], cols[a]), (rows[b], cols[b])
        xm = np.round((P.x_samples[i1] + P.x_samples[i2]) / 2 * 1e9).astype(np.int64).tobytes()
        zm = np.round((P.z_samples[j1] + P.z_samples[j2]) / 2 * 1e9).astype(np.int64).tobytes()
        if xm not in xkey or zm not in zkey:
            continue
        tested += 1
        vm = P.values[xkey[xm], zkey[zm]]
        avg = 0.5 * (P.values[i1, j1] + P.values[i2, j2])
        if not np.isfinite(vm[0]) or np.any(P.K.coords(avg - vm) < -1e-9):
            bad += 1
    return tested, bad


def construct_certificate(inst, k_bar=None, check_convexity=True, seed=0):
    """Build an operator certifying (beta) by separating ``(y, 0)`` from ``conv Delta``.

    The linear program maximizes ``tau`` subject to

        sum_i lam_i (a_i - y) - sum_j eta_j g_j - sum_r rho_r dy_r = tau k_bar,
        sum_i lam_i z_i + sum_r rho_r dz_r = 0,      sum_i lam_i = 1,

    with ``lam, eta, rho >= 0`` and ``tau <= 1``, where ``(a_i, z_i)`` are the
    sampled points of ``Delta``, ``g_j`` the generators of ``K`` and
    ``(dz_r, dy_r)`` the declared recession rays.  When the optimum is
    ``tau <= 0`` its equality multipliers give ``(y*, z*)`` with
    ``y*(k_bar) = -1``, ``y* <= 0`` on ``K`` and
    ``y*(a) + z*(z) >= y*(y)`` on ``Delta``; then ``T(z) = -z*(z) k_bar``
    satisfies (beta).  The flag ``verified`` records the direct grid check.
    """
    P = inst.problem
    if not verify_alpha(inst):
        raise ValueError("statement (alpha) fails; no certificate exists")
    K = P.K
    m, k = P.dim, P.z_dim
    kb = K.interior_point() if k_bar is None else np.asarray(k_bar, dtype=float)
    if not np.all(K.coords(kb) > TOL_STRICT):
        raise ValueError("k_bar must lie in int K")
    A, Z = _delta_generators(P, inst.L)
    Gk = K.generators
    rays = P.recession
    n, ng, nr = len(A), len(Gk), len(rays)
    cols = n + ng + nr + 1
    M = np.zeros((m + k + 1, cols))
    M[:m, :n] = (A - inst.y).T
    M[m:m + k, :n] = Z.T
    M[m + k, :n] = 1.0
    M[:m, n:n + ng] = -Gk.T
    for r, (dz, dy) in enumerate(rays):
        M[:m, n + ng + r] = -dy
        M[m:m + k, n + ng + r] = dz
    M[:m, -1] = -kb
    b = np.zeros(m + k + 1)
    b[-1] = 1.0
    c = np.zeros(cols)
    c[-1] = -1.0
    bounds = [(0, None)] * (cols - 1) + [(None, 1.0)]
    res = lp_solve(c, A_eq=M, b_eq=b, bounds=bounds)
    if res.status is not LPStatus.OPTIMAL:
        raise CertificateError(f"separation LP failed: {res.status.value}")
    tau = -res.value
    if tau > 1e-9:
        raise CertificateError("sampled Delta not separable: the instance violates "
                               "convexity/regularity at this resolution")
    pi = np.where(np.abs(res.duals_eq) <= 1e-12, 0.0, res.duals_eq)
    y_star = -pi[:m] + 0.0
    z_star = -pi[m:m + k] + 0.0
    T_bar = LinOp(-np.outer(kb, z_star) + 0.0)
    verified = beta_holds(P, inst.L, T_bar, inst.y) and is_admissible(P, T_bar)
    positive = is_positive_operator(T_bar, P.S, K)
    convex_ok, note = True, ""
    if check_convexity:
        tested, bad = convexity_check(P, seed=seed)
        convex_ok = bad == 0
        if not convex_ok:
            note = f"heuristic: {bad} of {tested} midpoint tests violate K-convexity"
    return Certificate(T_bar, z_star, y_star, kb, bool(verified), bool(positive), float(-tau),
                       convex_ok, note)


@dataclass
class RepresentationReport:
    """Probe comparison of ``epi Phi(., 0)*`` with ``M`` (or ``M_plus``)."""

    mode: str
    n_probes: int = 0
    n_epi: int = 0
    covered_by_grid: int = 0
    covered_by_certificate: int = 0
    superset_violations: int = 0
    uncovered: int = 0
    sampling_artifacts: int = 0
    counterexamples: list = field(default_factory=list)

    @property
    def holds_on_probes(self):
        return self.superset_violations == 0 and self.uncovered == 0

    def to_dict(self):
        return {"mode": self.mode, "n_probes": self.n_probes, "n_epi": self.n_epi,
                "covered_by_grid": self.covered_by_grid,
                "covered_by_certificate": self.covered_by_certificate,
                "superset_violations": self.superset_violations, "uncovered": self.uncovered,
                "sampling_artifacts": self.sampling_artifacts,
                "holds_on_probes": self.holds_on_probes,
                "counterexamples": self.counterexamples}


def _alpha(inst, alpha):
    if alpha == "samples":
        return verify_alpha(inst)
    if alpha == "segments":
        return alpha_on_segments(inst)
    raise ValueError("alpha must be 'samples' or 'segments'")


def _certificate_for(inst, positive):
    try:
        cert = construct_certificate(inst, check_convexity=False)
    except CertificateError:
        return None
    if cert.verified and (cert.positive or not positive):
        return cert
    return None


def verify_M_representation(P, L_grid, y_probe_grid, mode="M", T_grid=None, use_certificates=True,
                            alpha="samples"):
    """Compare ``epi Phi(., 0)*`` with ``M = ∪_T epi Phi*(., T)`` on probes.

    For each ``(L, y)`` the epigraph side is statement (alpha); the ``M``
    side asks for a grid operator satisfying (beta) -- positive ones for
    ``mode="M_plus"`` -- and falls back on :func:`construct_certificate`.
    Membership in ``M`` without (alpha) is a superset violation (it cannot
    happen); (alpha) without any certificate is reported as uncovered.
    With ``alpha="segments"`` the epigraph side uses the piecewise-linear
    interpolant; probes where only the sampled statement holds are counted
    as sampling artifacts and excluded.
    """
    positive = mode == "M_plus"
    if mode not in ("M", "M_plus"):
        raise ValueError("mode must be 'M' or 'M_plus'")
    rep = RepresentationReport(mode)
    for L in L_grid:
        for y in y_probe_grid:
            inst = FarkasInstance(P, L, y)
            rep.n_probes += 1
            a = _alpha(inst, alpha)
            sampled = verify_alpha(inst)
            T = search_certificate(inst, T_grid, positive=positive)
            if T is not None and not sampled:
                rep.superset_violations += 1
                rep.counterexamples.append({"L": inst.L.tolist(), "y": inst.y.tolist(),
                                            "reason": "beta without alpha"})
                continue
            if not a:
                if sampled:
                    rep.sampling_artifacts += 1
                continue
            rep.n_epi += 1
            if T is not None:
                rep.covered_by_grid += 1
                continue
            if use_certificates and _certificate_for(inst, positive) is not None:
                rep.covered_by_certificate += 1
                continue
            rep.uncovered += 1
            rep.counterexamples.append({"L": inst.L.tolist(), "y": inst.y.tolist(),
                                        "reason": "alpha without certificate"})
    return rep


@dataclass
class FarkasReport:
    """Tabulated (alpha) versus (beta)/(gamma) verdicts."""

    mode: str
    verdicts: list = field(default_factory=list)
    soundness_violations: int = 0
    gamma_without_beta: int = 0

    @property
    def n_probes(self):
        return len(self.verdicts)

    @property
    def agreement(self):
        return sum(1 for v in self.verdicts if v["alpha"] == v["certified"])

    @property
    def rate(self):
        return self.agreement / self.n_probes if self.verdicts else 1.0

    def to_dict(self):
        return {"mode": self.mode, "n_probes": self.n_probes, "agreement": self.agreement,
                "rate": self.rate, "soundness_violations": self.soundness_violations,
                "gamma_without_beta": self.gamma_without_beta, "verdicts": self.verdicts}


def check_farkas_equivalence(P, L_grid, y_grid, mode="M", T_grid=None, use_certificates=True,
                             alpha="samples"):
    """Tabulate (alpha) against (beta) (``mode="M"``) or (gamma) (``mode="M_plus"``).

    A probe agrees when (alpha) holds exactly when a certificate exists (grid
    search first, then the constructive builder).  Soundness violations --
    a grid certificate without (alpha) -- and (gamma) holding without (beta)
    are counted separately; both must be zero on every instance.
    """
    if mode not in ("M", "M_plus"):
        raise ValueError("mode must be 'M' or 'M_plus'")
    positive = mode == "M_plus"
    rep = FarkasReport(mode)
    for L in L_grid:
        for y in y_grid:
            inst = FarkasInstance(P, L, y)
            a = _alpha(inst, alpha)
            sampled = verify_alpha(inst)
            Tb = search_certificate(inst, T_grid, positive=False)
            Tg = search_certificate(inst, T_grid, positive=True)
            if (Tb is not None or Tg is not None) and not sampled:
                rep.soundness_violations += 1
            if Tg is not None and Tb is None:
                rep.gamma_without_beta += 1
            found = Tg if positive else Tb
            source = "grid" if found is not None else None
            if found is None and use_certificates and a:
                cert = _certificate_for(inst, positive)
                if cert is not None:
                    source = "certificate"
            rep.verdicts.append({"L": inst.L.tolist(), "y": inst.y.tolist(), "alpha": bool(a),
                                 "certified": source is not None, "source": source})
    return rep
