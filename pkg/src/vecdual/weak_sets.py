"""Weak suprema and infima of finite sets, and the algebra built on them.

For a finite set ``M`` and a proper cone ``K`` the weak supremum is the
"front" ``WSup M = (M - K) \\ (M - int K)``; the weak infimum mirrors it as
``WInf M = (M + K) \\ (M + int K)``.  A :class:`FrontSet` stores such a front
implicitly by a canonical finite generator set, which makes membership,
the three-way classification of space, and the set order exact.

All comparisons are carried out in normal coordinates ``u = N y`` (rows of
``N`` are the unit normals of ``K``), where ``y' - y`` lies in ``int K``
exactly when every coordinate of ``u' - u`` exceeds the strict tolerance.
"""

from dataclasses import dataclass
from enum import Enum

import numpy as np

from vecdual import kernels
from vecdual.cone_order import TOL_STRICT, ConeError, PolyhedralCone
from vecdual.linop import LinOp

__all__ = [
    "FrontKind",
    "Label",
    "FrontSet",
    "ClosedLowerSet",
    "ExtEpiElement",
    "wsup",
    "winf",
    "wmin",
    "wmax",
    "front_contains",
    "classify",
    "classify_points",
    "crossing_offsets",
    "precedes",
    "ws_sum",
    "boxplus",
    "psi",
    "is_partition_style",
    "probe_grid",
    "fronts_equal",
    "front_sample_points",
    "hausdorff",
    "sup_of_infs",
]


class FrontKind(str, Enum):
    SUP = "sup"
    INF = "inf"
    PLUS_INF = "+inf"
    MINUS_INF = "-inf"


class Label(int, Enum):
    BELOW = 0
    ON = 1
    ABOVE = 2


def _as_points(M, dim=None):
    P = np.asarray(M, dtype=float)
    if P.ndim == 1:
        P = P.reshape(1, -1) if dim is None or P.size == dim else P.reshape(-1, 1)
    if P.ndim != 2:
        raise ValueError("expected a list of points")
    if dim is not None and P.shape[1] != dim:
        raise ConeError(f"dimension mismatch: expected {dim}, got {P.shape[1]}")
    return P


def unique_rows(P):
    """Lexicographically sorted distinct rows (a faster ``np.unique(P, axis=0)``)."""
    P = np.asarray(P, dtype=float)
    if len(P) <= 1:
        return P.copy()
    P = P[np.lexsort(P.T[::-1])]
    keep = np.ones(len(P), dtype=bool)
    keep[1:] = np.any(P[1:] != P[:-1], axis=1)
    return P[keep]


def _canonical(P, cone, kind):
    """Drop duplicates and strictly dominated generators; sort lexicographically."""
    P = unique_rows(P)
    U = cone.coords(P)
    keep = kernels.nondominated_mask(U if kind is FrontKind.SUP else -U, TOL_STRICT)
    return P[keep]


@dataclass(frozen=True, eq=False)
class FrontSet:
    """A weak supremum/infimum front of a finite set, or one of the two infinities."""

    kind: FrontKind
    generators: np.ndarray
    cone: PolyhedralCone

    def __post_init__(self):
        self.generators.setflags(write=False)

    @classmethod
    def plus_infinity(cls, cone):
        return cls(FrontKind.PLUS_INF, np.zeros((0, cone.dim)), cone)

    @classmethod
    def minus_infinity(cls, cone):
        return cls(FrontKind.MINUS_INF, np.zeros((0, cone.dim)), cone)

    @property
    def dim(self):
        return self.cone.dim

    @property
    def is_finite(self):
        return self.kind in (FrontKind.SUP, FrontKind.INF)

    def coords(self):
        return self.cone.coords(self.generators)

    def __neg__(self):
        flip = {FrontKind.SUP: FrontKind.INF, FrontKind.INF: FrontKind.SUP,
                FrontKind.PLUS_INF: FrontKind.MINUS_INF, FrontKind.MINUS_INF: FrontKind.PLUS_INF}
        # reversing a lexicographically sorted, duplicate-free array keeps it so
        G = np.ascontiguousarray(-self.generators[::-1])
        return FrontSet(flip[self.kind], G, self.cone)

    def translate(self, y):
        if not self.is_finite:
            return self
        return FrontSet(self.kind, self.generators + np.asarray(y, dtype=float), self.cone)

    def to_dict(self):
        return {"kind": self.kind.value, "generators": self.generators.tolist()}

    @classmethod
    def from_dict(cls, d, cone):
        kind = FrontKind(d["kind"])
        if kind in (FrontKind.PLUS_INF, FrontKind.MINUS_INF):
            return cls(kind, np.zeros((0, cone.dim)), cone)
        P = _as_points(d["generators"], cone.dim)
        return wsup(P, cone) if kind is FrontKind.SUP else winf(P, cone)

    def below(self, Y):
        """Membership in ``U - int K`` (independent of :meth:`on`)."""
        return classify_points(self, Y) == Label.BELOW

    def on(self, Y):
        """Exact membership of each probe (blocked version of :func:`front_contains`)."""
        Y = _as_points(Y, self.dim)
        if not self.is_finite:
            return np.zeros(len(Y), dtype=bool)
        G = self.coords()
        U = self.cone.coords(Y)
        sign = 1.0 if self.kind is FrontKind.SUP else -1.0
        out = np.empty(len(Y), dtype=bool)
        block = max(1, (1 << 21) // max(G.size, 1))
        for s in range(0, len(Y), block):
            D = sign * (G[None, :, :] - U[s:s + block, None, :])
            closed = np.all(D >= -TOL_STRICT, axis=2).any(axis=1)
            strict = np.all(D > TOL_STRICT, axis=2).any(axis=1)
            out[s:s + block] = closed & ~strict
        return out

    def above(self, Y):
        """Membership in ``U + int K`` via the exact crossing along an interior ray."""
        t = crossing_offsets(self, Y)
        return t < -TOL_STRICT

    def __repr__(self):
        return f"FrontSet({self.kind.value}, {len(self.generators)} generators)"


def wsup(M, cone):
    """Weak supremum of a nonempty finite set as a canonical :class:`FrontSet`."""
    P = _as_points(M, cone.dim)
    if len(P) == 0:
        raise ValueError("wsup of an empty set")
    if not np.all(np.isfinite(P)):
        raise ValueError("wsup expects finite points")
    return FrontSet(FrontKind.SUP, _canonical(P, cone, FrontKind.SUP), cone)


def winf(M, cone):
    """Weak infimum, ``WInf M = -WSup(-M)``."""
    P = _as_points(M, cone.dim)
    if len(P) == 0:
        raise ValueError("winf of an empty set")
    if not np.all(np.isfinite(P)):
        raise ValueError("winf expects finite points")
    return FrontSet(FrontKind.INF, _canonical(P, cone, FrontKind.INF), cone)


def _members_on_front(M, cone, kind):
    P = _as_points(M, cone.dim)
    if len(P) == 0:
        raise ValueError("empty input")
    P = unique_rows(P)
    U = cone.coords(P)
    keep = kernels.nondominated_mask(U if kind is FrontKind.SUP else -U, TOL_STRICT)
    return P[keep]


def wmin(M, cone):
    """Members of ``M`` lying on ``WInf M`` (the weakly minimal points)."""
    return _members_on_front(M, cone, FrontKind.INF)


def wmax(M, cone):
    """Members of ``M`` lying on ``WSup M`` (the weakly maximal points)."""
    return _members_on_front(M, cone, FrontKind.SUP)


def _flags(front, Y):
    """(strict, closed) domination flags of probe points against the generators."""
    U = front.cone.coords(Y)
    G = front.coords()
    if front.kind is FrontKind.SUP:
        return kernels.dominance_flags(U, G, TOL_STRICT)
    return kernels.dominance_flags(-U, -G, TOL_STRICT)


def classify_points(front, Y):
    """Vector of :class:`Label` values for a stack of probe points."""
    if not front.is_finite:
        raise ValueError("classify is defined for finite fronts only")
    Y = _as_points(Y, front.dim)
    strict, closed = _flags(front, Y)
    out = np.empty(len(Y), dtype=np.int8)
    if front.kind is FrontKind.SUP:
        out[strict] = Label.BELOW
        out[~strict & closed] = Label.ON
        out[~closed] = Label.ABOVE
    else:
        out[strict] = Label.ABOVE
        out[~strict & closed] = Label.ON
        out[~closed] = Label.BELOW
    return out


def classify(front, y):
    """Position of ``y`` relative to ``front``: Below, On or Above."""
    return Label(int(classify_points(front, _as_points(y, front.dim))[0]))


def front_contains(front, y):
    """Exact membership ``y in front``."""
    y = np.asarray(y, dtype=float)
    if y.shape[-1] != front.dim:
        raise ConeError(f"dimension mismatch: expected {front.dim}, got {y.shape[-1]}")
    if not front.is_finite:
        return False
    u = front.cone.coords(y)
    D = front.coords() - u  # generator minus point
    if front.kind is FrontKind.INF:
        D = -D
    exists_closed = bool(np.any(np.all(D >= -TOL_STRICT, axis=1)))
    none_strict = not bool(np.any(np.all(D > TOL_STRICT, axis=1)))
    return exists_closed and none_strict


def crossing_offsets(front, Y, direction=None):
    """Offsets ``t`` with ``y + t k`` on the front, for an interior direction ``k``.

    A front of partition style meets each line parallel to an interior
    direction exactly once; the offset is available in closed form from the
    generators.  Negative offsets mean the probe lies above the front.
    """
    if not front.is_finite:
        raise ValueError("crossing offsets need a finite front")
    Y = _as_points(Y, front.dim)
    k = front.cone.interior_point() if direction is None else np.asarray(direction, dtype=float)
    c = front.cone.coords(k)
    if np.any(c <= 0):
        raise ConeError("direction must be interior")
    U = front.cone.coords(Y)
    G = front.coords()
    if G.shape[1] == 2:
        if front.kind is FrontKind.SUP:
            return _sup_crossing_2d(kernels.maximal_2d(G)[::-1], U, c)
        return -_sup_crossing_2d(kernels.maximal_2d(-G)[::-1], -U, c)
    out = np.empty(len(Y))
    block = max(1, (1 << 21) // max(len(G) * len(c), 1))
    for s in range(0, len(Y), block):
        R = (G[None, :, :] - U[s:s + block, None, :]) / c  # (probes, gens, normals)
        if front.kind is FrontKind.SUP:
            out[s:s + block] = R.min(axis=2).max(axis=1)
        else:
            out[s:s + block] = R.max(axis=2).min(axis=1)
    return out


def _sup_crossing_2d(C, U, c):
    """``max_g min_i (C_g - u)_i / c_i`` for a strict staircase ``C`` (first coordinate ascending).

    Along the staircase the first ratio increases and the second decreases,
    so the optimum sits where they cross, found by binary search.
    """
    s = C[:, 0] / c[0] - C[:, 1] / c[1]
    key = U[:, 0] / c[0] - U[:, 1] / c[1]
    idx = np.searchsorted(s, key, side="left")
    n = len(C)
    t = np.full(len(U), -np.inf)
    right = idx < n
    t[right] = (C[idx[right], 1] - U[right, 1]) / c[1]
    left = idx > 0
    t[left] = np.maximum(t[left], (C[idx[left] - 1, 0] - U[left, 0]) / c[0])
    return t


def _finite_precedes(A, B, cone):
    UA, UB = cone.coords(A), cone.coords(B)
    strict, _ = kernels.dominance_flags(UB, UA, TOL_STRICT)
    return not bool(strict.any())


def precedes(A, B, cone=None):
    """The set order ``A ≼_K B``: no element of ``B`` lies strictly below ``A``.

    Either side may be a :class:`FrontSet` or a finite list of points.  For
    two finite fronts the relation is decided by a finite certificate on the
    generators:

    * ``WSup M ≼ WSup N``  iff every ``m`` is ``≦_K`` some ``n``;
    * ``WInf M ≼ WInf N``  iff every ``n`` is ``≧_K`` some ``m``;
    * ``WSup M ≼ WInf N``  iff no ``n`` lies strictly below any ``m``;
    * ``WInf M ≼ WSup N``  never holds when ``m >= 2`` (the sup front is
      unbounded below along boundary rays of ``-K``); for ``m = 1`` it
      reduces to ``min M <= max N``.
    """
    fa, fb = isinstance(A, FrontSet), isinstance(B, FrontSet)
    if cone is None:
        cone = A.cone if fa else B.cone if fb else None
        if cone is None:
            raise ValueError("a cone is required for two finite sets")
    if fa and fb and A.dim != B.dim:
        raise ConeError("dimension mismatch")
    # conventions for the attached infinities
    if fa and A.kind is FrontKind.MINUS_INF:
        return True
    if fb and B.kind is FrontKind.PLUS_INF:
        return True
    if fa and A.kind is FrontKind.PLUS_INF:
        return False
    if fb and B.kind is FrontKind.MINUS_INF:
        return False
    if not fa and not fb:
        A, B = _as_points(A, cone.dim), _as_points(B, cone.dim)
        if len(A) == 0 or len(B) == 0:
            raise ValueError("precedes needs nonempty sets")
        return _finite_precedes(A, B, cone)
    if fa and not fb:
        B = _as_points(B, A.dim)
        return not bool(np.any(classify_points(A, B) == Label.BELOW))
    if fb and not fa:
        A = _as_points(A, B.dim)
        return not bool(np.any(classify_points(B, A) == Label.ABOVE))
    UA, UB = A.coords(), B.coords()
    if A.kind is FrontKind.SUP and B.kind is FrontKind.SUP:
        _, closed = kernels.dominance_flags(UA, UB, TOL_STRICT)
        return bool(closed.all())
    if A.kind is FrontKind.INF and B.kind is FrontKind.INF:
        _, closed = kernels.dominance_flags(-UB, -UA, TOL_STRICT)
        return bool(closed.all())
    if A.kind is FrontKind.SUP and B.kind is FrontKind.INF:
        strict, _ = kernels.dominance_flags(UB, UA, TOL_STRICT)
        return not bool(strict.any())
    # A is an inf front, B a sup front
    if A.dim >= 2:
        return False
    return bool(UA.min() <= UB.max() + TOL_STRICT)


def fronts_equal(U, V, grid=None):
    """Set equality: mutual ``≼`` (exact) plus agreement of probe labels."""
    if U.kind is not V.kind:
        return False
    if not U.is_finite:
        return True
    if not (precedes(U, V) and precedes(V, U)):
        return False
    if grid is None:
        grid = probe_grid(np.vstack([U.generators, V.generators]))
    return bool(np.array_equal(classify_points(U, grid), classify_points(V, grid)))


def _same_cone(a, b):
    return a is b or a.same_as(b)


def ws_sum(U, V):
    """The WS-sum ``U ⊎ V = WSup(U + V)``."""
    if not _same_cone(U.cone, V.cone):
        raise ConeError("WS-sum of fronts over different cones")
    kinds = {U.kind, V.kind}
    if kinds == {FrontKind.PLUS_INF, FrontKind.MINUS_INF}:
        raise ArithmeticError("the sum of +inf and -inf is undefined")
    if FrontKind.PLUS_INF in kinds:
        return FrontSet.plus_infinity(U.cone)
    if FrontKind.MINUS_INF in kinds:
        return FrontSet.minus_infinity(U.cone)
    if U.kind is not FrontKind.SUP or V.kind is not FrontKind.SUP:
        raise ValueError("WS-sum is defined for sup fronts")
    S = (U.generators[:, None, :] + V.generators[None, :, :]).reshape(-1, U.dim)
    return wsup(S, U.cone)


@dataclass(frozen=True, eq=False)
class ExtEpiElement:
    """A pair ``(L, U)`` of an operator and a front.

    With ``upward=True`` the element stands for the whole family
    ``{(L, V) : U ≼_K V}`` (the extended-epigraph reading); its Ψ-image is
    ``{L} x (U + K)``.  With ``upward=False`` it is the single pair.
    """

    operator: LinOp
    front: FrontSet
    upward: bool = False

    def key(self):
        return (self.operator.key(), self.front.kind, self.front.generators.tobytes(), self.upward)


def boxplus(A, B):
    """The ⊞-sum: all pairs ``(L1 + L2, U1 ⊎ U2)``, deduplicated."""
    out, seen = [], set()
    for a in A:
        for b in B:
            if a.operator.shape != b.operator.shape:
                raise ValueError("operator shape mismatch")
            e = ExtEpiElement(a.operator + b.operator, ws_sum(a.front, b.front),
                              a.upward or b.upward)
            k = e.key()
            if k not in seen:
                seen.add(k)
                out.append(e)
    return out


class psi:
    """Membership test for ``Ψ(A) = ∪ {L} x U`` over a collection ``A``.

    Usage: ``(L, y) in psi(A)``.
    """

    def __init__(self, A):
        self._by_op = {}
        for e in A:
            self._by_op.setdefault(e.operator.key(), []).append(e)

    def __contains__(self, pair):
        L, y = pair
        for e in self._by_op.get(L.key(), ()):
            if not e.front.is_finite:
                if e.upward and e.front.kind is FrontKind.MINUS_INF:
                    return True
                continue
            if e.upward:
                if classify(e.front, y) in (Label.ON, Label.ABOVE):
                    return True
            elif front_contains(e.front, y):
                return True
        return False

    def __call__(self, L, y):
        return (L, y) in self


@dataclass(frozen=True, eq=False)
class ClosedLowerSet:
    """The closed lower set ``M - K``; a reference non-partition-style set."""

    generators: np.ndarray
    cone: PolyhedralCone

    @property
    def dim(self):
        return self.cone.dim

    def on(self, Y):
        _, closed = kernels.dominance_flags(self.cone.coords(Y), self.cone.coords(self.generators), TOL_STRICT)
        return closed

    def below(self, Y):
        strict, _ = kernels.dominance_flags(self.cone.coords(Y), self.cone.coords(self.generators), TOL_STRICT)
        return strict

    def above(self, Y):
        # (M - K) + int K is the whole space
        return np.ones(len(_as_points(Y, self.dim)), dtype=bool)


def is_partition_style(front, grid):
    """True iff each probe lies in exactly one of ``U - int K``, ``U``, ``U + int K``.

    The three memberships are evaluated by independent formulas (strict
    domination, the exact membership test, and the interior-ray crossing).
    """
    grid = _as_points(grid, front.dim)
    if len(grid) == 0:
        return True
    count = front.below(grid).astype(int) + front.on(grid).astype(int) + front.above(grid).astype(int)
    return bool(np.all(count == 1))


def probe_grid(points, pad=2.0, resolution=None, window=None):
    """Axis-aligned probe lattice on the padded bounding box of ``points``.

    Default resolution: 101 points per axis in R^2, 41 in R^3, 15 in R^4,
    1001 in R.
    """
    if window is None:
        P = _as_points(points)
        lo, hi = P.min(axis=0) - pad, P.max(axis=0) + pad
    else:
        W = np.asarray(window, dtype=float)
        lo, hi = W[:, 0], W[:, 1]
    m = len(lo)
    if resolution is None:
        resolution = {1: 1001, 2: 101, 3: 41}.get(m, 15)
    axes = [np.linspace(a, b, resolution) for a, b in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def front_sample_points(front, window, resolution=201):
    """Points of a finite front inside an axis-aligned window.

    Base points on the hyperplane through the window centre orthogonal to
    the interior direction are pushed along that direction onto the front.
    """
    W = np.asarray(window, dtype=float)
    lo, hi = W[:, 0], W[:, 1]
    m = len(lo)
    k = front.cone.interior_point()
    center = (lo + hi) / 2
    radius = np.linalg.norm(hi - lo) / 2
    if m == 1:
        base = center.reshape(1, 1)
    else:
        basis = np.linalg.svd(k.reshape(1, -1))[2][1:]  # orthonormal complement
        axes = [np.linspace(-radius, radius, resolution)] * (m - 1)
        mesh = np.meshgrid(*axes, indexing="ij")
        S = np.stack([g.ravel() for g in mesh], axis=1)
        base = center + S @ basis
    t = crossing_offsets(front, base, k)
    pts = base + t[:, None] * k
    inside = np.all((pts >= lo - 1e-12) & (pts <= hi + 1e-12), axis=1)
    return pts[inside]


def hausdorff(A, B, one_sided=False):
    """Euclidean Hausdorff distance between two finite point sets."""
    A, B = np.asarray(A, dtype=float), np.asarray(B, dtype=float)
    if len(A) == 0 or len(B) == 0:
        return np.inf

    def directed(P, Q):
        best = 0.0
        block = max(1, (1 << 22) // max(len(Q), 1))
        for s in range(0, len(P), block):
            d = np.sqrt(((P[s:s + block, None, :] - Q[None, :, :]) ** 2).sum(axis=2)).min(axis=1)
            best = max(best, float(d.max()))
        return best

    d = directed(A, B)
    return d if one_sided else max(d, directed(B, A))


def _staircase(U):
    """Minimal corners of ``U + R^2_+``: sorted by first coordinate, second strictly decreasing."""
    U = U[np.lexsort((U[:, 1], U[:, 0]))]
    run = np.minimum.accumulate(U[:, 1])
    keep = np.ones(len(U), dtype=bool)
    keep[1:] = U[1:, 1] < run[:-1]
    return U[keep]


def _meet_staircases(A, B):
    """Corners of ``(A + R^2_+) ∩ (B + R^2_+)`` for two staircases."""
    return kernels.meet_staircases_2d(A, B)


def _weakly_minimal(U):
    """Drop rows that dominate another row componentwise (keeps one of duplicates)."""
    U = unique_rows(U)
    n = len(U)
    keep = np.ones(n, dtype=bool)
    block = max(1, (1 << 22) // max(n * U.shape[1], 1))
    for s in range(0, n, block):
        D = np.all(U[None, :, :] <= U[s:s + block, None, :], axis=2)
        D[np.arange(D.shape[0]), np.arange(s, s + D.shape[0])] = False
        keep[s:s + block] = ~D.any(axis=1)
    return U[keep]


def sup_of_infs(fronts, cone):
    """Weak supremum of the union of a family of weak-infimum fronts.

    For fronts ``WInf G_t`` this is the boundary of the intersection of the
    upper sets ``G_t + K``.  When ``K`` is simplicial that intersection is
    generated by the componentwise joins (in normal coordinates), so the
    result is again a finitely generated inf front.  Infinite members follow
    the usual conventions: ``+inf`` absorbs, ``-inf`` contributes nothing.
    """
    fronts = list(fronts)
    if any(f.kind is FrontKind.PLUS_INF for f in fronts):
        return FrontSet.plus_infinity(cone)
    if any(f.kind is FrontKind.SUP for f in fronts):
        raise ValueError("sup_of_infs expects inf fronts")
    finite = [f for f in fronts if f.kind is FrontKind.INF]
    if not finite:
        return FrontSet.minus_infinity(cone)
    if not cone.is_simplicial:
        raise NotImplementedError("joins of inf fronts need a simplicial ordering cone")
    N = cone.normals
    Ninv = np.linalg.inv(N)
    if cone.dim == 2:
        acc = _staircase(finite[0].coords())
        for f in finite[1:]:
            acc = _meet_staircases(acc, _staircase(f.coords()))
    else:
        acc = _weakly_minimal(finite[0].coords())
        for f in finite[1:]:
            B = _weakly_minimal(f.coords())
            J = np.maximum(acc[:, None, :], B[None, :, :]).reshape(-1, cone.dim)
            acc = _weakly_minimal(J)
    return winf(acc @ Ninv.T, cone)
