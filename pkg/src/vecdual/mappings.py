"""Sampled vector-valued mappings and their conjugates.

A :class:`SampledMap` tabulates a proper mapping ``F: X -> Y ∪ {+inf}`` on a
finite sample set; rows of ``values`` filled with ``inf`` encode ``+inf``.
All quantifiers over ``X`` range over the stored samples (the *sampled
relaxation*): the conjugate ``F*(L) = WSup{L x - F(x)}`` and the epigraph
test below are exact for the tabulated map.
"""

import itertools
from dataclasses import dataclass

import numpy as np

from vecdual import kernels
from vecdual.cone_order import TOL_STRICT, ConeError, PolyhedralCone
from vecdual.linop import LinOp
from vecdual.lp import LPStatus, lp_solve
from vecdual.weak_sets import Label, classify, wsup

__all__ = [
    "LinOp",
    "SampledMap",
    "conjugate",
    "epi_membership",
    "indicator",
    "compose",
    "is_positive_operator",
    "is_weakly_positive",
    "image_meets_interior",
    "dom_indicator_conjugate_check",
    "conjugate_value_scalar",
]


@dataclass(frozen=True, eq=False)
class SampledMap:
    """A mapping tabulated on ``samples`` (shape ``(N, n)``) with values ``(N, m)``."""

    samples: np.ndarray
    values: np.ndarray
    cone: PolyhedralCone

    def __post_init__(self):
        X = np.asarray(self.samples, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        V = np.asarray(self.values, dtype=float)
        if V.ndim == 1:
            V = V.reshape(-1, 1)
        if len(X) != len(V):
            raise ValueError("samples and values must be parallel")
        if V.shape[1] != self.cone.dim:
            raise ConeError("value dimension does not match the cone")
        if np.any(np.isnan(V)) or np.any(V == -np.inf):
            raise ValueError("values must be finite or +inf")
        # a row with any +inf coordinate is the point +inf
        inf_rows = np.any(np.isinf(V), axis=1)
        V = V.copy()
        V[inf_rows] = np.inf
        if inf_rows.all():
            raise ValueError("improper map: no finite value")
        X.setflags(write=False)
        V.setflags(write=False)
        object.__setattr__(self, "samples", X)
        object.__setattr__(self, "values", V)

    @classmethod
    def from_function(cls, samples, func, cone):
        """Tabulate ``func`` (returning a vector, or ``None`` for ``+inf``)."""
        X = np.asarray(samples, dtype=float)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        rows = []
        for x in X:
            v = func(x)
            rows.append(np.full(cone.dim, np.inf) if v is None else np.asarray(v, dtype=float).ravel())
        return cls(X, np.array(rows), cone)

    @property
    def domain_dim(self):
        return self.samples.shape[1]

    @property
    def dim(self):
        return self.cone.dim

    @property
    def finite(self):
        return np.isfinite(self.values[:, 0])

    def dom(self):
        """Sample points with a finite value."""
        return self.samples[self.finite]

    def __add__(self, other):
        """Pointwise sum on a common sample grid."""
        if not np.array_equal(self.samples, other.samples):
            raise ValueError("maps are tabulated on different grids")
        return SampledMap(self.samples, self.values + other.values, self.cone)

    def shift(self, y0):
        """The map ``F + y0``."""
        return SampledMap(self.samples, self.values + np.asarray(y0, dtype=float), self.cone)

    def restrict(self, mask):
        """Set the value to ``+inf`` where ``mask`` is false."""
        V = np.array(self.values)
        V[~np.asarray(mask, dtype=bool)] = np.inf
        return SampledMap(self.samples, V, self.cone)

    def lookup(self, points, atol=1e-9):
        """Values at ``points``, which must coincide with stored samples.

        Returns ``(values, found)``; points off the grid get ``+inf`` and
        ``found = False``.
        """
        P = np.asarray(points, dtype=float).reshape(-1, self.domain_dim)
        keys = np.round(self.samples / atol).astype(np.int64)
        index = {k.tobytes(): i for i, k in enumerate(keys)}
        out = np.full((len(P), self.dim), np.inf)
        found = np.zeros(len(P), dtype=bool)
        for r, k in enumerate(np.round(P / atol).astype(np.int64)):
            i = index.get(k.tobytes())
            if i is not None:
                out[r] = self.values[i]
                found[r] = True
        return out, found

    def to_dict(self):
        vals = [v.tolist() if np.isfinite(v[0]) else "+inf" for v in self.values]
        return {"samples": self.samples.tolist(), "values": vals, "cone": self.cone.to_dict()}

    @classmethod
    def from_dict(cls, d, cone=None):
        cone = cone if cone is not None else PolyhedralCone.from_dict(d["cone"])
        X = np.asarray(d["samples"], dtype=float)
        V = [np.full(cone.dim, np.inf) if (isinstance(v, str) and v == "+inf") else v
             for v in d["values"]]
        return cls(X, np.array(V, dtype=float).reshape(len(V), cone.dim), cone)


def _check_L(F, L):
    if not isinstance(L, LinOp):
        L = LinOp(L)
    if L.shape != (F.dim, F.domain_dim):
        raise ValueError(f"operator shape {L.shape} incompatible with map {F.dim}x{F.domain_dim}")
    return L


def conjugate(F, L):
    """The conjugate ``F*(L) = WSup{L(x) - F(x) : x in dom F}``."""
    L = _check_L(F, L)
    fin = F.finite
    if not fin.any():
        raise ValueError("improper map")
    return wsup(L(F.samples[fin]) - F.values[fin], F.cone)


def epi_membership(F, L, y):
    """``(L, y) in epi F*``: ``F(x) - L(x) + y`` avoids ``-int K`` for every sample."""
    L = _check_L(F, L)
    fin = F.finite
    vals = L(F.samples[fin]) - F.values[fin]
    u_y = F.cone.coords(np.asarray(y, dtype=float)).reshape(1, -1)
    strict, _ = kernels.dominance_flags(u_y, F.cone.coords(vals), TOL_STRICT)
    return not bool(strict[0])


def indicator(D, samples, cone):
    """The indicator map: ``0`` on the samples selected by ``D``, ``+inf`` elsewhere.

    ``D`` is a boolean mask or a predicate applied to each sample.
    """
    X = np.asarray(samples, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    mask = np.asarray(D, dtype=bool) if not callable(D) else np.array([bool(D(x)) for x in X])
    if mask.shape != (len(X),):
        raise ValueError("mask must have one entry per sample")
    if not mask.any():
        raise ValueError("indicator of an empty set")
    V = np.zeros((len(X), cone.dim))
    V[~mask] = np.inf
    return SampledMap(X, V, cone)


def compose(T, G, cone=None):
    """``(T ∘ G)(x) = T(G(x))`` with ``+inf`` preserved; ``cone`` orders the codomain."""
    if not isinstance(T, LinOp):
        T = LinOp(T)
    if T.cols != G.dim:
        raise ValueError(f"operator expects dimension {T.cols}, map has codomain {G.dim}")
    if cone is None:
        if T.rows != G.dim:
            raise ValueError("a codomain cone is required when dimensions change")
        cone = G.cone
    fin = G.finite
    V = np.full((len(G.samples), T.rows), np.inf)
    V[fin] = T(G.values[fin])
    return SampledMap(G.samples, V, cone)


def is_positive_operator(T, S, K):
    """``T(S) ⊆ K``, checked on the generators of ``S``."""
    if not isinstance(T, LinOp):
        T = LinOp(T)
    if T.shape != (K.dim, S.dim):
        raise ValueError("operator shape does not match the cones")
    if len(S.generators) == 0:
        return True
    return bool(np.all(K.coords(T(S.generators)) >= -TOL_STRICT))


def image_meets_interior(V, K):
    """Whether some convex combination of the columns of ``V`` lies in ``int K``.

    LP: maximize ``t`` subject to ``n_i @ (V @ lam) >= t`` for every normal
    ``n_i``, ``sum(lam) = 1``, ``lam >= 0``, ``t <= 1``.  The answer is yes
    iff the optimum exceeds the strict tolerance.
    """
    V = np.atleast_2d(np.asarray(V, dtype=float))
    r = V.shape[1]
    if r == 0:
        return False
    W = K.normals @ V  # (J, r)
    J = W.shape[0]
    c = np.zeros(r + 1)
    c[-1] = -1.0
    A_ub = np.hstack([-W, np.ones((J, 1))])
    b_ub = np.zeros(J)
    A_eq = np.zeros((1, r + 1))
    A_eq[0, :r] = 1.0
    bounds = [(0, None)] * r + [(None, 1.0)]
    res = lp_solve(c, A_ub, b_ub, A_eq, [1.0], bounds=bounds)
    if res.status is not LPStatus.OPTIMAL:
        raise RuntimeError(f"weak-positivity LP failed: {res.status}")
    return -res.value > TOL_STRICT


def is_weakly_positive(T, S, K):
    """``T(S) ∩ (-int K) = ∅``, decided by a small LP over ``S``'s generators."""
    if not isinstance(T, LinOp):
        T = LinOp(T)
    if T.shape != (K.dim, S.dim):
        raise ValueError("operator shape does not match the cones")
    if len(S.generators) == 0:
        return True
    return not image_meets_interior(-T(S.generators).T, K)


def dom_indicator_conjugate_check(S, K, T, radius=1e6, box=10.0, divisions=8):
    """Compare boundedness of the sampled ``I*_{-S}(T)`` with weak positivity.

    ``-S`` is sampled by convex combinations of its generators (simplex grid
    with ``divisions`` steps) scaled by ``{0, radius}``.  The conjugate is
    deemed bounded when some probe of ``[-box, box]^m`` is not strictly below
    it.  Returns ``True`` when the verdict agrees with :func:`is_weakly_positive`.
    """
    if not isinstance(T, LinOp):
        T = LinOp(T)
    G = S.generators
    r = len(G)
    if r == 0:
        pts = np.zeros((1, S.dim))
    else:
        combos = [c for c in itertools.product(range(divisions + 1), repeat=r) if sum(c) == divisions]
        lam = np.array(combos, dtype=float) / divisions
        dirs = lam @ G
        pts = np.vstack([np.zeros((1, S.dim)), -radius * dirs])
    F = indicator(np.ones(len(pts), dtype=bool), pts, K)
    front = conjugate(F, T)
    probes = np.array(np.meshgrid(*[np.linspace(-box, box, 11)] * K.dim, indexing="ij")).reshape(K.dim, -1).T
    bounded = any(classify(front, p) is not Label.BELOW for p in probes)
    return bounded == is_weakly_positive(T, S, K)


def conjugate_value_scalar(F, x_star):
    """Scalar conjugate ``sup <x*, x> - f(x)`` of a sampled real-valued map."""
    if F.dim != 1:
        raise ValueError("scalar conjugate needs a real-valued map")
    front = conjugate(F, LinOp(np.atleast_2d(x_star)))
    return float(front.generators.max())

