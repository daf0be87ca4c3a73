"""Polyhedral ordering cones and the orders they induce.

A :class:`PolyhedralCone` keeps both of its descriptions: a finite set of
generators (extreme rays) and a finite set of unit halfspace normals, so that
``cone = cone(generators) = {y : n @ y >= 0 for all normals n}``.  Either one
may be supplied; the other is derived by enumerating the candidate
facets/rays spanned by ``m - 1`` of the given vectors, which is exact and
cheap for the small ambient dimensions the toolkit supports (``m <= 4``).

Strict comparisons use the module tolerance :data:`TOL_STRICT`, measured
against unit normals.
"""

from dataclasses import dataclass
from enum import Enum
from itertools import combinations

import numpy as np

__all__ = [
    "TOL_STRICT",
    "MAX_DERIVE_DIM",
    "ConeError",
    "PolyhedralCone",
    "ExtendedPoint",
    "Region",
    "cone_contains",
    "less_weak",
    "leq_cone",
    "find_scaling",
    "bound_finite",
]

TOL_STRICT = 1e-9
MAX_DERIVE_DIM = 4


class ConeError(ValueError):
    """Raised for malformed cones or dimension mismatches."""


class Region(str, Enum):
    CLOSED = "Closed"
    INTERIOR = "Interior"
    BOUNDARY = "Boundary"


def _unit_rows(A):
    A = np.asarray(A, dtype=float)
    norms = np.linalg.norm(A, axis=1)
    if np.any(norms == 0):
        raise ConeError("zero vector in cone description")
    return A / norms[:, None]


def _dedupe_directions(A, tol=1e-10):
    """Remove duplicate unit directions, keeping lexicographic order."""
    if len(A) == 0:
        return A
    A = A[np.lexsort(A.T[::-1])]
    keep = [0]
    for i in range(1, len(A)):
        if not np.any(np.all(np.abs(A[i] - A[keep]) <= tol, axis=1)):
            keep.append(i)
    return A[keep]


def _polar_extremes(V, tol=1e-10):
    """Extreme rays of the polar-type cone ``{u : V @ u >= 0}``.

    For a full-dimensional pointed cone generated by the rows of ``V`` this
    returns the facet normals of ``cone(V)``; applied to a set of normals it
    returns the extreme rays of the halfspace intersection.  Each candidate is
    orthogonal to ``m - 1`` linearly independent rows of ``V``.
    """
    V = np.asarray(V, dtype=float)
    m = V.shape[1]
    if m == 1:
        out = [u for u in (np.array([1.0]), np.array([-1.0])) if np.all(V @ u >= -tol)]
        return np.array(out).reshape(-1, 1)
    found = []
    for idx in combinations(range(len(V)), m - 1):
        sub = V[list(idx)]
        if np.linalg.matrix_rank(sub, tol=1e-10) < m - 1:
            continue
        u = np.linalg.svd(sub)[2][-1]
        for cand in (u, -u):
            vals = V @ cand
            if np.all(vals >= -tol):
                found.append(cand / np.linalg.norm(cand))
    if not found:
        return np.zeros((0, m))
    return _dedupe_directions(np.array(found))


@dataclass(frozen=True, eq=False)
class PolyhedralCone:
    """A closed convex polyhedral cone with both generator and normal descriptions.

    Use :meth:`from_generators`, :meth:`from_normals` or the named
    constructors.  ``generators`` and ``normals`` are read-only arrays;
    normals have unit length.
    """

    dim: int
    generators: np.ndarray
    normals: np.ndarray

    def __post_init__(self):
        self.generators.setflags(write=False)
        self.normals.setflags(write=False)

    # -- construction -----------------------------------------------------
    @classmethod
    def from_generators(cls, generators):
        G = np.atleast_2d(np.asarray(generators, dtype=float))
        m = G.shape[1]
        if m > MAX_DERIVE_DIM:
            raise ConeError(f"cannot derive normals in dimension {m} > {MAX_DERIVE_DIM}")
        G = _unit_rows(G)
        if np.linalg.matrix_rank(G) < m:
            raise ConeError("generators do not span the space: the cone has empty interior")
        N = _polar_extremes(G)
        if len(N) == 0 or np.linalg.matrix_rank(N) < m:
            raise ConeError("cone is not pointed")
        gens = _polar_extremes(N)  # extreme rays only
        cone = cls(m, gens, N)
        cone._check_consistency()
        return cone

    @classmethod
    def from_normals(cls, normals):
        N = np.atleast_2d(np.asarray(normals, dtype=float))
        m = N.shape[1]
        if m > MAX_DERIVE_DIM:
            raise ConeError(f"cannot derive generators in dimension {m} > {MAX_DERIVE_DIM}")
        N = _unit_rows(N)
        if np.linalg.matrix_rank(N) < m:
            raise ConeError("cone is not pointed")
        G = _polar_extremes(N)
        if len(G) == 0 or np.linalg.matrix_rank(G) < m:
            raise ConeError("normals describe a cone with empty interior")
        cone = cls(m, G, _polar_extremes(G))
        cone._check_consistency()
        return cone

    @classmethod
    def from_dict(cls, d):
        """Build from the serialized form ``{"dim", "generators", "normals"}``.

        The shorthand ``{"orthant": m}`` gives the nonnegative orthant of ``R^m``.
        """
        if d.get("orthant") is not None:
            return cls.orthant(int(d["orthant"]))
        if d.get("zero"):
            return cls.zero(int(d["dim"]))
        gens, norms = d.get("generators"), d.get("normals")
        if gens is not None:
            cone = cls.from_generators(gens)
        elif norms is not None:
            cone = cls.from_normals(norms)
        else:
            raise ConeError("cone needs generators or normals")
        if "dim" in d and int(d["dim"]) != cone.dim:
            raise ConeError("declared dim does not match the cone data")
        if gens is not None and norms is not None:
            other = cls.from_normals(norms)
            if not cone.same_as(other):
                raise ConeError("generators and normals describe different cones")
        return cone

    @classmethod
    def orthant(cls, m):
        eye = np.eye(m)
        return cls(m, eye.copy(), eye.copy())

    @classmethod
    def zero(cls, m):
        """The trivial cone ``{0}`` (used as a perturbation-cone block)."""
        eye = np.eye(m)
        return cls(m, np.zeros((0, m)), np.vstack([eye, -eye]))

    @classmethod
    def product(cls, *cones):
        """Cartesian product of cones, with block-diagonal descriptions."""
        dims = [c.dim for c in cones]
        m = sum(dims)
        gens, norms, off = [], [], 0
        for c in cones:
            for g in c.generators:
                v = np.zeros(m)
                v[off:off + c.dim] = g
                gens.append(v)
            for n in c.normals:
                v = np.zeros(m)
                v[off:off + c.dim] = n
                norms.append(v)
            off += c.dim
        G = np.array(gens).reshape(-1, m)
        N = np.array(norms).reshape(-1, m)
        return cls(m, G, N)

    def to_dict(self):
        return {
            "dim": self.dim,
            "generators": self.generators.tolist(),
            "normals": self.normals.tolist(),
        }

    # -- properties ---------------------------------------------------------
    @property
    def has_interior(self):
        return bool(len(self.generators)) and np.linalg.matrix_rank(self.generators) == self.dim

    @property
    def is_simplicial(self):
        """True when the cone is linearly isomorphic to an orthant."""
        return len(self.normals) == self.dim and self.has_interior

    def interior_point(self):
        """A deterministic interior direction: the mean of the unit generators."""
        if not self.has_interior:
            raise ConeError("cone has empty interior")
        k = self.generators.mean(axis=0)
        return k / np.linalg.norm(k)

    def dual_generators(self):
        """Generators of the dual cone ``{w : w @ k >= 0 for k in cone}``."""
        return np.array(self.normals)

    def coords(self, Y):
        """Normal coordinates ``Y @ normals.T`` of one point or a stack of points."""
        return np.asarray(Y, dtype=float) @ self.normals.T

    def same_as(self, other, tol=1e-9):
        if self.dim != other.dim:
            return False
        a = self.coords(other.generators) if len(other.generators) else np.zeros((0, 1))
        b = other.coords(self.generators) if len(self.generators) else np.zeros((0, 1))
        return bool(np.all(a >= -tol) and np.all(b >= -tol)) and len(self.generators) == len(other.generators)

    def _check_consistency(self, tol=1e-9):
        if np.any(self.coords(self.generators) < -tol):
            raise ConeError("generator violates a halfspace")

    def _check_point(self, y):
        y = np.asarray(y, dtype=float)
        if y.shape[-1] != self.dim:
            raise ConeError(f"dimension mismatch: expected {self.dim}, got {y.shape[-1]}")
        return y

    def __repr__(self):
        return f"PolyhedralCone(dim={self.dim}, generators={self.generators.tolist()})"


def cone_contains(cone, y, region=Region.CLOSED, tol=TOL_STRICT):
    """Membership of ``y`` in the closed cone, its interior, or its boundary."""
    y = cone._check_point(y)
    u = cone.coords(y)
    closed = bool(np.all(u >= -tol))
    interior = bool(np.all(u > tol))
    region = Region(region)
    if region is Region.CLOSED:
        return closed
    if region is Region.INTERIOR:
        return interior
    return closed and not interior


class _Tag(str, Enum):
    FINITE = "Finite"
    PLUS_INF = "PlusInf"
    MINUS_INF = "MinusInf"


@dataclass(frozen=True, eq=False)
class ExtendedPoint:
    """A point of ``R^m`` extended by a greatest and a smallest element."""

    tag: _Tag
    value: np.ndarray = None

    Tag = _Tag

    @classmethod
    def finite(cls, v):
        return cls(_Tag.FINITE, np.asarray(v, dtype=float))

    @classmethod
    def plus_inf(cls):
        return cls(_Tag.PLUS_INF)

    @classmethod
    def minus_inf(cls):
        return cls(_Tag.MINUS_INF)

    @classmethod
    def coerce(cls, v):
        if isinstance(v, ExtendedPoint):
            return v
        return cls.finite(v)

    @property
    def is_finite(self):
        return self.tag is _Tag.FINITE

    def __add__(self, other):
        other = ExtendedPoint.coerce(other)
        tags = {self.tag, other.tag}
        if tags == {_Tag.PLUS_INF, _Tag.MINUS_INF}:
            raise ArithmeticError("the sum of +inf and -inf is undefined")
        if _Tag.PLUS_INF in tags:
            return ExtendedPoint.plus_inf()
        if _Tag.MINUS_INF in tags:
            return ExtendedPoint.minus_inf()
        if self.value.shape != other.value.shape:
            raise ConeError("dimension mismatch")
        return ExtendedPoint.finite(self.value + other.value)

    __radd__ = __add__

    def __neg__(self):
        if self.tag is _Tag.PLUS_INF:
            return ExtendedPoint.minus_inf()
        if self.tag is _Tag.MINUS_INF:
            return ExtendedPoint.plus_inf()
        return ExtendedPoint.finite(-self.value)

    def scale(self, t):
        """Multiply by a nonnegative scalar; ``0 * (+inf)`` is ``+inf`` by convention."""
        if t < 0:
            raise ValueError("only nonnegative scalings are defined")
        if not self.is_finite:
            return self
        return ExtendedPoint.finite(t * self.value)

    def __eq__(self, other):
        if not isinstance(other, ExtendedPoint):
            return NotImplemented
        if self.tag is not other.tag:
            return False
        return not self.is_finite or bool(np.array_equal(self.value, other.value))

    def __hash__(self):
        return hash((self.tag, None if self.value is None else self.value.tobytes()))

    def __repr__(self):
        if self.is_finite:
            return f"ExtendedPoint({self.value.tolist()})"
        return "+inf" if self.tag is _Tag.PLUS_INF else "-inf"


def less_weak(y1, y2, cone):
    """The weak order: ``y1 - y2`` lies in the negative interior of the cone."""
    a, b = ExtendedPoint.coerce(y1), ExtendedPoint.coerce(y2)
    if a.is_finite and b.is_finite:
        return cone_contains(cone, b.value - a.value, Region.INTERIOR)
    if a.tag is _Tag.MINUS_INF:
        return b.tag is not _Tag.MINUS_INF
    if b.tag is _Tag.PLUS_INF:
        return a.tag is not _Tag.PLUS_INF
    return False


def leq_cone(y1, y2, cone):
    """The closed cone order: ``y2 - y1`` lies in the cone."""
    y1 = cone._check_point(y1)
    y2 = cone._check_point(y2)
    return cone_contains(cone, y2 - y1, Region.CLOSED)


def find_scaling(y, y_prime, k0, cone, max_doublings=200):
    """Return ``mu > 0`` with ``y - mu * k0`` weakly below ``y_prime``.

    Doubling search from ``mu = 1``; ``k0`` must be an interior direction.
    """
    y = cone._check_point(y)
    y_prime = cone._check_point(y_prime)
    k0 = cone._check_point(k0)
    if not cone_contains(cone, k0, Region.INTERIOR):
        raise ConeError("k0 must lie in the interior of the cone")
    mu = 1.0
    for _ in range(max_doublings):
        if less_weak(y - mu * k0, y_prime, cone):
            return mu
        mu *= 2.0
    raise ArithmeticError("doubling search did not terminate")


def bound_finite(points, cone):
    """Points ``(lower, upper)`` with ``lower <_K p <_K upper`` for every ``p``."""
    P = np.atleast_2d(np.asarray(points, dtype=float))
    if P.size == 0:
        raise ValueError("bound_finite needs at least one point")
    cone._check_point(P[0])
    k0 = cone.interior_point()
    center = P.mean(axis=0)
    mu_up = max(find_scaling(p, center, k0, cone) for p in P)
    upper = center + mu_up * k0
    mu_lo = max(find_scaling(center, p, k0, cone) for p in P)
    lower = center - mu_lo * k0
    # both relations follow from y - mu k0 <_K y' for every point; verify
    for p in P:
        if not (less_weak(lower, p, cone) and less_weak(p, upper, cone)):
            raise ArithmeticError("bound construction failed")
    return lower, upper
