"""Seeded random instances shared by the module tests and the acceptance suite."""

import numpy as np

from vecdual.cone_order import PolyhedralCone
from vecdual.linop import LinOp
from vecdual.mappings import SampledMap
from vecdual.perturbation import (CCVPInstance, PerturbationProblem, build_cone_constrained,
                                  operator_grid)
from vecdual.scalar_fl import PLFunction, ScalarInstance

K2 = PolyhedralCone.orthant(2)
S1 = PolyhedralCone.orthant(1)


def random_perturbation(seed, nx=5, nz=5):
    """A small perturbation table with integer values, some ``+inf`` cells and a ``T`` grid."""
    rng = np.random.default_rng(seed)
    X = np.arange(nx, dtype=float)
    Z = np.arange(nz, dtype=float) - nz // 2
    V = rng.integers(-3, 4, size=(nx, nz, 2)).astype(float)
    V[rng.random((nx, nz)) < 0.2] = np.inf
    V[rng.integers(nx), nz // 2] = rng.integers(-3, 4, 2)
    ops = operator_grid((2, 1), [-1.0, 0.0, 1.0])
    return PerturbationProblem(X, Z, V, K2, S1, ops, name=f"random{seed}")


def pl_convex(X, rng):
    """Values on ``X`` of a convex piecewise-linear function with breakpoints on the grid."""
    slopes = np.sort(rng.integers(-3, 4, size=len(X) - 1)).astype(float)
    return np.concatenate([[0.0], np.cumsum(slopes * np.diff(X))]) + rng.integers(-2, 3)


def certificate_fixtures(n=20, seed=3):
    """K-convex cone-constrained problems with ``int S`` nonempty and ``Phi`` monotone in ``z``.

    ``F`` is a pair of convex piecewise-linear functions, ``G(x) = |x| - 1``
    and ``B >= 0``, so ``Phi(x, z) = F(x) + B z`` on ``G(x) <= z``.
    """
    rng = np.random.default_rng(seed)
    X = np.round(np.arange(-2, 2.001, 0.25), 10)
    Z = np.round(np.arange(-2, 2.001, 0.25), 10)
    out = []
    for _ in range(n):
        F = np.column_stack([pl_convex(X, rng), pl_convex(X, rng)])
        B = rng.integers(0, 3, size=(2, 1)).astype(float)
        P = build_cone_constrained(X, Z, F, np.abs(X) - 1.0, B, K2, S1, operator_grid((2, 1), [-1, 0, 1]))
        Ls = [LinOp([[0.0], [0.0]]), LinOp(rng.integers(-1, 2, size=(2, 1)).astype(float))]
        out.append((P, Ls))
    return out


CERTIFICATE_PROBES = [np.array([a, b]) for a in np.linspace(-6, 6, 9) for b in np.linspace(-6, 6, 9)]


def random_ccvp(rng, nx=4):
    """A small composite problem: ``F + kappa∘H`` over ``C ∩ G^-1(-S)`` with monotone ``kappa``."""
    P1 = PolyhedralCone.orthant(1)
    X = np.arange(nx, dtype=float).reshape(-1, 1)
    F = SampledMap(X, rng.integers(-3, 4, size=(nx, 2)).astype(float), K2)
    W = np.arange(-2, 3, dtype=float).reshape(-1, 1)
    kappa = SampledMap(W, np.sort(rng.integers(-2, 3, size=(5, 2)), axis=0).astype(float), K2)
    H = SampledMap(X, rng.integers(-1, 2, size=(nx, 1)).astype(float), P1)
    G = SampledMap(X, rng.integers(-2, 2, size=(nx, 1)).astype(float), S1)
    C = rng.random(nx) < 0.8
    while True:
        try:
            return CCVPInstance(F, kappa, H, G, C, K2, P1, S1, s_samples=[[-1.0], [-2.0]])
        except ValueError:
            C = np.ones(nx, bool)
            G = SampledMap(X, -np.abs(G.values), S1)


def random_scalar(seed, slater=True, kappa=False):
    """A two-variable piecewise-linear program on the box ``[-2, 2]^2``.

    With ``slater=False`` the constraint ``x1 + 2 <= 0`` only touches the box,
    so no strictly feasible point exists.
    """
    r = np.random.default_rng(seed)
    n, p = 2, 3
    f = PLFunction(r.integers(-3, 4, (p, n)).astype(float), r.integers(-3, 4, p).astype(float))
    CA = np.vstack([np.eye(n), -np.eye(n)])
    Cb = np.full(2 * n, 2.0)
    if slater:
        S = PolyhedralCone.from_generators([[1, 0.0], [1, 2.0]])
        GA, Gb = r.integers(-2, 3, (2, n)).astype(float), -np.ones(2)
    else:
        S = PolyhedralCone.orthant(2)
        GA, Gb = np.eye(2), np.array([2.0, 0.0])
    kw = {}
    if kappa:
        kw = dict(kappa=PLFunction(np.abs(r.integers(0, 3, (2, 1))).astype(float),
                                   r.integers(-2, 3, 2).astype(float)),
                  H_A=r.integers(-1, 2, (1, n)).astype(float), H_b=[0.5])
    return ScalarInstance(f, CA, Cb, GA, Gb, S, **kw)


def scalar_probes(seed):
    return [(r, rv) for r in np.random.default_rng(seed).integers(-4, 5, (10, 2)) for rv in (-1.0, 2.0)]
