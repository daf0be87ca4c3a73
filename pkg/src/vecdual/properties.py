"""Seeded randomized property suites for fronts, WS-sums and conjugate epigraphs.

Each suite draws random finite sets, proper polyhedral cones and sampled
maps from an explicit seed and checks an algebraic law exactly (set order
certificates) or on a probe lattice.  The result is a :class:`SuiteReport`
with one ``(checked, failed)`` counter per law, so the same code serves the
test suite and the command-line ``properties`` task.
"""

from dataclasses import dataclass, field

import numpy as np

from vecdual.cone_order import ConeError, PolyhedralCone
from vecdual.linop import LinOp
from vecdual.mappings import SampledMap, conjugate, epi_membership
from vecdual.weak_sets import (ExtEpiElement, FrontKind, crossing_offsets, front_sample_points,
                               fronts_equal,
                               is_partition_style, precedes, probe_grid, psi, winf, ws_sum, wsup)

__all__ = ["SuiteReport", "random_cone", "random_points", "weak_sets_suite", "bridge_suite"]


@dataclass
class SuiteReport:
    """Per-law counters ``name -> [checked, failed]`` plus the failing case ids."""

    name: str
    seed: int
    counts: dict = field(default_factory=dict)
    failures: list = field(default_factory=list)

    def record(self, law, ok, case=None):
        c = self.counts.setdefault(law, [0, 0])
        c[0] += 1
        if not ok:
            c[1] += 1
            self.failures.append({"law": law, "case": case})

    @property
    def n_failed(self):
        return sum(f for _, f in self.counts.values())

    @property
    def ok(self):
        return self.n_failed == 0

    def to_dict(self):
        return {"suite": self.name, "seed": self.seed, "ok": self.ok,
                "counts": {k: list(v) for k, v in sorted(self.counts.items())},
                "failures": self.failures}


def random_cone(dim, rng, max_tries=50):
    """A random proper polyhedral cone: 2 generators in R^2, 3-5 in R^3.

    Generators are integer perturbations of a common interior direction, so
    the cone is pointed and solid.
    """
    for _ in range(max_tries):
        d = rng.integers(1, 4, dim).astype(float)
        n = 2 if dim == 2 else int(rng.integers(dim, dim + 3))
        G = d + rng.integers(-3, 4, (n, dim))
        if np.any(G @ d <= 0):
            continue
        try:
            return PolyhedralCone.from_generators(G)
        except ConeError:
            continue
    return PolyhedralCone.orthant(dim)


def random_points(dim, rng, n=None, scale=4):
    """Random lattice points (step 0.5) so that ties and shared coordinates occur."""
    n = int(rng.integers(3, 13)) if n is None else n
    return rng.integers(-2 * scale, 2 * scale + 1, (n, dim)) / 2.0


def _cone_vectors(cone, rng, n):
    w = rng.random((n, len(cone.generators)))
    return w @ cone.generators


def _case_grid(points, res):
    return probe_grid(points, pad=2.0, resolution=res)


def _check_set(rep, case, M, K, rng, res):
    dim = K.dim
    U = wsup(M, K)
    Vinf = winf(M, K)
    grid = _case_grid(M, res)
    # decomposition: three disjoint pieces cover the probe lattice
    rep.record("decomposition_sup", is_partition_style(U, grid), case)
    rep.record("decomposition_inf", is_partition_style(Vinf, grid), case)
    # translation
    y = rng.integers(-4, 5, dim) / 2.0
    rep.record("translation", fronts_equal(wsup(M + y, K), U.translate(y), grid + y), case)
    # absorption: adding points of M - K (including M itself) leaves WSup unchanged
    N = np.vstack([np.zeros((1, dim)), -_cone_vectors(K, rng, 4)])
    MN = (M[:, None, :] + N[None, :, :]).reshape(-1, dim)
    rep.record("absorption", fronts_equal(wsup(MN, K), U, grid), case)
    # WS-sum: neutral element -bd K = WSup{0}, commutativity, associativity
    zero = wsup(np.zeros((1, dim)), K)
    rep.record("ws_sum_neutral", fronts_equal(ws_sum(U, zero), U, grid), case)
    V = wsup(random_points(dim, rng), K)
    W = wsup(random_points(dim, rng), K)
    UV, VU = ws_sum(U, V), ws_sum(V, U)
    big = _case_grid(np.vstack([UV.generators, W.generators]), res)
    rep.record("ws_sum_commutative", fronts_equal(UV, VU, big), case)
    big3 = _case_grid(np.vstack([UV.generators + W.generators.mean(axis=0)]), res)
    rep.record("ws_sum_associative",
               fronts_equal(ws_sum(UV, W), ws_sum(U, ws_sum(V, W)), big3), case)
    # compatibility of the sum with the order: U ≼ U' (U' from a superset)
    Up = wsup(np.vstack([M, random_points(dim, rng, 3)]), K)
    if precedes(U, Up):
        rep.record("ws_sum_monotone", precedes(ws_sum(U, W), ws_sum(Up, W)), case)
    # order chains
    rep.record("winf_precedes_set", precedes(Vinf, M, K), case)
    rep.record("set_precedes_wsup", precedes(M, U, K), case)
    rep.record("superset_monotone", precedes(U, Up), case)
    shift = K.interior_point() * (np.ptp(M) * 2 + 2)
    Nup = random_points(dim, rng) + shift + M.max(axis=0) - M.min(axis=0)
    for NN in (Nup, random_points(dim, rng)):
        if precedes(M, NN, K):
            rep.record("sup_precedes_inf", precedes(U, winf(NN, K)), case)
    # antisymmetry on partition-style sets: a front inside another equals it
    window = np.column_stack([grid.min(axis=0), grid.max(axis=0)])
    on_front = front_sample_points(U, window, 101 if dim == 2 else 21)
    for other in (wsup(MN, K), V):
        if other.on(on_front).all():
            rep.record("antisymmetry", fronts_equal(U, other, grid), case)
    on_u = U.on(grid)
    # U + K = U ∪ (U + int K): y is in U + K iff y = u - t k with u on U and t <= 0
    k = K.interior_point()
    t = crossing_offsets(U, grid, k)
    witness = U.on(grid + t[:, None] * k) & (t <= 1e-9)
    rep.record("upper_set_split", np.array_equal(witness, on_u | U.above(grid)), case)


def weak_sets_suite(n2=100, n3=50, seed=0, res2=101, res3=41):
    """Front algebra on ``n2`` random sets in R^2 and ``n3`` in R^3 (seeded)."""
    rng = np.random.default_rng(seed)
    rep = SuiteReport("weak_sets", seed)
    for dim, count, res in ((2, n2, res2), (3, n3, res3)):
        for i in range(count):
            K = random_cone(dim, rng)
            M = random_points(dim, rng)
            _check_set(rep, f"R{dim}#{i}", M, K, rng, res)
    return rep


def bridge_suite(n_maps=100, seed=0, n_ops=3, res=21):
    """``Ψ(𝔈pi F*) = epi F*`` and upward closure of ``epi F*`` on random sampled maps."""
    rng = np.random.default_rng(seed)
    rep = SuiteReport("bridge", seed)
    for i in range(n_maps):
        m = 2 if i % 2 == 0 else 3
        n = 1 if i % 4 < 2 else 2
        K = random_cone(m, rng)
        X = rng.integers(-4, 5, (int(rng.integers(4, 12)), n)) / 2.0
        X = np.unique(X, axis=0)
        Vals = rng.integers(-6, 7, (len(X), m)) / 2.0
        if len(X) > 2:
            Vals[int(rng.integers(len(X)))] = np.inf
        F = SampledMap(X, Vals, K)
        for _ in range(n_ops):
            L = LinOp(rng.integers(-2, 3, (m, n)).astype(float))
            front = conjugate(F, L)
            coll = psi([ExtEpiElement(L, front, upward=True)])
            grid = probe_grid(front.generators, pad=1.5, resolution=res if m == 2 else 9)
            epi = np.array([epi_membership(F, L, y) for y in grid])
            flat = np.array([(L, y) in coll for y in grid])
            rep.record("psi_bridge", np.array_equal(epi, flat), f"map#{i}")
            up = grid[epi] + _cone_vectors(K, rng, int(epi.sum())) if epi.any() else grid[:0]
            rep.record("upward_closed", all(epi_membership(F, L, y) for y in up), f"map#{i}")
            # translation covariance of the conjugate
            y0 = rng.integers(-3, 4, m) / 2.0
            shifted = conjugate(SampledMap(X, Vals - y0, K), L)
            rep.record("conjugate_translation",
                       shifted.kind is FrontKind.SUP and
                       fronts_equal(shifted, front.translate(y0), grid + y0), f"map#{i}")
    return rep
