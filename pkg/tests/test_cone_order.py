import numpy as np
import pytest

from vecdual.cone_order import (ConeError, ExtendedPoint, PolyhedralCone, Region, bound_finite,
                                cone_contains, find_scaling, less_weak, leq_cone)

R2 = PolyhedralCone.orthant(2)
WEDGE = PolyhedralCone.from_generators([[1, 0], [1, 1]])


def ray_oracle(gens, y, n=4001):
    """Whether ``y`` is a positive multiple of a convex combination of the generators (2-D)."""
    g = np.asarray(gens, dtype=float)
    t = np.linspace(0, 1, n)[:, None]
    rays = (1 - t) * g[0] + t * g[1]
    rays /= np.linalg.norm(rays, axis=1, keepdims=True)
    u = np.asarray(y, dtype=float) / np.linalg.norm(y)
    return np.max(rays @ u) > 1 - 1e-6


class TestMembership:
    def test_orthant_interior(self):
        assert cone_contains(R2, [1, 1], Region.INTERIOR)

    def test_orthant_axis_point(self):
        assert not cone_contains(R2, [1, 0], Region.INTERIOR)
        assert cone_contains(R2, [1, 0], Region.BOUNDARY)

    def test_wedge_normals(self):
        N = WEDGE.normals
        expected = np.array([[0, 1], [1, -1]]) / np.array([[1], [np.sqrt(2)]])
        assert np.allclose(sorted(map(tuple, N)), sorted(map(tuple, expected)))

    def test_wedge_interior_point(self):
        assert cone_contains(WEDGE, [2, 1], Region.INTERIOR)

    def test_wedge_against_ray_sampling(self):
        rng = np.random.default_rng(0)
        for y in rng.normal(size=(200, 2)):
            ang = np.arctan2(y[1], y[0])
            if min(abs(ang), abs(ang - np.pi / 4)) < 1e-2:
                continue  # within sampling resolution of a boundary ray
            assert cone_contains(WEDGE, y) == ray_oracle([[1, 0], [1, 1]], y)

    def test_regions_partition_closed(self):
        rng = np.random.default_rng(1)
        Y = np.round(rng.normal(size=(300, 2)), 1)
        for y in Y:
            c = cone_contains(WEDGE, y, Region.CLOSED)
            i = cone_contains(WEDGE, y, Region.INTERIOR)
            b = cone_contains(WEDGE, y, Region.BOUNDARY)
            assert (not i) or c
            assert b == (c and not i)

    def test_dimension_mismatch(self):
        with pytest.raises(ConeError):
            cone_contains(R2, [1, 2, 3])

    def test_interior_plus_cone(self):
        rng = np.random.default_rng(2)
        for k, y in zip(rng.normal(size=(200, 2)), rng.normal(size=(200, 2))):
            if cone_contains(WEDGE, k) and not cone_contains(WEDGE, k + y, Region.INTERIOR):
                assert not cone_contains(WEDGE, y, Region.INTERIOR)


class TestConstruction:
    def test_generator_normal_roundtrip(self):
        c = PolyhedralCone.from_normals(WEDGE.normals)
        assert c.same_as(WEDGE)

    def test_dict_roundtrip(self):
        assert PolyhedralCone.from_dict(WEDGE.to_dict()).same_as(WEDGE)
        assert PolyhedralCone.from_dict({"orthant": 3}).same_as(PolyhedralCone.orthant(3))

    def test_rejects_non_pointed(self):
        with pytest.raises(ConeError):
            PolyhedralCone.from_generators([[1, 0], [-1, 0], [0, 1]])

    def test_rejects_empty_interior(self):
        with pytest.raises(ConeError):
            PolyhedralCone.from_generators([[1, 0]])

    def test_interior_point_is_interior(self):
        for c in (R2, WEDGE, PolyhedralCone.orthant(3)):
            assert cone_contains(c, c.interior_point(), Region.INTERIOR)

    def test_product(self):
        p = PolyhedralCone.product(R2, PolyhedralCone.orthant(1))
        assert p.same_as(PolyhedralCone.orthant(3))


class TestOrders:
    def test_weak_order_examples(self):
        assert less_weak([0, 0], [1, 1], R2)
        assert not less_weak([0, 0], [1, 0], R2)

    def test_weak_order_infinities(self):
        assert less_weak(ExtendedPoint.minus_inf(), [5, -3], R2)
        assert less_weak([5, -3], ExtendedPoint.plus_inf(), R2)

    def test_irreflexive(self):
        assert not less_weak([0.3, -2], [0.3, -2], WEDGE)

    def test_leq_examples(self):
        assert leq_cone([1, 0], [1, 0], R2)
        assert leq_cone([1, 2], [1, 3], R2)
        assert leq_cone([-2], [0], PolyhedralCone.orthant(1))

    def test_transitivity_and_mixing(self):
        rng = np.random.default_rng(3)
        P = np.round(rng.normal(size=(40, 2)), 1)
        for a in P:
            for b in P[:10]:
                for c in P[:10]:
                    if less_weak(a, b, WEDGE) and less_weak(b, c, WEDGE):
                        assert less_weak(a, c, WEDGE)
                    if leq_cone(a, b, WEDGE) and less_weak(b, c, WEDGE):
                        assert less_weak(a, c, WEDGE)

    def test_extended_arithmetic(self):
        p, m = ExtendedPoint.plus_inf(), ExtendedPoint.minus_inf()
        assert p + ExtendedPoint.finite([1, 2]) == p
        assert m + [1, 2] == m
        assert -p == m
        with pytest.raises(ArithmeticError):
            p + m


class TestScaling:
    @pytest.mark.parametrize("y, yp", [([0, 0], [1, 1]), ([3, 0], [0, 0]), ([0, 0], [0, 0])])
    def test_find_scaling_postcondition(self, y, yp):
        mu = find_scaling(y, yp, [1, 1], R2)
        assert mu > 0
        assert less_weak(np.array(y) - mu * np.ones(2), yp, R2)

    def test_find_scaling_needs_large_mu(self):
        mu = find_scaling([3, 0], [0, 0], [1, 1], R2)
        assert mu > 3

    def test_find_scaling_rejects_boundary_direction(self):
        with pytest.raises(ConeError):
            find_scaling([0, 0], [1, 1], [1, 0], R2)

    @pytest.mark.parametrize("points, cone", [([[0, 0]], R2), ([[0, 0], [2, -1]], R2), ([[5, 5]], WEDGE)])
    def test_bound_finite(self, points, cone):
        lo, hi = bound_finite(points, cone)
        for p in points:
            assert less_weak(lo, p, cone) and less_weak(p, hi, cone)

    def test_bound_finite_empty(self):
        with pytest.raises(ValueError):
            bound_finite([], R2)
