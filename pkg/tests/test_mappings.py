import numpy as np
import pytest

from vecdual.cone_order import PolyhedralCone
from vecdual.linop import LinOp
from vecdual.mappings import (SampledMap, compose, conjugate, conjugate_value_scalar,
                              dom_indicator_conjugate_check, epi_membership, indicator,
                              is_positive_operator, is_weakly_positive)
from vecdual.weak_sets import Label, classify, fronts_equal, wsup

R1 = PolyhedralCone.orthant(1)
R2 = PolyhedralCone.orthant(2)
X3 = np.array([[-1.0], [0.0], [1.0]])


def col(*v):
    return LinOp(np.array(v, dtype=float).reshape(-1, 1))


class TestLinOp:
    def test_algebra(self):
        A = LinOp([[1.0, 2.0], [3.0, 4.0]])
        B = LinOp.identity(2)
        assert np.allclose((A + B).matrix, [[2, 2], [3, 5]])
        assert np.allclose((A - A).matrix, 0)
        assert np.allclose((A @ B).matrix, A.matrix)
        assert np.allclose(A([1.0, 1.0]), [3, 7])
        assert A.shape == (2, 2)
        assert A.hstack(B).shape == (2, 4)

    def test_equality_and_hash(self):
        assert LinOp([[1.0]]) == LinOp([[1.0]])
        assert len({LinOp([[1.0]]), LinOp([[1.0]]), LinOp([[2.0]])}) == 2

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            LinOp([[np.inf]])


class TestSampledMap:
    def test_requires_finite_value(self):
        with pytest.raises(ValueError):
            SampledMap(X3, np.full((3, 2), np.inf), R2)

    def test_rejects_minus_infinity(self):
        with pytest.raises(ValueError):
            SampledMap(X3, [[0, 0], [-np.inf, 0], [0, 0]], R2)

    def test_dom_and_roundtrip(self):
        F = SampledMap(X3, [[0, 0], [np.inf, 1], [1, 2]], R2)
        assert np.array_equal(F.dom(), [[-1.0], [1.0]])
        G = SampledMap.from_dict(F.to_dict(), R2)
        assert np.array_equal(G.values, F.values) and np.array_equal(G.samples, F.samples)


class TestConjugate:
    def test_zero_map(self):
        F = SampledMap(X3, np.zeros((3, 2)), R2)
        assert fronts_equal(conjugate(F, LinOp.zero(2, 1)), wsup([[0, 0]], R2))

    def test_cancellation(self):
        F = SampledMap.from_function(X3, lambda x: [x[0], x[0]], R2)
        assert fronts_equal(conjugate(F, col(1, 1)), wsup([[0, 0]], R2))

    def test_matches_scalar_conjugate(self):
        X = np.linspace(-2, 2, 41).reshape(-1, 1)
        F = SampledMap(X, np.abs(X), R1)
        for s in (-0.5, 0.3, 1.0):
            assert conjugate_value_scalar(F, s) == pytest.approx(np.max(s * X - np.abs(X)))

    def test_epi_examples(self):
        F = SampledMap(X3, np.zeros((3, 2)), R2)
        Z = LinOp.zero(2, 1)
        assert epi_membership(F, Z, [1, 1])
        assert not epi_membership(F, Z, [-1, -1])

    def test_epi_against_direct_scan(self):
        rng = np.random.default_rng(0)
        for _ in range(50):
            V = rng.integers(-3, 4, size=(5, 2)).astype(float)
            X = np.arange(5.0).reshape(-1, 1)
            F = SampledMap(X, V, R2)
            L = col(*rng.integers(-2, 3, 2))
            y = rng.integers(-4, 5, 2).astype(float)
            direct = not np.any(np.all(V - L(X) + y < 0, axis=1))
            assert epi_membership(F, L, y) == direct

    def test_epi_agrees_with_classification(self):
        rng = np.random.default_rng(1)
        K = PolyhedralCone.from_generators([[1, 0], [1, 1]])
        for _ in range(100):
            X = rng.normal(size=(6, 1))
            F = SampledMap(X, rng.normal(size=(6, 2)), K)
            L = col(*rng.normal(size=2))
            y = rng.normal(size=2) * 2
            on_or_above = classify(conjugate(F, L), y) in (Label.ON, Label.ABOVE)
            assert epi_membership(F, L, y) == on_or_above


class TestIndicatorCompose:
    def test_indicator_of_everything(self):
        F = indicator(np.ones(3, bool), X3, R2)
        assert fronts_equal(conjugate(F, LinOp.zero(2, 1)), wsup([[0, 0]], R2))

    def test_box_indicator(self):
        F = indicator(lambda x: abs(x[0]) <= 0.5, X3, R2)
        assert np.array_equal(F.finite, [False, True, False])

    def test_empty_indicator(self):
        with pytest.raises(ValueError):
            indicator(np.zeros(3, bool), X3, R2)

    def test_compose_identity_and_zero(self):
        G = SampledMap(X3, [[1, 2], [np.inf, 0], [3, -1]], R2)
        assert np.array_equal(compose(LinOp.identity(2), G).values, G.values)
        Z = compose(LinOp.zero(2, 2), G)
        assert np.array_equal(Z.finite, G.finite) and np.all(Z.values[Z.finite] == 0)

    def test_compose_sums_coordinates(self):
        G = SampledMap(X3, [[1, 2], [0, 0], [3, -1]], R2)
        out = compose(LinOp([[1.0, 1.0]]), G, R1)
        assert np.allclose(out.values.ravel(), [3, 0, 2])

    def test_compose_shape_mismatch(self):
        G = SampledMap(X3, np.zeros((3, 2)), R2)
        with pytest.raises(ValueError):
            compose(LinOp.identity(3), G)


class TestOperatorCones:
    def test_positive(self):
        assert is_positive_operator(col(1, 2), R1, R2)
        assert not is_positive_operator(col(1, -1), R1, R2)
        assert is_positive_operator(LinOp.identity(2), R2, R2)

    def test_weakly_positive(self):
        assert is_weakly_positive(col(1, -1), R1, R2)
        assert not is_weakly_positive(col(-1, -1), R1, R2)

    def test_weakly_positive_against_ray_sampling(self):
        rng = np.random.default_rng(2)
        t = np.linspace(0, np.pi / 2, 2001)
        rays = np.column_stack([np.cos(t), np.sin(t)])
        for _ in range(100):
            T = LinOp(rng.integers(-3, 4, size=(2, 2)).astype(float))
            hits = np.any(np.all(T(rays) < -1e-9, axis=1))
            assert is_weakly_positive(T, R2, R2) == (not hits)

    def test_positive_implies_weakly_positive(self):
        rng = np.random.default_rng(3)
        for _ in range(100):
            T = LinOp(rng.integers(-1, 3, size=(2, 2)).astype(float))
            if is_positive_operator(T, R2, R2):
                assert is_weakly_positive(T, R2, R2)

    @pytest.mark.parametrize("v", [(1, 2), (1, -1), (-1, -1), (0, 0), (-1, 2)])
    def test_indicator_conjugate_domain(self, v):
        assert dom_indicator_conjugate_check(R1, R2, col(*v))
