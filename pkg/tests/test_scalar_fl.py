import numpy as np
import pytest
from instances import random_scalar, scalar_probes

from vecdual.cone_order import PolyhedralCone
from vecdual.scalar_fl import (DUAL_VARIANTS, PLFunction, ScalarInstance, build_scalar_dual,
                               scalar_conjugate, scalar_crosscheck, scalar_primal, slater_point,
                               verify_A2, vertex_samples)

scipy_optimize = pytest.importorskip("scipy.optimize")

R1 = PolyhedralCone.orthant(1)


def segment():
    """``f = 0`` on ``C = [0, 1]`` with ``x - 0.5 <= 0``: the feasible set is ``[0, 0.5]``."""
    return ScalarInstance(PLFunction.zero(1), [[1.0], [-1.0]], [1.0, 0.0], [[1.0]], [-0.5], R1)


def reference_primal(inst):
    """``min t`` over the epigraph, solved by an independent LP code."""
    g = inst.objective()
    A, b = inst.constraint_rows()
    n, p = inst.n, len(g.intercepts)
    A_ub = np.vstack([np.hstack([g.slopes, -np.ones((p, 1))]), np.hstack([A, np.zeros((len(A), 1))])])
    b_ub = np.concatenate([-g.intercepts, b])
    c = np.r_[np.zeros(n), 1.0]
    res = scipy_optimize.linprog(c, A_ub=A_ub, b_ub=b_ub, bounds=[(None, None)] * (n + 1), method="highs")
    return res.fun


class TestPLFunction:
    def test_evaluation_and_sum(self):
        f = PLFunction.from_pieces([[1, 0], [-1, 0]])
        g = PLFunction.from_pieces([[0.5, 1.0]])
        x = np.linspace(-3, 3, 13).reshape(-1, 1)
        assert np.allclose(f(x), np.abs(x.ravel()))
        assert np.allclose((f + g)(x), np.abs(x.ravel()) + 0.5 * x.ravel() + 1)

    def test_compose_affine(self):
        f = PLFunction.from_pieces([[1, 0], [-1, 0]])
        h = f.compose_affine([[2.0]], [1.0])
        assert h([1.5]) == pytest.approx(4.0)

    def test_rejects_empty(self):
        with pytest.raises(ValueError):
            PLFunction(np.zeros((0, 1)), [])


class TestConjugate:
    def test_absolute_value(self):
        f = PLFunction.from_pieces([[1, 0], [-1, 0]])
        assert scalar_conjugate(f, [0.5]) == 0.0
        assert scalar_conjugate(f, [2.0]) == np.inf

    def test_support_function(self):
        assert scalar_conjugate(PLFunction.zero(1), [3.0], ([[1.0], [-1.0]], [1.0, 0.0])) == pytest.approx(3.0)

    def test_random_against_dense_grid(self):
        # breakpoints of integer pieces have denominators <= 6, so they all lie on this grid
        rng = np.random.default_rng(0)
        x = np.linspace(-2, 2, 24_001)
        for _ in range(20):
            a, b = rng.integers(-3, 4, 3).astype(float), rng.integers(-3, 4, 3).astype(float)
            f = PLFunction(a.reshape(-1, 1), b)
            s = float(rng.uniform(-4, 4))
            grid_sup = np.max(s * x - np.max(np.outer(x, a) + b, axis=1))
            val = scalar_conjugate(f, [s], ([[1.0], [-1.0]], [2.0, 2.0]))
            assert val == pytest.approx(grid_sup, abs=1e-6)


class TestInstance:
    def test_infeasible_rejected(self):
        with pytest.raises(ValueError):
            ScalarInstance(PLFunction.zero(1), [[1.0], [-1.0]], [1.0, 0.0], [[-1.0]], [2.0], R1)

    def test_roundtrip(self):
        inst = random_scalar(0, kappa=True)
        back = ScalarInstance.from_dict(inst.to_dict())
        assert scalar_primal(back).value == pytest.approx(scalar_primal(inst).value)

    def test_slater_detection(self):
        assert slater_point(random_scalar(1)) is not None
        assert slater_point(random_scalar(1, slater=False)) is None

    @pytest.mark.parametrize("seed", range(5))
    def test_primal_against_reference(self, seed):
        for kw in ({}, {"kappa": True}, {"slater": False}):
            inst = random_scalar(seed, **kw)
            assert scalar_primal(inst).value == pytest.approx(reference_primal(inst), abs=1e-7)


class TestDuals:
    @pytest.mark.parametrize("seed", range(5))
    def test_strong_duality_with_slater(self, seed):
        inst = random_scalar(seed, kappa=seed % 2 == 1)
        pv = scalar_primal(inst).value
        for v in DUAL_VARIANTS:
            assert build_scalar_dual(inst, v)[0] == pytest.approx(pv, abs=1e-6), v

    def test_linear_without_constraints(self):
        f = PLFunction.from_pieces([[[0.0, 0.0], 2.5]])
        inst = ScalarInstance(f)
        pv = scalar_primal(inst).value
        assert pv == pytest.approx(2.5)
        value, mult = build_scalar_dual(inst, "CCD1")
        assert value == pytest.approx(pv)
        assert mult["lambda2"] == []

    def test_weak_duality_without_slater(self):
        for seed in range(5):
            inst = random_scalar(seed, slater=False)
            pv = scalar_primal(inst).value
            vals = {v: build_scalar_dual(inst, v)[0] for v in DUAL_VARIANTS}
            for v, x in vals.items():
                assert x <= pv + 1e-8, v
            for v in ("CCD1", "CCD2", "CCD3"):
                assert vals[v + "l"] <= vals[v] + 1e-8

    def test_unknown_variant(self):
        with pytest.raises(ValueError):
            build_scalar_dual(segment(), "CCD9")


class TestA2:
    def test_segment_example(self):
        rep = verify_A2(segment(), [([1.0], 0.5), ([1.0], 0.49)])
        assert rep.probes[0]["lhs_value"] == pytest.approx(0.5)
        assert [p["lhs"] for p in rep.probes] == [True, False]
        assert rep.all_agree

    def test_no_constraint_reduces_to_conjugate(self):
        f = PLFunction.from_pieces([[1, 0], [-1, 0]])
        inst = ScalarInstance(f)
        rep = verify_A2(inst, [([0.5], 0.0), ([0.5], -0.1), ([2.0], 100.0)])
        assert [p["lhs"] for p in rep.probes] == [True, False, False]
        assert rep.all_agree

    @pytest.mark.parametrize("seed", range(5))
    def test_random_agreement(self, seed):
        rep = verify_A2(random_scalar(seed), scalar_probes(seed))
        assert rep.slater and rep.all_agree and rep.rhs_not_lhs == 0


class TestCrosscheck:
    def test_vertex_samples_are_feasible(self):
        inst = random_scalar(2)
        for x in vertex_samples(inst):
            assert inst.feasible(x)

    @pytest.mark.parametrize("seed", range(3))
    def test_vector_path_agrees(self, seed):
        inst = random_scalar(seed, kappa=True)
        ok, details = scalar_crosscheck(inst, [p[0] for p in scalar_probes(seed)], return_details=True)
        assert ok
        assert all(abs(d["vector"] - d["lp"]) <= 1e-6 for d in details)
