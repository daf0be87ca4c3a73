import numpy as np
import pytest
from instances import random_perturbation

from vecdual.cone_order import PolyhedralCone
from vecdual.farkas import (CertificateError, FarkasInstance, beta_holds, check_farkas_equivalence,
                            construct_certificate, convexity_check, search_certificate,
                            verify_alpha, verify_M_representation)
from vecdual.linop import LinOp
from vecdual.perturbation import PerturbationProblem, build_cone_constrained, operator_grid, p1_problem

K2 = PolyhedralCone.orthant(2)
S1 = PolyhedralCone.orthant(1)
X = np.linspace(-2, 2, 9)
Z = np.linspace(-2, 2, 9)


def zero_map():
    return PerturbationProblem.from_function(X, Z, lambda x, z: [0.0, 0.0], K2, S1,
                                             operator_grid=operator_grid((2, 1), [-1, 0, 1]))


def z_independent():
    return PerturbationProblem.from_function(X, Z, lambda x, z: [x[0] ** 2, -x[0]], K2, S1,
                                             operator_grid=operator_grid((2, 1), [-1, 0, 1]))


def nonconvex():
    """Two isolated feasible points whose midpoint region is certified by no operator."""
    Xn = np.array([-1.0, 1.0])
    Zn = np.array([-1.0, 0.0, 1.0])
    V = np.full((2, 3, 2), np.inf)
    V[0, 1] = [0.0, 2.0]
    V[1, 1] = [2.0, 0.0]
    V[0, 0] = [-5.0, -5.0]  # a cheap perturbation that undercuts any y in between
    V[1, 2] = [-5.0, -5.0]
    return PerturbationProblem(Xn, Zn, V, K2, S1, operator_grid((2, 1), [-1, 0, 1]))


class TestAlpha:
    def test_zero_map(self):
        P = zero_map()
        assert verify_alpha(FarkasInstance(P, None, [0, 0]))
        assert not verify_alpha(FarkasInstance(P, None, [-1, -1]))

    def test_example_against_curve_scan(self):
        P = p1_problem(x_step=0.01, z_step=0.5, op_step=1.0)
        y = np.array([0.0, 2.0])
        t = P.x_samples[:, 0]
        feas = 2 * t <= 0
        curve = np.column_stack([t, t ** 2 + 2 * t])[feas]
        direct = not np.any(np.all(curve + y < 0, axis=1))
        assert verify_alpha(FarkasInstance(P, None, y)) == direct

    def test_y_dimension_checked(self):
        with pytest.raises(ValueError):
            FarkasInstance(zero_map(), None, [0, 0, 0])


class TestSearch:
    def test_z_independent_zero_operator(self):
        P = z_independent()
        inst = FarkasInstance(P, None, [1, 1])
        assert verify_alpha(inst)
        T = search_certificate(inst, [LinOp.zero(2, 1)])
        assert T == LinOp.zero(2, 1)

    def test_lexicographic_first(self):
        P = z_independent()
        T = search_certificate(FarkasInstance(P, None, [1, 1]))
        ordered = sorted(P.operator_grid, key=lambda A: tuple(np.ravel(A.matrix)))
        first = next(A for A in ordered if beta_holds(P, None, A, [1, 1]))
        assert T == first

    def test_hostile_grid_finds_nothing(self):
        P = PerturbationProblem.from_function(X, Z, lambda x, z: [x[0] ** 2 + z[0]] * 2, K2, S1)
        inst = FarkasInstance(P, None, [1, 1])
        assert verify_alpha(inst)
        hostile = [LinOp([[5.0], [5.0]]), LinOp([[-5.0], [-5.0]])]
        assert search_certificate(inst, hostile) is None
        assert construct_certificate(inst).verified

    def test_soundness_random(self):
        for seed in range(10):
            P = random_perturbation(seed)
            for y in np.random.default_rng(seed).integers(-4, 5, size=(10, 2)):
                for T in P.operator_grid:
                    if beta_holds(P, None, T, y):
                        assert verify_alpha(FarkasInstance(P, None, y))


class TestConstruction:
    def test_scalarizable_instance(self):
        P = PerturbationProblem.from_function(X, Z, lambda x, z: [x[0] ** 2 + z[0]] * 2, K2, S1)
        c = construct_certificate(FarkasInstance(P, None, [1, 1]))
        assert c.verified and c.convexity_ok
        assert np.linalg.matrix_rank(c.T_bar.matrix) <= 1
        assert float(c.y_star @ c.k0) == pytest.approx(-1.0, abs=1e-9)

    def test_z_independent_gives_zero(self):
        c = construct_certificate(FarkasInstance(z_independent(), None, [0, 0]))
        assert c.verified
        assert np.allclose(c.z_star, 0) and np.allclose(c.T_bar.matrix, 0)

    def test_z_star_in_negative_dual_cone(self):
        F = np.column_stack([np.abs(X - 1) * 2, np.maximum(-X, 0.5 * X)])
        P = build_cone_constrained(X, Z, F, np.abs(X) - 1, [[1.0], [0.5]], K2, S1)
        n = 0
        for a in np.linspace(-5, 5, 6):
            for b in np.linspace(-5, 5, 6):
                inst = FarkasInstance(P, None, [a, b])
                if not verify_alpha(inst):
                    continue
                c = construct_certificate(inst, check_convexity=False)
                assert c.verified and c.positive
                assert np.all(S1.generators @ c.z_star <= 1e-9)
                n += 1
        assert n > 0

    def test_requires_alpha(self):
        with pytest.raises(ValueError):
            construct_certificate(FarkasInstance(zero_map(), None, [-1, -1]))

    def test_nonconvex_not_separable(self):
        P = nonconvex()
        inst = FarkasInstance(P, None, [-1.0, -1.0])
        assert verify_alpha(inst)
        assert search_certificate(inst) is None
        with pytest.raises(CertificateError):
            construct_certificate(inst, check_convexity=False)

    def test_convexity_check(self):
        P = PerturbationProblem.from_function(X, Z, lambda x, z: [x[0] ** 2 + z[0]] * 2, K2, S1)
        tested, bad = convexity_check(P)
        assert tested > 0 and bad == 0
        Q = PerturbationProblem.from_function(X, Z, lambda x, z: [-x[0] ** 2, z[0]], K2, S1)
        assert convexity_check(Q)[1] > 0


class TestRepresentation:
    def test_z_independent_exact(self):
        P = z_independent()
        ys = [np.array([a, b]) for a in (-3.0, 0.0, 3.0) for b in (-3.0, 0.0, 3.0)]
        rep = verify_M_representation(P, [None], ys)
        assert rep.holds_on_probes and rep.covered_by_certificate == 0
        fr = check_farkas_equivalence(P, [None], ys)
        assert fr.rate == 1.0 and fr.soundness_violations == 0

    def test_nonconvex_flagged(self):
        P = nonconvex()
        ys = [np.array([a, b]) for a in (-2.0, -1.0, 1.0, 3.0) for b in (-2.0, -1.0, 1.0, 3.0)]
        rep = verify_M_representation(P, [None], ys)
        assert rep.superset_violations == 0
        assert rep.uncovered > 0 and not rep.holds_on_probes
        fr = check_farkas_equivalence(P, [None], ys)
        assert fr.rate < 1.0 and fr.soundness_violations == 0
        assert any(v["alpha"] and not v["certified"] for v in fr.verdicts)

    def test_meta_equivalence(self):
        for P in (z_independent(), nonconvex()):
            ys = [np.array([a, b]) for a in (-2.0, 0.0, 3.0) for b in (-2.0, 0.0, 3.0)]
            rep = verify_M_representation(P, [None], ys)
            fr = check_farkas_equivalence(P, [None], ys)
            assert rep.holds_on_probes == (fr.rate == 1.0)

    def test_report_serializes(self):
        rep = verify_M_representation(z_independent(), [None], [np.array([1.0, 1.0])])
        d = rep.to_dict()
        assert d["n_probes"] == 1 and d["holds_on_probes"] is True
