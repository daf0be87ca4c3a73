import importlib
import os
import subprocess
import sys

import numpy as np
import pytest

from vecdual import _kernels_py, kernels
from vecdual.lp import LPStatus, lp_solve

scipy_optimize = pytest.importorskip("scipy.optimize")


class TestLP:
    def test_simple_minimum(self):
        res = lp_solve([1.0], A_ub=[[-1.0]], b_ub=[-1.0])
        assert res.status is LPStatus.OPTIMAL
        assert res.value == pytest.approx(1.0)
        assert res.x == pytest.approx([1.0])

    def test_infeasible(self):
        res = lp_solve([1.0], A_ub=[[1.0], [-1.0]], b_ub=[0.0, -1.0])
        assert res.status is LPStatus.INFEASIBLE

    def test_unbounded(self):
        res = lp_solve([-1.0], A_ub=[[-1.0]], b_ub=[-1.0])
        assert res.status is LPStatus.UNBOUNDED

    def test_free_and_bounded_variables(self):
        res = lp_solve([1.0, 1.0], A_eq=[[1.0, -1.0]], b_eq=[3.0], bounds=[(None, None), (-2.0, 5.0)])
        assert res.value == pytest.approx(-1.0)

    def test_dual_sign_convention(self):
        # min x s.t. -x <= -b: the value grows with b, d value / d b_ub = -1
        res = lp_solve([1.0], A_ub=[[-1.0]], b_ub=[-2.0])
        assert res.duals_ub == pytest.approx([-1.0])

    def test_random_against_reference_solver(self):
        rng = np.random.default_rng(0)
        for _ in range(60):
            n, m = rng.integers(2, 6), rng.integers(1, 6)
            A = rng.integers(-3, 4, size=(m, n)).astype(float)
            b = rng.integers(-2, 6, size=m).astype(float)
            c = rng.integers(-3, 4, size=n).astype(float)
            bounds = [(-4.0, 4.0)] * n
            ours = lp_solve(c, A_ub=A, b_ub=b, bounds=bounds)
            ref = scipy_optimize.linprog(c, A_ub=A, b_ub=b, bounds=bounds, method="highs")
            if ref.status == 2:
                assert ours.status is LPStatus.INFEASIBLE
            else:
                assert ours.status is LPStatus.OPTIMAL
                assert ours.value == pytest.approx(ref.fun, abs=1e-7)


def _cases(rng):
    A = np.column_stack([np.sort(rng.normal(size=50)), -np.cumsum(rng.random(50))])
    B = np.column_stack([np.sort(rng.normal(size=40)), -np.cumsum(rng.random(40))])
    nx, nz = 30, 20
    return [
        ("nondominated_mask", (rng.normal(size=(400, 3)), 1e-9)),
        ("nondominated_mask", (np.round(rng.normal(size=(2000, 2)), 1), 1e-9)),
        ("dominance_flags", (rng.normal(size=(300, 2)), rng.normal(size=(50, 2)), 1e-9)),
        ("dominance_flags", (rng.normal(size=(300, 3)), rng.normal(size=(50, 3)), 1e-9)),
        ("maximal_2d_index", (np.round(rng.normal(size=(3000, 2)), 1),)),
        ("conjugate_corners_2d", (rng.normal(size=(nx, 2)), rng.normal(size=(nz, 2)),
                                  np.arange(0, nx * nz + 1, nz), np.tile(np.arange(nz, dtype=np.int32), nx),
                                  rng.normal(size=(nx * nz, 2)))),
        ("meet_staircases_2d", (A, B)),
    ]


class TestKernels:
    def test_backend_name(self):
        assert kernels.BACKEND in ("cython", "python")

    def test_dominance_flags_oracle(self):
        rng = np.random.default_rng(1)
        P = np.round(rng.normal(size=(200, 3)), 1)
        M = np.round(rng.normal(size=(30, 3)), 1)
        strict, closed = kernels.dominance_flags(P, M, 1e-9)
        D = M[None, :, :] - P[:, None, :]
        assert np.array_equal(strict, np.all(D > 1e-9, axis=2).any(axis=1))
        assert np.array_equal(closed, np.all(D >= -1e-9, axis=2).any(axis=1))

    def test_nondominated_oracle(self):
        rng = np.random.default_rng(2)
        U = np.round(rng.normal(size=(300, 2)), 1)
        D = U[None, :, :] - U[:, None, :]
        dominated = np.all(D > 1e-9, axis=2).any(axis=1)
        assert np.array_equal(kernels.nondominated_mask(U, 1e-9), ~dominated)

    def test_maximal_index_oracle(self):
        rng = np.random.default_rng(3)
        U = np.round(rng.normal(size=(300, 2)), 1)
        got = {tuple(p) for p in kernels.maximal_2d(U)}
        want = set()
        for i, p in enumerate(U):
            ge = np.all(U >= p, axis=1) & np.any(U > p, axis=1)
            if not ge.any() and tuple(p) not in want:
                want.add(tuple(p))
        assert got == want

    def test_backends_agree(self):
        try:
            compiled = importlib.import_module("vecdual._kernels")
        except ImportError:
            pytest.skip("compiled extension not built")
        rng = np.random.default_rng(4)
        for name, args in _cases(rng):
            a = getattr(_kernels_py, name)(*args)
            b = getattr(compiled, name)(*args)
            if name == "conjugate_corners_2d":
                a, b = a[0], b[0]
            if isinstance(a, tuple):
                for x, y in zip(a, b):
                    assert np.array_equal(x, y), name
            else:
                assert np.array_equal(np.asarray(a), np.asarray(b)), name

    def test_pure_python_switch(self):
        env = dict(os.environ, VECDUAL_PURE_PYTHON="1")
        out = subprocess.run([sys.executable, "-c", "from vecdual import kernels; print(kernels.BACKEND)"],
                             env=env, capture_output=True, text=True, check=True)
        assert out.stdout.strip() == "python"
