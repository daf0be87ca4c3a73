"""Compare the compiled and numpy dominance kernels on representative inputs.

Usage::

    python benchmarks/bench_kernels.py [--repeat N] [--json PATH]

Every case is run on both backends; outputs are checked for equality before
timings (best of ``--repeat``) are reported.  The last case times the
end-to-end dual assembly of the worked two-objective example on a reduced
grid with each backend selected through ``VECDUAL_PURE_PYTHON``.
"""

import argparse
import json
import os
import subprocess
import sys
import time

import numpy as np

from vecdual import _kernels_py as py

try:
    from vecdual import _kernels as cy
except ImportError:  # extension not built
    cy = None


def _best(fn, repeat):
    best = np.inf
    out = None
    for _ in range(repeat):
        t = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t)
    return best, out


def _same(a, b):
    if isinstance(a, tuple):
        return all(_same(x, y) for x, y in zip(a, b))
    return np.array_equal(np.asarray(a), np.asarray(b))


def _cases(rng):
    U3 = rng.normal(size=(3000, 3))
    U2 = rng.normal(size=(200_000, 2))
    P2 = rng.normal(size=(50_000, 2))
    M2 = rng.normal(size=(2_000, 2))
    P3 = rng.normal(size=(5_000, 3))
    M3 = rng.normal(size=(300, 3))
    # row-compressed conjugate cells (600 x-rows with 400 z-columns each)
    nx, nz = 600, 400
    lx = rng.normal(size=(nx, 2))
    tz = rng.normal(size=(nz, 2))
    indptr = np.arange(0, nx * nz + 1, nz)
    cols = np.tile(np.arange(nz, dtype=np.int32), nx)
    ph = rng.normal(size=(nx * nz, 2))
    stA = np.sort(rng.normal(size=2000))
    A = np.column_stack([stA, -np.cumsum(rng.random(2000))])
    B = np.column_stack([np.sort(rng.normal(size=1500)), -np.cumsum(rng.random(1500))])
    A = A[np.unique(A[:, 0], return_index=True)[1]]
    B = B[np.unique(B[:, 0], return_index=True)[1]]
    return [
        ("nondominated_mask R^3 (3k)", "nondominated_mask", (U3, 1e-9)),
        ("nondominated_mask R^2 (200k)", "nondominated_mask", (U2, 1e-9)),
        ("dominance_flags R^2 (50k x 2k)", "dominance_flags", (P2, M2, 1e-9)),
        ("dominance_flags R^3 (5k x 300)", "dominance_flags", (P3, M3, 1e-9)),
        ("maximal_2d_index (200k)", "maximal_2d_index", (U2,)),
        ("conjugate_corners_2d (240k cells)", "conjugate_corners_2d", (lx, tz, indptr, cols, ph)),
        ("meet_staircases_2d (2k + 1.5k)", "meet_staircases_2d", (A, B)),
    ]


def _p1_time(pure):
    code = ("import time;from vecdual.perturbation import example_p1;t=time.perf_counter();"
            "example_p1(x_step=4e-3, z_step=0.1, op_step=0.2);print(time.perf_counter()-t)")
    env = dict(os.environ, VECDUAL_PURE_PYTHON="1" if pure else "0")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    return float(out.stdout.strip().splitlines()[-1])


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--json", default=None, help="write results to this file")
    ap.add_argument("--skip-end-to-end", action="store_true")
    args = ap.parse_args(argv)
    if cy is None:
        print("compiled extension not available; build with `pip install -e . --no-build-isolation`")
        return 1
    rng = np.random.default_rng(0)
    rows = []
    print(f"{'case':38s} {'python [ms]':>12s} {'cython [ms]':>12s} {'speedup':>8s}  equal")
    for label, name, fargs in _cases(rng):
        tp, op = _best(lambda: getattr(py, name)(*fargs), args.repeat)
        tc, oc = _best(lambda: getattr(cy, name)(*fargs), args.repeat)
        if name == "conjugate_corners_2d":
            eq = _same(op[0], oc[0])  # cell indices may differ in ordering convention
        else:
            eq = _same(op, oc)
        rows.append({"case": label, "python_ms": tp * 1e3, "cython_ms": tc * 1e3,
                     "speedup": tp / tc, "equal": bool(eq)})
        print(f"{label:38s} {tp * 1e3:12.2f} {tc * 1e3:12.2f} {tp / tc:8.1f}  {eq}")
    if not args.skip_end_to_end:
        tp, tc = _p1_time(True), _p1_time(False)
        rows.append({"case": "worked example, reduced grid (end to end)", "python_ms": tp * 1e3,
                     "cython_ms": tc * 1e3, "speedup": tp / tc, "equal": True})
        print(f"{'worked example, reduced grid':38s} {tp * 1e3:12.0f} {tc * 1e3:12.0f} {tp / tc:8.1f}")
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            json.dump(rows, fh, indent=2)
    return 0 if all(r["equal"] for r in rows) else 2


if __name__ == "__main__":
    sys.exit(main())
