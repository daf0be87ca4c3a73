"""Backend selection for the dominance kernels.

The compiled extension is used when it imports cleanly; setting the
environment variable ``VECDUAL_PURE_PYTHON=1`` forces the numpy fallback.
``BACKEND`` names the active implementation.
"""

import os

from vecdual import _kernels_py

if os.environ.get("VECDUAL_PURE_PYTHON", "") not in ("", "0"):
    _impl = _kernels_py
else:
    try:
        from vecdual import _kernels as _impl
    except ImportError:  # extension not built
        _impl = _kernels_py

BACKEND = "cython" if _impl is not _kernels_py else "python"

nondominated_mask = _impl.nondominated_mask
dominance_flags = _impl.dominance_flags
conjugate_front_2d = _impl.conjugate_front_2d
conjugate_corners_2d = _impl.conjugate_corners_2d
meet_staircases_2d = _impl.meet_staircases_2d
maximal_2d_index = _impl.maximal_2d_index if hasattr(_impl, "maximal_2d_index") else _kernels_py.maximal_2d_index


def maximal_2d(U):
    """Rows of ``U`` not weakly dominated by another row, first coordinate descending."""
    import numpy as np

    U = np.asarray(U, dtype=float).reshape(-1, 2)
    return U[maximal_2d_index(U)]

__all__ = ["BACKEND", "nondominated_mask", "dominance_flags", "conjugate_front_2d", "conjugate_corners_2d",
           "maximal_2d", "maximal_2d_index", "meet_staircases_2d"]
