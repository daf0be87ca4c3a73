"""Pure numpy implementations of the dominance kernels.

Every kernel works in *normal coordinates*: a point ``y`` is represented by
``u = N @ y`` where the rows of ``N`` are the unit halfspace normals of the
ordering cone.  In those coordinates ``q - p`` lies in the interior of the
cone exactly when every coordinate of ``u_q - u_p`` exceeds ``tol``.

The compiled module ``vecdual._kernels`` exposes the same functions; this
file is the fallback used when the extension is unavailable.
"""

import numpy as np

__all__ = ["nondominated_mask", "dominance_flags", "conjugate_front_2d", "conjugate_corners_2d",
           "maximal_2d", "maximal_2d_index", "meet_staircases_2d"]

_CHUNK = 1 << 22  # max probe*generator pairs per broadcast block


def _nondominated_mask_2d(U, tol):
    n = U.shape[0]
    order = np.lexsort((U[:, 1], U[:, 0]))
    s1 = U[order, 0]
    s2 = U[order, 1]
    # suffix maximum of the second coordinate, padded with -inf
    suffix = np.empty(n + 1)
    suffix[n] = -np.inf
    suffix[:n] = np.maximum.accumulate(s2[::-1])[::-1]
    # first index whose first coordinate strictly exceeds s1 + tol
    idx = np.searchsorted(s1, s1 + tol, side="right")
    dominated = suffix[idx] > s2 + tol
    mask = np.empty(n, dtype=bool)
    mask[order] = ~dominated
    return mask


def nondominated_mask(U, tol):
    """Return a boolean mask of rows of ``U`` not strictly dominated by another row."""
    U = np.ascontiguousarray(U, dtype=float)
    n, J = U.shape
    if n == 0:
        return np.zeros(0, dtype=bool)
    if J == 1:
        return U[:, 0] >= U[:, 0].max() - tol
    if J == 2:
        return _nondominated_mask_2d(U, tol)
    # General case: sort by coordinate sum so that dominators come first,
    # then test candidates block-wise against the current survivors.
    order = np.argsort(-U.sum(axis=1), kind="stable")
    mask = np.ones(n, dtype=bool)
    block = max(1, _CHUNK // max(n * J, 1))
    for start in range(0, n, block):
        idx = order[start:start + block]
        diff = U[None, :, :] - U[idx][:, None, :]
        strict = np.all(diff > tol, axis=2).any(axis=1)
        mask[idx[strict]] = False
    return mask


def _dominance_flags_2d(P, M, tol):
    order = np.argsort(M[:, 0], kind="stable")
    m1 = M[order, 0]
    m2 = M[order, 1]
    k = len(m1)
    suffix = np.empty(k + 1)
    suffix[k] = -np.inf
    suffix[:k] = np.maximum.accumulate(m2[::-1])[::-1]
    i_strict = np.searchsorted(m1, P[:, 0] + tol, side="right")
    i_closed = np.searchsorted(m1, P[:, 0] - tol, side="left")
    strict = suffix[i_strict] > P[:, 1] + tol
    closed = suffix[i_closed] >= P[:, 1] - tol
    return strict, closed


def dominance_flags(P, M, tol):
    """For each probe row ``p`` of ``P`` report two flags against generators ``M``.

    ``strict[i]``  : some generator m has ``m - p`` in the cone interior.
    ``closed[i]``  : some generator m has ``m - p`` in the closed cone.
    """
    P = np.ascontiguousarray(P, dtype=float)
    M = np.ascontiguousarray(M, dtype=float)
    n = P.shape[0]
    strict = np.zeros(n, dtype=bool)
    closed = np.zeros(n, dtype=bool)
    if n == 0 or M.shape[0] == 0:
        return strict, closed
    k, J = M.shape
    if J == 2:
        return _dominance_flags_2d(P, M, tol)
    block = max(1, _CHUNK // max(k * J, 1))
    for start in range(0, n, block):
        diff = M[None, :, :] - P[start:start + block, None, :]
        strict[start:start + block] = np.all(diff > tol, axis=2).any(axis=1)
        closed[start:start + block] = np.all(diff >= -tol, axis=2).any(axis=1)
    return strict, closed


def maximal_2d_index(U):
    """Indices of rows of ``U`` not weakly dominated by another row (exact, no tolerance).

    Dropping a point ``p <= q`` changes neither ``U - K`` nor ``U - int K``, so
    the weak supremum is unchanged.  Indices are ordered by decreasing first
    coordinate, giving a strict staircase.
    """
    if len(U) == 0:
        return np.zeros(0, dtype=np.intp)
    order = np.lexsort((np.arange(len(U)), -U[:, 1], -U[:, 0]))
    v2 = U[order, 1]
    run = np.maximum.accumulate(v2)
    keep = np.ones(len(U), dtype=bool)
    keep[1:] = v2[1:] > run[:-1]
    return order[keep]


def maximal_2d(U):
    """The maximal rows of ``U`` (see :func:`maximal_2d_index`)."""
    U = np.asarray(U, dtype=float).reshape(-1, 2)
    return U[maximal_2d_index(U)]


def conjugate_front_2d(lx, tz, phi, finite, tol):
    """Staircase corners of ``{lx[i] + tz[j] - phi[i, j] : finite[i, j]}``.

    All arrays are in 2-D normal coordinates; ``phi`` has shape ``(nx, nz, 2)``.
    Returns the maximal points, whose weak supremum equals that of the full
    value set.
    """
    vals = lx[:, None, :] + tz[None, :, :] - phi
    return maximal_2d(vals[finite])


def conjugate_corners_2d(lx, tz, indptr, cols, ph, hint=None, ph_range=None):
    """Row-compressed variant: returns ``(corners, cell indices)``; ``hint`` and
    ``ph_range`` only speed up the compiled kernel and are ignored here."""
    rows = np.repeat(np.arange(len(indptr) - 1), np.diff(indptr))
    pts = lx[rows] + tz[cols] - ph
    sel = maximal_2d_index(pts)
    return pts[sel], sel


def meet_staircases_2d(A, B):
    """Corners of ``(A + R^2_+) ∩ (B + R^2_+)`` for strict staircases (first coordinate
    ascending, second strictly descending)."""
    if len(A) == 0 or len(B) == 0:
        return np.zeros((0, 2))
    lo = max(A[0, 0], B[0, 0])
    bp = np.union1d(A[:, 0], B[:, 0])
    bp = bp[bp >= lo]
    fa = A[np.searchsorted(A[:, 0], bp, side="right") - 1, 1]
    fb = B[np.searchsorted(B[:, 0], bp, side="right") - 1, 1]
    h = np.maximum(fa, fb)
    keep = np.ones(len(h), dtype=bool)
    keep[1:] = h[1:] < np.minimum.accumulate(h)[:-1]
    return np.column_stack([bp[keep], h[keep]])
