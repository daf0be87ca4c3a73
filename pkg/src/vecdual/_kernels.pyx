# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled dominance kernels (same API as ``vecdual._kernels_py``)."""

import numpy as np
cimport numpy as cnp
from libc.math cimport INFINITY, floor

cnp.import_array()

from vecdual._kernels_py import _nondominated_mask_2d, _dominance_flags_2d


def nondominated_mask(U, double tol):
    """Boolean mask of rows of ``U`` not strictly dominated by another row."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A = np.ascontiguousarray(U, dtype=np.float64)
    cdef Py_ssize_t n = A.shape[0], J = A.shape[1]
    cdef Py_ssize_t i, j, k, a, b
    cdef bint dom
    if n == 0:
        return np.zeros(0, dtype=bool)
    if J == 2:
        return _nondominated_mask_2d(A, tol)
    order = np.argsort(-A.sum(axis=1), kind="stable").astype(np.intp)
    cdef Py_ssize_t[:] o = order
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] mask = np.ones(n, dtype=np.uint8)
    # survivors list (indices into A); dominators of a point have larger sums,
    # hence appear earlier in ``order``; checking survivors suffices because
    # strict dominance is transitive (up to the tolerance slack).
    cdef cnp.ndarray[cnp.intp_t, ndim=1] surv = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t ns = 0
    for a in range(n):
        i = o[a]
        dom = False
        for b in range(ns):
            j = surv[b]
            for k in range(J):
                if A[j, k] - A[i, k] <= tol:
                    break
            else:
                dom = True
                break
        if dom:
            mask[i] = 0
        else:
            surv[ns] = i
            ns += 1
    # second pass: the first pass only compared against earlier survivors;
    # confirm against all points to keep exact semantics.
    for a in range(ns):
        i = surv[a]
        for j in range(n):
            if j == i:
                continue
            for k in range(J):
                if A[j, k] - A[i, k] <= tol:
                    break
            else:
                mask[i] = 0
                break
    return mask.astype(bool)


def dominance_flags(P, M, double tol):
    """Per-probe flags (strict, closed) against a generator set, with early exit."""
    cdef cnp.ndarray[cnp.float64_t, ndim=2] A = np.ascontiguousarray(P, dtype=np.float64)
    cdef cnp.ndarray[cnp.float64_t, ndim=2] G = np.ascontiguousarray(M, dtype=np.float64)
    cdef Py_ssize_t n = A.shape[0], m = G.shape[0], J = A.shape[1]
    if J == 2 and m > 0 and n > 0:
        return _dominance_flags_2d(A, G, tol)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] strict = np.zeros(n, dtype=np.uint8)
    cdef cnp.ndarray[cnp.uint8_t, ndim=1] closed = np.zeros(n, dtype=np.uint8)
    cdef Py_ssize_t i, j, k
    cdef bint s_ok, c_ok
    cdef double d
    for i in range(n):
        for j in range(m):
            s_ok = True
            c_ok = True
            for k in range(J):
                d = G[j, k] - A[i, k]
                if d <= tol:
                    s_ok = False
                    if d < -tol:
                        c_ok = False
                        break
            if c_ok:
                closed[i] = 1
            if s_ok:
                strict[i] = 1
                break
    return strict.astype(bool), closed.astype(bool)


cdef inline Py_ssize_t _bucket(double v, double lo, double inv, Py_ssize_t nb) nogil:
    cdef double t = (v - lo) * inv
    if t <= 0.0:
        return 0
    if t >= nb:
        return nb - 1
    return <Py_ssize_t> t


def maximal_2d_index(U):
    """Indices of rows of ``U`` not weakly dominated by another row (exact).

    Same result as the numpy version: first coordinate descending, ties
    resolved towards the larger second coordinate, then the lower index.
    """
    cdef double[:, ::1] A = np.ascontiguousarray(U, dtype=np.float64).reshape(-1, 2)
    cdef Py_ssize_t n = A.shape[0], a, g, best, j
    if n == 0:
        return np.zeros(0, dtype=np.intp)
    order_arr = np.argsort(-np.asarray(A[:, 0])).astype(np.intp)
    cdef Py_ssize_t[::1] order = order_arr
    out = np.empty(n, dtype=np.intp)
    cdef Py_ssize_t[::1] o = out
    cdef Py_ssize_t cnt = 0
    cdef double run = -INFINITY, key
    a = 0
    while a < n:
        key = A[order[a], 0]
        best = order[a]
        g = a + 1
        while g < n and A[order[g], 0] == key:
            j = order[g]
            if A[j, 1] > A[best, 1] or (A[j, 1] == A[best, 1] and j < best):
                best = j
            g += 1
        if A[best, 1] > run:
            o[cnt] = best
            cnt += 1
            run = A[best, 1]
        a = g
    return out[:cnt]


def conjugate_corners_2d(lx, tz, indptr, cols, ph, hint=None, ph_range=None):
    """Staircase corners of ``{lx[i] + tz[cols[k]] - ph[k] : indptr[i] <= k < indptr[i+1]}``.

    Cells are stored row-compressed (CSR).  Returns ``(corners, cells)``:
    the maximal points (first coordinate descending) and their cell indices.

    Bucket maxima of the second coordinate over a partition of the first
    are seeded from ``hint`` (cell indices, e.g. the corners of a nearby
    operator) plus a strided subsample of the cells.  A streaming pass then
    drops every cell beaten by a strictly larger second coordinate in a
    later bucket (such a cell is weakly dominated by a real cell); the
    survivors are reduced exactly.  ``ph_range`` optionally supplies the
    precomputed ``(min, max)`` of ``ph[:, 0]``.
    """
    cdef double[:, ::1] LX = np.ascontiguousarray(lx, dtype=np.float64)
    cdef double[:, ::1] TZ = np.ascontiguousarray(tz, dtype=np.float64)
    cdef const long[::1] IP = np.ascontiguousarray(indptr, dtype=np.int64)
    cdef const int[::1] Cc = np.ascontiguousarray(cols, dtype=np.int32)
    cdef const double[:, ::1] PH = np.ascontiguousarray(ph, dtype=np.float64)
    cdef Py_ssize_t nx = IP.shape[0] - 1, n = PH.shape[0], i, k, b, nb = 1 << 16, keep = 0, cap
    cdef Py_ssize_t stride = 16
    cdef double v1, v2, lo, hi, inv, a0, a1
    if n == 0:
        return np.zeros((0, 2)), np.zeros(0, dtype=np.int64)
    if ph_range is None:
        ph_range = (float(np.asarray(ph)[:, 0].min()), float(np.asarray(ph)[:, 0].max()))
    lo = float(np.asarray(lx)[:, 0].min() + np.asarray(tz)[:, 0].min() - ph_range[1])
    hi = float(np.asarray(lx)[:, 0].max() + np.asarray(tz)[:, 0].max() - ph_range[0])
    inv = nb / (hi - lo) if hi > lo else 0.0
    cdef double[::1] bmax = np.full(nb + 2, -INFINITY)
    cdef const long[::1] H
    cdef long[::1] rowof
    if hint is not None and len(hint) > 0:
        H = np.ascontiguousarray(hint, dtype=np.int64)
        rowof = np.searchsorted(np.asarray(indptr), np.asarray(hint), side="right").astype(np.int64) - 1
        for k in range(H.shape[0]):
            i = rowof[k]
            v1 = LX[i, 0] + TZ[Cc[H[k]], 0] - PH[H[k], 0]
            v2 = LX[i, 1] + TZ[Cc[H[k]], 1] - PH[H[k], 1]
            b = _bucket(v1, lo, inv, nb)
            if v2 > bmax[b]:
                bmax[b] = v2
    for i in range(nx):
        a0 = LX[i, 0]
        a1 = LX[i, 1]
        for k in range(IP[i] + (i % stride), IP[i + 1], stride):
            v1 = a0 + TZ[Cc[k], 0] - PH[k, 0]
            v2 = a1 + TZ[Cc[k], 1] - PH[k, 1]
            b = _bucket(v1, lo, inv, nb)
            if v2 > bmax[b]:
                bmax[b] = v2
    for b in range(nb - 1, -1, -1):
        if bmax[b + 1] > bmax[b]:
            bmax[b] = bmax[b + 1]
    cap = 65536 if n > 65536 else n
    out = np.empty((cap, 2), dtype=np.float64)
    idx = np.empty(cap, dtype=np.int64)
    cdef double[:, ::1] buf = out
    cdef long[::1] ibuf = idx
    for i in range(nx):
        a0 = LX[i, 0]
        a1 = LX[i, 1]
        for k in range(IP[i], IP[i + 1]):
            v2 = a1 + TZ[Cc[k], 1] - PH[k, 1]
            v1 = a0 + TZ[Cc[k], 0] - PH[k, 0]
            if bmax[_bucket(v1, lo, inv, nb) + 1] > v2:
                continue
            if keep == cap:
                cap *= 2
                out = np.resize(out, (cap, 2))
                idx = np.resize(idx, cap)
                buf = out
                ibuf = idx
            buf[keep, 0] = v1
            buf[keep, 1] = v2
            ibuf[keep] = k
            keep += 1
    pts = out[:keep]
    sel = maximal_2d_index(pts)
    return pts[sel], idx[:keep][sel]


def conjugate_front_2d(lx, tz, phi, finite, double tol):
    """Staircase corners of ``{lx[i] + tz[j] - phi[i, j] : finite[i, j]}`` (2-D)."""
    fin = np.asarray(finite, dtype=bool)
    rows, cols = np.nonzero(fin)
    indptr = np.concatenate([[0], np.cumsum(fin.sum(axis=1))])
    return conjugate_corners_2d(lx, tz, indptr, cols, np.asarray(phi)[rows, cols])[0]


def meet_staircases_2d(A, B):
    """Corners of ``(A + R^2_+) ∩ (B + R^2_+)`` for strict staircases (first coordinate
    ascending, second strictly descending), by a linear merge."""
    cdef double[:, ::1] P = np.ascontiguousarray(A, dtype=np.float64)
    cdef double[:, ::1] Q = np.ascontiguousarray(B, dtype=np.float64)
    cdef Py_ssize_t na = P.shape[0], nq = Q.shape[0], i = 0, j = 0, cnt = 0
    cdef double x, fa, fb, h, last = INFINITY
    out = np.empty((na + nq, 2), dtype=np.float64)
    cdef double[:, ::1] O = out
    if na == 0 or nq == 0:
        return np.zeros((0, 2))
    # start at the larger leftmost abscissa
    x = P[0, 0] if P[0, 0] > Q[0, 0] else Q[0, 0]
    while i + 1 < na and P[i + 1, 0] <= x:
        i += 1
    while j + 1 < nq and Q[j + 1, 0] <= x:
        j += 1
    while True:
        fa = P[i, 1]
        fb = Q[j, 1]
        h = fa if fa > fb else fb
        if h < last:
            O[cnt, 0] = x
            O[cnt, 1] = h
            cnt += 1
            last = h
        # next breakpoint
        if i + 1 < na and (j + 1 >= nq or P[i + 1, 0] <= Q[j + 1, 0]):
            x = P[i + 1, 0]
            i += 1
            if j + 1 < nq and Q[j + 1, 0] == x:
                j += 1
        elif j + 1 < nq:
            x = Q[j + 1, 0]
            j += 1
        else:
            break
    return out[:cnt].copy()
