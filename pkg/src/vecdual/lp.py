"""A small dense two-phase simplex solver.

The solver is deliberately plain: a full tableau, Bland's anti-cycling rule
and a fixed pivot tolerance.  It is used for the modest linear programs of
the toolkit (weak-positivity tests, separation problems, scalar duals), and
reports dual multipliers so callers can read off separating functionals.

Problem form::

    minimize    c @ x
    subject to  A_ub @ x <= b_ub
                A_eq @ x == b_eq
                lo <= x <= hi          (bounds, default 0 <= x)

Dual multipliers follow the sensitivity convention: ``duals_ub[i]`` is the
rate of change of the optimal value with ``b_ub[i]`` (hence ``<= 0``), and
``duals_eq[i]`` likewise for ``b_eq[i]``.
"""

from dataclasses import dataclass, field
from enum import Enum

import numpy as np

__all__ = ["LPStatus", "LPResult", "LPError", "lp_solve", "PIVOT_TOL"]

PIVOT_TOL = 1e-9


class LPStatus(str, Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    UNBOUNDED = "Unbounded"


class LPError(RuntimeError):
    """Raised when the pivot cap is reached (numerical stall)."""


@dataclass
class LPResult:
    status: LPStatus
    value: float = np.nan
    x: np.ndarray = field(default_factory=lambda: np.zeros(0))
    duals_ub: np.ndarray = field(default_factory=lambda: np.zeros(0))
    duals_eq: np.ndarray = field(default_factory=lambda: np.zeros(0))
    pivots: int = 0

    @property
    def optimal(self):
        return self.status is LPStatus.OPTIMAL

    @property
    def primal_point(self):
        return self.x

    @property
    def dual_multipliers(self):
        return np.concatenate([self.duals_ub, self.duals_eq])


def _pivot(T, r, j):
    T[r] /= T[r, j]
    col = T[:, j].copy()
    col[r] = 0.0
    nz = np.nonzero(np.abs(col) > 0)[0]
    if len(nz):
        T[nz] -= np.outer(col[nz], T[r])


def _run(T, basis, n_allowed, tol, budget):
    """Bland's rule on tableau ``T`` (objective in the last row). Returns (status, pivots)."""
    pivots = 0
    while True:
        red = T[-1, :n_allowed]
        cand = np.nonzero(red < -tol)[0]
        if len(cand) == 0:
            return LPStatus.OPTIMAL, pivots
        j = cand[0]
        col = T[:-1, j]
        pos = np.nonzero(col > tol)[0]
        if len(pos) == 0:
            return LPStatus.UNBOUNDED, pivots
        ratios = T[pos, -1] / col[pos]
        best = ratios.min()
        ties = pos[ratios <= best + tol * max(1.0, abs(best))]
        r = ties[np.argmin(basis[ties])]
        _pivot(T, r, j)
        basis[r] = j
        pivots += 1
        if pivots > budget:
            raise LPError(f"simplex pivot cap {budget} reached")


def lp_solve(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=None,
             tol=PIVOT_TOL, max_pivots=None):
    """Solve a linear program; see the module docstring for the form.

    ``bounds`` is ``None`` (all variables nonnegative) or a sequence of
    ``(lo, hi)`` pairs where ``None`` means unbounded on that side.
    """
    c = np.asarray(c, dtype=float).ravel()
    n = len(c)
    A_ub = np.zeros((0, n)) if A_ub is None else np.atleast_2d(np.asarray(A_ub, dtype=float)).reshape(-1, n)
    b_ub = np.zeros(0) if b_ub is None else np.asarray(b_ub, dtype=float).ravel()
    A_eq = np.zeros((0, n)) if A_eq is None else np.atleast_2d(np.asarray(A_eq, dtype=float)).reshape(-1, n)
    b_eq = np.zeros(0) if b_eq is None else np.asarray(b_eq, dtype=float).ravel()
    if len(b_ub) != len(A_ub) or len(b_eq) != len(A_eq):
        raise ValueError("constraint shapes do not match")
    if bounds is None:
        bounds = [(0.0, None)] * n
    if len(bounds) != n:
        raise ValueError("one bound pair per variable is required")

    # Variable substitution x = shift + D @ x', x' >= 0.
    cols, shift = [], np.zeros(n)
    extra_rows, extra_rhs = [], []
    for j, (lo, hi) in enumerate(bounds):
        lo = -np.inf if lo is None else float(lo)
        hi = np.inf if hi is None else float(hi)
        if lo > hi:
            return LPResult(LPStatus.INFEASIBLE)
        if np.isfinite(lo):
            shift[j] = lo
            cols.append((j, 1.0))
            if np.isfinite(hi):
                extra_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            shift[j] = hi
            cols.append((j, -1.0))
        else:
            cols.append((j, 1.0))
            cols.append((j, -1.0))
    nv = len(cols)
    D = np.zeros((n, nv))
    for k, (j, s) in enumerate(cols):
        D[j, k] = s

    Aub = A_ub @ D
    bub = b_ub - A_ub @ shift
    if extra_rows:
        E = np.zeros((len(extra_rows), nv))
        for i, (k, h) in enumerate(extra_rows):
            E[i, k] = 1.0
            extra_rhs.append(h)
        Aub = np.vstack([Aub, E])
        bub = np.concatenate([bub, extra_rhs])
    Aeq = A_eq @ D
    beq = b_eq - A_eq @ shift
    cc = c @ D

    m_ub, m_eq = len(bub), len(beq)
    R = m_ub + m_eq
    n_std = nv + m_ub  # structural + slack columns
    A = np.zeros((R, n_std))
    A[:m_ub, :nv] = Aub
    A[:m_ub, nv:] = np.eye(m_ub)
    A[m_ub:, :nv] = Aeq
    b = np.concatenate([bub, beq])
    sign = np.where(b < 0, -1.0, 1.0)
    A *= sign[:, None]
    b = b * sign

    # tableau: [A | I_art | b] with objective row
    T = np.zeros((R + 1, n_std + R + 1))
    T[:R, :n_std] = A
    T[:R, n_std:n_std + R] = np.eye(R)
    T[:R, -1] = b
    basis = np.arange(n_std, n_std + R)
    # phase 1 objective: sum of artificials, expressed in reduced costs
    T[-1, :n_std] = -A.sum(axis=0)
    T[-1, -1] = -b.sum()
    budget = max_pivots if max_pivots is not None else 50 * (R + n_std + 10)
    status, piv1 = _run(T, basis, n_std, tol, budget)
    if -T[-1, -1] > 1e-7 * max(1.0, np.abs(b).max(initial=0.0)):
        return LPResult(LPStatus.INFEASIBLE, pivots=piv1)
    # drive zero-level artificials out of the basis where possible
    for r in range(R):
        if basis[r] >= n_std:
            nz = np.nonzero(np.abs(T[r, :n_std]) > tol)[0]
            if len(nz):
                _pivot(T, r, nz[0])
                basis[r] = nz[0]

    cost = np.concatenate([cc, np.zeros(m_ub + R)])
    cB = cost[basis]
    T[-1, :-1] = cost - cB @ T[:R, :-1]
    T[-1, -1] = -cB @ T[:R, -1]
    status, piv2 = _run(T, basis, n_std, tol, budget)
    pivots = piv1 + piv2
    if status is LPStatus.UNBOUNDED:
        return LPResult(LPStatus.UNBOUNDED, value=-np.inf, pivots=pivots)

    xs = np.zeros(n_std + R)
    xs[basis] = T[:R, -1]
    x = shift + D @ xs[:nv]
    value = float(c @ x)
    # simplex multipliers y = c_B B^-1; B^-1 sits in the artificial columns
    y = cost[basis] @ T[:R, n_std:n_std + R]
    y = y * sign
    duals_ub = y[:len(b_ub)]
    duals_eq = y[m_ub:]
    return LPResult(LPStatus.OPTIMAL, value=value, x=x, duals_ub=duals_ub,
                    duals_eq=duals_eq, pivots=pivots)
