"""The worked two-objective example with a single cone constraint.

``Phi(x, z) = (x, x^2 + 2x + z)`` when ``2x + z <= 0`` and ``+inf`` otherwise,
with ``K = R^2_+`` and ``S = R_+``.  Operators ``T z = (c z, d z)`` form the
dual grid.
"""

import numpy as np

from vecdual.cone_order import PolyhedralCone
from vecdual.perturbation.builders import build_cone_constrained
from vecdual.perturbation.core import (admissible_operators, operator_grid, positive_operators,
                                       strong_duality_check)
from vecdual.weak_sets import crossing_offsets, front_sample_points, winf

__all__ = ["P1_WINDOW", "p1_problem", "p1_primal_closed_form", "p1_front_distance", "p1_filters",
           "example_p1"]

P1_WINDOW = np.array([[-5.0, 3.0], [-5.0, 3.0]])


def _grid(lo, hi, step):
    n = int(round((hi - lo) / step)) + 1
    return np.round(np.linspace(lo, hi, n), 10) + 0.0


def p1_problem(x_step=1e-3, z_step=0.05, op_step=0.1, x_range=(-5.0, 3.0), z_range=(-6.0, 6.0),
               op_range=(-3.0, 3.0)):
    """The example's perturbation mapping on product grids."""
    K = PolyhedralCone.orthant(2)
    S = PolyhedralCone.orthant(1)
    X = _grid(*x_range, x_step)
    Z = _grid(*z_range, z_step)
    F = np.column_stack([X, X ** 2 + 2 * X])
    G = 2 * X
    ops = operator_grid((2, 1), _grid(*op_range, op_step))
    return build_cone_constrained(X, Z, F, G, [[0.0], [1.0]], K, S, ops, name="p1")


def p1_primal_closed_form(window=P1_WINDOW, step=1e-3):
    """Dense points of ``{(t, t^2 + 2t) : t <= -1} ∪ {(t, -1) : t >= -1}`` inside ``window``."""
    lo, hi = window[0]
    t = np.arange(lo, hi + step / 2, step)
    curve = np.column_stack([t, np.where(t <= -1, t ** 2 + 2 * t, -1.0)])
    inside = np.all((curve >= window[:, 0]) & (curve <= window[:, 1]), axis=1)
    return curve[inside]


def p1_front_distance(primal, window=P1_WINDOW, step=1e-3, ref_step=1e-5, resolution=2001):
    """Two-sided distance bound between a computed primal front and the closed form in ``window``.

    Closed-form points (spacing ``step``) are measured against the computed
    front, and dense samples of the computed front against a fine closed-form
    reference, by exact crossing offsets along the unit interior direction
    (each offset bounds the Euclidean distance to the other front).
    """
    cf = p1_primal_closed_form(window, step)
    ref = winf(p1_primal_closed_form(window, ref_step), primal.cone)
    samples = front_sample_points(primal, window, resolution)
    a = np.abs(crossing_offsets(primal, cf)).max() if len(cf) else 0.0
    b = np.abs(crossing_offsets(ref, samples)).max() if len(samples) else 0.0
    return float(max(a, b))


def p1_filters(P):
    """Compare the admissible/positive operator sets with ``c >= 0 or d >= 1`` / ``c >= 0 and d >= 0``.

    Returns ``(admissible_ok, positive_ok, n_admissible, n_positive)``.
    """
    keys = lambda ops: {tuple(np.round(np.ravel(np.asarray(T, dtype=float)), 9)) for T in ops}
    grid = [np.ravel(T.matrix) for T in P.operator_grid]
    want_adm = keys(T for T in grid if T[0] >= 0 or T[1] >= 1 - 1e-12)
    want_pos = keys(T for T in grid if T[0] >= 0 and T[1] >= 0)
    adm = keys(T.matrix for T in admissible_operators(P))
    pos = keys(T.matrix for T in positive_operators(P))
    return adm == want_adm, pos == want_pos, len(adm), len(pos)


def example_p1(loose=False, **grid_kw):
    """Build the example and its duality report (``L = 0``) on the window ``[-5, 3]^2``."""
    P = p1_problem(**grid_kw)
    report = strong_duality_check(P, None, tolerance=1e-6, window=P1_WINDOW, loose=loose)
    return P, report
