"""Perturbation mappings, primal/dual problems and regularity conditions."""

from vecdual.perturbation.builders import (CCVPInstance, build_ccvd, build_cone_constrained,
                                           build_phi1, build_phi2, build_phi3, build_phi4,
                                           ccvd_objective, phi1_conjugate_identity,
                                           phi1_conjugate_rhs)
from vecdual.perturbation.core import (MAX_TABLE, ConditionResult, DualReport, PerturbationProblem,
                                       Verdict, admissible_operators, check_condition, dual_value,
                                       front_gap, is_admissible, loose_dual_value, max_table,
                                       operator_grid, perturbation_conjugate, positive_operators,
                                       primal_value, strong_duality_check, weak_duality_check)
from vecdual.perturbation.p1 import (P1_WINDOW, example_p1, p1_filters, p1_front_distance,
                                     p1_primal_closed_form, p1_problem)

__all__ = [
    "MAX_TABLE", "max_table", "PerturbationProblem", "DualReport", "Verdict", "ConditionResult",
    "operator_grid", "primal_value", "perturbation_conjugate", "is_admissible",
    "admissible_operators", "positive_operators", "dual_value", "loose_dual_value",
    "weak_duality_check", "strong_duality_check", "check_condition", "front_gap",
    "CCVPInstance", "build_cone_constrained", "build_phi1", "build_phi2", "build_phi3",
    "build_phi4", "phi1_conjugate_rhs", "phi1_conjugate_identity", "ccvd_objective", "build_ccvd",
    "P1_WINDOW", "p1_problem", "p1_primal_closed_form", "p1_front_distance", "p1_filters",
    "example_p1",
]
