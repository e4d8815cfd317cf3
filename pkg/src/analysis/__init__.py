"""Weighted inequalities and cone integral bounds as sampled sup-ratio checks."""

from src.analysis.catalog import Axis, InequalityCase, case_ids, get_case
from src.analysis.cone_integrals import (
    IntegralGrid,
    change_of_variables_check,
    cone_integral_direct,
    graded_rule,
    i1_lhs,
    i1_rhs,
    i2_lhs,
    i2_rhs,
    i3_lhs,
    i3_rhs,
    reduced_cone_integral,
    sphere_reduction,
    sphere_reduction_direct,
    transport_weight_integral,
)
from src.analysis.verify import VerificationReport, transfer_counter_witness, verify_all, verify_inequality
from src.analysis.weights import composite_weight, log_composite_weight, weight_W

__all__ = [
    "Axis",
    "InequalityCase",
    "IntegralGrid",
    "VerificationReport",
    "case_ids",
    "change_of_variables_check",
    "composite_weight",
    "cone_integral_direct",
    "get_case",
    "graded_rule",
    "i1_lhs",
    "i1_rhs",
    "i2_lhs",
    "i2_rhs",
    "i3_lhs",
    "i3_rhs",
    "log_composite_weight",
    "reduced_cone_integral",
    "sphere_reduction",
    "sphere_reduction_direct",
    "transfer_counter_witness",
    "transport_weight_integral",
    "verify_all",
    "verify_inequality",
    "weight_W",
]
