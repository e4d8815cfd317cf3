"""Relativistic Boltzmann operator: quadrature, conservation moments, chain rule, Carleman term."""

from src.collision.carleman import carleman_bound, carleman_C, carleman_C_reference, carleman_scan, polished_sup
from src.collision.distributions import (
    AnalyticDistribution,
    Gaussian,
    Juttner,
    RotationDerivative,
    ScaledDerivative,
    TransportedSlice,
    Zero,
)
from src.collision.estimates import majorant_ratio, weighted_Q_bound_ratio, weighted_Q_scan
from src.collision.identities import (
    ConvergenceStudy,
    chain_rule_residual,
    chain_rule_study,
    convergence_study,
    fd_derivative,
    rotation_residual,
    rotation_study,
)
from src.collision.kernel import KernelSpec
from src.collision.operator import (
    BracketResult,
    collision_brackets,
    collision_terms,
    eval_gain,
    eval_loss,
    eval_Q,
    isotropic_brackets,
    velocity_grid,
)
from src.collision.quadrature import QuadratureGrid, Rule, sphere_rule

__all__ = [
    "AnalyticDistribution",
    "BracketResult",
    "ConvergenceStudy",
    "Gaussian",
    "Juttner",
    "KernelSpec",
    "QuadratureGrid",
    "RotationDerivative",
    "Rule",
    "ScaledDerivative",
    "TransportedSlice",
    "Zero",
    "carleman_C",
    "carleman_C_reference",
    "carleman_bound",
    "carleman_scan",
    "chain_rule_residual",
    "chain_rule_study",
    "collision_brackets",
    "collision_terms",
    "convergence_study",
    "eval_Q",
    "eval_gain",
    "eval_loss",
    "fd_derivative",
    "isotropic_brackets",
    "majorant_ratio",
    "polished_sup",
    "rotation_residual",
    "rotation_study",
    "sphere_rule",
    "velocity_grid",
    "weighted_Q_bound_ratio",
    "weighted_Q_scan",
]
