"""Commuting vector fields, their complete lifts and phase-space jets."""

from src.vectorfields.commutators import (
    apply,
    apply_jet,
    commutator,
    commutator_residual,
    commutator_table,
    newtonian_boost_residual,
    null_frame_reduction,
    null_frame_residual,
    reconstruction_residual,
    rotation_cross_residual,
    structure,
    transport_commutation_residual,
)
from src.vectorfields.generators import (
    TAGS,
    TRANSPORT,
    VectorFieldId,
    all_fields,
    boost,
    coefficients,
    rotation,
    translation,
    word_metadata,
)
from src.vectorfields.jet import PhaseJet, energy_jet, gaussian_test_jet

__all__ = [
    "PhaseJet",
    "TAGS",
    "TRANSPORT",
    "VectorFieldId",
    "all_fields",
    "apply",
    "apply_jet",
    "boost",
    "coefficients",
    "commutator",
    "commutator_residual",
    "commutator_table",
    "energy_jet",
    "gaussian_test_jet",
    "newtonian_boost_residual",
    "null_frame_reduction",
    "null_frame_residual",
    "reconstruction_residual",
    "rotation",
    "rotation_cross_residual",
    "structure",
    "transport_commutation_residual",
    "translation",
    "word_metadata",
]
