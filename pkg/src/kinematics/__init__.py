"""Relativistic collision kinematics: energies, velocity maps, pair invariants, scattering."""

from src.kinematics.invariants import (
    CollisionPair,
    Momentum,
    bracket,
    check_map,
    energy,
    kappa,
    moller_velocity,
    rel_velocity,
    relative_momentum,
    s_invariant,
    s_invariant_direct,
    transport_jacobian,
    zeta,
)
from src.kinematics.scattering import (
    classical_post_collision,
    collision_bounds,
    half_angle_sine,
    normalize_omega,
    post_collision,
    post_energies,
    post_momentum_bound,
    scattering_cosine,
)

__all__ = [
    "CollisionPair",
    "Momentum",
    "bracket",
    "check_map",
    "classical_post_collision",
    "collision_bounds",
    "energy",
    "half_angle_sine",
    "kappa",
    "moller_velocity",
    "normalize_omega",
    "post_collision",
    "post_energies",
    "post_momentum_bound",
    "rel_velocity",
    "relative_momentum",
    "s_invariant",
    "s_invariant_direct",
    "scattering_cosine",
    "transport_jacobian",
    "zeta",
]
