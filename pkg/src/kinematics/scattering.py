"""Elastic binary scattering in the centre-of-momentum parameterisation."""

from typing import Dict, Tuple

import numpy as np

from src.errors import DomainError
from src.kinematics.invariants import bracket, energy, relative_momentum, require_nondegenerate

OMEGA_TOLERANCE = 1e-9


def normalize_omega(omega) -> np.ndarray:
    """Renormalise directions within OMEGA_TOLERANCE of the unit sphere, reject the rest."""
    omega = np.asarray(omega, dtype=float)
    norm = np.linalg.norm(omega, axis=-1)
    if np.any(np.abs(norm - 1.0) > OMEGA_TOLERANCE):
        raise DomainError(
            f"omega must be a unit vector (| |omega| - 1 | <= {OMEGA_TOLERANCE}); "
            f"got |omega| = {np.atleast_1d(norm).ravel()[:3]}"
        )
    return omega / norm[..., None]


def post_collision(v, u, omega, c: float) -> Tuple[np.ndarray, np.ndarray]:
    """Post-collision momenta (v', u').

    v' = (v+u)/2 + (g/2) (omega + (v+u) ((v+u).omega) / (sqrt(s)(v0+u0+sqrt(s))))
    u' = (v+u)/2 - (same correction)

    The projector coefficient (zeta-1)/|v+u|^2 is written as
    1/(sqrt(s)(v0+u0+sqrt(s))), which stays finite when v+u = 0; the term it
    multiplies then vanishes.
    """
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    omega = normalize_omega(omega)
    p = v + u
    e_sum = energy(v, c) + energy(u, c)
    g = relative_momentum(v, u, c)
    sqrt_s = np.sqrt(g * g + 4.0 * c * c)
    proj = np.sum(p * omega, axis=-1) / (sqrt_s * (e_sum + sqrt_s))
    corr = 0.5 * g[..., None] * (omega + p * proj[..., None])
    half = 0.5 * p
    return half + corr, half - corr


def post_energies(v, u, omega, c: float) -> Tuple[np.ndarray, np.ndarray]:
    """(v0', u0') from the closed form v0' = (v0+u0)/2 + g/(2 sqrt(s)) omega.(v+u)."""
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    omega = normalize_omega(omega)
    e_sum = energy(v, c) + energy(u, c)
    g = relative_momentum(v, u, c)
    sqrt_s = np.sqrt(g * g + 4.0 * c * c)
    shift = g / (2.0 * sqrt_s) * np.sum(omega * (v + u), axis=-1)
    return 0.5 * e_sum + shift, 0.5 * e_sum - shift


def classical_post_collision(v, u, omega) -> Tuple[np.ndarray, np.ndarray]:
    """Newtonian elastic collision of equal masses: (v+u)/2 +- |v-u|/2 omega."""
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    omega = normalize_omega(omega)
    half = 0.5 * (v + u)
    corr = 0.5 * np.linalg.norm(v - u, axis=-1)[..., None] * omega
    return half + corr, half - corr


def scattering_cosine(v, u, vp, up, c: float):
    """cos(theta) = [-(v0-u0)(v0'-u0') + (v-u).(v'-u')] / g^2, clipped to [-1, 1]."""
    v, u, vp, up = (np.asarray(a, dtype=float) for a in (v, u, vp, up))
    g = relative_momentum(v, u, c)
    require_nondegenerate(g, "scattering_cosine")
    num = (
        -(energy(v, c) - energy(u, c)) * (energy(vp, c) - energy(up, c))
        + np.sum((v - u) * (vp - up), axis=-1)
    )
    return np.clip(num / (g * g), -1.0, 1.0)


def half_angle_sine(v, vp, g, c: float):
    """sin(theta/2) through the identity sin(theta/2) = g(v, v') / g."""
    return relative_momentum(v, vp, c) / g


def collision_bounds(v, u, c: float) -> Dict[str, np.ndarray]:
    """Sampled sides of the elementary kinematic bounds for a pair.

    Keys map to (lhs, rhs) tuples; each bound reads lhs <= rhs.
    """
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    v0 = energy(v, c)
    u0 = energy(u, c)
    g = relative_momentum(v, u, c)
    dist = np.linalg.norm(v - u, axis=-1)
    s = g * g + 4.0 * c * c
    bv = bracket(v)
    bu = bracket(u)
    five_min = 5.0 * np.minimum(bv * bu * np.sqrt(u0 / v0), bv * bu * np.sqrt(v0 / u0))
    return {
        "g_lower": (c * dist / np.sqrt(v0 * u0), g),
        "g_upper": (g, dist),
        "g_weighted": (g, five_min),
        "s_lower": (4.0 * c * c * np.ones_like(s), s),
        "s_upper": (s, 4.0 * v0 * u0),
    }


def post_momentum_bound(v, u, omega, c: float) -> Dict[str, Tuple[np.ndarray, np.ndarray]]:
    """1 + |v'|^2 <= 1 + 3(|v|^2 + |u|^2), and the same for u'."""
    vp, up = post_collision(v, u, omega, c)
    v = np.asarray(v, dtype=float)
    u = np.asarray(u, dtype=float)
    rhs = 1.0 + 3.0 * (np.sum(v * v, axis=-1) + np.sum(u * u, axis=-1))
    return {
        "v_post": (1.0 + np.sum(vp * vp, axis=-1), rhs),
        "u_post": (1.0 + np.sum(up * up, axis=-1), rhs),
    }
