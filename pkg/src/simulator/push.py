"""Characteristics of the Vlasov part: x' = vhat, v' = s (E + vhat x B / c).

Field-free steps are exact drifts.  With fields the step is a symmetric
split: half drift, a kick (half electric, exact magnetic rotation, half
electric) evaluated at the midpoint, half drift.  ``force_sign`` = -1 flips
the Lorentz force for sensitivity runs.
"""

import logging

import numpy as np

from src.errors import ParameterError
from src.kinematics import energy, rel_velocity
from src.simulator.ensemble import ParticleEnsemble

log = logging.getLogger(__name__)

FIELD_MODES = ("glassey_strauss", "none", "prescribed")


def rotate(v, axis, angle) -> np.ndarray:
    """Rodrigues rotation of v about unit ``axis`` by ``angle`` (row-wise)."""
    v = np.asarray(v, dtype=float)
    k = np.asarray(axis, dtype=float)
    cos = np.cos(angle)[..., None]
    sin = np.sin(angle)[..., None]
    kv = np.sum(k * v, axis=-1, keepdims=True)
    return v * cos + np.cross(k, v) * sin + k * kv * (1.0 - cos)


def lorentz_kick(momenta, E, B, dt: float, c: float, force_sign: float = 1.0) -> np.ndarray:
    """Momentum update over dt for fields frozen at the midpoint.

    The rotation dv/dt = s v x B / v0 keeps v0 fixed, so it is solved exactly
    with angle |B| dt / v0 about -s B/|B|.
    """
    E = np.asarray(E, dtype=float)
    B = np.asarray(B, dtype=float)
    half = 0.5 * dt * force_sign * E
    v_minus = np.asarray(momenta, dtype=float) + half
    b = np.linalg.norm(B, axis=-1)
    safe = np.where(b > 0.0, b, 1.0)
    axis = -force_sign * B / safe[..., None]
    angle = np.where(b > 0.0, b * dt / energy(v_minus, c), 0.0)
    return rotate(v_minus, axis, angle) + half


def drift(positions, momenta, dt: float, c: float) -> np.ndarray:
    return positions + rel_velocity(momenta, c) * dt


def step(state: ParticleEnsemble, dt: float, field_mode: str = "none", fields=None,
         force_sign: float = 1.0) -> ParticleEnsemble:
    """Advance every particle by dt; ``fields(t, x) -> (E, B)`` for the field modes."""
    if dt <= 0.0:
        raise ParameterError(f"dt must be > 0, got {dt}")
    if field_mode not in FIELD_MODES:
        raise ParameterError(f"Unknown field mode '{field_mode}'. Available: {list(FIELD_MODES)}")
    out = state.copy()
    out.time = state.time + dt
    if len(state) == 0:
        return out
    c = state.c
    if field_mode == "none":
        out.positions = drift(state.positions, state.momenta, dt, c)
        return out
    if fields is None:
        raise ParameterError(f"field mode '{field_mode}' needs a field model")
    mid = drift(state.positions, state.momenta, 0.5 * dt, c)
    E, B = fields(state.time + 0.5 * dt, mid)
    out.momenta = lorentz_kick(state.momenta, E, B, dt, c, force_sign)
    out.positions = drift(mid, out.momenta, 0.5 * dt, c)
    log.debug("[simulator] %s step to t=%g, n=%d", field_mode, out.time, len(out))
    return out

