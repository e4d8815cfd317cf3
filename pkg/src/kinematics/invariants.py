"""Relativistic one- and two-particle invariants.

All functions accept single 3-vectors or stacked arrays of shape ``(..., 3)``
and broadcast over the leading axes.  Mass is normalised to one; ``c`` is the
speed of light (c >= 1).
"""

from dataclasses import dataclass
from typing import Any, Dict

import numpy as np

from src.errors import DomainError, DegenerateError, ParameterError


def _vec(v) -> np.ndarray:
    return np.asarray(v, dtype=float)


def _check_c(c: float) -> None:
    if c < 1.0:
        raise ParameterError(f"speed of light must satisfy c >= 1, got {c}")


# ------------------------------------------------------------------
# Single-particle quantities
# ------------------------------------------------------------------

def energy(v, c: float):
    """v0 = sqrt(c^2 + |v|^2)."""
    _check_c(c)
    v = _vec(v)
    return np.sqrt(c * c + np.sum(v * v, axis=-1))


def bracket(v):
    """Japanese bracket <v> = sqrt(1 + |v|^2)."""
    v = _vec(v)
    return np.sqrt(1.0 + np.sum(v * v, axis=-1))


def rel_velocity(v, c: float) -> np.ndarray:
    """v_hat = c v / v0, always strictly slower than c."""
    v = _vec(v)
    return c * v / energy(v, c)[..., None]


def check_map(y, c: float) -> np.ndarray:
    """Inverse of rel_velocity: y / sqrt(1 - |y|^2/c^2) on the open ball |y| < c."""
    _check_c(c)
    y = _vec(y)
    beta2 = np.sum(y * y, axis=-1) / (c * c)
    if np.any(beta2 >= 1.0):
        raise DomainError(
            f"check_map needs |y| < c (c={c}); max |y|/c = {float(np.sqrt(np.max(beta2))):.6g}"
        )
    return y / np.sqrt(1.0 - beta2)[..., None]


def transport_jacobian(v, t, c: float):
    """Absolute Jacobian of v -> x - t v_hat, equal to c^5 t^3 / v0^5."""
    t = np.asarray(t, dtype=float)
    if np.any(t < 0):
        raise DomainError(f"transport_jacobian needs t >= 0, got {t}")
    return c ** 5 * t ** 3 / energy(v, c) ** 5


def kappa(v, x, c: float):
    """kappa = 1 - v.x / (v0 |x|); undefined at x = 0."""
    v = _vec(v)
    x = _vec(x)
    r = np.linalg.norm(x, axis=-1)
    if np.any(r == 0.0):
        raise DomainError("kappa is undefined at x = 0")
    return 1.0 - np.sum(v * x, axis=-1) / (energy(v, c) * r)


# ------------------------------------------------------------------
# Two-particle invariants
# ------------------------------------------------------------------

def relative_momentum(v, u, c: float):
    """g >= 0 with g^2 = 2(v0 u0 - v.u - c^2).

    Evaluated as g^2 = |v-u|^2 - ((v-u).(v+u) / (v0+u0))^2, which avoids the
    cancellation of the defining form when c is large.
    """
    v = _vec(v)
    u = _vec(u)
    d = v - u
    p = v + u
    e_sum = energy(v, c) + energy(u, c)
    g2 = np.sum(d * d, axis=-1) - (np.sum(d * p, axis=-1) / e_sum) ** 2
    return np.sqrt(np.maximum(g2, 0.0))


def s_invariant(v, u, c: float):
    """s = g^2 + 4 c^2."""
    g = relative_momentum(v, u, c)
    return g * g + 4.0 * c * c


def s_invariant_direct(v, u, c: float):
    """s = 2(v0 u0 - v.u + c^2); used to cross-check s_invariant."""
    v = _vec(v)
    u = _vec(u)
    return 2.0 * (energy(v, c) * energy(u, c) - np.sum(v * u, axis=-1) + c * c)


def moller_velocity(v, u, c: float):
    """v_phi = c g sqrt(s) / (4 v0 u0)."""
    g = relative_momentum(v, u, c)
    s = g * g + 4.0 * c * c
    return c * g * np.sqrt(s) / (4.0 * energy(v, c) * energy(u, c))


def zeta(v, u, c: float):
    """zeta = (v0 + u0) / sqrt(s) >= 1."""
    return (energy(v, c) + energy(u, c)) / np.sqrt(s_invariant(v, u, c))


# ------------------------------------------------------------------
# Domain types
# ------------------------------------------------------------------

@dataclass(frozen=True)
class Momentum:
    """A 3-momentum with its derived energy and velocity."""

    v: tuple
    c: float = 1.0

    def __post_init__(self):
        _check_c(self.c)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self.v, dtype=float)

    @property
    def v0(self) -> float:
        return float(energy(self.array, self.c))

    @property
    def velocity(self) -> np.ndarray:
        return rel_velocity(self.array, self.c)

    def to_dict(self) -> Dict[str, Any]:
        return {"v": list(self.v), "c": self.c, "v0": self.v0}


@dataclass(frozen=True)
class CollisionPair:
    """Pre-collision pair with a scattering direction and derived invariants."""

    v: Momentum
    u: Momentum
    omega: tuple

    def __post_init__(self):
        if self.v.c != self.u.c:
            raise ParameterError(f"pair mixes c={self.v.c} and c={self.u.c}")

    @property
    def c(self) -> float:
        return self.v.c

    @property
    def g(self) -> float:
        return float(relative_momentum(self.v.array, self.u.array, self.c))

    @property
    def s(self) -> float:
        return self.g ** 2 + 4.0 * self.c ** 2

    @property
    def zeta(self) -> float:
        return float(zeta(self.v.array, self.u.array, self.c))

    @property
    def v_phi(self) -> float:
        return float(moller_velocity(self.v.array, self.u.array, self.c))

    def post(self):
        """Post-collision momenta (v', u') as a pair of Momentum."""
        from src.kinematics.scattering import post_collision

        vp, up = post_collision(self.v.array, self.u.array, self.omega, self.c)
        return Momentum(tuple(vp), self.c), Momentum(tuple(up), self.c)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "v": list(self.v.v),
            "u": list(self.u.v),
            "omega": list(self.omega),
            "c": self.c,
            "g": self.g,
            "s": self.s,
            "zeta": self.zeta,
            "v_phi": self.v_phi,
        }


def require_nondegenerate(g, what: str = "pair") -> None:
    if np.any(np.asarray(g) <= 0.0):
        raise DegenerateError(f"{what}: relative momentum g = 0")
