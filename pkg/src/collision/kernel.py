"""Collision kernel B = v_phi * sigma(g, theta) with sigma = g^(gamma-1) sigma0(theta)."""

from dataclasses import dataclass
from typing import Any, Callable, Dict

import numpy as np

from src.errors import ParameterError
from src.kinematics import energy, relative_momentum


# ------------------------------------------------------------------
# Angular factor registry
# ------------------------------------------------------------------

def _sigma0_constant(cos_theta):
    return np.ones_like(np.asarray(cos_theta, dtype=float))


def _sigma0_cos2_half(cos_theta):
    # cos^2(theta/2) = (1 + cos theta) / 2
    return 0.5 * (1.0 + np.asarray(cos_theta, dtype=float))


_SIGMA0: Dict[str, Callable] = {
    "constant": _sigma0_constant,
    "cos2_half": _sigma0_cos2_half,
}


def sigma0_names():
    return sorted(_SIGMA0)


def get_sigma0(name: str) -> Callable:
    fn = _SIGMA0.get(name)
    if fn is None:
        raise ParameterError(f"Unknown sigma0 '{name}'. Available: {sigma0_names()}")
    return fn


# ------------------------------------------------------------------
# KernelSpec
# ------------------------------------------------------------------

@dataclass(frozen=True)
class KernelSpec:
    gamma: float = 0.0
    sigma0: str = "constant"
    c: float = 1.0

    def __post_init__(self):
        if not (-2.0 < self.gamma <= 0.0):
            raise ParameterError(f"gamma must lie in (-2, 0], got {self.gamma}")
        if self.c < 1.0:
            raise ParameterError(f"c must be >= 1, got {self.c}")
        fn = get_sigma0(self.sigma0)
        probe = fn(np.cos(np.linspace(0.0, np.pi, 181)))
        if np.any(probe < 0.0) or np.any(probe > 1.0):
            raise ParameterError(f"sigma0 '{self.sigma0}' leaves [0, 1] on [0, pi]")

    @property
    def isotropic(self) -> bool:
        return self.sigma0 == "constant"

    def angular(self, cos_theta):
        return get_sigma0(self.sigma0)(cos_theta)

    def speed_factor(self, v, u):
        """v_phi g^(gamma-1) = c sqrt(s) g^gamma / (4 v0 u0), the omega-independent part of B."""
        c = self.c
        g = relative_momentum(v, u, c)
        s = g * g + 4.0 * c * c
        return c * np.sqrt(s) * g ** self.gamma / (4.0 * energy(v, c) * energy(u, c))

    def kernel(self, v, u, cos_theta):
        return self.speed_factor(v, u) * self.angular(cos_theta)

    def majorant(self, v, u):
        """1 + |v-u|^gamma, an upper bound for v_phi sigma when 0 <= sigma0 <= 1."""
        d = np.linalg.norm(np.asarray(v, dtype=float) - np.asarray(u, dtype=float), axis=-1)
        return 1.0 + d ** self.gamma

    def to_dict(self) -> Dict[str, Any]:
        return {"gamma": self.gamma, "sigma0": self.sigma0, "c": self.c}

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "KernelSpec":
        return cls(
            gamma=float(d.get("gamma", 0.0)),
            sigma0=d.get("sigma0", "constant"),
            c=float(d.get("c", 1.0)),
        )
