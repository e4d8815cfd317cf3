"""Node sets on the backward light cone and on the initial sphere.

The solid cone {|y - x| <= c t} is sliced into shells of tau = |y - x|,
each shell carrying two Gauss-Legendre nodes times an S^2 rule.  Integrands
with a 1/tau^k singularity leave tau^(2-k) in the measure; the first shell
absorbs it with a Gauss-Jacobi rule so the tip needs no clustering.
"""

from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np

from src.collision.quadrature import Rule, jacobi_radial_rule, legendre_rule, sphere_rule
from src.errors import BudgetExceededError, ParameterError

_VELOCITY_MODES = ("auto", "momentum", "position")


@dataclass
class ConeGrid:
    """Resolution of the retarded integrals."""

    n_shells: int = 128
    n_theta: int = 8
    n_phi: int = 16
    n_velocity: int = 6
    velocity_mode: str = "auto"
    max_nodes: Optional[int] = None

    def __post_init__(self):
        if self.n_shells < 1:
            raise ParameterError(f"n_shells must be >= 1, got {self.n_shells}")
        if self.velocity_mode not in _VELOCITY_MODES:
            raise ParameterError(
                f"Unknown velocity mode '{self.velocity_mode}'. Available: {sorted(_VELOCITY_MODES)}"
            )

    def sphere(self) -> Rule:
        return sphere_rule(self.n_theta, self.n_phi)

    @property
    def cone_size(self) -> int:
        return 2 * self.n_shells * self.n_theta * self.n_phi

    def check_budget(self, velocity_nodes: int) -> None:
        total = self.cone_size * velocity_nodes
        if self.max_nodes is not None and total > self.max_nodes:
            raise BudgetExceededError(
                f"cone quadrature needs {total} nodes, budget is {self.max_nodes}"
            )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "ConeGrid":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


def shell_rule(radius: float, n_shells: int, power: float) -> Rule:
    """Rule for integral_0^radius tau^power F(tau) d tau, power > -1."""
    edges = np.linspace(0.0, radius, n_shells + 1)
    first = jacobi_radial_rule(2, edges[1], power)
    pts = [first.points]
    wts = [first.weights]
    for a, b in zip(edges[1:-1], edges[2:]):
        r = legendre_rule(2, a, b)
        pts.append(r.points)
        wts.append(r.weights * r.points ** power)
    return Rule(np.concatenate(pts), np.concatenate(wts))


@dataclass(frozen=True)
class ConeNodes:
    """Flattened nodes y = x + tau omega at retarded time s = t - tau/c."""

    y: np.ndarray
    omega: np.ndarray
    tau: np.ndarray
    s: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)


def cone_nodes(x, t: float, c: float, power: float, grid: ConeGrid, sphere: Optional[Rule] = None) -> ConeNodes:
    """Nodes for integral_{|y-x| <= ct} F(y) |y-x|^(power-2) dy."""
    if t <= 0.0:
        raise ParameterError(f"cone integrals need t > 0, got {t}")
    sphere = sphere or grid.sphere()
    radial = shell_rule(c * t, grid.n_shells, power)
    tau = np.repeat(radial.points, len(sphere))
    omega = np.tile(sphere.points, (len(radial), 1))
    y = np.asarray(x, dtype=float) + tau[:, None] * omega
    weights = np.outer(radial.weights, sphere.weights).ravel()
    return ConeNodes(y, omega, tau, t - tau / c, weights)


def initial_sphere_nodes(x, t: float, c: float, sphere: Rule) -> ConeNodes:
    """Nodes for the surface integral over |y - x| = c t at s = 0 (surface measure included)."""
    radius = c * t
    n = len(sphere)
    y = np.asarray(x, dtype=float) + radius * sphere.points
    return ConeNodes(y, sphere.points, np.full(n, radius), np.zeros(n), sphere.weights * radius ** 2)
