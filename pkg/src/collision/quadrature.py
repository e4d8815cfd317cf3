"""Quadrature rules for the collision integrals.

A rule is a set of points with positive weights.  Sphere rules are
Gauss-Legendre in cos(theta) times a uniform azimuth; radial rules are
Gauss-Jacobi so that the r^(gamma+1) factor left by the r^2 du measure is
integrated exactly.  Rules compose into spherical shells the same way a
radial rule and an angular rule compose into a 3-D ball rule.
"""

from dataclasses import dataclass
from typing import Any, Dict, Iterable, Optional, Sequence

import numpy as np
from scipy.special import roots_jacobi

from src.errors import ParameterError

FOUR_PI = 4.0 * np.pi


@dataclass(frozen=True)
class Rule:
    """Quadrature nodes and weights; ``points`` has shape (n,) or (n, 3)."""

    points: np.ndarray
    weights: np.ndarray

    def __len__(self) -> int:
        return len(self.weights)

    def integrate(self, values) -> float:
        return float(np.dot(self.weights, values))


# ------------------------------------------------------------------
# Sphere
# ------------------------------------------------------------------

def _frame_from_axis(axis) -> np.ndarray:
    """Orthonormal rows (e1, e2, e3) with e3 along ``axis``."""
    e3 = np.asarray(axis, dtype=float)
    e3 = e3 / np.linalg.norm(e3)
    helper = np.array([1.0, 0.0, 0.0]) if abs(e3[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = helper - np.dot(helper, e3) * e3
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(e3, e1)
    return np.vstack([e1, e2, e3])


def sphere_rule(n_theta: int, n_phi: int, axis: Optional[Sequence[float]] = None) -> Rule:
    """Product rule on S^2, exact for polynomials of degree < min(2 n_theta, n_phi).

    With ``axis`` the polar direction is rotated onto it; integrands depending
    on the angle to ``axis`` then see a 1-D Gauss-Legendre rule.
    """
    if n_theta < 1 or n_phi < 1:
        raise ParameterError(f"sphere rule needs n_theta, n_phi >= 1, got {n_theta}, {n_phi}")
    mu, w_mu = np.polynomial.legendre.leggauss(n_theta)
    phi = (np.arange(n_phi) + 0.5) * (2.0 * np.pi / n_phi)
    sin_t = np.sqrt(1.0 - mu * mu)
    pts = np.stack(
        [
            np.outer(sin_t, np.cos(phi)).ravel(),
            np.outer(sin_t, np.sin(phi)).ravel(),
            np.repeat(mu, n_phi),
        ],
        axis=-1,
    )
    wts = np.repeat(w_mu, n_phi) * (2.0 * np.pi / n_phi)
    if axis is not None:
        pts = pts @ _frame_from_axis(axis)
    pts /= np.linalg.norm(pts, axis=1)[:, None]
    return Rule(pts, wts)


def reflected(rule: Rule) -> Rule:
    """The same rule with every node sent to its antipode."""
    return Rule(-rule.points, rule.weights)


# ------------------------------------------------------------------
# Radial
# ------------------------------------------------------------------

def jacobi_radial_rule(n: int, u_max: float, power: float) -> Rule:
    """Rule for integral_0^u_max r^power F(r) dr with power > -1."""
    if power <= -1.0:
        raise ParameterError(f"radial weight r^{power} is not integrable at 0")
    if u_max <= 0.0:
        raise ParameterError(f"u_max must be positive, got {u_max}")
    x, w = roots_jacobi(n, 0.0, power)
    half = 0.5 * u_max
    return Rule(half * (1.0 + x), w * half ** (power + 1.0))


def legendre_rule(n: int, a: float, b: float) -> Rule:
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return Rule(a + half * (1.0 + x), w * half)


def ball_rule(center, radius: float, n_radial: int, n_theta: int, n_phi: int) -> Rule:
    """3-D rule on the ball |v - center| <= radius built from spherical shells."""
    radial = jacobi_radial_rule(n_radial, radius, 2.0)
    angular = sphere_rule(n_theta, n_phi)
    pts = (radial.points[:, None, None] * angular.points[None, :, :]).reshape(-1, 3)
    wts = np.outer(radial.weights, angular.weights).ravel()
    return Rule(pts + np.asarray(center, dtype=float), wts)


def hermite_product_rule(center, scale, n: int) -> Rule:
    """Rule for integral F(z) exp(-|z-center|^2 / (2 scale^2)) dz on R^3."""
    x, w = np.polynomial.hermite_e.hermegauss(n)
    grid = np.stack(np.meshgrid(x, x, x, indexing="ij"), axis=-1).reshape(-1, 3)
    wts = np.prod(np.stack(np.meshgrid(w, w, w, indexing="ij"), axis=-1).reshape(-1, 3), axis=1)
    scale = float(scale)
    return Rule(np.asarray(center, dtype=float) + scale * grid, wts * scale ** 3)


# ------------------------------------------------------------------
# Collision grid
# ------------------------------------------------------------------

@dataclass(frozen=True)
class QuadratureGrid:
    """Nodes for the du d(omega) integral, with u = v + r * omega_u.

    ``radial`` integrates r^(gamma+1) F(r) on (0, u_max]; the remaining r^1 of
    the r^2 measure and the smooth factor (g/r)^gamma are carried by the integrand.
    """

    radial: Rule
    sphere_u: Rule
    sphere_omega: Rule
    u_max: float
    gamma: float
    shape: tuple

    @classmethod
    def build(
        cls,
        gamma: float,
        u_max: float,
        n_radial: int = 24,
        n_theta: int = 8,
        n_phi: int = 16,
        n_theta_omega: Optional[int] = None,
        n_phi_omega: Optional[int] = None,
    ) -> "QuadratureGrid":
        n_theta_omega = n_theta_omega or n_theta
        n_phi_omega = n_phi_omega or n_phi
        return cls(
            radial=jacobi_radial_rule(n_radial, u_max, gamma + 1.0),
            sphere_u=sphere_rule(n_theta, n_phi),
            sphere_omega=sphere_rule(n_theta_omega, n_phi_omega),
            u_max=float(u_max),
            gamma=float(gamma),
            shape=(n_radial, n_theta, n_phi, n_theta_omega, n_phi_omega),
        )

    @classmethod
    def for_distributions(
        cls,
        gamma: float,
        distributions: Iterable[Any],
        v_points,
        n_radial: int = 24,
        n_theta: int = 8,
        n_phi: int = 16,
        tails: float = 8.0,
    ) -> "QuadratureGrid":
        """Truncate at max over v of |center - v| + tails * spread."""
        v_points = np.atleast_2d(np.asarray(v_points, dtype=float))
        u_max = 0.0
        for dist in distributions:
            center = np.asarray(dist.center, dtype=float)
            offset = np.max(np.linalg.norm(v_points - center, axis=1))
            u_max = max(u_max, offset + tails * dist.spread)
        if u_max <= 0.0:
            raise ParameterError("cannot size a collision grid without distributions")
        return cls.build(gamma, u_max, n_radial, n_theta, n_phi)

    def refined(self, factor: int = 2) -> "QuadratureGrid":
        n_r, n_t, n_p, n_to, n_po = self.shape
        return QuadratureGrid.build(
            self.gamma, self.u_max, n_r * factor, n_t * factor, n_p * factor,
            n_to * factor, n_po * factor,
        )

    @property
    def size(self) -> int:
        return len(self.radial) * len(self.sphere_u) * len(self.sphere_omega)

    def validate(self) -> Dict[str, Any]:
        """Returns ``{"valid": bool, "errors": [...]}`` for the grid invariants."""
        errors = []
        for name, rule in (("radial", self.radial), ("sphere_u", self.sphere_u),
                           ("sphere_omega", self.sphere_omega)):
            if np.any(rule.weights <= 0.0):
                errors.append(f"{name}: non-positive weight")
        for name, rule in (("sphere_u", self.sphere_u), ("sphere_omega", self.sphere_omega)):
            total = float(np.sum(rule.weights))
            if abs(total - FOUR_PI) > 1e-10:
                errors.append(f"{name}: weights sum to {total!r}, expected 4*pi")
        p = self.gamma + 1.0
        exact = self.u_max ** (p + 1.0) / (p + 1.0)
        approx = float(np.sum(self.radial.weights))
        if abs(approx - exact) > 1e-8 * exact:
            errors.append(f"radial: integral of r^{p} is {approx!r}, expected {exact!r}")
        return {"valid": not errors, "errors": errors}

    def to_dict(self) -> Dict[str, Any]:
        return {"gamma": self.gamma, "u_max": self.u_max, "shape": list(self.shape)}
