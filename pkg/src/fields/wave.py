"""Homogeneous wave propagator (Kirchhoff spherical means) and a radial FD oracle.

    u(t, x) = mean f0 + c t mean(omega . grad f0) + t mean f1,

means taken over the sphere |y - x| = c t.  ``radial_wave_fd`` integrates the
radially symmetric problem independently through w = r u, which satisfies the
1-D wave equation with w(t, 0) = 0.
"""

import logging
from typing import Callable, Optional

import numpy as np

from src.collision.identities import ConvergenceStudy, convergence_study
from src.collision.quadrature import FOUR_PI, Rule, sphere_rule
from src.errors import ParameterError

log = logging.getLogger(__name__)


# ------------------------------------------------------------------
# Scalar data on R^3
# ------------------------------------------------------------------

class ScalarField:
    """Initial datum with an exact gradient; broadcasts over (..., 3)."""

    def evaluate(self, x) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, x) -> np.ndarray:
        raise NotImplementedError


class ZeroField(ScalarField):
    def evaluate(self, x):
        return np.zeros(np.shape(x)[:-1])

    def gradient(self, x):
        return np.zeros(np.shape(x))


class RadialBump(ScalarField):
    """C-infinity bump A exp(1 - 1/(1 - |x-center|^2/R^2)), supported in the ball of radius R."""

    def __init__(self, amplitude: float = 1.0, radius: float = 1.0, center=(0.0, 0.0, 0.0)):
        if radius <= 0.0:
            raise ParameterError(f"bump radius must be positive, got {radius}")
        self.amplitude = float(amplitude)
        self.radius = float(radius)
        self.center = np.asarray(center, dtype=float)

    def profile(self, r) -> np.ndarray:
        q = (np.asarray(r, dtype=float) / self.radius) ** 2
        inside = q < 1.0
        out = np.zeros_like(q)
        out[inside] = self.amplitude * np.exp(1.0 - 1.0 / (1.0 - q[inside]))
        return out

    def evaluate(self, x):
        d = np.asarray(x, dtype=float) - self.center
        return self.profile(np.linalg.norm(d, axis=-1))

    def gradient(self, x):
        d = np.asarray(x, dtype=float) - self.center
        q = np.sum(d * d, axis=-1) / self.radius ** 2
        phi = self.profile(np.sqrt(q) * self.radius)
        factor = np.zeros_like(q)
        inside = q < 1.0
        factor[inside] = -2.0 / (self.radius ** 2 * (1.0 - q[inside]) ** 2)
        return (phi * factor)[..., None] * d


# ------------------------------------------------------------------
# Kirchhoff propagator
# ------------------------------------------------------------------

def default_wave_rule() -> Rule:
    return sphere_rule(64, 128)


def homogeneous_wave(
    f0: ScalarField,
    f1: ScalarField,
    t: float,
    x,
    c: float,
    rule: Optional[Rule] = None,
) -> np.ndarray:
    """Solution of u_tt = c^2 Lap u with u(0) = f0, u_t(0) = f1, at (t, x)."""
    if t < 0.0:
        raise ParameterError(f"homogeneous_wave needs t >= 0, got {t}")
    x = np.asarray(x, dtype=float)
    if t == 0.0:
        return f0.evaluate(x)
    rule = rule or default_wave_rule()
    omega = rule.points
    y = x[..., None, :] + c * t * omega
    w = rule.weights / FOUR_PI
    mean_f0 = np.sum(f0.evaluate(y) * w, axis=-1)
    mean_dn = np.sum(np.sum(f0.gradient(y) * omega, axis=-1) * w, axis=-1)
    mean_f1 = np.sum(f1.evaluate(y) * w, axis=-1)
    return mean_f0 + c * t * mean_dn + t * mean_f1


def wave_residual(
    field_fn: Callable[[float, np.ndarray], float],
    t: float,
    x,
    c: float,
    step: float,
    source: float = 0.0,
) -> float:
    """Signed u_tt - c^2 Lap u - source by second differences of ``field_fn(t, x)``."""
    if step >= t:
        raise ParameterError(f"fd step {step} must be smaller than t = {t}")
    x = np.asarray(x, dtype=float)
    center = field_fn(t, x)
    d_tt = (field_fn(t + step, x) - 2.0 * center + field_fn(t - step, x)) / step ** 2
    lap = 0.0
    for i in range(3):
        e = np.zeros(3)
        e[i] = step
        lap += (field_fn(t, x + e) - 2.0 * center + field_fn(t, x - e)) / step ** 2
    return float(d_tt - c * c * lap - source)


def wave_residual_study(
    f0: ScalarField,
    f1: ScalarField,
    t: float,
    x,
    c: float,
    rule: Optional[Rule] = None,
    first_step: float = 0.08,
    halvings: int = 4,
) -> ConvergenceStudy:
    rule = rule or default_wave_rule()
    fn = lambda s, y: float(homogeneous_wave(f0, f1, s, y, c, rule))  # noqa: E731
    return convergence_study(
        lambda h: wave_residual(fn, t, x, c, h),
        first_step, halvings, "central3", label=f"homogeneous_wave t={t:g} c={c:g}",
    )


# ------------------------------------------------------------------
# Radial finite-difference oracle
# ------------------------------------------------------------------

def radial_wave_fd(
    f0_profile: Callable,
    f1_profile: Callable,
    t: float,
    radii,
    c: float,
    support: float,
    dr: float = 1e-3,
) -> np.ndarray:
    """u(t, r) for radial data supported in r <= ``support``.

    Leapfrog on w = r u at Courant number one, which is exact on the grid; the
    first step is the d'Alembert formula with a Simpson integral of w1.
    """
    radii = np.asarray(radii, dtype=float)
    if np.any(radii <= 0.0):
        raise ParameterError("radial probes must have r > 0")
    if t <= 0.0:
        return np.asarray(f0_profile(radii), dtype=float)
    n_steps = max(1, int(np.ceil(c * t / dr)))
    dr = c * t / n_steps
    r_max = support + c * t + float(np.max(radii)) + 4.0 * dr
    r = np.arange(0.0, r_max + dr, dr)
    w0 = r * f0_profile(r)
    w1 = r * f1_profile(r)

    prev = w0
    cur = np.zeros_like(w0)
    cur[1:-1] = 0.5 * (w0[2:] + w0[:-2]) + (dr / (3.0 * 2.0 * c)) * (w1[:-2] + 4.0 * w1[1:-1] + w1[2:])
    for _ in range(n_steps - 1):
        nxt = np.zeros_like(cur)
        nxt[1:-1] = cur[2:] + cur[:-2] - prev[1:-1]
        prev, cur = cur, nxt
    log.debug("[fields] radial fd: %d cells, %d steps", len(r), n_steps)
    return np.interp(radii, r, cur) / radii
