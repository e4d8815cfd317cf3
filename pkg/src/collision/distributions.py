"""Momentum-space test distributions with exact value, gradient and Hessian oracles.

Every distribution exposes ``center`` and ``spread`` so collision grids can
be truncated where its tails are negligible.  Derived distributions
(v0 d_j f, rotations of f) take their derivatives from the base oracle.
"""

from typing import Optional

import numpy as np

from src.errors import MissingDerivativeError, ParameterError
from src.kinematics import energy


class AnalyticDistribution:
    """Base class.  Subclasses implement evaluate/gradient and optionally hessian."""

    center = np.zeros(3)
    spread = 1.0

    def evaluate(self, v) -> np.ndarray:
        raise NotImplementedError

    def gradient(self, v) -> np.ndarray:
        raise NotImplementedError

    def hessian(self, v) -> np.ndarray:
        raise MissingDerivativeError(f"{type(self).__name__} provides no Hessian")

    def __call__(self, v):
        return self.evaluate(v)


class Zero(AnalyticDistribution):
    def evaluate(self, v):
        return np.zeros(np.shape(v)[:-1])

    def gradient(self, v):
        return np.zeros(np.shape(v))

    def hessian(self, v):
        return np.zeros(np.shape(v) + (3,))


class Gaussian(AnalyticDistribution):
    """amplitude * exp(-(v - center)^T C^{-1} (v - center) / 2)."""

    def __init__(self, amplitude: float = 1.0, center=(0.0, 0.0, 0.0), covariance=1.0):
        cov = np.asarray(covariance, dtype=float)
        if cov.ndim == 0:
            cov = float(cov) * np.eye(3)
        eig = np.linalg.eigvalsh(cov)
        if np.any(eig <= 0.0):
            raise ParameterError(f"covariance must be positive definite, eigenvalues {eig}")
        self.amplitude = float(amplitude)
        self.center = np.asarray(center, dtype=float)
        self.covariance = cov
        self.precision = np.linalg.inv(cov)
        self.spread = float(np.sqrt(np.max(eig)))

    @classmethod
    def normalized(cls, mass: float = 1.0, center=(0.0, 0.0, 0.0), temperature: float = 1.0):
        """Isotropic Gaussian of total mass ``mass`` and variance ``temperature``."""
        amp = mass / (2.0 * np.pi * temperature) ** 1.5
        return cls(amp, center, temperature)

    @property
    def mass(self) -> float:
        return float(self.amplitude * (2.0 * np.pi) ** 1.5 * np.sqrt(np.linalg.det(self.covariance)))

    def _delta(self, v):
        return np.asarray(v, dtype=float) - self.center

    def evaluate(self, v):
        d = self._delta(v)
        q = np.einsum("...i,ij,...j->...", d, self.precision, d)
        return self.amplitude * np.exp(-0.5 * q)

    def gradient(self, v):
        d = self._delta(v)
        return -self.evaluate(v)[..., None] * (d @ self.precision)

    def hessian(self, v):
        d = self._delta(v)
        pd = d @ self.precision
        val = self.evaluate(v)[..., None, None]
        return val * (pd[..., :, None] * pd[..., None, :] - self.precision)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        return rng.multivariate_normal(self.center, self.covariance, size=n)

    def __repr__(self) -> str:
        return f"Gaussian(amplitude={self.amplitude:.4g}, center={self.center.tolist()}, spread={self.spread:.4g})"


class Juttner(AnalyticDistribution):
    """Relativistic equilibrium amplitude * exp(-v0 / T)."""

    def __init__(self, temperature: float = 1.0, c: float = 1.0, amplitude: Optional[float] = None):
        if temperature <= 0.0:
            raise ParameterError(f"temperature must be positive, got {temperature}")
        self.temperature = float(temperature)
        self.c = float(c)
        # normalise the peak to one so the magnitude does not depend on c
        self.amplitude = float(np.exp(c / temperature)) if amplitude is None else float(amplitude)
        self.center = np.zeros(3)
        self.spread = 3.0 * self.temperature * max(1.0, np.sqrt(c / self.temperature))

    def evaluate(self, v):
        return self.amplitude * np.exp(-energy(v, self.c) / self.temperature)

    def gradient(self, v):
        v = np.asarray(v, dtype=float)
        v0 = energy(v, self.c)
        return -(self.evaluate(v) / (v0 * self.temperature))[..., None] * v

    def hessian(self, v):
        v = np.asarray(v, dtype=float)
        v0 = energy(v, self.c)[..., None, None]
        f = self.evaluate(v)[..., None, None]
        T = self.temperature
        vv = v[..., :, None] * v[..., None, :]
        eye = np.eye(3)
        # d_k (-f v_j / (v0 T))
        return f * (vv / (v0 * T) ** 2 + vv / (v0 ** 3 * T) - eye / (v0 * T))


class ScaledDerivative(AnalyticDistribution):
    """v0 * d_{v_j} base."""

    def __init__(self, base: AnalyticDistribution, j: int, c: float):
        self.base = base
        self.j = int(j)
        self.c = float(c)
        self.center = base.center
        self.spread = base.spread

    def evaluate(self, v):
        return energy(v, self.c) * self.base.gradient(v)[..., self.j]

    def gradient(self, v):
        v = np.asarray(v, dtype=float)
        v0 = energy(v, self.c)
        gj = self.base.gradient(v)[..., self.j]
        return (v / v0[..., None]) * gj[..., None] + v0[..., None] * self.base.hessian(v)[..., self.j, :]


class RotationDerivative(AnalyticDistribution):
    """(v_j d_{v_i} - v_i d_{v_j}) base."""

    def __init__(self, base: AnalyticDistribution, i: int, j: int):
        self.base = base
        self.i = int(i)
        self.j = int(j)
        self.center = base.center
        self.spread = base.spread

    def evaluate(self, v):
        v = np.asarray(v, dtype=float)
        grad = self.base.gradient(v)
        return v[..., self.j] * grad[..., self.i] - v[..., self.i] * grad[..., self.j]

    def gradient(self, v):
        v = np.asarray(v, dtype=float)
        grad = self.base.gradient(v)
        hess = self.base.hessian(v)
        out = v[..., self.j, None] * hess[..., self.i, :] - v[..., self.i, None] * hess[..., self.j, :]
        out[..., self.j] += grad[..., self.i]
        out[..., self.i] -= grad[..., self.j]
        return out


class Weighted(AnalyticDistribution):
    """weight(v) * |base(v)|; value oracle only, used for weighted collision bounds."""

    def __init__(self, base: AnalyticDistribution, weight):
        self.base = base
        self.weight = weight
        self.center = base.center
        self.spread = base.spread

    def evaluate(self, v):
        return self.weight(v) * np.abs(self.base.evaluate(v))

    def gradient(self, v):
        raise MissingDerivativeError("Weighted distributions carry values only")


class TransportedSlice(AnalyticDistribution):
    """Velocity slice at (t, x) of free transport of exp(-|x - x_c|^2 / (2 width^2)) * base(v).

    value(v) = exp(-|x - t vhat - x_c|^2 / (2 width^2)) * base(v); value oracle only.
    """

    def __init__(self, base: AnalyticDistribution, t: float, x, c: float, x_center=(0.0, 0.0, 0.0),
                 width: float = 1.0):
        self.base = base
        self.t = float(t)
        self.x = np.asarray(x, dtype=float)
        self.c = float(c)
        self.x_center = np.asarray(x_center, dtype=float)
        self.width = float(width)
        self.center = base.center
        self.spread = base.spread

    def evaluate(self, v):
        v = np.asarray(v, dtype=float)
        vhat = self.c * v / energy(v, self.c)[..., None]
        d = self.x - self.t * vhat - self.x_center
        return np.exp(-0.5 * np.sum(d * d, axis=-1) / self.width ** 2) * self.base.evaluate(v)

    def gradient(self, v):
        raise MissingDerivativeError("TransportedSlice carries values only")
