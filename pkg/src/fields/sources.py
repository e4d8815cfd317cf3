"""Phase-space sources g(t, x, v) for the retarded field integrals.

A source exposes exact derivatives and a velocity rule at each cone node.
In ``momentum`` mode the rule is Gauss-Hermite around the velocity profile.
At late retarded times a transported profile is narrow in v, so ``position``
mode integrates over z = y - s vhat instead:

    dv = v0^5 / (c^5 s^3) dz,    v = check_map((y - z) / s),

with Gauss-Hermite nodes around the spatial profile.
"""

import logging
from typing import Tuple

import numpy as np

from src.collision.quadrature import hermite_product_rule
from src.errors import ParameterError
from src.fields.cone import ConeGrid
from src.kinematics import check_map, energy, rel_velocity

log = logging.getLogger(__name__)

_EDGE = 1.0 - 1e-9


def _plain_hermite(center, scale: float, n: int) -> Tuple[np.ndarray, np.ndarray]:
    """Gauss-Hermite nodes reweighted to integrate F(z) dz."""
    rule = hermite_product_rule(center, scale, n)
    d = rule.points - np.asarray(center, dtype=float)
    return rule.points, rule.weights * np.exp(np.sum(d * d, axis=-1) / (2.0 * scale * scale))


class MomentSource:
    """g with exact d_t, grad_x, grad_v; arrays broadcast over leading axes."""

    supports_position = False

    def __init__(self, c: float, x_center=(0.0, 0.0, 0.0), x_width: float = 1.0,
                 v_center=(0.0, 0.0, 0.0), v_width: float = 1.0):
        self.c = float(c)
        self.x_center = np.asarray(x_center, dtype=float)
        self.x_width = float(x_width)
        self.v_center = np.asarray(v_center, dtype=float)
        self.v_width = float(v_width)

    # -- oracles --
    def evaluate(self, s, y, v) -> np.ndarray:
        raise NotImplementedError

    def dt(self, s, y, v) -> np.ndarray:
        raise NotImplementedError

    def grad_x(self, s, y, v) -> np.ndarray:
        raise NotImplementedError

    def grad_v(self, s, y, v) -> np.ndarray:
        raise NotImplementedError

    def transport(self, s, y, v) -> np.ndarray:
        """T0 g = d_t g + vhat . grad_x g."""
        vhat = rel_velocity(v, self.c)
        return self.dt(s, y, v) + np.sum(vhat * self.grad_x(s, y, v), axis=-1)

    # -- velocity integration --
    def position_time(self) -> float:
        """Retarded time after which transport spreading exceeds the spatial width."""
        spread = self.v_width * self.c / float(energy(self.v_center, self.c))
        return self.x_width / spread

    def velocity_rule(self, s, y, grid: ConeGrid) -> Tuple[np.ndarray, np.ndarray]:
        """Nodes (M, K, 3) and weights (M, K) for integral F(v) dv at each (s_m, y_m)."""
        s = np.atleast_1d(np.asarray(s, dtype=float))
        y = np.atleast_2d(np.asarray(y, dtype=float))
        m = len(y)
        pv, wv = _plain_hermite(self.v_center, self.v_width, grid.n_velocity)
        nodes = np.broadcast_to(pv, (m,) + pv.shape).copy()
        weights = np.broadcast_to(wv, (m, len(wv))).copy()
        if not self.supports_position or grid.velocity_mode == "momentum":
            return nodes, weights
        if grid.velocity_mode == "position":
            rows = s > 0.0
        else:
            rows = s > self.position_time()
        if np.any(rows):
            nodes[rows], weights[rows] = self._position_nodes(s[rows], y[rows], grid.n_velocity)
        return nodes, weights

    def _position_nodes(self, s, y, n):
        c = self.c
        pz, wz = _plain_hermite(self.x_center, self.x_width, n)
        vhat = (y[:, None, :] - pz[None, :, :]) / s[:, None, None]
        valid = np.linalg.norm(vhat, axis=-1) < _EDGE * c
        vhat = np.where(valid[..., None], vhat, 0.0)
        v = check_map(vhat, c)
        jac = energy(v, c) ** 5 / (c ** 5 * s[:, None] ** 3)
        return v, np.where(valid, wz * jac, 0.0)

    def moments(self, t: float, x, grid: ConeGrid) -> Tuple[np.ndarray, np.ndarray]:
        """Charge J0 = integral g dv and current J = integral vhat g dv at points x."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        s = np.full(len(x), float(t))
        v, w = self.velocity_rule(s, x, grid)
        g = self.evaluate(s[:, None], x[:, None, :], v)
        j0 = np.sum(w * g, axis=-1)
        j = np.sum((w * g)[..., None] * rel_velocity(v, self.c), axis=-2)
        return j0, j

    def to_dict(self):
        return {
            "kind": type(self).__name__,
            "c": self.c,
            "x_center": self.x_center.tolist(),
            "x_width": self.x_width,
            "v_center": self.v_center.tolist(),
            "v_width": self.v_width,
        }


class ZeroSource(MomentSource):
    def __init__(self, c: float = 1.0):
        super().__init__(c)

    def evaluate(self, s, y, v):
        return np.zeros(np.broadcast_shapes(np.shape(s), np.shape(y)[:-1], np.shape(v)[:-1]))

    def dt(self, s, y, v):
        return self.evaluate(s, y, v)

    def transport(self, s, y, v):
        return self.evaluate(s, y, v)

    def grad_x(self, s, y, v):
        return np.zeros(np.broadcast_shapes(np.shape(s) + (1,), np.shape(y), np.shape(v)))

    grad_v = grad_x


class FreeTransportGaussian(MomentSource):
    """g = A exp(-|x - t vhat - x_c|^2 / (2 sx^2)) exp(-|v - v_c|^2 / (2 sv^2)); T0 g = 0 exactly."""

    supports_position = True

    def __init__(self, c: float, amplitude: float = 1.0, **kwargs):
        super().__init__(c, **kwargs)
        self.amplitude = float(amplitude)

    def _parts(self, s, y, v):
        s = np.asarray(s, dtype=float)
        vhat = rel_velocity(v, self.c)
        d = np.asarray(y, dtype=float) - s[..., None] * vhat - self.x_center
        dv = np.asarray(v, dtype=float) - self.v_center
        g = self.amplitude * np.exp(
            -np.sum(d * d, axis=-1) / (2.0 * self.x_width ** 2)
            - np.sum(dv * dv, axis=-1) / (2.0 * self.v_width ** 2)
        )
        return g, d, dv, vhat

    def evaluate(self, s, y, v):
        return self._parts(s, y, v)[0]

    def dt(self, s, y, v):
        g, d, _, vhat = self._parts(s, y, v)
        return g * np.sum(d * vhat, axis=-1) / self.x_width ** 2

    def grad_x(self, s, y, v):
        g, d, _, _ = self._parts(s, y, v)
        return -(g / self.x_width ** 2)[..., None] * d

    def grad_v(self, s, y, v):
        g, d, dv, _ = self._parts(s, y, v)
        v = np.asarray(v, dtype=float)
        v0 = energy(v, self.c)[..., None]
        jd = (self.c / v0) * (d - v * np.sum(v * d, axis=-1, keepdims=True) / v0 ** 2)
        s = np.asarray(s, dtype=float)[..., None]
        return g[..., None] * (s * jd / self.x_width ** 2 - dv / self.v_width ** 2)

    def transport(self, s, y, v):
        return np.zeros_like(self.evaluate(s, y, v))

    def to_dict(self):
        d = super().to_dict()
        d["amplitude"] = self.amplitude
        return d


class ModulatedGaussian(MomentSource):
    """g = A (1 + eps sin(nu t)) exp(-|x - x_c|^2 / (2 sx^2)) exp(-|v - v_c|^2 / (2 sv^2))."""

    def __init__(self, c: float, amplitude: float = 1.0, eps: float = 0.5, nu: float = 1.0, **kwargs):
        super().__init__(c, **kwargs)
        self.amplitude = float(amplitude)
        self.eps = float(eps)
        self.nu = float(nu)

    def _profile(self, y, v):
        dx = np.asarray(y, dtype=float) - self.x_center
        dv = np.asarray(v, dtype=float) - self.v_center
        p = self.amplitude * np.exp(
            -np.sum(dx * dx, axis=-1) / (2.0 * self.x_width ** 2)
            - np.sum(dv * dv, axis=-1) / (2.0 * self.v_width ** 2)
        )
        return p, dx, dv

    def evaluate(self, s, y, v):
        p, _, _ = self._profile(y, v)
        return (1.0 + self.eps * np.sin(self.nu * np.asarray(s, dtype=float))) * p

    def dt(self, s, y, v):
        p, _, _ = self._profile(y, v)
        return self.eps * self.nu * np.cos(self.nu * np.asarray(s, dtype=float)) * p

    def grad_x(self, s, y, v):
        _, dx, _ = self._profile(y, v)
        return -(self.evaluate(s, y, v) / self.x_width ** 2)[..., None] * dx

    def grad_v(self, s, y, v):
        _, _, dv = self._profile(y, v)
        return -(self.evaluate(s, y, v) / self.v_width ** 2)[..., None] * dv

    def to_dict(self):
        d = super().to_dict()
        d.update(amplitude=self.amplitude, eps=self.eps, nu=self.nu)
        return d


_SOURCES = {
    "free_transport": FreeTransportGaussian,
    "modulated": ModulatedGaussian,
    "zero": ZeroSource,
}


def make_source(kind: str, c: float, **params) -> MomentSource:
    if kind not in _SOURCES:
        raise ParameterError(f"Unknown source '{kind}'. Available: {sorted(_SOURCES)}")
    return _SOURCES[kind](c=c, **params)
