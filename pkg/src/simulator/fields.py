"""Field models for the particle push.

Prescribed models are closed-form (E, B) oracles.  The self-consistent model
keeps a ring buffer of particle snapshots and evaluates the retarded
representation on a coarse probe lattice: every tracked particle
contributes through its retarded point, found on the piecewise-linear
history where |X(s) - x| = c (t - s), with the 1/q Jacobian of that
constraint.  The data term over |y - x| = ct uses f0 directly.
"""

import collections
import logging
from typing import Any, Deque, Dict, Optional, Tuple

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from src.collision.quadrature import FOUR_PI
from src.errors import ParameterError
from src.fields.cone import ConeGrid
from src.fields.glassey_strauss import initial_data_terms
from src.fields.sources import MomentSource
from src.kinematics import energy, rel_velocity
from src.simulator.ensemble import ParticleEnsemble, PhaseSpaceDensity

log = logging.getLogger(__name__)


class FieldModel:
    """(E, B) at (t, x); x has shape (n, 3)."""

    def __call__(self, t: float, x) -> Tuple[np.ndarray, np.ndarray]:
        raise NotImplementedError

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": type(self).__name__}


class UniformField(FieldModel):
    def __init__(self, E=(0.0, 0.0, 0.0), B=(0.0, 0.0, 0.0)):
        self.E = np.asarray(E, dtype=float)
        self.B = np.asarray(B, dtype=float)

    def __call__(self, t, x):
        n = len(np.atleast_2d(x))
        return np.tile(self.E, (n, 1)), np.tile(self.B, (n, 1))

    def to_dict(self):
        return {"kind": "uniform", "E": self.E.tolist(), "B": self.B.tolist()}


class DecayingField(FieldModel):
    """Fields with the near-vacuum envelopes.

    E = eps x/<x> / ((1+t+|x|)(1+|t-|x|/c|)) is purely radial; the magnetic
    part eps (axis x x)/<x> / (1+t+|x|)^2 is tangential and decays one order
    faster, like the good null components.
    """

    def __init__(self, eps: float = 0.1, c: float = 1.0, axis=(0.0, 0.0, 1.0)):
        self.eps = float(eps)
        self.c = float(c)
        axis = np.asarray(axis, dtype=float)
        self.axis = axis / np.linalg.norm(axis)

    def __call__(self, t, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        r = np.linalg.norm(x, axis=-1)
        unit = x / np.sqrt(1.0 + r * r)[:, None]
        lead = 1.0 + t + r
        E = self.eps * unit / (lead * (1.0 + np.abs(t - r / self.c)))[:, None]
        B = self.eps * np.cross(self.axis, unit) / (lead * lead)[:, None]
        return E, B

    def to_dict(self):
        return {"kind": "decaying", "eps": self.eps, "c": self.c, "axis": self.axis.tolist()}


_PRESCRIBED = {
    "decaying": DecayingField,
    "uniform": UniformField,
}


def make_prescribed(kind: str, **params) -> FieldModel:
    if kind not in _PRESCRIBED:
        raise ParameterError(f"Unknown prescribed field '{kind}'. Available: {sorted(_PRESCRIBED)}")
    return _PRESCRIBED[kind](**params)


# ------------------------------------------------------------------
# Self-consistent fields
# ------------------------------------------------------------------

class DensitySource(MomentSource):
    """g(0, y, v) = f0(y, v), for the data term only."""

    def __init__(self, f0: PhaseSpaceDensity, c: float):
        super().__init__(c, x_center=f0.x_center, x_width=f0.x_width,
                         v_center=f0.v_center, v_width=f0.v_width)
        self.f0 = f0

    def evaluate(self, s, y, v):
        return self.f0.evaluate(y, v)


def retarded_points(times, positions, x, t: float, c: float):
    """Segment index and offset of each particle's retarded point seen from (t, x).

    ``positions`` has shape (K, m, 3) at increasing ``times``; returns
    (k, sigma, valid) with the retarded time times[k] + sigma.
    """
    times = np.asarray(times, dtype=float)
    phi = c * (t - times)[:, None] - np.linalg.norm(positions - x, axis=-1)
    count = np.sum(phi >= 0.0, axis=0)
    valid = (count >= 1) & (count < len(times))
    k = np.clip(count - 1, 0, len(times) - 2)
    m = np.arange(positions.shape[1])
    h = times[k + 1] - times[k]
    delta = (positions[k + 1, m] - positions[k, m]) / h[:, None]
    d = positions[k, m] - x
    T = c * (t - times[k])
    a = np.sum(delta * delta, axis=-1) - c * c
    b = np.sum(d * delta, axis=-1) + c * T
    q = np.sum(d * d, axis=-1) - T * T
    disc = np.sqrt(np.maximum(b * b - a * q, 0.0))
    sigma = np.clip(-q / (b + disc), 0.0, h)
    return k, sigma, valid


class SelfConsistentField(FieldModel):
    """Retarded fields of the ensemble itself, refreshed by ``solve``.

    A fixed subset of at most ``max_particles`` particles, reweighted to the
    full mass, is tracked.  Denominators use sqrt(tau^2 + softening^2).
    """

    def __init__(self, f0: PhaseSpaceDensity, c: float, n_lattice: int = 5, margin: float = 1.0,
                 history: int = 512, max_particles: int = 2000, softening: float = 0.1,
                 data_grid: Optional[ConeGrid] = None, seed: int = 0):
        if n_lattice < 2:
            raise ParameterError(f"the probe lattice needs n_lattice >= 2, got {n_lattice}")
        if history < 2:
            raise ParameterError(f"the snapshot buffer needs history >= 2, got {history}")
        self.c = float(c)
        self.source = DensitySource(f0, c)
        self.n_lattice = int(n_lattice)
        self.margin = float(margin)
        self.max_particles = int(max_particles)
        self.softening = float(softening)
        self.data_grid = data_grid or ConeGrid(n_shells=1, n_theta=16, n_phi=32, n_velocity=4)
        self.seed = int(seed)
        self.snapshots: Deque[Tuple[float, np.ndarray, np.ndarray]] = collections.deque(maxlen=int(history))
        self._rows: Optional[np.ndarray] = None
        self._weights: Optional[np.ndarray] = None
        self._interp: Optional[Tuple[RegularGridInterpolator, RegularGridInterpolator]] = None
        self._bounds: Optional[np.ndarray] = None
        self.skipped = 0

    # -- history --
    def record(self, state: ParticleEnsemble) -> None:
        if self._rows is None:
            n = len(state)
            rng = np.random.default_rng(self.seed)
            size = min(n, self.max_particles)
            self._rows = np.sort(rng.choice(n, size=size, replace=False)) if size < n else np.arange(n)
            w = state.weights[self._rows]
            total = float(np.sum(w))
            self._weights = w * (state.total_weight / total) if total > 0.0 else w
        if self.snapshots and state.time <= self.snapshots[-1][0]:
            self.snapshots.pop()
        self.snapshots.append((state.time, state.positions[self._rows].copy(), state.momenta[self._rows].copy()))

    @property
    def complete(self) -> bool:
        """True while the oldest snapshot is still t = 0."""
        return bool(self.snapshots) and self.snapshots[0][0] == 0.0

    # -- evaluation --
    def probe(self, t: float, x) -> Tuple[np.ndarray, np.ndarray]:
        """(E, B) at the single point x from the recorded history up to time t."""
        x = np.asarray(x, dtype=float)
        E = np.zeros(3)
        B = np.zeros(3)
        if len(self.snapshots) >= 2:
            e_p, b_p = self._particle_terms(t, x)
            E += e_p
            B += b_p
        e_d, b_d = initial_data_terms(self.source, t, x, self.c, self.data_grid)
        return E + e_d, B + b_d

    def _particle_terms(self, t: float, x):
        c = self.c
        times = np.array([snap[0] for snap in self.snapshots])
        X = np.stack([snap[1] for snap in self.snapshots])
        V = np.stack([snap[2] for snap in self.snapshots])
        k, sigma, valid = retarded_points(times, X, x, t, c)
        if not self.complete:
            self.skipped += int(np.sum(~valid))
        m = np.arange(X.shape[1])
        h = times[k + 1] - times[k]
        frac = (sigma / h)[:, None]
        y = X[k, m] + frac * (X[k + 1, m] - X[k, m])
        v = V[k, m] + frac * (V[k + 1, m] - V[k, m])
        force = (V[k + 1, m] - V[k, m]) / h[:, None]
        tau = c * (t - times[k] - sigma)
        valid &= tau > 0.0
        if not np.any(valid):
            return np.zeros(3), np.zeros(3)
        y, v, force, tau = y[valid], v[valid], force[valid], tau[valid]
        w = self._weights[valid]
        omega = (y - x) / tau[:, None]
        v0 = energy(v, c)
        vhat = rel_velocity(v, c)
        q = 1.0 + np.sum(omega * vhat, axis=-1) / c
        n_vec = omega + vhat / c
        cross = np.cross(vhat, omega)
        soft2 = tau * tau + self.softening ** 2
        scale = c * c / v0 ** 2
        w2 = w * scale / (q ** 3 * soft2)
        E = -np.einsum("m,md->d", w2, n_vec) / FOUR_PI
        B = np.einsum("m,md->d", w2, cross) / (FOUR_PI * c)
        # directional derivative of the kernels along the momentum change
        dvhat = (c / v0)[:, None] * (force - vhat * (np.sum(vhat * force, axis=-1) / (c * c))[:, None])
        dq = np.sum(omega * dvhat, axis=-1) / c
        da = dvhat / (c * q)[:, None] - n_vec * (dq / q ** 2)[:, None]
        db = np.cross(dvhat, omega) / q[:, None] - cross * (dq / q ** 2)[:, None]
        w1 = w / (np.sqrt(soft2) * q)
        E -= np.einsum("m,md->d", w1, da) / (FOUR_PI * c)
        B += np.einsum("m,md->d", w1, db) / (FOUR_PI * c * c)
        return E, B

    def lattice(self, state: ParticleEnsemble) -> Tuple[np.ndarray, np.ndarray]:
        """Axis-aligned box around the particles, padded by ``margin``."""
        lo = np.min(state.positions, axis=0) - self.margin
        hi = np.max(state.positions, axis=0) + self.margin
        return lo, hi

    def solve(self, state: ParticleEnsemble) -> None:
        """Record ``state`` and refresh (E, B) on the probe lattice."""
        self.record(state)
        if len(state) == 0:
            self._interp = None
            return
        lo, hi = self.lattice(state)
        axes = [np.linspace(lo[d], hi[d], self.n_lattice) for d in range(3)]
        grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1)
        E = np.zeros(grid.shape)
        B = np.zeros(grid.shape)
        for idx in np.ndindex(*grid.shape[:3]):
            E[idx], B[idx] = self.probe(state.time, grid[idx])
        self._interp = (RegularGridInterpolator(axes, E), RegularGridInterpolator(axes, B))
        self._bounds = np.stack([lo, hi])
        log.debug("[simulator] field lattice t=%g max|E|=%.3e max|B|=%.3e", state.time,
                  float(np.max(np.linalg.norm(E, axis=-1))), float(np.max(np.linalg.norm(B, axis=-1))))

    def __call__(self, t, x):
        x = np.atleast_2d(np.asarray(x, dtype=float))
        if self._interp is None:
            return np.zeros_like(x), np.zeros_like(x)
        pts = np.clip(x, self._bounds[0], self._bounds[1])
        return self._interp[0](pts), self._interp[1](pts)

    def to_dict(self):
        return {
            "kind": "glassey_strauss",
            "n_lattice": self.n_lattice,
            "history": self.snapshots.maxlen,
            "max_particles": self.max_particles,
            "softening": self.softening,
        }
