"""Kernel-density moments and weighted norms of an ensemble."""

import logging
from typing import Dict, Tuple

import numpy as np
from scipy.spatial import cKDTree

from src.errors import ParameterError
from src.kinematics import bracket
from src.simulator.ensemble import ParticleEnsemble

log = logging.getLogger(__name__)

KERNEL_REACH = 5.0
BANDWIDTH_BASE = 0.1


def kde_bandwidth(t: float, base: float = BANDWIDTH_BASE) -> float:
    """Bandwidth growing with the spreading support, base * (1 + t)."""
    return base * (1.0 + t)


def density_moment(state: ParticleEnsemble, probes, bandwidth: float,
                   current: bool = False):
    """Gaussian kernel estimate of J0 = integral f dv (and J = integral vhat f dv) at ``probes``.

    Kernels are cut at ``KERNEL_REACH`` bandwidths.
    """
    if bandwidth <= 0.0:
        raise ParameterError(f"bandwidth must be > 0, got {bandwidth}")
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    rho = np.zeros(len(probes))
    flux = np.zeros((len(probes), 3))
    if len(state) == 0:
        return (rho, flux) if current else rho
    norm = (2.0 * np.pi * bandwidth ** 2) ** -1.5
    tree = cKDTree(state.positions)
    vhat = state.velocities() if current else None
    neighbours = tree.query_ball_point(probes, r=KERNEL_REACH * bandwidth)
    for n, rows in enumerate(neighbours):
        if not rows:
            continue
        rows = np.asarray(rows)
        d = state.positions[rows] - probes[n]
        k = state.weights[rows] * norm * np.exp(-0.5 * np.sum(d * d, axis=-1) / bandwidth ** 2)
        rho[n] = np.sum(k)
        if current:
            flux[n] = k @ vhat[rows]
    return (rho, flux) if current else rho


def probe_lattice(half_width: float, n_per_axis: int, center=(0.0, 0.0, 0.0)) -> np.ndarray:
    axis = np.linspace(-half_width, half_width, n_per_axis)
    grid = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1).reshape(-1, 3)
    return grid + np.asarray(center, dtype=float)


def sup_density(state: ParticleEnsemble, probes, bandwidth: float) -> Tuple[float, np.ndarray]:
    """(max density, probe where it is attained)."""
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    rho = density_moment(state, probes, bandwidth)
    best = int(np.argmax(rho))
    return float(rho[best]), probes[best]


def weighted_sup(state: ParticleEnsemble, n1: int = 5, n2: int = 4) -> float:
    """max over particles of <v>^n1 <x - t vhat>^n2 f, f carried along characteristics."""
    if len(state) == 0:
        return 0.0
    if state.f0_values is None:
        raise ParameterError("weighted norms need f0 values carried by the ensemble")
    spread = state.positions - state.time * state.velocities()
    w = bracket(state.momenta) ** n1 * bracket(spread) ** n2 * state.f0_values
    return float(np.max(w))


def population_temperatures(state: ParticleEnsemble) -> Dict[int, float]:
    """Weighted momentum variance / 3 per population label."""
    if state.labels is None:
        labels = np.zeros(len(state), dtype=int)
    else:
        labels = state.labels
    out = {}
    for label in np.unique(labels):
        rows = labels == label
        w = state.weights[rows]
        total = float(np.sum(w))
        if total <= 0.0:
            continue
        v = state.momenta[rows]
        mean = w @ v / total
        d = v - mean
        out[int(label)] = float(w @ np.sum(d * d, axis=-1) / (3.0 * total))
    return out
