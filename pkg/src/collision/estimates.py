"""Measured-constant scans for the weighted L-infinity bound on Q_c and the kernel majorant.

The weighted bound compares, at fixed (t, x),

    sup_v n(v) |Q_c(h, f)(v)|   with   (1+t)^(-alpha) |n h|_inf |n f|_inf,

n = <x - t vhat>^k <v>^(4k+50) + <x - t vhat>^(k+10) <v>^(2k+20).  The weights
reach 1e100 and beyond, so everything is carried in logarithms.
"""

import logging
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from src.collision.distributions import AnalyticDistribution, TransportedSlice, Zero
from src.collision.kernel import KernelSpec
from src.collision.operator import eval_Q
from src.collision.quadrature import QuadratureGrid, sphere_rule
from src.errors import ParameterError
from src.kinematics import energy

log = logging.getLogger(__name__)

ALPHA_MARGIN = 0.01


def decay_alpha(gamma: float) -> float:
    return (5.0 + gamma) / 3.0 - ALPHA_MARGIN


def log_weight(v, t: float, x, k: float, c: float) -> np.ndarray:
    """log n(t, x, v) for the two-term weight."""
    v = np.asarray(v, dtype=float)
    x = np.asarray(x, dtype=float)
    vhat = c * v / energy(v, c)[..., None]
    d = x - t * vhat
    log_z = 0.5 * np.log1p(np.sum(d * d, axis=-1))
    log_v = 0.5 * np.log1p(np.sum(v * v, axis=-1))
    first = k * log_z + (4.0 * k + 50.0) * log_v
    second = (k + 10.0) * log_z + (2.0 * k + 20.0) * log_v
    return np.logaddexp(first, second)


def _log_abs(values) -> np.ndarray:
    values = np.abs(np.asarray(values, dtype=float))
    with np.errstate(divide="ignore"):
        return np.log(values)


def sup_points(center, radius: float, n_radial: int = 64, n_theta: int = 8, n_phi: int = 16) -> np.ndarray:
    """Radial lines through ``center`` used as the sup-norm sample set."""
    radii = np.linspace(0.0, radius, n_radial)[1:]
    dirs = sphere_rule(n_theta, n_phi).points
    pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
    return np.vstack([np.zeros((1, 3)), pts]) + np.asarray(center, dtype=float)


def probe_points(center, radius: float, n_radial: int = 13) -> np.ndarray:
    """Coarser probes (radial lines along the coordinate axes) for the LHS sup."""
    radii = np.linspace(0.0, radius, n_radial)[1:]
    dirs = np.vstack([np.eye(3), -np.eye(3)])
    pts = (radii[:, None, None] * dirs[None, :, :]).reshape(-1, 3)
    return np.vstack([np.zeros((1, 3)), pts]) + np.asarray(center, dtype=float)


def weighted_Q_bound_ratio(
    h: AnalyticDistribution,
    f: AnalyticDistribution,
    t: float,
    x,
    k: float,
    kernel: KernelSpec,
    grid: Optional[QuadratureGrid] = None,
    probes: Optional[np.ndarray] = None,
    sup_set: Optional[np.ndarray] = None,
    reach: float = 12.0,
) -> float:
    """LHS / RHS of the weighted bound at (t, x), maximised over ``probes``.

    ``h`` and ``f`` are velocity profiles at (t, x); ``reach`` sets the sample
    radius in units of the profiles' spread.
    """
    if k < 10:
        raise ParameterError(f"k must be >= 10, got {k}")
    if t < 0.0:
        raise ParameterError(f"t must be >= 0, got {t}")
    if isinstance(h, Zero) or isinstance(f, Zero):
        return 0.0
    c = kernel.c
    center = 0.5 * (np.asarray(h.center) + np.asarray(f.center))
    radius = reach * max(h.spread, f.spread) + 0.5 * float(np.linalg.norm(np.asarray(h.center) - f.center))
    if probes is None:
        probes = probe_points(center, radius)
    if sup_set is None:
        sup_set = np.vstack([sup_points(center, radius), probes])
    if grid is None:
        grid = QuadratureGrid.for_distributions(kernel.gamma, [h, f], probes, n_radial=24, n_theta=8, n_phi=16)

    lw_sup = log_weight(sup_set, t, x, k, c)
    log_norm_h = float(np.max(lw_sup + _log_abs(h.evaluate(sup_set))))
    log_norm_f = float(np.max(lw_sup + _log_abs(f.evaluate(sup_set))))
    if not np.isfinite(log_norm_h) or not np.isfinite(log_norm_f):
        return 0.0

    q = np.array([eval_Q(h, f, p, kernel, grid) for p in probes])
    log_lhs = float(np.max(log_weight(probes, t, x, k, c) + _log_abs(q)))
    if not np.isfinite(log_lhs):
        return 0.0
    log_rhs = -decay_alpha(kernel.gamma) * np.log1p(t) + log_norm_h + log_norm_f
    ratio = float(np.exp(log_lhs - log_rhs))
    log.debug("[collision] weighted bound t=%g ratio=%.4g", t, ratio)
    return ratio


def weighted_Q_scan(
    h_base: AnalyticDistribution,
    f_base: AnalyticDistribution,
    times: Sequence[float],
    x,
    k: float,
    kernel: KernelSpec,
    width: float = 1.0,
    **kwargs,
) -> List[Dict[str, Any]]:
    """Ratios along a time sweep for free-transport data with Gaussian spatial profile ``width``."""
    rows = []
    for t in times:
        h = TransportedSlice(h_base, t, x, kernel.c, width=width)
        f = TransportedSlice(f_base, t, x, kernel.c, width=width)
        ratio = weighted_Q_bound_ratio(h, f, t, x, k, kernel, **kwargs)
        rows.append({"t": float(t), "k": float(k), "gamma": kernel.gamma, "c": kernel.c, "ratio": ratio})
    return rows


def majorant_ratio(v, u, kernel: KernelSpec, cos_theta=1.0) -> np.ndarray:
    """v_phi sigma / (1 + |v-u|^gamma); at most 1 for every admissible kernel."""
    return kernel.kernel(v, u, cos_theta) / kernel.majorant(v, u)
