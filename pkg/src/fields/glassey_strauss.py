"""Retarded (Glassey-Strauss) representation of the fields generated by g.

With F solving F_tt - c^2 Lap F = -integral (c^2 d_i + vhat_i d_t) g dv and
zero data, F_i = term1 + term2 + term3, where with q = 1 + omega.vhat/c,
r = |y - x| and g taken at the retarded time t - r/c:

    term1 = -1/(4 pi c)  int_cone int (omega_i + vhat_i/c)/q        T0 g / r
    term2 = -1/(4 pi)    int_cone int (omega_i + vhat_i/c)/q^2 (c^2/v0^2) g / r^2
    term3 = -1/(4 pi c t) int_{r=ct} int [omega_i - (omega_i + vhat_i/c)(omega.vhat/c)/q] g(0)

The magnetic part solves F~_tt - c^2 Lap F~ = c integral (vhat_i d_j - vhat_j d_i) g dv
and carries the kernel (vhat x omega)_k with prefactors 1/(4 pi c^2), 1/(4 pi c),
1/(4 pi c^2 t).  B_k = F~_ij for (i, j, k) cyclic.
"""

import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from src.collision.identities import ConvergenceStudy, convergence_study
from src.collision.quadrature import FOUR_PI, sphere_rule
from src.errors import ParameterError
from src.fields.cone import ConeGrid, cone_nodes, initial_sphere_nodes
from src.fields.frame import FieldSample
from src.fields.sources import MomentSource, ZeroSource
from src.fields.wave import wave_residual
from src.kinematics import energy, rel_velocity

log = logging.getLogger(__name__)

_CHUNK_BUDGET = 2_000_000
_CYCLIC = {(1, 2): 0, (2, 0): 1, (0, 1): 2}


def _pair_index(i: int, j: int) -> Tuple[int, float]:
    """(k, sign) with F~_ij = sign * B_k."""
    if (i, j) in _CYCLIC:
        return _CYCLIC[(i, j)], 1.0
    if (j, i) in _CYCLIC:
        return _CYCLIC[(j, i)], -1.0
    raise ParameterError(f"magnetic index needs i != j in 0..2, got ({i}, {j})")


# ------------------------------------------------------------------
# Kernels
# ------------------------------------------------------------------

def _kernel_parts(omega, v, c):
    omega = np.asarray(omega, dtype=float)
    v = np.asarray(v, dtype=float)
    vhat = rel_velocity(v, c)
    q = 1.0 + np.sum(omega * vhat, axis=-1) / c
    v2 = np.sum(vhat * vhat, axis=-1) / (c * c)
    scale = c * c / energy(v, c) ** 2
    return omega, vhat, q, v2, scale


def gs_kernel_a(omega, v, c: float, i: int, k: int) -> np.ndarray:
    omega, vhat, q, v2, scale = _kernel_parts(omega, v, c)
    n_i = omega[..., i] + vhat[..., i] / c
    num = 3.0 * n_i * (-(vhat[..., k] / c) * q + (v2 - 1.0) * omega[..., k]) + q * q * float(i == k)
    return num / q ** 4 * scale


def gs_kernel_b(omega, v, c: float, i: int, j: int, k: int) -> np.ndarray:
    omega, vhat, q, v2, scale = _kernel_parts(omega, v, c)
    first = (float(i == k) * vhat[..., j] - float(j == k) * vhat[..., i]) / q ** 2
    cross = omega[..., i] * vhat[..., j] - omega[..., j] * vhat[..., i]
    second = cross * ((-3.0 + 3.0 * v2) * omega[..., k] - 3.0 * (vhat[..., k] / c) * q) / q ** 4
    return scale * (first + second)


def kernel_sphere_integral(kind: str, v, c: float, indices: Sequence[int],
                           n_theta: int = 64, n_phi: int = 16) -> float:
    """integral over S^2 of kernel a (indices i, k) or b (indices i, j, k) at momentum v."""
    v = np.asarray(v, dtype=float)
    axis = v if np.linalg.norm(v) > 0.0 else None
    rule = sphere_rule(n_theta, n_phi, axis=axis)
    if kind == "a":
        values = gs_kernel_a(rule.points, v, c, *indices)
    elif kind == "b":
        values = gs_kernel_b(rule.points, v, c, *indices)
    else:
        raise ParameterError(f"Unknown kernel '{kind}'. Available: ['a', 'b']")
    return rule.integrate(values)


def kernel_means_scan(n: int, seed: int = 0, c_range=(1.0, 100.0), speed_ratio: float = 3.0,
                      n_theta: int = 64, n_phi: int = 16) -> Dict[str, Any]:
    """Largest |integral a| and |integral b| over random (v, c) and all index choices."""
    rng = np.random.default_rng(seed)
    worst = {"a": 0.0, "b": 0.0}
    for _ in range(n):
        c = float(np.exp(rng.uniform(*np.log(c_range))))
        direction = rng.normal(size=3)
        v = direction / np.linalg.norm(direction) * c * speed_ratio * rng.uniform()
        for i in range(3):
            for k in range(3):
                worst["a"] = max(worst["a"], abs(kernel_sphere_integral("a", v, c, (i, k), n_theta, n_phi)))
                for j in range(3):
                    worst["b"] = max(
                        worst["b"], abs(kernel_sphere_integral("b", v, c, (i, j, k), n_theta, n_phi))
                    )
    log.info("[fields] kernel means n=%d max|a|=%.3e max|b|=%.3e", n, worst["a"], worst["b"])
    return {"n": n, "max_abs_a": worst["a"], "max_abs_b": worst["b"]}


# ------------------------------------------------------------------
# Retarded integrals
# ------------------------------------------------------------------

@dataclass
class RetardedTerms:
    """Rows are (term1, term2, term3); electric columns are i, magnetic columns are B_k."""

    electric: np.ndarray
    magnetic: np.ndarray
    t: float
    x: np.ndarray

    @property
    def E(self) -> np.ndarray:
        return self.electric.sum(axis=0)

    @property
    def B(self) -> np.ndarray:
        return self.magnetic.sum(axis=0)

    def sample(self) -> FieldSample:
        return FieldSample(self.E, self.B, self.x, self.t)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "x": self.x.tolist(),
            "electric": self.electric.tolist(),
            "magnetic": self.magnetic.tolist(),
        }


def _node_integrals(source: MomentSource, nodes, c: float, grid: ConeGrid, initial: bool):
    """Sums over cone (or sphere) nodes of the velocity-integrated kernels.

    Returns (electric_T0, electric_g, magnetic_T0, magnetic_g) as 3-vectors;
    on the initial sphere the g-parts hold the term3 integrands.
    """
    k_nodes = grid.n_velocity ** 3
    chunk = max(1, _CHUNK_BUDGET // k_nodes)
    e_t0 = np.zeros(3)
    e_g = np.zeros(3)
    m_t0 = np.zeros(3)
    m_g = np.zeros(3)
    for lo in range(0, len(nodes), chunk):
        sl = slice(lo, lo + chunk)
        s, y, om, tau, wn = nodes.s[sl], nodes.y[sl], nodes.omega[sl], nodes.tau[sl], nodes.weights[sl]
        v, wv = source.velocity_rule(s, y, grid)
        vhat = rel_velocity(v, c)
        om3 = om[:, None, :]
        q = 1.0 + np.sum(om3 * vhat, axis=-1) / c
        n_vec = om3 + vhat / c
        cross = np.cross(vhat, om3)
        g = source.evaluate(s[:, None], y[:, None, :], v)
        if initial:
            e_kernel = om3 - n_vec * (np.sum(om3 * vhat, axis=-1) / c / q)[..., None]
            e_g += np.einsum("m,mk,mkd->d", wn, wv * g, e_kernel)
            m_g += np.einsum("m,mk,mkd->d", wn, wv * g / q, cross)
            continue
        scale = c * c / energy(v, c) ** 2
        w_g = wv * g * scale / q ** 2
        e_g += np.einsum("m,mk,mkd->d", wn, w_g, n_vec)
        m_g += np.einsum("m,mk,mkd->d", wn, w_g, cross)
        t0g = source.transport(s[:, None], y[:, None, :], v)
        if np.any(t0g):
            w_t = wv * t0g / q
            e_t0 += np.einsum("m,mk,mkd->d", wn * tau, w_t, n_vec)
            m_t0 += np.einsum("m,mk,mkd->d", wn * tau, w_t, cross)
    return e_t0, e_g, m_t0, m_g


def initial_data_terms(source: MomentSource, t: float, x, c: float,
                       grid: Optional[ConeGrid] = None) -> Tuple[np.ndarray, np.ndarray]:
    """(E, B) of the data term: the surface integral of g(0) over |y - x| = ct."""
    grid = grid or ConeGrid()
    if t <= 0.0:
        return np.zeros(3), np.zeros(3)
    shell = initial_sphere_nodes(np.asarray(x, dtype=float), t, c, grid.sphere())
    _, e_s, _, m_s = _node_integrals(source, shell, c, grid, initial=True)
    return -e_s / (FOUR_PI * c * t), m_s / (FOUR_PI * c * c * t)


def retarded_terms(source: MomentSource, t: float, x, c: float, grid: Optional[ConeGrid] = None) -> RetardedTerms:
    """All three terms of the electric and magnetic representations at (t, x)."""
    grid = grid or ConeGrid()
    x = np.asarray(x, dtype=float)
    if t < 0.0:
        raise ParameterError(f"retarded fields need t >= 0, got {t}")
    electric = np.zeros((3, 3))
    magnetic = np.zeros((3, 3))
    if t == 0.0 or isinstance(source, ZeroSource):
        return RetardedTerms(electric, magnetic, float(t), x)
    grid.check_budget(grid.n_velocity ** 3)

    sphere = grid.sphere()
    cone = cone_nodes(x, t, c, 0.0, grid, sphere)
    e_t0, e_g, m_t0, m_g = _node_integrals(source, cone, c, grid, initial=False)

    electric[0] = -e_t0 / (FOUR_PI * c)
    electric[1] = -e_g / FOUR_PI
    electric[2], magnetic[2] = initial_data_terms(source, t, x, c, grid)
    magnetic[0] = m_t0 / (FOUR_PI * c * c)
    magnetic[1] = m_g / (FOUR_PI * c)
    log.debug("[fields] retarded terms t=%g |E|=%.3e |B|=%.3e", t,
              np.linalg.norm(electric.sum(axis=0)), np.linalg.norm(magnetic.sum(axis=0)))
    return RetardedTerms(electric, magnetic, float(t), x)


def gs_field_terms(
    kind: str,
    index: Union[int, Tuple[int, int]],
    source: MomentSource,
    t: float,
    x,
    c: float,
    grid: Optional[ConeGrid] = None,
) -> Tuple[float, float, float]:
    """(term1, term2, term3) for ``electric`` i or ``magnetic`` (i, j)."""
    terms = retarded_terms(source, t, x, c, grid)
    if kind == "electric":
        if index not in (0, 1, 2):
            raise ParameterError(f"electric index must be 0, 1 or 2, got {index}")
        col = terms.electric[:, index]
    elif kind == "magnetic":
        k, sign = _pair_index(*index)
        col = sign * terms.magnetic[:, k]
    else:
        raise ParameterError(f"Unknown field kind '{kind}'. Available: ['electric', 'magnetic']")
    return float(col[0]), float(col[1]), float(col[2])


def field_at(source: MomentSource, t: float, x, c: float, grid: Optional[ConeGrid] = None) -> FieldSample:
    return retarded_terms(source, t, x, c, grid).sample()


# ------------------------------------------------------------------
# Wave sources and residuals
# ------------------------------------------------------------------

def wave_sources(source: MomentSource, t: float, x, c: float,
                 grid: Optional[ConeGrid] = None) -> Tuple[np.ndarray, np.ndarray]:
    """h1_i = -int (c^2 d_i + vhat_i d_t) g dv and h2_k = c int (vhat x grad_x g)_k dv."""
    grid = grid or ConeGrid()
    x = np.atleast_2d(np.asarray(x, dtype=float))
    s = np.full(len(x), float(t))
    v, w = source.velocity_rule(s, x, grid)
    vhat = rel_velocity(v, c)
    gx = source.grad_x(s[:, None], x[:, None, :], v)
    gt = source.dt(s[:, None], x[:, None, :], v)
    h1 = -np.einsum("mk,mkd->md", w, c * c * gx + vhat * gt[..., None])
    h2 = c * np.einsum("mk,mkd->md", w, np.cross(vhat, gx))
    return h1[0], h2[0]


def gs_residual(kind: str, index, source: MomentSource, t: float, x, c: float,
                step: float, grid: Optional[ConeGrid] = None) -> float:
    """Signed F_tt - c^2 Lap F - h for one component, by second differences."""
    grid = grid or ConeGrid()
    h1, h2 = wave_sources(source, t, x, c, grid)
    if kind == "electric":
        rhs = h1[index]
    else:
        k, sign = _pair_index(*index)
        rhs = sign * h2[k]
    fn = lambda s, y: sum(gs_field_terms(kind, index, source, s, y, c, grid))  # noqa: E731
    return wave_residual(fn, t, x, c, step, source=float(rhs))


def gs_residual_study(kind: str, index, source: MomentSource, t: float, x, c: float,
                      grid: Optional[ConeGrid] = None, first_step: float = 0.08,
                      halvings: int = 4) -> ConvergenceStudy:
    grid = grid or ConeGrid()
    return convergence_study(
        lambda h: gs_residual(kind, index, source, t, x, c, h, grid),
        first_step, halvings, "central3", label=f"gs_{kind} {index} t={t:g} c={c:g}",
    )


# ------------------------------------------------------------------
# Decay scan
# ------------------------------------------------------------------

def decay_envelope(t: float, r: float, c: float) -> float:
    return (1.0 + t + r) * (1.0 + abs(t - r / c))


def field_decay_scan(
    source: MomentSource,
    times: Sequence[float],
    radii: Sequence[float],
    c: float,
    grid: Optional[ConeGrid] = None,
    directions: Optional[Sequence[Sequence[float]]] = None,
) -> List[Dict[str, Any]]:
    """|E|, |B| and the weighted envelope |E| (1+t+r)(1+|t-r/c|) on a (t, x) grid."""
    grid = grid or ConeGrid()
    directions = np.eye(3) if directions is None else np.asarray(directions, dtype=float)
    rows = []
    for t in times:
        for r in radii:
            for d in directions:
                x = r * d / np.linalg.norm(d)
                sample = field_at(source, float(t), x, c, grid)
                e = float(np.linalg.norm(sample.E))
                b = float(np.linalg.norm(sample.B))
                rows.append({
                    "t": float(t),
                    "r": float(r),
                    "x": x.tolist(),
                    "E": e,
                    "B": b,
                    "rho": sample.rho,
                    "sigma": sample.sigma,
                    "alpha1": sample.alpha1,
                    "alpha2": sample.alpha2,
                    "envelope": e * decay_envelope(float(t), float(r), c),
                    "b_ratio": c * b / e if e > 0.0 else 0.0,
                })
        log.info("[fields] decay scan t=%g done", t)
    return rows
