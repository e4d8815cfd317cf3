"""Direct quadrature of the relativistic Boltzmann operator.

    Q_c(h, f)(v) = int_R3 int_S2 v_phi sigma(g, theta) [h(u') f(v') - h(u) f(v)] d(omega) du

The u-integral is taken in shells u = v + r omega_u; with B = c sqrt(s) g^gamma
sigma0 / (4 v0 u0) the factor r^2 B equals r^(gamma+1) * r (g/r)^gamma * (smooth),
and g/r stays bounded away from zero, so the Gauss-Jacobi radial rule sees a
smooth integrand for every gamma in (-2, 0].
"""

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Tuple

import numpy as np

from src.collision.distributions import AnalyticDistribution
from src.collision.kernel import KernelSpec
from src.collision.quadrature import FOUR_PI, QuadratureGrid, Rule, ball_rule, jacobi_radial_rule
from src.errors import ParameterError
from src.kinematics import energy, post_collision, relative_momentum, scattering_cosine

log = logging.getLogger(__name__)

# float64 values per radial chunk (chunk * n_u * n_omega * 3)
_CHUNK_BUDGET = 3_000_000


def _radial_chunks(grid: QuadratureGrid):
    per_node = max(1, len(grid.sphere_u) * len(grid.sphere_omega) * 3)
    step = max(1, _CHUNK_BUDGET // per_node)
    n = len(grid.radial)
    for start in range(0, n, step):
        yield slice(start, min(n, start + step))


def _shell_factor(v, u, r, kernel: KernelSpec):
    """r * (g/r)^gamma * c sqrt(s) / (4 v0 u0): everything in r^2 B except r^(gamma+1) and sigma0."""
    c = kernel.c
    g = relative_momentum(v, u, c)
    s = g * g + 4.0 * c * c
    ratio = g / r
    return r * ratio ** kernel.gamma * c * np.sqrt(s) / (4.0 * energy(v, c) * energy(u, c))


def collision_terms(
    h: AnalyticDistribution,
    f: AnalyticDistribution,
    v,
    kernel: KernelSpec,
    grid: QuadratureGrid,
    reflect: bool = False,
    swap: bool = False,
) -> Tuple[float, float]:
    """(gain, loss) at a single momentum v.

    ``reflect`` evaluates the gain on antipodal omega nodes; ``swap`` uses
    h(v') f(u') in place of h(u') f(v').  The two agree node by node.
    """
    v = np.asarray(v, dtype=float)
    omega = -grid.sphere_omega.points if reflect else grid.sphere_omega.points
    w_omega = grid.sphere_omega.weights
    f_v = float(f.evaluate(v))
    gain = 0.0
    loss = 0.0
    for sl in _radial_chunks(grid):
        r = grid.radial.points[sl]
        wr = grid.radial.weights[sl]
        u = v + r[:, None, None] * grid.sphere_u.points[None, :, :]          # (R, U, 3)
        base = _shell_factor(v, u, r[:, None], kernel)                       # (R, U)
        w_ru = wr[:, None] * grid.sphere_u.weights[None, :]                  # (R, U)
        vp, up = post_collision(v, u[:, :, None, :], omega[None, None, :, :], kernel.c)
        if swap:
            vp, up = up, vp
        if kernel.isotropic:
            ang = np.ones(vp.shape[:-1])
        else:
            ang = kernel.angular(scattering_cosine(v, u[:, :, None, :], vp, up, kernel.c))
        gain_nodes = h.evaluate(up) * f.evaluate(vp) * ang                   # (R, U, W)
        gain += float(np.einsum("ru,ru,ruw,w->", w_ru, base, gain_nodes, w_omega))
        if f_v != 0.0:
            ang_mean = ang @ w_omega if not kernel.isotropic else FOUR_PI
            loss += f_v * float(np.sum(w_ru * base * h.evaluate(u) * ang_mean))
    return gain, loss


def eval_loss(h, f, v, kernel: KernelSpec, grid: QuadratureGrid) -> float:
    """Q^-(h, f)(v) = f(v) int int v_phi sigma h(u) d(omega) du."""
    v = np.asarray(v, dtype=float)
    f_v = float(f.evaluate(v))
    if f_v == 0.0:
        return 0.0
    if not kernel.isotropic:
        return collision_terms(h, f, v, kernel, grid)[1]
    total = 0.0
    for sl in _radial_chunks(grid):
        r = grid.radial.points[sl]
        u = v + r[:, None, None] * grid.sphere_u.points[None, :, :]
        base = _shell_factor(v, u, r[:, None], kernel)
        w_ru = grid.radial.weights[sl][:, None] * grid.sphere_u.weights[None, :]
        total += float(np.sum(w_ru * base * h.evaluate(u)))
    return f_v * FOUR_PI * total


def eval_gain(h, f, v, kernel: KernelSpec, grid: QuadratureGrid, reflect: bool = False,
              swap: bool = False) -> float:
    """Q^+(h, f)(v) with post-collision momenta at every (u, omega) node."""
    return collision_terms(h, f, v, kernel, grid, reflect=reflect, swap=swap)[0]


def eval_Q(h, f, v, kernel: KernelSpec, grid: QuadratureGrid) -> float:
    gain, loss = collision_terms(h, f, v, kernel, grid)
    return gain - loss


# ------------------------------------------------------------------
# Moments of Q(f, f)
# ------------------------------------------------------------------

_MOMENTS = ("mass", "momentum_x", "momentum_y", "momentum_z", "energy")


@dataclass
class BracketResult:
    """int Q(f,f) {1, v, v0} dv with the gain-weighted size of each moment.

    ``scales[k]`` is int |Q+(f,f)| |phi_k| dv, the size the k-th moment
    cancels from; ``relative()`` is the worst moment over its own scale.
    """

    mass: float
    momentum: np.ndarray
    energy: float
    scales: np.ndarray
    form: str
    n_v: int = 0
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def moments(self) -> np.ndarray:
        return np.concatenate([[self.mass], self.momentum, [self.energy]])

    @property
    def scale(self) -> float:
        return float(self.scales[0])

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.moments)))

    def relative(self) -> float:
        moments = np.abs(self.moments)
        worst = 0.0
        for value, scale in zip(moments, self.scales):
            worst = max(worst, value / scale if scale > 0.0 else value)
        return float(worst)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mass": self.mass,
            "momentum": [float(x) for x in self.momentum],
            "energy": self.energy,
            "scale": self.scale,
            "scales": dict(zip(_MOMENTS, (float(s) for s in self.scales))),
            "relative": self.relative(),
            "form": self.form,
            "n_v": self.n_v,
            **self.extra,
        }


def _result(totals: np.ndarray, scales: np.ndarray, form: str, n_v: int, **extra: Any) -> BracketResult:
    return BracketResult(
        mass=float(totals[0]),
        momentum=totals[1:4].copy(),
        energy=float(totals[4]),
        scales=scales.copy(),
        form=form,
        n_v=n_v,
        extra=extra,
    )


def velocity_grid(center, radius: float, n_radial: int = 12, n_theta: int = 6, n_phi: int = 12) -> Rule:
    """Ball rule over |v - center| <= radius for the outer v-integral."""
    return ball_rule(center, radius, n_radial, n_theta, n_phi)


def _invariants(v, c: float) -> np.ndarray:
    """Collision invariants (1, v1, v2, v3, v0) stacked on the last axis."""
    v = np.asarray(v, dtype=float)
    ones = np.ones(v.shape[:-1] + (1,))
    return np.concatenate([ones, v, energy(v, c)[..., None]], axis=-1)


def collision_brackets(
    f: AnalyticDistribution,
    kernel: KernelSpec,
    grid: QuadratureGrid,
    v_grid: Rule,
    form: str = "strong",
) -> BracketResult:
    """Mass, momentum and energy moments of Q_c(f, f) over ``v_grid``.

    ``strong`` integrates Q_c(f, f)(v) phi(v) with the pointwise gain and
    loss, so the moments vanish only as far as both quadratures resolve f.
    ``weak`` integrates the pre-post symmetrised form
    (1/2) int B f(v) f(u) [phi(v') + phi(u') - phi(v) - phi(u)]; its
    integrand vanishes node by node for collision invariants phi, which
    makes it a check of the post-collision map rather than of the quadrature.
    """
    if form not in ("weak", "strong"):
        raise ValueError(f"Unknown bracket form '{form}'. Available: ['strong', 'weak']")
    c = kernel.c
    totals = np.zeros(5)
    scales = np.zeros(5)
    for vi, wv in zip(v_grid.points, v_grid.weights):
        phi_v = _invariants(vi, c)
        if form == "strong":
            gain, loss = collision_terms(f, f, vi, kernel, grid)
            totals += wv * (gain - loss) * phi_v
            scales += wv * abs(gain) * np.abs(phi_v)
            continue
        f_v = float(f.evaluate(vi))
        if f_v == 0.0:
            continue
        for sl in _radial_chunks(grid):
            r = grid.radial.points[sl]
            u = vi + r[:, None, None] * grid.sphere_u.points[None, :, :]
            base = _shell_factor(vi, u, r[:, None], kernel)
            w_ru = grid.radial.weights[sl][:, None] * grid.sphere_u.weights[None, :]
            vp, up = post_collision(vi, u[:, :, None, :], grid.sphere_omega.points[None, None, :, :], c)
            if kernel.isotropic:
                ang = np.ones(vp.shape[:-1])
            else:
                ang = kernel.angular(scattering_cosine(vi, u[:, :, None, :], vp, up, c))
            weight = (w_ru * base * f.evaluate(u))[:, :, None] * ang * grid.sphere_omega.weights
            phi_vp = _invariants(vp, c)
            delta = phi_vp + _invariants(up, c) - phi_v - _invariants(u, c)[:, :, None, :]
            totals += 0.5 * wv * f_v * np.einsum("ruw,ruwk->k", weight, delta)
            scales += wv * f_v * np.einsum("ruw,ruwk->k", weight, np.abs(phi_vp))
    log.debug("[collision] brackets form=%s n_v=%d scale=%.3e", form, len(v_grid), scales[0])
    return _result(totals, scales, form, len(v_grid))


def _require_isotropic(f: AnalyticDistribution) -> None:
    if np.any(np.asarray(f.center, dtype=float) != 0.0):
        raise ParameterError(f"isotropic brackets need a distribution centred at 0, got center {f.center}")
    cov = getattr(f, "covariance", None)
    if cov is not None and not np.allclose(cov, cov[0, 0] * np.eye(3), rtol=0.0, atol=1e-14 * abs(cov[0, 0])):
        raise ParameterError("isotropic brackets need a covariance proportional to the identity")


def isotropic_brackets(
    f: AnalyticDistribution,
    kernel: KernelSpec,
    v_radius: float,
    n_v: int = 28,
    n_radial: int = 48,
    n_theta: int = 48,
    n_theta_omega: int = 16,
    n_phi_omega: int = 32,
    tails: float = 7.0,
) -> BracketResult:
    """Strong-form moments of Q_c(f, f) for a centred isotropic f.

    B depends on v and u through g and the scattering angle only, so
    Q_c(f, f)(v) = q(|v|).  q is evaluated at v = r e3, on the polar axis of
    the u-sphere, where one azimuth integrates the u-angles exactly, and the
    moments reduce to 4 pi int_0^v_radius r^2 q(r) {1, v0} dr.  The momentum
    moment vanishes by symmetry; its scale is still reported.  Each v node
    gets its own u-grid truncated at |v| + tails * spread.
    """
    _require_isotropic(f)
    c = kernel.c
    outer = jacobi_radial_rule(n_v, v_radius, 2.0)
    totals = np.zeros(5)
    scales = np.zeros(5)
    for r, wr in zip(outer.points, outer.weights):
        v = np.array([0.0, 0.0, r])
        grid = QuadratureGrid.build(kernel.gamma, r + tails * f.spread, n_radial, n_theta, 1,
                                    n_theta_omega, n_phi_omega)
        gain, loss = collision_terms(f, f, v, kernel, grid)
        w = FOUR_PI * wr
        v0 = float(energy(v, c))
        totals[0] += w * (gain - loss)
        totals[4] += w * (gain - loss) * v0
        # mean of |v_k| over the sphere of radius r is r / 2
        scales += w * abs(gain) * np.array([1.0, 0.5 * r, 0.5 * r, 0.5 * r, v0])
    log.debug("[collision] isotropic brackets c=%g gamma=%g n_v=%d scale=%.3e",
              c, kernel.gamma, n_v, scales[0])
    return _result(totals, scales, "strong", n_v, reduction="isotropic",
                   grid=[n_v, n_radial, n_theta, n_theta_omega, n_phi_omega])
