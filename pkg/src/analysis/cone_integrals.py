"""Radially reduced light-cone integrals and the transport change of variables.

For integrands that see y only through tau = |y - x| and rho = |y|,

    integral_{|y-x| = tau} F(tau, |y|) dS_y = (2 pi tau / r) integral_{|r-tau|}^{r+tau} rho F(tau, rho) d rho

with r = |x| (and 4 pi tau^2 F(tau, tau) at r = 0), so an integral over the
solid cone |y - x| <= c t is a 2-D quadrature.  Both directions use
Gauss-Legendre panels graded geometrically toward their ends and split at the
kinks of the integrand, which keeps the rule uniform in accuracy from t ~ 1
to t ~ 1e3.  ``cone_integral_direct`` evaluates the same integrals on the 3-D
shell nodes of the field solver as an independent check.
"""

import logging
from dataclasses import asdict, dataclass, replace
from typing import Any, Callable, Dict, Iterable, Optional

import numpy as np

from src.collision.quadrature import FOUR_PI, Rule, legendre_rule, sphere_rule
from src.errors import BudgetExceededError, ParameterError
from src.fields.cone import ConeGrid, cone_nodes
from src.kinematics import check_map, energy, rel_velocity

log = logging.getLogger(__name__)

Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class IntegralGrid:
    """Resolution of the reduced cone integrals.

    ``n_shells`` panels in tau and ``n_radial`` panels per rho piece, each
    carrying ``n_nodes`` Gauss-Legendre nodes.
    """

    n_shells: int = 256
    n_radial: int = 48
    n_nodes: int = 3
    h_min: float = 1e-7
    max_nodes: Optional[int] = None

    def __post_init__(self):
        if self.n_shells < 2 or self.n_radial < 2:
            raise ParameterError(
                f"need at least 2 panels per direction, got n_shells={self.n_shells}, n_radial={self.n_radial}"
            )
        if self.n_nodes < 1:
            raise ParameterError(f"n_nodes must be >= 1, got {self.n_nodes}")
        if not 0.0 < self.h_min < 0.5:
            raise ParameterError(f"h_min must lie in (0, 0.5), got {self.h_min}")

    @property
    def size(self) -> int:
        return self.n_shells * self.n_nodes * 2 * self.n_radial * self.n_nodes

    def check_budget(self) -> None:
        if self.max_nodes is not None and self.size > self.max_nodes:
            raise BudgetExceededError(f"cone integral needs {self.size} nodes, budget is {self.max_nodes}")

    def refined(self) -> "IntegralGrid":
        return replace(self, n_shells=2 * self.n_shells, n_radial=2 * self.n_radial)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "IntegralGrid":
        return cls(**{k: d[k] for k in cls.__dataclass_fields__ if k in d})


# ------------------------------------------------------------------
# Graded rules
# ------------------------------------------------------------------

def graded_rule(a: float, b: float, n_panels: int, n_nodes: int = 3, h_min: float = 1e-7,
                 geometric: float = 1.0 / 3.0) -> Rule:
    """Gauss-Legendre panels on [a, b], refined geometrically toward both ends.

    Per side, a share ``geometric`` of the panel edges is geometric from
    ``h_min`` and the rest uniform; at the default third no panel is wider
    than about 3 / (2 n_panels) of [a, b].  ``geometric=1`` grades all the way.
    """
    if b <= a:
        return Rule(np.zeros(0), np.zeros(0))
    half = max(1, n_panels // 2)
    if half == 1:
        left = np.array([0.0, 0.5])
    else:
        n_geo = min(half, max(2, int(round(half * geometric))))
        left = np.concatenate([[0.0], np.geomspace(h_min, 0.5, n_geo)])
        if n_geo < half:
            left = np.unique(np.concatenate([left, np.linspace(0.0, 0.5, half - n_geo + 1)]))
    edges = np.concatenate([left, 1.0 - left[-2::-1]])
    x, w = np.polynomial.legendre.leggauss(n_nodes)
    lo, hi = edges[:-1], edges[1:]
    half_w = 0.5 * (hi - lo)
    pts = (lo + half_w)[:, None] + half_w[:, None] * x[None, :]
    span = b - a
    return Rule(a + span * pts.ravel(), span * (half_w[:, None] * w[None, :]).ravel())


def piecewise_rule(a: float, b: float, breaks: Iterable[float], n_panels: int,
                   n_nodes: int = 3, h_min: float = 1e-7) -> Rule:
    """Graded rules on the pieces of [a, b] cut at ``breaks``."""
    cuts = sorted({float(p) for p in breaks if a < p < b})
    edges = [a] + cuts + [b]
    per_piece = max(2, n_panels // (len(edges) - 1))
    rules = [graded_rule(lo, hi, per_piece, n_nodes, h_min) for lo, hi in zip(edges[:-1], edges[1:])]
    return Rule(np.concatenate([r.points for r in rules]), np.concatenate([r.weights for r in rules]))


# ------------------------------------------------------------------
# Sphere reduction
# ------------------------------------------------------------------

def sphere_integrals(integrand: Integrand, tau, r: float, grid: IntegralGrid,
                     rho_kink: Optional[Callable[[np.ndarray], np.ndarray]] = None) -> np.ndarray:
    """integral_{|y-x| = tau} F(tau, |y|) dS_y for each tau, with |x| = r."""
    tau = np.asarray(tau, dtype=float)
    if r == 0.0:
        return FOUR_PI * tau ** 2 * integrand(tau, tau)
    unit = graded_rule(0.0, 1.0, grid.n_radial, grid.n_nodes, grid.h_min)
    lo = np.abs(r - tau)
    hi = r + tau
    mid = hi if rho_kink is None else np.clip(rho_kink(tau), lo, hi)
    total = np.zeros_like(tau)
    for a, b in ((lo, mid), (mid, hi)):
        span = (b - a)[:, None]
        rho = a[:, None] + span * unit.points[None, :]
        total += np.sum(span * unit.weights[None, :] * rho * integrand(tau[:, None], rho), axis=1)
    return 2.0 * np.pi * tau / r * total


def sphere_reduction(profile: Callable[[np.ndarray], np.ndarray], r: float, sigma: float,
                     grid: Optional[IntegralGrid] = None) -> float:
    """integral_{|x-y| = sigma} f(|y|) dS_y = (2 pi sigma / |x|) integral_{||x|-sigma|}^{|x|+sigma} y f(y) dy."""
    if sigma < 0.0 or r < 0.0:
        raise ParameterError(f"sphere reduction needs sigma, |x| >= 0, got {sigma}, {r}")
    if sigma == 0.0:
        return 0.0
    grid = grid or IntegralGrid()
    value = sphere_integrals(lambda tau, rho: profile(rho), np.array([sigma]), r, grid)
    return float(value[0])


def sphere_reduction_direct(profile: Callable[[np.ndarray], np.ndarray], x, sigma: float,
                            n_theta: int = 64, n_phi: int = 128) -> float:
    """The same surface integral on an S^2 product rule."""
    rule = sphere_rule(n_theta, n_phi)
    y = np.asarray(x, dtype=float) + sigma * rule.points
    return sigma ** 2 * rule.integrate(profile(np.linalg.norm(y, axis=-1)))


def reduced_cone_integral(
    integrand: Integrand,
    t: float,
    r: float,
    c: float,
    power: float,
    grid: Optional[IntegralGrid] = None,
    tau_min: float = 0.0,
    rho_kink: Optional[Callable[[np.ndarray], np.ndarray]] = None,
    tau_breaks: Iterable[float] = (),
) -> float:
    """integral_{tau_min <= |y-x| <= ct} F(|y-x|, |y|) |y-x|^(-power) dy with |x| = r.

    The shell integrals vanish like tau^2 at the tip, so power <= 2 needs no
    special rule at tau = 0; power > 2 requires tau_min > 0.
    """
    if t < 0.0 or r < 0.0:
        raise ParameterError(f"cone integral needs t, |x| >= 0, got t={t}, r={r}")
    if power > 2.0 and tau_min <= 0.0:
        raise ParameterError(f"|y-x|^-{power} is not integrable at the tip; set tau_min > 0")
    grid = grid or IntegralGrid()
    radius = c * t
    if radius <= tau_min:
        return 0.0
    grid.check_budget()
    tau_rule = piecewise_rule(tau_min, radius, [r, *tau_breaks], grid.n_shells, grid.n_nodes, grid.h_min)
    tau = tau_rule.points
    shells = sphere_integrals(integrand, tau, r, grid, rho_kink)
    return float(np.sum(tau_rule.weights * tau ** (-power) * shells))


def cone_integral_direct(integrand: Integrand, x, t: float, c: float, power: float,
                         grid: Optional[ConeGrid] = None) -> float:
    """Same integral over the 3-D shell nodes of the field solver (power < 3)."""
    grid = grid or ConeGrid()
    nodes = cone_nodes(x, t, c, 2.0 - power, grid)
    rho = np.linalg.norm(nodes.y, axis=-1)
    return float(np.sum(nodes.weights * integrand(nodes.tau, rho)))


# ------------------------------------------------------------------
# The three integral bounds
# ------------------------------------------------------------------

def _check_tc(t: float, r: float, c: float) -> None:
    if c < 1.0:
        raise ParameterError(f"c must be >= 1, got {c}")
    if t < 0.0 or r < 0.0:
        raise ParameterError(f"need t, |x| >= 0, got t={t}, r={r}")


def i1_integrand(t: float, c: float, a: float) -> Integrand:
    def f(tau, rho):
        lag = t - tau / c
        return (1.0 + lag + rho) ** (-a) / (1.0 + np.abs(lag - rho / c))
    return f


def i2_integrand(t: float, c: float, a: float) -> Integrand:
    def f(tau, rho):
        return (1.0 + t - tau / c + rho) ** (-a)
    return f


def i1_lhs(t: float, r: float, c: float, a: float = 4.0, grid: Optional[IntegralGrid] = None) -> float:
    """integral_{|y-x| <= ct} (1 + t - |y-x|/c + |y|)^-a (1 + |t - |y-x|/c - |y|/c|)^-1 |x-y|^-1 dy."""
    _check_tc(t, r, c)
    if a <= 3.0:
        raise ParameterError(f"the first cone bound needs a > 3, got {a}")
    ct = c * t
    return reduced_cone_integral(
        i1_integrand(t, c, a), t, r, c, 1.0, grid,
        rho_kink=lambda tau: ct - tau,
        tau_breaks=(0.5 * (ct - r), 0.5 * (ct + r)),
    )


def i2_lhs(t: float, r: float, c: float, a: float = 3.0, grid: Optional[IntegralGrid] = None) -> float:
    """integral_{|y-x| <= ct} (1 + t - |y-x|/c + |y|)^-a |x-y|^-2 dy."""
    _check_tc(t, r, c)
    if a < 3.0:
        raise ParameterError(f"the second cone bound needs a >= 3, got {a}")
    return reduced_cone_integral(i2_integrand(t, c, a), t, r, c, 2.0, grid)


def i3_lhs(t: float, r: float, c: float, grid: Optional[IntegralGrid] = None) -> float:
    """integral_{1 <= |y-x| <= ct} (1 + t - |y-x|/c + |y|)^-3 |x-y|^-3 dy, for ct >= 1."""
    _check_tc(t, r, c)
    if c * t < 1.0:
        raise ParameterError(f"the third cone bound needs ct >= 1, got ct={c * t}")
    return reduced_cone_integral(i2_integrand(t, c, 3.0), t, r, c, 3.0, grid, tau_min=1.0)


def i1_rhs(t, r, c: float, a: float = 4.0):
    gap = np.abs(t - r / c)
    return c * np.log(3.0 + gap) / ((1.0 + t + r) * (1.0 + gap) ** (a - 2.0))


def i2_rhs(t, r, c: float, a: float = 3.0):
    gap = np.abs(t - r / c)
    return 1.0 / ((1.0 + t + r) * (1.0 + gap) ** (a - 2.0))


def i3_rhs(t, r, c: float):
    gap = np.abs(t - r / c)
    return np.log(3.0 + t + r) / ((1.0 + t + r) ** 2 * (1.0 + gap))


# ------------------------------------------------------------------
# Dispersion integrals
# ------------------------------------------------------------------

def _bracket_shells(tau, r: float, k: float) -> np.ndarray:
    """integral_{|y-x| = tau} <y>^-k dS_y in closed form."""
    tau = np.asarray(tau, dtype=float)
    limit = FOUR_PI * tau ** 2 * (1.0 + tau * tau) ** (-0.5 * k)
    if r == 0.0:
        return limit
    prim = lambda rho: (1.0 + rho * rho) ** (1.0 - 0.5 * k) / (2.0 - k)  # noqa: E731
    exact = 2.0 * np.pi * tau / r * (prim(r + tau) - prim(np.abs(r - tau)))
    return np.where(r < 1e-8 * tau, limit, exact)


def transport_weight_integral(t: float, r: float, c: float, k: float = 4.0,
                              grid: Optional[IntegralGrid] = None) -> float:
    """integral t^3 <x - t vhat>^-k <v>^-5 dv, evaluated in y = x - t vhat.

    With beta = |y - x| / (ct) the measure t^3 <v>^-5 dv becomes
    (1 + (c^2 - 1) beta^2)^(-5/2) dy.
    """
    _check_tc(t, r, c)
    if k <= 3.0:
        raise ParameterError(f"the transport weight integral needs k > 3, got {k}")
    if t == 0.0:
        return 0.0
    grid = grid or IntegralGrid()
    grid.check_budget()
    ct = c * t
    rule = piecewise_rule(0.0, ct, [r], grid.n_shells, grid.n_nodes, grid.h_min)
    beta = rule.points / ct
    phi = (1.0 + (c * c - 1.0) * beta * beta) ** -2.5
    return float(np.sum(rule.weights * phi * _bracket_shells(rule.points, r, k)))


def _panels(a: float, b: float, n_panels: int, n_per_panel: int) -> Rule:
    edges = np.linspace(a, b, n_panels + 1)
    rules = [legendre_rule(n_per_panel, lo, hi) for lo, hi in zip(edges[:-1], edges[1:])]
    return Rule(np.concatenate([q.points for q in rules]), np.concatenate([q.weights for q in rules]))


def change_of_variables_check(t: float, x, c: float, v_center=(0.0, 0.0, 0.0), n_panels: int = 12,
                              n_per_panel: int = 16, n_theta: int = 32, n_phi: int = 64) -> Dict[str, float]:
    """Both sides of  integral t^3 h(x - t vhat, v) dv = integral_{|y-x|<ct} (v0^5/c^5) h(y, check((x-y)/t)) dy.

    h(y, v) = exp(-|y|^2/2 - |v - v_center|^2/2).  The left side is a
    momentum-space ball rule, the right side a position-space ball rule
    around x, graded toward |y - x| = ct where check() blows up.
    """
    if t <= 0.0:
        raise ParameterError(f"the change of variables needs t > 0, got {t}")
    x = np.asarray(x, dtype=float)
    vc = np.asarray(v_center, dtype=float)
    sphere = sphere_rule(n_theta, n_phi)

    def h(y, v):
        dv = v - vc
        return np.exp(-0.5 * np.sum(y * y, axis=-1) - 0.5 * np.sum(dv * dv, axis=-1))

    reach = float(np.linalg.norm(vc)) + 12.0
    radial = _panels(0.0, reach, n_panels, n_per_panel)
    v = (radial.points[:, None, None] * sphere.points[None, :, :]).reshape(-1, 3)
    w = np.outer(radial.weights * radial.points ** 2, sphere.weights).ravel()
    lhs = float(np.sum(w * t ** 3 * h(x - t * rel_velocity(v, c), v)))

    radial = graded_rule(0.0, c * t, 4 * n_panels, 10, geometric=1.0)
    d = (radial.points[:, None, None] * sphere.points[None, :, :]).reshape(-1, 3)
    w = np.outer(radial.weights * radial.points ** 2, sphere.weights).ravel()
    v = check_map(-d / t, c)
    rhs = float(np.sum(w * (energy(v, c) / c) ** 5 * h(x + d, v)))
    rel = abs(lhs - rhs) / max(abs(lhs), 1e-300)
    log.debug("[analysis] change of variables t=%g c=%g rel=%.3e", t, c, rel)
    return {"lhs": lhs, "rhs": rhs, "rel": rel}
