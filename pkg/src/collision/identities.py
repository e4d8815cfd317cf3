"""Finite-difference checks of the chain rule and rotation identities for Q_c.

    v0 d_j Q(h, f) = Q(h, v0 d_j f) + Q(v0 d_j h, f) - (v_j / v0) Q(h, f)
    (v_j d_i - v_i d_j) Q(h, f) = Q(h, (v_j d_i - v_i d_j) f) + Q((v_j d_i - v_i d_j) h, f)

The left sides use central differences of the quadrature in v; the right
sides use the analytic gradients of h and f.  Residuals are signed so that a
convergence study can difference out the quadrature floor.

The default stencil is the 3-point ``central3``: the acceptance target is a
fitted order in [1.8, 2.2] under step halving, which only a second-order
stencil produces.  ``central5`` (fourth order) is kept for checking the
quadrature floor with a smaller truncation error.
"""

import logging
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List

import numpy as np

from src.collision.distributions import AnalyticDistribution, RotationDerivative, ScaledDerivative, Zero
from src.collision.kernel import KernelSpec
from src.collision.operator import eval_Q
from src.collision.quadrature import QuadratureGrid
from src.errors import FitError, ParameterError
from src.kinematics import energy

log = logging.getLogger(__name__)

# stencil name -> (offsets, coefficients, formal order)
_STENCILS = {
    "central3": ((-1.0, 1.0), (-0.5, 0.5), 2),
    "central5": ((-2.0, -1.0, 1.0, 2.0), (1.0 / 12.0, -8.0 / 12.0, 8.0 / 12.0, -1.0 / 12.0), 4),
}


def default_fd_step(v) -> float:
    return 1e-3 * (1.0 + float(np.linalg.norm(v)))


def stencil_order(stencil: str) -> int:
    if stencil not in _STENCILS:
        raise ParameterError(f"Unknown stencil '{stencil}'. Available: {sorted(_STENCILS)}")
    return _STENCILS[stencil][2]


def fd_derivative(func: Callable, v, j: int, step: float, stencil: str = "central3") -> float:
    """Central difference of ``func`` along axis j at v."""
    if step <= 0.0:
        raise ParameterError(f"fd_step must be positive, got {step}")
    stencil_order(stencil)
    offsets, coeffs, _ = _STENCILS[stencil]
    v = np.asarray(v, dtype=float)
    e = np.zeros(3)
    e[j] = 1.0
    total = 0.0
    for off, coef in zip(offsets, coeffs):
        total += coef * func(v + off * step * e)
    return total / step


def _is_zero(dist: AnalyticDistribution) -> bool:
    return isinstance(dist, Zero)


def _chain_rule_terms(h, f, v, j, kernel, grid):
    """(lhs(step), rhs) with rhs = Q(h, v0 d_j f) + Q(v0 d_j h, f) - (v_j/v0) Q(h, f)."""
    c = kernel.c
    v0 = float(energy(v, c))
    q_fn = lambda w: eval_Q(h, f, w, kernel, grid)  # noqa: E731
    rhs = (
        eval_Q(h, ScaledDerivative(f, j, c), v, kernel, grid)
        + eval_Q(ScaledDerivative(h, j, c), f, v, kernel, grid)
        - v[j] / v0 * q_fn(v)
    )
    return (lambda step, stencil: v0 * fd_derivative(q_fn, v, j, step, stencil)), rhs


def _rotation_terms(h, f, v, i, j, kernel, grid):
    q_fn = lambda w: eval_Q(h, f, w, kernel, grid)  # noqa: E731

    def lhs(step, stencil):
        total = 0.0
        if v[j] != 0.0:
            total += v[j] * fd_derivative(q_fn, v, i, step, stencil)
        if v[i] != 0.0:
            total -= v[i] * fd_derivative(q_fn, v, j, step, stencil)
        return total

    rhs = (
        eval_Q(h, RotationDerivative(f, i, j), v, kernel, grid)
        + eval_Q(RotationDerivative(h, i, j), f, v, kernel, grid)
    )
    return lhs, rhs


def chain_rule_residual(
    h: AnalyticDistribution,
    f: AnalyticDistribution,
    v,
    j: int,
    kernel: KernelSpec,
    grid: QuadratureGrid,
    fd_step: float = None,
    stencil: str = "central3",
    signed: bool = False,
) -> float:
    """v0 D_j Q(h,f) - Q(h, v0 d_j f) - Q(v0 d_j h, f) + (v_j/v0) Q(h,f)."""
    v = np.asarray(v, dtype=float)
    if _is_zero(h) or _is_zero(f):
        return 0.0
    fd_step = default_fd_step(v) if fd_step is None else fd_step
    lhs, rhs = _chain_rule_terms(h, f, v, j, kernel, grid)
    res = lhs(fd_step, stencil) - rhs
    return float(res if signed else abs(res))


def rotation_residual(
    h: AnalyticDistribution,
    f: AnalyticDistribution,
    v,
    i: int,
    j: int,
    kernel: KernelSpec,
    grid: QuadratureGrid,
    fd_step: float = None,
    stencil: str = "central3",
    signed: bool = False,
) -> float:
    """(v_j D_i - v_i D_j) Q(h,f) - Q(h, R_ij f) - Q(R_ij h, f)."""
    if i == j or _is_zero(h) or _is_zero(f):
        return 0.0
    v = np.asarray(v, dtype=float)
    fd_step = default_fd_step(v) if fd_step is None else fd_step
    lhs, rhs = _rotation_terms(h, f, v, i, j, kernel, grid)
    res = lhs(fd_step, stencil) - rhs
    return float(res if signed else abs(res))


# ------------------------------------------------------------------
# Convergence study
# ------------------------------------------------------------------

@dataclass
class ConvergenceStudy:
    """Residuals over a halving sequence of fd steps.

    ``order`` is the least-squares slope of log|R_k - R_{k+1}| against
    log h_k; the floor-independent differences isolate the truncation term.
    ``floor`` is the Richardson-extrapolated h -> 0 residual, i.e. the
    quadrature error of the identity.
    """

    steps: List[float]
    residuals: List[float]
    order: float
    pairwise_orders: List[float]
    floor: float
    expected_order: int
    label: str = ""
    extra: Dict[str, Any] = field(default_factory=dict)

    @property
    def terminal(self) -> float:
        return abs(self.residuals[-1])

    def within(self, low: float, high: float) -> bool:
        return low <= self.order <= high

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["terminal"] = self.terminal
        return d

    def rows(self) -> List[Dict[str, Any]]:
        return [
            {"label": self.label, "fd_step": h, "residual": abs(r), "signed_residual": r}
            for h, r in zip(self.steps, self.residuals)
        ]


def fit_order(steps, residuals, expected_order: int = 2) -> Dict[str, Any]:
    steps = np.asarray(steps, dtype=float)
    res = np.asarray(residuals, dtype=float)
    if len(steps) < 3:
        raise FitError(f"order fit needs at least 3 steps, got {len(steps)}")
    diffs = np.abs(res[:-1] - res[1:])
    if np.any(diffs == 0.0):
        return {"order": float("nan"), "pairwise": [], "floor": float(res[-1])}
    slope = np.polyfit(np.log(steps[:-1]), np.log(diffs), 1)[0]
    pairwise = np.log(diffs[:-1] / diffs[1:]) / np.log(steps[:-2] / steps[1:-1])
    ratio = 2.0 ** expected_order
    floor = res[-1] - (res[-2] - res[-1]) / (ratio - 1.0)
    return {"order": float(slope), "pairwise": [float(p) for p in pairwise], "floor": float(floor)}


def convergence_study(
    residual_fn: Callable[[float], float],
    first_step: float = 0.08,
    halvings: int = 4,
    stencil: str = "central3",
    label: str = "",
) -> ConvergenceStudy:
    """Evaluate ``residual_fn(step)`` (signed) at first_step / 2^k, k = 0..halvings."""
    if halvings < 2:
        raise ParameterError(f"a convergence study needs at least 2 halvings, got {halvings}")
    steps = [first_step / 2.0 ** k for k in range(halvings + 1)]
    residuals = [float(residual_fn(h)) for h in steps]
    expected = stencil_order(stencil)
    fit = fit_order(steps, residuals, expected)
    log.info("[convergence] %s order=%.3f floor=%.3e terminal=%.3e",
             label or "convergence", fit["order"], fit["floor"], abs(residuals[-1]))
    return ConvergenceStudy(
        steps=steps,
        residuals=residuals,
        order=fit["order"],
        pairwise_orders=fit["pairwise"],
        floor=fit["floor"],
        expected_order=expected,
        label=label,
    )


def chain_rule_study(h, f, v, j, kernel, grid, first_step=0.08, halvings=4, stencil="central3"):
    v = np.asarray(v, dtype=float)
    lhs, rhs = _chain_rule_terms(h, f, v, j, kernel, grid)
    return convergence_study(
        lambda step: lhs(step, stencil) - rhs,
        first_step, halvings, stencil, label=f"chain_rule j={j} c={kernel.c:g} gamma={kernel.gamma:g}",
    )


def rotation_study(h, f, v, i, j, kernel, grid, first_step=0.08, halvings=4, stencil="central3"):
    if i == j:
        raise ParameterError("rotation study needs i != j")
    v = np.asarray(v, dtype=float)
    lhs, rhs = _rotation_terms(h, f, v, i, j, kernel, grid)
    return convergence_study(
        lambda step: lhs(step, stencil) - rhs,
        first_step, halvings, stencil, label=f"rotation ({i},{j}) c={kernel.c:g} gamma={kernel.gamma:g}",
    )
