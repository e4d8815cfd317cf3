"""Registry of weighted inequalities, each a sampled LHS / RHS pair.

A case declares its parameter axes and a vectorised ``evaluate`` returning
(lhs, rhs) arrays.  Samples live in the unit cube: every continuous axis maps
u in [0, 1] onto its range (log-uniform in 1 + value for the scale axes), and
choice axes (c, exponents, kernel shapes) are drawn as indices and held fixed
during polishing.  Cases with ``log_space`` return logarithms instead, for
weights that overflow double precision.

Adding a case:
  1. Write ``_my_case(p, grid) -> (lhs, rhs)``; ``p`` maps axis names to
     arrays (choice values arrive as scalars).
  2. Register an ``InequalityCase`` in ``_CASES`` below.
"""

import logging
from dataclasses import dataclass
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from src.analysis.cone_integrals import (
    IntegralGrid,
    i1_lhs,
    i1_rhs,
    i2_lhs,
    i2_rhs,
    i3_lhs,
    i3_rhs,
    sphere_integrals,
    transport_weight_integral,
)
from src.analysis.weights import log_composite_weight
from src.collision.carleman import carleman_bound, carleman_C
from src.collision.estimates import majorant_ratio
from src.collision.kernel import KernelSpec
from src.errors import ParameterError
from src.fields.cone import ConeGrid
from src.fields.frame import NullFrame
from src.fields.sources import FreeTransportGaussian
from src.kinematics import (
    bracket,
    collision_bounds,
    energy,
    kappa,
    post_collision,
    post_momentum_bound,
    rel_velocity,
)

log = logging.getLogger(__name__)

C_VALUES = (1.0, 2.0, 10.0, 100.0)
T_MAX = 1e3
X_MAX_OVER_C = 1e3
V_MAX = 1e2
SUBADDITIVITY_K = 10.0

_WIDTHS = {"direction": 2, "vector": 3, "choice": 0}


@dataclass(frozen=True)
class Axis:
    """One sampled parameter.

    kinds: ``log1p`` (value in [0, hi], log-uniform in 1 + value),
    ``uniform`` ([lo, hi]), ``direction`` (unit 3-vector), ``vector``
    (log1p norm times a direction), ``choice`` (one of ``choices``).
    ``per_c`` scales ``hi`` by the sampled speed of light.
    """

    name: str
    kind: str
    lo: float = 0.0
    hi: float = 1.0
    per_c: bool = False
    choices: Tuple[Any, ...] = ()

    @property
    def width(self) -> int:
        return _WIDTHS.get(self.kind, 1)

    def to_dict(self) -> Dict[str, Any]:
        d = {"name": self.name, "kind": self.kind}
        if self.kind == "choice":
            d["choices"] = list(self.choices)
        elif self.kind != "direction":
            d.update(lo=self.lo, hi=self.hi, per_c=self.per_c)
        return d


def _direction(u1, u2) -> np.ndarray:
    z = 2.0 * u1 - 1.0
    phi = 2.0 * np.pi * u2
    s = np.sqrt(np.maximum(0.0, 1.0 - z * z))
    return np.stack([s * np.cos(phi), s * np.sin(phi), z], axis=-1)


def _log1p_scale(u, hi: float) -> np.ndarray:
    return np.expm1(u * np.log1p(hi))


@dataclass(frozen=True)
class InequalityCase:
    case_id: str
    description: str
    axes: Tuple[Axis, ...]
    evaluate: Callable[[Dict[str, Any], Optional[IntegralGrid]], Tuple[np.ndarray, np.ndarray]]
    default_samples: int = 10_000
    integral: bool = False
    log_space: bool = False
    notes: str = ""

    @property
    def continuous(self) -> List[Axis]:
        return [a for a in self.axes if a.kind != "choice"]

    @property
    def choice_axes(self) -> List[Axis]:
        return [a for a in self.axes if a.kind == "choice"]

    @property
    def unit_dim(self) -> int:
        return sum(a.width for a in self.axes)

    def draw(self, rng: np.random.Generator, n: int) -> Tuple[np.ndarray, np.ndarray]:
        """(U, C): unit coordinates (n, unit_dim) and choice indices (n, n_choices)."""
        u = rng.random((n, self.unit_dim))
        cols = [rng.integers(len(a.choices), size=n) for a in self.choice_axes]
        idx = np.stack(cols, axis=-1) if cols else np.zeros((n, 0), dtype=int)
        return u, idx

    def decode(self, u, choice: Sequence[int]) -> Dict[str, Any]:
        """Parameters for unit rows ``u`` (m, unit_dim) sharing one choice row."""
        u = np.atleast_2d(np.asarray(u, dtype=float))
        p: Dict[str, Any] = {a.name: a.choices[int(i)] for a, i in zip(self.choice_axes, choice)}
        c = float(p.get("c", 1.0))
        col = 0
        for a in self.continuous:
            hi = a.hi * c if a.per_c else a.hi
            block = u[:, col:col + a.width]
            col += a.width
            if a.kind == "log1p":
                p[a.name] = _log1p_scale(block[:, 0], hi)
            elif a.kind == "uniform":
                p[a.name] = a.lo + block[:, 0] * (a.hi - a.lo)
            elif a.kind == "direction":
                p[a.name] = _direction(block[:, 0], block[:, 1])
            elif a.kind == "vector":
                p[a.name] = _log1p_scale(block[:, 0], hi)[:, None] * _direction(block[:, 1], block[:, 2])
            else:
                raise ParameterError(f"Unknown axis kind '{a.kind}'. Available: {sorted(_WIDTHS) + ['log1p', 'uniform']}")
        return p

    def ratio_of(self, lhs, rhs) -> np.ndarray:
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        if self.log_space:
            with np.errstate(over="ignore"):
                return np.exp(lhs - rhs)
        lhs = np.abs(lhs)
        safe = np.where(rhs > 0.0, rhs, 1.0)
        out = np.where(rhs > 0.0, lhs / safe, np.inf)
        return np.where(lhs == 0.0, 0.0, out)

    def ratios(self, u, choices, grid: Optional[IntegralGrid] = None) -> np.ndarray:
        """LHS / RHS for every sample; rows are grouped by their choice values."""
        u = np.atleast_2d(np.asarray(u, dtype=float))
        choices = np.asarray(choices, dtype=int).reshape(len(u), -1)
        out = np.empty(len(u))
        if choices.shape[1] == 0:
            groups = {(): np.arange(len(u))}
        else:
            keys, inverse = np.unique(choices, axis=0, return_inverse=True)
            groups = {tuple(k): np.flatnonzero(inverse.ravel() == n) for n, k in enumerate(keys)}
        for key, rows in groups.items():
            lhs, rhs = self.evaluate(self.decode(u[rows], key), grid)
            out[rows] = self.ratio_of(lhs, rhs)
        return out

    def to_dict(self) -> Dict[str, Any]:
        return {
            "case_id": self.case_id,
            "description": self.description,
            "axes": [a.to_dict() for a in self.axes],
            "default_samples": self.default_samples,
            "integral": self.integral,
            "notes": self.notes,
        }


# ------------------------------------------------------------------
# Shared axes
# ------------------------------------------------------------------

_C = Axis("c", "choice", choices=C_VALUES)
_T = Axis("t", "log1p", hi=T_MAX)
_X = Axis("x", "vector", hi=X_MAX_OVER_C, per_c=True)
_R = Axis("r", "log1p", hi=X_MAX_OVER_C, per_c=True)
_V = Axis("v", "vector", hi=V_MAX)
_U = Axis("u", "vector", hi=V_MAX)
_OMEGA = Axis("omega", "direction")
_X_DIR = Axis("x_dir", "direction")


def _norm(a) -> np.ndarray:
    return np.linalg.norm(a, axis=-1)


def _spread(t, x, v, c):
    """x - t vhat for row-wise t."""
    return x - np.asarray(t)[:, None] * rel_velocity(v, c)


def _post(p):
    return post_collision(p["v"], p["u"], p["omega"], p["c"])


# ------------------------------------------------------------------
# Kinematic inequalities
# ------------------------------------------------------------------

def _main_inequality(p, grid):
    t, x, v, c = p["t"], p["x"], p["v"], p["c"]
    r = _norm(x)
    lhs = 1.0 + t + r
    rhs = (1.0 + np.abs(t - r / c)) * bracket(v) ** 4 * bracket(_spread(t, x, v, c)) ** 2
    return lhs, rhs


def _x_ge_ct(p, grid):
    t, c, v = p["t"], p["c"], p["v"]
    x = (c * t + p["gap"])[:, None] * p["x_dir"]
    lhs = 1.0 + t + _norm(x)
    rhs = bracket(v) ** 2 * bracket(_spread(t, x, v, c))
    return lhs, rhs


def _kappa_speed(p, grid):
    v, c = p["v"], p["c"]
    return c / energy(v, c), np.sqrt(kappa(v, p["x_dir"], c))


def _kappa_cross(p, grid):
    v, c = p["v"], p["c"]
    return _norm(np.cross(v, p["x_dir"])) / energy(v, c), np.sqrt(kappa(v, p["x_dir"], c))


def _kappa_tangential(p, grid):
    v = p["v"]
    lhs = np.empty(len(v))
    for n, (vn, xn) in enumerate(zip(v, p["x_dir"])):
        frame = NullFrame.at(xn)
        lhs[n] = abs(vn @ frame.e2) + abs(vn @ frame.e3)
    return lhs, _norm(np.cross(v, p["x_dir"]))


def _weight_subadditivity(p, grid):
    t, x, c = p["t"], p["x"], p["c"]
    vp, up = _post(p)
    k = SUBADDITIVITY_K
    tt = t[:, None]
    lhs = log_composite_weight(p["v"], tt, x, k, c)
    a = log_composite_weight(vp, tt, x, k, c)
    b = log_composite_weight(up, tt, x, k, c)
    return lhs, np.logaddexp(a, b)


def _weight_transfer(p, grid):
    t, x, c = p["t"], p["x"], p["c"]
    vp, up = _post(p)
    lhs = bracket(_spread(t, x, p["v"], c))
    loss = np.minimum(bracket(vp), bracket(up)) ** 2
    rhs = loss * (bracket(_spread(t, x, vp, c)) + bracket(_spread(t, x, up, c)))
    return lhs, rhs


def _velocity_gap(p, grid):
    c = p["c"]
    v, u = p["v"], p["u"]
    vp, _ = _post(p)
    beta = lambda w: w / energy(w, c)[:, None]  # noqa: E731
    lhs = np.minimum(_norm(beta(vp) - beta(v)), _norm(beta(vp) - beta(u)))
    rhs = np.minimum(energy(v, c), energy(u, c)) ** 2 / c ** 2 * _norm(beta(v) - beta(u))
    return lhs, rhs


def _worst_pair(pairs: Dict[str, Tuple[np.ndarray, np.ndarray]]):
    """Collapse several lhs <= rhs bounds into the row-wise largest ratio."""
    stacked = []
    for lhs, rhs in pairs.values():
        lhs = np.asarray(lhs, dtype=float)
        rhs = np.asarray(rhs, dtype=float)
        with np.errstate(divide="ignore", invalid="ignore"):
            stacked.append(np.where(lhs == 0.0, 0.0, lhs / rhs))
    return np.max(np.stack(stacked), axis=0), np.ones(len(stacked[0]))


def _g_bounds(p, grid):
    return _worst_pair(collision_bounds(p["v"], p["u"], p["c"]))


def _post_momentum(p, grid):
    return _worst_pair(post_momentum_bound(p["v"], p["u"], p["omega"], p["c"]))


def _moller_majorant(p, grid):
    kernel = KernelSpec(gamma=p["gamma"], sigma0=p["sigma0"], c=p["c"])
    return majorant_ratio(p["v"], p["u"], kernel, p["cos_theta"]), np.ones(len(p["v"]))


def _carleman(regime: str):
    def evaluate(p, grid):
        c = p["c"]
        vp = p["vp"]
        scale = _norm(vp)
        if regime == "v_geq_vp":
            size = scale + p["extra"]
        else:
            size = scale * p["fraction"]
        v = size[:, None] * p["v_dir"]
        lhs = np.array([carleman_C(vn, wn, b, k, c) for vn, wn, b, k in zip(v, vp, p["beta"], p["k"])])
        rhs = np.array([carleman_bound(vn, wn, b, c)["bound"] for vn, wn, b in zip(v, vp, p["beta"])])
        return lhs, rhs
    return evaluate


# ------------------------------------------------------------------
# Dispersion and integral bounds
# ------------------------------------------------------------------

_DISPERSION_GRID = ConeGrid(n_shells=1, n_velocity=8, velocity_mode="auto")


def _dispersion(p, grid):
    """||f||_{L^p_v} (1+t)^(3/p) against sup_v <v>^5 <x - t vhat>^4 f for free-transport data."""
    c, power = p["c"], p["p"]
    source = FreeTransportGaussian(c)
    lhs = np.empty(len(p["t"]))
    rhs = np.empty(len(p["t"]))
    momentum = ConeGrid(n_shells=1, n_velocity=_DISPERSION_GRID.n_velocity, velocity_mode="momentum")
    position = ConeGrid(n_shells=1, n_velocity=_DISPERSION_GRID.n_velocity, velocity_mode="position")
    for n, (t, x) in enumerate(zip(p["t"], p["x"])):
        s = np.array([t])
        v, w = source.velocity_rule(s, x[None, :], _DISPERSION_GRID)
        f = source.evaluate(s[:, None], x[None, None, :], v)
        lhs[n] = float(np.sum(w * f ** power)) ** (1.0 / power) * (1.0 + t) ** (3.0 / power)
        probes = [source.velocity_rule(s, x[None, :], momentum)[0][0]]
        if t > 0.0:
            probes.append(source.velocity_rule(s, x[None, :], position)[0][0])
        probes = np.vstack(probes)
        f_probe = source.evaluate(t, x, probes)
        weight = bracket(probes) ** 5 * bracket(x - t * rel_velocity(probes, c)) ** 4
        rhs[n] = float(np.max(weight * f_probe))
    return lhs, rhs


def _transport_weight(p, grid):
    lhs = np.array([transport_weight_integral(t, r, p["c"], 4.0, grid) for t, r in zip(p["t"], p["r"])])
    return lhs, np.ones(len(lhs))


def _sphere_mean(p, grid):
    """integral_{|x-y|=t} (1+|y|)^-k dS against t^i (1+t+|x|)^-1 (1+|t-|x||)^-(k-2)."""
    grid = grid or IntegralGrid()
    t, r, k, i = p["t"], p["r"], p["k"], p["i"]
    lhs = np.empty(len(t))
    for n in range(len(t)):
        if t[n] == 0.0:
            lhs[n] = 0.0
            continue
        kn = k[n]
        lhs[n] = float(sphere_integrals(lambda tau, rho: (1.0 + rho) ** (-kn), np.array([t[n]]), r[n], grid)[0])
    rhs = t ** i / ((1.0 + t + r) * (1.0 + np.abs(t - r)) ** (k - 2.0))
    return lhs, rhs


def _cone_bound(kind: str, a: float = 3.0):
    def evaluate(p, grid):
        c = p["c"]
        t, r = p["t"], p["r"]
        if kind == "I3":
            t = 1.0 / c + t
            lhs = np.array([i3_lhs(tn, rn, c, grid) for tn, rn in zip(t, r)])
            return lhs, i3_rhs(t, r, c)
        if kind == "I1":
            lhs = np.array([i1_lhs(tn, rn, c, a, grid) for tn, rn in zip(t, r)])
            return lhs, i1_rhs(t, r, c, a)
        lhs = np.array([i2_lhs(tn, rn, c, a, grid) for tn, rn in zip(t, r)])
        return lhs, i2_rhs(t, r, c, a)
    return evaluate


# ------------------------------------------------------------------
# Registry
# ------------------------------------------------------------------

_CARLEMAN_AXES = (
    Axis("vp", "vector", hi=V_MAX),
    Axis("v_dir", "direction"),
    Axis("beta", "uniform", lo=-1.0, hi=3.0),
    Axis("k", "uniform", lo=9.0, hi=20.0),
    _C,
)

_CASES: Dict[str, InequalityCase] = {
    case.case_id: case
    for case in (
        InequalityCase("main_inequality", "1+t+|x| <= C (1+|t-|x|/c|) <v>^4 <x-t vhat>^2",
                       (_T, _X, _V, _C), _main_inequality),
        InequalityCase("x_ge_ct", "1+t+|x| <= C <v>^2 <x-t vhat> for |x| >= ct",
                       (_T, Axis("gap", "log1p", hi=X_MAX_OVER_C, per_c=True), _X_DIR, _V, _C), _x_ge_ct),
        InequalityCase("kappa_speed", "c/v0 <= C sqrt(kappa)", (_X_DIR, _V, _C), _kappa_speed),
        InequalityCase("kappa_cross", "|v x x/r| / v0 <= C sqrt(kappa)", (_X_DIR, _V, _C), _kappa_cross),
        InequalityCase("kappa_tangential", "|v.e2'| + |v.e3'| <= C |v x x/r|", (_X_DIR, _V, _C),
                       _kappa_tangential),
        InequalityCase("l1_linf", "||f||_L1v (1+t)^3 <= C ||<v>^5 <x-t vhat>^4 f||_inf",
                       (_T, _X, _C, Axis("p", "choice", choices=(1.0,))), _dispersion, default_samples=2_000),
        InequalityCase("lp_linf", "||f||_Lpv (1+t)^(3/p) <= C ||<v>^5 <x-t vhat>^4 f||_inf",
                       (_T, _X, _C, Axis("p", "choice", choices=(1.5, 2.0, 4.0))), _dispersion,
                       default_samples=2_000),
        InequalityCase("transport_weight", "int t^3 <x-t vhat>^-4 <v>^-5 dv <= C",
                       (_T, _R, _C), _transport_weight, default_samples=2_000, integral=True),
        InequalityCase("sphere_mean",
                       "int_{|x-y|=t} (1+|y|)^-k dS <= C t^i (1+t+|x|)^-1 (1+|t-|x||)^-(k-2)",
                       (_T, Axis("r", "log1p", hi=X_MAX_OVER_C), Axis("k", "uniform", lo=3.0, hi=6.0),
                        Axis("i", "choice", choices=(1.0, 2.0))),
                       _sphere_mean, default_samples=2_000, integral=True),
        InequalityCase("I1", "first cone integral, a = 4", (_T, _R, _C), _cone_bound("I1", 4.0),
                       default_samples=512, integral=True),
        InequalityCase("I1_3plus", "first cone integral, a = 3.1", (_T, _R, _C), _cone_bound("I1", 3.1),
                       default_samples=512, integral=True, notes="a = 3.1 stands in for the 3+ exponent"),
        InequalityCase("I2", "second cone integral, a = 3", (_T, _R, _C), _cone_bound("I2", 3.0),
                       default_samples=512, integral=True),
        InequalityCase("I3", "third cone integral on 1 <= |y-x| <= ct",
                       (Axis("t", "log1p", hi=T_MAX), _R, _C), _cone_bound("I3"),
                       default_samples=512, integral=True, notes="t is offset by 1/c"),
        InequalityCase("weight_subadditivity", "n(v) <= C (n(v') + n(u')), k = 10",
                       (_T, _X, _V, _U, _OMEGA, _C), _weight_subadditivity, log_space=True),
        InequalityCase("weight_transfer",
                       "<x-t vhat> <= C min(<v'>,<u'>)^2 (<x-t vhat'> + <x-t uhat'>)",
                       (_T, _X, _V, _U, _OMEGA, _C), _weight_transfer),
        InequalityCase("velocity_gap",
                       "min |v'/v0' - v/v0|, |v'/v0' - u/u0| <= C min(v0,u0)^2/c^2 |v/v0 - u/u0|",
                       (_V, _U, _OMEGA, _C), _velocity_gap),
        InequalityCase("g_bounds", "elementary bounds on g and s (worst of five)", (_V, _U, _C), _g_bounds),
        InequalityCase("post_momentum", "1 + |v'|^2 <= 1 + 3(|v|^2 + |u|^2)", (_V, _U, _OMEGA, _C),
                       _post_momentum),
        InequalityCase("moller_majorant", "v_phi sigma <= 1 + |v-u|^gamma",
                       (_V, _U, Axis("cos_theta", "uniform", lo=-1.0, hi=1.0), _C,
                        Axis("gamma", "choice", choices=(0.0, -0.5, -1.0, -1.5, -1.9)),
                        Axis("sigma0", "choice", choices=("constant", "cos2_half"))),
                       _moller_majorant),
        InequalityCase("carleman_geq", "C(v, v', beta, k) <= c^beta for |v| >= |v'|",
                       _CARLEMAN_AXES[:1] + (Axis("extra", "log1p", hi=V_MAX),) + _CARLEMAN_AXES[1:],
                       _carleman("v_geq_vp"), default_samples=2_000),
        InequalityCase("carleman_le", "C(v, v', beta, k) <= v0'^(beta+1)/c + c^beta for |v| <= |v'|",
                       _CARLEMAN_AXES[:1] + (Axis("fraction", "uniform", lo=0.0, hi=1.0),) + _CARLEMAN_AXES[1:],
                       _carleman("v_le_2vp"), default_samples=2_000),
    )
}


def case_ids() -> List[str]:
    return sorted(_CASES)


def get_case(case_id: str) -> InequalityCase:
    case = _CASES.get(case_id)
    if case is None:
        raise ParameterError(f"Unknown case '{case_id}'. Available: {case_ids()}")
    return case
