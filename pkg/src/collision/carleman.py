"""Radially reduced Carleman mid-term C(v, v', beta, k, c).

With u0 = sqrt(c^2 + |u|^2), |u| d|u| = u0 du0 and the indicator
v0 + u0 - v0' >= c becomes a lower limit, so

    C = int_{u0 >= L} u0^(beta+1) (1 + (v0 + u0 - v0')^2 - c^2)^(-k/2) du0,
    L = max(c, c + v0' - v0).

The integrand peaks in a layer of width ~1/c above L, so both evaluators
split the range geometrically starting at that scale.
"""

import logging
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
from scipy import integrate, optimize

from src.errors import ParameterError
from src.kinematics import energy

log = logging.getLogger(__name__)

BETA_MIN = -1.0
K_MIN = 8.0


def _check_params(beta: float, k: float, c: float) -> None:
    if beta < BETA_MIN:
        raise ParameterError(f"beta must be >= {BETA_MIN}, got {beta}")
    if k < K_MIN:
        raise ParameterError(f"k must be >= {K_MIN}, got {k}")
    if c < 1.0:
        raise ParameterError(f"c must be >= 1, got {c}")


def _limits(v, vp, c: float, u_max: float):
    v0 = float(energy(np.asarray(v, dtype=float), c))
    vp0 = float(energy(np.asarray(vp, dtype=float), c))
    lower = max(c, c + vp0 - v0)
    upper = np.inf if not np.isfinite(u_max) else float(np.sqrt(c * c + u_max * u_max))
    return v0, vp0, lower, upper


def _integrand(u0, v0, vp0, beta, k, c):
    x = v0 + u0 - vp0
    return u0 ** (beta + 1.0) * (1.0 + x * x - c * c) ** (-0.5 * k)


def _breakpoints(lower: float, upper: float, c: float) -> List[float]:
    width = 1.0 / c
    edges = [lower]
    step = width
    while lower + step < upper and step < 1e8 * max(1.0, lower):
        edges.append(lower + step)
        step *= 10.0
    return edges


def carleman_C(v, vp, beta: float, k: float, c: float = 1.0, u_max: float = np.inf) -> float:
    """Adaptive (scipy quad) evaluation; 0 when the admissible u0 range is empty."""
    _check_params(beta, k, c)
    v0, vp0, lower, upper = _limits(v, vp, c, u_max)
    if lower >= upper:
        return 0.0
    edges = _breakpoints(lower, upper, c)
    total = 0.0
    args = (v0, vp0, beta, k, c)
    for a, b in zip(edges[:-1], edges[1:]):
        total += integrate.quad(_integrand, a, b, args=args, epsabs=0.0, epsrel=1e-12, limit=200)[0]
    total += integrate.quad(_integrand, edges[-1], upper, args=args, epsabs=0.0, epsrel=1e-12, limit=200)[0]
    return float(total)


def carleman_C_reference(v, vp, beta: float, k: float, c: float = 1.0, u_max: float = np.inf,
                         n: int = 32) -> float:
    """Composite Gauss-Legendre on geometric panels, with a mapped tail."""
    _check_params(beta, k, c)
    v0, vp0, lower, upper = _limits(v, vp, c, u_max)
    if lower >= upper:
        return 0.0
    x, w = np.polynomial.legendre.leggauss(n)
    edges = [lower]
    step = 1e-3 / c
    cap = 1e6 * max(1.0, lower)
    while step < cap and lower + step < upper:
        edges.append(lower + step)
        step *= 2.0
    if np.isfinite(upper):
        edges.append(upper)
    edges = np.asarray(edges)
    a, b = edges[:-1], edges[1:]
    half = 0.5 * (b - a)
    nodes = (a + half)[:, None] + half[:, None] * x[None, :]
    total = float(np.sum(half[:, None] * w[None, :] * _integrand(nodes, v0, vp0, beta, k, c)))
    if not np.isfinite(upper):
        # u0 = A / y on (0, 1]: int_A^inf F(u0) du0 = int_0^1 F(A/y) A / y^2 dy
        y = 0.5 * (x + 1.0)
        A = edges[-1]
        total += float(np.sum(0.5 * w * _integrand(A / y, v0, vp0, beta, k, c) * A / (y * y)))
    return total


def carleman_bound(v, vp, beta: float, c: float = 1.0) -> Dict[str, Any]:
    """Bound for C: c^beta when |v| >= |v'|, else (v0')^(beta+1)/c + c^beta."""
    nv = float(np.linalg.norm(v))
    nvp = float(np.linalg.norm(vp))
    if nv >= nvp:
        return {"regime": "v_geq_vp", "bound": c ** beta}
    vp0 = float(energy(np.asarray(vp, dtype=float), c))
    return {"regime": "v_le_2vp", "bound": vp0 ** (beta + 1.0) / c + c ** beta}


def _random_momentum(rng: np.random.Generator, scale: float) -> np.ndarray:
    direction = rng.normal(size=3)
    direction /= np.linalg.norm(direction)
    return direction * scale * rng.exponential()


def carleman_scan(
    n: int,
    seed: int = 0,
    beta_range=(-1.0, 3.0),
    k_range=(9.0, 20.0),
    c_range=(1.0, 100.0),
    regime: Optional[str] = None,
) -> List[Dict[str, Any]]:
    """Ratios C / bound over random (v, v', beta, k, c); c is drawn log-uniformly."""
    rng = np.random.default_rng(seed)
    rows = []
    log_c = np.log(c_range)
    while len(rows) < n:
        c = float(np.exp(rng.uniform(*log_c)))
        beta = float(rng.uniform(*beta_range))
        k = float(rng.uniform(*k_range))
        v = _random_momentum(rng, c)
        vp = _random_momentum(rng, c)
        b = carleman_bound(v, vp, beta, c)
        if regime is not None and b["regime"] != regime:
            continue
        value = carleman_C(v, vp, beta, k, c)
        rows.append({
            "c": c, "beta": beta, "k": k,
            "v_norm": float(np.linalg.norm(v)), "vp_norm": float(np.linalg.norm(vp)),
            "regime": b["regime"], "value": value, "bound": b["bound"],
            "ratio": value / b["bound"],
        })
    log.info("[carleman] scan n=%d max_ratio=%.4g", n, max(r["ratio"] for r in rows) if rows else 0.0)
    return rows


def scan_summary(rows: Iterable[Dict[str, Any]]) -> Dict[str, Any]:
    ratios = np.array([r["ratio"] for r in rows], dtype=float)
    if ratios.size == 0:
        return {"n": 0, "max_ratio": 0.0, "finite": True}
    return {
        "n": int(ratios.size),
        "max_ratio": float(np.max(ratios)),
        "median_ratio": float(np.median(ratios)),
        "finite": bool(np.all(np.isfinite(ratios))),
    }


def polished_sup(
    rows: List[Dict[str, Any]],
    beta_range=(-1.0, 3.0),
    k_range=(9.0, 20.0),
    c_range=(1.0, 100.0),
    regime: Optional[str] = None,
    starts: int = 3,
    max_evals: int = 300,
    max_momentum: float = 20.0,
) -> Dict[str, Any]:
    """Sup of the scan ratio, improved by bounded Powell searches from the top ``starts`` rows.

    C and its bound depend on v and v' through |v| and |v'| only, so the
    search runs over (beta, k, log c, |v|/c, |v'|/c).
    """
    if not rows:
        return {"sup": 0.0, "beta": None, "k": None, "c": None, "v_norm": None, "vp_norm": None}
    bounds = [tuple(beta_range), tuple(k_range), tuple(np.log(c_range)), (0.0, max_momentum), (0.0, max_momentum)]

    def ratio(x) -> float:
        beta, k, log_c, a, b = x
        c = float(np.exp(log_c))
        v, vp = [a * c, 0.0, 0.0], [b * c, 0.0, 0.0]
        bound = carleman_bound(v, vp, beta, c)
        if regime is not None and bound["regime"] != regime:
            return 0.0
        return carleman_C(v, vp, beta, k, c) / bound["bound"]

    def objective(x):
        r = ratio(x)
        return -r if np.isfinite(r) else -1e300

    best = max(rows, key=lambda r: r["ratio"])
    sup = float(best["ratio"])
    arg = [best["beta"], best["k"], float(np.log(best["c"])), best["v_norm"] / best["c"], best["vp_norm"] / best["c"]]
    for row in sorted(rows, key=lambda r: -r["ratio"])[:starts]:
        x0 = [row["beta"], row["k"], float(np.log(row["c"])), row["v_norm"] / row["c"], row["vp_norm"] / row["c"]]
        x0 = [float(np.clip(x, lo, hi)) for x, (lo, hi) in zip(x0, bounds)]
        res = optimize.minimize(objective, np.asarray(x0), method="Powell", bounds=bounds,
                                options={"maxfev": max_evals, "xtol": 1e-6, "ftol": 1e-10})
        if -float(res.fun) > sup:
            sup, arg = -float(res.fun), [float(x) for x in res.x]
    c = float(np.exp(arg[2]))
    return {"sup": sup, "beta": arg[0], "k": arg[1], "c": c, "v_norm": arg[3] * c, "vp_norm": arg[4] * c}
