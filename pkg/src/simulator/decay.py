"""Decay-exponent regression on time series.

``measure_decay`` fits log(value) = p log(t + offset) + b by least squares
over a window inside the series; ``log_growth_fit`` checks that a growth
factor stays below C log^power(3 + t) with C fitted on the early part.
"""

import logging
from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from src.errors import FitError

log = logging.getLogger(__name__)

MIN_POINTS = 8


@dataclass
class DecayFit:
    quantity: str
    window: Tuple[float, float]
    exponent: float
    intercept: float
    r2: float
    n_points: int
    offset: float = 1.0
    stderr: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["window"] = list(self.window)
        return d

    def within(self, lo: float, hi: float) -> bool:
        return lo <= self.exponent <= hi


def _series_arrays(series) -> Tuple[np.ndarray, np.ndarray]:
    data = np.asarray(series, dtype=float)
    if data.ndim != 2 or data.shape[1] != 2:
        raise FitError(f"series must be a list of (t, value) pairs, got shape {data.shape}")
    return data[:, 0], data[:, 1]


def measure_decay(series: Sequence[Tuple[float, float]], window: Optional[Tuple[float, float]] = None,
                  quantity: str = "value", offset: float = 1.0, min_points: int = MIN_POINTS) -> DecayFit:
    """Least-squares slope of log value against log(t + offset) inside ``window``."""
    t, y = _series_arrays(series)
    if len(t) == 0:
        raise FitError("empty series")
    span = (float(np.min(t)), float(np.max(t)))
    if window is None:
        window = span
    lo, hi = float(window[0]), float(window[1])
    if lo >= hi or lo < span[0] or hi > span[1]:
        raise FitError(f"window {window} must be an interval inside the simulated span {span}")
    rows = (t >= lo) & (t <= hi)
    if int(np.sum(rows)) < min_points:
        raise FitError(f"need >= {min_points} points in window {window}, got {int(np.sum(rows))}")
    t, y = t[rows], y[rows]
    if np.any(~np.isfinite(y)) or np.any(y <= 0.0):
        raise FitError(f"'{quantity}' has non-positive values in window {window}; cannot take logs")
    if np.any(t + offset <= 0.0):
        raise FitError(f"t + offset must be > 0 (offset={offset})")

    lx = np.log(t + offset)
    ly = np.log(y)
    fit = stats.linregress(lx, ly)
    resid = ly - (fit.intercept + fit.slope * lx)
    ss_tot = float(np.sum((ly - ly.mean()) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - float(np.sum(resid * resid)) / ss_tot
    out = DecayFit(quantity, (lo, hi), float(fit.slope), float(fit.intercept), r2, len(t),
                   float(offset), float(fit.stderr))
    log.info("[decay] %s exponent=%.4f r2=%.4f over [%g, %g] (%d points)", quantity, out.exponent, r2,
             lo, hi, len(t))
    return out


@dataclass
class GrowthFit:
    quantity: str
    constant: float
    power: int
    split: float
    worst_ratio: float
    holds: bool

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def log_growth_fit(times, values, power: int = 3, split: Optional[float] = None,
                   quantity: str = "weighted_sup") -> GrowthFit:
    """Growth factor values/values[0] against C log^power(3 + t).

    C is the largest ratio seen up to ``split`` (default: the geometric middle
    of the span); ``holds`` reports whether the bound survives on the rest.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    if len(t) < 2 or len(t) != len(v):
        raise FitError(f"need matching series of >= 2 points, got {len(t)} times and {len(v)} values")
    if v[0] <= 0.0 or np.any(~np.isfinite(v)):
        raise FitError(f"'{quantity}' must start positive and stay finite")
    if split is None:
        split = float(np.sqrt((1.0 + t[0]) * (1.0 + t[-1])) - 1.0)
    ratio = (v / v[0]) / np.log(3.0 + t) ** power
    early = t <= split
    constant = float(np.max(ratio[early]))
    worst = float(np.max(ratio / constant))
    out = GrowthFit(quantity, constant, power, split, worst, worst <= 1.0 + 1e-12)
    log.info("[decay] %s growth C=%.4g worst/C=%.4f holds=%s", quantity, constant, worst, out.holds)
    return out
