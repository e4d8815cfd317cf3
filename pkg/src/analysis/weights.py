"""Polynomial phase-space weights."""

import numpy as np

from src.collision.estimates import log_weight
from src.errors import ParameterError
from src.kinematics import bracket, rel_velocity


def _check_order(name: str, n) -> None:
    if int(n) != n or n < 0:
        raise ParameterError(f"{name} must be a non-negative integer, got {n}")


def weight_W(n1: int, n2: int, t: float, x, v, c: float):
    """<v>^n1 <x - t vhat>^n2."""
    _check_order("N1", n1)
    _check_order("N2", n2)
    x = np.asarray(x, dtype=float)
    d = x - t * rel_velocity(v, c)
    return bracket(v) ** n1 * bracket(d) ** n2


def log_composite_weight(v, t: float, x, k: float, c: float):
    if k < 1:
        raise ParameterError(f"composite weight needs k >= 1, got {k}")
    return log_weight(v, t, x, k, c)


def composite_weight(v, t: float, x, k: float, c: float):
    """<x - t vhat>^k <v>^(4k+50) + <x - t vhat>^(k+10) <v>^(2k+20).

    Overflows past |v| ~ 1e3 for large k; use ``log_composite_weight`` there.
    """
    return np.exp(log_composite_weight(v, t, x, k, c))
