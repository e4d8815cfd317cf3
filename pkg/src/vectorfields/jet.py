"""Second-order jets on phase space (t, x1, x2, x3, v1, v2, v3).

A PhaseJet holds the value, gradient and (optionally) Hessian of a function at
one point.  Jets combine with + - * / and the elementary functions below, so a
test function written in terms of ``PhaseJet.coordinates(...)`` carries exact
first and second derivatives.
"""

from typing import Callable, Optional, Tuple

import numpy as np

from src.errors import MissingDerivativeError, ParameterError

DIM = 7
T = 0
X = (1, 2, 3)
V = (4, 5, 6)


class PhaseJet:
    __slots__ = ("point", "value", "grad", "hess")
    __array_ufunc__ = None

    def __init__(self, point, value: float, grad=None, hess=None):
        self.point = np.asarray(point, dtype=float)
        self.value = float(value)
        self.grad = np.zeros(DIM) if grad is None else np.asarray(grad, dtype=float)
        self.hess = None if hess is None else np.asarray(hess, dtype=float)

    # -- construction --
    @staticmethod
    def make_point(t: float, x, v) -> np.ndarray:
        return np.concatenate([[float(t)], np.asarray(x, dtype=float), np.asarray(v, dtype=float)])

    @classmethod
    def constant(cls, point, value: float, order: int = 2) -> "PhaseJet":
        return cls(point, value, np.zeros(DIM), np.zeros((DIM, DIM)) if order == 2 else None)

    @classmethod
    def coordinates(cls, t: float, x, v) -> Tuple["PhaseJet", ...]:
        """The seven coordinate functions as jets at (t, x, v)."""
        point = cls.make_point(t, x, v)
        return tuple(cls(point, point[a], np.eye(DIM)[a], np.zeros((DIM, DIM))) for a in range(DIM))

    @classmethod
    def from_function(cls, func: Callable, t: float, x, v, step: float = 1e-4) -> "PhaseJet":
        """Central-difference jet of ``func(point)``; accurate to O(step^2)."""
        point = cls.make_point(t, x, v)
        f0 = float(func(point))
        eye = np.eye(DIM) * step
        grad = np.empty(DIM)
        hess = np.empty((DIM, DIM))
        for a in range(DIM):
            fp, fm = func(point + eye[a]), func(point - eye[a])
            grad[a] = (fp - fm) / (2.0 * step)
            hess[a, a] = (fp - 2.0 * f0 + fm) / step ** 2
            for b in range(a):
                d = (func(point + eye[a] + eye[b]) - func(point + eye[a] - eye[b])
                     - func(point - eye[a] + eye[b]) + func(point - eye[a] - eye[b])) / (4.0 * step ** 2)
                hess[a, b] = hess[b, a] = d
        return cls(point, f0, grad, hess)

    # -- views --
    @property
    def order(self) -> int:
        return 2 if self.hess is not None else 1

    @property
    def d_t(self) -> float:
        return float(self.grad[T])

    @property
    def d_x(self) -> np.ndarray:
        return self.grad[1:4]

    @property
    def d_v(self) -> np.ndarray:
        return self.grad[4:7]

    def partial(self, a: int) -> "PhaseJet":
        """First-order jet of the a-th partial derivative."""
        if self.hess is None:
            raise MissingDerivativeError(
                f"jet carries no second derivatives; cannot differentiate d_{a} again"
            )
        return PhaseJet(self.point, self.grad[a], self.hess[a], None)

    # -- arithmetic --
    def _lift(self, other) -> "PhaseJet":
        if isinstance(other, PhaseJet):
            if not np.array_equal(other.point, self.point):
                raise ParameterError("jets evaluated at different points cannot be combined")
            return other
        return PhaseJet.constant(self.point, float(other), order=self.order)

    @staticmethod
    def _hess_sum(a, b):
        return None if a is None or b is None else a + b

    def __add__(self, other):
        o = self._lift(other)
        return PhaseJet(self.point, self.value + o.value, self.grad + o.grad, self._hess_sum(self.hess, o.hess))

    __radd__ = __add__

    def __neg__(self):
        return PhaseJet(self.point, -self.value, -self.grad, None if self.hess is None else -self.hess)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return self._lift(other) - self

    def __mul__(self, other):
        o = self._lift(other)
        grad = self.grad * o.value + o.grad * self.value
        hess = None
        if self.hess is not None and o.hess is not None:
            cross = np.outer(self.grad, o.grad)
            hess = self.hess * o.value + o.hess * self.value + cross + cross.T
        return PhaseJet(self.point, self.value * o.value, grad, hess)

    __rmul__ = __mul__

    def _compose(self, f0: float, f1: float, f2: float) -> "PhaseJet":
        """phi(self) given phi, phi', phi'' at self.value."""
        hess = None if self.hess is None else f1 * self.hess + f2 * np.outer(self.grad, self.grad)
        return PhaseJet(self.point, f0, f1 * self.grad, hess)

    def reciprocal(self) -> "PhaseJet":
        u = self.value
        if u == 0.0:
            raise ParameterError("reciprocal of a jet with zero value")
        return self._compose(1.0 / u, -1.0 / u ** 2, 2.0 / u ** 3)

    def __truediv__(self, other):
        return self * self._lift(other).reciprocal()

    def __rtruediv__(self, other):
        return self._lift(other) * self.reciprocal()

    def __pow__(self, p: float):
        u = float(self.value)
        p = float(p)
        return self._compose(u ** p, p * u ** (p - 1.0), p * (p - 1.0) * u ** (p - 2.0))

    def exp(self) -> "PhaseJet":
        e = float(np.exp(self.value))
        return self._compose(e, e, e)

    def sqrt(self) -> "PhaseJet":
        if self.value <= 0.0:
            raise ParameterError(f"sqrt of a jet needs a positive value, got {self.value}")
        return self ** 0.5

    def sin(self) -> "PhaseJet":
        s, c = float(np.sin(self.value)), float(np.cos(self.value))
        return self._compose(s, c, -s)

    def cos(self) -> "PhaseJet":
        s, c = float(np.sin(self.value)), float(np.cos(self.value))
        return self._compose(c, -s, -c)

    def __repr__(self) -> str:
        return f"PhaseJet(value={self.value:.6g}, order={self.order})"


def energy_jet(v_jets, c: float) -> PhaseJet:
    """v0 = sqrt(c^2 + |v|^2) as a jet."""
    total = c * c
    for vj in v_jets:
        total = vj * vj + total
    return total.sqrt()


def gaussian_test_jet(t: float, x, v, seed: int = 0, c: Optional[float] = None) -> PhaseJet:
    """Generic smooth test function: a shifted Gaussian times an affine factor, plus v0 when c is given."""
    rng = np.random.default_rng(seed)
    z = PhaseJet.coordinates(t, x, v)
    centers = rng.normal(size=DIM) * 0.5
    widths = rng.uniform(0.5, 2.0, size=DIM)
    slope = rng.normal(size=DIM) * 0.3
    quad = 0.0
    affine = 1.0
    for a in range(DIM):
        d = (z[a] - centers[a]) / widths[a]
        quad = d * d + quad
        affine = z[a] * slope[a] + affine
    out = (quad * -0.5).exp() * affine
    if c is not None:
        out = out + energy_jet(z[4:7], c) * (0.1 * float(slope[0]))
    return out
