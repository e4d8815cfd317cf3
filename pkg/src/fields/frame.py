"""Spherical null frame, null decomposition of (E, B) and the Lorentz-force bound."""

from dataclasses import dataclass
from typing import Any, Dict, Optional

import numpy as np

from src.errors import DegenerateError
from src.kinematics import energy, kappa


def _unit(x) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    r = float(np.linalg.norm(x))
    if r == 0.0:
        raise DegenerateError("the null frame is undefined at x = 0")
    return x / r


@dataclass(frozen=True)
class NullFrame:
    """e1' = x/r, e2' = d/d(theta), e3' = d/d(phi); at the polar axis phi is taken as 0."""

    e1: np.ndarray
    e2: np.ndarray
    e3: np.ndarray

    @classmethod
    def at(cls, x) -> "NullFrame":
        e1 = _unit(x)
        cos_t = float(np.clip(e1[2], -1.0, 1.0))
        sin_t = float(np.hypot(e1[0], e1[1]))
        phi = float(np.arctan2(e1[1], e1[0])) if sin_t > 0.0 else 0.0
        e2 = np.array([cos_t * np.cos(phi), cos_t * np.sin(phi), -sin_t])
        e3 = np.array([-np.sin(phi), np.cos(phi), 0.0])
        return cls(e1, e2, e3)

    def matrix(self) -> np.ndarray:
        return np.vstack([self.e1, self.e2, self.e3])

    def orthonormality_error(self) -> float:
        m = self.matrix()
        ortho = float(np.max(np.abs(m @ m.T - np.eye(3))))
        hand = float(np.max(np.abs(np.cross(self.e1, self.e2) - self.e3)))
        return max(ortho, hand)


@dataclass
class FieldSample:
    """(E, B) at (t, x) with the radial and null components."""

    E: np.ndarray
    B: np.ndarray
    x: np.ndarray
    t: float = 0.0

    def __post_init__(self):
        self.E = np.asarray(self.E, dtype=float)
        self.B = np.asarray(self.B, dtype=float)
        self.x = np.asarray(self.x, dtype=float)
        self.frame = NullFrame.at(self.x)

    @property
    def rho(self) -> float:
        return float(self.E @ self.frame.e1)

    @property
    def sigma(self) -> float:
        return float(self.B @ self.frame.e1)

    @property
    def alpha1(self) -> float:
        return float(self.E @ self.frame.e2 + self.B @ self.frame.e3)

    @property
    def alpha2(self) -> float:
        return float(self.E @ self.frame.e3 - self.B @ self.frame.e2)

    def outgoing_alpha(self):
        """Tangential part of E + e1' x B; vanishes on outgoing radiation."""
        f = self.frame
        return (float(self.E @ f.e2 - self.B @ f.e3), float(self.E @ f.e3 + self.B @ f.e2))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "t": self.t,
            "x": self.x.tolist(),
            "E": self.E.tolist(),
            "B": self.B.tolist(),
            "rho": self.rho,
            "sigma": self.sigma,
            "alpha1": self.alpha1,
            "alpha2": self.alpha2,
        }


def null_decompose(E, B, x, t: float = 0.0) -> FieldSample:
    return FieldSample(E, B, x, t)


def lorentz_force_bound_ratio(E, B, x, v, c: float) -> float:
    """(c/v0)|E + (v/v0) x B| over kappa(|E|+|B|) + sqrt(kappa)(|alpha|+|rho|).

    alpha is the outgoing tangential pair (E.e2' - B.e3', E.e3' + B.e2'); 0/0 is reported as 0.
    """
    sample = FieldSample(E, B, x)
    v = np.asarray(v, dtype=float)
    v0 = float(energy(v, c))
    force = (c / v0) * float(np.linalg.norm(sample.E + np.cross(v / v0, sample.B)))
    k = float(kappa(v, sample.x, c))
    a1, a2 = sample.outgoing_alpha()
    bound = (k * (np.linalg.norm(sample.E) + np.linalg.norm(sample.B))
             + np.sqrt(k) * (np.hypot(a1, a2) + abs(sample.rho)))
    if bound == 0.0:
        return 0.0 if force == 0.0 else float("inf")
    return float(force / bound)


def lorentz_force_scan(n: int, seed: int = 0, c_range=(1.0, 100.0)) -> Dict[str, Any]:
    """Sup of the bound ratio over random (E, B, x, v, c)."""
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n):
        c = float(np.exp(rng.uniform(*np.log(c_range))))
        E, B, x = rng.normal(size=(3, 3))
        v = rng.normal(size=3) * c * rng.exponential(2.0)
        worst = max(worst, lorentz_force_bound_ratio(E, B, x, v, c))
    return {"n": n, "sup_ratio": worst}


# ------------------------------------------------------------------
# Cross-product identities
# ------------------------------------------------------------------

def cross_identities_check(a, b, c, d, x: Optional[np.ndarray] = None) -> Dict[str, float]:
    """Residuals of the vector identities, scaled by the size of the inputs; ``max`` is the largest."""
    a, b, c, d = (np.asarray(z, dtype=float) for z in (a, b, c, d))
    scale = max(1.0, float(np.prod([np.linalg.norm(z) for z in (a, b, c, d)])))
    res = {
        "binet_cauchy": abs(np.cross(a, b) @ np.cross(c, d) - ((a @ c) * (b @ d) - (a @ d) * (b @ c))),
        "triple_cross": float(np.max(np.abs(np.cross(np.cross(a, b), c) - (b * (a @ c) - a * (b @ c))))),
        "triple_product": max(abs(a @ np.cross(b, c) - b @ np.cross(c, a)),
                              abs(a @ np.cross(b, c) - c @ np.cross(a, b))),
        "jacobi": float(np.max(np.abs(
            np.cross(np.cross(a, b), c) + np.cross(np.cross(b, c), a) + np.cross(np.cross(c, a), b)
        ))),
        "polarisation": float(np.max(np.abs(a * b + c * d - 0.5 * ((a + c) * (b + d) + (a - c) * (b - d))))),
    }
    if x is not None:
        f = NullFrame.at(x)
        frame_res = max(
            np.max(np.abs(np.cross(a, f.e2) - ((a @ f.e1) * f.e3 - (a @ f.e3) * f.e1))),
            np.max(np.abs(np.cross(a, f.e3) - ((a @ f.e2) * f.e1 - (a @ f.e1) * f.e2))),
            np.max(np.abs(np.cross(a, f.e1) - ((a @ f.e3) * f.e2 - (a @ f.e2) * f.e3))),
        )
        res["frame"] = float(frame_res)
    out = {k: float(v) / scale for k, v in res.items()}
    out["max"] = max(out.values())
    return out
