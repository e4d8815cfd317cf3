"""Weighted particle ensembles sampled from phase-space densities f0(x, v).

Densities with a direct sampler (Gaussians and their mixtures) give equal
weights mass / n.  Anything else is importance sampled from a product of
multivariate t proposals centred on the density's hints; weights are
f0 / (n q) and the sample is rejected when the estimate is not usable.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import stats

from src.collision.distributions import AnalyticDistribution, Juttner
from src.errors import ParameterError, SamplerError
from src.kinematics import energy, rel_velocity

log = logging.getLogger(__name__)

PROPOSAL_DF = 5.0
MIN_EFFECTIVE_FRACTION = 1e-3


# ------------------------------------------------------------------
# Initial densities
# ------------------------------------------------------------------

def _gauss3(d, width: float) -> np.ndarray:
    return np.exp(-0.5 * np.sum(d * d, axis=-1) / width ** 2) / (2.0 * np.pi * width ** 2) ** 1.5


class PhaseSpaceDensity:
    """f0(x, v) >= 0.  The centre/width hints place quadrature and proposals."""

    x_center = np.zeros(3)
    x_width = 1.0
    v_center = np.zeros(3)
    v_width = 1.0

    def evaluate(self, x, v) -> np.ndarray:
        raise NotImplementedError

    def spatial_density(self, x) -> np.ndarray:
        """integral f0(x, v) dv, when known in closed form."""
        raise NotImplementedError(f"{type(self).__name__} has no closed-form spatial density")

    def __call__(self, x, v):
        return self.evaluate(x, v)

    def to_dict(self) -> Dict[str, Any]:
        return {"kind": type(self).__name__}


class PhaseSpaceGaussian(PhaseSpaceDensity):
    """mass * N(x; x_c, sx^2 I) * N(v; v_c, sv^2 I)."""

    def __init__(self, mass: float = 1.0, x_center=(0.0, 0.0, 0.0), x_width: float = 1.0,
                 v_center=(0.0, 0.0, 0.0), v_width: float = 1.0):
        if mass < 0.0 or x_width <= 0.0 or v_width <= 0.0:
            raise ParameterError(
                f"Gaussian density needs mass >= 0 and positive widths, got {mass}, {x_width}, {v_width}"
            )
        self.mass = float(mass)
        self.x_center = np.asarray(x_center, dtype=float)
        self.x_width = float(x_width)
        self.v_center = np.asarray(v_center, dtype=float)
        self.v_width = float(v_width)

    def evaluate(self, x, v):
        dx = np.asarray(x, dtype=float) - self.x_center
        dv = np.asarray(v, dtype=float) - self.v_center
        return self.mass * _gauss3(dx, self.x_width) * _gauss3(dv, self.v_width)

    def spatial_density(self, x):
        return self.mass * _gauss3(np.asarray(x, dtype=float) - self.x_center, self.x_width)

    def sample(self, n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        x = self.x_center + self.x_width * rng.standard_normal((n, 3))
        v = self.v_center + self.v_width * rng.standard_normal((n, 3))
        return x, v

    def to_dict(self):
        return {
            "kind": "gaussian",
            "mass": self.mass,
            "x_center": self.x_center.tolist(),
            "x_width": self.x_width,
            "v_center": self.v_center.tolist(),
            "v_width": self.v_width,
        }


class GaussianMixture(PhaseSpaceDensity):
    """Sum of phase-space Gaussians; sampled particles carry their component as a label."""

    def __init__(self, components: Sequence[PhaseSpaceGaussian]):
        if not components:
            raise ParameterError("a mixture needs at least one component")
        self.components = list(components)
        self.mass = float(sum(comp.mass for comp in self.components))
        first = self.components[0]
        self.x_center = first.x_center
        self.x_width = max(comp.x_width for comp in self.components)
        self.v_center = first.v_center
        self.v_width = max(comp.v_width for comp in self.components)

    def evaluate(self, x, v):
        return sum(comp.evaluate(x, v) for comp in self.components)

    def spatial_density(self, x):
        return sum(comp.spatial_density(x) for comp in self.components)

    def sample_labelled(self, n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        if self.mass <= 0.0:
            raise SamplerError("mixture has zero mass")
        probs = np.array([comp.mass for comp in self.components]) / self.mass
        labels = np.sort(rng.choice(len(self.components), size=n, p=probs))
        x = np.empty((n, 3))
        v = np.empty((n, 3))
        for k, comp in enumerate(self.components):
            rows = np.flatnonzero(labels == k)
            x[rows], v[rows] = comp.sample(len(rows), rng)
        return x, v, labels

    def sample(self, n: int, rng: np.random.Generator) -> Tuple[np.ndarray, np.ndarray]:
        x, v, _ = self.sample_labelled(n, rng)
        return x, v

    def to_dict(self):
        return {"kind": "mixture", "components": [comp.to_dict() for comp in self.components]}


class ProductDensity(PhaseSpaceDensity):
    """mass * N(x; x_c, sx^2 I) * dist(v) for any momentum-space distribution."""

    def __init__(self, dist: AnalyticDistribution, mass: float = 1.0, x_center=(0.0, 0.0, 0.0),
                 x_width: float = 1.0, v_width: Optional[float] = None):
        self.dist = dist
        self.mass = float(mass)
        self.x_center = np.asarray(x_center, dtype=float)
        self.x_width = float(x_width)
        self.v_center = np.asarray(dist.center, dtype=float)
        self.v_width = float(v_width) if v_width is not None else 0.5 * float(dist.spread)

    def evaluate(self, x, v):
        dx = np.asarray(x, dtype=float) - self.x_center
        return self.mass * _gauss3(dx, self.x_width) * self.dist.evaluate(v)

    def to_dict(self):
        return {"kind": "product", "momentum": repr(self.dist), "mass": self.mass,
                "x_center": self.x_center.tolist(), "x_width": self.x_width, "v_width": self.v_width}


# ------------------------------------------------------------------
# Ensemble
# ------------------------------------------------------------------

@dataclass
class ParticleEnsemble:
    """Particles (x, v, w) at ``time``.

    ``f0_values`` holds f0 at each particle's initial phase point, which free
    transport and Vlasov forces carry unchanged along the characteristic.
    ``labels`` tag the population a particle was sampled from.
    """

    positions: np.ndarray
    momenta: np.ndarray
    weights: np.ndarray
    c: float = 1.0
    time: float = 0.0
    f0_values: Optional[np.ndarray] = None
    labels: Optional[np.ndarray] = None
    meta: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=float).reshape(-1, 3)
        self.momenta = np.asarray(self.momenta, dtype=float).reshape(-1, 3)
        self.weights = np.asarray(self.weights, dtype=float).reshape(-1)
        n = len(self.weights)
        if len(self.positions) != n or len(self.momenta) != n:
            raise ParameterError(
                f"ensemble arrays disagree: {len(self.positions)} positions, "
                f"{len(self.momenta)} momenta, {n} weights"
            )
        if np.any(self.weights < 0.0):
            raise ParameterError("particle weights must be >= 0")
        if self.c < 1.0:
            raise ParameterError(f"c must be >= 1, got {self.c}")

    @classmethod
    def empty(cls, c: float = 1.0) -> "ParticleEnsemble":
        return cls(np.zeros((0, 3)), np.zeros((0, 3)), np.zeros(0), c)

    def __len__(self) -> int:
        return len(self.weights)

    def copy(self) -> "ParticleEnsemble":
        return replace(
            self,
            positions=self.positions.copy(),
            momenta=self.momenta.copy(),
            weights=self.weights.copy(),
            f0_values=None if self.f0_values is None else self.f0_values.copy(),
            labels=None if self.labels is None else self.labels.copy(),
            meta=dict(self.meta),
        )

    def subset(self, rows) -> "ParticleEnsemble":
        rows = np.asarray(rows)
        return replace(
            self,
            positions=self.positions[rows],
            momenta=self.momenta[rows],
            weights=self.weights[rows],
            f0_values=None if self.f0_values is None else self.f0_values[rows],
            labels=None if self.labels is None else self.labels[rows],
            meta=dict(self.meta),
        )

    # -- observables --
    def velocities(self) -> np.ndarray:
        return rel_velocity(self.momenta, self.c)

    def energies(self) -> np.ndarray:
        return energy(self.momenta, self.c)

    @property
    def total_weight(self) -> float:
        return float(np.sum(self.weights))

    @property
    def total_momentum(self) -> np.ndarray:
        return self.weights @ self.momenta if len(self) else np.zeros(3)

    @property
    def total_energy(self) -> float:
        return float(self.weights @ self.energies()) if len(self) else 0.0

    @property
    def equal_weights(self) -> bool:
        return len(self) == 0 or bool(np.allclose(self.weights, self.weights[0], rtol=1e-12, atol=0.0))

    def moments(self) -> Dict[str, Any]:
        return {
            "t": self.time,
            "mass": self.total_weight,
            "momentum": self.total_momentum.tolist(),
            "energy": self.total_energy,
        }

    def resampled(self, n: int, rng: np.random.Generator) -> "ParticleEnsemble":
        """Systematic resampling to ``n`` equal-weight particles of the same total weight."""
        total = self.total_weight
        if n <= 0 or total <= 0.0:
            return ParticleEnsemble.empty(self.c)
        cdf = np.cumsum(self.weights) / total
        cdf[-1] = 1.0
        points = (rng.random() + np.arange(n)) / n
        rows = np.searchsorted(cdf, points, side="right")
        out = self.subset(rows)
        out.weights = np.full(n, total / n)
        return out

    def to_dict(self) -> Dict[str, Any]:
        d = self.moments()
        d.update(n=len(self), c=self.c, equal_weights=self.equal_weights)
        return d


# ------------------------------------------------------------------
# Sampling
# ------------------------------------------------------------------

def _proposal(center, scale: float) -> Any:
    return stats.multivariate_t(loc=np.asarray(center, dtype=float), shape=scale * scale * np.eye(3),
                                df=PROPOSAL_DF)


def importance_sample(f0: PhaseSpaceDensity, n: int, rng: np.random.Generator,
                      proposal_scale: float = 1.0) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(x, v, w) with w = f0 / (n q) for a product-t proposal q."""
    qx = _proposal(f0.x_center, proposal_scale * f0.x_width)
    qv = _proposal(f0.v_center, proposal_scale * f0.v_width)
    x = np.atleast_2d(qx.rvs(size=n, random_state=rng))
    v = np.atleast_2d(qv.rvs(size=n, random_state=rng))
    values = np.asarray(f0.evaluate(x, v), dtype=float)
    if np.any(~np.isfinite(values)) or np.any(values < 0.0):
        raise SamplerError(f"{type(f0).__name__} returned negative or non-finite values")
    log_q = qx.logpdf(x) + qv.logpdf(v)
    w = values * np.exp(-log_q) / n
    total = float(np.sum(w))
    if not np.isfinite(total) or total <= 0.0:
        raise SamplerError(f"{type(f0).__name__} cannot be normalised on the proposal (mass estimate {total})")
    ess = total ** 2 / float(np.sum(w * w))
    if ess < MIN_EFFECTIVE_FRACTION * n:
        raise SamplerError(f"importance weights degenerate: effective sample size {ess:.1f} of {n}")
    log.debug("[simulator] importance sample n=%d ess=%.1f mass=%.6g", n, ess, total)
    return x, v, w


def init_from_distribution(f0: PhaseSpaceDensity, n_particles: int, seed: int = 0, c: float = 1.0,
                           proposal_scale: float = 1.0) -> ParticleEnsemble:
    """Ensemble at t = 0 whose weighted moments approximate those of f0."""
    if n_particles < 0:
        raise ParameterError(f"n_particles must be >= 0, got {n_particles}")
    if n_particles == 0:
        return ParticleEnsemble.empty(c)
    rng = np.random.default_rng(seed)
    labels = None
    if isinstance(f0, GaussianMixture):
        x, v, labels = f0.sample_labelled(n_particles, rng)
        w = np.full(n_particles, f0.mass / n_particles)
    elif hasattr(f0, "sample"):
        x, v = f0.sample(n_particles, rng)
        w = np.full(n_particles, f0.mass / n_particles)
    else:
        x, v, w = importance_sample(f0, n_particles, rng, proposal_scale)
    ens = ParticleEnsemble(x, v, w, c, 0.0, f0_values=np.asarray(f0.evaluate(x, v), dtype=float), labels=labels)
    log.info("[simulator] sampled %d particles, mass %.6g", n_particles, ens.total_weight)
    return ens


# ------------------------------------------------------------------
# Registry
# ------------------------------------------------------------------

def make_density(spec: Dict[str, Any]) -> PhaseSpaceDensity:
    """Build f0 from a config mapping, e.g. {"kind": "gaussian", "v_width": 0.5}."""
    params = dict(spec)
    kind = params.pop("kind", "gaussian")
    if kind == "gaussian":
        return PhaseSpaceGaussian(**params)
    if kind == "mixture":
        return GaussianMixture([PhaseSpaceGaussian(**comp) for comp in params.get("components", [])])
    if kind == "juttner":
        temperature = float(params.pop("temperature", 1.0))
        c = float(params.pop("c", 1.0))
        return ProductDensity(Juttner(temperature, c, amplitude=1.0), **params)
    raise ParameterError(f"Unknown initial density '{kind}'. Available: {DENSITY_KINDS}")


DENSITY_KINDS: List[str] = ["gaussian", "juttner", "mixture"]
