"""Particle simulator near vacuum: transport, field push, stochastic collisions, decay fits."""

from src.simulator.decay import DecayFit, GrowthFit, log_growth_fit, measure_decay
from src.simulator.dsmc import CollisionStats, cell_ids, collide, collision_step, force_collision
from src.simulator.ensemble import (
    DENSITY_KINDS,
    GaussianMixture,
    ParticleEnsemble,
    PhaseSpaceDensity,
    PhaseSpaceGaussian,
    ProductDensity,
    importance_sample,
    init_from_distribution,
    make_density,
)
from src.simulator.fields import (
    DecayingField,
    DensitySource,
    FieldModel,
    SelfConsistentField,
    UniformField,
    make_prescribed,
    retarded_points,
)
from src.simulator.moments import (
    density_moment,
    kde_bandwidth,
    population_temperatures,
    probe_lattice,
    sup_density,
    weighted_sup,
)
from src.simulator.push import FIELD_MODES, drift, lorentz_kick, rotate, step
from src.simulator.run import SimulationConfig, SimulationResult, run_simulation, simulate

__all__ = [
    "CollisionStats",
    "DENSITY_KINDS",
    "DecayFit",
    "DecayingField",
    "DensitySource",
    "FIELD_MODES",
    "FieldModel",
    "GaussianMixture",
    "GrowthFit",
    "ParticleEnsemble",
    "PhaseSpaceDensity",
    "PhaseSpaceGaussian",
    "ProductDensity",
    "SelfConsistentField",
    "SimulationConfig",
    "SimulationResult",
    "UniformField",
    "cell_ids",
    "collide",
    "collision_step",
    "density_moment",
    "drift",
    "force_collision",
    "importance_sample",
    "init_from_distribution",
    "kde_bandwidth",
    "log_growth_fit",
    "lorentz_kick",
    "make_density",
    "make_prescribed",
    "measure_decay",
    "population_temperatures",
    "probe_lattice",
    "retarded_points",
    "rotate",
    "run_simulation",
    "simulate",
    "step",
    "sup_density",
    "weighted_sup",
]
