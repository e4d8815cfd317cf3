"""Simulation driver: sample f0, push, collide, record, fit decay exponents."""

import logging
import math
import time
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from src.collision.kernel import KernelSpec
from src.errors import ConfigError, FitError
from src.fields.cone import ConeGrid
from src.runtime_policy import RunBudget
from src.simulator.decay import DecayFit, GrowthFit, log_growth_fit, measure_decay
from src.simulator.dsmc import CollisionStats, collision_step
from src.simulator.ensemble import ParticleEnsemble, init_from_distribution, make_density
from src.simulator.fields import FieldModel, SelfConsistentField, make_prescribed
from src.simulator.moments import kde_bandwidth, population_temperatures, probe_lattice, sup_density, weighted_sup
from src.simulator.push import FIELD_MODES, step

log = logging.getLogger(__name__)

TIMESERIES_COLUMNS = [
    "t", "mass", "momentum_x", "momentum_y", "momentum_z", "energy",
    "sup_density", "weighted_sup", "E_probe", "B_probe",
]


@dataclass
class SimulationConfig:
    n_particles: int = 100_000
    dt: float = 0.1
    t_end: float = 100.0
    c: float = 1.0
    seed: int = 0
    initial: Dict[str, Any] = field(default_factory=lambda: {"kind": "gaussian", "v_width": 0.3})
    # fields
    field_mode: str = "none"
    prescribed: Dict[str, Any] = field(default_factory=lambda: {"kind": "decaying", "eps": 0.1})
    force_sign: float = 1.0
    lattice_points: int = 5
    lattice_margin: float = 1.0
    history: int = 512
    max_field_particles: int = 2000
    softening: float = 0.1
    field_refresh: int = 1
    # collisions
    collisions: bool = False
    gamma: float = 0.0
    sigma0: str = "constant"
    cell_size: float = 1.0
    auto_reduce: bool = True
    max_subcycles: int = 64
    # diagnostics
    probe_half_width: float = 1.0
    probe_points: int = 9
    bandwidth_base: float = 0.1
    n_records: int = 24
    record_start: float = 1.0
    decay_window: Tuple[float, float] = (10.0, 100.0)
    decay_offset: float = 1.0
    threads: int = 1

    def __post_init__(self):
        if self.n_particles < 0:
            raise ConfigError(f"n_particles must be >= 0, got {self.n_particles}")
        if self.dt <= 0.0 or self.t_end <= 0.0:
            raise ConfigError(f"dt and t_end must be > 0, got dt={self.dt}, t_end={self.t_end}")
        if self.c < 1.0:
            raise ConfigError(f"c must be >= 1, got {self.c}")
        if self.field_mode not in FIELD_MODES:
            raise ConfigError(f"Unknown field mode '{self.field_mode}'. Available: {list(FIELD_MODES)}")
        if self.force_sign not in (1.0, -1.0):
            raise ConfigError(f"force_sign must be +1 or -1, got {self.force_sign}")
        if not 0.0 < self.record_start < self.t_end:
            raise ConfigError(f"record_start must lie in (0, t_end), got {self.record_start}")
        self.decay_window = tuple(float(w) for w in self.decay_window)

    @property
    def kernel(self) -> KernelSpec:
        return KernelSpec(self.gamma, self.sigma0, self.c)

    def record_times(self) -> np.ndarray:
        """0 followed by ``n_records`` log-spaced times from ``record_start`` to ``t_end``."""
        later = np.geomspace(self.record_start, self.t_end, self.n_records)
        return np.concatenate([[0.0], later])

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d["decay_window"] = list(self.decay_window)
        return d

    @classmethod
    def from_dict(cls, d: Dict[str, Any]) -> "SimulationConfig":
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(d) - known)
        if unknown:
            raise ConfigError(f"Unknown simulation keys {unknown}. Available: {sorted(known)}")
        return cls(**d)


@dataclass
class SimulationResult:
    config: SimulationConfig
    rows: List[Dict[str, float]]
    fit: Optional[DecayFit] = None
    fit_error: Optional[str] = None
    growth: Optional[GrowthFit] = None
    collisions: CollisionStats = field(default_factory=CollisionStats)
    steps: int = 0
    skipped_retarded: int = 0
    wall_time: float = 0.0

    def series(self, column: str) -> List[Tuple[float, float]]:
        return [(row["t"], row[column]) for row in self.rows]

    @property
    def columns(self) -> List[str]:
        return list(self.rows[0]) if self.rows else list(TIMESERIES_COLUMNS)

    def drift(self, column: str) -> float:
        """Largest relative change of a conserved column against its t = 0 value."""
        ref = self.rows[0][column]
        scale = abs(ref) if ref != 0.0 else 1.0
        return max(abs(row[column] - ref) for row in self.rows) / scale

    def to_dict(self) -> Dict[str, Any]:
        return {
            "config": self.config.to_dict(),
            "fit": self.fit.to_dict() if self.fit else None,
            "fit_error": self.fit_error,
            "growth": self.growth.to_dict() if self.growth else None,
            "collisions": self.collisions.to_dict(),
            "steps": self.steps,
            "skipped_retarded": self.skipped_retarded,
            "records": len(self.rows),
            "mass_drift": self.drift("mass") if self.rows else 0.0,
            "energy_drift": self.drift("energy") if self.rows else 0.0,
            "wall_time": self.wall_time,
        }


# ------------------------------------------------------------------
# Driver
# ------------------------------------------------------------------

def _field_model(config: SimulationConfig, f0) -> Optional[FieldModel]:
    if config.field_mode == "none":
        return None
    if config.field_mode == "prescribed":
        params = dict(config.prescribed)
        kind = params.pop("kind", "decaying")
        if kind == "decaying":
            params.setdefault("c", config.c)
        return make_prescribed(kind, **params)
    return SelfConsistentField(
        f0, config.c,
        n_lattice=config.lattice_points,
        margin=config.lattice_margin,
        history=config.history,
        max_particles=config.max_field_particles,
        softening=config.softening,
        data_grid=ConeGrid(n_shells=1, n_theta=16, n_phi=32, n_velocity=4),
        seed=config.seed,
    )


def _record(state: ParticleEnsemble, config: SimulationConfig, model: Optional[FieldModel]) -> Dict[str, float]:
    t = state.time
    moments = state.moments()
    row = {
        "t": t,
        "mass": moments["mass"],
        "momentum_x": moments["momentum"][0],
        "momentum_y": moments["momentum"][1],
        "momentum_z": moments["momentum"][2],
        "energy": moments["energy"],
    }
    if len(state):
        center = state.weights @ state.positions / max(state.total_weight, 1e-300)
        # probes sit at fixed vhat/c once ct > 1, where the free density is t^-3 p(x/t)
        probes = probe_lattice(config.probe_half_width * max(config.c * t, 1.0), config.probe_points, center)
        row["sup_density"] = sup_density(state, probes, kde_bandwidth(t, config.bandwidth_base))[0]
        row["weighted_sup"] = weighted_sup(state) if state.f0_values is not None else 0.0
    else:
        row["sup_density"] = 0.0
        row["weighted_sup"] = 0.0
    if model is not None:
        E, B = model(t, np.zeros((1, 3)))
        row["E_probe"] = float(np.linalg.norm(E[0]))
        row["B_probe"] = float(np.linalg.norm(B[0]))
    else:
        row["E_probe"] = 0.0
        row["B_probe"] = 0.0
    if state.labels is not None:
        for label, temp in sorted(population_temperatures(state).items()):
            row[f"temperature_{label}"] = temp
    return row


def run_simulation(config: SimulationConfig, budget: Optional[RunBudget] = None) -> SimulationResult:
    """Run one ensemble from t = 0 to ``t_end`` and fit the decay of sup density.

    Field-free runs without collisions advance straight from one record time
    to the next; transport is exact so the step size does not matter there.
    """
    budget = budget or RunBudget(threads=config.threads)
    budget.restart()
    wall = time.time()
    f0 = make_density(config.initial)
    state = init_from_distribution(f0, config.n_particles, seed=config.seed, c=config.c)
    kernel = config.kernel if config.collisions else None
    if kernel is not None and not state.equal_weights:
        state = state.resampled(len(state), np.random.default_rng(config.seed))
        log.info("[simulator] resampled %d particles to equal weights for collisions", len(state))
    model = _field_model(config, f0)
    if isinstance(model, SelfConsistentField):
        model.solve(state)

    n_steps = int(math.ceil(config.t_end / config.dt - 1e-9))
    dt = config.t_end / n_steps
    targets = config.record_times()
    stats = CollisionStats()
    rows = [_record(state, config, model)]
    log.info("[simulator] start n=%d mode=%s collisions=%s steps=%d", len(state), config.field_mode,
             config.collisions, n_steps)

    exact = config.field_mode == "none" and kernel is None
    if exact:
        for target in targets[1:]:
            state = step(state, target - state.time)
            state.time = float(target)
            rows.append(_record(state, config, model))
            budget.check()
        steps = len(targets) - 1
    else:
        record_steps = set(int(round(t / dt)) for t in targets[1:])
        for k in range(1, n_steps + 1):
            state = step(state, dt, config.field_mode, model, config.force_sign)
            if kernel is not None:
                state, cell_stats = collision_step(
                    state, kernel, dt, config.seed, step=k, cell_size=config.cell_size,
                    auto_reduce=config.auto_reduce, max_subcycles=config.max_subcycles,
                    threads=budget.threads,
                )
                stats.merge(cell_stats)
            if isinstance(model, SelfConsistentField):
                if k % config.field_refresh == 0:
                    model.solve(state)
                else:
                    model.record(state)
            if k in record_steps:
                rows.append(_record(state, config, model))
            budget.check(k)
        steps = n_steps

    result = SimulationResult(config, rows, collisions=stats, steps=steps)
    if isinstance(model, SelfConsistentField):
        result.skipped_retarded = model.skipped
    try:
        lo = max(config.decay_window[0], 0.0)
        hi = min(config.decay_window[1], rows[-1]["t"])
        result.fit = measure_decay(result.series("sup_density"), (lo, hi), quantity="sup_density",
                                   offset=config.decay_offset)
    except FitError as exc:
        result.fit_error = str(exc)
        log.warning("[simulator] decay fit skipped: %s", exc)
    if config.field_mode == "prescribed" and len(state):
        later = [row for row in rows if row["t"] >= 1.0]
        try:
            result.growth = log_growth_fit([row["t"] for row in later], [row["weighted_sup"] for row in later])
        except FitError as exc:
            log.warning("[simulator] growth fit skipped: %s", exc)
    result.wall_time = time.time() - wall
    log.info("[simulator] done t=%g steps=%d wall=%.1fs", state.time, steps, result.wall_time)
    return result


def simulate(config: Dict[str, Any], budget: Optional[RunBudget] = None) -> SimulationResult:
    """``run_simulation`` from a plain mapping (the ``simulate`` config section)."""
    return run_simulation(SimulationConfig.from_dict(config), budget)
