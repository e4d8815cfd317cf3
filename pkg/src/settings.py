"""Run configuration: YAML sections, profile layering and ``--set`` overrides.

Resolution order (later wins):

    DEFAULTS -> config/config.yaml (or --config PATH) -> profiles/<name>.yaml -> --set section.key=value

Every key is checked against the type of its default; unknown sections or
keys and wrong types raise ``ConfigError`` before anything is written.
"""

import copy
import logging
import os
from typing import Any, Dict, Iterable, Optional, Tuple

import yaml

from src import data_paths
from src.collision.carleman import BETA_MIN, K_MIN
from src.collision.kernel import KernelSpec
from src.errors import ConfigError, ParameterError
from src.simulator.run import SimulationConfig

log = logging.getLogger(__name__)

# Sections owned by the run, not by the simulator dataclass.
_RUN_OWNED = ("seed", "threads")


def _simulate_defaults() -> Dict[str, Any]:
    d = SimulationConfig().to_dict()
    for key in _RUN_OWNED:
        d.pop(key)
    return d


DEFAULTS: Dict[str, Dict[str, Any]] = {
    "run": {
        "seed": 0,
        "threads": 1,
        "output_dir": None,
        "log_level": "INFO",
    },
    "kinematics": {
        "draws": 100_000,
        "half_angle_draws": 10_000,
        "jacobian_samples": 1000,
        "c_values": [1.0, 2.0, 10.0],
        "newtonian_c": 1e6,
    },
    "collision": {
        "gammas": [0.0, -0.5, -1.0, -1.9],
        "c_values": [1.0, 2.0, 10.0],
        "sigma0": "constant",
        "v_radius": 11.0,
        "n_v": 28,
        "n_radial": 48,
        "n_theta": 48,
        "n_theta_omega": 16,
        "n_phi_omega": 32,
        "tails": 7.0,
        "refinement_levels": 2,
        "temperature": 1.0,
        "equilibrium_probes": 50,
        "probe_radius": 3.0,
        "eq_n_radial": 8,
        "eq_n_theta": 4,
        "eq_n_phi": 8,
    },
    "chain_rule": {
        "gammas": [0.0],
        "c_values": [1.0],
        "v": [0.7, -0.3, 0.2],
        "axis": 0,
        "rotation_axes": [0, 1],
        "first_step": 0.08,
        "halvings": 4,
        "stencil": "central3",
        "n_radial": 16,
        "n_theta": 8,
        "n_phi": 16,
    },
    "carleman": {
        "samples": 1000,
        "beta_range": [-1.0, 3.0],
        "k_range": [9.0, 20.0],
        "c_range": [1.0, 100.0],
        "regime": None,
    },
    "fields": {
        "kernel_means_samples": 100,
        "kernel_c_range": [1.0, 100.0],
        "kernel_n_theta": 64,
        "kernel_n_phi": 16,
        "kirchhoff_cases": [[1.0, 1.5], [2.0, 0.9]],
        "kirchhoff_probes": 20,
        "kirchhoff_dr": 5e-4,
        "kirchhoff_n_theta": 256,
        "kirchhoff_n_phi": 4,
        "residual_t": 1.0,
        "residual_x": [0.4, 0.2, -0.1],
        "residual_c": 1.0,
        "residual_n_shells": 24,
        "residual_n_theta": 6,
        "residual_n_phi": 12,
        "residual_n_velocity": 5,
        "lorentz_samples": 2000,
        "decay_times": [0.5, 2.0, 6.0, 12.0],
        "decay_radii": [1.0, 3.0],
        "decay_n_shells": 32,
        "decay_n_theta": 6,
        "decay_n_phi": 12,
        "decay_n_velocity": 4,
    },
    "vectorfields": {
        "c_values": [1.0, 2.0, 10.0, 1000.0],
        "jet_seeds": 3,
        "t": 0.7,
        "x": [0.4, -0.3, 0.9],
        "v": [0.5, 1.2, -0.8],
    },
    "analysis": {
        "cases": "all",
        "n_samples": None,
        "polish": True,
    },
    "simulate": _simulate_defaults(),
    "decay_fit": {
        "input": None,
        "column": "sup_density",
        "window": [10.0, 100.0],
        "offset": 1.0,
        "min_points": 8,
    },
    "report": {
        "subcommands": [
            "kinematics-check", "collision-verify", "chain-rule", "carleman-scan",
            "fields-solve", "kernel-means", "vectorfield-table", "inequality-scan",
            "simulate", "decay-fit",
        ],
    },
    "tolerances": {
        "kinematics": 1e-10,
        "newtonian": 1e-4,
        "jacobian": 1e-6,
        "conservation": 1e-7,
        "equilibrium": 1e-6,
        "order_low": 1.8,
        "order_high": 2.2,
        "terminal": 1e-5,
        "kernel_means": 1e-8,
        "kirchhoff": 1e-3,
        "commutator": 1e-10,
        "stability": 0.05,
        "decay_low": -3.2,
        "decay_high": -2.8,
        "mass_drift": 1e-10,
    },
    "budget": {
        "max_wall_time_seconds": None,
        "max_nodes": 50_000_000,
        "max_steps": 100_000,
    },
}

# Types for keys whose default is None.
_NULLABLE = {
    ("run", "output_dir"): (str,),
    ("carleman", "regime"): (str,),
    ("analysis", "n_samples"): (int,),
    ("decay_fit", "input"): (str,),
    ("budget", "max_wall_time_seconds"): (int, float),
}

# Keys accepting either of two shapes.
_UNION = {
    ("analysis", "cases"): (str, list),
}


# ------------------------------------------------------------------
# Type checking
# ------------------------------------------------------------------

def _type_name(value: Any) -> str:
    return type(value).__name__


def _coerce(section: str, key: str, value: Any, default: Any) -> Any:
    """Return *value* checked (and widened int -> float) against *default*'s type."""
    where = f"{section}.{key}"
    if (section, key) in _UNION:
        allowed = _UNION[(section, key)]
        if not isinstance(value, allowed):
            raise ConfigError(f"{where} must be one of {[t.__name__ for t in allowed]}, got {_type_name(value)}")
        return value
    if default is None:
        if value is None:
            return None
        allowed = _NULLABLE.get((section, key), (str, int, float))
        if isinstance(value, bool) or not isinstance(value, allowed):
            raise ConfigError(f"{where} must be null or {[t.__name__ for t in allowed]}, got {_type_name(value)}")
        return float(value) if float in allowed and isinstance(value, int) else value
    if isinstance(default, bool):
        if not isinstance(value, bool):
            raise ConfigError(f"{where} must be a bool, got {_type_name(value)}")
        return value
    if isinstance(default, int):
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"{where} must be an int, got {_type_name(value)}")
        return value
    if isinstance(default, float):
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"{where} must be a number, got {_type_name(value)}")
        return float(value)
    if isinstance(default, str):
        if not isinstance(value, str):
            raise ConfigError(f"{where} must be a string, got {_type_name(value)}")
        return value
    if isinstance(default, (list, tuple)):
        if not isinstance(value, (list, tuple)):
            raise ConfigError(f"{where} must be a list, got {_type_name(value)}")
        if default:
            sample = default[0]
            return [_coerce(section, f"{key}[{i}]", item, sample) for i, item in enumerate(value)]
        return list(value)
    if isinstance(default, dict):
        if not isinstance(value, dict):
            raise ConfigError(f"{where} must be a mapping, got {_type_name(value)}")
        return dict(value)
    return value


def validate(config: Dict[str, Any]) -> Dict[str, Any]:
    """Check every section and key of *config* against ``DEFAULTS``."""
    out: Dict[str, Any] = {}
    for section, values in config.items():
        if section not in DEFAULTS:
            raise ConfigError(f"Unknown config section '{section}'. Available: {sorted(DEFAULTS)}")
        if not isinstance(values, dict):
            raise ConfigError(f"Section '{section}' must be a mapping, got {_type_name(values)}")
        schema = DEFAULTS[section]
        checked = {}
        for key, value in values.items():
            if key not in schema:
                raise ConfigError(f"Unknown key '{section}.{key}'. Available: {sorted(schema)}")
            checked[key] = _coerce(section, key, value, schema[key])
        out[section] = checked
    return out


# ------------------------------------------------------------------
# Layering
# ------------------------------------------------------------------

def load_yaml(path: str) -> Dict[str, Any]:
    """Parse a YAML mapping; an empty file is an empty mapping."""
    try:
        with open(path, "r", encoding="utf-8") as f:
            data = yaml.safe_load(f) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"Malformed YAML in {path}: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level, got {_type_name(data)}")
    return data


def merge(base: Dict[str, Any], overlay: Dict[str, Any]) -> Dict[str, Any]:
    """Section-wise update; nested mappings (e.g. ``simulate.initial``) are replaced whole."""
    out = copy.deepcopy(base)
    for section, values in overlay.items():
        out.setdefault(section, {}).update(copy.deepcopy(values))
    return out


def parse_override(text: str) -> Tuple[Tuple[str, ...], Any]:
    """``section.key[.sub]=value`` -> (path, value); the value follows YAML scalar rules."""
    if "=" not in text:
        raise ConfigError(f"Override '{text}' must look like section.key=value")
    lhs, raw = text.split("=", 1)
    path = tuple(part for part in lhs.strip().split(".") if part)
    if len(path) < 2:
        raise ConfigError(f"Override '{text}' needs a section and a key")
    try:
        value = yaml.safe_load(raw) if raw.strip() else None
    except yaml.YAMLError as exc:
        raise ConfigError(f"Override '{text}' has an unparsable value: {exc}") from exc
    return path, value


def apply_override(config: Dict[str, Any], path: Tuple[str, ...], value: Any) -> Dict[str, Any]:
    out = copy.deepcopy(config)
    node = out.setdefault(path[0], {})
    for part in path[1:-1]:
        child = node.get(part)
        if not isinstance(child, dict):
            raise ConfigError(f"Cannot descend into '{'.'.join(path)}': '{part}' is not a mapping")
        node = child
    node[path[-1]] = value
    return out


def resolve(
    config_path: Optional[str] = None,
    profile: Optional[str] = None,
    overrides: Iterable[str] = (),
) -> Dict[str, Any]:
    """Fully layered and validated configuration."""
    config = copy.deepcopy(DEFAULTS)

    if config_path is not None:
        if not os.path.isfile(config_path):
            raise ConfigError(f"Config file not found: {config_path}")
        config = merge(config, validate(load_yaml(config_path)))
        log.info("[settings] loaded %s", config_path)
    elif os.path.isfile(data_paths.default_config_path()):
        config = merge(config, validate(load_yaml(data_paths.default_config_path())))
        log.info("[settings] loaded %s", data_paths.default_config_path())

    if profile:
        path = data_paths.profile_path(profile)
        if not os.path.isfile(path):
            available = sorted(
                os.path.splitext(name)[0] for name in os.listdir(data_paths.PROFILES_DIR) if name.endswith(".yaml")
            ) if os.path.isdir(data_paths.PROFILES_DIR) else []
            raise ConfigError(f"Unknown profile '{profile}'. Available: {available}")
        config = merge(config, validate(load_yaml(path)))
        log.info("[settings] profile %s", profile)

    for text in overrides:
        path, value = parse_override(text)
        config = apply_override(config, path, value)
        log.debug("[settings] override %s=%r", ".".join(path), value)

    config = validate(config)
    _check_ranges(config)
    return config


def _check_ranges(config: Dict[str, Any]) -> None:
    tol = config["tolerances"]
    if tol["order_low"] > tol["order_high"]:
        raise ConfigError(f"tolerances.order_low > order_high ({tol['order_low']} > {tol['order_high']})")
    if tol["decay_low"] > tol["decay_high"]:
        raise ConfigError(f"tolerances.decay_low > decay_high ({tol['decay_low']} > {tol['decay_high']})")
    if config["run"]["seed"] < 0:
        raise ConfigError(f"run.seed must be >= 0, got {config['run']['seed']}")
    if config["run"]["threads"] < 1:
        raise ConfigError(f"run.threads must be >= 1, got {config['run']['threads']}")
    window = config["decay_fit"]["window"]
    if len(window) != 2:
        raise ConfigError(f"decay_fit.window needs two entries, got {window}")
    _check_domains(config)
    # dataclass validation of the simulator section, with the run-owned keys filled in
    simulation_config(config)


# (section, key) holding speeds of light, single values or lists.
_SPEEDS = (
    ("kinematics", "c_values"), ("kinematics", "newtonian_c"), ("collision", "c_values"),
    ("chain_rule", "c_values"), ("vectorfields", "c_values"), ("fields", "residual_c"),
)
_SPEED_RANGES = (("carleman", "c_range"), ("fields", "kernel_c_range"))
_CARLEMAN_REGIMES = (None, "v_geq_vp", "v_le_2vp")


def _check_domains(config: Dict[str, Any]) -> None:
    """Parameter domains of the numerical sections, so a bad value fails before any output."""
    for section, key in _SPEEDS:
        value = config[section][key]
        for c in value if isinstance(value, list) else [value]:
            if c < 1.0:
                raise ConfigError(f"{section}.{key}: speed of light must satisfy c >= 1, got {c}")
    for section, key in _SPEED_RANGES:
        low, high = _pair(config, section, key)
        if low < 1.0 or low > high:
            raise ConfigError(f"{section}.{key} must satisfy 1 <= low <= high, got {[low, high]}")

    coll = config["collision"]
    try:
        for c in coll["c_values"]:
            for gamma in coll["gammas"]:
                KernelSpec(gamma=gamma, sigma0=coll["sigma0"], c=c)
        for gamma in config["chain_rule"]["gammas"]:
            KernelSpec(gamma=gamma)
    except ParameterError as exc:
        raise ConfigError(f"collision kernel: {exc}") from exc
    for key in ("n_v", "n_radial", "n_theta", "n_theta_omega", "n_phi_omega", "refinement_levels"):
        if coll[key] < 1:
            raise ConfigError(f"collision.{key} must be >= 1, got {coll[key]}")
    if coll["v_radius"] <= 0.0 or coll["tails"] <= 0.0:
        raise ConfigError("collision.v_radius and collision.tails must be positive")

    carl = config["carleman"]
    beta_low, _ = _pair(config, "carleman", "beta_range")
    k_low, _ = _pair(config, "carleman", "k_range")
    if beta_low < BETA_MIN or k_low < K_MIN:
        raise ConfigError(f"carleman ranges need beta >= {BETA_MIN} and k >= {K_MIN}, "
                          f"got beta_range={carl['beta_range']} k_range={carl['k_range']}")
    if carl["regime"] not in _CARLEMAN_REGIMES:
        raise ConfigError(f"Unknown carleman regime '{carl['regime']}'. Available: {list(_CARLEMAN_REGIMES)}")


def _pair(config: Dict[str, Any], section: str, key: str) -> Tuple[float, float]:
    value = config[section][key]
    if len(value) != 2:
        raise ConfigError(f"{section}.{key} needs two entries, got {value}")
    return float(value[0]), float(value[1])


def simulation_config(config: Dict[str, Any]) -> SimulationConfig:
    d = dict(config["simulate"])
    d["seed"] = config["run"]["seed"]
    d["threads"] = config["run"]["threads"]
    return SimulationConfig.from_dict(d)
