"""Command-line entry point.

    python -m src.cli <subcommand> [--config PATH] [--profile NAME] [--set section.key=value ...]
                                   [--seed N] [--threads N] [--output-dir DIR] [--log-level LEVEL]

Each subcommand writes its tables, ``summary.json``, ``events.jsonl`` and
``manifest.json`` under ``<output-dir>/<subcommand>/``.

Exit codes: 0 every check passed, 1 a check failed, 2 configuration error
(nothing written), 3 budget exceeded.
"""

import argparse
import logging
import os
import shutil
import sys
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from src import data_paths
from src.analysis import case_ids, get_case, verify_inequality
from src.collision import (
    Gaussian,
    Juttner,
    KernelSpec,
    QuadratureGrid,
    carleman_scan,
    chain_rule_study,
    eval_gain,
    eval_loss,
    isotropic_brackets,
    rotation_study,
    sphere_rule,
)
from src.collision.carleman import polished_sup, scan_summary
from src.errors import BudgetExceededError, ConfigError, KineticError, MajorantOverflowError, ParameterError
from src.fields import (
    ConeGrid,
    FreeTransportGaussian,
    ModulatedGaussian,
    RadialBump,
    field_decay_scan,
    gs_residual_study,
    homogeneous_wave,
    kernel_means_scan,
    lorentz_force_scan,
    radial_wave_fd,
)
from src.kinematics import (
    classical_post_collision,
    energy,
    half_angle_sine,
    post_collision,
    rel_velocity,
    relative_momentum,
    s_invariant,
    scattering_cosine,
    transport_jacobian,
)
from src.reporting import CheckLogger, build_manifest, read_table, save_manifest, write_json, write_table
from src.runtime_policy import RunBudget
from src.settings import resolve, simulation_config
from src.simulator import measure_decay, run_simulation
from src.vectorfields import all_fields, commutator_table, gaussian_test_jet, reconstruction_residual
from src.vectorfields import transport_commutation_residual

log = logging.getLogger(__name__)

LOG_FORMAT = "%(asctime)s %(levelname)s %(name)s: %(message)s"

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_BUDGET = 3


# ------------------------------------------------------------------
# Run context
# ------------------------------------------------------------------

@dataclass
class RunContext:
    """Everything a subcommand needs: resolved config, output dir, check log, budget."""

    subcommand: str
    config: Dict[str, Any]
    run_dir: str
    events: CheckLogger
    budget: RunBudget
    root: str
    case_id: Optional[str] = None
    artifacts: List[str] = field(default_factory=list)
    summary: Dict[str, Any] = field(default_factory=dict)

    @property
    def seed(self) -> int:
        return int(self.config["run"]["seed"])

    @property
    def tol(self) -> Dict[str, float]:
        return self.config["tolerances"]

    def section(self, name: str) -> Dict[str, Any]:
        return self.config[name]

    def table(self, name: str, rows: Sequence[Dict[str, Any]], columns: Optional[Sequence[str]] = None) -> str:
        path = write_table(data_paths.table_path(self.run_dir, name), rows, columns)
        self.artifacts.append(path)
        return path

    def json(self, path: str, payload: Dict[str, Any]) -> str:
        write_json(path, payload)
        self.artifacts.append(path)
        return path

    def check(self, name: str, passed: bool, value: Optional[float] = None,
              tolerance: Optional[float] = None, detail: str = "", **data: Any) -> bool:
        self.events.record(self.subcommand, name, bool(passed), value=value, tolerance=tolerance,
                           detail=detail, seed=self.seed, **data)
        log.log(logging.INFO if passed else logging.WARNING, "[cli] %s %s value=%s tol=%s",
                "PASS" if passed else "FAIL", name, value, tolerance)
        return bool(passed)


def _order_check(ctx: RunContext, name: str, study) -> None:
    low, high = ctx.tol["order_low"], ctx.tol["order_high"]
    ctx.check(f"{name} order", study.within(low, high), value=study.order,
              detail=f"expected in [{low}, {high}]")


# ------------------------------------------------------------------
# kinematics-check
# ------------------------------------------------------------------

def _random_pairs(rng: np.random.Generator, n: int, scale: float = 2.0):
    v = rng.normal(scale=scale, size=(n, 3))
    u = rng.normal(scale=scale, size=(n, 3))
    omega = rng.normal(size=(n, 3))
    omega /= np.linalg.norm(omega, axis=1)[:, None]
    return v, u, omega


def _fd_jacobian_det(v: np.ndarray, t: np.ndarray, c: float) -> np.ndarray:
    """|det d(-t vhat)/dv| by central differences."""
    jac = np.empty((len(v), 3, 3))
    h = 1e-5 * (1.0 + np.linalg.norm(v, axis=1))
    for k in range(3):
        e = np.zeros(3)
        e[k] = 1.0
        plus = -t[:, None] * rel_velocity(v + h[:, None] * e, c)
        minus = -t[:, None] * rel_velocity(v - h[:, None] * e, c)
        jac[:, :, k] = (plus - minus) / (2.0 * h[:, None])
    return np.abs(np.linalg.det(jac))


def cmd_kinematics(ctx: RunContext) -> None:
    cfg = ctx.section("kinematics")
    rng = np.random.default_rng(ctx.seed)
    tol = ctx.tol["kinematics"]
    rows = []
    for c in cfg["c_values"]:
        v, u, omega = _random_pairs(rng, cfg["draws"])
        vp, up = post_collision(v, u, omega, c)
        scale = 1.0 + np.linalg.norm(v, axis=1) + np.linalg.norm(u, axis=1)
        mom = float(np.max(np.linalg.norm(vp + up - v - u, axis=1) / scale))
        e0 = energy(v, c) + energy(u, c)
        en = float(np.max(np.abs(energy(vp, c) + energy(up, c) - e0) / scale))
        g0 = relative_momentum(v, u, c)
        g_inv = float(np.max(np.abs(relative_momentum(vp, up, c) - g0) / g0))
        s0 = s_invariant(v, u, c)
        s_inv = float(np.max(np.abs(s_invariant(vp, up, c) - s0) / s0))

        hv, hu, homega = _random_pairs(rng, cfg["half_angle_draws"])
        hvp, hup = post_collision(hv, hu, homega, c)
        cos = scattering_cosine(hv, hu, hvp, hup, c)
        sin_half = np.sqrt(np.maximum(0.0, 0.5 * (1.0 - cos)))
        half = float(np.max(np.abs(sin_half - half_angle_sine(hv, hvp, relative_momentum(hv, hu, c), c))))

        t = rng.uniform(0.5, 5.0, size=cfg["jacobian_samples"])
        jv = rng.normal(scale=3.0, size=(cfg["jacobian_samples"], 3))
        exact = transport_jacobian(jv, t, c)
        jac = float(np.max(np.abs(_fd_jacobian_det(jv, t, c) - exact) / exact))

        row = {"c": c, "momentum": mom, "energy": en, "g_invariance": g_inv, "s_invariance": s_inv,
               "half_angle": half, "jacobian": jac}
        rows.append(row)
        for name in ("momentum", "energy", "g_invariance", "s_invariance", "half_angle"):
            ctx.check(f"{name} c={c:g}", row[name] <= tol, value=row[name], tolerance=tol)
        ctx.check(f"jacobian c={c:g}", jac <= ctx.tol["jacobian"], value=jac, tolerance=ctx.tol["jacobian"])

    # Newtonian limit against the classical elastic map
    v = np.array([1.0, 2.0, 3.0])
    u = np.array([-2.0, 0.0, 1.0])
    omega = rng.normal(size=(50, 3))
    omega /= np.linalg.norm(omega, axis=1)[:, None]
    vp, up = post_collision(v, u, omega, cfg["newtonian_c"])
    cvp, cup = classical_post_collision(v, u, omega)
    newton = float(np.max(np.linalg.norm(vp - cvp, axis=1) / np.linalg.norm(cvp, axis=1)))
    ctx.check("newtonian limit", newton <= ctx.tol["newtonian"], value=newton, tolerance=ctx.tol["newtonian"],
              c=cfg["newtonian_c"])

    ctx.table("kinematics", rows)
    ctx.summary.update({"worst": {k: max(r[k] for r in rows) for k in rows[0] if k != "c"},
                        "newtonian": newton})


# ------------------------------------------------------------------
# collision-verify
# ------------------------------------------------------------------

def _probe_momenta(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    direction = rng.normal(size=(n, 3))
    direction /= np.linalg.norm(direction, axis=1)[:, None]
    return direction * rng.uniform(0.0, radius, size=(n, 1))


def _bracket_levels(cfg: Dict[str, Any]) -> List[Dict[str, int]]:
    """Grid sizes for the conservation ladder, coarsest first; the last level is gated."""
    full = {key: int(cfg[key]) for key in ("n_v", "n_radial", "n_theta", "n_theta_omega", "n_phi_omega")}
    levels = []
    for k in reversed(range(cfg["refinement_levels"])):
        levels.append({key: max(1, n >> k) for key, n in full.items()})
    return levels


def cmd_collision(ctx: RunContext) -> None:
    cfg = ctx.section("collision")
    # centred, so Q(f, f) is radial; a Gaussian is not a Juttner state, so Q(f, f) != 0
    g = Gaussian.normalized(1.0, temperature=cfg["temperature"])
    levels = _bracket_levels(cfg)
    tol = ctx.tol["conservation"]
    conservation = []
    gated = []
    for c in cfg["c_values"]:
        for gamma in cfg["gammas"]:
            kernel = KernelSpec(gamma=gamma, sigma0=cfg["sigma0"], c=c)
            rel = None
            for level, sizes in enumerate(levels):
                res = isotropic_brackets(g, kernel, cfg["v_radius"], tails=cfg["tails"], **sizes)
                rel = res.relative()
                conservation.append({
                    "c": c, "gamma": gamma, "level": level, **sizes,
                    "mass": res.mass, "energy": res.energy, "scale": res.scale, "relative": rel,
                })
                ctx.budget.check()
            ctx.check(f"conservation c={c:g} gamma={gamma:g}", rel <= tol, value=rel, tolerance=tol,
                      ladder=[r["relative"] for r in conservation[-len(levels):]])
            gated.append(rel)
    ctx.table("conservation", conservation)

    rng = np.random.default_rng(ctx.seed)
    probes = _probe_momenta(rng, cfg["equilibrium_probes"], cfg["probe_radius"])
    equilibrium = []
    worst_all = 0.0
    for c in cfg["c_values"]:
        f = Juttner(cfg["temperature"], c=c)
        for gamma in cfg["gammas"]:
            kernel = KernelSpec(gamma=gamma, sigma0=cfg["sigma0"], c=c)
            grid = QuadratureGrid.for_distributions(gamma, [f], probes, n_radial=cfg["eq_n_radial"],
                                                    n_theta=cfg["eq_n_theta"], n_phi=cfg["eq_n_phi"])
            worst = 0.0
            for p in probes:
                gain = eval_gain(f, f, p, kernel, grid)
                loss = eval_loss(f, f, p, kernel, grid)
                worst = max(worst, abs(gain - loss) / max(gain, loss))
            equilibrium.append({"c": c, "gamma": gamma, "probes": len(probes), "worst_relative": worst})
            worst_all = max(worst_all, worst)
            ctx.check(f"equilibrium c={c:g} gamma={gamma:g}", worst <= ctx.tol["equilibrium"], value=worst,
                      tolerance=ctx.tol["equilibrium"])
            ctx.budget.check()
    ctx.table("equilibrium", equilibrium)
    ctx.summary.update({
        "worst_conservation": max(gated),
        "worst_equilibrium": worst_all,
    })


# ------------------------------------------------------------------
# chain-rule
# ------------------------------------------------------------------

def cmd_chain_rule(ctx: RunContext) -> None:
    cfg = ctx.section("chain_rule")
    h = Gaussian.normalized(1.0, center=(0.5, 0.0, 0.0), temperature=1.0)
    f = Gaussian.normalized(1.0, center=(-0.5, 0.3, 0.0), temperature=0.8)
    v = np.asarray(cfg["v"], dtype=float)
    i, j = cfg["rotation_axes"]
    rows = []
    studies = []
    for c in cfg["c_values"]:
        for gamma in cfg["gammas"]:
            kernel = KernelSpec(gamma=gamma, c=c)
            grid = QuadratureGrid.for_distributions(gamma, [h, f], [v], n_radial=cfg["n_radial"],
                                                    n_theta=cfg["n_theta"], n_phi=cfg["n_phi"])
            for kind, study in (
                ("chain_rule", chain_rule_study(h, f, v, cfg["axis"], kernel, grid, cfg["first_step"],
                                                cfg["halvings"], cfg["stencil"])),
                ("rotation", rotation_study(h, f, v, i, j, kernel, grid, cfg["first_step"],
                                            cfg["halvings"], cfg["stencil"])),
            ):
                name = f"{kind} c={c:g} gamma={gamma:g}"
                for row in study.rows():
                    rows.append({"identity": kind, "c": c, "gamma": gamma, "fd_step": row["fd_step"],
                                 "residual": row["residual"]})
                _order_check(ctx, name, study)
                ctx.check(f"{name} terminal", study.terminal <= ctx.tol["terminal"], value=study.terminal,
                          tolerance=ctx.tol["terminal"])
                studies.append({"identity": kind, "c": c, "gamma": gamma, "order": study.order,
                                "floor": study.floor, "terminal": study.terminal})
                ctx.budget.check()
    ctx.table("chain_rule", rows, ["identity", "c", "gamma", "fd_step", "residual"])
    ctx.summary["studies"] = studies


# ------------------------------------------------------------------
# carleman-scan
# ------------------------------------------------------------------

def cmd_carleman(ctx: RunContext) -> None:
    cfg = ctx.section("carleman")
    n = cfg["samples"]
    ranges = {"beta_range": tuple(cfg["beta_range"]), "k_range": tuple(cfg["k_range"]),
              "c_range": tuple(cfg["c_range"]), "regime": cfg["regime"]}
    # the first n rows of a 2n scan are the n-sample scan (same stream)
    rows = carleman_scan(2 * n, seed=ctx.seed, **ranges)
    full = scan_summary(rows)
    half = scan_summary(rows[:n])
    full["polished"] = polished_sup(rows, **ranges)
    half["polished"] = polished_sup(rows[:n], **ranges)
    sup, sup_half = full["polished"]["sup"], half["polished"]["sup"]
    change = abs(sup - sup_half) / sup if sup > 0.0 else 0.0
    tol = ctx.tol["stability"]
    ctx.check("carleman ratios finite", full["finite"] and np.isfinite(sup), value=sup)
    ctx.check("carleman sup stable under doubling", change <= tol, value=change, tolerance=tol)
    ctx.table("carleman", rows)
    ctx.summary.update({"n": full, "half": half, "change": change})


# ------------------------------------------------------------------
# fields-solve / kernel-means
# ------------------------------------------------------------------

def cmd_fields(ctx: RunContext) -> None:
    cfg = ctx.section("fields")
    max_nodes = ctx.budget.max_nodes

    f0 = RadialBump(0.5, 1.0)
    f1 = RadialBump(1.0, 0.8)
    kirchhoff = []
    for c, t in cfg["kirchhoff_cases"]:
        radii = np.linspace(max(0.2, c * t - 1.0) + 0.05, c * t + 0.95, cfg["kirchhoff_probes"])
        ref = radial_wave_fd(f0.profile, f1.profile, t, radii, c, support=1.0, dr=cfg["kirchhoff_dr"])
        rule = sphere_rule(cfg["kirchhoff_n_theta"], cfg["kirchhoff_n_phi"], axis=[1.0, 0.0, 0.0])
        got = np.array([float(homogeneous_wave(f0, f1, t, [r, 0.0, 0.0], c, rule)) for r in radii])
        for r, a, b in zip(radii, got, ref):
            kirchhoff.append({"c": c, "t": t, "r": r, "kirchhoff": a, "fd": b})
        err = float(np.max(np.abs(got - ref)) / np.max(np.abs(ref)))
        ctx.check(f"kirchhoff vs fd c={c:g} t={t:g}", err <= ctx.tol["kirchhoff"], value=err,
                  tolerance=ctx.tol["kirchhoff"])
    ctx.table("kirchhoff", kirchhoff)

    c = cfg["residual_c"]
    src = ModulatedGaussian(c, amplitude=1.0, eps=0.5, nu=1.0, x_width=0.7, v_center=(0.3, 0.0, 0.0), v_width=0.5)
    grid = ConeGrid(n_shells=cfg["residual_n_shells"], n_theta=cfg["residual_n_theta"],
                    n_phi=cfg["residual_n_phi"], n_velocity=cfg["residual_n_velocity"],
                    velocity_mode="momentum", max_nodes=max_nodes)
    residual_rows = []
    for kind, index in (("electric", 0), ("magnetic", (0, 1))):
        study = gs_residual_study(kind, index, src, cfg["residual_t"], cfg["residual_x"], c, grid)
        for row in study.rows():
            residual_rows.append({"kind": kind, "index": str(index), "fd_step": row["fd_step"],
                                  "residual": row["residual"]})
        _order_check(ctx, f"wave residual {kind} {index}", study)
        ctx.budget.check()
    ctx.table("wave_residual", residual_rows)

    lorentz = lorentz_force_scan(cfg["lorentz_samples"], seed=ctx.seed)
    ctx.check("lorentz force ratio finite", bool(np.isfinite(lorentz["sup_ratio"])), value=lorentz["sup_ratio"])

    ft = FreeTransportGaussian(c, amplitude=1.0, x_width=0.5, v_width=0.4)
    decay_grid = ConeGrid(n_shells=cfg["decay_n_shells"], n_theta=cfg["decay_n_theta"],
                          n_phi=cfg["decay_n_phi"], n_velocity=cfg["decay_n_velocity"], max_nodes=max_nodes)
    decay = field_decay_scan(ft, cfg["decay_times"], cfg["decay_radii"], c, decay_grid, directions=[[1.0, 0.0, 0.0]])
    for row in decay:
        row.pop("x")
    envelope = max(row["envelope"] for row in decay)
    ctx.check("field envelope finite", bool(np.isfinite(envelope)), value=envelope)
    ctx.table("field_decay", decay)
    ctx.summary.update({"lorentz_sup_ratio": lorentz["sup_ratio"], "max_envelope": envelope})


def cmd_kernel_means(ctx: RunContext) -> None:
    cfg = ctx.section("fields")
    scan = kernel_means_scan(cfg["kernel_means_samples"], seed=ctx.seed, c_range=tuple(cfg["kernel_c_range"]),
                             n_theta=cfg["kernel_n_theta"], n_phi=cfg["kernel_n_phi"])
    tol = ctx.tol["kernel_means"]
    ctx.check("mean of a vanishes", scan["max_abs_a"] <= tol, value=scan["max_abs_a"], tolerance=tol)
    ctx.check("mean of b vanishes", scan["max_abs_b"] <= tol, value=scan["max_abs_b"], tolerance=tol)
    ctx.table("kernel_means", [scan])
    ctx.summary.update(scan)


# ------------------------------------------------------------------
# vectorfield-table
# ------------------------------------------------------------------

def cmd_vectorfields(ctx: RunContext) -> None:
    cfg = ctx.section("vectorfields")
    tol = ctx.tol["commutator"]
    rows = []
    transport_rows = []
    for c in cfg["c_values"]:
        jets = [gaussian_test_jet(cfg["t"], cfg["x"], cfg["v"], seed=ctx.seed + s, c=c) for s in range(cfg["jet_seeds"])]
        for lifted in (True, False):
            worst: Dict[tuple, float] = {}
            for jet in jets:
                for row in commutator_table(jet, c, lifted)["rows"]:
                    key = (row["z1"], row["z2"])
                    worst[key] = max(worst.get(key, 0.0), row["residual"])
            for (z1, z2), res in worst.items():
                rows.append({"c": c, "lifted": lifted, "z1": z1, "z2": z2, "residual": res})
            top = max(worst.values())
            ctx.check(f"commutator table c={c:g} lifted={lifted}", top <= tol, value=top, tolerance=tol)

        t_worst = 0.0
        for z in all_fields(True):
            res = max(transport_commutation_residual(z, jet, c) for jet in jets)
            transport_rows.append({"c": c, "z": z.name, "residual": res})
            t_worst = max(t_worst, res)
        ctx.check(f"transport commutation c={c:g}", t_worst <= tol, value=t_worst, tolerance=tol)

        rec = max(reconstruction_residual(jet, c)["max"] for jet in jets)
        ctx.check(f"d_t, d_x reconstruction c={c:g}", rec <= tol, value=rec, tolerance=tol)
    ctx.table("commutators", rows, ["c", "lifted", "z1", "z2", "residual"])
    ctx.table("transport_commutation", transport_rows, ["c", "z", "residual"])
    ctx.summary["worst_commutator"] = max(r["residual"] for r in rows)


# ------------------------------------------------------------------
# inequality-scan
# ------------------------------------------------------------------

def _inequality_ids(config: Dict[str, Any], case_id: Optional[str]) -> List[str]:
    wanted = case_id or config["analysis"]["cases"]
    if wanted == "all":
        return case_ids()
    if isinstance(wanted, str):
        wanted = [wanted]
    for cid in wanted:
        try:
            get_case(cid)
        except ParameterError as exc:
            raise ConfigError(str(exc)) from exc
    return list(wanted)


def cmd_inequality(ctx: RunContext) -> None:
    cfg = ctx.section("analysis")
    tol = ctx.tol["stability"]
    rows = []
    reports = []
    for cid in _inequality_ids(ctx.config, ctx.case_id):
        report = verify_inequality(cid, cfg["n_samples"], seed=ctx.seed, polish=cfg["polish"], tolerance=tol)
        rows.append(report.csv_row())
        reports.append(report.to_dict())
        ctx.check(f"inequality {cid}", report.passed, value=report.sup_ratio, tolerance=tol,
                  detail=f"change={report.change:.3g} finite={report.finite}")
        ctx.budget.check()
    ctx.table("inequalities", rows)
    ctx.summary["cases"] = reports


# ------------------------------------------------------------------
# simulate / decay-fit
# ------------------------------------------------------------------

def cmd_simulate(ctx: RunContext) -> None:
    sim = simulation_config(ctx.config)
    result = run_simulation(sim, ctx.budget)
    ctx.table("timeseries", result.rows, result.columns)
    ctx.json(data_paths.decay_fit_path(ctx.run_dir), {
        "fit": result.fit.to_dict() if result.fit else None,
        "fit_error": result.fit_error,
        "growth": result.growth.to_dict() if result.growth else None,
    })

    mass = result.drift("mass")
    ctx.check("mass conserved", mass <= ctx.tol["mass_drift"], value=mass, tolerance=ctx.tol["mass_drift"])
    if sim.field_mode == "none":
        en = result.drift("energy")
        ctx.check("energy conserved", en <= ctx.tol["mass_drift"], value=en, tolerance=ctx.tol["mass_drift"])
        if not sim.collisions:
            low, high = ctx.tol["decay_low"], ctx.tol["decay_high"]
            exponent = result.fit.exponent if result.fit else float("nan")
            ctx.check("free transport decay exponent", bool(result.fit and result.fit.within(low, high)),
                      value=exponent, detail=result.fit_error or f"expected in [{low}, {high}]")
    elif sim.field_mode == "prescribed" and result.growth is not None:
        ctx.check("weighted sup growth", result.growth.holds, value=result.growth.worst_ratio,
                  detail=f"C={result.growth.constant:.4g} power={result.growth.power}")
    else:
        env = max(abs(row["E_probe"]) * (1.0 + row["t"]) ** 2 for row in result.rows)
        ctx.check("field probe envelope finite", bool(np.isfinite(env)), value=env)
    ctx.summary.update(result.to_dict())


def _decay_input(config: Dict[str, Any], root: str) -> str:
    return config["decay_fit"]["input"] or data_paths.table_path(os.path.join(root, "simulate"), "timeseries")


def cmd_decay_fit(ctx: RunContext) -> None:
    cfg = ctx.section("decay_fit")
    path = _decay_input(ctx.config, ctx.root)
    rows = read_table(path)
    column = cfg["column"]
    if not rows or column not in rows[0] or "t" not in rows[0]:
        raise ConfigError(f"{path} has no column '{column}'. Available: {list(rows[0]) if rows else []}")
    series = [(float(r["t"]), float(r[column])) for r in rows]
    low, high = ctx.tol["decay_low"], ctx.tol["decay_high"]
    fit = measure_decay(series, tuple(cfg["window"]), quantity=column, offset=cfg["offset"],
                        min_points=cfg["min_points"])
    ctx.json(data_paths.decay_fit_path(ctx.run_dir), {"input": path, "fit": fit.to_dict()})
    ctx.check(f"{column} decay exponent", fit.within(low, high), value=fit.exponent,
              detail=f"expected in [{low}, {high}], r2={fit.r2:.4f}")
    ctx.summary["fit"] = fit.to_dict()


# ------------------------------------------------------------------
# Dispatch
# ------------------------------------------------------------------

SUBCOMMANDS: Dict[str, Callable[[RunContext], None]] = {
    "kinematics-check": cmd_kinematics,
    "collision-verify": cmd_collision,
    "chain-rule": cmd_chain_rule,
    "carleman-scan": cmd_carleman,
    "fields-solve": cmd_fields,
    "kernel-means": cmd_kernel_means,
    "vectorfield-table": cmd_vectorfields,
    "inequality-scan": cmd_inequality,
    "simulate": cmd_simulate,
    "decay-fit": cmd_decay_fit,
}

_HELP = {
    "kinematics-check": "post-collision map invariants, half-angle identity, Jacobian, Newtonian limit",
    "collision-verify": "conservation moments and Juttner equilibrium of the collision operator",
    "chain-rule": "finite-difference convergence of the chain-rule and rotation identities",
    "carleman-scan": "sup of the Carleman term over its bound",
    "fields-solve": "Kirchhoff vs FD oracle, retarded wave residuals, field decay envelope",
    "kernel-means": "zero spherical means of the Glassey-Strauss kernels",
    "vectorfield-table": "11 x 11 commutator table and transport commutation",
    "inequality-scan": "sampled sup-ratio of catalog inequalities",
    "simulate": "particle simulation with decay fit",
    "decay-fit": "decay exponent of a recorded time series",
    "report": "run every enabled subcommand and aggregate pass/fail",
}


def _prepare(subcommand: str, config: Dict[str, Any], root: str, case_id: Optional[str]) -> None:
    """Checks that must fail with exit 2 before any output exists."""
    if subcommand == "inequality-scan":
        _inequality_ids(config, case_id)
    elif subcommand == "decay-fit":
        path = _decay_input(config, root)
        if not os.path.isfile(path):
            raise ConfigError(f"decay-fit input not found: {path}")
    elif subcommand == "report":
        unknown = sorted(set(config["report"]["subcommands"]) - set(SUBCOMMANDS))
        if unknown:
            raise ConfigError(f"Unknown report subcommands {unknown}. Available: {sorted(SUBCOMMANDS)}")
        _inequality_ids(config, case_id)


def _budget(config: Dict[str, Any]) -> RunBudget:
    b = config["budget"]
    return RunBudget(max_wall_time_seconds=b["max_wall_time_seconds"], max_nodes=b["max_nodes"],
                     max_steps=b["max_steps"], threads=config["run"]["threads"])


def _created_dir(root: str, subcommand: str) -> Optional[str]:
    """The outermost directory ``run_dir`` is about to create, if any."""
    if not os.path.isdir(root):
        return root
    run = os.path.join(root, subcommand)
    return None if os.path.isdir(run) else run


def _discard(ctx: RunContext, created: Optional[str]) -> None:
    """Drop what a run wrote before a configuration error surfaced."""
    if created is not None:
        shutil.rmtree(created, ignore_errors=True)
    else:
        for path in ctx.artifacts + [ctx.events.path]:
            if os.path.exists(path):
                os.remove(path)
    log.debug("[cli] discarded partial output in %s", ctx.run_dir)


def execute(subcommand: str, config: Dict[str, Any], root: str, case_id: Optional[str] = None) -> int:
    """Run one subcommand into ``<root>/<subcommand>/`` and return its exit code."""
    started = time.time()
    created = _created_dir(root, subcommand)
    run = data_paths.run_dir(subcommand, root)
    events_file = data_paths.events_path(run)
    if os.path.exists(events_file):
        os.remove(events_file)
    ctx = RunContext(subcommand, config, run, CheckLogger(events_file), _budget(config), root, case_id)
    log.info("[cli] %s -> %s", subcommand, run)

    code = EXIT_PASS
    try:
        if subcommand == "report":
            code = cmd_report(ctx)
        else:
            SUBCOMMANDS[subcommand](ctx)
    except BudgetExceededError as exc:
        ctx.check("budget", False, detail=str(exc))
        code = EXIT_BUDGET
    except (ConfigError, ParameterError) as exc:
        _discard(ctx, created)
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    except (KineticError, MajorantOverflowError) as exc:
        ctx.check("run completed", False, detail=f"{type(exc).__name__}: {exc}")
        code = EXIT_FAIL

    passed = ctx.events.all_passed
    if code == EXIT_PASS and not passed:
        code = EXIT_FAIL
    if os.path.exists(events_file):
        ctx.artifacts.append(events_file)
    summary = {
        "subcommand": subcommand,
        "passed": passed and code == EXIT_PASS,
        "exit_code": code,
        "failed": ctx.events.failed(),
        "checks": [
            {"check": e.check, "passed": e.passed, "value": e.value, "tolerance": e.tolerance}
            for e in ctx.events.events
        ],
        **ctx.summary,
    }
    ctx.json(data_paths.summary_path(run), summary)
    wall = time.time() - started
    manifest = build_manifest(subcommand, run, ctx.artifacts, config, seed=ctx.seed, wall_time=wall,
                              passed=summary["passed"])
    save_manifest(manifest, data_paths.manifest_path(run))
    log.info("[cli] %s finished exit=%d in %.1fs", subcommand, code, wall)
    return code


def cmd_report(ctx: RunContext) -> int:
    """Every enabled subcommand under ``<report run dir>/<subcommand>/``; worst exit code wins."""
    codes = {}
    for name in ctx.config["report"]["subcommands"]:
        detail = ""
        try:
            if name == "decay-fit":
                _prepare(name, ctx.config, ctx.run_dir, ctx.case_id)
            code = execute(name, ctx.config, ctx.run_dir, ctx.case_id)
        except ConfigError as exc:
            code, detail = EXIT_CONFIG, str(exc)
        codes[name] = code
        ctx.check(name, code == EXIT_PASS, value=code, detail=detail)
    ctx.table("report", [{"subcommand": k, "exit_code": v, "passed": v == EXIT_PASS} for k, v in codes.items()])
    ctx.summary["subcommands"] = codes
    for worst in (EXIT_BUDGET, EXIT_CONFIG, EXIT_FAIL):
        if worst in codes.values():
            return worst
    return EXIT_PASS


# ------------------------------------------------------------------
# Argument parsing
# ------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config (default: config/config.yaml if present)")
    common.add_argument("--profile", help="preset from profiles/<name>.yaml")
    common.add_argument("--set", dest="overrides", action="append", default=[], metavar="SECTION.KEY=VALUE",
                        help="override one config value (repeatable)")
    common.add_argument("--seed", type=int, help="shorthand for --set run.seed=N")
    common.add_argument("--threads", type=int, help="shorthand for --set run.threads=N")
    common.add_argument("--output-dir", help="output root (default: runs/)")
    common.add_argument("--log-level", help="DEBUG, INFO, WARNING, ERROR")

    parser = argparse.ArgumentParser(prog="python -m src.cli", description="Relativistic kinetic verification suite.")
    sub = parser.add_subparsers(dest="subcommand", required=True)
    for name in list(SUBCOMMANDS) + ["report"]:
        p = sub.add_parser(name, parents=[common], help=_HELP[name])
        if name in ("inequality-scan", "report"):
            p.add_argument("case_id", nargs="?", help="catalog case id or 'all' (default: analysis.cases)")
    return parser


def _overrides(args: argparse.Namespace) -> List[str]:
    out = list(args.overrides)
    if args.seed is not None:
        out.append(f"run.seed={args.seed}")
    if args.threads is not None:
        out.append(f"run.threads={args.threads}")
    return out


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = resolve(args.config, args.profile, _overrides(args))
        if args.output_dir is not None:
            config["run"]["output_dir"] = args.output_dir
        if args.log_level is not None:
            config["run"]["log_level"] = args.log_level
        level = getattr(logging, str(config["run"]["log_level"]).upper(), None)
        if not isinstance(level, int):
            raise ConfigError(f"Unknown log level '{config['run']['log_level']}'")
        logging.basicConfig(level=level, format=LOG_FORMAT)
        root = config["run"]["output_dir"] or data_paths.OUTPUT_ROOT
        case_id = getattr(args, "case_id", None)
        _prepare(args.subcommand, config, root, case_id)
        return execute(args.subcommand, config, root, case_id)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    raise SystemExit(main())
