"""Tests for the weights, the reduced cone integrals and the inequality catalog.

Run from project root:
    python -m tests.test_analysis
"""

import os
import sys

import numpy as np

# ── ensure project root is on path ──
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from src.analysis import (
    IntegralGrid,
    case_ids,
    change_of_variables_check,
    composite_weight,
    cone_integral_direct,
    get_case,
    graded_rule,
    i1_lhs,
    i1_rhs,
    i2_lhs,
    i3_lhs,
    reduced_cone_integral,
    sphere_reduction,
    sphere_reduction_direct,
    transfer_counter_witness,
    transport_weight_integral,
    verify_inequality,
    weight_W,
)
from src.analysis.cone_integrals import i1_integrand, i2_integrand
from src.errors import ParameterError
from src.fields import ConeGrid

PASS = 0
FAIL = 0


def check(label, condition, detail=""):
    global PASS, FAIL
    if condition:
        PASS += 1
        print(f"  [PASS] {label}")
    else:
        FAIL += 1
        print(f"  [FAIL] {label}  {detail}")
        if "pytest" in sys.modules:
            raise AssertionError(f"{label}  {detail}")


def _raises(fn, exc=ParameterError):
    try:
        fn()
    except exc:
        return True
    return False


# ==================================================================
# Weights
# ==================================================================

def test_weights():
    print("\n=== Weights ===")
    zero = np.zeros(3)
    check("W at the origin", weight_W(3, 2, 0.0, zero, zero, 1.0) == 1.0)
    check("W with N1 = N2 = 0", weight_W(0, 0, 7.0, [1.0, 2.0, 3.0], [4.0, 5.0, 6.0], 2.0) == 1.0)
    w = weight_W(0, 1, 3.0, [4.0, 0.0, 0.0], zero, 1.0)
    check("W with vhat = 0 is <x>", abs(w - np.sqrt(17.0)) < 1e-14, f"{w}")
    check("negative order rejected", _raises(lambda: weight_W(-1, 0, 0.0, zero, zero, 1.0)))

    check("composite weight at v = x = 0 is 2", abs(composite_weight(zero, 5.0, zero, 1, 1.0) - 2.0) < 1e-14)
    t, x, v, k, c = 2.0, np.array([1.0, -0.5, 0.3]), np.array([0.4, 0.1, -0.7]), 2, 3.0
    split = weight_W(4 * k + 50, k, t, x, v, c) + weight_W(2 * k + 20, k + 10, t, x, v, c)
    whole = composite_weight(v, t, x, k, c)
    check("composite weight is the sum of two W", abs(whole / split - 1.0) < 1e-12, f"{whole} vs {split}")
    check("k < 1 rejected", _raises(lambda: composite_weight(v, t, x, 0.5, c)))


# ==================================================================
# Quadrature and sphere reduction
# ==================================================================

def test_graded_rule():
    print("\n=== Graded rule ===")
    rule = graded_rule(1.0, 4.0, 16, 3)
    check("weights sum to the length", abs(np.sum(rule.weights) - 3.0) < 1e-13)
    check("quintic integrated exactly", abs(rule.integrate(rule.points ** 5) - (4.0 ** 6 - 1.0) / 6.0) < 1e-9)
    check("empty interval", len(graded_rule(2.0, 2.0, 8)) == 0)
    widths = graded_rule(0.0, 1.0, 48, 3).weights.reshape(-1, 3).sum(axis=1)
    check("no panel wider than 3 / (2 n)", np.max(widths) <= 1.5 / 48 + 1e-12, f"max={np.max(widths):.4g}")
    check("ends graded down to h_min", np.min(widths) < 1e-6, f"min={np.min(widths):.3g}")


def test_sphere_reduction():
    print("\n=== Sphere reduction ===")
    profile = lambda rho: (1.0 + rho) ** -3.0  # noqa: E731
    x = np.array([0.7, 0.2, -0.4])
    r = float(np.linalg.norm(x))
    sigma = 1.3
    reduced = sphere_reduction(profile, r, sigma)
    direct = sphere_reduction_direct(profile, x, sigma)
    prim = lambda rho: -1.0 / (1.0 + rho) + 0.5 / (1.0 + rho) ** 2  # noqa: E731
    exact = 2.0 * np.pi * sigma / r * (prim(r + sigma) - prim(abs(r - sigma)))
    check("reduced vs closed form", abs(reduced / exact - 1.0) < 1e-10, f"{reduced} vs {exact}")
    check("reduced vs S^2 rule", abs(direct / exact - 1.0) < 1e-8, f"{direct} vs {exact}")
    at_origin = sphere_reduction(profile, 0.0, 2.0)
    check("centre at the origin", abs(at_origin - 16.0 * np.pi * profile(2.0)) < 1e-12)
    check("zero radius", sphere_reduction(profile, r, 0.0) == 0.0)


def test_reduced_vs_direct_cone():
    print("\n=== Reduced vs 3-D cone integrals ===")
    t, c = 0.8, 1.0
    x = np.array([0.4, 0.2, -0.1])
    r = float(np.linalg.norm(x))
    cone = ConeGrid(n_shells=64, n_theta=32, n_phi=64)
    for label, integrand, power, tol in (
        ("second bound integrand", i2_integrand(t, c, 3.0), 2.0, 1e-2),
        ("first bound integrand", i1_integrand(t, c, 4.0), 1.0, 2e-2),
    ):
        reduced = reduced_cone_integral(integrand, t, r, c, power)
        direct = cone_integral_direct(integrand, x, t, c, power, cone)
        rel = abs(reduced - direct) / reduced
        check(f"{label}: reduced = 3-D", rel < tol, f"rel={rel:.2e}")


# ==================================================================
# Cone bounds
# ==================================================================

def test_cone_bounds():
    print("\n=== Cone integral bounds ===")
    check("second bound at t = 0 is 0", i2_lhs(0.0, 1.0, 1.0) == 0.0)
    check("first bound needs a > 3", _raises(lambda: i1_lhs(1.0, 1.0, 1.0, a=3.0)))
    check("second bound needs a >= 3", _raises(lambda: i2_lhs(1.0, 1.0, 1.0, a=2.5)))
    check("third bound needs ct >= 1", _raises(lambda: i3_lhs(0.5, 1.0, 1.0)))
    check("power 3 needs an excised tip",
          _raises(lambda: reduced_cone_integral(i2_integrand(1.0, 1.0, 3.0), 1.0, 0.5, 1.0, 3.0)))

    worst = 0.0
    for c in (1.0, 10.0):
        for t in (1.0, 10.0, 100.0):
            for frac in (0.0, 0.5, 1.0, 2.0):
                r = frac * c * t
                ratio = i1_lhs(t, r, c) / i1_rhs(t, r, c)
                worst = max(worst, ratio)
    check("first bound ratio bounded on a (t, x) grid", np.isfinite(worst) and 0.0 < worst < 100.0,
          f"max={worst:.3g}")

    coarse = i1_lhs(50.0, 40.0, 1.0)
    fine = i1_lhs(50.0, 40.0, 1.0, grid=IntegralGrid().refined())
    check("shell doubling changes the first bound by < 1%", abs(fine - coarse) / fine < 1e-2,
          f"{coarse} vs {fine}")
    check("node budget", _raises(lambda: i2_lhs(1.0, 1.0, 1.0, grid=IntegralGrid(max_nodes=10)),
                                 RuntimeError))


def test_transport_weight():
    print("\n=== Transport weight integral ===")
    t = 5.0
    exact = 2.0 * np.pi * (np.arctan(t) - t / (1.0 + t * t))
    value = transport_weight_integral(t, 0.0, 1.0)
    check("c = 1, x = 0 closed form", abs(value / exact - 1.0) < 1e-10, f"{value} vs {exact}")
    check("t = 0", transport_weight_integral(0.0, 3.0, 2.0) == 0.0)
    check("k <= 3 rejected", _raises(lambda: transport_weight_integral(1.0, 0.0, 1.0, k=3.0)))
    rng = np.random.default_rng(4)
    worst = 0.0
    for _ in range(20):
        c = float(rng.choice([1.0, 2.0, 10.0]))
        tt = float(np.expm1(rng.uniform(0.0, np.log1p(1e3))))
        r = float(np.expm1(rng.uniform(0.0, np.log1p(1e3 * c))))
        worst = max(worst, transport_weight_integral(tt, r, c))
    check("bounded by the integral of <y>^-4", worst <= np.pi ** 2 + 1e-9, f"max={worst:.6g}")


def test_change_of_variables():
    print("\n=== Transport change of variables ===")
    for c in (1.0, 2.0):
        for t in (0.5, 1.0):
            res = change_of_variables_check(t, [0.3, -0.2, 0.1], c, v_center=(0.2, 0.0, 0.0))
            check(f"c={c:g} t={t:g}: momentum = position", res["rel"] <= 1e-6, f"rel={res['rel']:.2e}")
    check("t = 0 rejected", _raises(lambda: change_of_variables_check(0.0, [0.0, 0.0, 0.0], 1.0)))


# ==================================================================
# Catalog
# ==================================================================

def test_registry():
    print("\n=== Case registry ===")
    ids = case_ids()
    for required in ("I1", "I1_3plus", "I2", "I3", "main_inequality", "x_ge_ct", "l1_linf",
                     "weight_subadditivity", "kappa_speed", "kappa_cross"):
        check(f"'{required}' registered", required in ids)
    check("unknown case lists the available ones",
          _raises(lambda: get_case("nope")))
    try:
        get_case("nope")
    except ParameterError as exc:
        check("message names the available cases", "Available" in str(exc) and "I2" in str(exc))

    case = get_case("main_inequality")
    u = np.ones((1, case.unit_dim))
    p = case.decode(u, (0,))
    check("u = 1 reaches the top of each scale axis",
          abs(p["t"][0] - 1e3) < 1e-9 and abs(np.linalg.norm(p["v"][0]) - 1e2) < 1e-9)
    check("case metadata serialises", get_case("I1_3plus").to_dict()["notes"].startswith("a = 3.1"))


def test_kappa_cases():
    print("\n=== Kappa cases ===")
    for case_id in ("kappa_speed", "kappa_cross"):
        rep = verify_inequality(case_id, n_samples=2000, seed=3)
        check(f"{case_id}: finite", rep.finite)
        check(f"{case_id}: sup <= 2", rep.sup_ratio <= 2.0, f"sup={rep.sup_ratio:.4f}")
        if case_id == "kappa_speed":
            check("kappa_speed: stable under doubling", rep.stable, f"change={rep.change:.3g}")
    row = rep.csv_row()
    check("csv row carries the schema", {"case_id", "seed", "n", "sup_ratio", "stable"} <= set(row))
    check("csv row flattens vectors", "argmax_v1" in row and "argmax_c" in row)


def test_kinematic_cases():
    print("\n=== Kinematic cases ===")
    rep = verify_inequality("main_inequality", n_samples=1000, seed=1)
    check("main inequality: finite sup", rep.finite and 0.0 < rep.sup_ratio < 10.0, f"sup={rep.sup_ratio:.4g}")
    rep = verify_inequality("post_momentum", n_samples=1000, seed=1, polish=False)
    check("post-collision momentum bound holds with constant 1", rep.sup_ratio <= 1.0 + 1e-12,
          f"sup={rep.sup_ratio}")
    rep = verify_inequality("moller_majorant", n_samples=1000, seed=1, polish=False)
    check("majorant ratio at most 1", rep.sup_ratio <= 1.0 + 1e-12, f"sup={rep.sup_ratio}")
    rep = verify_inequality("weight_subadditivity", n_samples=500, seed=2, polish=False)
    check("sub-additivity constant finite", rep.finite and rep.sup_ratio > 0.0, f"sup={rep.sup_ratio:.3g}")


def test_integral_case_report():
    print("\n=== Integral case report ===")
    grid = IntegralGrid(n_shells=32, n_radial=12)
    rep = verify_inequality("I2", n_samples=8, seed=0, grid=grid)
    check("finite", rep.finite and rep.sup_ratio > 0.0, f"sup={rep.sup_ratio}")
    check("shell doubling recorded", rep.shell_change is not None and rep.converged is not None)
    check("argmax carries c", rep.argmax["c"] in (1.0, 2.0, 10.0, 100.0))


def test_counter_witness():
    print("\n=== Weight transfer without the loss factor ===")
    res = transfer_counter_witness(max_draws=20_000, seed=0)
    check("counter-witness found", res["found"], f"draws={res['draws']}")
    if res["found"]:
        w = res["witness"]
        check("witness violates the loss-free bound", w["lhs"] > w["rhs"])


# ==================================================================
# Main
# ==================================================================

if __name__ == "__main__":
    test_weights()
    test_graded_rule()
    test_sphere_reduction()
    test_reduced_vs_direct_cone()
    test_cone_bounds()
    test_transport_weight()
    test_change_of_variables()
    test_registry()
    test_kappa_cases()
    test_kinematic_cases()
    test_integral_case_report()
    test_counter_witness()

    print(f"\n{'='*50}")
    print(f"  PASSED: {PASS}   FAILED: {FAIL}   TOTAL: {PASS + FAIL}")
    print(f"{'='*50}")

    sys.exit(1 if FAIL > 0 else 0)
