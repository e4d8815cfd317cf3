"""Tests for the relativistic Boltzmann operator and its identities.

Run from project root:
    python -m tests.test_collision

Grids are kept small; the full-size parameter matrix runs through
``python -m src.cli collision-verify``.
"""

import os
import sys

import numpy as np

# ── ensure project root is on path ──
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from src.collision import (
    Gaussian,
    Juttner,
    KernelSpec,
    QuadratureGrid,
    RotationDerivative,
    ScaledDerivative,
    Zero,
    carleman_bound,
    carleman_C,
    carleman_C_reference,
    carleman_scan,
    chain_rule_residual,
    chain_rule_study,
    collision_brackets,
    eval_gain,
    eval_loss,
    eval_Q,
    fd_derivative,
    isotropic_brackets,
    majorant_ratio,
    polished_sup,
    rotation_residual,
    rotation_study,
    sphere_rule,
    velocity_grid,
    weighted_Q_bound_ratio,
    weighted_Q_scan,
)
from src.collision.quadrature import FOUR_PI, jacobi_radial_rule
from src.errors import ParameterError

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


def _pair():
    h = Gaussian.normalized(1.0, center=(0.5, 0.0, 0.0), temperature=1.0)
    f = Gaussian.normalized(1.0, center=(-0.5, 0.3, 0.0), temperature=0.8)
    return h, f


def _rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


# ==================================================================
# 1. Kernel and grids
# ==================================================================

def test_kernel_spec():
    print("\n=== KernelSpec ===")
    k = KernelSpec(gamma=-1.0, sigma0="cos2_half", c=2.0)
    check("round trip through dict", KernelSpec.from_dict(k.to_dict()) == k)
    check("cos2_half is anisotropic", not k.isotropic)
    check("sigma0(0) = 1", abs(float(k.angular(1.0)) - 1.0) < 1e-15)

    for bad in ({"gamma": -2.0}, {"gamma": 0.5}, {"c": 0.5}, {"sigma0": "nope"}):
        try:
            KernelSpec(**bad)
            check(f"rejects {bad}", False)
        except ParameterError:
            check(f"rejects {bad}", True)


def test_quadrature_rules():
    print("\n=== Quadrature Rules ===")
    rule = sphere_rule(6, 12)
    check("sphere weights sum to 4 pi", abs(rule.weights.sum() - FOUR_PI) < 1e-12)
    x2 = rule.integrate(rule.points[:, 0] ** 2)
    check("sphere integrates x^2 to 4 pi / 3", abs(x2 - FOUR_PI / 3.0) < 1e-12)
    rotated = sphere_rule(6, 12, axis=(1.0, 1.0, 0.0))
    check("rotated nodes stay on the sphere", np.allclose(np.linalg.norm(rotated.points, axis=1), 1.0))

    radial = jacobi_radial_rule(10, 3.0, -0.5)
    exact = 3.0 ** 0.5 / 0.5
    check("Jacobi rule integrates r^-0.5", abs(radial.weights.sum() - exact) < 1e-12 * exact)
    try:
        jacobi_radial_rule(4, 1.0, -1.0)
        check("r^-1 rejected", False)
    except ParameterError:
        check("r^-1 rejected", True)

    for gamma in (0.0, -0.5, -1.0, -1.9):
        grid = QuadratureGrid.build(gamma, 7.5, n_radial=12, n_theta=6, n_phi=12)
        report = grid.validate()
        check(f"grid valid for gamma={gamma}", report["valid"], str(report["errors"]))

    h, f = _pair()
    grid = QuadratureGrid.for_distributions(0.0, [h, f], [[1.0, 0.0, 0.0]])
    check("truncation covers 8 spreads", grid.u_max >= 8.0 * h.spread)


def test_distributions():
    print("\n=== Distribution Oracles ===")
    rng = np.random.default_rng(0)
    pts = rng.normal(size=(20, 3))
    cov = np.array([[1.0, 0.2, 0.0], [0.2, 0.7, 0.1], [0.0, 0.1, 1.3]])
    dists = {
        "gaussian": Gaussian(2.0, (0.3, -0.2, 0.1), cov),
        "juttner": Juttner(0.7, c=2.0),
    }
    step = 1e-5
    for name, d in dists.items():
        grad = d.gradient(pts)
        hess = d.hessian(pts)
        fd = np.empty_like(grad)
        fd_h = np.empty_like(hess)
        for j in range(3):
            e = np.zeros(3)
            e[j] = step
            fd[:, j] = (d.evaluate(pts + e) - d.evaluate(pts - e)) / (2 * step)
            fd_h[:, :, j] = (d.gradient(pts + e) - d.gradient(pts - e)) / (2 * step)
        check(f"{name} gradient matches FD", np.max(np.abs(grad - fd)) < 1e-8)
        check(f"{name} Hessian matches FD", np.max(np.abs(hess - fd_h)) < 1e-7)

    g = dists["gaussian"]
    for name, derived in (("v0 d_1", ScaledDerivative(g, 1, 2.0)), ("R_02", RotationDerivative(g, 0, 2))):
        fd = np.empty((len(pts), 3))
        for j in range(3):
            e = np.zeros(3)
            e[j] = step
            fd[:, j] = (derived.evaluate(pts + e) - derived.evaluate(pts - e)) / (2 * step)
        check(f"{name} gradient matches FD", np.max(np.abs(derived.gradient(pts) - fd)) < 1e-7)

    normalized = Gaussian.normalized(2.5, temperature=0.6)
    check("normalized Gaussian carries its mass", abs(normalized.mass - 2.5) < 1e-12)


# ==================================================================
# 2. Loss / gain / Q
# ==================================================================

def test_trivial_operator():
    print("\n=== Zero Inputs ===")
    h, _ = _pair()
    kernel = KernelSpec()
    grid = QuadratureGrid.build(0.0, 8.0, 8, 4, 8)
    check("loss with f = 0", eval_loss(h, Zero(), [0.3, 0, 0], kernel, grid) == 0.0)
    check("Q with f = 0", eval_Q(h, Zero(), [0.3, 0, 0], kernel, grid) == 0.0)
    check("Q with h = 0", eval_Q(Zero(), h, [0.3, 0, 0], kernel, grid) == 0.0)


def test_loss_refinement():
    print("\n=== Loss vs Refined Grid ===")
    h, f = _pair()
    for gamma, tol in ((0.0, 1e-6), (-1.0, 1e-5)):
        kernel = KernelSpec(gamma=gamma)
        grid = QuadratureGrid.for_distributions(gamma, [h, f], [[0.0, 0.0, 0.0]])
        coarse = eval_loss(h, f, [0.0, 0.0, 0.0], kernel, grid)
        fine = eval_loss(h, f, [0.0, 0.0, 0.0], kernel, grid.refined(2))
        check(f"gamma={gamma}: loss agrees with 2x grid", _rel(coarse, fine) < tol,
              f"rel {_rel(coarse, fine):.3e}")
        check(f"gamma={gamma}: loss positive", coarse > 0.0)


def test_gain_refinement():
    print("\n=== Gain vs Refined Grid ===")
    h, f = _pair()
    kernel = KernelSpec()
    v = [1.0, 0.0, 0.0]
    grid = QuadratureGrid.for_distributions(0.0, [h, f], [v])
    coarse = eval_Q(h, f, v, kernel, grid)
    fine = eval_Q(h, f, v, kernel, grid.refined(2))
    check("Q(h, f)(1,0,0) agrees with 2x grid", _rel(coarse, fine) < 1e-5, f"rel {_rel(coarse, fine):.3e}")


def test_monotone_refinement():
    print("\n=== Monotone Refinement ===")
    h, f = _pair()
    kernel = KernelSpec(gamma=-0.5)
    v = [0.4, -0.2, 0.1]
    base = QuadratureGrid.for_distributions(-0.5, [h, f], [v], n_radial=6, n_theta=3, n_phi=6)
    q1 = eval_Q(h, f, v, kernel, base)
    q2 = eval_Q(h, f, v, kernel, base.refined(2))
    q4 = eval_Q(h, f, v, kernel, base.refined(4))
    check("successive refinements shrink the change", abs(q2 - q4) < abs(q1 - q2),
          f"|q1-q2|={abs(q1 - q2):.3e} |q2-q4|={abs(q2 - q4):.3e}")


def test_equilibrium():
    print("\n=== Juttner Equilibrium ===")
    probes = [[0.0, 0.0, 0.0], [0.8, -0.4, 0.3], [2.0, 1.0, -1.5]]
    for c in (1.0, 2.0, 10.0):
        f = Juttner(1.0, c=c)
        for gamma in (0.0, -0.5, -1.0, -1.9):
            kernel = KernelSpec(gamma=gamma, c=c)
            grid = QuadratureGrid.for_distributions(gamma, [f], probes, n_radial=8, n_theta=4, n_phi=8)
            worst = 0.0
            for v in probes:
                gain = eval_gain(f, f, v, kernel, grid)
                loss = eval_loss(f, f, v, kernel, grid)
                worst = max(worst, abs(gain - loss) / max(gain, loss))
            check(f"c={c:g} gamma={gamma}: Q(J, J) = 0", worst <= 1e-6, f"worst {worst:.3e}")

    f = Juttner(1.0, c=2.0)
    kernel = KernelSpec(gamma=-1.0, sigma0="cos2_half", c=2.0)
    grid = QuadratureGrid.for_distributions(-1.0, [f], probes, n_radial=8, n_theta=4, n_phi=8)
    gain = eval_gain(f, f, probes[1], kernel, grid)
    loss = eval_loss(f, f, probes[1], kernel, grid)
    check("angle-dependent sigma0 keeps equilibrium", abs(gain - loss) <= 1e-6 * max(gain, loss))


def test_reflection_symmetry():
    print("\n=== Reflection Symmetry ===")
    h, f = _pair()
    for sigma0 in ("constant", "cos2_half"):
        kernel = KernelSpec(gamma=-0.5, sigma0=sigma0)
        grid = QuadratureGrid.for_distributions(-0.5, [h, f], [[0.3, 0.2, 0.0]], n_radial=8, n_theta=4, n_phi=8)
        reflected = eval_gain(h, f, [0.3, 0.2, 0.0], kernel, grid, reflect=True)
        swapped = eval_gain(h, f, [0.3, 0.2, 0.0], kernel, grid, swap=True)
        check(f"{sigma0}: omega -> -omega equals v' <-> u'", _rel(reflected, swapped) < 1e-13,
              f"rel {_rel(reflected, swapped):.3e}")


# ==================================================================
# 3. Conservation moments
# ==================================================================

def test_brackets():
    print("\n=== Collision Brackets ===")
    g = Gaussian.normalized(1.0, center=(0.2, 0.0, -0.1), temperature=1.0)
    v_grid = velocity_grid(g.center, 6.0, n_radial=3, n_theta=3, n_phi=6)

    zero = collision_brackets(Zero(), KernelSpec(), QuadratureGrid.build(0.0, 8.0, 6, 3, 6), v_grid)
    check("f = 0 gives zero moments", zero.max_abs() == 0.0)

    kernel = KernelSpec(gamma=-1.0, c=1.0)
    coarse_grid = QuadratureGrid.build(-1.0, 12.0, n_radial=6, n_theta=3, n_phi=6)
    coarse = collision_brackets(g, kernel, coarse_grid, v_grid)
    check("default form is strong", coarse.form == "strong")
    fine = collision_brackets(g, kernel, coarse_grid.refined(),
                              velocity_grid(g.center, 6.0, n_radial=6, n_theta=6, n_phi=12))
    check("drifted Gaussian: strong defect visible on a coarse grid", coarse.relative() > 1e-3,
          f"relative {coarse.relative():.3e}")
    check("drifted Gaussian: strong defect falls under refinement", fine.relative() < coarse.relative(),
          f"{coarse.relative():.3e} -> {fine.relative():.3e}")

    one = QuadratureGrid.build(-1.0, 12.0, n_radial=1, n_theta=1, n_phi=1)
    weak = collision_brackets(g, kernel, one, velocity_grid(g.center, 6.0, 1, 1, 1), form="weak")
    check("weak form cancels node by node, even on one node", weak.relative() <= 1e-12,
          f"relative {weak.relative():.3e}")

    centred = Gaussian.normalized(1.0, temperature=1.0)
    sizes = dict(n_v=28, n_radial=48, n_theta=48, n_theta_omega=16, n_phi_omega=32)
    ladder = []
    for shift in (1, 0):
        res = isotropic_brackets(centred, kernel, 11.0, **{k: n >> shift for k, n in sizes.items()})
        ladder.append(res.relative())
    check("isotropic ladder falls", ladder[1] < ladder[0], f"{ladder}")
    check("isotropic strong moments <= 1e-7", ladder[1] <= 1e-7, f"relative {ladder[1]:.3e}")
    check("isotropic mass and energy scales positive", res.scales[0] > 0.0 and res.scales[4] > 0.0)
    check("isotropic momentum vanishes by symmetry", np.all(res.momentum == 0.0))
    check("to_dict reports the reduction", res.to_dict()["reduction"] == "isotropic")
    check("to_dict lists five scales", len(res.to_dict()["scales"]) == 5)

    for label, bad in (("drifted", g),
                       ("anisotropic", Gaussian(1.0, covariance=np.diag([1.0, 1.0, 2.0])))):
        try:
            isotropic_brackets(bad, kernel, 11.0, n_v=2, n_radial=2, n_theta=2, n_theta_omega=2, n_phi_omega=2)
            check(f"isotropic brackets reject {label} input", False)
        except ParameterError:
            check(f"isotropic brackets reject {label} input", True)

    j = Juttner(1.0, c=2.0)
    kernel = KernelSpec(gamma=-1.0, c=2.0)
    grid = QuadratureGrid.for_distributions(-1.0, [j], [[0.0, 0.0, 0.0]], n_radial=6, n_theta=3, n_phi=6)
    jv = velocity_grid(j.center, 8.0, n_radial=3, n_theta=3, n_phi=6)
    weak = collision_brackets(j, kernel, grid, jv, form="weak")
    strong = collision_brackets(j, kernel, grid, jv, form="strong")
    check("Juttner weak moments <= 1e-10", weak.relative() <= 1e-10, f"{weak.relative():.3e}")
    check("Juttner strong moments <= 1e-10", strong.relative() <= 1e-10, f"{strong.relative():.3e}")
    check("to_dict lists three momentum components", len(weak.to_dict()["momentum"]) == 3)

    try:
        collision_brackets(j, kernel, grid, jv, form="mixed")
        check("unknown form rejected", False)
    except ValueError:
        check("unknown form rejected", True)


# ==================================================================
# 4. Chain rule and rotation identities
# ==================================================================

def test_fd_derivative():
    print("\n=== Finite Differences ===")
    fn = lambda w: float(np.sin(w[0]) * w[1])  # noqa: E731
    v = np.array([0.3, 2.0, 0.0])
    exact = np.cos(0.3) * 2.0
    err3 = abs(fd_derivative(fn, v, 0, 1e-3) - exact)
    err5 = abs(fd_derivative(fn, v, 0, 1e-2, stencil="central5") - exact)
    check("3-point stencil accurate", err3 < 1e-6, f"{err3:.3e}")
    check("5-point stencil accurate", err5 < 1e-8, f"{err5:.3e}")
    try:
        fd_derivative(fn, v, 0, 0.0)
        check("zero step rejected", False)
    except ParameterError:
        check("zero step rejected", True)


def test_chain_rule_trivial():
    print("\n=== Chain Rule: Trivial Cases ===")
    kernel = KernelSpec()
    grid = QuadratureGrid.build(0.0, 9.0, 8, 4, 8)
    check("h = f = 0", chain_rule_residual(Zero(), Zero(), [0.1, 0, 0], 0, kernel, grid) == 0.0)
    iso_h = Gaussian.normalized(1.0, temperature=1.0)
    iso_f = Gaussian.normalized(1.0, temperature=0.7)
    res = chain_rule_residual(iso_h, iso_f, [0.0, 0.0, 0.0], 1, kernel, grid, fd_step=1e-3)
    check("radial data at the origin", res < 1e-10, f"{res:.3e}")
    check("rotation with i = j is 0", rotation_residual(iso_h, iso_f, [1.0, 2.0, 0.0], 1, 1, kernel, grid) == 0.0)


def test_chain_rule_convergence():
    print("\n=== Chain Rule Convergence ===")
    h, f = _pair()
    v = np.array([0.7, -0.3, 0.2])
    for c in (1.0, 2.0, 10.0):
        for gamma in (0.0, -1.0):
            kernel = KernelSpec(gamma=gamma, c=c)
            grid = QuadratureGrid.for_distributions(gamma, [h, f], [v], n_radial=16, n_theta=8, n_phi=16)
            study = chain_rule_study(h, f, v, 0, kernel, grid, first_step=0.08, halvings=4)
            check(f"c={c:g} gamma={gamma}: order in [1.8, 2.2]", study.within(1.8, 2.2),
                  f"order {study.order:.3f}")
            if c == 1.0 and gamma == 0.0:
                check("terminal residual <= 1e-5", study.terminal <= 1e-5, f"{study.terminal:.3e}")
                check("study rows carry every step", len(study.rows()) == 5)


def test_rotation_convergence():
    print("\n=== Rotation Identity ===")
    h, f = _pair()
    kernel = KernelSpec()
    v = np.array([0.7, -0.3, 0.2])
    grid = QuadratureGrid.for_distributions(0.0, [h, f], [v], n_radial=16, n_theta=8, n_phi=16)
    study = rotation_study(h, f, v, 0, 1, kernel, grid, first_step=0.08, halvings=4)
    check("rotation order in [1.8, 2.2]", study.within(1.8, 2.2), f"order {study.order:.3f}")
    check("rotation terminal residual <= 1e-5", study.terminal <= 1e-5, f"{study.terminal:.3e}")

    grid0 = QuadratureGrid.for_distributions(0.0, [h, f], [[0.0, 0.0, 0.0]], n_radial=16, n_theta=8, n_phi=16)
    at_origin = rotation_residual(h, f, [0.0, 0.0, 0.0], 0, 1, kernel, grid0)
    check("rotation residual at v = 0", at_origin < 1e-6, f"{at_origin:.3e}")


# ==================================================================
# 5. Carleman term and weighted bounds
# ==================================================================

def test_carleman():
    print("\n=== Carleman Term ===")
    value = carleman_C([5.0, 0, 0], [1.0, 0, 0], 0.0, 10.0, 1.0)
    ref = carleman_C_reference([5.0, 0, 0], [1.0, 0, 0], 0.0, 10.0, 1.0)
    check("quad matches composite reference", _rel(value, ref) < 1e-6, f"rel {_rel(value, ref):.3e}")
    check("empty range gives 0", carleman_C([0, 0, 0], [50.0, 0, 0], 1.0, 10.0, 1.0, u_max=10.0) == 0.0)

    c = 30.0
    value = carleman_C([10.0, 0, 0], [3.0, 4.0, 0], 2.0, 12.0, c)
    ref = carleman_C_reference([10.0, 0, 0], [3.0, 4.0, 0], 2.0, 12.0, c)
    check("large c: quad matches reference", _rel(value, ref) < 1e-6, f"rel {_rel(value, ref):.3e}")

    b = carleman_bound([5.0, 0, 0], [1.0, 0, 0], 1.0, 2.0)
    check("|v| >= |v'| regime uses c^beta", b["regime"] == "v_geq_vp" and b["bound"] == 2.0)
    b = carleman_bound([1.0, 0, 0], [5.0, 0, 0], 1.0, 2.0)
    check("|v| < |v'| regime adds (v0')^(beta+1)/c", b["bound"] > 2.0)

    for bad in ((-1.5, 10.0), (0.0, 7.0)):
        try:
            carleman_C([1, 0, 0], [0, 0, 0], bad[0], bad[1], 1.0)
            check(f"rejects beta={bad[0]}, k={bad[1]}", False)
        except ParameterError:
            check(f"rejects beta={bad[0]}, k={bad[1]}", True)

    rows = carleman_scan(100, seed=3)
    ratios = np.array([r["ratio"] for r in rows])
    check("scan ratios finite and non-negative", bool(np.all(np.isfinite(ratios)) and np.all(ratios >= 0)))
    check("scan ratios bounded", float(ratios.max()) < 100.0, f"max {ratios.max():.3e}")

    polished = polished_sup(rows, starts=2, max_evals=150)
    check("polished sup >= sampled max", polished["sup"] >= float(ratios.max()),
          f"{polished['sup']:.4e} vs {ratios.max():.4e}")
    check("polished sup finite", bool(np.isfinite(polished["sup"])))
    check("polished argument inside the ranges",
          -1.0 <= polished["beta"] <= 3.0 and 9.0 <= polished["k"] <= 20.0
          and 1.0 - 1e-9 <= polished["c"] <= 100.0 + 1e-9)
    check("empty scan polishes to 0", polished_sup([])["sup"] == 0.0)


def test_weighted_bound():
    print("\n=== Weighted L-infinity Bound ===")
    h = Gaussian.normalized(1.0, temperature=1.0)
    kernel = KernelSpec()
    grid = QuadratureGrid.build(0.0, 20.0, 12, 6, 12)
    check("f = 0 gives 0", weighted_Q_bound_ratio(h, Zero(), 0.0, [0, 0, 0], 10, kernel, grid) == 0.0)
    ratio = weighted_Q_bound_ratio(h, h, 0.0, [0, 0, 0], 10, kernel, grid)
    check("Gaussian ratio finite and positive", np.isfinite(ratio) and ratio > 0.0, f"{ratio}")
    try:
        weighted_Q_bound_ratio(h, h, 0.0, [0, 0, 0], 8, kernel, grid)
        check("k < 10 rejected", False)
    except ParameterError:
        check("k < 10 rejected", True)

    rows = weighted_Q_scan(h, h, [0.0, 1.0], [0.0, 0.0, 0.0], 10, kernel, grid=grid)
    check("time sweep: one row per time", [r["t"] for r in rows] == [0.0, 1.0])
    check("time sweep ratios finite", all(np.isfinite(r["ratio"]) and r["ratio"] >= 0.0 for r in rows))


def test_majorant():
    print("\n=== Kernel Majorant ===")
    rng = np.random.default_rng(7)
    v = rng.normal(scale=3.0, size=(20_000, 3))
    u = rng.normal(scale=3.0, size=(20_000, 3))
    for c in (1.0, 2.0, 10.0):
        for gamma in (0.0, -0.5, -1.0, -1.9):
            kernel = KernelSpec(gamma=gamma, c=c)
            worst = float(np.max(majorant_ratio(v, u, kernel)))
            check(f"c={c:g} gamma={gamma}: v_phi sigma <= 1 + |v-u|^gamma", worst <= 1.0, f"max {worst:.4f}")


# ==================================================================
# Main
# ==================================================================

if __name__ == "__main__":
    test_kernel_spec()
    test_quadrature_rules()
    test_distributions()
    test_trivial_operator()
    test_loss_refinement()
    test_gain_refinement()
    test_monotone_refinement()
    test_equilibrium()
    test_reflection_symmetry()
    test_brackets()
    test_fd_derivative()
    test_chain_rule_trivial()
    test_chain_rule_convergence()
    test_rotation_convergence()
    test_carleman()
    test_weighted_bound()
    test_majorant()

    print(f"\n{'='*50}")
    print(f"  PASSED: {PASS}   FAILED: {FAIL}   TOTAL: {PASS + FAIL}")
    print(f"{'='*50}")

    sys.exit(1 if FAIL > 0 else 0)
