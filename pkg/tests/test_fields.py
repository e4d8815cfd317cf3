"""Tests for the null frame, the wave propagator and the retarded field integrals.

Run from project root:
    python -m tests.test_fields
"""

import os
import sys

import numpy as np

# ── ensure project root is on path ──
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from src.collision.quadrature import sphere_rule
from src.errors import BudgetExceededError, DegenerateError, ParameterError
from src.fields import (
    ConeGrid,
    FreeTransportGaussian,
    ModulatedGaussian,
    NullFrame,
    RadialBump,
    ZeroField,
    ZeroSource,
    cross_identities_check,
    field_decay_scan,
    gs_field_terms,
    gs_kernel_a,
    gs_residual_study,
    homogeneous_wave,
    kernel_means_scan,
    kernel_sphere_integral,
    lorentz_force_bound_ratio,
    lorentz_force_scan,
    null_decompose,
    radial_wave_fd,
    retarded_terms,
    shell_rule,
    wave_residual_study,
    wave_sources,
)

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


def _small_grid(**kw):
    params = dict(n_shells=32, n_theta=8, n_phi=16, n_velocity=4, velocity_mode="momentum")
    params.update(kw)
    return ConeGrid(**params)


# ==================================================================
# Null frame and decomposition
# ==================================================================

def test_null_frame():
    print("\n=== Null Frame ===")
    rng = np.random.default_rng(1)
    worst = 0.0
    for x in rng.normal(size=(200, 3)):
        f = NullFrame.at(x)
        worst = max(worst, f.orthonormality_error(), float(np.max(np.abs(f.e1 - x / np.linalg.norm(x)))))
    check("orthonormal, right-handed, e1 = x/r", worst <= 1e-12, f"err={worst:.2e}")

    eq = NullFrame.at([2.0, 0.0, 0.0])
    check("equator e2' = -z", np.allclose(eq.e2, [0.0, 0.0, -1.0]), f"e2={eq.e2}")
    check("equator e3' = y", np.allclose(eq.e3, [0.0, 1.0, 0.0]), f"e3={eq.e3}")
    pole = NullFrame.at([0.0, 0.0, 3.0])
    check("pole frame still orthonormal", pole.orthonormality_error() <= 1e-12)

    try:
        NullFrame.at([0.0, 0.0, 0.0])
        check("x = 0 rejected", False)
    except DegenerateError:
        check("x = 0 rejected", True)


def test_null_decompose():
    print("\n=== Null Decomposition ===")
    E = np.array([1.0, 2.0, -0.5])
    B = np.array([0.3, -1.0, 0.7])
    x = np.array([0.4, -1.2, 0.9])
    s = null_decompose(E, B, x)
    f = NullFrame.at(x)
    check("rho", abs(s.rho - E @ f.e1) < 1e-14)
    check("sigma", abs(s.sigma - B @ f.e1) < 1e-14)
    check("alpha1", abs(s.alpha1 - (E @ f.e2 + B @ f.e3)) < 1e-14)
    check("alpha2", abs(s.alpha2 - (E @ f.e3 - B @ f.e2)) < 1e-14)
    recon = s.rho * f.e1 + (E @ f.e2) * f.e2 + (E @ f.e3) * f.e3
    check("frame reconstructs E", np.allclose(recon, E, atol=1e-13))
    check("to_dict keys", set(s.to_dict()) >= {"E", "B", "rho", "sigma", "alpha1", "alpha2"})


def test_lorentz_force_bound():
    print("\n=== Lorentz Force Bound ===")
    zero = lorentz_force_bound_ratio(np.zeros(3), np.zeros(3), [1.0, 0.0, 0.0], [0.5, 0.0, 0.0], 1.0)
    check("E = B = 0 gives 0", zero == 0.0)

    ratio = lorentz_force_bound_ratio([1.0, 0.0, 0.0], np.zeros(3), [1.0, 0.0, 0.0], [2.0, 0.0, 0.0], 1.0)
    check("v || x, radial E: ratio <= sqrt(2)", 0.0 < ratio <= np.sqrt(2.0), f"ratio={ratio:.4f}")

    for c in (1.0, 10.0):
        v = np.array([50.0 * c, 0.0, 0.0])
        r = lorentz_force_bound_ratio([0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0], v, c)
        check(f"outgoing wave, fast particle, c={c:g}: bounded", r <= 2.0, f"ratio={r:.4f}")

    a = lorentz_force_scan(2000, seed=3)
    b = lorentz_force_scan(4000, seed=3)
    check("scan sup finite", np.isfinite(b["sup_ratio"]) and b["sup_ratio"] < 10.0, f"sup={b['sup_ratio']:.3f}")
    check("scan stable under doubling", b["sup_ratio"] <= 2.0 * a["sup_ratio"],
          f"{a['sup_ratio']:.3f} -> {b['sup_ratio']:.3f}")

    try:
        lorentz_force_bound_ratio(np.ones(3), np.ones(3), np.zeros(3), np.ones(3), 1.0)
        check("x = 0 rejected", False)
    except DegenerateError:
        check("x = 0 rejected", True)


def test_cross_identities():
    print("\n=== Cross-Product Identities ===")
    e = np.eye(3)
    check("unit axes", cross_identities_check(e[0], e[1], e[2], e[0], x=e[2])["max"] == 0.0)
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(200):
        a, b, c, d, x = rng.normal(size=(5, 3))
        worst = max(worst, cross_identities_check(a, b, c, d, x=x)["max"])
    check("random vectors and frames <= 1e-12", worst <= 1e-12, f"max={worst:.2e}")


# ==================================================================
# Homogeneous wave
# ==================================================================

def test_homogeneous_wave_trivial():
    print("\n=== Homogeneous Wave: trivial ===")
    z = ZeroField()
    check("zero data", homogeneous_wave(z, z, 1.3, [0.2, 0.1, 0.0], 2.0) == 0.0)
    bump = RadialBump(1.0, 1.0)
    x = np.array([0.3, -0.2, 0.1])
    check("t = 0 returns f0", homogeneous_wave(bump, z, 0.0, x, 1.0) == bump.evaluate(x))
    try:
        homogeneous_wave(bump, z, -1.0, x, 1.0)
        check("t < 0 rejected", False)
    except ParameterError:
        check("t < 0 rejected", True)


def test_bump_gradient():
    print("\n=== Bump Gradient ===")
    bump = RadialBump(2.0, 1.5, center=(0.1, 0.0, -0.2))
    x = np.array([0.4, 0.5, 0.3])
    h = 1e-6
    fd = np.array([(bump.evaluate(x + h * e) - bump.evaluate(x - h * e)) / (2 * h) for e in np.eye(3)])
    check("gradient matches central difference", np.allclose(fd, bump.gradient(x), atol=1e-7),
          f"fd={fd} exact={bump.gradient(x)}")
    check("compact support", bump.evaluate([2.0, 0.0, 0.0]) == 0.0)


def test_kirchhoff_vs_fd():
    print("\n=== Kirchhoff vs radial FD solver ===")
    f0 = RadialBump(0.5, 1.0)
    f1 = RadialBump(1.0, 0.8)
    for c, t in ((1.0, 1.5), (2.0, 0.9)):
        radii = np.linspace(max(0.2, c * t - 1.0) + 0.05, c * t + 0.95, 20)
        ref = radial_wave_fd(f0.profile, f1.profile, t, radii, c, support=1.0, dr=5e-4)
        got = np.array([
            float(homogeneous_wave(f0, f1, t, [r, 0.0, 0.0], c, sphere_rule(256, 4, axis=[1.0, 0.0, 0.0])))
            for r in radii
        ])
        err = float(np.max(np.abs(got - ref)) / np.max(np.abs(ref)))
        check(f"c={c:g} t={t:g}: 20 probes within 1e-3", err <= 1e-3, f"rel err={err:.2e}")


def test_wave_residual():
    print("\n=== Homogeneous Wave Residual ===")
    study = wave_residual_study(RadialBump(1.0, 2.0), RadialBump(0.5, 2.0), 0.6, [0.3, 0.2, -0.1], 1.0,
                                rule=sphere_rule(24, 48))
    check("second-order fd convergence", study.within(1.8, 2.2), f"order={study.order:.3f}")


# ==================================================================
# Cone quadrature and sources
# ==================================================================

def test_shell_rule():
    print("\n=== Shell Rule ===")
    r0 = shell_rule(2.0, 16, 0.0)
    check("int tau^2 over (0, 2)", abs(r0.integrate(r0.points ** 2) - 8.0 / 3.0) < 1e-12)
    r1 = shell_rule(2.0, 16, 1.0)
    check("int tau^1 over (0, 2)", abs(r1.integrate(np.ones(len(r1))) - 2.0) < 1e-12)
    check("two nodes per shell", len(r1) == 32)
    try:
        ConeGrid(velocity_mode="spectral")
        check("unknown velocity mode rejected", False)
    except ParameterError:
        check("unknown velocity mode rejected", True)


def test_source_oracles():
    print("\n=== Source Oracles ===")
    rng = np.random.default_rng(11)
    sources = [
        FreeTransportGaussian(2.0, amplitude=1.3, x_center=(0.2, 0.0, 0.1), x_width=0.8,
                              v_center=(0.5, -0.2, 0.0), v_width=0.7),
        ModulatedGaussian(1.0, amplitude=0.9, eps=0.4, nu=1.7, x_width=1.1, v_width=0.6),
    ]
    h = 1e-5
    for src in sources:
        name = type(src).__name__
        worst_t = worst_x = worst_v = worst_t0 = 0.0
        for _ in range(20):
            s = float(rng.uniform(0.1, 2.0))
            y = rng.normal(size=3) * 0.8
            v = rng.normal(size=3) * 0.6
            fd_t = (src.evaluate(s + h, y, v) - src.evaluate(s - h, y, v)) / (2 * h)
            fd_x = np.array([(src.evaluate(s, y + h * e, v) - src.evaluate(s, y - h * e, v)) / (2 * h)
                             for e in np.eye(3)])
            fd_v = np.array([(src.evaluate(s, y, v + h * e) - src.evaluate(s, y, v - h * e)) / (2 * h)
                             for e in np.eye(3)])
            vhat = src.c * v / np.sqrt(src.c ** 2 + v @ v)
            worst_t = max(worst_t, abs(fd_t - src.dt(s, y, v)))
            worst_x = max(worst_x, float(np.max(np.abs(fd_x - src.grad_x(s, y, v)))))
            worst_v = max(worst_v, float(np.max(np.abs(fd_v - src.grad_v(s, y, v)))))
            t0 = src.dt(s, y, v) + vhat @ src.grad_x(s, y, v)
            worst_t0 = max(worst_t0, abs(src.transport(s, y, v) - t0))
        check(f"{name}: d_t", worst_t <= 1e-7, f"err={worst_t:.2e}")
        check(f"{name}: grad_x", worst_x <= 1e-7, f"err={worst_x:.2e}")
        check(f"{name}: grad_v", worst_v <= 1e-7, f"err={worst_v:.2e}")
        check(f"{name}: T0 oracle", worst_t0 <= 1e-10, f"err={worst_t0:.2e}")


def test_moments():
    print("\n=== Velocity Moments ===")
    src = ModulatedGaussian(1.0, amplitude=2.0, eps=0.5, nu=1.0, x_width=1.0, v_width=0.5)
    t, x = 0.7, np.array([[0.3, 0.1, -0.2]])
    j0, _ = src.moments(t, x, _small_grid(n_velocity=6))
    exact = 2.0 * (1 + 0.5 * np.sin(0.7)) * np.exp(-0.5 * float(x[0] @ x[0])) * (2 * np.pi * 0.25) ** 1.5
    check("Hermite charge exact for Gaussian profile", abs(j0[0] - exact) <= 1e-12 * exact,
          f"{j0[0]!r} vs {exact!r}")

    ft = FreeTransportGaussian(10.0, x_width=1.0, v_center=(0.5, 0.0, 0.0), v_width=0.5)
    y = np.array([[1.2, 0.3, 0.0]])
    mom, _ = ft.moments(2.0, y, _small_grid(n_velocity=12, velocity_mode="momentum"))
    pos, _ = ft.moments(2.0, y, _small_grid(n_velocity=12, velocity_mode="position"))
    rel = abs(mom[0] - pos[0]) / abs(mom[0])
    check("momentum and position modes agree", rel <= 1e-4, f"rel={rel:.2e}")


# ==================================================================
# Glassey-Strauss kernels and terms
# ==================================================================

def test_kernels():
    print("\n=== Kernels a, b ===")
    om = sphere_rule(6, 12).points
    a0 = gs_kernel_a(om, np.zeros(3), 1.0, 0, 1)
    check("a at v = 0 is -3 w_i w_k", np.allclose(a0, -3.0 * om[:, 0] * om[:, 1], atol=1e-14))
    m0 = max(abs(kernel_sphere_integral("a", np.zeros(3), 1.0, (i, i))) for i in range(3))
    check("a at v = 0 has zero mean", m0 <= 1e-13, f"{m0:.2e}")
    scan = kernel_means_scan(12, seed=5, c_range=(1.0, 10.0))
    check("zero mean of a", scan["max_abs_a"] <= 1e-8, f"{scan['max_abs_a']:.2e}")
    check("zero mean of b", scan["max_abs_b"] <= 1e-8, f"{scan['max_abs_b']:.2e}")
    try:
        kernel_sphere_integral("z", np.zeros(3), 1.0, (0, 0))
        check("unknown kernel rejected", False)
    except ParameterError:
        check("unknown kernel rejected", True)


def test_retarded_trivial():
    print("\n=== Retarded Terms: trivial ===")
    grid = _small_grid(n_shells=8)
    z = retarded_terms(ZeroSource(1.0), 1.0, [0.5, 0.0, 0.0], 1.0, grid)
    check("zero source", not np.any(z.electric) and not np.any(z.magnetic))
    ft = FreeTransportGaussian(1.0, v_center=(0.3, 0.0, 0.0), v_width=0.5)
    terms = gs_field_terms("electric", 0, ft, 1.0, [0.5, 0.2, 0.0], 1.0, grid)
    check("free transport: term1 = 0", terms[0] == 0.0)
    check("free transport: term2 nonzero", terms[1] != 0.0)
    mag = gs_field_terms("magnetic", (0, 1), ft, 1.0, [0.5, 0.2, 0.0], 1.0, grid)
    flip = gs_field_terms("magnetic", (1, 0), ft, 1.0, [0.5, 0.2, 0.0], 1.0, grid)
    check("magnetic antisymmetric", np.allclose(mag, [-f for f in flip]))
    zero_t = retarded_terms(ft, 0.0, [0.5, 0.0, 0.0], 1.0, grid)
    check("t = 0 vanishes", not np.any(zero_t.electric))

    try:
        retarded_terms(ft, 1.0, [0.5, 0.0, 0.0], 1.0, _small_grid(max_nodes=1000))
        check("node budget enforced", False)
    except BudgetExceededError:
        check("node budget enforced", True)
    try:
        gs_field_terms("scalar", 0, ft, 1.0, [0.5, 0.0, 0.0], 1.0, grid)
        check("unknown kind rejected", False)
    except ParameterError:
        check("unknown kind rejected", True)


def test_gs_residual():
    print("\n=== Retarded Wave Residual ===")
    src = ModulatedGaussian(1.0, amplitude=1.0, eps=0.5, nu=1.0, x_width=0.7,
                            v_center=(0.3, 0.0, 0.0), v_width=0.5)
    grid = _small_grid(n_shells=24, n_theta=6, n_phi=12, n_velocity=5)
    t, x = 1.0, np.array([0.4, 0.2, -0.1])
    h1, h2 = wave_sources(src, t, x, 1.0, grid)
    for kind, index, rhs in (("electric", 0, h1[0]), ("magnetic", (0, 1), h2[2])):
        study = gs_residual_study(kind, index, src, t, x, 1.0, grid)
        check(f"{kind} {index}: second-order convergence", study.within(1.8, 2.2), f"order={study.order:.3f}")
        check(f"{kind} {index}: extrapolated residual small against the source",
              abs(study.floor) <= 0.1 * abs(rhs), f"floor={study.floor:.3e} rhs={rhs:.3e}")


def test_decay_scan():
    print("\n=== Field Decay Scan ===")
    src = FreeTransportGaussian(1.0, amplitude=1.0, x_width=0.5, v_width=0.4)
    charge = (2 * np.pi * 0.25) ** 1.5 * (2 * np.pi * 0.16) ** 1.5
    grid = ConeGrid(n_shells=32, n_theta=6, n_phi=12, n_velocity=4)
    rows = field_decay_scan(src, [0.5, 2.0, 6.0], [1.0, 3.0], 1.0, grid, directions=[[1.0, 0.0, 0.0]])
    check("one row per (t, r)", len(rows) == 6)
    env = np.array([r["envelope"] for r in rows])
    check("envelope finite", bool(np.all(np.isfinite(env))))
    check("envelope bounded by a multiple of the charge", float(np.max(env)) <= 100.0 * charge,
          f"max={float(np.max(env)):.3e} charge={charge:.3e}")


# ==================================================================
# Main
# ==================================================================

if __name__ == "__main__":
    test_null_frame()
    test_null_decompose()
    test_lorentz_force_bound()
    test_cross_identities()
    test_homogeneous_wave_trivial()
    test_bump_gradient()
    test_kirchhoff_vs_fd()
    test_wave_residual()
    test_shell_rule()
    test_source_oracles()
    test_moments()
    test_kernels()
    test_retarded_trivial()
    test_gs_residual()
    test_decay_scan()

    print(f"\n{'='*50}")
    print(f"  PASSED: {PASS}   FAILED: {FAIL}   TOTAL: {PASS + FAIL}")
    print(f"{'='*50}")

    sys.exit(1 if FAIL > 0 else 0)
