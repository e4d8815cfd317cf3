"""Tests for relativistic collision kinematics.

Run from project root:
    python -m tests.test_kinematics

Pure numpy; runs in a few seconds.
"""

import os
import sys

import numpy as np

# ── ensure project root is on path ──
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from src.errors import DegenerateError, DomainError, ParameterError
from src.kinematics import (
    CollisionPair,
    Momentum,
    check_map,
    classical_post_collision,
    collision_bounds,
    energy,
    half_angle_sine,
    kappa,
    moller_velocity,
    normalize_omega,
    post_collision,
    post_energies,
    post_momentum_bound,
    rel_velocity,
    relative_momentum,
    s_invariant,
    s_invariant_direct,
    scattering_cosine,
    transport_jacobian,
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


SPEEDS = (1.0, 2.0, 10.0)


def _random_pairs(n, seed=0, scale=2.0):
    rng = np.random.default_rng(seed)
    v = rng.normal(scale=scale, size=(n, 3))
    u = rng.normal(scale=scale, size=(n, 3))
    omega = rng.normal(size=(n, 3))
    omega /= np.linalg.norm(omega, axis=1)[:, None]
    return v, u, omega


# ==================================================================
# 1. Energies and velocity maps
# ==================================================================

def test_energy():
    print("\n=== Energy ===")
    check("rest energy is c", energy([0, 0, 0], 1.0) == 1.0)
    check("v=(3,4,0), c=1 -> sqrt(26)", abs(energy([3, 4, 0], 1.0) - np.sqrt(26.0)) < 1e-15)
    check("v=(3,4,0), c=10 -> sqrt(125)", abs(energy([3, 4, 0], 10.0) - np.sqrt(125.0)) < 1e-13)
    check("Momentum.v0", abs(Momentum((3.0, 4.0, 0.0), 1.0).v0 - np.sqrt(26.0)) < 1e-15)

    try:
        energy([1, 0, 0], 0.5)
        check("c < 1 rejected", False)
    except ParameterError:
        check("c < 1 rejected", True)


def test_check_map():
    print("\n=== check_map ===")
    check("origin is fixed", np.allclose(check_map([0, 0, 0], 3.0), 0.0))
    check("y=(0.6,0,0), c=1 -> (0.75,0,0)",
          np.allclose(check_map([0.6, 0, 0], 1.0), [0.75, 0, 0], atol=1e-15))

    rng = np.random.default_rng(1)
    n = 10_000
    for c in SPEEDS:
        dirs = rng.normal(size=(n, 3))
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        y = dirs * (0.99 * c * rng.uniform(size=n) ** (1 / 3))[:, None]
        back = rel_velocity(check_map(y, c), c)
        err = float(np.max(np.abs(back - y)))
        check(f"rel_velocity o check_map = id (c={c:g})", err < 1e-12, f"max err {err:.3e}")

        v = rng.normal(scale=5.0, size=(n, 3))
        forth = check_map(rel_velocity(v, c), c)
        rel = float(np.max(np.linalg.norm(forth - v, axis=1) / (1.0 + np.linalg.norm(v, axis=1))))
        check(f"check_map o rel_velocity = id (c={c:g})", rel < 1e-10, f"max rel err {rel:.3e}")
        check(f"|vhat| < c (c={c:g})", bool(np.all(np.linalg.norm(rel_velocity(v, c), axis=1) < c)))

    try:
        check_map([1.0, 0, 0], 1.0)
        check("|y| = c rejected", False)
    except DomainError:
        check("|y| = c rejected", True)


def test_transport_jacobian():
    print("\n=== Transport Jacobian ===")
    check("v=0 -> t^3", abs(transport_jacobian([0, 0, 0], 2.0, 3.0) - 8.0) < 1e-12)
    check("t=0 -> 0", transport_jacobian([1, 2, 3], 0.0, 1.0) == 0.0)

    rng = np.random.default_rng(2)
    n = 1000
    for c in SPEEDS:
        t = rng.uniform(0.5, 5.0, size=n)
        v = rng.normal(scale=3.0, size=(n, 3))
        jac = np.empty((n, 3, 3))
        h = 1e-5 * (1.0 + np.linalg.norm(v, axis=1))
        for k in range(3):
            e = np.zeros(3)
            e[k] = 1.0
            plus = -t[:, None] * rel_velocity(v + h[:, None] * e, c)
            minus = -t[:, None] * rel_velocity(v - h[:, None] * e, c)
            jac[:, :, k] = (plus - minus) / (2.0 * h[:, None])
        det = np.abs(np.linalg.det(jac))
        exact = transport_jacobian(v, t, c)
        rel = float(np.max(np.abs(det - exact) / exact))
        check(f"c^5 t^3 / v0^5 matches FD determinant (c={c:g})", rel < 1e-6, f"max rel err {rel:.3e}")

    try:
        transport_jacobian([0, 0, 0], -1.0, 1.0)
        check("t < 0 rejected", False)
    except DomainError:
        check("t < 0 rejected", True)


def test_kappa():
    print("\n=== kappa ===")
    check("kappa(0, x) = 1", abs(kappa([0, 0, 0], [1, 0, 0], 1.0) - 1.0) < 1e-15)
    k = kappa([100.0, 0, 0], [1, 0, 0], 1.0)
    check("outgoing fast particle gives small kappa", 0.0 < k < 1e-4, f"kappa={k}")
    try:
        kappa([1, 0, 0], [0, 0, 0], 1.0)
        check("x = 0 rejected", False)
    except DomainError:
        check("x = 0 rejected", True)


# ==================================================================
# 2. Pair invariants
# ==================================================================

def test_pair_invariants():
    print("\n=== Pair Invariants ===")
    v = np.array([1.0, 0, 0])
    check("g(v, v) = 0", relative_momentum(v, v, 1.0) == 0.0)
    check("s(v, v) = 4c^2", s_invariant(v, v, 2.0) == 16.0)
    check("v_phi(v, v) = 0", moller_velocity(v, v, 1.0) == 0.0)

    pair = CollisionPair(Momentum((1.0, 0.0, 0.0)), Momentum((-1.0, 0.0, 0.0)), (0.0, 1.0, 0.0))
    check("head-on g = 2", abs(pair.g - 2.0) < 1e-14)
    check("head-on s = 8", abs(pair.s - 8.0) < 1e-13)
    check("head-on v_phi = sqrt(2)/2", abs(pair.v_phi - np.sqrt(2.0) / 2.0) < 1e-14)
    check("zeta >= 1", pair.zeta >= 1.0)
    check("to_dict carries g", abs(pair.to_dict()["g"] - 2.0) < 1e-14)

    vs, us, _ = _random_pairs(100_000, seed=3)
    for c in SPEEDS:
        s1 = s_invariant(vs, us, c)
        s2 = s_invariant_direct(vs, us, c)
        rel = float(np.max(np.abs(s1 - s2) / s1))
        check(f"stable s matches 2(v0u0 - v.u + c^2) (c={c:g})", rel < 1e-12, f"max rel err {rel:.3e}")

        bounds = collision_bounds(vs, us, c)
        for name, (lhs, rhs) in bounds.items():
            ok = bool(np.all(lhs <= rhs * (1.0 + 1e-12) + 1e-12))
            check(f"bound {name} holds on 1e5 draws (c={c:g})", ok)


def test_pair_mismatch():
    print("\n=== Pair Validation ===")
    try:
        CollisionPair(Momentum((1.0, 0, 0), 1.0), Momentum((0, 0, 0), 2.0), (1.0, 0, 0))
        check("mixed c rejected", False)
    except ParameterError:
        check("mixed c rejected", True)


# ==================================================================
# 3. Post-collision momenta
# ==================================================================

def test_post_collision_examples():
    print("\n=== Post-collision Examples ===")
    v = [1.0, 0.0, 0.0]
    u = [-1.0, 0.0, 0.0]
    vp, up = post_collision(v, u, [1.0, 0.0, 0.0], 1.0)
    check("omega along v-u gives identity", np.allclose(vp, v, atol=1e-15) and np.allclose(up, u, atol=1e-15))
    vp, up = post_collision(v, u, [0.0, 1.0, 0.0], 1.0)
    check("v+u=0: v' = (g/2) omega", np.allclose(vp, [0, 1, 0], atol=1e-15))
    check("v+u=0: u' = -(g/2) omega", np.allclose(up, [0, -1, 0], atol=1e-15))
    check("cosine of the orthogonal scattering is 0", abs(scattering_cosine(v, u, vp, up, 1.0)) < 1e-15)
    check("forward scattering cosine is 1", abs(scattering_cosine(v, u, v, u, 1.0) - 1.0) < 1e-15)

    try:
        scattering_cosine(v, v, v, v, 1.0)
        check("g = 0 rejected by scattering_cosine", False)
    except DegenerateError:
        check("g = 0 rejected by scattering_cosine", True)

    try:
        normalize_omega([1.1, 0.0, 0.0])
        check("non-unit omega rejected", False)
    except DomainError:
        check("non-unit omega rejected", True)
    check("near-unit omega renormalised",
          abs(np.linalg.norm(normalize_omega([1.0 + 1e-12, 0.0, 0.0])) - 1.0) < 1e-15)

    pair_post = CollisionPair(Momentum((1.0, 0.0, 0.0)), Momentum((-1.0, 0.0, 0.0)), (0.0, 1.0, 0.0)).post()
    check("CollisionPair.post returns Momentum", abs(pair_post[0].v0 - np.sqrt(2.0)) < 1e-14)


def test_conservation():
    print("\n=== Conservation on Random Draws ===")
    v, u, omega = _random_pairs(100_000, seed=4)
    scale = 1.0 + np.linalg.norm(v, axis=1) + np.linalg.norm(u, axis=1)
    for c in SPEEDS:
        vp, up = post_collision(v, u, omega, c)
        mom = np.linalg.norm(vp + up - v - u, axis=1) / scale
        check(f"momentum conserved (c={c:g})", float(np.max(mom)) <= 1e-12, f"max {np.max(mom):.3e}")
        e_before = energy(v, c) + energy(u, c)
        e_after = energy(vp, c) + energy(up, c)
        en = np.abs(e_after - e_before) / scale
        check(f"energy conserved (c={c:g})", float(np.max(en)) <= 1e-12, f"max {np.max(en):.3e}")

        e_vp, _ = post_energies(v, u, omega, c)
        closed = float(np.max(np.abs(e_vp - energy(vp, c)) / e_before))
        check(f"closed-form v0' agrees (c={c:g})", closed < 1e-12, f"max {closed:.3e}")

        g0 = relative_momentum(v, u, c)
        g1 = relative_momentum(vp, up, c)
        rel = float(np.max(np.abs(g1 - g0) / g0))
        check(f"g invariant under scattering (c={c:g})", rel < 1e-10, f"max rel {rel:.3e}")
        s0 = s_invariant(v, u, c)
        s1 = s_invariant(vp, up, c)
        check(f"s invariant under scattering (c={c:g})", float(np.max(np.abs(s1 - s0) / s0)) < 1e-10)

        bounds = post_momentum_bound(v, u, omega, c)
        for name, (lhs, rhs) in bounds.items():
            check(f"{name} bounded by 1+3(|v|^2+|u|^2) (c={c:g})", bool(np.all(lhs <= rhs * (1.0 + 1e-12))))


def test_half_angle():
    print("\n=== Half-angle Identity ===")
    v, u, omega = _random_pairs(10_000, seed=5)
    for c in SPEEDS:
        vp, up = post_collision(v, u, omega, c)
        g = relative_momentum(v, u, c)
        cos = scattering_cosine(v, u, vp, up, c)
        sin_half = np.sqrt(np.maximum(0.0, 0.5 * (1.0 - cos)))
        err = float(np.max(np.abs(sin_half - half_angle_sine(v, vp, g, c))))
        check(f"sin(theta/2) = g(v, v') / g (c={c:g})", err < 1e-10, f"max err {err:.3e}")


def test_newtonian_limit():
    print("\n=== Newtonian Limit ===")
    rng = np.random.default_rng(6)
    v = np.array([1.0, 2.0, 3.0])
    u = np.array([-2.0, 0.0, 1.0])
    omega = rng.normal(size=(50, 3))
    omega /= np.linalg.norm(omega, axis=1)[:, None]
    vp, up = post_collision(v, u, omega, 1e6)
    cvp, cup = classical_post_collision(v, u, omega)
    rel = float(np.max(np.linalg.norm(vp - cvp, axis=1) / np.linalg.norm(cvp, axis=1)))
    check("c=1e6 matches classical elastic map", rel < 1e-4, f"max rel {rel:.3e}")
    check("u' matches as well", np.allclose(up, cup, rtol=1e-4, atol=1e-8))


# ==================================================================
# Main
# ==================================================================

if __name__ == "__main__":
    test_energy()
    test_check_map()
    test_transport_jacobian()
    test_kappa()
    test_pair_invariants()
    test_pair_mismatch()
    test_post_collision_examples()
    test_conservation()
    test_half_angle()
    test_newtonian_limit()

    print(f"\n{'='*50}")
    print(f"  PASSED: {PASS}   FAILED: {FAIL}   TOTAL: {PASS + FAIL}")
    print(f"{'='*50}")

    sys.exit(1 if FAIL > 0 else 0)
