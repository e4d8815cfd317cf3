"""Tests for phase-space jets, the commuting vector fields and their commutators.

Run from project root:
    python -m tests.test_vectorfields
"""

import os
import sys

import numpy as np

# ── ensure project root is on path ──
sys.path.insert(0, os.path.join(os.path.dirname(__file__), ".."))

from src.errors import DegenerateError, DomainError, MissingDerivativeError, ParameterError
from src.vectorfields import (
    PhaseJet,
    TRANSPORT,
    VectorFieldId,
    all_fields,
    apply,
    commutator,
    commutator_residual,
    commutator_table,
    energy_jet,
    gaussian_test_jet,
    newtonian_boost_residual,
    null_frame_reduction,
    null_frame_residual,
    reconstruction_residual,
    rotation_cross_residual,
    structure,
    transport_commutation_residual,
    word_metadata,
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


T0, X0, V0 = 0.7, np.array([0.4, -0.3, 0.9]), np.array([0.5, 1.2, -0.8])


def _jet(seed=0, c=None, t=T0, x=X0, v=V0):
    return gaussian_test_jet(t, x, v, seed=seed, c=c)


# ==================================================================
# Jets
# ==================================================================

def test_jet_derivatives():
    print("\n=== PhaseJet derivatives ===")
    for seed in range(3):
        jet = _jet(seed, c=2.0)
        func = lambda p, s=seed: gaussian_test_jet(p[0], p[1:4], p[4:7], seed=s, c=2.0).value  # noqa: E731
        fd = PhaseJet.from_function(func, T0, X0, V0, step=1e-4)
        g_err = float(np.max(np.abs(fd.grad - jet.grad)))
        h_err = float(np.max(np.abs(fd.hess - jet.hess)))
        check(f"seed {seed}: gradient vs fd", g_err <= 1e-7, f"err={g_err:.2e}")
        check(f"seed {seed}: hessian vs fd", h_err <= 1e-5, f"err={h_err:.2e}")
        check(f"seed {seed}: hessian symmetric", np.allclose(jet.hess, jet.hess.T, atol=1e-14))

    z = PhaseJet.coordinates(T0, X0, V0)
    q = (z[1] * z[2] + 3.0) / z[4].sqrt() if V0[0] > 0 else z[1]
    expected = (X0[0] * X0[1] + 3.0) / np.sqrt(V0[0])
    check("quotient value", abs(q.value - expected) < 1e-14)
    check("d_x1 of quotient", abs(q.d_x[0] - X0[1] / np.sqrt(V0[0])) < 1e-14)

    first = z[1].partial(1)
    try:
        first.partial(1)
        check("first-order jet refuses a second derivative", False)
    except MissingDerivativeError:
        check("first-order jet refuses a second derivative", True)
    other = PhaseJet.coordinates(0.0, X0, V0)[1]
    try:
        z[1] + other
        check("jets at different points rejected", False)
    except ParameterError:
        check("jets at different points rejected", True)


# ==================================================================
# Applying fields
# ==================================================================

def test_apply_examples():
    print("\n=== Vector field examples ===")
    c = 3.0
    z = PhaseJet.coordinates(T0, X0, V0)
    v0 = energy_jet(z[4:7], c)
    check("Omega12^ v0 = 0", abs(apply(VectorFieldId("Omega12"), v0, c)) < 1e-14)
    check("Omega1 x1 = t", abs(apply(VectorFieldId("Omega1", False), z[1], c) - T0) < 1e-14)
    f = z[0] * z[0] - (z[1] * z[1] + z[2] * z[2] + z[3] * z[3]) / (c * c)
    expected = (2.0 / c) * f.value
    check("S (t^2 - r^2/c^2) = (2/c)(t^2 - r^2/c^2)", abs(apply(VectorFieldId("S"), f, c) - expected) < 1e-14)
    check("Omega1^ v0 = v1 / c", abs(apply(VectorFieldId("Omega1"), v0, c) - V0[0] / c) < 1e-14)

    tx_only = (z[0] * z[1]).exp() + z[2] * z[3] * z[0]
    worst = max(
        abs(apply(VectorFieldId(tag, True), tx_only, c) - apply(VectorFieldId(tag, False), tx_only, c))
        for tag in [f.tag for f in all_fields()]
    )
    check("lifted = unlifted on (t, x) functions", worst == 0.0, f"gap={worst:.2e}")

    try:
        VectorFieldId("Omega4")
        check("unknown tag rejected", False)
    except ParameterError:
        check("unknown tag rejected", True)
    check("parse lifted name", VectorFieldId.parse("Omega13^") == VectorFieldId("Omega13", True))


def test_word_metadata():
    print("\n=== Word Metadata ===")
    word = [VectorFieldId("S"), VectorFieldId("Dx1"), VectorFieldId("Omega12"), VectorFieldId("Dt")]
    meta = word_metadata(word)
    check("H and T counts", meta == {"length": 4, "H": 2, "T": 2}, str(meta))


# ==================================================================
# Commutators
# ==================================================================

def test_commutator_examples():
    print("\n=== Commutator examples ===")
    for c in (1.0, 10.0):
        jet = _jet(1, c=c)
        dt, s = VectorFieldId("Dt"), VectorFieldId("S")
        lit = commutator(dt, s, jet, c)
        check(f"c={c:g}: [Dt, S] f = c^-2 d_t f", abs(lit - jet.d_t / c ** 2) <= 1e-10)
        b1, b2 = VectorFieldId("Omega1"), VectorFieldId("Omega2")
        res = abs(commutator(b1, b2, jet, c) - apply(VectorFieldId("Omega12"), jet, c) / c ** 2)
        check(f"c={c:g}: [Omega1^, Omega2^] = c^-2 Omega12^", res <= 1e-10, f"res={res:.2e}")
    check("identical fields commute", commutator_residual(b1, b1, jet, 10.0) == 0.0)
    check("[Dt, Omega1] = (1/c) Dx1",
          structure(VectorFieldId("Dt"), VectorFieldId("Omega1"), 2.0) == [(0.5, VectorFieldId("Dx1"))])
    try:
        structure(VectorFieldId("Omega1", True), VectorFieldId("Omega2", False), 1.0)
        check("mixed lifts rejected", False)
    except ParameterError:
        check("mixed lifts rejected", True)
    try:
        commutator(b1, b2, PhaseJet(jet.point, 1.0, jet.grad, None), 1.0)
        check("missing second derivatives rejected", False)
    except MissingDerivativeError:
        check("missing second derivatives rejected", True)


def test_commutator_table():
    print("\n=== Full commutator table ===")
    for lifted in (True, False):
        for c in (1.0, 2.0, 10.0, 1000.0):
            worst = 0.0
            for seed in range(3):
                worst = max(worst, commutator_table(_jet(seed, c=c), c, lifted)["max"])
            check(f"lifted={lifted} c={c:g}: 11x11 table", worst <= 1e-10, f"max={worst:.2e}")


def test_fd_fallback():
    print("\n=== Finite-difference jets ===")
    c = 2.0
    func = lambda p: np.exp(-0.5 * np.sum(p * p) / 4.0) * (1.0 + 0.3 * p[1] - 0.2 * p[5])  # noqa: E731
    jet = PhaseJet.from_function(func, T0, X0, V0, step=1e-4)
    worst = max(commutator_residual(a, b, jet, c) for a in all_fields() for b in all_fields())
    check("table holds to 1e-5 on fd jets", worst <= 1e-5, f"max={worst:.2e}")


def test_transport_commutation():
    print("\n=== Transport commutation ===")
    const = PhaseJet.constant(PhaseJet.make_point(T0, X0, V0), 2.5)
    check("constant", transport_commutation_residual(VectorFieldId("Omega1"), const, 1.0) == 0.0)
    for c in (1.0, 10.0):
        jet = _jet(2, c=c)
        worst = max(transport_commutation_residual(z, jet, c) for z in all_fields(True))
        check(f"c={c:g}: [v0 T0, Z^] = 0, [v0 T0, S] = (1/c) v0 T0", worst <= 1e-10, f"max={worst:.2e}")
    s_struct = structure(VectorFieldId(TRANSPORT), VectorFieldId("S"), 10.0)
    check("[V0T0, S] expansion", s_struct == [(0.1, VectorFieldId(TRANSPORT))], str(s_struct))
    unlifted = transport_commutation_residual(VectorFieldId("Omega1", False), _jet(2, c=1.0), 1.0)
    check("unlifted boost does not commute", unlifted > 1e-6, f"res={unlifted:.2e}")


def test_newtonian_limit():
    print("\n=== Newtonian limit of the lifted boost ===")
    c = 1e6
    jet = _jet(4, c=None)
    worst = max(newtonian_boost_residual(i, jet, c) for i in range(3))
    check("c = 1e6 within 1e-5", worst <= 1e-5, f"rel={worst:.2e}")


# ==================================================================
# (t, x) identities
# ==================================================================

def test_reconstruction():
    print("\n=== Reconstruction of d_t, d_x ===")
    for c, t in ((1.0, 2.0), (5.0, 0.5), (1.0, 0.2)):
        jet = _jet(5, t=t)
        res = reconstruction_residual(jet, c)
        check(f"c={c:g} t={t:g}", res["max"] <= 1e-10, f"max={res['max']:.2e}")
    try:
        reconstruction_residual(_jet(5, t=float(np.linalg.norm(X0))), 1.0)
        check("near the light cone rejected", False)
    except DomainError:
        check("near the light cone rejected", True)


def test_null_frame_reduction():
    print("\n=== Null-frame reduction ===")
    z = PhaseJet.coordinates(T0, X0, V0)
    r2 = z[1] * z[1] + z[2] * z[2] + z[3] * z[3]
    for i in (2, 3):
        coef = null_frame_reduction(i, X0)
        combo = sum(k * apply(VectorFieldId(tag, False), r2, 1.0) for tag, k in coef.items())
        check(f"e{i}' . grad |x|^2 = 0", abs(combo) < 1e-13, f"{combo:.2e}")

    ze = PhaseJet.coordinates(T0, [1.0, 0.0, 0.0], V0)
    coef = null_frame_reduction(2, [1.0, 0.0, 0.0])
    combo = sum(k * apply(VectorFieldId(tag, False), ze[3], 1.0) for tag, k in coef.items())
    check("x3 on the equator: -sin(theta)", abs(combo + 1.0) < 1e-14, f"{combo}")

    rng = np.random.default_rng(9)
    worst = 0.0
    for n, x in enumerate(rng.normal(size=(1000, 3))):
        jet = gaussian_test_jet(T0, x, V0, seed=n % 7)
        worst = max(worst, null_frame_residual(2, jet), null_frame_residual(3, jet), rotation_cross_residual(jet))
    check("1000 random points", worst <= 1e-9, f"max={worst:.2e}")

    for bad, exc in (([0.0, 0.0, 2.0], DegenerateError), ([0.0, 0.0, 0.0], DegenerateError)):
        try:
            null_frame_reduction(2, bad)
            check(f"x={bad} rejected", False)
        except exc:
            check(f"x={bad} rejected", True)
    try:
        null_frame_reduction(1, X0)
        check("radial direction rejected", False)
    except ParameterError:
        check("radial direction rejected", True)


# ==================================================================
# Main
# ==================================================================

if __name__ == "__main__":
    test_jet_derivatives()
    test_apply_examples()
    test_word_metadata()
    test_commutator_examples()
    test_commutator_table()
    test_fd_fallback()
    test_transport_commutation()
    test_newtonian_limit()
    test_reconstruction()
    test_null_frame_reduction()

    print(f"\n{'='*50}")
    print(f"  PASSED: {PASS}   FAILED: {FAIL}   TOTAL: {PASS + FAIL}")
    print(f"{'='*50}")

    sys.exit(1 if FAIL > 0 else 0)
