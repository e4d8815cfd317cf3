"""Applying vector fields to jets, commutator tables and frame/reconstruction identities."""

import logging
from typing import Any, Dict, List, Tuple

import numpy as np

from src.errors import DegenerateError, DomainError, ParameterError
from src.fields.frame import NullFrame
from src.vectorfields.generators import (
    TRANSPORT,
    VectorFieldId,
    all_fields,
    boost,
    coefficients,
    rotation,
    translation,
)
from src.vectorfields.jet import DIM, PhaseJet

log = logging.getLogger(__name__)

LIGHT_CONE_GAP = 0.1

Expansion = List[Tuple[float, VectorFieldId]]


def _coords(point):
    return PhaseJet.coordinates(point[0], point[1:4], point[4:7])


def apply(zid: VectorFieldId, jet: PhaseJet, c: float) -> float:
    """Z f at the jet's point."""
    coef = coefficients(zid, _coords(jet.point), c)
    return float(sum(coef[a].value * jet.grad[a] for a in range(DIM)))


def apply_jet(zid: VectorFieldId, jet: PhaseJet, c: float) -> PhaseJet:
    """Z f as a first-order jet; needs the Hessian of f."""
    coef = coefficients(zid, _coords(jet.point), c)
    out = PhaseJet(jet.point, 0.0, np.zeros(DIM), None)
    for a in range(DIM):
        if coef[a].value == 0.0 and not np.any(coef[a].grad):
            continue
        out = out + coef[a] * jet.partial(a)
    return out


def commutator(z1: VectorFieldId, z2: VectorFieldId, jet: PhaseJet, c: float) -> float:
    """[Z1, Z2] f = Z1(Z2 f) - Z2(Z1 f), computed literally."""
    return apply(z1, apply_jet(z2, jet, c), c) - apply(z2, apply_jet(z1, jet, c), c)


# ------------------------------------------------------------------
# Structure constants
# ------------------------------------------------------------------

_RANK = {"Dt": 0, "Dx": 1, "S": 2, "boost": 3, "rotation": 4, TRANSPORT: 5}


def _family(z: VectorFieldId) -> str:
    if z.tag in ("Dt", "S", TRANSPORT):
        return z.tag
    if z.tag.startswith("Dx"):
        return "Dx"
    return "boost" if len(z.index) == 1 else "rotation"


def _delta(i: int, j: int) -> float:
    return 1.0 if i == j else 0.0


def _rot(i: int, j: int, lifted: bool, scale: float = 1.0) -> Expansion:
    sign, zid = rotation(i, j, lifted)
    return [] if sign == 0.0 else [(scale * sign, zid)]


def _ordered(a: VectorFieldId, b: VectorFieldId, c: float, lifted: bool) -> Expansion:
    fa, fb = _family(a), _family(b)
    if fa == TRANSPORT or fb == TRANSPORT:
        # only [S, V0T0] = -(1/c) V0T0 survives
        return [(-1.0 / c, VectorFieldId(TRANSPORT))] if fa == "S" else []
    if fa == "Dt":
        if fb == "S":
            return [(1.0 / c, a)]
        if fb == "boost":
            return [(1.0 / c, translation(b.index[0], lifted))]
        return []
    if fa == "Dx":
        i = a.index[0]
        if fb == "S":
            return [(1.0 / c, a)]
        if fb == "boost":
            return [(1.0 / c, VectorFieldId("Dt", lifted))] if i == b.index[0] else []
        if fb == "rotation":
            j, k = b.index
            out = []
            if i == j:
                out.append((1.0, translation(k, lifted)))
            if i == k:
                out.append((-1.0, translation(j, lifted)))
            return out
        return []
    if fa == "S":
        return []
    if fa == "boost":
        i = a.index[0]
        if fb == "boost":
            return _rot(i, b.index[0], lifted, 1.0 / (c * c))
        j, k = b.index
        out = []
        if i == j:
            out.append((1.0, boost(k, lifted)))
        if i == k:
            out.append((-1.0, boost(j, lifted)))
        return out
    i, j = a.index
    k, m = b.index
    return (
        _rot(i, m, lifted, _delta(j, k)) + _rot(j, k, lifted, _delta(i, m))
        + _rot(i, k, lifted, -_delta(j, m)) + _rot(j, m, lifted, -_delta(i, k))
    )


def structure(z1: VectorFieldId, z2: VectorFieldId, c: float) -> Expansion:
    """Expansion of [Z1, Z2] in the generators."""
    homogeneous = [z for z in (z1, z2) if _family(z) in ("boost", "rotation")]
    if len({z.lifted for z in homogeneous}) > 1:
        raise ParameterError(f"cannot bracket a lifted and an unlifted field: {z1.name}, {z2.name}")
    lifted = homogeneous[0].lifted if homogeneous else True
    if z1 == z2:
        return []
    if _RANK[_family(z1)] > _RANK[_family(z2)]:
        return [(-coef, z) for coef, z in _ordered(z2, z1, c, lifted)]
    return _ordered(z1, z2, c, lifted)


def commutator_residual(z1: VectorFieldId, z2: VectorFieldId, jet: PhaseJet, c: float) -> float:
    """|[Z1,Z2] f - sum C Z f| over max(1, |Z1 Z2 f|, |Z2 Z1 f|)."""
    if z1 == z2:
        return 0.0
    a = apply(z1, apply_jet(z2, jet, c), c)
    b = apply(z2, apply_jet(z1, jet, c), c)
    expected = sum(coef * apply(z, jet, c) for coef, z in structure(z1, z2, c))
    return abs((a - b) - expected) / max(1.0, abs(a), abs(b))


def commutator_table(jet: PhaseJet, c: float, lifted: bool = True) -> Dict[str, Any]:
    """All 11 x 11 residuals; ``max`` is the largest."""
    fields = all_fields(lifted)
    rows = []
    for z1 in fields:
        for z2 in fields:
            rows.append({"z1": z1.name, "z2": z2.name, "c": c,
                         "residual": commutator_residual(z1, z2, jet, c)})
    worst = max(r["residual"] for r in rows)
    log.debug("[vectorfields] commutator table c=%g max=%.3e", c, worst)
    return {"rows": rows, "max": worst}


def transport_commutation_residual(zid: VectorFieldId, jet: PhaseJet, c: float) -> float:
    """|[v0 T0, Z] f - (1/c) v0 T0 f [Z = S]| over max(1, |v0 T0 Z f|, |Z v0 T0 f|)."""
    transport = VectorFieldId(TRANSPORT)
    a = apply(transport, apply_jet(zid, jet, c), c)
    b = apply(zid, apply_jet(transport, jet, c), c)
    expected = apply(transport, jet, c) / c if zid.tag == "S" else 0.0
    return abs((a - b) - expected) / max(1.0, abs(a), abs(b))


# ------------------------------------------------------------------
# Identities in (t, x)
# ------------------------------------------------------------------

def reconstruction_residual(jet: PhaseJet, c: float) -> Dict[str, float]:
    """(1/c) d_t and d_{x_i} rebuilt from S, Omega_i, Omega_ij (unlifted).

    (t^2 - r^2/c^2) (1/c) d_t = t S - sum x_i Omega_i / c
    (t^2 - r^2/c^2) d_i       = t Omega_i - x_i S / c + sum_j x_j Omega_ij / c^2
    """
    t = float(jet.point[0])
    x = jet.point[1:4]
    r = float(np.linalg.norm(x))
    if abs(t - r / c) <= LIGHT_CONE_GAP:
        raise DomainError(f"reconstruction needs |t - r/c| > {LIGHT_CONE_GAP}, got {abs(t - r / c):.3g}")
    denom = t * t - r * r / (c * c)
    s_f = apply(VectorFieldId("S", False), jet, c)
    boosts = [apply(boost(i, False), jet, c) for i in range(3)]

    def omega_ij(i, j):
        sign, zid = rotation(i, j, False)
        return 0.0 if sign == 0.0 else sign * apply(zid, jet, c)

    dt_rec = (t * s_f - sum(x[i] * boosts[i] for i in range(3)) / c) / denom
    out = {"dt": abs(dt_rec - jet.d_t / c) / max(1.0, abs(jet.d_t / c))}
    for i in range(3):
        rec = (t * boosts[i] - x[i] * s_f / c + sum(x[j] * omega_ij(i, j) for j in range(3)) / (c * c)) / denom
        out[f"dx{i + 1}"] = abs(rec - jet.d_x[i]) / max(1.0, abs(jet.d_x[i]))
    out["max"] = max(out.values())
    return out


def null_frame_reduction(i: int, x) -> Dict[str, float]:
    """Coefficients on (Omega23, Omega13, Omega12) with e_i' . grad = sum coef * Omega, i in {2, 3}."""
    x = np.asarray(x, dtype=float)
    if i not in (2, 3):
        raise ParameterError(f"only the tangential directions e2', e3' reduce to rotations, got i={i}")
    frame = NullFrame.at(x)
    r = float(np.linalg.norm(x))
    if np.hypot(x[0], x[1]) == 0.0:
        raise DegenerateError("the spherical frame is singular on the polar axis")
    # e1' x grad = (Omega23, -Omega13, Omega12) / r
    e = frame.e3 if i == 2 else -frame.e2
    return {"Omega23": e[0] / r, "Omega13": -e[1] / r, "Omega12": e[2] / r}


def null_frame_residual(i: int, jet: PhaseJet) -> float:
    x = jet.point[1:4]
    coef = null_frame_reduction(i, x)
    frame = NullFrame.at(x)
    direct = float((frame.e2 if i == 2 else frame.e3) @ jet.d_x)
    combo = sum(k * apply(VectorFieldId(tag, False), jet, 1.0) for tag, k in coef.items())
    return abs(direct - combo) / max(1.0, abs(direct))


def rotation_cross_residual(jet: PhaseJet) -> float:
    """|e1' x grad f - (Omega23, Omega31, Omega12) f / r|."""
    x = jet.point[1:4]
    r = float(np.linalg.norm(x))
    frame = NullFrame.at(x)
    lhs = np.cross(frame.e1, jet.d_x)
    rot = np.array([
        apply(VectorFieldId("Omega23", False), jet, 1.0),
        -apply(VectorFieldId("Omega13", False), jet, 1.0),
        apply(VectorFieldId("Omega12", False), jet, 1.0),
    ]) / r
    return float(np.max(np.abs(lhs - rot))) / max(1.0, float(np.max(np.abs(lhs))))


def newtonian_boost_residual(i: int, jet: PhaseJet, c: float) -> float:
    """Relative gap between the lifted boost and t d_{x_i} + d_{v_i}."""
    t = float(jet.point[0])
    lifted = apply(boost(i, True), jet, c)
    galilean = t * jet.d_x[i] + jet.d_v[i]
    return abs(lifted - galilean) / max(1e-300, abs(galilean))
