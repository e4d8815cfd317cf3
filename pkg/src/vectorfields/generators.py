"""The commuting vector fields and their complete lifts.

    Dt = (1/c) d_t,  Dx_i = d_{x_i},  S = (1/c)(t d_t + x . grad_x),
    Omega_i  = t d_{x_i} + (x_i/c^2) d_t            [+ (v0/c) d_{v_i} when lifted]
    Omega_ij = x_i d_{x_j} - x_j d_{x_i}            [+ v_i d_{v_j} - v_j d_{v_i} when lifted]
    V0T0     = v0 d_t + c v . grad_x                (free-streaming operator)

Coefficients are returned as jets so that Z f can itself be differentiated.
"""

from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple

from src.errors import ParameterError
from src.vectorfields.jet import DIM, PhaseJet, energy_jet

TRANSLATIONS = ("Dt", "Dx1", "Dx2", "Dx3")
HOMOGENEOUS = ("S", "Omega1", "Omega2", "Omega3", "Omega12", "Omega13", "Omega23")
TAGS = TRANSLATIONS + HOMOGENEOUS
TRANSPORT = "V0T0"

_ROTATIONS = {(0, 1): "Omega12", (0, 2): "Omega13", (1, 2): "Omega23"}


@dataclass(frozen=True)
class VectorFieldId:
    tag: str
    lifted: bool = True

    def __post_init__(self):
        if self.tag not in TAGS and self.tag != TRANSPORT:
            raise ParameterError(f"Unknown vector field '{self.tag}'. Available: {sorted(TAGS + (TRANSPORT,))}")

    @classmethod
    def parse(cls, name: str) -> "VectorFieldId":
        """``Omega1^`` is the complete lift of ``Omega1``."""
        lifted = name.endswith("^")
        return cls(name.rstrip("^"), lifted)

    @property
    def name(self) -> str:
        return self.tag + ("^" if self.lifted and self.tag in HOMOGENEOUS else "")

    @property
    def kind(self) -> str:
        if self.tag in TRANSLATIONS:
            return "translation"
        if self.tag == TRANSPORT:
            return "transport"
        return "homogeneous"

    @property
    def index(self) -> Tuple[int, ...]:
        """Zero-based spatial indices carried by the tag."""
        digits = "".join(ch for ch in self.tag if ch.isdigit())
        return tuple(int(d) - 1 for d in digits)

    def with_lift(self, lifted: bool) -> "VectorFieldId":
        return VectorFieldId(self.tag, lifted)


def translation(i: int, lifted: bool = True) -> VectorFieldId:
    return VectorFieldId(f"Dx{i + 1}", lifted)


def boost(i: int, lifted: bool = True) -> VectorFieldId:
    return VectorFieldId(f"Omega{i + 1}", lifted)


def rotation(i: int, j: int, lifted: bool = True) -> Tuple[float, VectorFieldId]:
    """(sign, id) with Omega_ij = sign * id; i == j gives sign 0."""
    if i == j:
        return 0.0, VectorFieldId("Omega12", lifted)
    if (i, j) in _ROTATIONS:
        return 1.0, VectorFieldId(_ROTATIONS[(i, j)], lifted)
    return -1.0, VectorFieldId(_ROTATIONS[(j, i)], lifted)


def all_fields(lifted: bool = True) -> List[VectorFieldId]:
    return [VectorFieldId(tag, lifted) for tag in TAGS]


def coefficients(zid: VectorFieldId, z: Sequence[PhaseJet], c: float) -> List[PhaseJet]:
    """Coefficient jets (a_t, a_x1..3, a_v1..3) of the field at the jets' point."""
    point = z[0].point
    coef = [PhaseJet.constant(point, 0.0) for _ in range(DIM)]
    t, x, v = z[0], z[1:4], z[4:7]
    tag = zid.tag
    if tag == "Dt":
        coef[0] = PhaseJet.constant(point, 1.0 / c)
    elif tag.startswith("Dx"):
        coef[1 + zid.index[0]] = PhaseJet.constant(point, 1.0)
    elif tag == "S":
        coef[0] = t / c
        for i in range(3):
            coef[1 + i] = x[i] / c
    elif tag == TRANSPORT:
        coef[0] = energy_jet(v, c)
        for i in range(3):
            coef[1 + i] = v[i] * c
    elif len(zid.index) == 1:
        i = zid.index[0]
        coef[0] = x[i] / (c * c)
        coef[1 + i] = t
        if zid.lifted:
            coef[4 + i] = energy_jet(v, c) / c
    else:
        i, j = zid.index
        coef[1 + j] = x[i]
        coef[1 + i] = -x[j]
        if zid.lifted:
            coef[4 + j] = v[i]
            coef[4 + i] = -v[j]
    return coef


def word_metadata(word: Sequence[VectorFieldId]) -> Dict[str, int]:
    """Counts of homogeneous (H) and translation (T) fields in a multi-index word."""
    h = sum(1 for z in word if z.kind == "homogeneous")
    tr = sum(1 for z in word if z.kind == "translation")
    return {"length": len(word), "H": h, "T": tr}
