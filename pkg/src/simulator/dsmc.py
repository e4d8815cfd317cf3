"""Stochastic binary collisions (Nanbu-Babovsky pairing per spatial cell).

In a cell holding N equal-weight particles of weight w, a random pairing is
drawn and each pair collides during dt with probability

    P = (N w / V) dt 4 pi v_phi sigma(g, theta),

omega uniform on S^2.  The acceptance test runs against the majorant
v_phi sigma <= 1 + |v - u|^gamma; when that bound times the prefactor
exceeds one, the cell is sub-cycled (or MajorantOverflowError is raised).
Every cell draws from SeedSequence([seed, step, cell]), so results do not
depend on the order or the threads cells are processed in.
"""

import concurrent.futures
import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Tuple

import numpy as np

from src.collision.kernel import KernelSpec
from src.errors import MajorantOverflowError, ParameterError
from src.kinematics import post_collision, relative_momentum, scattering_cosine
from src.simulator.ensemble import ParticleEnsemble

log = logging.getLogger(__name__)

_CELL_BITS = 21
_CELL_OFFSET = 1 << (_CELL_BITS - 1)
_MIN_G = 1e-12


@dataclass
class CollisionStats:
    cells: int = 0
    candidates: int = 0
    accepted: int = 0
    max_subcycles: int = 1

    def merge(self, other: "CollisionStats") -> None:
        self.cells += other.cells
        self.candidates += other.candidates
        self.accepted += other.accepted
        self.max_subcycles = max(self.max_subcycles, other.max_subcycles)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


class _NeedsSubcycles(Exception):
    def __init__(self, needed: int):
        super().__init__(needed)
        self.needed = needed


def cell_ids(positions, cell_size: float) -> np.ndarray:
    """Non-negative integer id of the cube of side ``cell_size`` holding each position."""
    idx = np.floor(np.asarray(positions, dtype=float) / cell_size).astype(np.int64) + _CELL_OFFSET
    idx = np.clip(idx, 0, (1 << _CELL_BITS) - 1)
    return (idx[:, 0] << (2 * _CELL_BITS)) | (idx[:, 1] << _CELL_BITS) | idx[:, 2]


def _collide_cell(v: np.ndarray, density: float, dt: float, kernel: KernelSpec, seq: np.random.SeedSequence,
                  n_sub: int) -> Tuple[np.ndarray, CollisionStats]:
    rng = np.random.default_rng(seq)
    v = v.copy()
    n = len(v)
    stats = CollisionStats(cells=1, max_subcycles=n_sub)
    prefactor = density * (dt / n_sub) * 4.0 * np.pi
    for _ in range(n_sub):
        perm = rng.permutation(n)
        i, j = perm[0:n - 1:2], perm[1:n:2]
        omega = rng.normal(size=(len(i), 3))
        omega /= np.linalg.norm(omega, axis=-1, keepdims=True)
        draws = rng.random(len(i))
        g = relative_momentum(v[i], v[j], kernel.c)
        live = g > _MIN_G
        i, j, omega, draws = i[live], j[live], omega[live], draws[live]
        if len(i) == 0:
            continue
        bound = float(np.max(prefactor * kernel.majorant(v[i], v[j])))
        if bound > 1.0:
            raise _NeedsSubcycles(math.ceil(bound * n_sub) if np.isfinite(bound) else 2 ** 62)
        vp, up = post_collision(v[i], v[j], omega, kernel.c)
        cos = 1.0 if kernel.isotropic else scattering_cosine(v[i], v[j], vp, up, kernel.c)
        accept = draws < prefactor * kernel.kernel(v[i], v[j], cos)
        v[i[accept]] = vp[accept]
        v[j[accept]] = up[accept]
        stats.candidates += len(i)
        stats.accepted += int(np.sum(accept))
    return v, stats


def _cell_task(args) -> Tuple[np.ndarray, CollisionStats]:
    v, density, dt, kernel, seq, auto_reduce, max_subcycles = args
    n_sub = 1
    while True:
        try:
            return _collide_cell(v, density, dt, kernel, seq, n_sub)
        except _NeedsSubcycles as exc:
            if not auto_reduce or exc.needed > max_subcycles:
                raise MajorantOverflowError(
                    f"acceptance bound needs {exc.needed} sub-cycles (limit "
                    f"{max_subcycles if auto_reduce else 1}); reduce dt"
                ) from None
            n_sub = exc.needed


def collision_step(
    state: ParticleEnsemble,
    kernel: KernelSpec,
    dt: float,
    seed: int,
    step: int = 0,
    cell_size: float = 1.0,
    auto_reduce: bool = True,
    max_subcycles: int = 64,
    threads: int = 1,
) -> Tuple[ParticleEnsemble, CollisionStats]:
    """One collision substep; returns the new state and counters."""
    if dt < 0.0:
        raise ParameterError(f"dt must be >= 0, got {dt}")
    if cell_size <= 0.0:
        raise ParameterError(f"cell_size must be > 0, got {cell_size}")
    if kernel.c != state.c:
        raise ParameterError(f"kernel c={kernel.c} does not match ensemble c={state.c}")
    out = state.copy()
    stats = CollisionStats()
    if dt == 0.0 or len(state) < 2:
        return out, stats
    if not state.equal_weights:
        raise ParameterError("collisions need equal particle weights; resample the ensemble first")

    ids = cell_ids(state.positions, cell_size)
    order = np.argsort(ids, kind="stable")
    keys, starts = np.unique(ids[order], return_index=True)
    bounds = list(zip(starts, list(starts[1:]) + [len(order)]))
    volume = cell_size ** 3
    w = float(state.weights[0])
    tasks: List[Any] = []
    members: List[np.ndarray] = []
    for key, (lo, hi) in zip(keys, bounds):
        rows = np.sort(order[lo:hi])
        if len(rows) < 2:
            continue
        seq = np.random.SeedSequence([int(seed), int(step), int(key)])
        tasks.append((state.momenta[rows], len(rows) * w / volume, dt, kernel, seq, auto_reduce, max_subcycles))
        members.append(rows)

    if threads > 1 and len(tasks) > 1:
        with concurrent.futures.ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_cell_task, tasks))
    else:
        results = [_cell_task(task) for task in tasks]

    for rows, (v_new, cell_stats) in zip(members, results):
        out.momenta[rows] = v_new
        stats.merge(cell_stats)
    if stats.max_subcycles > 1:
        log.warning("[simulator] collision dt=%g sub-cycled up to %d times", dt, stats.max_subcycles)
    log.debug("[simulator] collisions step=%d cells=%d accepted=%d/%d", step, stats.cells,
              stats.accepted, stats.candidates)
    return out, stats


def collide(state: ParticleEnsemble, kernel: KernelSpec, dt: float, seed: int, step: int = 0,
            cell_size: float = 1.0, auto_reduce: bool = True, max_subcycles: int = 64,
            threads: int = 1) -> ParticleEnsemble:
    return collision_step(state, kernel, dt, seed, step, cell_size, auto_reduce, max_subcycles, threads)[0]


def force_collision(v, u, c: float, seed: int = 0) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """One accepted collision with a random omega: (v', u', omega)."""
    rng = np.random.default_rng(seed)
    omega = rng.normal(size=3)
    omega /= np.linalg.norm(omega)
    vp, up = post_collision(np.asarray(v, dtype=float), np.asarray(u, dtype=float), omega, c)
    return vp, up, omega
