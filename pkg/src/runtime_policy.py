"""Run budgets.

Controls:
    max_wall_time_seconds – optional wall-clock limit per run.
    max_nodes             – cap on quadrature nodes per evaluation (cone grids).
    max_steps             – cap on simulator time steps.
    threads               – worker threads for per-cell collision work.
"""

import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, Optional

from src.errors import BudgetExceededError, ConfigError

_MAX_THREADS = 64


@dataclass
class RunBudget:
    max_wall_time_seconds: Optional[float] = None
    max_nodes: int = 50_000_000
    max_steps: int = 100_000
    threads: int = 1
    started: float = field(default_factory=time.time, repr=False)

    def __post_init__(self):
        if self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        self.threads = min(self.threads, _MAX_THREADS)
        if self.max_wall_time_seconds is not None and self.max_wall_time_seconds <= 0:
            raise ConfigError(f"max_wall_time_seconds must be > 0, got {self.max_wall_time_seconds}")

    def restart(self) -> None:
        self.started = time.time()

    @property
    def elapsed(self) -> float:
        return time.time() - self.started

    def reason(self, steps: int = 0) -> Optional[str]:
        """Return a human-readable reason string if a limit is hit, else None."""
        if steps > self.max_steps:
            return f"Step limit exceeded ({steps} > {self.max_steps})"
        if self.max_wall_time_seconds is not None:
            elapsed = self.elapsed
            if elapsed >= self.max_wall_time_seconds:
                return f"Wall-time limit exceeded ({elapsed:.1f}s >= {self.max_wall_time_seconds}s)"
        return None

    def check(self, steps: int = 0) -> None:
        why = self.reason(steps)
        if why is not None:
            raise BudgetExceededError(why)

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        d.pop("started")
        return d
