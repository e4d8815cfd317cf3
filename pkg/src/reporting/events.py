"""Check events: one structured record per pass/fail decision.

Every acceptance check a subcommand runs produces a ``CheckEvent``; the
``CheckLogger`` appends them to ``events.jsonl`` beside the run outputs and
the summary is built from the same objects.
"""

import json
import math
import os
import time
from dataclasses import asdict, dataclass, field
from typing import Any, Dict, List, Optional


@dataclass
class CheckEvent:
    """Structured record of a single verification check."""

    type: str = "check"
    subcommand: str = ""
    check: str = ""
    passed: bool = False
    value: Optional[float] = None
    tolerance: Optional[float] = None
    detail: str = ""
    seed: Optional[int] = None
    timestamp: str = ""
    data: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        d = asdict(self)
        # JSON has no inf/nan
        for key in ("value", "tolerance"):
            if d[key] is not None and not math.isfinite(d[key]):
                d[key] = str(d[key])
        return d


def build_event(
    subcommand: str,
    check: str,
    passed: bool,
    value: Optional[float] = None,
    tolerance: Optional[float] = None,
    detail: str = "",
    seed: Optional[int] = None,
    **data: Any,
) -> CheckEvent:
    return CheckEvent(
        subcommand=subcommand,
        check=check,
        passed=bool(passed),
        value=None if value is None else float(value),
        tolerance=None if tolerance is None else float(tolerance),
        detail=detail,
        seed=seed,
        timestamp=time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime()),
        data=data,
    )


class CheckLogger:
    """Append-only JSONL writer for check events."""

    def __init__(self, path: str):
        self.path = path
        self.events: List[CheckEvent] = []
        dir_name = os.path.dirname(path)
        if dir_name:
            os.makedirs(dir_name, exist_ok=True)

    def append(self, event: CheckEvent) -> CheckEvent:
        self.events.append(event)
        with open(self.path, "a", encoding="utf-8") as f:
            f.write(json.dumps(event.to_dict(), ensure_ascii=False, default=str) + "\n")
        return event

    def record(self, subcommand: str, check: str, passed: bool, **kwargs) -> CheckEvent:
        return self.append(build_event(subcommand, check, passed, **kwargs))

    @property
    def all_passed(self) -> bool:
        return all(event.passed for event in self.events)

    def failed(self) -> List[str]:
        return [event.check for event in self.events if not event.passed]

    def read_all(self) -> List[CheckEvent]:
        """Read every event on disk (for diagnostics / tests)."""
        if not os.path.exists(self.path):
            return []
        events: List[CheckEvent] = []
        with open(self.path, "r", encoding="utf-8") as f:
            for line in f:
                line = line.strip()
                if line:
                    d = json.loads(line)
                    for key in ("value", "tolerance"):
                        if isinstance(d.get(key), str):
                            d[key] = float(d[key])
                    events.append(CheckEvent(**d))
        return events
