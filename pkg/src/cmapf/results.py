from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, field

from .graph import Execution


class Status(str, enum.Enum):
    SOLVED = "solved"
    EXHAUSTED = "exhausted"
    LIMIT = "limit"


@dataclass
class Stats:
    nodes_generated: int = 0
    nodes_expanded: int = 0
    lowlevel_calls: int = 0
    wall_ms: float = 0.0

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass
class SearchResult:
    """Outcome of a solver run.

    ``execution`` and ``cost`` are set only when ``status`` is SOLVED; cost is
    the makespan in moves.
    """

    status: Status
    execution: Execution | None = None
    stats: Stats = field(default_factory=Stats)

    @property
    def solved(self) -> bool:
        return self.status is Status.SOLVED

    @property
    def cost(self) -> int | None:
        return self.execution.cost if self.execution is not None else None


class LimitExceeded(Exception):
    pass
