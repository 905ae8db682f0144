"""Brute-force optimal makespan by breadth-first search over joint configurations."""
from __future__ import annotations

import itertools
import time

from .graph import Execution, Instance, is_connected
from .results import SearchResult, Stats, Status

STATE_BUDGET = 10_000_000


class OracleBudgetError(RuntimeError):
    """The joint configuration space is too large to enumerate."""


def oracle_solve(instance: Instance, max_steps: int | None = None,
                 budget: int = STATE_BUDGET) -> SearchResult:
    """Exact minimum-makespan connected execution.

    Every simultaneous move of all agents (idling included) is explored layer
    by layer; disconnected configurations are never enqueued.  Returns
    EXHAUSTED when the goal is unreachable (within ``max_steps`` moves, if
    given).  Refuses with :class:`OracleBudgetError` when ``|V|**k`` exceeds
    ``budget``.
    """
    instance.validate()
    g = instance.graph
    k = instance.agent_count
    if g.vertex_count ** k > budget:
        raise OracleBudgetError(f"|V|^k = {g.vertex_count}^{k} exceeds the budget of {budget} states")
    t0 = time.perf_counter()
    stats = Stats()
    start, goal = instance.start, instance.goal
    parent = {start: None}
    layer = [start]
    depth = 0
    found = start == goal
    while layer and not found and (max_steps is None or depth < max_steps):
        nxt = []
        for conf in layer:
            stats.nodes_expanded += 1
            for succ in itertools.product(*(g.movement[v] for v in conf)):
                if succ in parent or not is_connected(g, succ):
                    continue
                parent[succ] = conf
                stats.nodes_generated += 1
                nxt.append(succ)
                if succ == goal:
                    found = True
                    break
            if found:
                break
        layer = nxt
        depth += 1
    stats.wall_ms = (time.perf_counter() - t0) * 1000.0
    if not found:
        return SearchResult(Status.EXHAUSTED, stats=stats)
    confs = [goal]
    while parent[confs[-1]] is not None:
        confs.append(parent[confs[-1]])
    confs.reverse()
    return SearchResult(Status.SOLVED, Execution(tuple(zip(*confs))), stats)
