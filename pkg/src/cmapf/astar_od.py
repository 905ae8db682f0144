"""A* over joint configurations with operator decomposition.

Agents commit their moves one at a time, so an expansion branches on a single
agent's neighbourhood.  Only full configurations (every agent has moved) are
checked for connectivity.  The heuristic is the largest single-agent BFS
distance to goal, which never overestimates the remaining makespan.
"""
from __future__ import annotations

import heapq
import time

from .graph import Execution, Instance, is_connected
from .lowlevel import DistanceTable
from .results import LimitExceeded, SearchResult, Stats, Status


def _heuristic(dists, positions, mover, g):
    """Lower bound on the total makespan for a state at depth ``g`` where the
    first ``mover`` agents already stand at their step ``g + 1`` positions."""
    f = g if mover == 0 else g + 1
    for a, v in enumerate(positions):
        d = dists[a][v]
        f = max(f, g + 1 + d if a < mover else g + d)
    return f


def astar_od_solve(instance: Instance, node_limit: int | None = None,
                   time_limit: float | None = None) -> SearchResult:
    instance.validate()
    graph = instance.graph
    k = instance.agent_count
    t0 = time.perf_counter()
    deadline = None if time_limit is None else t0 + time_limit
    stats = Stats()
    table = DistanceTable(graph)
    dists = [table.to(v) for v in instance.goal]
    start, goal = instance.start, instance.goal

    def done(status, conf=None, parents=None):
        stats.wall_ms = (time.perf_counter() - t0) * 1000.0
        if conf is None:
            return SearchResult(status, stats=stats)
        confs = [conf]
        while parents[confs[-1]] is not None:
            confs.append(parents[confs[-1]])
        confs.reverse()
        return SearchResult(status, Execution(tuple(zip(*confs))), stats)

    if start == goal:
        return done(Status.SOLVED, start, {start: None})
    if any(dists[a][start[a]] == float("inf") for a in range(k)):
        return done(Status.EXHAUSTED)

    # full-state bookkeeping: best depth and predecessor full configuration
    best_full = {start: 0}
    full_parent = {start: None}
    # intermediate states keyed by (positions, mover): best depth
    best_mid: dict = {}
    # heap entries: (f, -g, -mover, ordinal, positions, mover, g, prev_full)
    heap = [(_heuristic(dists, start, 0, 0), 0, 0, 0, start, 0, 0, None)]
    ordinal = 0
    try:
        while heap:
            if deadline is not None and time.perf_counter() > deadline:
                raise LimitExceeded
            f, _, _, _, pos, mover, g, prev = heapq.heappop(heap)
            if mover == 0:
                if best_full.get(pos, g) < g:
                    continue
                if pos == goal:
                    return done(Status.SOLVED, pos, full_parent)
                prev = pos
            elif best_mid.get((pos, mover), g) < g:
                continue
            stats.nodes_expanded += 1
            nm = mover + 1
            for w in graph.movement[pos[mover]]:
                npos = pos[:mover] + (w,) + pos[mover + 1:]
                if nm == k:
                    ng = g + 1
                    if not is_connected(graph, npos):
                        continue
                    if best_full.get(npos, ng + 1) <= ng:
                        continue
                    best_full[npos] = ng
                    full_parent[npos] = prev
                    nmover, entry_g = 0, ng
                else:
                    key = (npos, nm)
                    if best_mid.get(key, g + 1) <= g:
                        continue
                    best_mid[key] = g
                    nmover, entry_g = nm, g
                stats.nodes_generated += 1
                if node_limit is not None and stats.nodes_generated >= node_limit:
                    raise LimitExceeded
                ordinal += 1
                nf = _heuristic(dists, npos, nmover, entry_g)
                heapq.heappush(heap, (nf, -entry_g, -nmover, ordinal, npos, nmover, entry_g, prev))
    except LimitExceeded:
        return done(Status.LIMIT)
    return done(Status.EXHAUSTED)
