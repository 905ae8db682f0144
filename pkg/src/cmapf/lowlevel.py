"""Single-agent shortest paths under vertex-time constraints.

Positive constraints are exact-time landmarks: the path is assembled segment
by segment between them, each segment searched in time-expanded space while
avoiding negative constraints.  After the last landmark the search is
unbounded in principle, but once every negative constraint lies in the past
the remaining route is a plain shortest path, so the time-expanded part is
finite and infeasibility is detected exactly.
"""
from __future__ import annotations

import heapq
import threading
from collections import deque
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .graph import Path, TopologicalGraph

INF = float("inf")


class Constraint(NamedTuple):
    """Agent ``agent`` must (``positive``) or must not be at ``vertex`` at step ``time``."""

    agent: int
    vertex: int
    time: int
    positive: bool

    def __str__(self):
        return f"<{self.agent}, {self.vertex}, {self.time}, {'+' if self.positive else '-'}>"


class ConstraintConflict(ValueError):
    """Raised when a constraint contradicts the set it is added to."""


class AgentConstraints:
    """Constraints of one agent: landmarks by time and forbidden (vertex, time) pairs."""

    __slots__ = ("landmarks", "forbidden", "_max_neg", "_key")

    def __init__(self, landmarks=None, forbidden=None, max_neg=None):
        self.landmarks: dict[int, int] = landmarks or {}
        self.forbidden: frozenset = forbidden or frozenset()
        if max_neg is None:
            max_neg = max((t for _, t in self.forbidden), default=-1)
        self._max_neg = max_neg
        self._key = None

    def key(self):
        if self._key is None:
            self._key = (frozenset(self.landmarks.items()), self.forbidden)
        return self._key

    @property
    def max_negative_time(self) -> int:
        return self._max_neg

    def __len__(self):
        return len(self.landmarks) + len(self.forbidden)

    def __iter__(self):
        return iter(self.constraints(-1))

    def constraints(self, agent: int) -> list[Constraint]:
        out = [Constraint(agent, v, t, True) for t, v in self.landmarks.items()]
        out += [Constraint(agent, v, t, False) for v, t in self.forbidden]
        return sorted(out, key=lambda c: (c.time, c.vertex, not c.positive))

    def contains(self, c: Constraint) -> bool:
        if c.positive:
            return self.landmarks.get(c.time) == c.vertex
        return (c.vertex, c.time) in self.forbidden

    def add(self, c: Constraint) -> "AgentConstraints":
        if c.time < 1:
            raise ConstraintConflict(f"constraint {c} applies to the fixed start step")
        if c.positive:
            cur = self.landmarks.get(c.time)
            if cur is not None and cur != c.vertex:
                raise ConstraintConflict(f"agent already pinned to {cur} at step {c.time}")
            if (c.vertex, c.time) in self.forbidden:
                raise ConstraintConflict(f"{c} contradicts a negative constraint")
            lm = dict(self.landmarks)
            lm[c.time] = c.vertex
            return AgentConstraints(lm, self.forbidden, self._max_neg)
        if self.landmarks.get(c.time) == c.vertex:
            raise ConstraintConflict(f"{c} contradicts a positive constraint")
        return AgentConstraints(self.landmarks, self.forbidden | {(c.vertex, c.time)},
                                max(self._max_neg, c.time))

    def allows(self, path: Sequence[int]) -> bool:
        """Independent check of ``path`` (idling at its end afterwards)."""
        def at(t):
            return path[t] if t < len(path) else path[-1]
        return (all(at(t) == v for t, v in self.landmarks.items())
                and all(at(t) != v for v, t in self.forbidden))


_EMPTY = AgentConstraints()


class ConstraintSet:
    """Immutable per-agent constraint collection; :meth:`add` returns a new set."""

    __slots__ = ("_by_agent", "_key")

    def __init__(self, by_agent: dict[int, AgentConstraints] | None = None, key=frozenset()):
        self._by_agent = by_agent or {}
        self._key = key

    def key(self) -> frozenset:
        """Hashable identity of the set (order of insertion is irrelevant)."""
        return self._key

    @classmethod
    def of(cls, constraints: Iterable[Constraint]) -> "ConstraintSet":
        cs = cls()
        for c in constraints:
            cs = cs.add(c)
        return cs

    def for_agent(self, agent: int) -> AgentConstraints:
        return self._by_agent.get(agent, _EMPTY)

    def __contains__(self, c: Constraint) -> bool:
        return self.for_agent(c.agent).contains(c)

    def add(self, c: Constraint) -> "ConstraintSet":
        d = dict(self._by_agent)
        d[c.agent] = self.for_agent(c.agent).add(c)
        return ConstraintSet(d, self._key | {c})

    def __iter__(self):
        for a in sorted(self._by_agent):
            yield from self._by_agent[a].constraints(a)

    def __len__(self):
        return sum(len(ac) for ac in self._by_agent.values())

    def allows(self, paths: Sequence[Sequence[int]]) -> bool:
        return all(self.for_agent(a).allows(p) for a, p in enumerate(paths))


class DistanceTable:
    """Cached BFS movement distances towards target vertices.

    Tables are built once per target and shared between searches; the lock
    guards only the cache dictionary.
    """

    def __init__(self, graph: TopologicalGraph):
        self.graph = graph
        self._cache: dict[int, list] = {}
        self._lock = threading.Lock()

    def to(self, target: int) -> list:
        d = self._cache.get(target)
        if d is None:
            d = bfs_distances(self.graph, target)
            with self._lock:
                self._cache[target] = d
        return d


def bfs_distances(graph: TopologicalGraph, target: int) -> list:
    dist = [INF] * graph.vertex_count
    dist[target] = 0
    q = deque([target])
    mv = graph.movement
    while q:
        u = q.popleft()
        du = dist[u] + 1
        for w in mv[u]:
            if dist[w] == INF:
                dist[w] = du
                q.append(w)
    return dist


def _descend(graph: TopologicalGraph, dist: list, v: int) -> list[int]:
    """Shortest route from ``v`` to the target of ``dist`` (excluding ``v``),
    picking the lowest vertex id at every step."""
    out = []
    while dist[v] > 0:
        d = dist[v] - 1
        v = next(w for w in graph.movement[v] if dist[w] == d)
        out.append(v)
    return out


def _deadline_segment(graph, dist, src, t0, dst, t1, forbidden) -> list[int] | None:
    """Path from ``(src, t0)`` to exactly ``(dst, t1)``; excludes ``src``."""
    mv = graph.movement
    # layered reachability restricted to states that can still make the deadline
    layers = [{src: None}]
    for t in range(t0 + 1, t1 + 1):
        slack = t1 - t
        nxt: dict[int, int] = {}
        for u in sorted(layers[-1]):
            for w in mv[u]:
                if w not in nxt and dist[w] <= slack and (w, t) not in forbidden:
                    nxt[w] = u
        if not nxt:
            return None
        layers.append(nxt)
    if dst not in layers[-1]:
        return None
    out = [dst]
    for layer in reversed(layers[1:]):
        out.append(layer[out[-1]])
    out.reverse()
    return out[1:]


def _final_segment(graph, dist, src, t0, forbidden, horizon, goal_free) -> list[int] | None:
    """Shortest path from ``(src, t0)`` to the goal of ``dist`` honouring
    ``forbidden`` and staying on the goal from arrival on.

    ``horizon`` is the last step carrying a negative constraint; ``goal_free``
    the first step from which the goal may be occupied forever.
    """
    if dist[src] == INF:
        return None
    if t0 >= horizon and (t0 >= goal_free or dist[src] > 0):
        return _descend(graph, dist, src)
    mv = graph.movement

    def h(v, t):
        return max(dist[v], goal_free - t)

    start = (src, t0)
    parent = {start: None}
    heap = [(t0 + h(src, t0), t0, src)]
    closed = set()
    while heap:
        f, t, v = heapq.heappop(heap)
        if (v, t) in closed:
            continue
        closed.add((v, t))
        if t >= horizon or (dist[v] == 0 and t >= goal_free):
            tail = _descend(graph, dist, v)
            seq = []
            s = (v, t)
            while s is not None:
                seq.append(s[0])
                s = parent[s]
            seq.reverse()
            return seq[1:] + tail
        nt = t + 1
        for w in mv[v]:
            if (w, nt) in forbidden or (w, nt) in parent or dist[w] == INF:
                continue
            parent[(w, nt)] = (v, t)
            heapq.heappush(heap, (nt + h(w, nt), nt, w))
    return None


def constrained_shortest_path(
    graph: TopologicalGraph,
    start: int,
    goal: int,
    constraints: AgentConstraints | Iterable[Constraint] | None = None,
    distances: DistanceTable | None = None,
) -> Path | None:
    """Minimum-length path ``start -> goal`` satisfying ``constraints``.

    The agent is assumed to idle at ``goal`` after the path ends, so negative
    constraints on the goal after arrival lengthen the path.  Returns ``None``
    when no path satisfies the constraints.
    """
    if constraints is None:
        ac = _EMPTY
    elif isinstance(constraints, AgentConstraints):
        ac = constraints
    else:
        ac = _EMPTY
        for c in constraints:
            ac = ac.add(c)
    if distances is None:
        distances = DistanceTable(graph)
    forbidden = ac.forbidden
    goal_dist = distances.to(goal)
    goal_free = 1 + max((tt for v, tt in forbidden if v == goal), default=-1)
    horizon = ac.max_negative_time
    times = sorted(ac.landmarks)
    # trailing landmarks on the goal itself can also be met by idling there
    idle_from = len(times)
    while idle_from > 0 and ac.landmarks[times[idle_from - 1]] == goal:
        idle_from -= 1
    path = [start]
    t = 0
    for i, lt in enumerate(times):
        if i >= idle_from:
            seg = _final_segment(graph, goal_dist, path[-1], t, forbidden, horizon, goal_free)
            if seg is not None and t + len(seg) <= lt:
                return tuple(path + seg)
        lv = ac.landmarks[lt]
        seg = _deadline_segment(graph, distances.to(lv), path[-1], t, lv, lt, forbidden)
        if seg is None:
            return None
        path.extend(seg)
        t = lt
    seg = _final_segment(graph, goal_dist, path[-1], t, forbidden, horizon, goal_free)
    if seg is None:
        return None
    path.extend(seg)
    return tuple(path)


@dataclass
class LowLevel:
    """Low-level solver bound to one graph.

    Distance tables are shared, and results are memoised per (start, goal,
    constraints): the same per-agent constraint set recurs in many tree
    nodes.  ``calls`` counts requests, ``searches`` the ones actually run.
    """

    graph: TopologicalGraph
    distances: DistanceTable | None = None
    calls: int = 0
    searches: int = 0
    memo_size: int = 200_000

    def __post_init__(self):
        if self.distances is None:
            self.distances = DistanceTable(self.graph)
        self._memo: dict = {}

    def __call__(self, start: int, goal: int, constraints: AgentConstraints) -> Path | None:
        self.calls += 1
        key = (start, goal, constraints.key())
        try:
            return self._memo[key]
        except KeyError:
            pass
        self.searches += 1
        path = constrained_shortest_path(self.graph, start, goal, constraints, self.distances)
        if len(self._memo) >= self.memo_size:
            self._memo.clear()
        self._memo[key] = path
        return path
