"""Topological graphs, configurations, executions and connectivity.

A topological graph carries two undirected relations over the same vertex set:
movement edges (every vertex has an implicit idle self-loop) and communication
edges, plus a distinguished base vertex.  Time is 0-based throughout: the start
configuration of an execution sits at index 0.
"""
from __future__ import annotations

import numbers
from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Sequence

Configuration = tuple[int, ...]
Path = tuple[int, ...]


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class TopologicalGraph:
    """Immutable topological graph.

    ``movement[v]`` is the sorted tuple of movement neighbours of ``v``
    (always containing ``v`` itself); ``comm[v]`` is the frozenset of
    communication neighbours.  ``coords`` optionally maps vertices to grid
    ``(row, col)`` cells and ``grid_shape`` records ``(height, width)``.
    """

    vertex_count: int
    base: int
    movement: tuple[tuple[int, ...], ...]
    comm: tuple[frozenset, ...]
    coords: tuple[tuple[int, int], ...] | None = None
    grid_shape: tuple[int, int] | None = None
    _conn_cache: dict = field(default_factory=dict, repr=False, compare=False)

    def _fields(self):
        return (self.vertex_count, self.base, self.movement, self.comm, self.coords, self.grid_shape)

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, TopologicalGraph) and self._fields() == other._fields()

    def __hash__(self):
        return hash((self.vertex_count, self.base, self.movement))

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        base: int,
        movement_edges: Iterable[tuple[int, int]],
        comm_edges: Iterable[tuple[int, int]],
        coords: Sequence[tuple[int, int]] | None = None,
        grid_shape: tuple[int, int] | None = None,
    ) -> "TopologicalGraph":
        if vertex_count <= 0:
            raise GraphError("a graph needs at least one vertex")
        if not 0 <= base < vertex_count:
            raise GraphError(f"base {base} is not a vertex")
        mv: list[set[int]] = [{v} for v in range(vertex_count)]
        cm: list[set[int]] = [set() for _ in range(vertex_count)]
        for rel, edges in ((mv, movement_edges), (cm, comm_edges)):
            for u, v in edges:
                if not (0 <= u < vertex_count and 0 <= v < vertex_count):
                    raise GraphError(f"edge ({u}, {v}) references an unknown vertex")
                rel[u].add(v)
                rel[v].add(u)
        if coords is not None:
            coords = tuple((int(r), int(c)) for r, c in coords)
            if len(coords) != vertex_count:
                raise GraphError("coords must list one cell per vertex")
        return cls(
            vertex_count=vertex_count,
            base=base,
            movement=tuple(tuple(sorted(s)) for s in mv),
            comm=tuple(frozenset(s) for s in cm),
            coords=coords,
            grid_shape=grid_shape,
        )

    @property
    def vertices(self) -> range:
        return range(self.vertex_count)

    def movement_edges(self) -> list[tuple[int, int]]:
        """Undirected movement edges ``u < v`` (self-loops omitted)."""
        return [(u, v) for u in self.vertices for v in self.movement[u] if u < v]

    def comm_edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in self.vertices for v in sorted(self.comm[u]) if u <= v]

    def can_move(self, u: int, v: int) -> bool:
        return v in self.movement[u]

    def communicates(self, u: int, v: int) -> bool:
        return v in self.comm[u]

    def valid_vertex(self, v) -> bool:
        return isinstance(v, numbers.Integral) and 0 <= v < self.vertex_count

    def base_component(self, vertex_set: frozenset) -> frozenset:
        """Vertices of ``vertex_set`` reachable from the base through
        communication edges inside the subgraph induced by ``vertex_set | {B}``."""
        cached = self._conn_cache.get(vertex_set)
        if cached is not None:
            return cached
        seen = {self.base}
        todo = [self.base]
        rest = set(vertex_set)
        rest.discard(self.base)
        while todo and rest:
            u = todo.pop()
            reach = rest & self.comm[u]
            if reach:
                rest -= reach
                seen |= reach
                todo.extend(reach)
        comp = frozenset(seen)
        if len(self._conn_cache) > 200_000:
            self._conn_cache.clear()
        self._conn_cache[vertex_set] = comp
        return comp


def disconnected_agents(graph: TopologicalGraph, config: Sequence[int]) -> list[int]:
    """Agents whose vertex lies outside the base's communication component."""
    comp = graph.base_component(frozenset(config))
    return [a for a, v in enumerate(config) if v not in comp]


def is_connected(graph: TopologicalGraph, config: Sequence[int]) -> bool:
    """True iff ``{B} ∪ config`` induces a connected communication subgraph.

    Agents sharing a vertex count once; an isolated shared vertex other than
    the base is still disconnected.
    """
    vs = frozenset(config)
    return vs <= graph.base_component(vs)


@dataclass(frozen=True)
class Execution:
    """``k`` equal-length paths; ``paths[a][t]`` is agent ``a`` at step ``t``."""

    paths: tuple[Path, ...]

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(tuple(int(v) for v in p) for p in self.paths))
        if not self.paths:
            raise ValueError("an execution needs at least one agent")
        n = len(self.paths[0])
        if n == 0 or any(len(p) != n for p in self.paths):
            raise ValueError("all paths of an execution must share the same non-zero length")

    @classmethod
    def from_paths(cls, paths: Sequence[Sequence[int]]) -> "Execution":
        """Pad unequal paths by idling at their last vertex."""
        n = max(len(p) for p in paths)
        return cls(tuple(tuple(p) + (p[-1],) * (n - len(p)) for p in paths))

    @property
    def agent_count(self) -> int:
        return len(self.paths)

    @property
    def length(self) -> int:
        """Number of configurations."""
        return len(self.paths[0])

    @property
    def cost(self) -> int:
        """Makespan in moves (``length - 1``)."""
        return len(self.paths[0]) - 1

    def __getitem__(self, t: int) -> Configuration:
        return tuple(p[t] for p in self.paths)

    def configurations(self) -> list[Configuration]:
        return [self[t] for t in range(self.length)]


def is_connected_execution(graph: TopologicalGraph, execution: Execution) -> bool:
    return all(is_connected(graph, c) for c in execution.configurations())


@dataclass(frozen=True)
class Instance:
    graph: TopologicalGraph
    start: Configuration
    goal: Configuration

    def __post_init__(self):
        object.__setattr__(self, "start", tuple(int(v) for v in self.start))
        object.__setattr__(self, "goal", tuple(int(v) for v in self.goal))

    @property
    def agent_count(self) -> int:
        return len(self.start)

    def check(self) -> list[str]:
        """Problems that make the instance invalid (empty when valid)."""
        errs = []
        if len(self.start) != len(self.goal):
            errs.append(f"start has {len(self.start)} agents but goal has {len(self.goal)}")
        if not self.start:
            errs.append("instance has no agents")
        for name, conf in (("start", self.start), ("goal", self.goal)):
            bad = [v for v in conf if not self.graph.valid_vertex(v)]
            if bad:
                errs.append(f"{name} uses unknown vertices {bad}")
            elif not is_connected(self.graph, conf):
                errs.append(f"{name} configuration is disconnected")
        return errs

    def validate(self) -> None:
        errs = self.check()
        if errs:
            raise ValueError("invalid instance: " + "; ".join(errs))


@dataclass(frozen=True)
class Violation:
    kind: str  # "shape", "endpoint", "move", "disconnected"
    message: str
    time: int | None = None
    agents: tuple[int, ...] = ()


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.ok

    def of_kind(self, kind: str) -> list[Violation]:
        return [v for v in self.violations if v.kind == kind]

    def __str__(self) -> str:
        if self.ok:
            return "valid"
        return "\n".join(v.message for v in self.violations)


def validate_execution(instance: Instance, paths) -> ValidationReport:
    """Check endpoints, moves and per-step connectivity of ``paths``.

    ``paths`` may be an :class:`Execution` or a raw sequence of paths; a
    malformed input produces violations instead of exceptions.
    """
    rep = ValidationReport()
    g = instance.graph
    raw = paths.paths if isinstance(paths, Execution) else paths
    try:
        raw = [list(p) for p in raw]
    except TypeError:
        rep.violations.append(Violation("shape", "execution is not a sequence of paths"))
        return rep
    k = instance.agent_count
    if len(raw) != k:
        rep.violations.append(Violation("shape", f"expected {k} paths, got {len(raw)}"))
        return rep
    lengths = {len(p) for p in raw}
    if 0 in lengths or len(lengths) != 1:
        rep.violations.append(Violation("shape", f"paths must be non-empty and equally long, got lengths {sorted(lengths)}"))
        return rep
    for a, p in enumerate(raw):
        bad = [v for v in p if not g.valid_vertex(v)]
        if bad:
            rep.violations.append(Violation("shape", f"agent {a} visits unknown vertices {bad}", agents=(a,)))
    if rep.violations:
        return rep
    ex = Execution(tuple(tuple(p) for p in raw))
    if ex[0] != instance.start:
        rep.violations.append(Violation("endpoint", f"execution starts at {ex[0]}, expected {instance.start}", time=0))
    if ex[ex.length - 1] != instance.goal:
        rep.violations.append(Violation("endpoint", f"execution ends at {ex[ex.length - 1]}, expected {instance.goal}", time=ex.length - 1))
    for a, p in enumerate(ex.paths):
        for t in range(1, len(p)):
            if not g.can_move(p[t - 1], p[t]):
                rep.violations.append(Violation("move", f"agent {a}: {p[t - 1]} -> {p[t]} at step {t} is not a movement edge", time=t, agents=(a,)))
    for t in range(ex.length):
        lost = disconnected_agents(g, ex[t])
        if lost:
            rep.violations.append(Violation("disconnected", f"step {t}: agents {lost} are disconnected from the base", time=t, agents=tuple(lost)))
    return rep


def first_conflict(graph: TopologicalGraph, execution: Execution) -> tuple[int, list[int]] | None:
    for t in range(execution.length):
        lost = disconnected_agents(graph, execution[t])
        if lost:
            return t, lost
    return None


# -- sight-moveable graphs ---------------------------------------------------

def _sm_distances(graph: TopologicalGraph, target: int) -> dict[int, int]:
    """Movement distances to ``target`` within vertices communicating with it."""
    allowed = graph.comm[target]
    dist = {target: 0}
    q = deque([target])
    while q:
        u = q.popleft()
        for w in graph.movement[u]:
            if w not in dist and w in allowed:
                dist[w] = dist[u] + 1
                q.append(w)
    return dist


def sm_witness_path(graph: TopologicalGraph, v: int, target: int) -> Path | None:
    """Shortest movement path ``v -> target`` whose vertices before ``target``
    all communicate with ``target``; lexicographically smallest among ties."""
    if v == target:
        return (v,)
    if target not in graph.comm[v]:
        return None
    dist = _sm_distances(graph, target)
    if v not in dist:
        return None
    path = [v]
    while path[-1] != target:
        u = path[-1]
        path.append(min(w for w in graph.movement[u] if dist.get(w) == dist[u] - 1))
    return tuple(path)


def sight_moveable_violations(graph: TopologicalGraph) -> list[tuple[int, int]]:
    """All ordered pairs ``(v, v')`` with ``v ⌣ v'`` lacking a witness path."""
    out = []
    for target in graph.vertices:
        if not graph.comm[target]:
            continue
        dist = _sm_distances(graph, target)
        out.extend((v, target) for v in sorted(graph.comm[target]) if v != target and v not in dist)
    return sorted(out)


def is_sight_moveable(graph: TopologicalGraph) -> tuple[bool, tuple[int, int] | None]:
    """Return ``(True, None)`` or ``(False, (v, v'))`` for a violating pair."""
    for target in graph.vertices:
        if not graph.comm[target]:
            continue
        dist = _sm_distances(graph, target)
        for v in sorted(graph.comm[target]):
            if v != target and v not in dist:
                return False, (v, target)
    return True, None


def sm_construct_execution(graph: TopologicalGraph, goal: Sequence[int]) -> Execution:
    """Connected execution from all agents at the base to ``goal``.

    Builds a BFS communication tree over ``{B} ∪ goal`` rooted at the base and
    moves agents in groups along sight-moveable witness paths, one tree edge
    at a time; an agent that reaches its target stays there.  Raises
    ``ValueError`` when the graph is not sight-moveable or ``goal`` is
    disconnected.
    """
    goal = tuple(goal)
    ok, bad = is_sight_moveable(graph)
    if not ok:
        raise ValueError(f"graph is not sight-moveable: no witness path for {bad}")
    if not is_connected(graph, goal):
        raise ValueError("goal configuration is disconnected")
    B = graph.base
    targets = set(goal) | {B}
    parent = {B: None}
    order = [B]
    q = deque([B])
    while q:
        u = q.popleft()
        for w in sorted(graph.comm[u] & targets):
            if w not in parent:
                parent[w] = u
                order.append(w)
                q.append(w)

    children: dict[int, list[int]] = {u: [] for u in order}
    for u in order[1:]:
        children[parent[u]].append(u)

    def subtree(u):
        out, todo = set(), [u]
        while todo:
            x = todo.pop()
            out.add(x)
            todo.extend(children[x])
        return out

    k = len(goal)
    paths = [[B] for _ in range(k)]
    for c in order[1:]:
        p = parent[c]
        below = subtree(c)
        group = [a for a in range(k) if goal[a] in below]
        # reverse of the witness c -> p: every vertex after p communicates with p
        rho = sm_witness_path(graph, c, p)[::-1]
        for step in rho[1:]:
            for a in range(k):
                paths[a].append(step if a in group else paths[a][-1])
    return Execution(tuple(tuple(p) for p in paths))
