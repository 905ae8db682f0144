"""Connectivity-conflict-based search.

The high level is a best-first search over a constraint tree.  A conflict is a
time step whose configuration is disconnected from the base; it is split with
up to three strategies:

* ``neg``   forbid each agent its current vertex at that step,
* ``self``  pin the disconnected agent next to another agent or the base,
* ``other`` pin another agent next to the disconnected one.

Only strategy sets containing ``neg`` are complete and optimal.
"""
from __future__ import annotations

import heapq
import time
from dataclasses import dataclass, field, replace
from typing import Callable, Iterable, NamedTuple

from .graph import Execution, Instance, Path, disconnected_agents
from .lowlevel import Constraint, ConstraintConflict, ConstraintSet, LowLevel
from .results import LimitExceeded, SearchResult, Stats, Status

STRATEGIES = ("neg", "self", "other")

VARIANTS = {
    "ccbs-nso": ("neg", "self", "other"),
    "ccbs-n": ("neg",),
    "ccbs-so": ("self", "other"),
    "ccbs-s": ("self",),
}


@dataclass(frozen=True)
class SolverConfig:
    strategies: frozenset = frozenset(STRATEGIES)
    bypass: bool = True
    partial_splitting: bool = False
    node_limit: int | None = None
    time_limit: float | None = None  # seconds of wall clock
    detect_duplicates: bool = True
    check_invariants: bool = False

    def __post_init__(self):
        s = frozenset(x.strip().lower() for x in self.strategies)
        if not s:
            raise ValueError("at least one strategy is required")
        unknown = s - set(STRATEGIES)
        if unknown:
            raise ValueError(f"unknown strategies: {sorted(unknown)}")
        object.__setattr__(self, "strategies", s)

    @classmethod
    def variant(cls, name: str, **kw) -> "SolverConfig":
        """Named variant such as ``ccbs-nso`` or ``ccbs-n``; a ``+ps``
        suffix turns on partial and selective splitting."""
        name = name.lower()
        if name.endswith("+ps"):
            name = name[:-3]
            kw.setdefault("partial_splitting", True)
        if name not in VARIANTS:
            raise ValueError(f"unknown CCBS variant {name!r}")
        return cls(strategies=frozenset(VARIANTS[name]), **kw)

    def with_limits(self, node_limit=None, time_limit=None) -> "SolverConfig":
        return replace(self, node_limit=node_limit, time_limit=time_limit)


class Conflict(NamedTuple):
    time: int
    disconnected_agents: tuple[int, ...]


def detect_conflict(graph, execution: Execution) -> Conflict | None:
    """Earliest disconnected step together with every agent outside the
    base's communication component."""
    for t in range(execution.length):
        lost = disconnected_agents(graph, execution[t])
        if lost:
            return Conflict(t, tuple(lost))
    return None


@dataclass(eq=False)
class CTNode:
    constraints: ConstraintSet
    paths: list[Path]
    cost: int = 0
    conflict_count: int = 0
    conflict: Conflict | None = None
    parent: "CTNode | None" = None
    ordinal: int = 0
    depth: int = 0
    # partial splitting: (conflict, positions at the conflict step, deferred agents)
    resume: tuple | None = field(default=None, repr=False)

    def position(self, agent: int, t: int) -> int:
        p = self.paths[agent]
        return p[t] if t < len(p) else p[-1]

    def configuration(self, t: int) -> tuple[int, ...]:
        return tuple(self.position(a, t) for a in range(len(self.paths)))

    @property
    def execution(self) -> Execution:
        return Execution.from_paths(self.paths)

    def branch(self) -> list["CTNode"]:
        out, n = [], self
        while n is not None:
            out.append(n)
            n = n.parent
        return out[::-1]


class _Bypass(Exception):
    pass


_UNPLANNED = object()


class CCBS:
    """One solver run.  ``observer``, when given, is called as
    ``observer(node, open_nodes)`` each time a node is popped from OPEN."""

    def __init__(self, instance: Instance, config: SolverConfig | None = None,
                 observer: Callable[[CTNode, list[CTNode]], None] | None = None,
                 lowlevel: LowLevel | None = None):
        instance.validate()
        self.instance = instance
        self.graph = instance.graph
        self.config = config or SolverConfig()
        self.observer = observer
        self.lowlevel = lowlevel or LowLevel(self.graph)
        self.k = instance.agent_count
        self.stats = Stats()
        self._open: list = []
        self._ordinal = 0
        self._deadline = None
        self._seen_sets: set = set()
        self._lost_cache: dict = {}

    # -- node bookkeeping ----------------------------------------------------

    def _lost(self, conf: tuple) -> tuple:
        lost = self._lost_cache.get(conf)
        if lost is None:
            lost = tuple(disconnected_agents(self.graph, conf))
            if len(self._lost_cache) > 500_000:
                self._lost_cache.clear()
            self._lost_cache[conf] = lost
        return lost

    def _evaluate(self, node: CTNode) -> None:
        length = max(len(p) for p in node.paths)
        node.cost = length - 1
        padded = [p if len(p) == length else tuple(p) + (p[-1],) * (length - len(p))
                  for p in node.paths]
        first, count = None, 0
        for t, conf in enumerate(zip(*padded)):
            lost = self._lost(conf)
            if lost:
                count += 1
                if first is None:
                    first = Conflict(t, lost)
        node.conflict, node.conflict_count = first, count

    def _make_node(self, constraints, paths, parent) -> CTNode:
        self._ordinal += 1
        node = CTNode(constraints, paths, parent=parent, ordinal=self._ordinal,
                      depth=0 if parent is None else parent.depth + 1)
        self._evaluate(node)
        self.stats.nodes_generated += 1
        if self.config.check_invariants:
            assert node.constraints.allows(node.paths), "execution violates node constraints"
            if parent is not None:
                assert node.cost >= parent.cost, "cost decreased along a branch"
        return node

    def _push(self, node: CTNode, key_cost: int | None = None) -> None:
        self._ordinal += 1
        cost = node.cost if key_cost is None else key_cost
        heapq.heappush(self._open, (cost, node.conflict_count, self._ordinal, node))

    def _check_limits(self) -> None:
        lim = self.config.node_limit
        if lim is not None and self.stats.nodes_generated >= lim:
            raise LimitExceeded("node limit")
        if self._deadline is not None and time.perf_counter() > self._deadline:
            raise LimitExceeded("time limit")

    def open_nodes(self) -> list[CTNode]:
        return [e[3] for e in self._open]

    # -- children --------------------------------------------------------------

    def _replan(self, node: CTNode, c: Constraint):
        """Constraint set and path of ``c.agent`` in the child, or None."""
        if c in node.constraints:
            return None
        try:
            cs = node.constraints.add(c)
        except ConstraintConflict:
            return None
        if self.config.detect_duplicates and cs.key() in self._seen_sets:
            return None
        self._check_limits()
        a = c.agent
        path = self.lowlevel(self.instance.start[a], self.instance.goal[a], cs.for_agent(a))
        self.stats.lowlevel_calls = self.lowlevel.calls
        if path is None:
            return None
        return cs, path

    def create_child(self, node: CTNode, c: Constraint, bypass: bool = False,
                     planned=_UNPLANNED, registered: list | None = None) -> CTNode | None:
        """Child of ``node`` with ``c`` added; raises ``_Bypass`` after the
        parent adopted the child's path.  Constraint-set keys marked as seen
        are appended to ``registered``."""
        if planned is _UNPLANNED:
            planned = self._replan(node, c)
        if planned is None:
            return None
        cs, path = planned
        if self.config.detect_duplicates:
            key = cs.key()
            if key in self._seen_sets:
                return None
            self._seen_sets.add(key)
            if registered is not None:
                registered.append(key)
        paths = list(node.paths)
        paths[c.agent] = path
        child = self._make_node(cs, paths, node)
        if bypass and child.cost == node.cost and child.conflict_count < node.conflict_count:
            node.paths = paths
            self._evaluate(node)
            raise _Bypass
        return child

    def self_constraints(self, conflict_time: int, agent: int, config) -> list[Constraint]:
        g = self.graph
        here = config[agent]
        out, seen = [], set()
        anchors = [config[b] for b in range(self.k) if b != agent] + [g.base]
        for anchor in anchors:
            for v in sorted(g.comm[anchor]):
                if v != here and v not in seen:
                    seen.add(v)
                    out.append(Constraint(agent, v, conflict_time, True))
        return out

    def other_constraints(self, conflict_time: int, agent: int, config, agents=None) -> list[Constraint]:
        near = sorted(self.graph.comm[config[agent]])
        out = []
        for b in range(self.k) if agents is None else sorted(agents):
            if b == agent:
                continue
            out.extend(Constraint(b, v, conflict_time, True) for v in near if v != config[b])
        return out

    def neg_constraints(self, conflict_time: int, config) -> list[Constraint]:
        return [Constraint(b, config[b], conflict_time, False) for b in range(self.k)]

    def _generate(self, node: CTNode, constraints: Iterable[Constraint], children: list,
                  state: dict, planned: dict | None = None) -> None:
        for c in constraints:
            if c in state["seen"]:
                continue
            state["seen"].add(c)
            try:
                child = self.create_child(node, c, bypass=state["bypass_on"],
                                          planned=(planned or {}).get(c, _UNPLANNED),
                                          registered=state["keys"])
            except _Bypass:
                state["bypassed"] = True
                continue
            if child is not None:
                children.append(child)

    def expand(self, node: CTNode) -> list[CTNode]:
        """Split ``node`` on its first conflict; returns the children to insert
        (empty when the bypass fired, in which case the node is re-queued)."""
        cfg = self.config
        strat = cfg.strategies
        if node.resume is not None:
            (t, a), config, deferred = node.resume
            node.resume = None
            children = []
            state = {"seen": set(), "bypass_on": False, "bypassed": False, "keys": []}
            if "self" in strat and a in deferred:
                self._generate(node, self.self_constraints(t, a, config), children, state)
            if "other" in strat:
                self._generate(node, self.other_constraints(t, a, config, deferred), children, state)
            return children

        t, lost = node.conflict
        a = lost[0]
        config = node.configuration(t)
        state = {"seen": set(), "bypass_on": cfg.bypass, "bypassed": False, "keys": []}
        children: list[CTNode] = []
        deferred: set[int] = set()
        dropped: set[int] = set()
        planned = {}
        partial = cfg.partial_splitting and "neg" in strat
        if partial:
            for c in self.neg_constraints(t, config):
                p = self._replan(node, c)
                planned[c] = p
                if p is None:
                    # every positive child for this agent implies the negative one
                    dropped.add(c.agent)
                elif len(p[1]) - 1 > node.cost:
                    # the Neg child already exceeds the makespan, so every positive
                    # child for this agent costs at least node.cost + 1
                    deferred.add(c.agent)
        skip = deferred | dropped
        if "self" in strat and a not in skip:
            self._generate(node, self.self_constraints(t, a, config), children, state)
        if "other" in strat:
            others = [b for b in range(self.k) if b not in skip]
            self._generate(node, self.other_constraints(t, a, config, others), children, state)
        if "neg" in strat:
            self._generate(node, self.neg_constraints(t, config), children, state,
                           planned=planned)
        if state["bypassed"]:
            # the discarded children may be needed again when the parent is re-split
            self._seen_sets.difference_update(state["keys"])
            self._push(node)
            return []
        if deferred and (("self" in strat and a in deferred) or ("other" in strat and deferred - {a})):
            node.resume = ((t, a), config, frozenset(deferred))
            self._push(node, key_cost=node.cost + 1)
        return children

    # -- main loop -------------------------------------------------------------

    def solve(self) -> SearchResult:
        t0 = time.perf_counter()
        if self.config.time_limit is not None:
            self._deadline = t0 + self.config.time_limit
        try:
            result = self._search()
        except LimitExceeded:
            result = SearchResult(Status.LIMIT)
        self.stats.lowlevel_calls = self.lowlevel.calls
        self.stats.wall_ms = (time.perf_counter() - t0) * 1000.0
        result.stats = self.stats
        return result

    def _search(self) -> SearchResult:
        inst = self.instance
        paths = []
        for a in range(self.k):
            p = self.lowlevel(inst.start[a], inst.goal[a], ConstraintSet().for_agent(a))
            if p is None:
                return SearchResult(Status.EXHAUSTED)
            paths.append(p)
        self.stats.lowlevel_calls = self.lowlevel.calls
        self._push(self._make_node(ConstraintSet(), paths, None))
        while self._open:
            self._check_limits()
            *_, node = heapq.heappop(self._open)
            if self.observer is not None:
                self.observer(node, self.open_nodes())
            if node.conflict is None and node.resume is None:
                return SearchResult(Status.SOLVED, node.execution)
            self.stats.nodes_expanded += 1
            for child in self.expand(node):
                self._push(child)
        return SearchResult(Status.EXHAUSTED)


def solve(instance: Instance, config: SolverConfig | str | None = None, **kw) -> SearchResult:
    """Run CCBS on ``instance``.  ``config`` may be a :class:`SolverConfig` or a
    variant name (``ccbs-nso``, ``ccbs-n``, ``ccbs-so``, ``ccbs-s``, optionally
    suffixed ``+ps``); extra keywords override config fields."""
    if config is None:
        config = SolverConfig(**kw)
    elif isinstance(config, str):
        config = SolverConfig.variant(config, **kw)
    elif kw:
        config = replace(config, **kw)
    return CCBS(instance, config).solve()
