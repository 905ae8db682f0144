"""Plain-text graph, instance and solution files.

Graph::

    cmapf-graph v1
    vertices 7
    base 0
    grid 32 32          # optional: height width of the source map
    coord 0 0 0         # optional: vertex row col
    mvt 1 2
    comm 0 4

Movement self-loops are implied and never listed.  Instance::

    cmapf-instance v1
    graph fig1.graph    # path relative to the instance file, or "inline"
    agents 2
    start 1 4
    goal 3 6

With ``graph inline`` the graph lines follow up to a line ``end``.
Solution::

    cmapf-solution v1
    status solved
    agents 2
    path 1 2 3 3
    path 4 4 5 6
    cost 3
    stats nodes_generated=5 nodes_expanded=1 lowlevel_calls=10 wall_ms=0.4

All ids and time steps are 0-based.  ``#`` starts a comment.
"""
from __future__ import annotations

import os
from dataclasses import dataclass, field

from .graph import Execution, Instance, TopologicalGraph
from .results import SearchResult, Status

GRAPH_HEADER = "cmapf-graph v1"
INSTANCE_HEADER = "cmapf-instance v1"
SOLUTION_HEADER = "cmapf-solution v1"


class FormatError(ValueError):
    def __init__(self, message: str, line: int | None = None, source: str | None = None):
        self.line = line
        where = ""
        if source:
            where += f"{source}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}".strip())


def _lines(text):
    for i, raw in enumerate(text.splitlines(), 1):
        s = raw.split("#", 1)[0].strip()
        if s:
            yield i, s.split()


def _ints(parts, lineno, source, count=None):
    try:
        vals = [int(x) for x in parts]
    except ValueError:
        raise FormatError(f"expected integers, got {' '.join(parts)!r}", lineno, source) from None
    if count is not None and len(vals) != count:
        raise FormatError(f"expected {count} integers, got {len(vals)}", lineno, source)
    return vals


def _expect_header(lines, header, source):
    try:
        lineno, parts = next(lines)
    except StopIteration:
        raise FormatError(f"empty file, expected {header!r}", 1, source) from None
    if " ".join(parts) != header:
        raise FormatError(f"expected header {header!r}", lineno, source)


def _parse_graph_lines(lines, source, stop_at_end=False) -> TopologicalGraph:
    n = base = None
    mvt, comm, coords, grid = [], [], {}, None
    for lineno, parts in lines:
        key, args = parts[0], parts[1:]
        if key == "end" and stop_at_end:
            break
        if key == "vertices":
            (n,) = _ints(args, lineno, source, 1)
        elif key == "base":
            (base,) = _ints(args, lineno, source, 1)
        elif key == "grid":
            grid = tuple(_ints(args, lineno, source, 2))
        elif key == "coord":
            v, r, c = _ints(args, lineno, source, 3)
            coords[v] = (r, c)
        elif key in ("mvt", "comm"):
            u, v = _ints(args, lineno, source, 2)
            if n is not None and not (0 <= u < n and 0 <= v < n):
                raise FormatError(f"edge ({u}, {v}) references an unknown vertex", lineno, source)
            (mvt if key == "mvt" else comm).append((u, v))
        else:
            raise FormatError(f"unknown graph directive {key!r}", lineno, source)
    if n is None or base is None:
        raise FormatError("graph needs 'vertices' and 'base' lines", None, source)
    if coords and len(coords) != n:
        raise FormatError(f"coord lines cover {len(coords)} of {n} vertices", None, source)
    try:
        return TopologicalGraph.from_edges(
            n, base, mvt, comm,
            coords=[coords[v] for v in range(n)] if coords else None,
            grid_shape=grid)
    except (ValueError, KeyError) as exc:
        raise FormatError(str(exc), None, source) from None


def parse_graph(text: str, source: str | None = None) -> TopologicalGraph:
    lines = _lines(text)
    _expect_header(lines, GRAPH_HEADER, source)
    return _parse_graph_lines(lines, source)


def format_graph(graph: TopologicalGraph) -> str:
    out = [GRAPH_HEADER, f"vertices {graph.vertex_count}", f"base {graph.base}"]
    if graph.grid_shape is not None:
        out.append("grid %d %d" % graph.grid_shape)
    if graph.coords is not None:
        out += [f"coord {v} {r} {c}" for v, (r, c) in enumerate(graph.coords)]
    out += [f"mvt {u} {v}" for u, v in graph.movement_edges()]
    out += [f"comm {u} {v}" for u, v in graph.comm_edges()]
    return "\n".join(out) + "\n"


def parse_instance(text: str, source: str | None = None, base_dir: str | None = None) -> Instance:
    lines = _lines(text)
    _expect_header(lines, INSTANCE_HEADER, source)
    graph = k = start = goal = None
    for lineno, parts in lines:
        key, args = parts[0], parts[1:]
        if key == "graph":
            if len(args) != 1:
                raise FormatError("expected 'graph <path>' or 'graph inline'", lineno, source)
            if args[0] == "inline":
                graph = _parse_graph_lines(lines, source, stop_at_end=True)
            else:
                path = args[0]
                if base_dir and not os.path.isabs(path):
                    path = os.path.join(base_dir, path)
                try:
                    graph = read_graph(path)
                except OSError as exc:
                    raise FormatError(f"cannot read graph file: {exc}", lineno, source) from None
        elif key == "agents":
            (k,) = _ints(args, lineno, source, 1)
        elif key == "start":
            start = _ints(args, lineno, source, k)
        elif key == "goal":
            goal = _ints(args, lineno, source, k)
        else:
            raise FormatError(f"unknown instance directive {key!r}", lineno, source)
    if graph is None or k is None or start is None or goal is None:
        raise FormatError("instance needs 'graph', 'agents', 'start' and 'goal'", None, source)
    return Instance(graph, tuple(start), tuple(goal))


def format_instance(instance: Instance, graph_path: str | None = None) -> str:
    out = [INSTANCE_HEADER]
    if graph_path is None:
        out.append("graph inline")
        out += format_graph(instance.graph).splitlines()[1:]
        out.append("end")
    else:
        out.append(f"graph {graph_path}")
    out.append(f"agents {instance.agent_count}")
    out.append("start " + " ".join(map(str, instance.start)))
    out.append("goal " + " ".join(map(str, instance.goal)))
    return "\n".join(out) + "\n"


@dataclass
class SolutionFile:
    status: Status
    paths: list[list[int]] = field(default_factory=list)
    cost: int | None = None
    stats: dict = field(default_factory=dict)

    @property
    def execution(self) -> Execution | None:
        return Execution(tuple(tuple(p) for p in self.paths)) if self.paths else None


def format_solution(result: SearchResult) -> str:
    out = [SOLUTION_HEADER, f"status {result.status.value}"]
    if result.execution is not None:
        out.append(f"agents {result.execution.agent_count}")
        out += ["path " + " ".join(map(str, p)) for p in result.execution.paths]
        out.append(f"cost {result.cost}")
    st = result.stats.as_dict()
    out.append("stats " + " ".join(f"{k}={round(v, 3) if isinstance(v, float) else v}" for k, v in st.items()))
    return "\n".join(out) + "\n"


def parse_solution(text: str, source: str | None = None) -> SolutionFile:
    lines = _lines(text)
    _expect_header(lines, SOLUTION_HEADER, source)
    sol = SolutionFile(Status.EXHAUSTED)
    k = None
    for lineno, parts in lines:
        key, args = parts[0], parts[1:]
        if key == "status":
            try:
                sol.status = Status(args[0])
            except (ValueError, IndexError):
                raise FormatError(f"unknown status {' '.join(args)!r}", lineno, source) from None
        elif key == "agents":
            (k,) = _ints(args, lineno, source, 1)
        elif key == "path":
            sol.paths.append(_ints(args, lineno, source))
        elif key == "cost":
            (sol.cost,) = _ints(args, lineno, source, 1)
        elif key == "stats":
            for item in args:
                name, _, val = item.partition("=")
                sol.stats[name] = float(val) if "." in val else int(val)
        else:
            raise FormatError(f"unknown solution directive {key!r}", lineno, source)
    if k is not None and len(sol.paths) != k:
        raise FormatError(f"'agents {k}' but {len(sol.paths)} path lines", None, source)
    return sol


def _read(path):
    with open(path) as fh:
        return fh.read()


def read_graph(path) -> TopologicalGraph:
    return parse_graph(_read(path), str(path))


def read_instance(path) -> Instance:
    return parse_instance(_read(path), str(path), os.path.dirname(os.path.abspath(path)))


def read_solution(path) -> SolutionFile:
    return parse_solution(_read(path), str(path))


def write_text(path, text: str) -> None:
    with open(path, "w") as fh:
        fh.write(text)
