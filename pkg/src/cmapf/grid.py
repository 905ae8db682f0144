"""Moving-AI grid maps and their discretisation into topological graphs."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .graph import Instance, TopologicalGraph, is_connected

PASSABLE = frozenset(".G")
OBSTACLE = frozenset("@TO")

# range fractions of max(width, height) per benchmark map family
DEFAULT_RANGES = {"coast": 0.25, "maze": 1 / 6, "offices": 0.09, "open": 0.08}


class MapFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True, eq=False)
class GridMap:
    """Row-major grid; ``chars`` keeps the original cell characters."""

    width: int
    height: int
    chars: np.ndarray  # (height, width) array of single characters
    map_type: str = "octile"

    def __post_init__(self):
        if self.chars.shape != (self.height, self.width):
            raise MapFormatError(f"cell array has shape {self.chars.shape}, expected {(self.height, self.width)}")
        if not self.passable.any():
            raise MapFormatError("map has no passable cell")

    @property
    def passable(self) -> np.ndarray:
        return np.isin(self.chars, list(PASSABLE))

    @classmethod
    def from_rows(cls, rows: list[str], map_type: str = "octile") -> "GridMap":
        chars = np.array([list(r) for r in rows], dtype="<U1")
        return cls(len(rows[0]), len(rows), chars, map_type)

    def rows(self) -> list[str]:
        return ["".join(r) for r in self.chars]

    def __eq__(self, other):
        return (isinstance(other, GridMap) and self.map_type == other.map_type
                and np.array_equal(self.chars, other.chars))

    def crop(self, top: int, left: int, height: int, width: int) -> "GridMap":
        return GridMap(width, height, self.chars[top:top + height, left:left + width].copy(), self.map_type)


def parse_map(text: str) -> GridMap:
    """Parse a Moving-AI ``.map`` file (``type``/``height``/``width``/``map``
    header followed by ``height`` rows of ``width`` cells)."""
    lines = text.splitlines()
    header: dict[str, str] = {}
    expected = ("type", "height", "width")
    i = 0
    for key in expected:
        if i >= len(lines):
            raise MapFormatError(f"missing '{key}' header", i + 1)
        parts = lines[i].split()
        if len(parts) != 2 or parts[0] != key:
            raise MapFormatError(f"expected '{key} <value>', got {lines[i]!r}", i + 1)
        header[key] = parts[1]
        i += 1
    try:
        height, width = int(header["height"]), int(header["width"])
    except ValueError:
        raise MapFormatError("height and width must be integers", 2 if not header["height"].isdigit() else 3) from None
    if height <= 0 or width <= 0:
        raise MapFormatError("height and width must be positive", 2 if height <= 0 else 3)
    if i >= len(lines) or lines[i].strip() != "map":
        raise MapFormatError("expected 'map'", i + 1)
    i += 1
    rows = lines[i:i + height]
    if len(rows) < height:
        raise MapFormatError(f"expected {height} rows, found {len(rows)}", i + len(rows) + 1)
    for r, row in enumerate(rows):
        lineno = i + r + 1
        if len(row) != width:
            raise MapFormatError(f"row has {len(row)} cells, expected {width}", lineno)
        for c, ch in enumerate(row):
            if ch not in PASSABLE and ch not in OBSTACLE:
                raise MapFormatError(f"unknown cell character {ch!r} at column {c + 1}", lineno)
    extra = [j for j in range(i + height, len(lines)) if lines[j].strip()]
    if extra:
        raise MapFormatError("unexpected content after the last map row", extra[0] + 1)
    return GridMap.from_rows(rows, header["type"])


def format_map(grid: GridMap) -> str:
    out = [f"type {grid.map_type}", f"height {grid.height}", f"width {grid.width}", "map"]
    return "\n".join(out + grid.rows()) + "\n"


def read_map(path) -> GridMap:
    with open(path) as fh:
        return parse_map(fh.read())


@dataclass(frozen=True)
class CommModel:
    kind: str = "distance"  # "distance" or "los"
    range_fraction: float = 1 / 6

    def __post_init__(self):
        kind = {"line_of_sight": "los"}.get(self.kind, self.kind)
        if kind not in ("distance", "los"):
            raise ValueError(f"unknown communication model {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if kind == "distance" and not 0 < self.range_fraction <= 1:
            raise ValueError("range_fraction must lie in (0, 1]")


def supercover(a: tuple[int, int], b: tuple[int, int]) -> set[tuple[int, int]]:
    """Cells whose closed square meets the segment between the centres of
    cells ``a`` and ``b``.  Exact corner crossings include both side cells,
    so the result does not depend on the segment's direction."""
    (r, c), (r2, c2) = a, b
    dr, dc = r2 - r, c2 - c
    nr, nc = abs(dr), abs(dc)
    sr, sc = (dr > 0) - (dr < 0), (dc > 0) - (dc < 0)
    cells = {(r, c)}
    ir = ic = 0
    while ir < nr or ic < nc:
        # compare the parameters of the next horizontal and vertical crossings
        decision = (1 + 2 * ic) * nr - (1 + 2 * ir) * nc
        if decision == 0:
            cells.add((r + sr, c))
            cells.add((r, c + sc))
            r += sr
            c += sc
            ir += 1
            ic += 1
        elif decision < 0:
            c += sc
            ic += 1
        else:
            r += sr
            ir += 1
        cells.add((r, c))
    return cells


def line_of_sight(passable: np.ndarray, a, b) -> bool:
    return all(passable[cell] for cell in supercover(a, b))


def _movement_edges(passable, index, corner_cutting):
    h, w = passable.shape
    edges = []
    for r in range(h):
        for c in range(w):
            if not passable[r, c]:
                continue
            u = int(index[r, c])
            for dr, dc in ((0, 1), (1, -1), (1, 0), (1, 1)):
                rr, cc = r + dr, c + dc
                if not (0 <= rr < h and 0 <= cc < w) or not passable[rr, cc]:
                    continue
                if dr and dc and not corner_cutting and not (passable[r, cc] and passable[rr, c]):
                    continue
                edges.append((u, int(index[rr, cc])))
    return edges


def discretize(grid: GridMap, comm: CommModel, base_cell: tuple[int, int] | None = None,
               corner_cutting: bool = False) -> TopologicalGraph:
    """One vertex per passable cell (row-major ids), 8-way movement and
    communication per ``comm``.  ``base_cell`` defaults to the first
    passable cell in row-major order."""
    passable = grid.passable
    cells = [tuple(int(x) for x in rc) for rc in np.argwhere(passable)]
    index = -np.ones(passable.shape, dtype=int)
    for i, (r, c) in enumerate(cells):
        index[r, c] = i
    if base_cell is None:
        base_cell = cells[0]
    br, bc = base_cell
    if not (0 <= br < grid.height and 0 <= bc < grid.width) or not passable[br, bc]:
        raise ValueError(f"base cell {base_cell} is not passable")
    mvt = _movement_edges(passable, index, corner_cutting)
    pts = np.asarray(cells, dtype=float)
    if comm.kind == "distance":
        radius = comm.range_fraction * max(grid.width, grid.height)
        pairs = cKDTree(pts).query_pairs(radius + 1e-9, output_type="ndarray")
        comm_edges = [(int(u), int(v)) for u, v in pairs]
    else:
        comm_edges = []
        n = len(cells)
        for u in range(n):
            for v in range(u + 1, n):
                if line_of_sight(passable, cells[u], cells[v]):
                    comm_edges.append((u, v))
    return TopologicalGraph.from_edges(len(cells), int(index[br, bc]), mvt, comm_edges,
                                       coords=cells, grid_shape=(grid.height, grid.width))


class InstanceGenerationError(RuntimeError):
    pass


MAX_REJECTIONS = 1_000_000


def _sample_rejection(graph, k, rng, budget):
    n = graph.vertex_count
    for tries in range(budget):
        conf = tuple(int(v) for v in rng.integers(n, size=k))
        if is_connected(graph, conf):
            return conf, tries
    raise InstanceGenerationError(
        f"no connected configuration of {k} agents after {budget} uniform draws; "
        "use method='grow' for large teams or short ranges")


def _sample_grow(graph, k, rng):
    placed = {graph.base}
    frontier = set(graph.comm[graph.base]) | {graph.base}
    conf = []
    for _ in range(k):
        cand = sorted(frontier)
        v = int(cand[rng.integers(len(cand))])
        conf.append(v)
        if v not in placed:
            placed.add(v)
            frontier |= graph.comm[v]
    return tuple(conf)


def _walk(graph, start, rng, steps):
    """Goal reached by a connected team walk of ``steps`` joint moves from
    ``start`` towards a random connected target configuration."""
    from .lowlevel import DistanceTable

    k = len(start)
    target = _sample_grow(graph, k, rng)
    table = DistanceTable(graph)
    conf = list(start)
    for _ in range(steps):
        for a in rng.permutation(k):
            a = int(a)
            nbrs = graph.movement[conf[a]]
            if rng.random() < 0.8:
                dist = table.to(target[a])
                best = min(dist[w] for w in nbrs)
                nbrs = [w for w in nbrs if dist[w] == best]
            w = int(nbrs[rng.integers(len(nbrs))])
            trial = conf[:a] + [w] + conf[a + 1:]
            if w != conf[a] and is_connected(graph, trial):
                conf = trial
    return tuple(conf)


def generate_instance(graph: TopologicalGraph, k: int, seed: int, method: str = "rejection",
                      max_rejections: int = MAX_REJECTIONS, walk_steps: int = 24) -> Instance:
    """Random instance with connected start and goal, deterministic in ``seed``.

    ``rejection`` draws every agent uniformly and retries until the
    configuration is connected; ``grow`` places agents one by one uniformly
    among vertices communicating with the base or an earlier agent, which
    always succeeds.  ``walk`` grows the start and obtains the goal by a
    random connected walk, so the instance is solvable within ``walk_steps``
    moves.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    rng = np.random.default_rng(seed)
    if method == "rejection":
        start, used = _sample_rejection(graph, k, rng, max_rejections)
        goal, _ = _sample_rejection(graph, k, rng, max_rejections - used)
    elif method == "grow":
        start, goal = _sample_grow(graph, k, rng), _sample_grow(graph, k, rng)
    elif method == "walk":
        start = _sample_grow(graph, k, rng)
        goal = _walk(graph, start, rng, walk_steps)
    else:
        raise ValueError(f"unknown generation method {method!r}")
    return Instance(graph, start, goal)


def maze_map(height: int = 32, width: int = 32, corridor: int = 2, seed: int = 0) -> GridMap:
    """Perfect maze with ``corridor``-wide passages and 1-cell walls, in the
    style of the ``maze-32-32-2`` benchmark."""
    rng = np.random.default_rng(seed)
    step = corridor + 1
    rows_n, cols_n = (height - 1) // step + 1, (width - 1) // step + 1
    chars = np.full((height, width), "@", dtype="<U1")

    def carve(r0, c0, r1, c1):
        chars[max(r0, 0):min(r1, height), max(c0, 0):min(c1, width)] = "."

    seen = np.zeros((rows_n, cols_n), dtype=bool)
    stack = [(0, 0)]
    seen[0, 0] = True
    carve(0, 0, corridor, corridor)
    while stack:
        r, c = stack[-1]
        nbrs = [(r + dr, c + dc) for dr, dc in ((0, 1), (1, 0), (0, -1), (-1, 0))
                if 0 <= r + dr < rows_n and 0 <= c + dc < cols_n and not seen[r + dr, c + dc]]
        if not nbrs:
            stack.pop()
            continue
        nr, nc = nbrs[rng.integers(len(nbrs))]
        seen[nr, nc] = True
        carve(nr * step, nc * step, nr * step + corridor, nc * step + corridor)
        top, left = min(r, nr) * step, min(c, nc) * step
        carve(top, left, max(r, nr) * step + corridor, max(c, nc) * step + corridor)
        stack.append((nr, nc))
    return GridMap(width, height, chars, "octile")


def range_for(name: str) -> float:
    """Default range fraction for a map whose name mentions a known family."""
    low = name.lower()
    for key, frac in DEFAULT_RANGES.items():
        if key in low:
            return frac
    return DEFAULT_RANGES["maze"]


__all__ = [
    "GridMap", "CommModel", "MapFormatError", "parse_map", "format_map", "read_map",
    "discretize", "supercover", "line_of_sight", "generate_instance", "maze_map",
    "InstanceGenerationError", "DEFAULT_RANGES", "range_for",
]

