"""Small hand-built graphs and random generators for tests and demos.

Vertex 0 is the base in both hand-built graphs; ``v_i`` / ``q_i`` is vertex
``i``.
"""
from __future__ import annotations

import numpy as np

from .graph import Instance, TopologicalGraph, is_connected, is_sight_moveable

FIG1_NAMES = ("B", "v1", "v2", "v3", "v4", "v5", "v6")
FIG2_NAMES = ("B", "q1", "q2", "q3", "q4", "q5", "q6", "q7")


def fig1_graph() -> TopologicalGraph:
    """Seven-vertex graph where the base has no movement edges."""
    mvt = [(1, 2), (2, 3), (1, 4), (4, 5), (5, 6)]
    comm = [(0, 4), (0, 5), (0, 6), (4, 1), (4, 2), (6, 3), (5, 3)]
    return TopologicalGraph.from_edges(7, 0, mvt, comm)


def fig1_instance() -> Instance:
    return Instance(fig1_graph(), (1, 4), (3, 6))


def fig2_graph() -> TopologicalGraph:
    """Eight-vertex sight-moveable graph."""
    mvt = [(0, 1), (1, 2), (2, 3), (0, 4), (4, 5), (5, 6), (6, 0),
           (4, 7), (7, 5), (7, 3), (2, 6)]
    comm = [(0, 1), (0, 4), (0, 5), (0, 6), (2, 6), (3, 5), (3, 4),
            (5, 6), (4, 5), (7, 4), (7, 3), (7, 5)]
    return TopologicalGraph.from_edges(8, 0, mvt, comm)


def fig2_instance() -> Instance:
    return Instance(fig2_graph(), (4, 3), (0, 0))


def random_graph(n: int, rng: np.random.Generator, p_move: float = 0.3,
                 p_comm: float = 0.35) -> TopologicalGraph:
    """Erdős–Rényi style graph with a spanning movement path so that every
    vertex is reachable."""
    perm = rng.permutation(n)
    mvt = {(int(min(a, b)), int(max(a, b))) for a, b in zip(perm[:-1], perm[1:])}
    comm = set()
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p_move:
                mvt.add((u, v))
            if rng.random() < p_comm:
                comm.add((u, v))
    return TopologicalGraph.from_edges(n, int(rng.integers(n)), sorted(mvt), sorted(comm))


def random_sm_graph(n: int, rng: np.random.Generator, p_move: float = 0.25,
                    p_extra: float = 0.5) -> TopologicalGraph:
    """Random sight-moveable graph.

    Communication contains every movement edge plus a random subset of pairs
    that share a common movement neighbour; both kinds have a witness path of
    at most two moves.
    """
    g = random_graph(n, rng, p_move=p_move, p_comm=0.0)
    comm = set(g.movement_edges())
    for m in g.vertices:
        nb = [w for w in g.movement[m] if w != m]
        for i, u in enumerate(nb):
            for w in nb[i + 1:]:
                if rng.random() < p_extra:
                    comm.add((min(u, w), max(u, w)))
    out = TopologicalGraph.from_edges(n, g.base, g.movement_edges(), sorted(comm))
    assert is_sight_moveable(out)[0]
    return out


def random_connected_config(graph: TopologicalGraph, k: int, rng: np.random.Generator) -> tuple[int, ...]:
    """Grow a connected configuration: each agent lands uniformly on a vertex
    communicating with the base or an already placed agent."""
    placed = {graph.base}
    conf = []
    for _ in range(k):
        frontier = sorted(set().union(*(graph.comm[u] for u in placed)) | placed)
        v = int(frontier[rng.integers(len(frontier))])
        conf.append(v)
        placed.add(v)
    assert is_connected(graph, conf)
    return tuple(conf)


def random_instance(n: int, k: int, rng: np.random.Generator, **kw) -> Instance:
    g = random_graph(n, rng, **kw)
    return Instance(g, random_connected_config(g, k, rng), random_connected_config(g, k, rng))
