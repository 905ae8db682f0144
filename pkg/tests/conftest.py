import itertools

import numpy as np
import pytest

from cmapf.samples import fig1_graph, fig1_instance, fig2_graph, fig2_instance


@pytest.fixture
def g1():
    return fig1_graph()


@pytest.fixture
def g2():
    return fig2_graph()


@pytest.fixture
def inst1():
    return fig1_instance()


@pytest.fixture
def inst2():
    return fig2_instance()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def all_paths(graph, start, length):
    """Every movement path with ``length`` vertices starting at ``start``."""
    paths = [(start,)]
    for _ in range(length - 1):
        paths = [p + (w,) for p in paths for w in graph.movement[p[-1]]]
    return paths


def brute_force_csp(graph, start, goal, constraints, max_len):
    """Shortest constrained path with at most ``max_len`` vertices, or None.

    Layers hold every vertex reachable at each step by some path that meets
    the constraints so far, which covers the same paths as listing them one
    by one.  A length works when the goal is in its last layer and idling
    there afterwards breaks no constraint.
    """
    layers = [{start: None}]
    for t in range(max_len):
        layer = layers[t]
        if goal in layer:
            path = [goal]
            for back in range(t, 0, -1):
                path.append(layers[back][path[-1]])
            path.reverse()
            if constraints.allows(path):
                return tuple(path)
        nxt = {}
        for u in sorted(layer):
            for w in graph.movement[u]:
                if w in nxt:
                    continue
                if constraints.landmarks.get(t + 1, w) != w or (w, t + 1) in constraints.forbidden:
                    continue
                nxt[w] = u
        layers.append(nxt)
    return None


def brute_force_components(graph, conf):
    """Connectivity by closure over the vertex set, independent of graph.py."""
    verts = set(conf) | {graph.base}
    reached = {graph.base}
    changed = True
    while changed:
        changed = False
        for u, v in itertools.product(list(reached), verts):
            if v not in reached and v in graph.comm[u]:
                reached.add(v)
                changed = True
    return reached, verts


def pytest_terminal_summary(terminalreporter):
    from acceptance_report import RESULTS, print_report

    if RESULTS:
        terminalreporter.section("acceptance criteria")
        print_report(terminalreporter.write_line)
