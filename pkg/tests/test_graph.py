import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cmapf.graph import (Execution, GraphError, Instance, TopologicalGraph, disconnected_agents,
                         first_conflict, is_connected, is_connected_execution, is_sight_moveable,
                         sight_moveable_violations, sm_construct_execution, sm_witness_path,
                         validate_execution)
from cmapf.samples import random_graph, random_sm_graph

from conftest import brute_force_components


def test_self_loops_and_symmetry(g1):
    for v in g1.vertices:
        assert g1.can_move(v, v)
    for u, v in itertools.product(g1.vertices, repeat=2):
        assert g1.can_move(u, v) == g1.can_move(v, u)
        assert g1.communicates(u, v) == g1.communicates(v, u)


def test_bad_base_rejected():
    with pytest.raises(GraphError):
        TopologicalGraph.from_edges(3, 5, [], [])


def test_edge_to_unknown_vertex_rejected():
    with pytest.raises(GraphError):
        TopologicalGraph.from_edges(3, 0, [(0, 3)], [])


def test_is_connected_examples(g1):
    assert not is_connected(g1, (2, 5))
    assert is_connected(g1, (1, 4))
    assert is_connected(g1, (0, 0, 0))


def test_disconnected_agents_lists_only_the_lost_ones(g1):
    assert disconnected_agents(g1, (2, 5)) == [0]
    assert disconnected_agents(g1, (1, 4)) == []


def test_shared_isolated_vertex_is_disconnected():
    # two agents on the same vertex do not make it talk to the base
    g = TopologicalGraph.from_edges(3, 0, [(0, 1), (1, 2)], [(0, 1)])
    assert not is_connected(g, (2, 2))
    assert is_connected(g, (1, 1))


def test_connected_executions(g1):
    bad = Execution(((1, 2, 3), (4, 5, 6)))
    good = Execution(((1, 2, 3, 3), (4, 4, 5, 6)))
    assert not is_connected_execution(g1, bad)
    assert is_connected_execution(g1, good)
    assert is_connected_execution(g1, Execution(((1,), (4,))))


def test_execution_padding_and_cost():
    ex = Execution.from_paths([(1, 2, 3), (4,)])
    assert ex.paths == ((1, 2, 3), (4, 4, 4))
    assert ex.length == 3 and ex.cost == 2
    assert ex[1] == (2, 4)


def test_validate_optimal_solution(inst1):
    assert validate_execution(inst1, [(1, 2, 3, 3), (4, 4, 5, 6)]).ok


def test_validate_reports_disconnection(inst1):
    rep = validate_execution(inst1, [(1, 2, 3), (4, 5, 6)])
    dis = rep.of_kind("disconnected")
    assert len(dis) == 1
    assert dis[0].time == 1 and dis[0].agents == (0,)


def test_validate_reports_illegal_move(inst1):
    rep = validate_execution(inst1, [(1, 3, 3), (4, 5, 6)])
    moves = rep.of_kind("move")
    assert moves and moves[0].agents == (0,) and moves[0].time == 1


def test_validate_malformed_inputs_do_not_raise(inst1):
    assert rep_kinds(validate_execution(inst1, [(1, 2)])) == {"shape"}
    assert rep_kinds(validate_execution(inst1, [(1, 2), (4,)])) == {"shape"}
    assert rep_kinds(validate_execution(inst1, [(1, 99), (4, 4)])) == {"shape"}
    assert rep_kinds(validate_execution(inst1, 5)) == {"shape"}
    assert "endpoint" in rep_kinds(validate_execution(inst1, [(1, 2), (4, 4)]))


def rep_kinds(rep):
    return {v.kind for v in rep.violations}


def test_instance_validation(g1):
    Instance(g1, (1, 4), (3, 6)).validate()
    with pytest.raises(ValueError):
        Instance(g1, (2, 5), (3, 6)).validate()
    with pytest.raises(ValueError):
        Instance(g1, (1,), (3, 6)).validate()


def test_first_conflict(g1):
    assert first_conflict(g1, Execution(((1, 2, 3), (4, 5, 6)))) == (1, [0])
    assert first_conflict(g1, Execution(((0, 0), (0, 0)))) is None


def test_sight_moveable_examples(g1, g2):
    assert is_sight_moveable(g2) == (True, None)
    ok, witness = is_sight_moveable(g1)
    assert not ok
    assert witness in sight_moveable_violations(g1)
    assert (4, 2) in sight_moveable_violations(g1)


def test_sight_moveable_vacuous_and_trivial():
    empty = TopologicalGraph.from_edges(4, 0, [(0, 1), (1, 2)], [])
    assert is_sight_moveable(empty)[0]
    # communication only along movement edges: one-step witnesses
    g = TopologicalGraph.from_edges(4, 0, [(0, 1), (1, 2), (2, 3)], [(0, 1), (1, 2), (2, 3)])
    assert is_sight_moveable(g)[0]


def test_witness_path_is_restricted(g2):
    for v, w in g2.comm_edges():
        for a, b in ((v, w), (w, v)):
            p = sm_witness_path(g2, a, b)
            assert p[0] == a and p[-1] == b
            assert all(g2.can_move(x, y) for x, y in zip(p, p[1:]))
            assert all(x in g2.comm[b] for x in p[:-1])


def test_sm_construct_fig2(g2):
    for goal in [(4, 3), (7, 4), (0, 0)]:
        ex = sm_construct_execution(g2, goal)
        assert validate_execution(Instance(g2, (0,) * len(goal), goal), ex).ok
    assert sm_construct_execution(g2, (0, 0)).length == 1


def test_sm_construct_rejects_bad_input(g1, g2):
    with pytest.raises(ValueError):
        sm_construct_execution(g1, (4,))
    with pytest.raises(ValueError):
        sm_construct_execution(g2, (2, 2))  # q2 alone is out of reach of B
    with pytest.raises(ValueError):
        sm_construct_execution(g2, (7, 7))  # q7 does not communicate with B


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 10), st.integers(1, 4))
def test_connectivity_matches_closure(seed, n, k):
    rng = np.random.default_rng(seed)
    g = random_graph(n, rng)
    conf = tuple(int(v) for v in rng.integers(n, size=k))
    reached, verts = brute_force_components(g, conf)
    assert is_connected(g, conf) == (verts <= reached)
    assert set(disconnected_agents(g, conf)) == {a for a, v in enumerate(conf) if v not in reached}
    # permuting or duplicating agents leaves the vertex set, hence the answer, unchanged
    perm = tuple(rng.permutation(conf)) if k > 1 else conf
    assert is_connected(g, perm) == is_connected(g, conf)
    assert is_connected(g, conf + conf[:1]) == is_connected(g, conf)


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 10), st.integers(1, 4))
def test_sm_construction_always_validates(seed, n, k):
    from cmapf.samples import random_connected_config

    rng = np.random.default_rng(seed)
    g = random_sm_graph(n, rng)
    goal = random_connected_config(g, k, rng)
    ex = sm_construct_execution(g, goal)
    assert validate_execution(Instance(g, (g.base,) * k, goal), ex).ok
