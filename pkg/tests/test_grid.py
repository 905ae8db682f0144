import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cmapf.graph import is_connected
from cmapf.grid import (CommModel, GridMap, InstanceGenerationError, MapFormatError, discretize,
                        format_map, generate_instance, line_of_sight, maze_map, parse_map,
                        range_for, supercover)

SMALL = "type octile\nheight 2\nwidth 2\nmap\n..\n.@\n"


def test_small_map():
    g = parse_map(SMALL)
    assert (g.width, g.height) == (2, 2)
    assert int(g.passable.sum()) == 3


def test_all_cell_classes_round_trip():
    text = "type octile\nheight 3\nwidth 4\nmap\n.G@T\nO...\n@@GG\n"
    g = parse_map(text)
    assert format_map(g) == text
    assert g.passable.tolist() == [[True, True, False, False],
                                   [False, True, True, True],
                                   [False, False, True, True]]


def _maze_text():
    return format_map(maze_map(32, 32, 2, seed=3))


def test_32x32_round_trip():
    text = _maze_text()
    g = parse_map(text)
    assert (g.width, g.height) == (32, 32)
    assert format_map(g) == text
    assert parse_map(format_map(g)) == g


def _lines_of(text):
    return text.split("\n")


@pytest.mark.parametrize("mutate, line", [
    (lambda L: L.__setitem__(0, "kind octile"), 1),
    (lambda L: L.__setitem__(1, "height x"), 2),
    (lambda L: L.__setitem__(2, "width"), 3),
    (lambda L: L.__setitem__(3, "grid"), 4),
    (lambda L: L.__setitem__(4 + 9, L[4 + 9][:-1]), 14),      # short row
    (lambda L: L.__setitem__(4 + 20, L[4 + 20] + "."), 25),   # long row
    (lambda L: L.__setitem__(4 + 31, "x" + L[4 + 31][1:]), 36),
    (lambda L: L.__delitem__(slice(30, None)), 31),           # missing rows
    (lambda L: L.append("...."), 38),                         # junk after the blank line 37
])
def test_malformed_32x32_reports_line(mutate, line):
    lines = _lines_of(_maze_text())
    mutate(lines)
    with pytest.raises(MapFormatError) as err:
        parse_map("\n".join(lines))
    assert err.value.line == line
    assert f"line {line}" in str(err.value)


def test_no_passable_cell():
    with pytest.raises(MapFormatError):
        parse_map("type octile\nheight 1\nwidth 2\nmap\n@@\n")


def test_supercover_straight_and_diagonal():
    assert supercover((0, 0), (0, 3)) == {(0, 0), (0, 1), (0, 2), (0, 3)}
    # an exact corner crossing touches both side cells
    assert supercover((0, 0), (1, 1)) == {(0, 0), (0, 1), (1, 0), (1, 1)}


def _naive_supercover(a, b):
    """Cells whose closed unit square meets the segment, by dense sampling
    plus exact corner handling through rational arithmetic."""
    from fractions import Fraction as F

    (r0, c0), (r1, c1) = a, b
    cells = set()
    steps = 4 * (abs(r1 - r0) + abs(c1 - c0)) + 4
    for i in range(steps + 1):
        s = F(i, steps)
        r, c = F(r0) + (r1 - r0) * s, F(c0) + (c1 - c0) * s
        # cell (R, C) covers [R - 1/2, R + 1/2] x [C - 1/2, C + 1/2]
        rs = {int(np.floor(r + F(1, 2)))} | ({int(r - F(1, 2))} if (r + F(1, 2)).denominator == 1 else set())
        cs = {int(np.floor(c + F(1, 2)))} | ({int(c - F(1, 2))} if (c + F(1, 2)).denominator == 1 else set())
        cells |= set(itertools.product(rs, cs))
    return cells


@settings(max_examples=200, deadline=None)
@given(st.integers(0, 7), st.integers(0, 7), st.integers(0, 7), st.integers(0, 7))
def test_supercover_symmetric_and_contains_endpoints(r0, c0, r1, c1):
    a, b = (r0, c0), (r1, c1)
    sc = supercover(a, b)
    assert sc == supercover(b, a)
    assert a in sc and b in sc
    # every sampled point of the segment lies in a returned cell
    assert _naive_supercover(a, b) <= sc


def test_distance_model_adjacent_only():
    g = discretize(GridMap.from_rows(["..."]), CommModel("distance", 1 / 3))
    assert g.comm_edges() == [(0, 1), (1, 2)]


def test_distance_model_complete_when_range_spans_map():
    # centre-to-centre diagonal sqrt(1 + 9) is below the range 1.0 * 4
    g = discretize(GridMap.from_rows(["....", "...."]), CommModel("distance", 1.0))
    n = g.vertex_count
    assert len(g.comm_edges()) == n * (n - 1) // 2


def test_los_open_map_is_complete():
    g = discretize(GridMap.from_rows(["...", "...", "..."]), CommModel("los"))
    assert len(g.comm_edges()) == 9 * 8 // 2


def test_los_blocked_by_center():
    grid = GridMap.from_rows(["...", ".@.", "..."])
    g = discretize(grid, CommModel("los"))
    idx = {rc: i for i, rc in enumerate(g.coords)}
    assert not g.communicates(idx[(0, 0)], idx[(2, 2)])
    assert not g.communicates(idx[(0, 2)], idx[(2, 0)])
    assert g.communicates(idx[(0, 0)], idx[(0, 2)])
    assert not line_of_sight(grid.passable, (1, 0), (1, 2))


def test_movement_no_corner_cutting():
    grid = GridMap.from_rows([".@", ".."])
    g = discretize(grid, CommModel("distance", 1.0))
    idx = {rc: i for i, rc in enumerate(g.coords)}
    assert not g.can_move(idx[(0, 0)], idx[(1, 1)])
    g2 = discretize(grid, CommModel("distance", 1.0), corner_cutting=True)
    assert g2.can_move(idx[(0, 0)], idx[(1, 1)])


def test_eight_way_branching():
    g = discretize(GridMap.from_rows(["..."] * 3), CommModel("distance", 0.5))
    assert max(len(m) for m in g.movement) == 9


def test_base_cell_default_and_flag():
    grid = GridMap.from_rows(["@..", "..."])
    g = discretize(grid, CommModel())
    assert g.coords[g.base] == (0, 1)
    g = discretize(grid, CommModel(), base_cell=(1, 2))
    assert g.coords[g.base] == (1, 2)
    with pytest.raises(ValueError):
        discretize(grid, CommModel(), base_cell=(0, 0))


def test_comm_model_validation():
    with pytest.raises(ValueError):
        CommModel("distance", 0)
    with pytest.raises(ValueError):
        CommModel("radio")
    assert CommModel("line_of_sight").kind == "los"


def test_range_defaults():
    assert range_for("maze-32-32-2.map") == pytest.approx(1 / 6)
    assert range_for("Boston_coast") == 0.25


def _maze_graph():
    return discretize(maze_map(32, 32, 2, seed=0), CommModel("distance", 1 / 6))


@pytest.mark.parametrize("method", ["rejection", "grow", "walk"])
def test_generated_instances_connected_and_deterministic(method):
    g = _maze_graph() if method != "rejection" else discretize(
        GridMap.from_rows(["....."] * 5), CommModel("distance", 0.5))
    for seed in range(5):
        a = generate_instance(g, 3, seed, method=method)
        b = generate_instance(g, 3, seed, method=method)
        assert a == b
        assert is_connected(g, a.start) and is_connected(g, a.goal)


def test_rejection_only_near_base():
    # range 1.5 cells: two agents can relay at most two cells away from the base
    grid = GridMap.from_rows([".........."])
    g = discretize(grid, CommModel("distance", 0.15))
    seen = set()
    for seed in range(30):
        inst = generate_instance(g, 2, seed)
        seen |= set(inst.start) | set(inst.goal)
    assert seen == {0, 1, 2}


def test_rejection_gives_up():
    g = discretize(GridMap.from_rows(["." * 30]), CommModel("distance", 0.04))
    with pytest.raises(InstanceGenerationError):
        generate_instance(g, 6, 0, max_rejections=1000)
    with pytest.raises(ValueError):
        generate_instance(g, 0, 0)


def test_crop():
    m = maze_map(32, 32, 2, seed=0).crop(0, 0, 10, 12)
    assert (m.height, m.width) == (10, 12)
    assert parse_map(format_map(m)) == m
