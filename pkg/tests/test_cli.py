import csv
import io
import xml.etree.ElementTree as ET

import pytest

from cmapf import formats
from cmapf.cli import main
from cmapf.grid import format_map, maze_map

SVG = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def files(tmp_path, inst1, inst2):
    for name, inst in (("fig1", inst1), ("fig2", inst2)):
        (tmp_path / f"{name}.graph").write_text(formats.format_graph(inst.graph))
        (tmp_path / f"{name}.inst").write_text(formats.format_instance(inst, f"{name}.graph"))
    (tmp_path / "maze.map").write_text(format_map(maze_map(32, 32, 2, seed=0)))
    return tmp_path


def test_solve_fig1(files):
    out = files / "f1.sol"
    assert main(["solve", str(files / "fig1.inst"), "--algo", "ccbs",
                 "--strategies", "neg,self,other", "-o", str(out)]) == 0
    sol = formats.read_solution(out)
    assert sol.cost == 3
    assert main(["check", str(files / "fig1.inst"), str(out)]) == 0


@pytest.mark.parametrize("algo", ["astar-od", "oracle"])
def test_solve_other_algorithms(files, algo):
    out = files / "s.sol"
    assert main(["solve", str(files / "fig1.inst"), "--algo", algo, "-o", str(out)]) == 0
    assert formats.read_solution(out).cost == 3


def test_solve_fig2_self_other_exhausted(files):
    assert main(["solve", str(files / "fig2.inst"), "--strategies", "self,other",
                 "-o", str(files / "x.sol")]) == 2


def test_solve_limit(files):
    assert main(["solve", str(files / "fig1.inst"), "--strategies", "self",
                 "--node-limit", "20", "-o", str(files / "x.sol")]) == 3
    assert main(["solve", str(files / "fig1.inst"), "--no-bypass", "--partial-splitting",
                 "--time-limit-ms", "5000", "-o", str(files / "y.sol")]) == 0


def test_input_errors(files, capsys):
    assert main(["solve", str(files / "missing.inst")]) == 1
    assert main(["solve", str(files / "fig1.inst"), "--strategies", "up"]) == 1
    (files / "bad.inst").write_text("cmapf-instance v1\ngraph fig1.graph\nagents 2\nstart 2 5\ngoal 3 6\n")
    assert main(["solve", str(files / "bad.inst")]) == 1
    assert "disconnected" in capsys.readouterr().err
    with pytest.raises(SystemExit) as e:
        main(["solve"])
    assert e.value.code == 1


def test_check_rejects_bad_solution(files):
    (files / "bad.sol").write_text("cmapf-solution v1\nstatus solved\nagents 2\npath 1 2 3\npath 4 5 6\ncost 2\n")
    assert main(["check", str(files / "fig1.inst"), str(files / "bad.sol")]) == 4
    (files / "lie.sol").write_text("cmapf-solution v1\nstatus solved\nagents 2\npath 1 2 3 3\npath 4 4 5 6\ncost 2\n")
    assert main(["check", str(files / "fig1.inst"), str(files / "lie.sol")]) == 4


def test_gen_and_solve_on_map(files):
    inst = files / "m.inst"
    assert main(["gen", str(files / "maze.map"), "--agents", "3", "--seed", "4", "--method", "walk",
                 "--graph-out", str(files / "m.graph"), "-o", str(inst)]) == 0
    assert main(["solve", str(inst), "-o", str(files / "m.sol"), "--time-limit-ms", "20000"]) == 0
    assert main(["check", str(inst), str(files / "m.sol")]) == 0
    svg = files / "m.svg"
    assert main(["render", str(inst), "--solution", str(files / "m.sol"), "-o", str(svg)]) == 0
    root = ET.parse(svg).getroot()
    assert len(root.findall(f".//{SVG}polyline")) == 3


def test_gen_is_deterministic(files, capsys):
    main(["gen", str(files / "fig2.graph"), "--agents", "2", "--seed", "9"])
    a = capsys.readouterr().out
    main(["gen", str(files / "fig2.graph"), "--agents", "2", "--seed", "9"])
    assert capsys.readouterr().out == a and a.startswith("cmapf-instance v1")


def test_render_abstract_graph(files):
    out = files / "f1.svg"
    with pytest.warns(UserWarning):
        assert main(["render", str(files / "fig1.inst"), "-o", str(out)]) == 0
    root = ET.parse(out).getroot()
    assert len(root.findall(f".//{SVG}circle")) >= 7
    dotted = [l for l in root.iter(f"{SVG}g") if l.get("stroke-dasharray")]
    assert dotted and len(dotted[0].findall(f"{SVG}line")) == 7


def test_render_rejects_inconsistent_solution(files):
    (files / "bad.sol").write_text("cmapf-solution v1\nstatus solved\nagents 2\npath 1 2 3\npath 4 5 6\ncost 2\n")
    assert main(["render", str(files / "fig1.inst"), "--solution", str(files / "bad.sol"),
                 "-o", str(files / "x.svg")]) == 1
    assert not (files / "x.svg").exists()


def test_bench_csv(files):
    out = files / "b.csv"
    args = ["bench", str(files / "maze.map"), "--algos", "ccbs-nso,ccbs-n", "--agents", "2-3",
            "--instances", "2", "--timeout", "10", "--out", str(out)]
    assert main(args) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert len(rows) == 2 * 2 * 2
    assert list(rows[0]) == ["map", "comm_model", "agents", "algo", "instance_seed", "outcome", "cost",
                             "nodes_generated", "nodes_expanded", "lowlevel_calls", "wall_ms"]
    first = out.read_text()
    assert main(args) == 0

    def strip(text):
        return [r[:-1] for r in csv.reader(io.StringIO(text))]
    assert strip(out.read_text()) == strip(first)


def test_bench_instance_files(files, capsys):
    assert main(["bench", str(files / "fig1.inst"), str(files / "fig2.inst"), "--algos", "ccbs-so"]) == 0
    rows = list(csv.DictReader(io.StringIO(capsys.readouterr().out)))
    assert [r["outcome"] for r in rows] == ["solved", "exhausted"]


def test_bench_usage_errors(files):
    assert main(["bench", str(files / "maze.map"), "--algos", ""]) == 1
    assert main(["bench", str(files / "maze.map"), "--algos", "dfs"]) == 1
