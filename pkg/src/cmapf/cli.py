"""``cmapf`` command line: solve, bench, gen, check, render.

Exit codes: 0 solved / valid, 2 search exhausted, 3 limit reached,
4 solution rejected by ``check``, 1 for any input or usage error.
"""
from __future__ import annotations

import argparse
import os
import sys

from . import formats
from .bench import known_algorithm, run_instances, run_sweep, write_csv
from .ccbs import CCBS, STRATEGIES, SolverConfig
from .astar_od import astar_od_solve
from .graph import validate_execution
from .grid import (CommModel, MapFormatError, discretize, generate_instance, maze_map,
                   range_for, read_map)
from .oracle import OracleBudgetError, oracle_solve
from .results import Status

EXIT = {Status.SOLVED: 0, Status.EXHAUSTED: 2, Status.LIMIT: 3}
EXIT_INPUT = 1
EXIT_INVALID = 4


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # exit code 2 is reserved for exhausted searches
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT, f"{self.prog}: error: {message}\n")


def _cell(text):
    try:
        r, c = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected ROW,COL, got {text!r}") from None
    return r, c


def _int_list(text):
    out = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError("empty list")
    return out


def _add_grid_flags(p):
    p.add_argument("--comm", choices=("distance", "los"), default="distance",
                   help="communication model for .map inputs")
    p.add_argument("--range", type=float, default=None, dest="range_fraction",
                   help="distance range as a fraction of max(width, height); "
                        "default depends on the map name")
    p.add_argument("--base", type=_cell, default=None, metavar="ROW,COL",
                   help="base cell (default: first passable cell, row-major)")
    p.add_argument("--corner-cutting", action="store_true",
                   help="allow diagonal moves past obstacle corners")


def _comm_model(args, name):
    if args.comm == "los":
        return CommModel("los")
    return CommModel("distance", args.range_fraction or range_for(name))


def _load_graph(path, args):
    """Graph from a .map file (discretized) or a graph text file."""
    if path.endswith(".map"):
        grid = read_map(path)
        return discretize(grid, _comm_model(args, os.path.basename(path)), args.base,
                          corner_cutting=args.corner_cutting)
    return formats.read_graph(path)


def _comm_label(args):
    if args.comm == "los":
        return "los"
    return "distance" if args.range_fraction is None else f"distance:{args.range_fraction:g}"


def _solve(instance, args):
    limit_s = None if args.time_limit_ms is None else args.time_limit_ms / 1000.0
    if args.algo == "astar-od":
        return astar_od_solve(instance, node_limit=args.node_limit, time_limit=limit_s)
    if args.algo == "oracle":
        return oracle_solve(instance)
    strategies = frozenset(s for s in args.strategies.split(",") if s)
    cfg = SolverConfig(strategies=strategies, bypass=args.bypass,
                       partial_splitting=args.partial_splitting,
                       node_limit=args.node_limit, time_limit=limit_s)
    return CCBS(instance, cfg).solve()


def cmd_solve(args) -> int:
    instance = formats.read_instance(args.instance)
    instance.validate()
    try:
        res = _solve(instance, args)
    except OracleBudgetError as exc:
        raise UsageError(str(exc)) from None
    text = formats.format_solution(res)
    if args.output:
        formats.write_text(args.output, text)
    else:
        sys.stdout.write(text)
    if res.solved:
        print(f"solved: cost {res.cost}", file=sys.stderr)
    else:
        print(f"no solution: {res.status.value}", file=sys.stderr)
    return EXIT[res.status]


def cmd_bench(args) -> int:
    algos = [a for a in args.algos.split(",") if a]
    if not algos:
        raise UsageError("empty algorithm list")
    for a in algos:
        if not known_algorithm(a):
            raise UsageError(f"unknown algorithm {a!r}")
    timeout = args.timeout
    progress = None
    if args.verbose:
        def progress(row):
            print(f"{row.map} k={row.agents} {row.algo} seed={row.instance_seed} "
                  f"{row.outcome} cost={row.cost} nodes={row.nodes_generated}", file=sys.stderr)
    rows = []
    named_instances = []
    map_inputs = []
    for inp in args.inputs:
        if os.path.isdir(inp):
            for f in sorted(os.listdir(inp)):
                full = os.path.join(inp, f)
                if f.endswith(".map"):
                    map_inputs.append(full)
                elif f.endswith((".inst", ".instance")):
                    named_instances.append(full)
        elif inp.endswith(".map") or inp == "maze":
            map_inputs.append(inp)
        else:
            named_instances.append(inp)
    if not map_inputs and not named_instances:
        raise UsageError("no maps or instances found in the inputs")
    for m in map_inputs:
        if m == "maze":
            name = "maze-32-32-2-synthetic"
            grid = maze_map(32, 32, 2, seed=args.seed)
        else:
            name = os.path.basename(m)
            grid = read_map(m)
        graph = discretize(grid, _comm_model(args, name), args.base,
                           corner_cutting=args.corner_cutting)
        rows += run_sweep(graph, name, _comm_label(args), algos, args.agents, args.instances,
                          seed=args.seed, time_limit=timeout, node_limit=args.node_limit,
                          method=args.method, progress=progress)
    if named_instances:
        loaded = [(os.path.basename(p), formats.read_instance(p)) for p in named_instances]
        rows += run_instances(loaded, algos, time_limit=timeout, node_limit=args.node_limit)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            write_csv(rows, fh)
    else:
        write_csv(rows, sys.stdout)
    return 0


def cmd_gen(args) -> int:
    graph = _load_graph(args.source, args)
    inst = generate_instance(graph, args.agents, args.seed, method=args.method)
    graph_ref = None
    if args.graph_out:
        formats.write_text(args.graph_out, formats.format_graph(graph))
        out_dir = os.path.dirname(os.path.abspath(args.output)) if args.output else os.getcwd()
        graph_ref = os.path.relpath(os.path.abspath(args.graph_out), out_dir)
    text = formats.format_instance(inst, graph_ref)
    if args.output:
        formats.write_text(args.output, text)
    else:
        sys.stdout.write(text)
    return 0


def _checked_execution(instance, solution_path):
    sol = formats.read_solution(solution_path)
    if sol.execution is None:
        raise UsageError(f"{solution_path}: solution has no paths (status {sol.status.value})")
    report = validate_execution(instance, sol.execution.paths)
    return sol, report


def cmd_check(args) -> int:
    instance = formats.read_instance(args.instance)
    sol, report = _checked_execution(instance, args.solution)
    if sol.cost is not None and report.ok and sol.cost != sol.execution.cost:
        print(f"cost line says {sol.cost}, paths give {sol.execution.cost}", file=sys.stderr)
        return EXIT_INVALID
    if report.ok:
        print(f"valid: cost {sol.execution.cost}")
        return 0
    print(str(report), file=sys.stderr)
    return EXIT_INVALID


def cmd_render(args) -> int:
    from .render import render_svg

    src = args.source
    instance = graph = execution = None
    if src.endswith(".map"):
        graph = _load_graph(src, args)
    else:
        try:
            instance = formats.read_instance(src)
            graph = instance.graph
        except formats.FormatError:
            graph = formats.read_graph(src)
    if args.solution:
        if instance is None:
            raise UsageError("--solution needs an instance file")
        sol, report = _checked_execution(instance, args.solution)
        if not report.ok:
            print(str(report), file=sys.stderr)
            raise UsageError("solution does not match the instance")
        execution = sol.execution
    step = args.step
    if step is not None and (execution is None or not 0 <= step < execution.length):
        raise UsageError("--step needs a solution and must lie within its length")
    svg = render_svg(graph, instance, execution, comm_step=step, seed=args.seed)
    formats.write_text(args.output, svg)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="cmapf", description="Connected multi-agent path finding.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve one instance file")
    s.add_argument("instance")
    s.add_argument("-o", "--output", help="solution file (default: stdout)")
    s.add_argument("--algo", choices=("ccbs", "astar-od", "oracle"), default="ccbs")
    s.add_argument("--strategies", default="neg,self,other",
                   help=f"comma-separated subset of {','.join(STRATEGIES)}")
    s.add_argument("--bypass", action=argparse.BooleanOptionalAction, default=True)
    s.add_argument("--partial-splitting", action="store_true")
    s.add_argument("--node-limit", type=int)
    s.add_argument("--time-limit-ms", type=int)
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="benchmark sweep to CSV")
    b.add_argument("inputs", nargs="+",
                   help=".map files, instance files, directories of either, or 'maze' "
                        "for the built-in synthetic 32x32 maze")
    b.add_argument("--algos", default="ccbs-nso,ccbs-n,astar-od",
                   help="comma-separated: ccbs-nso, ccbs-n, ccbs-so, ccbs-s (optionally +ps), "
                        "astar-od, oracle")
    b.add_argument("--agents", type=_int_list, default=list(range(2, 11)), help="e.g. 2-10 or 2,4,8")
    b.add_argument("--instances", type=int, default=100)
    b.add_argument("--timeout", type=float, default=30.0, help="seconds per run")
    b.add_argument("--node-limit", type=int)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--method", choices=("rejection", "grow", "walk"), default="walk")
    b.add_argument("--out", help="CSV file (default: stdout)")
    b.add_argument("-v", "--verbose", action="store_true")
    _add_grid_flags(b)
    b.set_defaults(func=cmd_bench)

    g = sub.add_parser("gen", help="generate a random instance")
    g.add_argument("source", help=".map file or graph file")
    g.add_argument("--agents", type=int, required=True)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--method", choices=("rejection", "grow", "walk"), default="rejection")
    g.add_argument("-o", "--output", help="instance file (default: stdout)")
    g.add_argument("--graph-out", help="write the graph separately and reference it by path")
    _add_grid_flags(g)
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="validate a solution against an instance")
    c.add_argument("instance")
    c.add_argument("solution")
    c.set_defaults(func=cmd_check)

    r = sub.add_parser("render", help="draw a map, graph, instance or solution as SVG")
    r.add_argument("source", help=".map, graph or instance file")
    r.add_argument("--solution")
    r.add_argument("--step", type=int, help="also draw communication edges used at this step")
    r.add_argument("--seed", type=int, default=0, help="layout seed for non-grid graphs")
    r.add_argument("-o", "--output", required=True)
    _add_grid_flags(r)
    r.set_defaults(func=cmd_render)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, formats.FormatError, MapFormatError, ValueError, OSError) as exc:
        print(f"cmapf {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
