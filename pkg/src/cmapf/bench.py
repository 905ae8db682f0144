"""Benchmark sweeps: run solvers over generated instances and collect CSV rows.

Algorithm names are CCBS variants (``ccbs-nso``, ``ccbs-n``, ``ccbs-so``,
``ccbs-s``, each optionally with ``+ps``), ``astar-od`` and ``oracle``.
Runs are independent; ``CMAPF_THREADS`` sets the worker count, and rows are
always emitted in sweep order regardless of completion order.
"""
from __future__ import annotations

import csv
import io
import os
import statistics
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import astuple, dataclass, fields
from typing import Iterable, Sequence

from .astar_od import astar_od_solve
from .ccbs import CCBS, SolverConfig
from .graph import Instance, TopologicalGraph, validate_execution
from .oracle import OracleBudgetError, oracle_solve
from .results import SearchResult, Stats, Status

CSV_COLUMNS = ("map", "comm_model", "agents", "algo", "instance_seed", "outcome", "cost",
               "nodes_generated", "nodes_expanded", "lowlevel_calls", "wall_ms")


@dataclass
class BenchRow:
    map: str
    comm_model: str
    agents: int
    algo: str
    instance_seed: int
    outcome: str
    cost: int | None
    nodes_generated: int
    nodes_expanded: int
    lowlevel_calls: int
    wall_ms: float

    @property
    def solved(self) -> bool:
        return self.outcome == Status.SOLVED.value


def known_algorithm(name: str) -> bool:
    if name in ("astar-od", "oracle"):
        return True
    try:
        SolverConfig.variant(name)
    except ValueError:
        return False
    return True


def run_algorithm(instance: Instance, algo: str, time_limit: float | None = None,
                  node_limit: int | None = None) -> SearchResult:
    """Solve ``instance`` with the named algorithm under the given limits."""
    if algo == "astar-od":
        return astar_od_solve(instance, node_limit=node_limit, time_limit=time_limit)
    if algo == "oracle":
        try:
            return oracle_solve(instance)
        except OracleBudgetError:
            return SearchResult(Status.LIMIT, stats=Stats())
    cfg = SolverConfig.variant(algo, node_limit=node_limit, time_limit=time_limit)
    return CCBS(instance, cfg).solve()


def instance_seed(seed: int, agents: int, index: int) -> int:
    return seed * 1_000_000 + agents * 1_000 + index


def _row(map_name, comm, instance, algo, iseed, res: SearchResult) -> BenchRow:
    outcome = res.status.value
    if res.solved and not validate_execution(instance, res.execution.paths).ok:
        outcome = "invalid"
    st = res.stats
    return BenchRow(map_name, comm, instance.agent_count, algo, iseed, outcome,
                    res.cost if res.solved else None, st.nodes_generated, st.nodes_expanded,
                    st.lowlevel_calls, round(st.wall_ms, 3))


def threads_from_env(default: int = 1) -> int:
    try:
        return max(1, int(os.environ.get("CMAPF_THREADS", default)))
    except ValueError:
        return default


def run_sweep(graph: TopologicalGraph, map_name: str, comm_label: str,
              algos: Sequence[str], agent_counts: Iterable[int], instances: int,
              seed: int = 0, time_limit: float | None = 30.0, node_limit: int | None = None,
              method: str = "walk", threads: int | None = None,
              progress=None) -> list[BenchRow]:
    """Every algorithm on ``instances`` generated instances per agent count."""
    from .grid import InstanceGenerationError, generate_instance

    if not algos:
        raise ValueError("no algorithms given")
    for a in algos:
        if not known_algorithm(a):
            raise ValueError(f"unknown algorithm {a!r}")
    jobs = []
    for k in agent_counts:
        for i in range(instances):
            iseed = instance_seed(seed, k, i)
            try:
                inst = generate_instance(graph, k, iseed, method=method)
            except InstanceGenerationError:
                for algo in algos:
                    jobs.append((None, k, algo, iseed))
                continue
            for algo in algos:
                jobs.append((inst, k, algo, iseed))

    def work(job):
        inst, k, algo, iseed = job
        if inst is None:
            row = BenchRow(map_name, comm_label, k, algo, iseed, "generation-failed",
                           None, 0, 0, 0, 0.0)
        else:
            try:
                res = run_algorithm(inst, algo, time_limit, node_limit)
                row = _row(map_name, comm_label, inst, algo, iseed, res)
            except Exception as exc:  # a broken run is a row, not an aborted sweep
                row = BenchRow(map_name, comm_label, k, algo, iseed, f"error:{type(exc).__name__}",
                               None, 0, 0, 0, 0.0)
        if progress is not None:
            progress(row)
        return row

    n = threads if threads is not None else threads_from_env()
    if n <= 1:
        return [work(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(work, jobs))


def run_instances(named: Sequence[tuple[str, Instance]], algos: Sequence[str], comm_label: str = "file",
                  time_limit: float | None = 30.0, node_limit: int | None = None,
                  threads: int | None = None) -> list[BenchRow]:
    """Every algorithm on pre-built instances; ``instance_seed`` is the file index."""
    if not algos:
        raise ValueError("no algorithms given")
    jobs = [(i, name, inst, algo) for i, (name, inst) in enumerate(named) for algo in algos]

    def work(job):
        i, name, inst, algo = job
        return _row(name, comm_label, inst, algo, i, run_algorithm(inst, algo, time_limit, node_limit))

    n = threads if threads is not None else threads_from_env()
    if n <= 1:
        return [work(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(work, jobs))


def write_csv(rows: Iterable[BenchRow], fh) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow("" if x is None else x for x in astuple(r))


def read_csv(fh) -> list[BenchRow]:
    out = []
    for rec in csv.DictReader(fh):
        vals = {}
        for f in fields(BenchRow):
            raw = rec[f.name]
            if f.name in ("agents", "instance_seed", "nodes_generated", "nodes_expanded", "lowlevel_calls"):
                vals[f.name] = int(raw)
            elif f.name == "cost":
                vals[f.name] = int(raw) if raw != "" else None
            elif f.name == "wall_ms":
                vals[f.name] = float(raw)
            else:
                vals[f.name] = raw
        out.append(BenchRow(**vals))
    return out


def rows_to_csv(rows: Iterable[BenchRow]) -> str:
    buf = io.StringIO()
    write_csv(rows, buf)
    return buf.getvalue()


def success_rates(rows: Iterable[BenchRow]) -> dict:
    """Fraction solved per (map, algo, agents)."""
    tot, ok = defaultdict(int), defaultdict(int)
    for r in rows:
        key = (r.map, r.algo, r.agents)
        tot[key] += 1
        ok[key] += r.solved
    return {key: ok[key] / tot[key] for key in tot}


def median_nodes(rows: Iterable[BenchRow], algo_a: str, algo_b: str) -> dict:
    """Per agent count, median nodes generated by the two algorithms over the
    instances both solved."""
    by = defaultdict(dict)
    for r in rows:
        if r.algo in (algo_a, algo_b) and r.solved:
            by[(r.map, r.agents, r.instance_seed)][r.algo] = r.nodes_generated
    per_k = defaultdict(lambda: ([], []))
    for (m, k, _), d in by.items():
        if algo_a in d and algo_b in d:
            per_k[k][0].append(d[algo_a])
            per_k[k][1].append(d[algo_b])
    return {k: (statistics.median(a), statistics.median(b), len(a))
            for k, (a, b) in sorted(per_k.items())}
