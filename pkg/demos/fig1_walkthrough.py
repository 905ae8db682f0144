"""Solve the seven-vertex example with every solver and show the constraint tree.

Run: python3 demos/fig1_walkthrough.py
"""
from cmapf import CCBS, SolverConfig, astar_od_solve, oracle_solve, validate_execution
from cmapf.samples import FIG1_NAMES, fig1_instance


def names(path):
    return " ".join(FIG1_NAMES[v] for v in path)


inst = fig1_instance()
print("start", [FIG1_NAMES[v] for v in inst.start], "goal", [FIG1_NAMES[v] for v in inst.goal])

# watch CCBS-NSO pop nodes off OPEN
popped = []
solver = CCBS(inst, SolverConfig.variant("ccbs-nso"),
              observer=lambda node, open_nodes: popped.append(node))
res = solver.solve()
for node in popped:
    conflict = "none" if node.conflict is None else f"step {node.conflict.time}, agents {list(node.conflict.disconnected_agents)}"
    print(f"  node {node.ordinal:2d} cost {node.cost} constraints {len(node.constraints)} conflict {conflict}")
print("CCBS-NSO cost", res.cost)
for a, p in enumerate(res.execution.paths):
    print(f"  agent {a}: {names(p)}")
assert validate_execution(inst, res.execution).ok

for label, r in [("CCBS-N", CCBS(inst, SolverConfig.variant("ccbs-n")).solve()),
                 ("A*-OD", astar_od_solve(inst)),
                 ("oracle", oracle_solve(inst))]:
    print(f"{label:8s} cost {r.cost}  nodes {r.stats.nodes_generated}")
