"""Self and Other alone can get stuck; adding Neg restores completeness.

Run: python3 demos/fig2_incompleteness.py
"""
from cmapf import solve, oracle_solve
from cmapf.samples import FIG2_NAMES, fig2_instance

inst = fig2_instance()
for variant in ("ccbs-so", "ccbs-n", "ccbs-nso"):
    r = solve(inst, variant, time_limit=5)
    print(f"{variant:9s} {r.status.value:9s} cost={r.cost} nodes={r.stats.nodes_generated}")

opt = oracle_solve(inst)
print("oracle cost", opt.cost)
for a, p in enumerate(opt.execution.paths):
    print(f"  agent {a}: {' '.join(FIG2_NAMES[v] for v in p)}")
