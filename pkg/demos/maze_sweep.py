"""Small benchmark on the synthetic 32x32 maze, with an optional plot.

Run: python3 demos/maze_sweep.py [instances-per-point]
Writes maze_sweep.csv (and maze_sweep.png when matplotlib is installed)
in the current directory.
"""
import sys

from cmapf.bench import median_nodes, run_sweep, success_rates, write_csv
from cmapf.grid import CommModel, discretize, maze_map

n = int(sys.argv[1]) if len(sys.argv) > 1 else 5
algos = ["ccbs-nso", "ccbs-n", "astar-od"]
agents = [2, 3, 4, 5, 6]

graph = discretize(maze_map(32, 32, 2, seed=0), CommModel("distance", 1 / 6))
print(f"{graph.vertex_count} vertices, base {graph.base}")
rows = run_sweep(graph, "maze", "distance", algos, agents, n, time_limit=5.0,
                 progress=lambda r: print(f"  k={r.agents} {r.algo:9s} {r.outcome:8s} nodes={r.nodes_generated}"))
with open("maze_sweep.csv", "w", newline="") as fh:
    write_csv(rows, fh)

rates = success_rates(rows)
for k in agents:
    print(f"k={k}: " + "  ".join(f"{a} {rates[('maze', a, k)]:.0%}" for a in algos))
for k, (a, b, cnt) in median_nodes(rows, "ccbs-nso", "ccbs-n").items():
    print(f"k={k}: median nodes NSO {a:g} vs N {b:g} over {cnt} instances")

try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    sys.exit(0)
for a in algos:
    plt.plot(agents, [rates[("maze", a, k)] for k in agents], marker="o", label=a)
plt.xlabel("agents")
plt.ylabel("success rate")
plt.legend()
plt.savefig("maze_sweep.png", dpi=120)
print("wrote maze_sweep.png")
