"""Static SVG drawings of graphs, instances and executions.

Grid-derived graphs are drawn cell by cell (obstacles filled black); other
graphs use a seeded spring layout, with movement edges solid and
communication edges dotted.  Each agent's path is one polyline.
"""
from __future__ import annotations

import warnings
from xml.sax.saxutils import escape

from .graph import Execution, Instance, TopologicalGraph

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd",
           "#8c564b", "#e377c2", "#17becf", "#bcbd22", "#7f7f7f")


def _layout(graph: TopologicalGraph, seed: int = 0):
    """Vertex centres in a unit-free frame plus (width, height)."""
    if graph.coords is not None and graph.grid_shape is not None:
        cell = 16
        h, w = graph.grid_shape
        pos = [((c + 0.5) * cell, (r + 0.5) * cell) for r, c in graph.coords]
        return pos, w * cell, h * cell, cell
    warnings.warn("graph has no grid metadata; using a spring layout", stacklevel=3)
    import networkx as nx

    g = nx.Graph()
    g.add_nodes_from(graph.vertices)
    g.add_edges_from((u, v) for u, v in graph.movement_edges() if u != v)
    raw = nx.spring_layout(g, seed=seed)
    size, margin = 400.0, 30.0
    pos = [(margin + (raw[v][0] + 1) / 2 * (size - 2 * margin),
            margin + (raw[v][1] + 1) / 2 * (size - 2 * margin)) for v in graph.vertices]
    return pos, size, size, None


def render_svg(graph: TopologicalGraph, instance: Instance | None = None,
               execution: Execution | None = None, comm_step: int | None = None,
               labels: dict | None = None, seed: int = 0) -> str:
    """SVG text for ``graph`` with optional start/goal markers, agent paths and
    the communication edges used at step ``comm_step``."""
    pos, width, height, cell = _layout(graph, seed)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.0f}" height="{height:.0f}" '
           f'viewBox="0 0 {width:.0f} {height:.0f}">',
           f'<rect x="0" y="0" width="{width:.0f}" height="{height:.0f}" fill="white"/>']
    r = (cell or 16) * 0.3
    if cell is not None:
        h, w = graph.grid_shape
        free = set(graph.coords)
        out.append('<g fill="black">')
        for row in range(h):
            for col in range(w):
                if (row, col) not in free:
                    out.append(f'<rect x="{col * cell}" y="{row * cell}" width="{cell}" height="{cell}"/>')
        out.append("</g>")
    else:
        out.append('<g stroke="#444" stroke-width="1.5">')
        for u, v in graph.movement_edges():
            if u != v:
                (x1, y1), (x2, y2) = pos[u], pos[v]
                out.append(f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}"/>')
        out.append("</g>")
        out.append('<g stroke="#888" stroke-width="1" stroke-dasharray="2,3">')
        for u, v in graph.comm_edges():
            (x1, y1), (x2, y2) = pos[u], pos[v]
            out.append(f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}"/>')
        out.append("</g>")
        out.append('<g fill="white" stroke="black">')
        for v in graph.vertices:
            x, y = pos[v]
            out.append(f'<circle cx="{x:.1f}" cy="{y:.1f}" r="{r:.1f}"/>')
        out.append("</g>")
        out.append('<g font-size="10" text-anchor="middle" font-family="sans-serif">')
        for v in graph.vertices:
            x, y = pos[v]
            name = (labels or {}).get(v, str(v))
            out.append(f'<text x="{x:.1f}" y="{y - r - 2:.1f}">{escape(name)}</text>')
        out.append("</g>")

    if execution is not None and comm_step is not None:
        conf = set(execution[comm_step]) | {graph.base}
        out.append('<g stroke="#1f77b4" stroke-width="1.5" stroke-dasharray="4,2">')
        for u, v in graph.comm_edges():
            if u in conf and v in conf:
                (x1, y1), (x2, y2) = pos[u], pos[v]
                out.append(f'<line x1="{x1:.1f}" y1="{y1:.1f}" x2="{x2:.1f}" y2="{y2:.1f}"/>')
        out.append("</g>")

    bx, by = pos[graph.base]
    out.append(f'<rect class="base" x="{bx - r * 1.3:.1f}" y="{by - r * 1.3:.1f}" '
               f'width="{r * 2.6:.1f}" height="{r * 2.6:.1f}" fill="none" stroke="black" stroke-width="2"/>')

    if execution is not None:
        for a, path in enumerate(execution.paths):
            color = PALETTE[a % len(PALETTE)]
            # small per-agent offset keeps overlapping paths visible
            off = (a - (execution.agent_count - 1) / 2) * r * 0.35
            pts = " ".join(f"{pos[v][0] + off:.1f},{pos[v][1] + off:.1f}" for v in path)
            out.append(f'<polyline class="agent-{a}" points="{pts}" fill="none" stroke="{color}" '
                       f'stroke-width="2" stroke-linejoin="round" opacity="0.85"/>')
    if instance is not None:
        for a, (s, g) in enumerate(zip(instance.start, instance.goal)):
            color = PALETTE[a % len(PALETTE)]
            (sx, sy), (gx, gy) = pos[s], pos[g]
            out.append(f'<circle cx="{sx:.1f}" cy="{sy:.1f}" r="{r * 0.7:.1f}" fill="{color}"/>')
            out.append(f'<circle cx="{gx:.1f}" cy="{gy:.1f}" r="{r * 0.7:.1f}" fill="none" '
                       f'stroke="{color}" stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
