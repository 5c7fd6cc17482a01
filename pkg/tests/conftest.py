import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from botsift.flows import FlowKey
from botsift.mcg import McgEdge, McgVertex, MutualContactsGraph


def make_graph(n: int, edges, ddrs=None) -> MutualContactsGraph:
    """Graph with n vertices and (a, b[, weight]) edges; defaults weight 1.0.

    Every vertex gets a distinct fake source host and the same pattern so
    any edge is structurally legal.
    """
    vertices = [
        McgVertex(i, FlowKey(f"10.{i // 250}.0.{1 + i % 250}", "tcp", 100, 100),
                  1.0 if ddrs is None else ddrs[i])
        for i in range(n)
    ]
    norm = []
    for e in edges:
        a, b = e[0], e[1]
        w = e[2] if len(e) > 2 else 1.0
        if a > b:
            a, b = b, a
        norm.append(McgEdge(a, b, w))
    return MutualContactsGraph(vertices, norm)


def random_mcg(rng, n: int, p: float, weighted=False) -> MutualContactsGraph:
    edges = []
    for a in range(n):
        for b in range(a + 1, n):
            if rng.random() < p:
                w = rng.uniform(0.05, 1.0) if weighted else 1.0
                edges.append((a, b, w))
    return make_graph(n, edges)
