"""Mutual contacts graph: DDR-scored cluster vertices, MCR-weighted edges.

Vertices are the P2P flow clusters that survived destination-diversity
filtering. An edge joins two clusters when they have the same pattern,
come from different source hosts, and the Jaccard index of their contact
sets strictly exceeds theta_mcr.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .flows import FlowKey
from .p2p import FlowCluster, sorted_clusters


@dataclass(frozen=True, slots=True)
class McgVertex:
    cluster_id: int
    key: FlowKey
    ddr: float


@dataclass(frozen=True, slots=True)
class McgEdge:
    a: int
    b: int
    mcr: float


class MutualContactsGraph:
    """Undirected weighted graph over flow clusters.

    Edges are stored canonically (a < b, sorted); adjacency holds sorted
    neighbor ids per vertex. Construction validates the structural
    invariants: no self-loops or duplicates, endpoints share a pattern and
    come from different hosts.
    """

    def __init__(self, vertices: Iterable[McgVertex], edges: Iterable[McgEdge]):
        self.vertices: list[McgVertex] = list(vertices)
        self.edges: list[McgEdge] = sorted(edges, key=lambda e: (e.a, e.b))
        n = len(self.vertices)
        self._weights: dict[tuple[int, int], float] = {}
        adjacency: list[list[int]] = [[] for _ in range(n)]
        for e in self.edges:
            if not (0 <= e.a < n and 0 <= e.b < n):
                raise ValueError(f"edge endpoint out of range: {e}")
            if e.a >= e.b:
                raise ValueError(f"edges must be canonically oriented (a < b): {e}")
            if (e.a, e.b) in self._weights:
                raise ValueError(f"duplicate edge: {e}")
            va, vb = self.vertices[e.a], self.vertices[e.b]
            if va.key.pattern != vb.key.pattern:
                raise ValueError(f"edge joins clusters of different patterns: {e}")
            if va.key.src == vb.key.src:
                raise ValueError(f"edge joins two clusters of one host: {e}")
            self._weights[(e.a, e.b)] = e.mcr
            adjacency[e.a].append(e.b)
            adjacency[e.b].append(e.a)
        self.adjacency: list[list[int]] = [sorted(nbrs) for nbrs in adjacency]

    def __len__(self) -> int:
        return len(self.vertices)

    def weight(self, a: int, b: int) -> float:
        """Edge weight between a and b, 0.0 when absent."""
        if a > b:
            a, b = b, a
        return self._weights.get((a, b), 0.0)

    def total_weight(self) -> float:
        return sum(e.mcr for e in self.edges)


def ddr(cluster: FlowCluster) -> float:
    """Destination diversity ratio: distinct /16 prefixes over distinct contacts."""
    if not cluster.contacts:
        raise ValueError("cluster has no contacts")
    return cluster.dd / len(cluster.contacts)


def mcr(a: FlowCluster, b: FlowCluster) -> float:
    """Mutual contacts ratio: Jaccard index of the two contact sets."""
    if not a.contacts or not b.contacts:
        raise ValueError("both contact sets must be nonempty")
    inter = len(a.contacts & b.contacts)
    if inter == 0:
        return 0.0
    return inter / len(a.contacts | b.contacts)


def build_mcg(
    clusters: Mapping[FlowKey, FlowCluster], theta_mcr: float
) -> MutualContactsGraph:
    """Build the mutual contacts graph over the retained clusters.

    Pair comparison happens inside pattern buckets only; clusters with
    different patterns can never be joined, so skipping those pairs changes
    nothing while avoiding most of the O(n^2) work.
    """
    if not 0.0 <= theta_mcr < 1.0:
        raise ValueError("theta_mcr must lie in [0, 1)")
    ordered = sorted_clusters(clusters)
    vertices = [McgVertex(i, c.key, ddr(c)) for i, c in enumerate(ordered)]
    buckets: dict = {}
    for i, c in enumerate(ordered):
        buckets.setdefault(c.pattern, []).append(i)
    edges: list[McgEdge] = []
    for pattern in sorted(buckets):
        ids = buckets[pattern]
        for x in range(len(ids)):
            i = ids[x]
            ci = ordered[i]
            for y in range(x + 1, len(ids)):
                j = ids[y]
                cj = ordered[j]
                if ci.key.src == cj.key.src:
                    continue  # a host's own clusters are never linked
                m = mcr(ci, cj)
                if m > theta_mcr:
                    edges.append(McgEdge(i, j, m))
    return MutualContactsGraph(vertices, edges)


def dump_graph(graph: MutualContactsGraph, path) -> None:
    """Dump vertices then edges in a line-oriented debug format."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# vertex: id,src_ip,proto,bpp_out,bpp_in,ddr\n")
        for v in graph.vertices:
            k = v.key
            fh.write(f"{v.cluster_id},{k.src},{k.proto},{k.bpp_out},{k.bpp_in},{v.ddr:.12g}\n")
        fh.write("# edge: a,b,mcr\n")
        for e in graph.edges:
            fh.write(f"{e.a},{e.b},{e.mcr:.12g}\n")
