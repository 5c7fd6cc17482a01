"""Deterministic weighted Louvain community detection.

The implementation is the classic two-phase greedy: sweep vertices in
ascending id order moving each to the neighbor community with the best
modularity gain, then collapse communities into super-vertices and repeat
until no move improves modularity. Two fixed rules make runs reproducible:
the sweep order never changes, and gain ties are broken toward the
community containing the smallest original vertex id.
"""

from __future__ import annotations

from dataclasses import dataclass

from .mcg import MutualContactsGraph

_EPS = 1e-12


@dataclass
class CommunityPartition:
    """Total assignment of graph vertices to disjoint communities.

    Community ids are canonical: communities are numbered in ascending
    order of their smallest member vertex id.
    """

    assignment: dict[int, int]
    communities: list[set[int]]
    modularity: float


def modularity(graph: MutualContactsGraph, partition, resolution: float = 1.0) -> float:
    """Weighted Newman modularity of a partition.

    Q = sum over communities c of [ w_in(c)/W - resolution * (s(c)/(2W))^2 ]
    where W is the total edge weight, w_in(c) the weight of edges inside c,
    and s(c) the summed weighted degree of c's members. An empty graph
    (W = 0) has modularity 0 by definition.
    """
    assignment = partition.assignment if isinstance(partition, CommunityPartition) else dict(partition)
    n = len(graph.vertices)
    if sorted(assignment) != list(range(n)):
        raise ValueError("assignment must cover every vertex id exactly once")
    total = graph.total_weight()
    if total == 0.0:
        return 0.0
    two_w = 2.0 * total
    internal: dict[int, float] = {}
    strength: dict[int, float] = {}
    for e in graph.edges:
        ca, cb = assignment[e.a], assignment[e.b]
        if ca == cb:
            internal[ca] = internal.get(ca, 0.0) + e.mcr
        strength[ca] = strength.get(ca, 0.0) + e.mcr
        strength[cb] = strength.get(cb, 0.0) + e.mcr
    q = 0.0
    for c in set(assignment.values()):
        w_in = internal.get(c, 0.0)
        s = strength.get(c, 0.0)
        q += 2.0 * w_in / two_w - resolution * (s / two_w) ** 2
    return q


def louvain(graph: MutualContactsGraph, resolution: float = 1.0) -> CommunityPartition:
    partition, _ = louvain_with_history(graph, resolution)
    return partition


def louvain_with_history(
    graph: MutualContactsGraph, resolution: float = 1.0
) -> tuple[CommunityPartition, list[float]]:
    """Run Louvain and also return the modularity reached after each pass."""
    n = len(graph.vertices)
    if n == 0:
        return CommunityPartition({}, [], 0.0), []

    adj: list[dict[int, float]] = [dict() for _ in range(n)]
    for e in graph.edges:
        adj[e.a][e.b] = adj[e.a].get(e.b, 0.0) + e.mcr
        adj[e.b][e.a] = adj[e.b].get(e.a, 0.0) + e.mcr
    two_w = sum(sum(nbrs.values()) for nbrs in adj)
    if two_w == 0.0:
        return _finalize(graph, {v: v for v in range(n)}, resolution), []

    node_min = list(range(n))  # smallest original vertex inside each super-vertex
    maps: list[list[int]] = []
    history: list[float] = []
    while True:
        comm, moved = _local_pass(adj, two_w, resolution, node_min)
        comm, groups = _renumber(comm, node_min)
        maps.append(comm)
        history.append(modularity(graph, _flatten(maps, n), resolution))
        if not moved:
            break
        adj, node_min = _aggregate(adj, comm, groups, node_min)
    return _finalize(graph, _flatten(maps, n), resolution), history


def _local_pass(adj, two_w, resolution, node_min):
    """Greedy move phase on the current (possibly aggregated) graph."""
    n = len(adj)
    comm = list(range(n))
    deg = [sum(nbrs.values()) for nbrs in adj]
    tot = deg[:]
    members: list[set[int]] = [{u} for u in range(n)]
    moved_any = False
    while True:
        moved = False
        for u in range(n):
            cu = comm[u]
            links: dict[int, float] = {}
            for v, w in adj[u].items():
                if v != u:
                    cv = comm[v]
                    links[cv] = links.get(cv, 0.0) + w
            tot[cu] -= deg[u]
            stay = links.get(cu, 0.0) - resolution * deg[u] * tot[cu] / two_w
            best_c = cu
            best_q = stay
            for c in sorted(links):
                if c == cu:
                    continue
                q = links[c] - resolution * deg[u] * tot[c] / two_w
                if q > best_q + _EPS:
                    best_c, best_q = c, q
                elif best_c != cu and abs(q - best_q) <= _EPS:
                    # tie between improving communities: smallest original id wins
                    if min(node_min[x] for x in members[c]) < min(
                        node_min[x] for x in members[best_c]
                    ):
                        best_c = c
            tot[best_c] += deg[u]
            if best_c != cu:
                members[cu].discard(u)
                members[best_c].add(u)
                comm[u] = best_c
                moved = True
                moved_any = True
        if not moved:
            break
    return comm, moved_any


def _renumber(comm, node_min):
    """Relabel communities 0..k-1 ordered by smallest original vertex id."""
    groups: dict[int, list[int]] = {}
    for u, c in enumerate(comm):
        groups.setdefault(c, []).append(u)
    ordered = sorted(groups.values(), key=lambda g: min(node_min[u] for u in g))
    relabel = {}
    for new_id, group in enumerate(ordered):
        for u in group:
            relabel[u] = new_id
    return [relabel[u] for u in range(len(comm))], ordered


def _aggregate(adj, comm, groups, node_min):
    """Collapse each community into one super-vertex, keeping self-loops."""
    k = len(groups)
    new_adj: list[dict[int, float]] = [dict() for _ in range(k)]
    for u in range(len(adj)):
        cu = comm[u]
        row = new_adj[cu]
        for v, w in adj[u].items():
            cv = comm[v]
            row[cv] = row.get(cv, 0.0) + w
    new_min = [min(node_min[u] for u in g) for g in groups]
    return new_adj, new_min


def _flatten(maps, n):
    assignment = {}
    for v in range(n):
        x = v
        for level in maps:
            x = level[x]
        assignment[v] = x
    return assignment


def _finalize(graph, assignment, resolution):
    groups: dict[int, set[int]] = {}
    for v, c in assignment.items():
        groups.setdefault(c, set()).add(v)
    communities = sorted(groups.values(), key=min)
    final = {}
    for cid, members in enumerate(communities):
        for v in members:
            final[v] = cid
    partition = CommunityPartition(final, communities, 0.0)
    partition.modularity = modularity(graph, partition, resolution)
    return partition


def dump_partition(partition: CommunityPartition, path) -> None:
    """One `cluster_id,community_id` line per vertex."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# cluster_id,community_id\n")
        for v in sorted(partition.assignment):
            fh.write(f"{v},{partition.assignment[v]}\n")
