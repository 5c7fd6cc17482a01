"""Community scoring, botnet-community filtering and clique verification.

Communities from the mutual contacts graph are scored with the mean vertex
DDR and the mean pairwise MCR (absent pairs count as zero). Communities
passing both thresholds are verified structurally: maximum cliques of at
least 3 vertices are extracted repeatedly, and only clique members become
bot candidates.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

from .community import CommunityPartition
from .mcg import MutualContactsGraph


@dataclass(frozen=True, slots=True)
class CommunityScore:
    community_id: int
    size: int
    avgddr: float
    avgmcr: float


@dataclass
class DetectionReport:
    thresholds: dict
    scores: list[CommunityScore]
    botnet_communities: set[int]
    cliques: dict[int, list[list[int]]]
    bot_clusters: set[int]
    bot_hosts: set[str]


def avgddr(members: Iterable[int], graph: MutualContactsGraph) -> float:
    """Arithmetic mean of the member vertices' DDR scores."""
    members = list(members)
    if not members:
        raise ValueError("community is empty")
    return sum(graph.vertices[v].ddr for v in members) / len(members)


def avgmcr(members: Iterable[int], graph: MutualContactsGraph) -> float:
    """Mean MCR over all unordered member pairs; unconnected pairs count 0.

    Singleton communities have no pairs and score 0 by convention.
    """
    members = set(members)
    if not members:
        raise ValueError("community is empty")
    k = len(members)
    if k == 1:
        return 0.0
    total = 0.0
    for e in graph.edges:
        if e.a in members and e.b in members:
            total += e.mcr
    return 2.0 * total / (k * (k - 1))


def score_communities(
    graph: MutualContactsGraph, partition: CommunityPartition
) -> list[CommunityScore]:
    return [
        CommunityScore(cid, len(members), avgddr(members, graph), avgmcr(members, graph))
        for cid, members in enumerate(partition.communities)
    ]


def filter_botnet_communities(
    scores: Iterable[CommunityScore], theta_avgddr: float, theta_avgmcr: float
) -> set[int]:
    """Community ids meeting both thresholds (inclusive)."""
    return {
        s.community_id
        for s in scores
        if s.avgddr >= theta_avgddr and s.avgmcr >= theta_avgmcr
    }


def induced_adjacency(graph: MutualContactsGraph, members: Iterable[int]) -> dict[int, set[int]]:
    members = set(members)
    return {u: {v for v in graph.adjacency[u] if v in members} for u in members}


def max_clique_iterative(adj: dict[int, set[int]]) -> list[list[int]]:
    """Repeatedly extract a maximum clique of at least 3 vertices.

    Each found clique is removed from the graph before searching the
    residual; extraction stops once the residual's maximum clique has
    fewer than 3 vertices. Cliques are returned in extraction order as
    sorted vertex lists. Equal-size maximum cliques are disambiguated by
    the lexicographically smallest sorted vertex sequence.
    """
    remaining = set(adj)
    found: list[list[int]] = []
    while len(remaining) >= 3:
        clique = _maximum_clique(adj, remaining)
        if len(clique) < 3:
            break
        found.append(list(clique))
        remaining -= set(clique)
    return found


def _maximum_clique(adj: dict[int, set[int]], vertices: set[int]) -> tuple[int, ...]:
    """Maximum clique of the induced subgraph, via pivoted Bron-Kerbosch."""
    sub = {u: adj[u] & vertices for u in vertices}
    best: tuple[int, ...] = ()

    def bk(r: set[int], p: set[int], x: set[int]) -> None:
        nonlocal best
        if not p and not x:
            cand = tuple(sorted(r))
            if len(cand) > len(best) or (len(cand) == len(best) and cand < best):
                best = cand
            return
        if len(r) + len(p) < len(best):
            return  # cannot beat the current best; equal sizes still explored
        pivot = min(sorted(p | x), key=lambda u: (-len(p & sub[u]), u))
        for v in sorted(p - sub[pivot]):
            bk(r | {v}, p & sub[v], x & sub[v])
            p = p - {v}
            x = x | {v}

    bk(set(), set(vertices), set())
    return best


def detect(
    graph: MutualContactsGraph,
    partition: CommunityPartition,
    theta_avgddr: float,
    theta_avgmcr: float,
    thresholds: dict | None = None,
) -> DetectionReport:
    """Score, filter and clique-verify communities; map clusters to hosts."""
    scores = score_communities(graph, partition)
    selected = filter_botnet_communities(scores, theta_avgddr, theta_avgmcr)
    cliques: dict[int, list[list[int]]] = {}
    bot_clusters: set[int] = set()
    for cid in sorted(selected):
        members = partition.communities[cid]
        if len(members) < 3:
            cliques[cid] = []  # cannot contain a 3-clique
            continue
        found = max_clique_iterative(induced_adjacency(graph, members))
        cliques[cid] = found
        for clique in found:
            bot_clusters.update(clique)
    bot_hosts = {graph.vertices[v].key.src for v in bot_clusters}
    if thresholds is None:
        thresholds = {"theta_avgddr": theta_avgddr, "theta_avgmcr": theta_avgmcr}
    return DetectionReport(
        thresholds=dict(thresholds),
        scores=scores,
        botnet_communities=selected,
        cliques=cliques,
        bot_clusters=bot_clusters,
        bot_hosts=bot_hosts,
    )
