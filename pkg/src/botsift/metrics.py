"""Evaluation: pair-counting community indices and detection metrics.

The three indices measure, over host communities, how well bots from
different botnets are separated (BSI), how well bots from the same botnet
are aggregated (BAI), and how well bots are separated from legitimate P2P
hosts (BLSI). Detection metrics compare reported bot hosts against labels.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Iterable, Mapping

from .community import CommunityPartition
from .detect import DetectionReport
from .flows import HostLabel, ip_value
from .mcg import MutualContactsGraph


@dataclass(frozen=True, slots=True)
class PairCounts:
    """Pair bookkeeping: a,b over same-botnet pairs, c over cross-botnet
    pairs sharing a community, d over separated bot-legitimate pairs."""

    a: int
    b: int
    c: int
    d: int


def pair_counts(
    botnet_groups: Iterable[Iterable[str]],
    communities: Iterable[Iterable[str]],
    bots: Iterable[str] | None = None,
    legits: Iterable[str] | None = None,
) -> PairCounts:
    groups = [set(g) for g in botnet_groups]
    comm_of: dict[str, int] = {}
    for idx, com in enumerate(communities):
        for host in com:
            comm_of[host] = idx

    def same_community(u: str, v: str) -> bool:
        cu = comm_of.get(u)
        return cu is not None and cu == comm_of.get(v)

    group_of = {h: gi for gi, g in enumerate(groups) for h in g}
    all_bots = sorted(group_of)
    a = b = c = 0
    for i in range(len(all_bots)):
        for j in range(i + 1, len(all_bots)):
            u, v = all_bots[i], all_bots[j]
            same_x = group_of[u] == group_of[v]
            same_y = same_community(u, v)
            if same_x and same_y:
                a += 1
            elif same_x:
                b += 1
            elif same_y:
                c += 1
    d = 0
    if bots is not None and legits is not None:
        for u in sorted(set(bots)):
            for v in sorted(set(legits)):
                if not same_community(u, v):
                    d += 1
    return PairCounts(a, b, c, d)


def bsi(botnet_groups, communities) -> float:
    """Fraction a/(a+c); 1.0 when no cross-botnet pair can violate it."""
    pc = pair_counts(botnet_groups, communities)
    return 1.0 if pc.a + pc.c == 0 else pc.a / (pc.a + pc.c)


def bai(botnet_groups, communities) -> float:
    """Fraction a/(a+b); 1.0 when there are no same-botnet pairs."""
    pc = pair_counts(botnet_groups, communities)
    return 1.0 if pc.a + pc.b == 0 else pc.a / (pc.a + pc.b)


def blsi(bots, legits, communities) -> float:
    """Fraction of bot-legitimate pairs placed in different communities."""
    bots, legits = set(bots), set(legits)
    if not bots or not legits:
        warnings.warn("blsi is undefined without both bots and legitimate hosts; returning 1.0")
        return 1.0
    pc = pair_counts([], communities, bots=bots, legits=legits)
    return pc.d / (len(bots) * len(legits))


def detection_metrics(report: DetectionReport, labels: Mapping[str, HostLabel]) -> dict:
    """Precision/recall/F-score plus raw FP and FN counts against labels.

    An empty report has precision 1.0 by convention (nothing wrongly
    reported); F-score is 0 when precision + recall is 0.
    """
    bots = {h for h, lab in labels.items() if lab.role == "bot"}
    reported = set(report.bot_hosts)
    tp = len(reported & bots)
    fp = len(reported - bots)
    fn = len(bots - reported)
    precision = 1.0 if not reported else tp / len(reported)
    recall = 1.0 if not bots else tp / len(bots)
    f_score = 0.0 if precision + recall == 0 else 2 * precision * recall / (precision + recall)
    return {
        "precision": precision,
        "recall": recall,
        "f_score": f_score,
        "fp": fp,
        "fn": fn,
    }


def group_detection_rates(
    report: DetectionReport, labels: Mapping[str, HostLabel]
) -> dict[str, float]:
    """Per-botnet detection rate: reported members over group size."""
    groups: dict[str, set[str]] = {}
    for host, lab in labels.items():
        if lab.role == "bot":
            groups.setdefault(lab.group, set()).add(host)
    reported = set(report.bot_hosts)
    return {
        name: len(reported & members) / len(members)
        for name, members in sorted(groups.items())
    }


def botnet_groups_from_labels(labels: Mapping[str, HostLabel]) -> list[set[str]]:
    """Ground-truth bot grouping, ordered by group name."""
    groups: dict[str, set[str]] = {}
    for host, lab in labels.items():
        if lab.role == "bot":
            groups.setdefault(lab.group, set()).add(host)
    return [groups[name] for name in sorted(groups)]


def host_partition(
    graph: MutualContactsGraph,
    partition: CommunityPartition,
    report: DetectionReport | None = None,
) -> dict[str, int]:
    """Assign each host owning a graph vertex to a single community.

    Hosts own several clusters and may straddle communities; the host takes
    the lowest community id among its clique-member clusters when it has
    any, otherwise the lowest id among all its clusters' communities.
    """
    comm_by_host: dict[str, set[int]] = {}
    for v in graph.vertices:
        comm_by_host.setdefault(v.key.src, set()).add(partition.assignment[v.cluster_id])
    clique_comm_by_host: dict[str, set[int]] = {}
    if report is not None:
        for cid, cliques in report.cliques.items():
            for clique in cliques:
                for vid in clique:
                    host = graph.vertices[vid].key.src
                    clique_comm_by_host.setdefault(host, set()).add(cid)
    out: dict[str, int] = {}
    for host, comms in comm_by_host.items():
        preferred = clique_comm_by_host.get(host)
        out[host] = min(preferred) if preferred else min(comms)
    return out


def host_communities(
    graph: MutualContactsGraph,
    partition: CommunityPartition,
    report: DetectionReport | None = None,
) -> list[set[str]]:
    """Host-level communities derived from host_partition, as host sets."""
    assignment = host_partition(graph, partition, report)
    by_comm: dict[int, set[str]] = {}
    for host, cid in assignment.items():
        by_comm.setdefault(cid, set()).add(host)
    return [by_comm[cid] for cid in sorted(by_comm)]


def community_indices(
    graph: MutualContactsGraph,
    partition: CommunityPartition,
    labels: Mapping[str, HostLabel],
    report: DetectionReport | None = None,
) -> dict:
    """BSI/BAI/BLSI of the host-level communities against the labels."""
    communities = host_communities(graph, partition, report)
    groups = botnet_groups_from_labels(labels)
    bots = {h for h, lab in labels.items() if lab.role == "bot"}
    legits = {h for h, lab in labels.items() if lab.role == "legit_p2p"}
    out = {
        "bsi": bsi(groups, communities),
        "bai": bai(groups, communities),
    }
    if bots and legits:
        out["blsi"] = blsi(bots, legits, communities)
    return out
