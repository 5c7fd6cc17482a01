"""Flow clustering and destination-diversity based P2P traffic filtering.

Flows are grouped by FlowKey into clusters; a cluster is kept as P2P
management traffic when its destinations span at least theta_dd distinct
/16 prefixes. Clustering is a pure group-by: it can be computed over any
partition of the input and merged, with an identical result.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping

from .flows import FlowKey, FlowRecord, PatternKey, ip_value, prefix16


@dataclass(frozen=True, slots=True)
class FlowCluster:
    """All flows sharing one FlowKey, with their distinct destination contacts."""

    key: FlowKey
    contacts: frozenset[str]
    dd: int
    flow_count: int

    @property
    def pattern(self) -> PatternKey:
        return self.key.pattern


def make_cluster(key: FlowKey, contacts: Iterable[str], flow_count: int) -> FlowCluster:
    contacts = frozenset(contacts)
    dd = len({prefix16(c) for c in contacts})
    return FlowCluster(key, contacts, dd, flow_count)


def cluster_flows(flows: Iterable[FlowRecord]) -> dict[FlowKey, FlowCluster]:
    """Group flows by (src, proto, bpp_out, bpp_in); input order is irrelevant."""
    contacts: dict[FlowKey, set[str]] = {}
    counts: dict[FlowKey, int] = {}
    for flow in flows:
        key = flow.key
        bucket = contacts.get(key)
        if bucket is None:
            bucket = contacts[key] = set()
            counts[key] = 0
        bucket.add(flow.dst)
        counts[key] += 1
    return {key: make_cluster(key, c, counts[key]) for key, c in contacts.items()}


def merge_cluster_maps(
    parts: Iterable[Mapping[FlowKey, FlowCluster]],
) -> dict[FlowKey, FlowCluster]:
    """Merge cluster maps built from parts of one corpus.

    The merge is associative and commutative (set union over contacts, sum
    over flow counts), so any partitioning of the input flows yields the
    same final map.
    """
    contacts: dict[FlowKey, set[str]] = {}
    counts: dict[FlowKey, int] = {}
    for part in parts:
        for key, cluster in part.items():
            bucket = contacts.get(key)
            if bucket is None:
                bucket = contacts[key] = set()
                counts[key] = 0
            bucket.update(cluster.contacts)
            counts[key] += cluster.flow_count
    return {key: make_cluster(key, c, counts[key]) for key, c in contacts.items()}


def destination_diversity(cluster: FlowCluster) -> int:
    """Number of distinct /16 prefixes among the cluster's contacts."""
    return len({prefix16(c) for c in cluster.contacts})


def detect_p2p(
    clusters: Mapping[FlowKey, FlowCluster], theta_dd: int
) -> dict[FlowKey, FlowCluster]:
    """Keep clusters whose destination diversity reaches theta_dd (inclusive)."""
    if theta_dd < 1:
        raise ValueError("theta_dd must be a positive integer")
    return {key: c for key, c in clusters.items() if c.dd >= theta_dd}


def cluster_sort_key(cluster: FlowCluster):
    key = cluster.key
    return (ip_value(key.src), key.proto, key.bpp_out, key.bpp_in)


def sorted_clusters(clusters: Mapping[FlowKey, FlowCluster]) -> list[FlowCluster]:
    """Canonical cluster order: numeric source address, then key fields."""
    return sorted(clusters.values(), key=cluster_sort_key)


def dump_clusters(clusters: Mapping[FlowKey, FlowCluster], path) -> None:
    """Debug dump, one line per cluster: src,proto,bpp_out,bpp_in,dd,contacts."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# src_ip,proto,bpp_out,bpp_in,dd,contact_count\n")
        for c in sorted_clusters(clusters):
            k = c.key
            fh.write(f"{k.src},{k.proto},{k.bpp_out},{k.bpp_in},{c.dd},{len(c.contacts)}\n")
