"""Evasion-attack simulations as dataset-to-dataset transformations.

Two attacks that make bots mimic legitimate P2P applications:

* pmmkl overlays legitimate P2P traffic onto bot hosts by remapping the
  source address of randomly chosen legitimate hosts to bot addresses, so
  each bot host carries both kinds of clusters.
* ammkl pads every targeted bot flow cluster with ceil(gamma * n) extra
  peers drawn from a disjoint pool, diluting pairwise mutual-contact
  ratios while keeping the shared contacts intact.
"""

from __future__ import annotations

import math
import random
from typing import Iterable

from .flows import FlowKey, FlowRecord, HostLabel, ip_value
from .p2p import cluster_flows
from .synth import LabeledDataset


class AttackError(ValueError):
    """Attack preconditions not met (pool too small, overlap, ...)."""


def pmmkl(dataset: LabeledDataset, rng: random.Random) -> LabeledDataset:
    """Merge one distinct legitimate P2P host into every bot host.

    A uniformly random bijection pairs bots with legitimate hosts; each
    chosen legitimate host's flows are re-sourced to its bot's address and
    its own label entry disappears (the host no longer exists separately).
    Bot labels are unchanged. The flow multiset is conserved up to the
    source rewrite.
    """
    bots = sorted(
        (h for h, lab in dataset.labels.items() if lab.role == "bot"), key=ip_value
    )
    legits = sorted(
        (h for h, lab in dataset.labels.items() if lab.role == "legit_p2p"), key=ip_value
    )
    if not bots:
        return dataset.copy()
    if len(legits) < len(bots):
        raise AttackError(
            f"need at least {len(bots)} legitimate P2P hosts to cover the bots, have {len(legits)}"
        )
    chosen = rng.sample(legits, len(bots))
    remap = dict(zip(chosen, bots))
    flows = [
        FlowRecord(remap[f.src], f.dst, f.proto, f.bpp_out, f.bpp_in)
        if f.src in remap
        else f
        for f in dataset.flows
    ]
    labels = {h: lab for h, lab in dataset.labels.items() if h not in remap}
    internal = set(dataset.internal_hosts) - set(remap)
    return LabeledDataset(flows, labels, internal)


def _pad_clusters(
    dataset: LabeledDataset,
    gamma: float,
    peer_pool: Iterable[str],
    rng: random.Random,
    theta_dd: int | None,
) -> LabeledDataset:
    if gamma < 0:
        raise AttackError("gamma must be nonnegative")
    if gamma == 0:
        return dataset.copy()
    bots = {h for h, lab in dataset.labels.items() if lab.role == "bot"}
    clusters = cluster_flows(dataset.flows)
    bot_keys = sorted(
        (k for k in clusters if k.src in bots),
        key=lambda k: (ip_value(k.src), k.proto, k.bpp_out, k.bpp_in),
    )
    if theta_dd is not None:
        bot_keys = [k for k in bot_keys if clusters[k].dd >= theta_dd]

    bot_contacts: set[str] = set()
    for k in bot_keys:
        bot_contacts |= clusters[k].contacts
    pool = sorted(set(peer_pool), key=ip_value)
    overlap = bot_contacts & set(pool)
    if overlap:
        raise AttackError(
            f"peer pool overlaps {len(overlap)} existing bot contacts (e.g. {min(overlap, key=ip_value)})"
        )
    need = sum(math.ceil(gamma * len(clusters[k].contacts)) for k in bot_keys)
    if need > len(pool):
        raise AttackError(f"peer pool too small: need {need} addresses, have {len(pool)}")

    rng.shuffle(pool)
    cursor = 0
    extra: list[FlowRecord] = []
    for k in bot_keys:
        count = math.ceil(gamma * len(clusters[k].contacts))
        for dst in pool[cursor : cursor + count]:
            extra.append(FlowRecord(k.src, dst, k.proto, k.bpp_out, k.bpp_in))
        cursor += count
    return LabeledDataset(
        list(dataset.flows) + extra, dict(dataset.labels), set(dataset.internal_hosts)
    )


def ammkl(
    dataset: LabeledDataset,
    gamma: float,
    peer_pool: Iterable[str],
    rng: random.Random,
) -> LabeledDataset:
    """Pad every bot-owned flow cluster with ceil(gamma * n) fresh peers.

    Pads are drawn without replacement across all clusters, so padded
    contact sets stay pairwise disjoint and every diluted MCR can only
    shrink. The pool must be disjoint from existing bot contacts.
    """
    return _pad_clusters(dataset, gamma, peer_pool, rng, theta_dd=None)


def ammkl_post_filter(
    dataset: LabeledDataset,
    gamma: float,
    peer_pool: Iterable[str],
    rng: random.Random,
    theta_dd: int,
) -> LabeledDataset:
    """Pad only bot clusters that survive the destination-diversity filter.

    This realizes the padding at the point after P2P flow detection: low
    diversity clusters on bot hosts (their background traffic) stay
    untouched.
    """
    if theta_dd < 1:
        raise AttackError("theta_dd must be a positive integer")
    return _pad_clusters(dataset, gamma, peer_pool, rng, theta_dd=theta_dd)


def default_peer_pool(
    dataset: LabeledDataset, gamma: float, theta_dd: int | None = None
) -> list[str]:
    """Fresh pad addresses for ammkl, disjoint from everything in the dataset.

    Sized to the exact padding demand plus slack. Randomly selected peers
    are prefix-diverse, so consecutive pads land in distinct /16 blocks of
    240.0.0.0/8; every address already present in the dataset is skipped.
    """
    bots = {h for h, lab in dataset.labels.items() if lab.role == "bot"}
    clusters = cluster_flows(dataset.flows)
    need = 0
    for key, cluster in clusters.items():
        if key.src in bots and (theta_dd is None or cluster.dd >= theta_dd):
            need += math.ceil(gamma * len(cluster.contacts))
    used = {f.dst for f in dataset.flows} | {f.src for f in dataset.flows} | set(dataset.labels)
    n_blocks = 15 * 256  # 240.0/16 .. 254.255/16
    pool: list[str] = []
    k = 0
    while len(pool) < need + max(8, need // 10):
        block = k % n_blocks
        offset = k // n_blocks
        if offset >= 200:
            raise AttackError("pad address space exhausted")
        addr = f"{240 + block // 256}.{block % 256}.0.{1 + offset}"
        k += 1
        if addr not in used:
            pool.append(addr)
    return pool
