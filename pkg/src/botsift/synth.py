"""Synthetic labeled flow corpora: bipartite background plus planted hosts.

The generator builds a background contact graph whose internal side is
sampled by alternating two-coloring, then plants botnets (tight shared
contact cores, one shared pattern per botnet) and legitimate P2P hosts
(divergent contact sets) by remapping their source addresses onto sampled
internal background hosts. All randomness flows from one seeded
random.Random (Mersenne Twister), so a config reproduces its corpus
byte for byte.

Address layout, chosen so planted traffic can never collide with the
internal side: internal hosts live in 10.0.0.0/8, destination addresses
are allocated from fresh /16 blocks starting at 20.0.0.0, and planted
placeholder sources (replaced during assembly) come from 225.0.0.0/8.
"""

from __future__ import annotations

import json
import math
import random
from collections import deque
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .flows import (
    FlowRecord,
    HostLabel,
    PatternKey,
    ip_value,
    parse_flow_file,
    parse_label_file,
    write_flow_file,
    write_label_file,
)

POPULAR_SERVER_BLOCKS = 4
POPULAR_SERVERS_PER_BLOCK = 4
MIN_LOCAL_CONTACTS = 24
MAX_LOCAL_CONTACTS = 60


class SynthError(ValueError):
    """Unsatisfiable generator configuration or sampling failure."""


@dataclass(frozen=True)
class SynthConfig:
    """Generator knobs.

    external_pool budgets the distinct local destination addresses the
    background may draw (popular servers excluded); bot_mcr_target and
    legit_mcr_ceiling shape the pairwise contact overlap of planted hosts;
    bot_ddr_target sets the /16 spread of planted contact sets;
    flows_per_cluster is the contact count of each planted cluster and
    clusters_per_host how many clusters a background host splits its
    contacts into.
    """

    seed: int = 0
    n_internal: int = 500
    n_bots_per_botnet: tuple[int, ...] = (5, 4, 3)
    n_legit_p2p: int = 20
    external_pool: int = 20000
    bot_mcr_target: float = 0.5
    bot_ddr_target: float = 0.9
    legit_mcr_ceiling: float = 0.05
    flows_per_cluster: int = 50
    clusters_per_host: int = 2

    def __post_init__(self):
        object.__setattr__(self, "n_bots_per_botnet", tuple(self.n_bots_per_botnet))
        if self.n_internal < 1:
            raise SynthError("n_internal must be at least 1")
        if self.n_legit_p2p < 0:
            raise SynthError("n_legit_p2p must be nonnegative")
        for size in self.n_bots_per_botnet:
            if size < 3:
                raise SynthError(
                    f"botnet size {size} is below the 3-host clique floor"
                )
        if self.external_pool < 1:
            raise SynthError("external_pool must be positive")
        for name in ("bot_mcr_target", "bot_ddr_target", "legit_mcr_ceiling"):
            value = getattr(self, name)
            if not 0.0 < value <= 1.0:
                raise SynthError(f"{name} must lie in (0, 1], got {value}")
        if self.flows_per_cluster < 1 or self.clusters_per_host < 1:
            raise SynthError("flows_per_cluster and clusters_per_host must be at least 1")
        planted = sum(self.n_bots_per_botnet) + self.n_legit_p2p
        if planted > self.n_internal:
            raise SynthError(
                f"{planted} planted hosts cannot be mapped onto {self.n_internal} internal hosts"
            )

    @classmethod
    def from_dict(cls, data: Mapping) -> "SynthConfig":
        known = {f for f in cls.__dataclass_fields__}
        unknown = set(data) - known
        if unknown:
            raise SynthError(f"unknown config fields: {sorted(unknown)}")
        return cls(**data)

    @classmethod
    def from_file(cls, path) -> "SynthConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "n_internal": self.n_internal,
            "n_bots_per_botnet": list(self.n_bots_per_botnet),
            "n_legit_p2p": self.n_legit_p2p,
            "external_pool": self.external_pool,
            "bot_mcr_target": self.bot_mcr_target,
            "bot_ddr_target": self.bot_ddr_target,
            "legit_mcr_ceiling": self.legit_mcr_ceiling,
            "flows_per_cluster": self.flows_per_cluster,
            "clusters_per_host": self.clusters_per_host,
        }


@dataclass
class LabeledDataset:
    """Flow corpus plus ground-truth host labels and the internal host set."""

    flows: list[FlowRecord]
    labels: dict[str, HostLabel]
    internal_hosts: set[str]

    def copy(self) -> "LabeledDataset":
        return LabeledDataset(list(self.flows), dict(self.labels), set(self.internal_hosts))


class _Allocator:
    """Deterministic address and pattern source shared by one generation run.

    Handing out fresh /16 blocks and fresh addresses within them keeps
    prefix-diversity targets exact and guarantees planted contact sets
    never collide with each other or with internal hosts.
    """

    def __init__(self):
        self._next_block = 0
        self._cursor: dict[tuple[int, int], int] = {}
        self._patterns: set[PatternKey] = set()
        self._next_planted = 0

    def fresh_block(self) -> tuple[int, int]:
        k = self._next_block
        self._next_block += 1
        a = 20 + k // 256
        if a > 219:
            raise SynthError("destination /16 block space exhausted")
        return (a, k % 256)

    def fresh_addresses(self, block: tuple[int, int], count: int) -> list[str]:
        a, b = block
        start = self._cursor.get(block, 0)
        if start + count > 63000:
            raise SynthError(f"block {a}.{b}.0.0/16 exhausted")
        self._cursor[block] = start + count
        return [f"{a}.{b}.{1 + n // 250}.{1 + n % 250}" for n in range(start, start + count)]

    def planted_host(self) -> str:
        k = self._next_planted
        self._next_planted += 1
        if k >= 62500:
            raise SynthError("planted host address space exhausted")
        return f"225.0.{k // 250}.{1 + k % 250}"

    def fresh_pattern(self, rng: random.Random) -> PatternKey:
        while True:
            pattern = PatternKey(
                rng.choice(PROTO_CHOICES), rng.randint(40, 1500), rng.randint(40, 1500)
            )
            if pattern not in self._patterns:
                self._patterns.add(pattern)
                return pattern


PROTO_CHOICES = ("tcp", "udp")


def _internal_ip(index: int) -> str:
    if index >= 61000:
        raise SynthError("internal host address space exhausted")
    return f"10.{index // 250}.0.{1 + index % 250}"


def _addresses_over_blocks(
    alloc: _Allocator, rng: random.Random, count: int, n_prefixes: int
) -> list[str]:
    """count fresh addresses spanning exactly min(n_prefixes, count) /16 blocks."""
    if count == 0:
        return []
    n_prefixes = max(1, min(n_prefixes, count))
    blocks = [alloc.fresh_block() for _ in range(n_prefixes)]
    per_block = [1] * n_prefixes
    for _ in range(count - n_prefixes):
        per_block[rng.randrange(n_prefixes)] += 1
    out: list[str] = []
    for block, k in zip(blocks, per_block):
        out.extend(alloc.fresh_addresses(block, k))
    return out


def two_color_sample(
    background_graph: Mapping[str, Iterable[str]],
    target: int,
    seed: int | random.Random = 0,
    start: str | None = None,
) -> tuple[set[str], set[str]]:
    """Sample an internal host set by alternating BFS two-coloring.

    Starting from `start` (seeded-random vertex when omitted), neighbors
    are colored with the opposite color until both color classes have
    reached `target` or the reachable component is exhausted. The start's
    color class is preferred; whichever qualifying class is chosen gets
    trimmed to exactly `target` hosts in coloring order and returned as
    the internal set, every other vertex as the external set. BFS order
    guarantees each kept host shares at least one contact with an earlier
    kept host.
    """
    if target < 1:
        raise SynthError("target must be at least 1")
    vertices = sorted(background_graph)
    if not vertices:
        raise SynthError("background graph is empty")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    if start is None:
        start = rng.choice(vertices)
    elif start not in background_graph:
        raise SynthError(f"start vertex {start!r} not in graph")

    color = {start: 0}
    order: tuple[list[str], list[str]] = ([start], [])
    counts = [1, 0]
    queue = deque([start])
    while queue and not (counts[0] >= target and counts[1] >= target):
        u = queue.popleft()
        opposite = 1 - color[u]
        for v in sorted(background_graph[u]):
            if v not in color:
                color[v] = opposite
                order[opposite].append(v)
                counts[opposite] += 1
                queue.append(v)

    preferred = (0, 1) if counts[0] >= target else (1, 0)
    if counts[preferred[0]] < target:
        raise SynthError(
            f"two-coloring reached only {counts[0]}/{counts[1]} hosts per color, need {target}"
        )
    chosen = preferred[0]
    internal = set(order[chosen][:target])
    external = set(background_graph) - internal
    return internal, external


def _split_contacts(
    contacts: Sequence[str], n_clusters: int, rng: random.Random
) -> list[list[str]]:
    shuffled = list(contacts)
    rng.shuffle(shuffled)
    n_clusters = min(n_clusters, len(shuffled))
    size = len(shuffled) // n_clusters
    extra = len(shuffled) % n_clusters
    chunks = []
    pos = 0
    for i in range(n_clusters):
        take = size + (1 if i < extra else 0)
        chunks.append(shuffled[pos : pos + take])
        pos += take
    return [c for c in chunks if c]


def generate_background(
    config: SynthConfig, rng: random.Random, alloc: _Allocator | None = None
) -> LabeledDataset:
    """Background fragment: low-diversity hosts sharing popular servers.

    Every host contacts popular server 0 (keeping the contact graph
    connected and giving each internal host a mutual contact) plus private
    addresses concentrated in 1-3 home /16 blocks, so no background
    cluster comes near P2P-level destination diversity.
    """
    alloc = alloc or _Allocator()
    popular: list[str] = []
    for _ in range(POPULAR_SERVER_BLOCKS):
        popular.extend(alloc.fresh_addresses(alloc.fresh_block(), POPULAR_SERVERS_PER_BLOCK))

    locals_cap = min(MAX_LOCAL_CONTACTS, config.external_pool // config.n_internal)
    if locals_cap < MIN_LOCAL_CONTACTS:
        raise SynthError(
            "external_pool too small: background hosts need at least "
            f"{MIN_LOCAL_CONTACTS} local contacts each to keep pairwise overlap low"
        )
    universe = config.n_internal + max(2, config.n_internal // 10)
    budget = config.external_pool

    graph: dict[str, set[str]] = {}
    contacts_of: dict[str, list[str]] = {}
    for i in range(universe):
        host = _internal_ip(i)
        n_local = rng.randint(MIN_LOCAL_CONTACTS, locals_cap)
        if n_local > budget:
            raise SynthError("external_pool exhausted while drawing background contacts")
        budget -= n_local
        home_blocks = rng.randint(1, 3)
        local = _addresses_over_blocks(alloc, rng, n_local, home_blocks)
        servers = [popular[0]]
        if rng.random() < 0.7:
            servers.append(rng.choice(popular[1:]))
        contacts = servers + local
        contacts_of[host] = contacts
        graph.setdefault(host, set()).update(contacts)
        for c in contacts:
            graph.setdefault(c, set()).add(host)

    hosts_sorted = sorted(contacts_of, key=ip_value)
    start = rng.choice(hosts_sorted)
    internal, _ = two_color_sample(graph, config.n_internal, seed=rng.randrange(2**32), start=start)

    flows: list[FlowRecord] = []
    labels: dict[str, HostLabel] = {}
    for host in sorted(internal, key=ip_value):
        usable = [c for c in contacts_of[host] if c not in internal]
        for chunk in _split_contacts(usable, config.clusters_per_host, rng):
            pattern = alloc.fresh_pattern(rng)
            for dst in chunk:
                flows.append(FlowRecord(host, dst, pattern.proto, pattern.bpp_out, pattern.bpp_in))
        labels[host] = HostLabel(host, "background", "")
    return LabeledDataset(flows, labels, set(internal))


def _core_tail_fragment(
    name: str,
    role: str,
    n_hosts: int,
    core_size: int,
    config: SynthConfig,
    rng: random.Random,
    alloc: _Allocator,
) -> LabeledDataset:
    """Hosts sharing one pattern and a common contact core plus private tails."""
    n = config.flows_per_cluster
    pattern = alloc.fresh_pattern(rng)
    tail_size = n - core_size
    core = _addresses_over_blocks(
        alloc, rng, core_size, round(config.bot_ddr_target * core_size)
    )
    flows: list[FlowRecord] = []
    labels: dict[str, HostLabel] = {}
    for _ in range(n_hosts):
        host = alloc.planted_host()
        tail = _addresses_over_blocks(
            alloc, rng, tail_size, round(config.bot_ddr_target * tail_size)
        )
        for dst in core + tail:
            flows.append(FlowRecord(host, dst, pattern.proto, pattern.bpp_out, pattern.bpp_in))
        labels[host] = HostLabel(host, role, name)
    return LabeledDataset(flows, labels, set())


def plant_botnet(
    name: str,
    n_bots: int,
    config: SynthConfig,
    rng: random.Random,
    alloc: _Allocator | None = None,
) -> LabeledDataset:
    """Botnet fragment: one cluster per bot, all sharing the botnet pattern.

    A shared core of c addresses plus per-bot tails of t addresses realizes
    pairwise Jaccard c/(c+2t); c is sized so that ratio lands on
    bot_mcr_target.
    """
    if n_bots < 3:
        raise SynthError(f"botnet {name!r} needs at least 3 bots to form a clique")
    alloc = alloc or _Allocator()
    n = config.flows_per_cluster
    j = config.bot_mcr_target
    core_size = min(n, round(n * 2 * j / (1 + j)))
    return _core_tail_fragment(name, "bot", n_bots, core_size, config, rng, alloc)


def plant_legit_p2p(
    name: str,
    n_hosts: int,
    config: SynthConfig,
    rng: random.Random,
    alloc: _Allocator | None = None,
) -> LabeledDataset:
    """Legitimate P2P fragment: divergent contact sets under the MCR ceiling."""
    if n_hosts < 1:
        raise SynthError("a legitimate P2P application needs at least one host")
    alloc = alloc or _Allocator()
    n = config.flows_per_cluster
    ceiling = config.legit_mcr_ceiling
    core_size = math.floor(2 * ceiling * n / (1 + ceiling))  # realized ratio stays <= ceiling
    return _core_tail_fragment(name, "legit_p2p", n_hosts, core_size, config, rng, alloc)


def assemble(
    fragments: Sequence[LabeledDataset], config: SynthConfig, rng: random.Random
) -> LabeledDataset:
    """Remap planted sources onto sampled internal hosts and merge flows.

    Fragments with internal hosts form the base; the others are planted
    and get their placeholder source addresses rewritten to randomly
    sampled internal hosts, whose labels they take over. Any flow between
    two internal hosts is dropped to enforce the bipartite structure.
    """
    internal: set[str] = set()
    for fragment in fragments:
        internal |= fragment.internal_hosts

    flows: list[FlowRecord] = []
    labels: dict[str, HostLabel] = {}
    planted: list[LabeledDataset] = []
    for fragment in fragments:
        if fragment.internal_hosts:
            flows.extend(fragment.flows)
            labels.update(fragment.labels)
        else:
            planted.append(fragment)

    planted_hosts = [h for f in planted for h in sorted(f.labels, key=ip_value)]
    pool = sorted(internal, key=ip_value)
    if len(planted_hosts) > len(pool):
        raise SynthError(
            f"{len(planted_hosts)} planted hosts but only {len(pool)} internal hosts"
        )
    targets = rng.sample(pool, len(planted_hosts))
    mapping = dict(zip(planted_hosts, targets))

    for fragment in planted:
        for f in fragment.flows:
            flows.append(FlowRecord(mapping[f.src], f.dst, f.proto, f.bpp_out, f.bpp_in))
        for host in sorted(fragment.labels, key=ip_value):
            label = fragment.labels[host]
            new_host = mapping[host]
            labels[new_host] = HostLabel(new_host, label.role, label.group)

    flows = [f for f in flows if f.dst not in internal]

    sources = {f.src for f in flows}
    for host, label in labels.items():
        if label.role in ("bot", "legit_p2p") and host not in sources:
            raise SynthError(f"planted host {host} lost all flows during assembly")
    return LabeledDataset(flows, labels, internal)


def generate_dataset(config: SynthConfig) -> LabeledDataset:
    """Full corpus from one config: background, botnets, legitimate apps."""
    rng = random.Random(config.seed)
    alloc = _Allocator()
    fragments = [generate_background(config, rng, alloc)]
    for i, size in enumerate(config.n_bots_per_botnet, start=1):
        fragments.append(plant_botnet(f"botnet{i}", size, config, rng, alloc))
    remaining = config.n_legit_p2p
    app = 1
    while remaining > 0:
        take = min(10, remaining)
        fragments.append(plant_legit_p2p(f"p2papp{app}", take, config, rng, alloc))
        remaining -= take
        app += 1
    return assemble(fragments, config, rng)


def write_dataset(dataset: LabeledDataset, out_dir, config: SynthConfig | None = None) -> None:
    """Write flows.csv, labels.csv and (when a config is given) manifest.json."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_flow_file(out / "flows.csv", dataset.flows)
    write_label_file(out / "labels.csv", dataset.labels)
    if config is not None:
        manifest = {
            "config": config.to_dict(),
            "n_flows": len(dataset.flows),
            "n_hosts": len(dataset.labels),
            "n_bots": sum(1 for l in dataset.labels.values() if l.role == "bot"),
            "n_legit_p2p": sum(1 for l in dataset.labels.values() if l.role == "legit_p2p"),
        }
        with open(out / "manifest.json", "w", encoding="utf-8") as fh:
            json.dump(manifest, fh, indent=2)
            fh.write("\n")


def read_dataset(path) -> LabeledDataset:
    """Load a dataset directory written by write_dataset."""
    base = Path(path)
    flows = parse_flow_file(base / "flows.csv")
    labels = parse_label_file(base / "labels.csv")
    return LabeledDataset(flows, labels, set(labels))
