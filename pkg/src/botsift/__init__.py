"""Batch detection of P2P botnet hosts in network-flow records.

The pipeline clusters flows by source and traffic pattern, keeps clusters
with high destination diversity, links same-pattern clusters of different
hosts by their shared contacts, detects communities, and reports hosts
whose communities score and shape like botnets. A seeded synthetic corpus
generator, two evasion-attack simulators and an evaluation harness round
out the toolkit.
"""

from .attacks import AttackError, ammkl, ammkl_post_filter, default_peer_pool, pmmkl
from .community import CommunityPartition, louvain, louvain_with_history, modularity
from .detect import (
    CommunityScore,
    DetectionReport,
    avgddr,
    avgmcr,
    detect,
    filter_botnet_communities,
    max_clique_iterative,
)
from .flows import (
    FlowKey,
    FlowParseError,
    FlowRecord,
    HostLabel,
    PatternKey,
    derive_bpp,
    parse_flow_file,
    parse_label_file,
    prefix16,
    write_flow_file,
    write_label_file,
)
from .mcg import McgEdge, McgVertex, MutualContactsGraph, build_mcg, ddr, mcr
from .metrics import (
    PairCounts,
    bai,
    blsi,
    bsi,
    community_indices,
    detection_metrics,
    group_detection_rates,
    pair_counts,
)
from .p2p import (
    FlowCluster,
    cluster_flows,
    destination_diversity,
    detect_p2p,
    merge_cluster_maps,
)
from .pipeline import PipelineResult, StageError, Thresholds, run_detect, run_pipeline
from .synth import (
    LabeledDataset,
    SynthConfig,
    SynthError,
    assemble,
    generate_background,
    generate_dataset,
    plant_botnet,
    plant_legit_p2p,
    read_dataset,
    two_color_sample,
    write_dataset,
)

__version__ = "0.1.0"
