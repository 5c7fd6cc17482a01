"""End-to-end detection pipeline and report serialization.

Stages: ingest -> cluster -> p2p_filter -> mcg -> community -> detect.
Failures are wrapped in StageError so callers can attribute them.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from typing import Mapping, Sequence

from .community import CommunityPartition, louvain
from .detect import DetectionReport, detect
from .flows import FlowKey, FlowRecord, ip_value, parse_flow_file
from .mcg import MutualContactsGraph, build_mcg
from .p2p import FlowCluster, cluster_flows, detect_p2p


@dataclass(frozen=True)
class Thresholds:
    """Pipeline thresholds; the defaults are the bundled synthetic-corpus
    operating point and should be retuned per deployment window."""

    theta_dd: int = 30
    theta_mcr: float = 0.1
    theta_avgddr: float = 0.6
    theta_avgmcr: float = 0.15
    resolution: float = 1.0

    @classmethod
    def from_file(cls, path) -> "Thresholds":
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
        unknown = set(data) - set(cls.__dataclass_fields__)
        if unknown:
            raise ValueError(f"unknown threshold fields: {sorted(unknown)}")
        return cls(**data)

    def override(self, **kwargs) -> "Thresholds":
        kwargs = {k: v for k, v in kwargs.items() if v is not None}
        return replace(self, **kwargs)

    def as_dict(self) -> dict:
        return {
            "theta_dd": self.theta_dd,
            "theta_mcr": self.theta_mcr,
            "theta_avgddr": self.theta_avgddr,
            "theta_avgmcr": self.theta_avgmcr,
            "resolution": self.resolution,
        }


class StageError(RuntimeError):
    """Pipeline failure with the stage it occurred in."""

    def __init__(self, stage: str, cause: BaseException):
        super().__init__(f"stage {stage!r}: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass
class PipelineResult:
    thresholds: Thresholds
    clusters: dict[FlowKey, FlowCluster]
    retained: dict[FlowKey, FlowCluster]
    graph: MutualContactsGraph
    partition: CommunityPartition
    report: DetectionReport


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        raise StageError(name, exc) from exc


def run_pipeline(flows: Sequence[FlowRecord], thresholds: Thresholds) -> PipelineResult:
    """Run clustering through detection on in-memory flows."""
    clusters = _stage("cluster", cluster_flows, flows)
    retained = _stage("p2p_filter", detect_p2p, clusters, thresholds.theta_dd)
    graph = _stage("mcg", build_mcg, retained, thresholds.theta_mcr)
    partition = _stage("community", louvain, graph, thresholds.resolution)
    report = _stage(
        "detect",
        detect,
        graph,
        partition,
        thresholds.theta_avgddr,
        thresholds.theta_avgmcr,
        thresholds.as_dict(),
    )
    return PipelineResult(thresholds, clusters, retained, graph, partition, report)


def run_detect(flow_path, thresholds: Thresholds) -> PipelineResult:
    """Run the full pipeline on a flow CSV file."""
    flows = _stage("ingest", parse_flow_file, flow_path)
    return run_pipeline(flows, thresholds)


def report_dict(result: PipelineResult, metrics: Mapping | None = None) -> dict:
    """JSON-ready report with stable key and element order."""
    report = result.report
    out = {
        "thresholds": result.thresholds.as_dict(),
        "n_clusters": len(result.clusters),
        "n_p2p_clusters": len(result.retained),
        "communities": [
            {
                "id": s.community_id,
                "size": s.size,
                "avgddr": s.avgddr,
                "avgmcr": s.avgmcr,
                "selected": s.community_id in report.botnet_communities,
            }
            for s in report.scores
        ],
        "cliques": {
            str(cid): [list(c) for c in report.cliques[cid]] for cid in sorted(report.cliques)
        },
        "bot_clusters": sorted(report.bot_clusters),
        "bot_hosts": sorted(report.bot_hosts, key=ip_value),
    }
    if metrics is not None:
        out["metrics"] = dict(metrics)
    return out


def write_report(result: PipelineResult, path, metrics: Mapping | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(report_dict(result, metrics), fh, indent=2)
        fh.write("\n")
