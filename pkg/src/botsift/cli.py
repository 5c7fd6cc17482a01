"""Command line interface: detect, generate, attack, sweep."""

from __future__ import annotations

import argparse
import csv
import itertools
import json
import random
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .attacks import ammkl, ammkl_post_filter, default_peer_pool, pmmkl
from .community import dump_partition
from .flows import parse_flow_file, parse_label_file
from .mcg import dump_graph
from .metrics import community_indices, detection_metrics, group_detection_rates
from .p2p import dump_clusters
from .pipeline import StageError, Thresholds, run_pipeline, report_dict, write_report
from .synth import SynthConfig, generate_dataset, read_dataset, write_dataset


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="botsift",
        description="P2P botnet detection over network-flow records",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="run the detection pipeline on a flow CSV")
    p.add_argument("--flows", required=True, help="flow CSV file")
    p.add_argument("--labels", help="optional label CSV for metrics")
    p.add_argument("--config", help="JSON file with threshold values")
    p.add_argument("--theta-dd", type=int, help="destination diversity threshold")
    p.add_argument("--theta-mcr", type=float, help="mutual contacts ratio edge threshold")
    p.add_argument("--theta-avgddr", type=float, help="community mean DDR threshold")
    p.add_argument("--theta-avgmcr", type=float, help="community mean MCR threshold")
    p.add_argument("--resolution", type=float, help="community detection resolution")
    p.add_argument("--out", default="report.json", help="report JSON output path")
    p.add_argument("--plot", help="also render a community score figure (PNG)")
    p.add_argument("--dump-clusters", help="write retained cluster dump CSV")
    p.add_argument("--dump-graph", help="write graph dump")
    p.add_argument("--dump-partition", help="write cluster/community assignment CSV")
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("generate", help="generate a labeled synthetic corpus")
    p.add_argument("--config", required=True, help="JSON SynthConfig file")
    p.add_argument("--out-dir", required=True, help="output dataset directory")
    p.add_argument("--seed", type=int, help="override the config seed")
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("attack", help="apply an evasion attack to a dataset")
    p.add_argument("--in", dest="in_dir", required=True, help="input dataset directory")
    p.add_argument("--type", dest="attack", required=True, choices=("pmmkl", "ammkl"))
    p.add_argument("--gamma", type=float, default=0.5, help="ammkl padding rate")
    p.add_argument(
        "--injection",
        choices=("pre", "post"),
        default="post",
        help="pad all bot clusters (pre) or only diversity-filtered ones (post)",
    )
    p.add_argument("--theta-dd", type=int, default=30, help="filter for post injection")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output dataset directory")
    p.set_defaults(func=cmd_attack)

    p = sub.add_parser("sweep", help="grid sweep over thresholds, CSV + figure out")
    p.add_argument("--flows", required=True)
    p.add_argument("--labels", required=True)
    p.add_argument("--grid", required=True, help="JSON file or inline JSON object of threshold lists")
    p.add_argument("--jobs", type=int, default=1, help="concurrent sweep cells")
    p.add_argument("--out", default="sweep.csv", help="metrics table output path")
    p.add_argument("--no-plots", action="store_true", help="skip the figure")
    p.set_defaults(func=cmd_sweep)
    return parser


def _thresholds_from_args(args) -> Thresholds:
    base = Thresholds.from_file(args.config) if args.config else Thresholds()
    return base.override(
        theta_dd=args.theta_dd,
        theta_mcr=args.theta_mcr,
        theta_avgddr=args.theta_avgddr,
        theta_avgmcr=args.theta_avgmcr,
        resolution=args.resolution,
    )


def cmd_detect(args) -> int:
    thresholds = _thresholds_from_args(args)
    try:
        flows = parse_flow_file(args.flows)
    except Exception as exc:
        raise StageError("ingest", exc) from exc
    result = run_pipeline(flows, thresholds)

    metrics = None
    if args.labels:
        try:
            labels = parse_label_file(args.labels)
        except Exception as exc:
            raise StageError("ingest", exc) from exc
        metrics = detection_metrics(result.report, labels)
        metrics["rates"] = group_detection_rates(result.report, labels)
        metrics.update(community_indices(result.graph, result.partition, labels, result.report))

    write_report(result, args.out, metrics)
    if args.dump_clusters:
        dump_clusters(result.retained, args.dump_clusters)
    if args.dump_graph:
        dump_graph(result.graph, args.dump_graph)
    if args.dump_partition:
        dump_partition(result.partition, args.dump_partition)
    if args.plot:
        from .plots import plot_communities

        plot_communities(report_dict(result), args.plot)

    report = result.report
    print(
        f"{len(result.clusters)} clusters, {len(result.retained)} retained as P2P, "
        f"{len(result.graph)} graph vertices, {len(result.partition.communities)} communities"
    )
    print(f"bot hosts reported: {len(report.bot_hosts)}")
    if metrics:
        print(
            f"precision={metrics['precision']:.3f} recall={metrics['recall']:.3f} "
            f"f_score={metrics['f_score']:.3f} fp={metrics['fp']}"
        )
    print(f"report written to {args.out}")
    return 0


def cmd_generate(args) -> int:
    config = SynthConfig.from_file(args.config)
    if args.seed is not None:
        config = SynthConfig.from_dict({**config.to_dict(), "seed": args.seed})
    dataset = generate_dataset(config)
    write_dataset(dataset, args.out_dir, config)
    print(
        f"wrote {len(dataset.flows)} flows for {len(dataset.labels)} hosts to {args.out_dir}"
    )
    return 0


def cmd_attack(args) -> int:
    dataset = read_dataset(args.in_dir)
    rng = random.Random(args.seed)
    if args.attack == "pmmkl":
        attacked = pmmkl(dataset, rng)
    else:
        theta_dd = args.theta_dd if args.injection == "post" else None
        pool = default_peer_pool(dataset, args.gamma, theta_dd)
        if args.injection == "post":
            attacked = ammkl_post_filter(dataset, args.gamma, pool, rng, args.theta_dd)
        else:
            attacked = ammkl(dataset, args.gamma, pool, rng)
    write_dataset(attacked, args.out)
    print(
        f"{args.attack} applied: {len(dataset.flows)} -> {len(attacked.flows)} flows, "
        f"output in {args.out}"
    )
    return 0


def _parse_grid(spec: str) -> dict[str, list]:
    if spec.lstrip().startswith("{"):
        data = json.loads(spec)
    else:
        with open(spec, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    axes = ("theta_dd", "theta_mcr", "theta_avgddr", "theta_avgmcr", "resolution")
    unknown = set(data) - set(axes)
    if unknown:
        raise ValueError(f"unknown grid axes: {sorted(unknown)}")
    defaults = Thresholds().as_dict()
    grid = {}
    for axis in axes:
        values = data.get(axis, [defaults[axis]])
        if not isinstance(values, list):
            values = [values]
        if not values:
            raise ValueError(f"grid axis {axis} is empty")
        grid[axis] = values
    return grid


def cmd_sweep(args) -> int:
    try:
        flows = parse_flow_file(args.flows)
        labels = parse_label_file(args.labels)
    except Exception as exc:
        raise StageError("ingest", exc) from exc
    grid = _parse_grid(args.grid)
    axes = list(grid)
    cells = [dict(zip(axes, combo)) for combo in itertools.product(*(grid[a] for a in axes))]
    groups = sorted({lab.group for lab in labels.values() if lab.role == "bot"})

    def run_cell(cell: dict) -> dict:
        result = run_pipeline(flows, Thresholds(**cell))
        row = dict(cell)
        row.update(detection_metrics(result.report, labels))
        rates = group_detection_rates(result.report, labels)
        for name in groups:
            row[f"rate_{name}"] = rates.get(name, 0.0)
        return row

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(run_cell, cells))
    else:
        rows = [run_cell(cell) for cell in cells]

    columns = axes + [f"rate_{name}" for name in groups] + [
        "precision",
        "recall",
        "f_score",
        "fp",
        "fn",
    ]
    with open(args.out, "w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        for row in rows:
            writer.writerow({c: row[c] for c in columns})
    print(f"{len(rows)} sweep rows written to {args.out}")

    if not args.no_plots:
        from .plots import plot_sweep

        fig_path = str(Path(args.out).with_suffix(".png"))
        plot_sweep(rows, fig_path)
        print(f"figure written to {fig_path}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except StageError as exc:
        print(f"error at {exc}", file=sys.stderr)
        return 1
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
