"""Figure rendering for detection reports and threshold sweeps."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

SWEEP_AXES = ("theta_dd", "theta_mcr", "theta_avgddr", "theta_avgmcr")


def plot_communities(report_data: dict, out_path) -> None:
    """Scatter communities by (avgmcr, avgddr); selected ones highlighted."""
    comms = report_data["communities"]
    thresholds = report_data["thresholds"]
    fig, ax = plt.subplots(figsize=(6, 4.5))
    for selected, marker, color in ((False, "o", "tab:gray"), (True, "s", "tab:red")):
        xs = [c["avgmcr"] for c in comms if c["selected"] == selected]
        ys = [c["avgddr"] for c in comms if c["selected"] == selected]
        sizes = [20 + 8 * c["size"] for c in comms if c["selected"] == selected]
        label = "selected" if selected else "rejected"
        ax.scatter(xs, ys, s=sizes, marker=marker, c=color, alpha=0.7, label=label)
    ax.axvline(thresholds["theta_avgmcr"], ls="--", lw=0.8, c="k")
    ax.axhline(thresholds["theta_avgddr"], ls="--", lw=0.8, c="k")
    ax.set_xlabel("community mean MCR")
    ax.set_ylabel("community mean DDR")
    ax.set_title("Community scores")
    ax.legend(loc="lower right")
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def plot_sweep(rows: list[dict], out_path) -> None:
    """Precision/recall/F-score curves plus FP bars for a threshold sweep.

    The x axis is the single varying threshold when there is one, the row
    index otherwise.
    """
    if not rows:
        return
    varying = [a for a in SWEEP_AXES if len({r[a] for r in rows}) > 1]
    if len(varying) == 1:
        axis = varying[0]
        xs = [r[axis] for r in rows]
        xlabel = axis
    else:
        xs = list(range(len(rows)))
        xlabel = "sweep row"
    fig, (top, bottom) = plt.subplots(2, 1, figsize=(6.5, 6), sharex=True)
    for metric, style in (("precision", "o-"), ("recall", "s-"), ("f_score", "^-")):
        top.plot(xs, [r[metric] for r in rows], style, ms=4, label=metric)
    top.set_ylabel("score")
    top.set_ylim(-0.05, 1.05)
    top.legend(loc="lower left")
    top.set_title("Threshold sweep")
    distinct = sorted(set(xs))
    spacing = min(b - a for a, b in zip(distinct, distinct[1:])) if len(distinct) > 1 else 1.0
    bottom.bar(xs, [r["fp"] for r in rows], width=0.8 * spacing)
    bottom.set_ylabel("false positives")
    bottom.set_xlabel(xlabel)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)
