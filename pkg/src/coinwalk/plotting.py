"""Static SVG renderings of walk distributions and fidelity curves (needs matplotlib)."""
from __future__ import annotations

import math
from pathlib import Path
from typing import Mapping, Sequence


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    # fixed hash salt keeps SVG output byte-identical between runs
    matplotlib.rcParams["svg.hashsalt"] = "coinwalk"
    matplotlib.rcParams["svg.fonttype"] = "none"
    return plt


def plot_distributions(reference: Sequence[Mapping[str, float]],
                       candidate: Sequence[Mapping[str, float]] | None,
                       nbits: int, path: str | Path) -> None:
    """One bar panel per step; candidate bars (if any) sit beside the reference."""
    plt = _pyplot()
    labels = [format(i, f"0{nbits}b") for i in range(2**nbits)]
    cols = min(3, len(reference))
    rows = math.ceil(len(reference) / cols)
    fig, axes = plt.subplots(rows, cols, figsize=(4 * cols, 2.6 * rows), squeeze=False)
    width = 0.4 if candidate else 0.8
    for step, ax in enumerate(axes.flat):
        if step >= len(reference):
            ax.axis("off")
            continue
        xs = range(len(labels))
        ax.bar([x - width / 2 if candidate else x for x in xs],
               [reference[step].get(k, 0.0) for k in labels], width, label="reference")
        if candidate:
            ax.bar([x + width / 2 for x in xs],
                   [candidate[step].get(k, 0.0) for k in labels], width, label="candidate")
        ax.set_title(f"step {step}")
        ax.set_xticks(list(xs))
        ax.set_xticklabels(labels, rotation=90, fontsize=6)
        ax.set_ylim(0, 1)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)


def plot_fidelity(series_by_label: Mapping[str, object], path: str | Path) -> None:
    """Fidelity against step with standard-error bars, one curve per label."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4))
    for label, series in series_by_label.items():
        ax.errorbar(series.steps, series.fidelities,
                    yerr=[p.std_error for p in series.points],
                    marker="o", markersize=3, capsize=2, label=label)
    ax.set_xlabel("step")
    ax.set_ylabel("Hellinger fidelity")
    ax.set_ylim(0, 1.05)
    ax.legend(fontsize=7)
    fig.tight_layout()
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
