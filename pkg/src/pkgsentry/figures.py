"""Figure rendering for evaluation reports.

Figures are written to files next to the delimited metrics output; nothing
here opens a display.
"""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402

from .evalharness import ConfusionMatrix, MetricsRow


def confusion_figure(
    rows: dict[str, tuple[ConfusionMatrix, MetricsRow]], path: str | Path
) -> Path:
    """One 2x2 confusion heatmap per run, side by side."""
    names = list(rows)
    fig, axes = plt.subplots(1, len(names), figsize=(4.2 * len(names), 4.0), squeeze=False)
    for ax, name in zip(axes[0], names):
        cm, row = rows[name]
        grid = [[cm.tp, cm.fn], [cm.fp, cm.tn]]
        ax.imshow(grid, cmap="Blues", vmin=0)
        for i in range(2):
            for j in range(2):
                ax.text(j, i, str(grid[i][j]), ha="center", va="center", fontsize=12)
        ax.set_xticks([0, 1], ["pred malicious", "pred neutral"])
        ax.set_yticks([0, 1], ["malicious", "neutral"])
        ax.set_title(f"{name}\nP={row.precision_display} R={row.recall_display} F1={row.f1_display}")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path


def reduction_figure(report: dict, path: str | Path) -> Path:
    """Before/after bars for files analyzed and per-model cost."""
    groups = [("files analyzed", report["files"]["before"], report["files"]["after"], "")]
    for model_id, cost in report.get("costs", {}).items():
        groups.append(
            (
                f"{model_id} cost ($)",
                float(cost["before_dollars"]),
                float(cost["after_dollars"]),
                cost["reduction_percent"],
            )
        )
    fig, axes = plt.subplots(1, len(groups), figsize=(3.6 * len(groups), 4.0), squeeze=False)
    for ax, (label, before, after, pct) in zip(axes[0], groups):
        bars = ax.bar(["full", "prescreened"], [before, after], color=["#888", "#2a6f97"])
        ax.bar_label(bars, fmt="%.2f" if isinstance(before, float) else "%d")
        title = label
        if not pct:
            pct = report["files"]["reduction_percent"]
        ax.set_title(f"{label}\n-{pct}%")
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, dpi=150)
    plt.close(fig)
    return path
