"""Matplotlib renderings written next to the delimited report outputs."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .evaluation import ConfusionMatrix, EvalReport
from .rules import LABELS

_METRICS = ("accuracy", "precision_w", "recall_w", "f1_w")


def render_confusion_matrix(cm: ConfusionMatrix, path: str | Path, title: str = "Confusion matrix") -> None:
    fig, ax = plt.subplots(figsize=(4.2, 3.8))
    ax.imshow(cm.counts, cmap="Blues")
    for g in LABELS:
        for p in LABELS:
            ax.text(p, g, str(cm.counts[g][p]), ha="center", va="center", fontsize=9)
    ax.set_xticks(LABELS)
    ax.set_yticks(LABELS)
    ax.set_xlabel("predicted class")
    ax.set_ylabel("gold class")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_label_histogram(hist: dict[str, int], path: str | Path) -> None:
    fig, ax = plt.subplots(figsize=(4.2, 3.2))
    keys = [str(label) for label in LABELS]
    ax.bar(keys, [hist.get(k, 0) for k in keys], color="#4878a8")
    ax.set_xlabel("combined class")
    ax.set_ylabel("samples")
    ax.set_title("Label histogram")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_grid(grid: dict[str, EvalReport], path: str | Path) -> None:
    cells = list(grid)
    fig, ax = plt.subplots(figsize=(max(5.0, 1.1 * len(cells)), 3.4))
    width = 0.2
    for k, metric in enumerate(_METRICS):
        xs = [i + (k - 1.5) * width for i in range(len(cells))]
        ax.bar(xs, [getattr(grid[c], metric) for c in cells], width=width, label=metric)
    ax.set_xticks(range(len(cells)))
    ax.set_xticklabels(cells, rotation=20)
    ax.set_ylim(0, 1.05)
    ax.set_ylabel("score")
    ax.set_title("Template x verbalizer grid")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def render_small_sample(results: dict[int, EvalReport], path: str | Path) -> None:
    sizes = sorted(results)
    fig, ax = plt.subplots(figsize=(4.8, 3.4))
    for metric in _METRICS:
        ax.plot(sizes, [getattr(results[s], metric) for s in sizes], marker="o", label=metric)
    ax.set_xlabel("training samples")
    ax.set_ylabel("score")
    ax.set_ylim(0, 1.05)
    ax.set_title("Small-sample scaling")
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
