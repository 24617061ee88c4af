"""Matplotlib renderings saved next to the delimited outputs."""

from __future__ import annotations

import numpy as np
from matplotlib.figure import Figure

__all__ = ["save_score_heatmap", "save_distribution_bar", "save_gradcheck_bars"]


def save_score_heatmap(path, scores: np.ndarray, node_labels, title: str) -> None:
    fig = Figure(figsize=(7, max(2.5, 0.45 * len(node_labels) + 1.5)))
    ax = fig.add_subplot(111)
    im = ax.imshow(scores, aspect="auto", cmap="viridis")
    ax.set_yticks(range(len(node_labels)), labels=node_labels)
    ax.set_xlabel("temporal query")
    ax.set_title(title)
    fig.colorbar(im, ax=ax, label="referring score")
    fig.tight_layout()
    fig.savefig(path)


def save_distribution_bar(path, probs: np.ndarray, referent: int, title: str) -> None:
    fig = Figure(figsize=(7, 3))
    ax = fig.add_subplot(111)
    colors = ["#cc3311" if i == referent else "#4477aa" for i in range(len(probs))]
    ax.bar(range(len(probs)), probs, color=colors)
    ax.set_xlabel("temporal query")
    ax.set_ylabel("referring probability")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path)


def save_gradcheck_bars(path, errors: dict[str, float], threshold: float) -> None:
    fig = Figure(figsize=(7, 3.5))
    ax = fig.add_subplot(111)
    names = list(errors)
    values = [max(errors[n], 1e-18) for n in names]
    ax.bar(names, values, color="#4477aa")
    ax.axhline(threshold, color="#cc3311", linestyle="--", label=f"threshold {threshold:g}")
    ax.set_yscale("log")
    ax.set_ylabel("max relative error")
    ax.legend()
    fig.tight_layout()
    fig.savefig(path)
