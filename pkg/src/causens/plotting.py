"""Static heatmap figures for pipeline outputs."""
from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def _heatmap(ax, matrix, names, title, truth=None):
    im = ax.imshow(matrix, vmin=0.0, vmax=1.0, cmap="viridis")
    ax.set_xticks(range(len(names)), names, rotation=90, fontsize=7)
    ax.set_yticks(range(len(names)), names, fontsize=7)
    ax.set_xlabel("effect")
    ax.set_ylabel("cause")
    ax.set_title(title, fontsize=9)
    if truth is not None:
        ii, jj = np.nonzero(truth)
        ax.scatter(jj, ii, marker="s", s=60, facecolors="none", edgecolors="red",
                   linewidths=1.2)
    return im


def plot_matrices(matrices: dict[str, np.ndarray], names: Sequence[str], path,
                  truth=None, ncols: int = 3) -> Path:
    """Grid of strength heatmaps; true links, if given, are outlined in red."""
    path = Path(path)
    k = len(matrices)
    ncols = min(ncols, k)
    nrows = -(-k // ncols)
    fig, axes = plt.subplots(nrows, ncols, figsize=(3.4 * ncols, 3.2 * nrows),
                             squeeze=False)
    im = None
    for ax, (title, m) in zip(axes.flat, matrices.items()):
        im = _heatmap(ax, np.asarray(m), names, title, truth)
    for ax in axes.flat[k:]:
        ax.axis("off")
    fig.colorbar(im, ax=axes.ravel().tolist(), shrink=0.8, label="strength")
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_window_strengths(window_matrices: dict[str, list], names: Sequence[str],
                          path) -> Path:
    """Per-window strength of every ordered pair, one panel per learner."""
    path = Path(path)
    n = len(names)
    labels = [f"{names[i]}>{names[j]}" for i in range(n) for j in range(n) if i != j]
    fig, axes = plt.subplots(len(window_matrices), 1,
                             figsize=(max(6, 0.25 * len(labels)), 2.2 * len(window_matrices)),
                             squeeze=False)
    off = ~np.eye(n, dtype=bool)
    for ax, (name, mats) in zip(axes[:, 0], window_matrices.items()):
        rows = np.array([np.asarray(getattr(m, "s", m))[off] for m in mats]).T
        ax.imshow(rows.T, aspect="auto", vmin=0, vmax=1, cmap="viridis")
        ax.set_ylabel(name)
        ax.set_xticks(range(len(labels)), labels if ax is axes[-1, 0] else [],
                      rotation=90, fontsize=6)
    axes[0, 0].set_title("window strengths (rows: windows)", fontsize=9)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
