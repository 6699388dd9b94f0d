"""Matplotlib figures for the CLI report paths.

Figures are written next to the delimited output.  SVG output is made
reproducible: the element-id hash salt is pinned and the creation date is
stripped, so identical runs produce identical bytes.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = ["histogram_figure", "curve_figure", "save_figure"]

_SVG_SALT = "hardedge"


def histogram_figure(bin_edges, counts, title: str, xlabel: str,
                     overlay=None, overlay_label: str = ""):
    """Density-normalized histogram with an optional reference curve."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    edges = np.asarray(bin_edges, dtype=float)
    counts = np.asarray(counts, dtype=float)
    widths = np.diff(edges)
    total = counts.sum()
    dens = counts / (total * widths) if total > 0 else counts
    ax.bar(edges[:-1], dens, width=widths, align="edge",
           color="#9ecae1", edgecolor="#3182bd", linewidth=0.4)
    if overlay is not None:
        xs, ys = overlay
        ax.plot(xs, ys, color="#de2d26", linewidth=1.4, label=overlay_label)
        if overlay_label:
            ax.legend(frameon=False)
    ax.set_xlabel(xlabel)
    ax.set_ylabel("density")
    ax.set_title(title)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    return fig


def curve_figure(x, curves, title: str, xlabel: str, ylabel: str):
    """One or more labeled curves over a common grid."""
    fig, ax = plt.subplots(figsize=(6.4, 4.0))
    for label, y in curves:
        ax.plot(x, y, linewidth=1.4, label=label)
    if len(curves) > 1:
        ax.legend(frameon=False)
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.set_title(title)
    ax.spines["top"].set_visible(False)
    ax.spines["right"].set_visible(False)
    fig.tight_layout()
    return fig


def save_figure(fig, path) -> None:
    path = str(path)
    with plt.rc_context({"svg.hashsalt": _SVG_SALT}):
        if path.endswith(".svg"):
            fig.savefig(path, metadata={"Date": None})
        else:
            fig.savefig(path, dpi=150)
    plt.close(fig)
