"""Optional figure renderings written next to the delimited outputs.

matplotlib is imported lazily with the Agg backend so headless runs and
library users who never render pay nothing.
"""

from __future__ import annotations

import math


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    return plt


def save_tile_figure(raster, path: str) -> str:
    """Scatter of the depth-v tile cloud."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 6))
    pts = raster.points
    if pts.shape[1] == 1:
        ax.scatter(pts[:, 0], [0.0] * len(pts), s=0.5, marker=".", linewidths=0)
    else:
        ax.scatter(pts[:, 0], pts[:, 1], s=0.3, marker=".", linewidths=0)
        ax.set_aspect("equal")
    ax.set_title(f"fundamental domain, depth {raster.depth}")
    ax.set_xlabel("x")
    ax.set_ylabel("y")
    fig.savefig(path, dpi=160, bbox_inches="tight")
    plt.close(fig)
    return path


def save_histogram_figure(report, path: str) -> str:
    """Standardized-sample histogram with the normal density overlaid."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(7, 4.5))
    edges = report.histogram_edges
    counts = report.histogram_counts
    width = edges[1] - edges[0]
    centers = [e + width / 2 for e in edges[:-1]]
    total = max(report.sample_count, 1)
    ax.bar(centers, [c / (total * width) for c in counts], width=width * 0.95, label="sample")
    xs = [edges[0] + i * (edges[-1] - edges[0]) / 400 for i in range(401)]
    ax.plot(
        xs,
        [math.exp(-x * x / 2) / math.sqrt(2 * math.pi) for x in xs],
        "k-",
        label="N(0,1)",
    )
    ax.set_title(f"T = {report.T:g}, n = {report.sample_count}, KS = {report.ks:.4f}")
    ax.legend()
    fig.savefig(path, dpi=160, bbox_inches="tight")
    plt.close(fig)
    return path


def save_boundary_figure(report, path: str) -> str:
    """log2 boundary box counts against scale, with the fitted slope."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(6, 4.5))
    xs = list(report.scales)
    ys = [math.log2(max(report.counts[s], 1)) for s in xs]
    ax.plot(xs, ys, "o-", label="log2 boxes")
    x0, y0 = xs[0], ys[0]
    ax.plot(
        xs,
        [y0 + report.dimension_estimate * (x - x0) for x in xs],
        "--",
        label=f"slope {report.dimension_estimate:.3f}",
    )
    ax.set_xlabel("scale s (cells of side 2^-s)")
    ax.set_ylabel("log2 count")
    ax.set_title(f"boundary boxes, depth {report.depth}, mu = {report.mu_estimate:.3f}")
    ax.legend()
    fig.savefig(path, dpi=160, bbox_inches="tight")
    plt.close(fig)
    return path
