"""Matplotlib report figures rendered to files next to the delimited outputs.

All figures use the Agg backend with a fixed dpi so repeated runs of the
same pipeline produce byte-identical images.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 120
_BOUNDARY_COLORS = ("lime", "red", "yellow", "cyan", "magenta", "orange")


def _closed_xy(points: np.ndarray, closed: bool):
    pts = np.asarray(points)
    if closed and len(pts) > 2:
        pts = np.vstack([pts, pts[:1]])
    return pts[:, 0], pts[:, 1]


def save_overlay(section_data: np.ndarray, boundaries, path, title: str | None = None) -> None:
    """Grayscale section with boundary polylines; ``boundaries`` is a list of
    (Boundary, label) pairs."""
    fig, ax = plt.subplots(figsize=(6, 6))
    ax.imshow(section_data, cmap="gray", interpolation="nearest")
    for i, (b, label) in enumerate(boundaries):
        x, y = _closed_xy(b.points, b.closed)
        ax.plot(x, y, color=_BOUNDARY_COLORS[i % len(_BOUNDARY_COLORS)], linewidth=1.2,
                label=label)
    if boundaries:
        ax.legend(loc="upper right", fontsize=8)
    if title:
        ax.set_title(title)
    ax.set_xlabel("trace")
    ax.set_ylabel("time sample")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_attribute(map_data: np.ndarray, kind: str, path) -> None:
    fig, ax = plt.subplots(figsize=(6.4, 6))
    im = ax.imshow(map_data, cmap="viridis", interpolation="nearest")
    fig.colorbar(im, ax=ax, shrink=0.8, label=kind)
    ax.set_xlabel("trace")
    ax.set_ylabel("time sample")
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_sweep(cells, path) -> None:
    """AMD vs noise level with one-standard-deviation error bars, one series
    per method."""
    fig, ax = plt.subplots(figsize=(6, 4))
    methods = sorted({c.method for c in cells})
    for method in methods:
        rows = [c for c in cells if c.method == method]
        rows.sort(key=lambda c: c.sigma)
        sig = [c.sigma for c in rows]
        mean = [c.mean_amd for c in rows]
        std = [c.std_amd for c in rows]
        ax.errorbar(sig, mean, yerr=std, marker="o", capsize=3, label=method)
    ax.set_xlabel("noise standard deviation")
    ax.set_ylabel("AMD (pixels)")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)


def save_metrics(rows, path) -> None:
    """Per-section boundary distance plot; ``rows`` holds dicts with keys
    ``index``, ``d_max``, ``mean_sym_dist``."""
    fig, ax = plt.subplots(figsize=(6, 4))
    idx = [r["index"] for r in rows]
    ax.plot(idx, [r["d_max"] for r in rows], marker="o", label="max distance")
    ax.plot(idx, [r["mean_sym_dist"] for r in rows], marker="s", label="mean distance")
    ax.set_xlabel("section")
    ax.set_ylabel("pixels")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path, dpi=DPI)
    plt.close(fig)
