"""Boundary agreement metrics.

``d_max`` is the Hausdorff distance between the two polylines' vertex sets:
the larger, over both directions, of each point's distance to the nearest
point of the other set.  The averaged maximum distance (AMD) of a matched
list of boundary pairs is the mean of their ``d_max`` values, in pixels.
``mean_sym_dist`` (the mean of the two directed mean nearest-neighbor
distances) is reported alongside as a documented substitute for similarity
indices that are out of scope here.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyBoundary, LengthMismatch
from .volume_io import Boundary


@dataclass
class BoundaryMetrics:
    d_max: float
    mean_sym_dist: float
    n_points_a: int
    n_points_b: int


def _directed(a: np.ndarray, b: np.ndarray) -> tuple[float, float]:
    """Max and mean over points of `a` of the distance to the nearest point of `b`."""
    d2 = ((a[:, None, :] - b[None, :, :]) ** 2).sum(axis=2)
    nearest = np.sqrt(d2.min(axis=1))
    return float(nearest.max()), float(nearest.mean())


def boundary_metrics(a: Boundary, b: Boundary) -> BoundaryMetrics:
    """Symmetric vertex-set distances between two boundaries, in pixels."""
    pa = np.asarray(a.points, dtype=np.float64)
    pb = np.asarray(b.points, dtype=np.float64)
    if len(pa) == 0 or len(pb) == 0:
        raise EmptyBoundary("boundary_metrics requires nonempty boundaries")
    max_ab, mean_ab = _directed(pa, pb)
    max_ba, mean_ba = _directed(pb, pa)
    return BoundaryMetrics(
        d_max=max(max_ab, max_ba),
        mean_sym_dist=0.5 * (mean_ab + mean_ba),
        n_points_a=len(pa),
        n_points_b=len(pb),
    )


def amd(set_a: list[Boundary], set_b: list[Boundary]) -> float:
    """Mean of per-pair Hausdorff distances over index-matched boundary lists."""
    if len(set_a) != len(set_b):
        raise LengthMismatch(f"boundary lists differ in length: {len(set_a)} vs {len(set_b)}")
    if not set_a:
        raise EmptyBoundary("amd of empty boundary lists is undefined")
    return float(np.mean([boundary_metrics(a, b).d_max for a, b in zip(set_a, set_b)]))


def summarize(values) -> dict:
    """Mean and population standard deviation of a nonempty value list."""
    vals = np.asarray(list(values), dtype=np.float64)
    if vals.size == 0:
        raise EmptyBoundary("cannot summarize an empty list")
    return {"mean": float(vals.mean()), "std_dev": float(vals.std())}
