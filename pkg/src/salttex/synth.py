"""Synthetic two-texture fixtures with exact ground-truth boundaries.

The salt-body analog is a flat mid-gray disk (zero texture gradient and
exactly zero directionality, like the chaotic low-directionality salt
interior) embedded in a layered high-contrast background.  Two background
families are used:

* ``disk_section`` (detection benchmark): period-7 stripes along rows plus
  period-2 stripes along columns.  The period-7 carrier leaves zero-response
  lanes in the 3x3 Sobel stencil, so gradient-based region growing leaks
  through the background the way it leaks through noisy real sections,
  while its window-shift texture energy keeps the background GoT plateau
  just below the boundary ridge, which protects high thresholds from
  leaking.
* ``drifting_disk_volume`` (tracking benchmark): period-2 stripes along
  both axes.  All five GoT window shifts align on a period-2 carrier, so
  the background's own GoT vanishes and the boundary ridge is the unique
  high-GoT locus for the tracker's candidate steering.

Ground truth is the traced contour of the drawn region, so detected and
true boundaries are pixel-consistent.
"""

from __future__ import annotations

import numpy as np

from .segmentation import Mask, trace_boundary
from .volume_io import Boundary, Section, SeismicVolume

ROW_STRIPE_AMP = 0.3
COL_STRIPE_AMP = 0.1
ROW_STRIPE_PERIOD = 7
CROSS_STRIPE_AMP = 0.225
NOISE_AMP = 0.2


def _square_wave(n: int, period: int) -> np.ndarray:
    return np.where((np.arange(n) % period) < period / 2.0, 1.0, -1.0)


def _detection_texture(size: int) -> np.ndarray:
    rows = ROW_STRIPE_AMP * _square_wave(size, ROW_STRIPE_PERIOD)
    cols = COL_STRIPE_AMP * _square_wave(size, 2)
    return np.clip(0.5 + rows[:, None] + cols[None, :], 0.0, 1.0) * np.ones((size, size))


def _tracking_texture(size: int, amp: float) -> np.ndarray:
    s2 = amp * _square_wave(size, 2)
    return 0.5 + (s2[:, None] + s2[None, :]) * np.ones((size, size))


def _noise_texture(shape: tuple[int, int], seed: int, amp: float) -> np.ndarray:
    rng = np.random.Generator(np.random.Philox(int(seed)))
    return 0.5 + rng.uniform(-amp / 2.0, amp / 2.0, size=shape)


def disk_mask(size: int, radius: float, center: tuple[float, float]) -> np.ndarray:
    yy, xx = np.mgrid[0:size, 0:size]
    return (xx - center[0]) ** 2 + (yy - center[1]) ** 2 < radius ** 2


def disk_section(size: int = 128, radius: float | None = None,
                 center: tuple[float, float] | None = None,
                 seed: int = 0, section_index: int = 0) -> tuple[Section, Boundary]:
    """Flat disk inside the detection background, plus its traced boundary."""
    radius = radius if radius is not None else round(size * 0.26)
    center = center if center is not None else (size / 2.0, size / 2.0)
    img = _detection_texture(size)
    inside = disk_mask(size, radius, center)
    img[inside] = 0.5
    truth = trace_boundary(Mask(data=inside))
    truth.section_index = section_index
    section = Section(data=img.astype(np.float32), origin=("inline", section_index),
                      normalized=True)
    return section, truth


def vertical_boundary_section(rows: int = 64, cols: int = 64, boundary_col: int = 32,
                              seed: int = 0) -> Section:
    """Left half horizontal stripes (period 4), right half uniform noise.

    The texture edge sits between columns ``boundary_col - 1`` and
    ``boundary_col``; the horizontal GoT component peaks at it.
    """
    band = ((np.arange(rows) % 4) < 2).astype(np.float64)
    img = np.empty((rows, cols))
    img[:, :boundary_col] = np.tile(band[:, None], (1, boundary_col))
    img[:, boundary_col:] = _noise_texture((rows, cols - boundary_col), seed, NOISE_AMP)
    return Section(data=img.astype(np.float32), origin=("inline", 0), normalized=True)


def tracking_section(size: int = 96, radius: float = 22.0,
                     center: tuple[float, float] | None = None,
                     amp: float = CROSS_STRIPE_AMP,
                     section_index: int = 0) -> tuple[Section, Boundary]:
    """Flat disk inside the tracking background, plus its traced boundary."""
    center = center if center is not None else ((size - 1) / 2.0, (size - 1) / 2.0)
    img = _tracking_texture(size, amp)
    inside = disk_mask(size, radius, center)
    img[inside] = 0.5
    truth = trace_boundary(Mask(data=inside))
    truth.section_index = section_index
    section = Section(data=img.astype(np.float32), origin=("inline", section_index),
                      normalized=True)
    return section, truth


def drifting_disk_volume(n_sections: int = 5, size: int = 96, base_radius: float = 22.0,
                         drift: float = 2.0, ref_index: int = 2,
                         amp: float = CROSS_STRIPE_AMP,
                         seed: int = 0) -> tuple[SeismicVolume, list[Boundary]]:
    """Volume whose disk radius drifts ``drift`` px per section away from the
    reference section.  Returns the volume and per-section true boundaries.
    ``amp`` sets the background stripe amplitude (lower means a fainter
    texture, so injected noise matters more)."""
    center = ((size - 1) / 2.0, (size - 1) / 2.0)
    planes = []
    truths = []
    for k in range(n_sections):
        radius = base_radius + drift * (k - ref_index)
        if radius < 4:
            raise ValueError(f"section {k} would have radius {radius}")
        sec, truth = tracking_section(size=size, radius=radius, center=center,
                                      amp=amp, section_index=k)
        planes.append(sec.data.T)          # volume axes: (inline, crossline, time)
        truths.append(truth)
    vol = SeismicVolume(data=np.stack(planes, axis=0), sample_interval_us=4000)
    return vol, truths


def calibrate_threshold(values: np.ndarray, fraction: float = 0.76,
                        quantile: float = 0.995) -> float:
    """Per-section attribute threshold: a fraction of a high quantile of the
    interior attribute values.  This is the per-section threshold tweak used
    when the histogram's low plateaus would drag automatic thresholds far
    below the boundary ridge."""
    return float(fraction * np.quantile(np.asarray(values, dtype=np.float64), quantile))
