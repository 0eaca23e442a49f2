"""Salt-body segmentation: seed selection, thresholding, region growing,
morphological enhancement, and contour tracing.

The full pipeline (:func:`detect`) turns a section into a closed boundary:
an attribute map is computed, a seed inside the salt body is picked (lowest
smoothed directionality, or supplied manually), a threshold is found (Otsu
on the attribute histogram, or manual), the seed is grown into the
4-connected sub-threshold component, the grown region is closed and
hole-filled, and its outer contour is traced clockwise.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .attributes import (
    AttributeMap,
    GotConfig,
    directionality_map,
    glcm_contrast_map,
    got_map,
    sobel2d_map,
    sobel3d_gradient,
)
from .errors import (
    DegenerateHistogram,
    EmptyMask,
    SeedAboveThreshold,
    SeedOutOfRange,
    ShapeMismatch,
)
from .volume_io import Boundary, Section, SeismicVolume, extract_section, normalize_section

DETECT_ATTRS = ("got", "glcm", "gradient")


@dataclass
class DetectionConfig:
    """Tunables of the detection pipeline."""

    threshold_mode: str = "otsu"          # otsu | manual
    t_g: float | None = None
    seed_mode: str = "auto"               # auto | manual
    seed: tuple[int, int] | None = None   # (col, row)
    smoothing_sigma: float = 1.0
    morph_radius: int = 1
    got: GotConfig = field(default_factory=GotConfig)
    glcm_r_d: int = 4
    glcm_levels: int = 16

    def __post_init__(self):
        if self.threshold_mode not in ("otsu", "manual"):
            raise ShapeMismatch(f"threshold_mode must be otsu|manual, got {self.threshold_mode!r}")
        if self.seed_mode not in ("auto", "manual"):
            raise ShapeMismatch(f"seed_mode must be auto|manual, got {self.seed_mode!r}")
        if self.threshold_mode == "manual":
            if self.t_g is None or not self.t_g > 0:
                raise ShapeMismatch("manual threshold mode requires t_g > 0")
        if self.seed_mode == "manual" and self.seed is None:
            raise ShapeMismatch("manual seed mode requires a seed")
        if not self.smoothing_sigma > 0:
            raise ShapeMismatch("smoothing_sigma must be > 0")
        if self.morph_radius < 0:
            raise ShapeMismatch("morph_radius must be >= 0")


@dataclass
class Mask:
    """Boolean segmentation mask co-registered with its section."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=bool)
        if self.data.ndim != 2:
            raise ShapeMismatch(f"mask must be 2D, got {self.data.shape}")

    def count(self) -> int:
        return int(self.data.sum())


def otsu_threshold(histogram) -> int:
    """Threshold index minimizing weighted intra-class variance.

    Class 1 holds bins [0, T-1], class 2 bins [T, N-1]; ties resolve to the
    smallest T.  The argmin is found through the equivalent inter-class
    maximization, evaluated in exact integer arithmetic so the result is
    immune to floating-point ties.
    """
    counts = np.asarray(histogram)
    if counts.ndim != 1 or len(counts) < 2:
        raise DegenerateHistogram("histogram must be a 1D array with >= 2 bins")
    if np.any(counts < 0):
        raise DegenerateHistogram("histogram counts must be non-negative")
    h = [int(c) for c in counts]
    if sum(1 for c in h if c > 0) < 2:
        raise DegenerateHistogram("histogram mass concentrated in a single bin")

    n = len(h)
    total_w = sum(h)
    total_s = sum(i * c for i, c in enumerate(h))
    # Intra-class variance equals (const - f(T)) / total_w with
    # f(T) = s1^2/w1 + s2^2/w2, so minimizing it maximizes f.
    best_t, best_num, best_den = None, 0, 1
    w1 = 0
    s1 = 0
    for t in range(1, n):
        w1 += h[t - 1]
        s1 += (t - 1) * h[t - 1]
        w2 = total_w - w1
        s2 = total_s - s1
        if w1 == 0:
            num, den = s2 * s2, w2
        elif w2 == 0:
            num, den = s1 * s1, w1
        else:
            num, den = s1 * s1 * w2 + s2 * s2 * w1, w1 * w2
        if best_t is None or num * best_den > best_num * den:
            best_t, best_num, best_den = t, num, den
    return best_t


def gaussian_kernel(half: int, sigma: float) -> np.ndarray:
    """Unit-sum Gaussian kernel of size (2*half+1)^2."""
    ax = np.arange(-half, half + 1, dtype=np.float64)
    d2 = ax[:, None] ** 2 + ax[None, :] ** 2
    k = np.exp(-d2 / (2.0 * sigma * sigma))
    return k / k.sum()


def select_seed(d_map: AttributeMap, sigma: float, n_scales: int = 5) -> tuple[int, int]:
    """Seed point (col, row) minimizing the Gaussian-smoothed directionality.

    The kernel is (2*n_scales+1) on a side with standard deviation ``sigma``
    and replicate padding.  The argmin excludes the map's zero border band
    plus one kernel half-width (where the smoothed field is contaminated by
    border zeros and would trivially win); ties resolve row-major.
    """
    if sigma <= 0:
        raise ShapeMismatch("sigma must be > 0")
    data = np.asarray(d_map.data, dtype=np.float64)
    smoothed = ndimage.correlate(data, gaussian_kernel(n_scales, sigma), mode="nearest")
    m = d_map.border_margin
    if m > 0:
        m += n_scales
    interior = smoothed[m:data.shape[0] - m, m:data.shape[1] - m]
    if interior.size == 0:
        raise ShapeMismatch("attribute map has no interior outside its border band")
    flat = int(np.argmin(interior))
    r, c = divmod(flat, interior.shape[1])
    return (c + m, r + m)


def region_grow(g_map: AttributeMap, seed: tuple[int, int], t_g: float) -> Mask:
    """4-connected component of sub-threshold attribute values containing seed."""
    col, row = int(seed[0]), int(seed[1])
    rows, cols = g_map.data.shape
    if not (0 <= row < rows and 0 <= col < cols):
        raise SeedOutOfRange(f"seed (col={col}, row={row}) outside {rows}x{cols} map")
    if not g_map.data[row, col] < t_g:
        raise SeedAboveThreshold(
            f"attribute {g_map.data[row, col]:.6g} at seed is not below threshold {t_g:.6g}")
    below = g_map.data < t_g
    labels, _ = ndimage.label(below)
    return Mask(data=labels == labels[row, col])


def enhance_mask(m: Mask, radius: int) -> Mask:
    """Morphological closing with a (2*radius+1)^2 square, then hole filling."""
    data = m.data
    if radius > 0:
        padded = np.pad(data, radius, mode="constant", constant_values=False)
        st = np.ones((2 * radius + 1, 2 * radius + 1), dtype=bool)
        closed = ndimage.binary_erosion(ndimage.binary_dilation(padded, st), st)
        data = closed[radius:-radius, radius:-radius]
    return Mask(data=ndimage.binary_fill_holes(data))


_CLOCKWISE = ((0, -1), (1, -1), (1, 0), (1, 1), (0, 1), (-1, 1), (-1, 0), (-1, -1))
# (dc, dr) for N, NE, E, SE, S, SW, W, NW with rows increasing downward.


def trace_boundary(m: Mask) -> Boundary:
    """Moore-neighbor trace of the largest 4-connected component's contour.

    Points come out clockwise starting from the component's topmost-leftmost
    pixel; consecutive points are 8-connected, as are the first and last.
    """
    if not m.data.any():
        raise EmptyMask("cannot trace an empty mask")
    labels, n_comp = ndimage.label(m.data)
    if n_comp > 1:
        sizes = np.bincount(labels.ravel())
        sizes[0] = 0
        comp = labels == sizes.argmax()
    else:
        comp = labels > 0

    rows, cols = comp.shape

    def fg(c, r):
        return 0 <= r < rows and 0 <= c < cols and comp[r, c]

    flat = int(np.argmax(comp))           # row-major first true = topmost-leftmost
    r0, c0 = divmod(flat, cols)
    start = (c0, r0)
    init_back = (c0 - 1, r0)

    contour = [start]
    cur, back = start, init_back
    limit = 4 * int(comp.sum()) + 8
    while len(contour) <= limit:
        back_dir = (back[0] - cur[0], back[1] - cur[1])
        k0 = _CLOCKWISE.index(back_dir)
        nxt = None
        prev = back
        for step in range(1, 9):
            d = _CLOCKWISE[(k0 + step) % 8]
            cand = (cur[0] + d[0], cur[1] + d[1])
            if fg(*cand):
                nxt = cand
                break
            prev = cand
        if nxt is None:
            break                          # isolated single pixel
        if nxt == start and prev == init_back:
            break                          # looped back to the initial state
        contour.append(nxt)
        cur, back = nxt, prev

    return Boundary(points=np.array(contour, dtype=np.int64), closed=True)


@dataclass
class DetectionResult:
    boundary: Boundary
    mask: Mask
    attribute_map: AttributeMap
    seed: tuple[int, int]
    threshold: float
    timings_ms: dict


def attribute_histogram(a_map: AttributeMap, bins: int = 256):
    """Histogram of interior attribute values plus its value range."""
    vals = a_map.interior()
    lo, hi = float(vals.min()), float(vals.max())
    if hi == lo:
        raise DegenerateHistogram("attribute map interior is constant")
    counts, _ = np.histogram(vals, bins=bins, range=(lo, hi))
    return counts, lo, hi


def compute_attribute(s: Section, attr: str, cfg: DetectionConfig,
                      volume: SeismicVolume | None = None) -> AttributeMap:
    """Attribute map for detection; sections are min-max normalized first."""
    if attr not in DETECT_ATTRS:
        raise ShapeMismatch(f"attr must be one of {DETECT_ATTRS}, got {attr!r}")
    ns = s if s.normalized else normalize_section(s)
    if attr == "got":
        return got_map(ns, cfg.got)
    if attr == "glcm":
        return glcm_contrast_map(ns, r_d=cfg.glcm_r_d, n_levels=cfg.glcm_levels)
    if volume is not None:
        axis, index = s.origin
        field3d = sobel3d_gradient(volume)
        plane = field3d[index] if axis == "inline" else field3d[:, index]
        return AttributeMap(data=plane.T.copy(), kind="gradient", border_margin=1)
    return sobel2d_map(ns)


def detect(s: Section, cfg: DetectionConfig | None = None, attr: str = "got",
           volume: SeismicVolume | None = None,
           attr_map: AttributeMap | None = None) -> DetectionResult:
    """Run the full detection pipeline on one section.

    With ``attr="gradient"`` and a ``volume`` supplied, the full 3D Sobel is
    computed and sliced at the section; otherwise the 2D restriction is used.
    A precomputed ``attr_map`` skips attribute computation (lets callers
    cache maps while re-running the growing stage with new seeds or
    thresholds).
    """
    cfg = cfg or DetectionConfig()
    timings: dict[str, float] = {}

    t0 = time.perf_counter()
    a_map = attr_map if attr_map is not None else compute_attribute(s, attr, cfg, volume)
    timings["attribute"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    if cfg.seed_mode == "manual":
        seed = (int(cfg.seed[0]), int(cfg.seed[1]))
        rows, cols = a_map.data.shape
        if not (0 <= seed[1] < rows and 0 <= seed[0] < cols):
            raise SeedOutOfRange(f"seed {seed} outside {rows}x{cols} section")
    else:
        ns = s if s.normalized else normalize_section(s)
        d_map = directionality_map(ns, cfg.got.scales)
        seed = select_seed(d_map, cfg.smoothing_sigma, n_scales=len(cfg.got.scales))
    timings["seed"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    if cfg.threshold_mode == "manual":
        t_g = float(cfg.t_g)
    else:
        counts, lo, hi = attribute_histogram(a_map)
        t_bin = otsu_threshold(counts)
        t_g = lo + t_bin * (hi - lo) / len(counts)
    timings["threshold"] = (time.perf_counter() - t0) * 1000.0

    t0 = time.perf_counter()
    grown = region_grow(a_map, seed, t_g)
    enhanced = enhance_mask(grown, cfg.morph_radius)
    boundary = trace_boundary(enhanced)
    boundary.section_index = int(s.origin[1])
    timings["grow_trace"] = (time.perf_counter() - t0) * 1000.0

    return DetectionResult(boundary=boundary, mask=enhanced, attribute_map=a_map,
                           seed=seed, threshold=t_g, timings_ms=timings)
