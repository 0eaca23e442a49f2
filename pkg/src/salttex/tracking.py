"""Boundary tracking across neighboring sections via tensor subspace models.

Every reference-boundary point yields a pair of patches (amplitude + GoT)
centered on it.  Stacking the pairs along a third mode gives two
31x31xK tensors, and each tensor is summarized by mode-wise orthonormal
PCA bases of its unfoldings (mean-centered).  A candidate point in a
target section is scored by the quadrature-combined, per-patch-normalized
Frobenius reconstruction error of its patch pair under the mode-1/mode-2
bases; candidates are searched along the local boundary normal, steered
toward high GoT, gated by the error threshold, cleaned with a 2x2
majority filter, and reconnected under a star-convexity shape constraint.

The noise-adjusted variant orders the pixel-mode components by
signal-to-noise ratio instead of raw variance: the noise covariance is
estimated from first differences of adjacent boundary patches (a
minimum-noise-fraction construction), the signal covariance is whitened
by it, and the leading whitened directions are mapped back and
re-orthonormalized.
"""

from __future__ import annotations

import json
import struct
import warnings
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .attributes import AttributeMap, GotConfig, got_map
from .errors import (
    DegenerateCovariance,
    IndexOutOfRange,
    ShapeMismatch,
    TooFewPatches,
    TooFewTrackedPoints,
)
from .parallel import parallel_map
from .volume_io import Boundary, Section, SeismicVolume, extract_section, normalize_section

FEATURE_MODES = ("tensor", "vector")


@dataclass
class TrackingConfig:
    patch_size: int = 31
    feature_dims: tuple[int, int, int] = (15, 15, 5)
    t_e: float = 2.3
    search_halfwidth: int = 15
    lambda_c: float = 1.0
    median_window: int = 2
    noise_adjusted: bool = False
    features: str = "tensor"              # tensor | vector
    got: GotConfig = field(default_factory=GotConfig)

    def __post_init__(self):
        if self.patch_size < 3 or self.patch_size % 2 == 0:
            raise ShapeMismatch(f"patch_size must be odd >= 3, got {self.patch_size}")
        if self.search_halfwidth < 1:
            raise ShapeMismatch("search_halfwidth must be >= 1")
        if len(self.feature_dims) != 3 or any(d < 1 for d in self.feature_dims):
            raise ShapeMismatch(f"feature_dims must be 3 positive ints, got {self.feature_dims}")
        if self.lambda_c < 0:
            raise ShapeMismatch("lambda_c must be >= 0")
        if self.features not in FEATURE_MODES:
            raise ShapeMismatch(f"features must be one of {FEATURE_MODES}")
        self.feature_dims = tuple(int(d) for d in self.feature_dims)


@dataclass
class PatchPair:
    amp_patch: np.ndarray
    got_patch: np.ndarray
    center: tuple[int, int]               # (col, row)

    def __post_init__(self):
        self.amp_patch = np.asarray(self.amp_patch, dtype=np.float64)
        self.got_patch = np.asarray(self.got_patch, dtype=np.float64)
        if self.amp_patch.shape != self.got_patch.shape:
            raise ShapeMismatch("amplitude and GoT patches must share a shape")


@dataclass
class PatchTensors:
    amp: np.ndarray                       # (p, p, K)
    got: np.ndarray
    centers: np.ndarray                   # (K, 2) as (col, row)
    n_skipped: int


def extract_patch_pair(section: Section, g_map: AttributeMap, center: tuple[int, int],
                       patch_size: int = 31) -> PatchPair:
    col, row = int(center[0]), int(center[1])
    half = patch_size // 2
    rows, cols = section.data.shape
    if g_map.data.shape != (rows, cols):
        raise ShapeMismatch("section and GoT map dims differ")
    if not (half <= row < rows - half and half <= col < cols - half):
        raise ShapeMismatch(f"patch at (col={col}, row={row}) overflows the section")
    sl = np.s_[row - half:row + half + 1, col - half:col + half + 1]
    return PatchPair(amp_patch=section.data[sl], got_patch=g_map.data[sl], center=(col, row))


def build_patch_tensors(ref: Section, ref_got: AttributeMap, b: Boundary,
                        cfg: TrackingConfig | None = None) -> PatchTensors:
    """Stack the boundary's patch pairs along mode 3, in boundary order.

    Points whose patch would overflow the section are skipped; the skip
    count is reported on the result.
    """
    cfg = cfg or TrackingConfig()
    half = cfg.patch_size // 2
    rows, cols = ref.data.shape
    if ref_got.data.shape != (rows, cols):
        raise ShapeMismatch("section and GoT map dims differ")
    kept, skipped = [], 0
    for col, row in np.asarray(b.points):
        if half <= row < rows - half and half <= col < cols - half:
            kept.append((int(col), int(row)))
        else:
            skipped += 1
    need = max(cfg.feature_dims[2], 2)
    if len(kept) < need:
        raise TooFewPatches(f"only {len(kept)} boundary points admit full "
                            f"{cfg.patch_size}x{cfg.patch_size} patches; need {need}")
    p = cfg.patch_size
    amp = np.empty((p, p, len(kept)))
    got = np.empty((p, p, len(kept)))
    for k, (col, row) in enumerate(kept):
        sl = np.s_[row - half:row + half + 1, col - half:col + half + 1]
        amp[:, :, k] = ref.data[sl]
        got[:, :, k] = ref_got.data[sl]
    return PatchTensors(amp=amp, got=got,
                        centers=np.array(kept, dtype=np.int64), n_skipped=skipped)


# ---------------------------------------------------------------------------
# Subspace learning
# ---------------------------------------------------------------------------

def _fix_signs(basis: np.ndarray) -> np.ndarray:
    """Deterministic column signs: largest-magnitude entry made positive."""
    out = basis.copy()
    for j in range(out.shape[1]):
        i = int(np.argmax(np.abs(out[:, j])))
        if out[i, j] < 0:
            out[:, j] = -out[:, j]
    return out


def _effective_dim(eigvals: np.ndarray, requested: int, mode: int) -> int:
    lam_max = float(eigvals.max(initial=0.0))
    rank = int((eigvals > lam_max * 1e-12).sum()) if lam_max > 0 else 0
    if rank < requested:
        warnings.warn(
            f"mode-{mode} covariance rank {rank} below requested dimension "
            f"{requested}; reducing", DegenerateCovariance)
        return max(rank, 1)
    return requested


def _variance_basis(gram: np.ndarray, d: int, mode: int) -> np.ndarray:
    eigvals, eigvecs = np.linalg.eigh(gram)
    d = _effective_dim(eigvals, d, mode)
    return _fix_signs(eigvecs[:, ::-1][:, :d])


def _snr_basis(signal_gram: np.ndarray, noise_gram: np.ndarray, d: int, mode: int) -> np.ndarray:
    """Basis of the top signal-to-noise subspace (orthonormalized).

    Whitens the signal covariance by the noise covariance, orders whitened
    directions by variance, and maps them back through the unwhitening
    transform before a QR re-orthonormalization.  A (scaled) identity noise
    covariance reduces this to plain variance ordering.
    """
    n_eval, n_evec = np.linalg.eigh(noise_gram)
    lam_max = float(n_eval.max(initial=0.0))
    if lam_max <= 0:
        return _variance_basis(signal_gram, d, mode)
    lam = np.maximum(n_eval, lam_max * 1e-10)
    whiten = (n_evec * (lam ** -0.5)) @ n_evec.T
    unwhiten = (n_evec * (lam ** 0.5)) @ n_evec.T
    w_gram = whiten @ signal_gram @ whiten
    w_gram = 0.5 * (w_gram + w_gram.T)
    eigvals, eigvecs = np.linalg.eigh(w_gram)
    d = _effective_dim(eigvals, d, mode)
    back = unwhiten @ eigvecs[:, ::-1][:, :d]
    q, _ = np.linalg.qr(back)
    return _fix_signs(q)


@dataclass
class SourceSubspace:
    """Learned model of one patch source (amplitude or GoT)."""

    mean: np.ndarray                      # (p, p)
    basis1: np.ndarray | None = None      # (p, d1)
    basis2: np.ndarray | None = None      # (p, d2)
    basis3: np.ndarray | None = None      # (K, d3)
    vector_basis: np.ndarray | None = None  # (p*p, d)


def _unfold(tensor: np.ndarray, mode: int) -> np.ndarray:
    return np.moveaxis(tensor, mode, 0).reshape(tensor.shape[mode], -1)


def learn_subspace(tensor: np.ndarray, dims: tuple[int, int, int],
                   noise_adjusted: bool = False) -> SourceSubspace:
    """Mode-wise PCA of a (p, p, K) patch stack.

    The mean patch (over mode 3) is subtracted; each mode's basis holds the
    top eigenvectors of that unfolding's Gram matrix, ordered by variance,
    or by SNR for the pixel modes when ``noise_adjusted`` (the third mode
    indexes samples, where a noise ordering is meaningless).
    """
    tensor = np.asarray(tensor, dtype=np.float64)
    if tensor.ndim != 3:
        raise ShapeMismatch(f"patch tensor must be 3D, got {tensor.shape}")
    k = tensor.shape[2]
    if k < 2:
        raise TooFewPatches("need at least 2 patches to learn a subspace")
    dims = tuple(int(d) for d in dims)
    if any(d > s for d, s in zip(dims, tensor.shape)):
        raise ShapeMismatch(f"requested dims {dims} exceed tensor shape {tensor.shape}")

    mean = tensor.mean(axis=2)
    centered = tensor - mean[:, :, None]
    diffs = centered[:, :, 1:] - centered[:, :, :-1]

    bases = []
    for mode in range(3):
        u = _unfold(centered, mode)
        gram = u @ u.T
        if noise_adjusted and mode < 2 and diffs.shape[2] >= 1:
            du = _unfold(diffs, mode)
            bases.append(_snr_basis(gram, du @ du.T, dims[mode], mode + 1))
        else:
            bases.append(_variance_basis(gram, dims[mode], mode + 1))
    return SourceSubspace(mean=mean, basis1=bases[0], basis2=bases[1], basis3=bases[2])


def learn_vector_subspace(tensor: np.ndarray, n_components: int) -> SourceSubspace:
    """Plain PCA on vectorized patches (the vectorization comparison mode)."""
    tensor = np.asarray(tensor, dtype=np.float64)
    p1, p2, k = tensor.shape
    if k < 2:
        raise TooFewPatches("need at least 2 patches to learn a subspace")
    mean = tensor.mean(axis=2)
    centered = (tensor - mean[:, :, None]).reshape(p1 * p2, k)
    gram = centered @ centered.T
    basis = _variance_basis(gram, min(n_components, p1 * p2), mode=1)
    return SourceSubspace(mean=mean, vector_basis=basis)


@dataclass
class SubspaceModel:
    amp: SourceSubspace
    got: SourceSubspace
    feature_dims: tuple[int, int, int]
    t_e: float
    noise_adjusted: bool
    patch_size: int
    features: str = "tensor"
    section_shape: tuple[int, int] | None = None


def learn_model(tensors: PatchTensors, cfg: TrackingConfig,
                section_shape: tuple[int, int] | None = None) -> SubspaceModel:
    """Learn per-source subspaces from the reference patch tensors."""
    if cfg.features == "vector":
        n_comp = cfg.feature_dims[0] * cfg.feature_dims[1]
        amp = learn_vector_subspace(tensors.amp, n_comp)
        got = learn_vector_subspace(tensors.got, n_comp)
    else:
        amp = learn_subspace(tensors.amp, cfg.feature_dims, cfg.noise_adjusted)
        got = learn_subspace(tensors.got, cfg.feature_dims, cfg.noise_adjusted)
    return SubspaceModel(amp=amp, got=got, feature_dims=cfg.feature_dims, t_e=cfg.t_e,
                         noise_adjusted=cfg.noise_adjusted, patch_size=cfg.patch_size,
                         features=cfg.features, section_shape=section_shape)


def _batch_source_errors(patches: np.ndarray, sub: SourceSubspace) -> np.ndarray:
    """Normalized residual norms of a (n, p, p) patch stack under one source.

    Centering removes both the training mean and the patch's own scalar mean
    (and the training mean's), so a constant amplitude offset never changes
    the error."""
    dc = patches.mean(axis=(1, 2))
    c = (patches - dc[:, None, None]) - (sub.mean - sub.mean.mean())[None, :, :]
    norm2 = np.einsum("nab,nab->n", c, c)
    p = sub.mean.shape[0]
    if sub.vector_basis is not None:
        if sub.vector_basis.shape[1] == p * p:
            return np.zeros(len(c))
        flat = c.reshape(len(c), -1)
        coef = flat @ sub.vector_basis
        proj2 = np.einsum("ni,ni->n", coef, coef)
    else:
        if sub.basis1.shape[1] == p and sub.basis2.shape[1] == p:
            return np.zeros(len(c))
        coef = np.einsum("ai,nab,bj->nij", sub.basis1, c, sub.basis2)
        proj2 = np.einsum("nij,nij->n", coef, coef)
    resid2 = np.maximum(norm2 - proj2, 0.0)
    with np.errstate(invalid="ignore", divide="ignore"):
        e = np.where(norm2 > 0.0, np.sqrt(resid2 / np.where(norm2 > 0.0, norm2, 1.0)), 0.0)
    return e


def reconstruction_error(pp: PatchPair, model: SubspaceModel) -> float:
    """Quadrature-combined normalized reconstruction error of a patch pair."""
    p = model.patch_size
    if pp.amp_patch.shape != (p, p):
        raise ShapeMismatch(f"patch shape {pp.amp_patch.shape} does not match model size {p}")
    e_amp = _batch_source_errors(pp.amp_patch[None], model.amp)[0]
    e_got = _batch_source_errors(pp.got_patch[None], model.got)[0]
    return float(np.hypot(e_amp, e_got))


def classify(pp: PatchPair, model: SubspaceModel) -> str:
    """'boundary' iff the reconstruction error does not exceed the threshold."""
    return "boundary" if reconstruction_error(pp, model) <= model.t_e else "non_boundary"


# ---------------------------------------------------------------------------
# Tracking
# ---------------------------------------------------------------------------

def _boundary_normals(points: np.ndarray, closed: bool) -> np.ndarray:
    """Unit normals from central-difference tangents of the polyline."""
    pts = points.astype(np.float64)
    n = len(pts)
    if closed and n >= 3:
        nxt = np.roll(pts, -1, axis=0)
        prv = np.roll(pts, 1, axis=0)
    else:
        nxt = np.vstack([pts[1:], pts[-1]])
        prv = np.vstack([pts[0], pts[:-1]])
    tang = nxt - prv
    normals = np.stack([-tang[:, 1], tang[:, 0]], axis=1)
    length = np.hypot(normals[:, 0], normals[:, 1])
    length[length == 0] = 1.0
    return normals / length[:, None]


def median_filter_2x2(points_map: np.ndarray) -> np.ndarray:
    """2x2 binary majority filter (>=2 of 4), anchored at the top-left cell."""
    m = np.asarray(points_map, dtype=np.int32)
    padded = np.pad(m, ((0, 1), (0, 1)))
    total = (padded[:-1, :-1] + padded[:-1, 1:] + padded[1:, :-1] + padded[1:, 1:])
    return total >= 2


def _interpolate_ring(points: np.ndarray) -> np.ndarray:
    """Integer line interpolation between consecutive ring points (wrapping).

    Accepts float coordinates; emitted integer steps are 8-connected."""
    out = []
    n = len(points)
    for i in range(n):
        a = points[i]
        b = points[(i + 1) % n]
        steps = int(np.ceil(max(abs(b[0] - a[0]), abs(b[1] - a[1]))))
        ts = np.linspace(0.0, 1.0, steps + 1)[:-1] if steps > 0 else [0.0]
        for t in ts:
            c = int(np.floor(a[0] + t * (b[0] - a[0]) + 0.5))
            r = int(np.floor(a[1] + t * (b[1] - a[1]) + 0.5))
            if not out or (out[-1][0] != c or out[-1][1] != r):
                out.append((c, r))
    if len(out) > 1 and out[0] == out[-1]:
        out.pop()
    return np.array(out, dtype=np.int64)


def _circular_moving_median(values: np.ndarray, window: int) -> np.ndarray:
    half = window // 2
    n = len(values)
    ext = np.concatenate([values[-half:], values, values[:half]])
    return np.array([np.median(ext[i:i + window]) for i in range(n)])


def reconnect_points(points: np.ndarray) -> np.ndarray:
    """Shape-constrained reconnection of scattered tracked points.

    Points are ordered by polar angle around their centroid (salt-dome
    boundaries are star-convex about the dome interior); radial outliers
    beyond 3 median absolute deviations from a window-9 moving median are
    dropped, and remaining gaps are linearly interpolated into a closed
    8-connected ring.
    """
    pts = np.asarray(points, dtype=np.float64)
    if len(pts) < 3:
        raise TooFewTrackedPoints(f"cannot reconnect {len(pts)} points")
    centroid = pts.mean(axis=0)
    rel = pts - centroid
    theta = np.arctan2(rel[:, 1], rel[:, 0])
    rho = np.hypot(rel[:, 0], rel[:, 1])
    order = np.lexsort((rho, theta))
    theta, rho, pts = theta[order], rho[order], pts[order]

    window = min(9, len(pts) if len(pts) % 2 == 1 else len(pts) - 1)
    moving = _circular_moving_median(rho, max(window, 1))
    dev = np.abs(rho - moving)
    mad = float(np.median(dev))
    keep = dev <= max(3.0 * mad, 1.0)   # floor guards the zero-MAD case on exact grids
    if keep.sum() < 3:
        raise TooFewTrackedPoints(f"only {int(keep.sum())} points survive the shape constraint")
    ring = np.round(pts[keep]).astype(np.int64)
    return _interpolate_ring(ring)


def track_section(model: SubspaceModel, ref_boundary: Boundary, target: Section,
                  cfg: TrackingConfig | None = None,
                  target_got: AttributeMap | None = None,
                  stats: dict | None = None) -> Boundary:
    """Synthesize the boundary in one target section.

    Each reference point is projected to the target, candidates are taken
    at integer offsets along the local boundary normal, and the candidate
    minimizing (reconstruction error - lambda_c * normalized GoT) is
    accepted when its error stays within the threshold.  Accepted points
    are median-cleaned and reconnected into a closed boundary.  When a
    ``stats`` dict is supplied it receives the accepted/dropped/surviving
    point counts.
    """
    cfg = cfg or TrackingConfig()
    if model.section_shape is not None and tuple(target.data.shape) != tuple(model.section_shape):
        raise ShapeMismatch(f"target dims {target.data.shape} differ from "
                            f"reference dims {model.section_shape}")
    ts = target if target.normalized else normalize_section(target)
    g = target_got if target_got is not None else got_map(ts, cfg.got)

    rows, cols = ts.data.shape
    half = model.patch_size // 2
    pts = np.asarray(ref_boundary.points, dtype=np.int64)
    normals = _boundary_normals(pts, ref_boundary.closed)
    offsets = np.arange(-cfg.search_halfwidth, cfg.search_halfwidth + 1)

    accepted = []
    for (col, row), normal in zip(pts, normals):
        cand_c = np.round(col + offsets * normal[0]).astype(np.int64)
        cand_r = np.round(row + offsets * normal[1]).astype(np.int64)
        ok = ((cand_r >= half) & (cand_r < rows - half)
              & (cand_c >= half) & (cand_c < cols - half))
        if not ok.any():
            continue
        cc, rr = cand_c[ok], cand_r[ok]
        n_cand = len(cc)
        amp_patches = np.empty((n_cand, model.patch_size, model.patch_size))
        got_patches = np.empty((n_cand, model.patch_size, model.patch_size))
        for i in range(n_cand):
            sl = np.s_[rr[i] - half:rr[i] + half + 1, cc[i] - half:cc[i] + half + 1]
            amp_patches[i] = ts.data[sl]
            got_patches[i] = g.data[sl]
        errors = np.hypot(_batch_source_errors(amp_patches, model.amp),
                          _batch_source_errors(got_patches, model.got))
        gvals = g.data[rr, cc].astype(np.float64)
        spread = gvals.max() - gvals.min()
        ghat = (gvals - gvals.min()) / spread if spread > 0 else np.zeros(n_cand)
        score = errors - cfg.lambda_c * ghat
        best = int(np.argmin(score))
        if errors[best] <= model.t_e:
            accepted.append((int(cc[best]), int(rr[best])))

    if len(accepted) < 3:
        raise TooFewTrackedPoints(
            f"{len(accepted)} candidates passed the error threshold; need >= 3")

    raster = np.zeros((rows, cols), dtype=bool)
    pts_arr = np.array(accepted, dtype=np.int64)
    raster[pts_arr[:, 1], pts_arr[:, 0]] = True
    cleaned = median_filter_2x2(raster)
    survivors = pts_arr[cleaned[pts_arr[:, 1], pts_arr[:, 0]]]
    if stats is not None:
        stats.update(accepted=len(accepted), dropped=len(pts) - len(accepted),
                     survivors=len(survivors))
    if len(survivors) < 3:
        raise TooFewTrackedPoints(f"{len(survivors)} points survive the median cleanup")
    ring = reconnect_points(survivors)
    return Boundary(points=ring, closed=True, section_index=int(target.origin[1]))


def track_volume(vol: SeismicVolume, ref_index: int, ref_boundary: Boundary,
                 cfg: TrackingConfig | None = None, axis: str = "inline",
                 stats_out: list | None = None) -> list[Boundary]:
    """Track the reference boundary into every section of the volume.

    The subspace model is built once from the reference section; every
    section (the reference itself included) is then tracked independently
    from the reference boundary, never chained.  ``stats_out``, when given,
    receives one per-section dict of accepted/dropped/surviving counts.
    """
    cfg = cfg or TrackingConfig()
    n_sections = vol.dims[0] if axis == "inline" else vol.dims[1]
    if not 0 <= ref_index < n_sections:
        raise IndexOutOfRange(f"reference index {ref_index} outside [0, {n_sections})")

    ref = normalize_section(extract_section(vol, axis, ref_index))
    ref_got = got_map(ref, cfg.got)
    tensors = build_patch_tensors(ref, ref_got, ref_boundary, cfg)
    model = learn_model(tensors, cfg, section_shape=ref.data.shape)

    def run(index: int) -> tuple[Boundary, dict]:
        target = normalize_section(extract_section(vol, axis, index))
        stats: dict = {}
        boundary = track_section(model, ref_boundary, target, cfg, stats=stats)
        return boundary, stats

    results = parallel_map(run, range(n_sections))
    if stats_out is not None:
        stats_out.extend(stats for _, stats in results)
    return [boundary for boundary, _ in results]


# ---------------------------------------------------------------------------
# Model persistence
# ---------------------------------------------------------------------------

_MODEL_MAGIC = b"STXM"


def save_model(model: SubspaceModel, path) -> None:
    """Serialize as JSON header + concatenated little-endian f64 payloads."""
    arrays: list[tuple[str, np.ndarray]] = []
    for src_name in ("amp", "got"):
        src: SourceSubspace = getattr(model, src_name)
        arrays.append((f"{src_name}.mean", src.mean))
        for field_name in ("basis1", "basis2", "basis3", "vector_basis"):
            arr = getattr(src, field_name)
            if arr is not None:
                arrays.append((f"{src_name}.{field_name}", arr))
    header = {
        "feature_dims": list(model.feature_dims),
        "t_e": model.t_e,
        "noise_adjusted": model.noise_adjusted,
        "patch_size": model.patch_size,
        "features": model.features,
        "section_shape": list(model.section_shape) if model.section_shape else None,
        "arrays": [{"name": name, "shape": list(a.shape)} for name, a in arrays],
    }
    blob = json.dumps(header).encode()
    with open(path, "wb") as fh:
        fh.write(_MODEL_MAGIC)
        fh.write(struct.pack("<I", len(blob)))
        fh.write(blob)
        for _, a in arrays:
            fh.write(np.ascontiguousarray(a, dtype="<f8").tobytes())


def load_model(path) -> SubspaceModel:
    raw = Path(path).read_bytes()
    if raw[:4] != _MODEL_MAGIC:
        raise ShapeMismatch(f"{path} is not a subspace model container")
    header_len = struct.unpack_from("<I", raw, 4)[0]
    header = json.loads(raw[8:8 + header_len].decode())
    offset = 8 + header_len
    values = {}
    for spec in header["arrays"]:
        count = int(np.prod(spec["shape"]))
        arr = np.frombuffer(raw, dtype="<f8", count=count, offset=offset).reshape(spec["shape"])
        values[spec["name"]] = arr.copy()
        offset += count * 8
    sources = {}
    for src_name in ("amp", "got"):
        sources[src_name] = SourceSubspace(
            mean=values[f"{src_name}.mean"],
            basis1=values.get(f"{src_name}.basis1"),
            basis2=values.get(f"{src_name}.basis2"),
            basis3=values.get(f"{src_name}.basis3"),
            vector_basis=values.get(f"{src_name}.vector_basis"),
        )
    shape = header.get("section_shape")
    return SubspaceModel(amp=sources["amp"], got=sources["got"],
                         feature_dims=tuple(header["feature_dims"]),
                         t_e=float(header["t_e"]), noise_adjusted=bool(header["noise_adjusted"]),
                         patch_size=int(header["patch_size"]),
                         features=header.get("features", "tensor"),
                         section_shape=tuple(shape) if shape else None)
