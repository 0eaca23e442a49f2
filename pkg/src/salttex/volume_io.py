"""Seismic volume ingestion, section extraction, and grid/boundary persistence.

Two on-disk formats are supported:

* SEG-Y rev1 (read only): big-endian headers, fixed trace length, sample
  format codes 1 (IBM 4-byte float) and 5 (IEEE 4-byte float).  The trace
  grid is inferred from the inline/crossline trace-header words at bytes
  189-192 / 193-196 and validated to be dense.
* "Grid" format (read/write): a JSON sidecar ``<name>.json`` describing
  ``dims``, ``dtype`` (always ``f32le``) and ``order`` (always
  ``row-major``), next to a raw little-endian float32 payload
  ``<name>.f32``.  Round-tripping is bit-exact.

Boundaries are persisted as CSV with header ``col,row``, one point per
line, in polyline order.
"""

from __future__ import annotations

import json
import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import (
    BadSidecar,
    ConstantSection,
    DimMismatch,
    EmptyFile,
    IndexOutOfRange,
    NonRectangularGrid,
    TruncatedTrace,
    UnsupportedFormatCode,
)

TEXT_HEADER_BYTES = 3200
BINARY_HEADER_BYTES = 400
TRACE_HEADER_BYTES = 240

# Binary-header offsets (from file start, SEG-Y rev1).
_OFF_SAMPLE_INTERVAL = 3216   # uint16, microseconds
_OFF_SAMPLES_PER_TRACE = 3220  # uint16
_OFF_FORMAT_CODE = 3224       # int16

# Trace-header offsets (within the 240-byte header, 0-based).
_OFF_DELAY_MS = 108           # int16, recording delay in ms
_OFF_INLINE = 188             # int32, bytes 189-192 (1-based)
_OFF_CROSSLINE = 192          # int32, bytes 193-196 (1-based)

_SUPPORTED_FORMATS = {1: "ibm", 5: "ieee"}


@dataclass
class SeismicVolume:
    """3D amplitude field ordered (inline, crossline, time sample)."""

    data: np.ndarray
    sample_interval_us: int = 4000
    first_inline: int = 0
    first_crossline: int = 0
    first_time_ms: int = 0

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float32)
        if self.data.ndim != 3 or min(self.data.shape) < 1:
            raise DimMismatch(f"volume data must be 3D with all dims >= 1, got {self.data.shape}")

    @property
    def dims(self) -> tuple[int, int, int]:
        return self.data.shape


@dataclass
class Section:
    """2D slice of a volume: rows are time samples, cols the lateral axis."""

    data: np.ndarray
    origin: tuple[str, int] = ("inline", 0)
    normalized: bool = False

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.float32)
        if self.data.ndim != 2:
            raise DimMismatch(f"section data must be 2D, got {self.data.shape}")

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape


@dataclass
class Boundary:
    """Ordered polyline of (col, row) pixel coordinates delineating a salt body."""

    points: np.ndarray
    closed: bool = True
    section_index: int = -1

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.int64).reshape(-1, 2)

    def __len__(self) -> int:
        return len(self.points)


# ---------------------------------------------------------------------------
# SEG-Y reading
# ---------------------------------------------------------------------------

def ibm_to_ieee(words: np.ndarray) -> np.ndarray:
    """Convert IBM System/360 hexadecimal floats (as uint32 words) to float64.

    Layout: 1 sign bit, 7-bit base-16 exponent biased by 64, 24-bit fraction
    scaled so the value is ``(-1)^s * f/2^24 * 16^(e-64)``.
    """
    words = np.asarray(words, dtype=np.uint32)
    sign = np.where(words >> np.uint32(31), -1.0, 1.0)
    exponent = ((words >> np.uint32(24)) & np.uint32(0x7F)).astype(np.int64) - 64
    fraction = (words & np.uint32(0x00FFFFFF)).astype(np.float64)
    # ldexp keeps the power-of-two scaling exact: f/2^24 * 16^e == f * 2^(4e-24)
    return sign * np.ldexp(fraction, 4 * exponent - 24)


def read_segy(stream: bytes) -> SeismicVolume:
    """Parse a SEG-Y rev1 byte stream into a :class:`SeismicVolume`.

    Only fixed-length traces are supported.  The inline/crossline lattice
    must be dense (every inline x crossline combination present exactly
    once), otherwise :class:`NonRectangularGrid` is raised.
    """
    header_bytes = TEXT_HEADER_BYTES + BINARY_HEADER_BYTES
    if len(stream) < header_bytes:
        raise EmptyFile(f"stream holds {len(stream)} bytes, need at least {header_bytes}")

    n_samples = struct.unpack_from(">H", stream, _OFF_SAMPLES_PER_TRACE)[0]
    sample_interval = struct.unpack_from(">H", stream, _OFF_SAMPLE_INTERVAL)[0]
    fmt = struct.unpack_from(">h", stream, _OFF_FORMAT_CODE)[0]
    if fmt not in _SUPPORTED_FORMATS:
        raise UnsupportedFormatCode(f"sample format code {fmt}; supported: {sorted(_SUPPORTED_FORMATS)}")
    if n_samples < 1:
        raise EmptyFile("binary header declares 0 samples per trace")

    trace_bytes = TRACE_HEADER_BYTES + 4 * n_samples
    body = len(stream) - header_bytes
    if body < trace_bytes:
        raise EmptyFile("stream contains no complete trace")
    if body % trace_bytes != 0:
        raise TruncatedTrace(
            f"trace body holds {body} bytes, not a multiple of the {trace_bytes}-byte trace length")
    n_traces = body // trace_bytes

    inlines = np.empty(n_traces, dtype=np.int64)
    crosslines = np.empty(n_traces, dtype=np.int64)
    samples = np.empty((n_traces, n_samples), dtype=np.float64)
    delay_ms = 0
    for t in range(n_traces):
        off = header_bytes + t * trace_bytes
        inlines[t] = struct.unpack_from(">i", stream, off + _OFF_INLINE)[0]
        crosslines[t] = struct.unpack_from(">i", stream, off + _OFF_CROSSLINE)[0]
        if t == 0:
            delay_ms = struct.unpack_from(">h", stream, off + _OFF_DELAY_MS)[0]
        raw = np.frombuffer(stream, dtype=">u4", count=n_samples, offset=off + TRACE_HEADER_BYTES)
        if _SUPPORTED_FORMATS[fmt] == "ibm":
            samples[t] = ibm_to_ieee(raw.astype(np.uint32))
        else:
            samples[t] = raw.view(">f4").astype(np.float64)

    il_values = np.unique(inlines)
    xl_values = np.unique(crosslines)
    n_il, n_xl = len(il_values), len(xl_values)
    if n_il * n_xl != n_traces:
        raise NonRectangularGrid(
            f"{n_traces} traces cannot tile a {n_il}x{n_xl} inline/crossline lattice")

    il_index = np.searchsorted(il_values, inlines)
    xl_index = np.searchsorted(xl_values, crosslines)
    flat = il_index * n_xl + xl_index
    if len(np.unique(flat)) != n_traces:
        raise NonRectangularGrid("duplicate trace positions on the inline/crossline lattice")

    data = np.empty((n_il, n_xl, n_samples), dtype=np.float64)
    data[il_index, xl_index] = samples
    if not np.isfinite(data).all():
        raise TruncatedTrace("non-finite amplitudes after decoding")

    return SeismicVolume(
        data=data.astype(np.float32),
        sample_interval_us=int(sample_interval),
        first_inline=int(il_values[0]),
        first_crossline=int(xl_values[0]),
        first_time_ms=int(delay_ms),
    )


# ---------------------------------------------------------------------------
# Grid format
# ---------------------------------------------------------------------------

def _grid_paths(path) -> tuple[Path, Path]:
    base = Path(path)
    if base.suffix in (".json", ".f32"):
        base = base.with_suffix("")
    return base.with_suffix(".json"), base.with_suffix(".f32")


def write_grid(grid, path) -> None:
    """Persist a Section or SeismicVolume as JSON sidecar + raw f32 payload."""
    sidecar_path, payload_path = _grid_paths(path)
    if isinstance(grid, Section):
        meta = {
            "dims": list(grid.data.shape),
            "dtype": "f32le",
            "order": "row-major",
            "axes": ["time", "trace"],
            "kind": "section",
            "origin": [grid.origin[0], int(grid.origin[1])],
            "normalized": bool(grid.normalized),
        }
        payload = grid.data
    elif isinstance(grid, SeismicVolume):
        meta = {
            "dims": list(grid.data.shape),
            "dtype": "f32le",
            "order": "row-major",
            "axes": ["inline", "crossline", "time"],
            "kind": "volume",
            "sample_interval_us": int(grid.sample_interval_us),
            "first_inline": int(grid.first_inline),
            "first_crossline": int(grid.first_crossline),
            "first_time_ms": int(grid.first_time_ms),
        }
        payload = grid.data
    else:
        raise TypeError(f"cannot persist {type(grid).__name__} as a grid")
    sidecar_path.write_text(json.dumps(meta, indent=1) + "\n")
    payload_path.write_bytes(np.ascontiguousarray(payload, dtype="<f4").tobytes())


def read_grid(path):
    """Load ``<name>.json`` + ``<name>.f32`` back into a Section or SeismicVolume."""
    sidecar_path, payload_path = _grid_paths(path)
    if not sidecar_path.exists() or not payload_path.exists():
        raise BadSidecar(f"missing grid file pair for {sidecar_path.with_suffix('')}")
    try:
        meta = json.loads(sidecar_path.read_text())
    except json.JSONDecodeError as exc:
        raise BadSidecar(f"unparseable sidecar {sidecar_path}: {exc}") from exc

    for key in ("dims", "dtype", "order"):
        if key not in meta:
            raise BadSidecar(f"sidecar missing required key {key!r}")
    if meta["dtype"] != "f32le" or meta["order"] != "row-major":
        raise BadSidecar(f"unsupported dtype/order {meta['dtype']!r}/{meta['order']!r}")
    dims = [int(d) for d in meta["dims"]]
    if len(dims) not in (2, 3) or min(dims) < 1:
        raise BadSidecar(f"dims must be 2D or 3D and positive, got {dims}")

    raw = payload_path.read_bytes()
    expected = int(np.prod(dims)) * 4
    if len(raw) != expected:
        raise DimMismatch(f"payload holds {len(raw)} bytes, sidecar dims {dims} require {expected}")
    data = np.frombuffer(raw, dtype="<f4").reshape(dims)

    if len(dims) == 2:
        origin = meta.get("origin", ["inline", 0])
        return Section(data=data.copy(), origin=(str(origin[0]), int(origin[1])),
                       normalized=bool(meta.get("normalized", False)))
    return SeismicVolume(
        data=data.copy(),
        sample_interval_us=int(meta.get("sample_interval_us", 4000)),
        first_inline=int(meta.get("first_inline", 0)),
        first_crossline=int(meta.get("first_crossline", 0)),
        first_time_ms=int(meta.get("first_time_ms", 0)),
    )


# ---------------------------------------------------------------------------
# Sections
# ---------------------------------------------------------------------------

def extract_section(vol: SeismicVolume, axis: str, index: int) -> Section:
    """Slice a volume along ``inline`` or ``crossline``.

    Rows of the returned section are time samples; columns run along the
    remaining lateral axis.
    """
    if axis not in ("inline", "crossline"):
        raise IndexOutOfRange(f"axis must be 'inline' or 'crossline', got {axis!r}")
    limit = vol.dims[0] if axis == "inline" else vol.dims[1]
    if not 0 <= index < limit:
        raise IndexOutOfRange(f"{axis} index {index} outside [0, {limit})")
    plane = vol.data[index] if axis == "inline" else vol.data[:, index]
    return Section(data=plane.T.copy(), origin=(axis, index), normalized=False)


def normalize_section(s: Section) -> Section:
    """Affine min-max rescale of the amplitudes to [0, 1]."""
    lo = float(s.data.min())
    hi = float(s.data.max())
    if hi == lo:
        raise ConstantSection(f"section is constant at {lo}, cannot normalize")
    data = (s.data.astype(np.float64) - lo) / (hi - lo)
    return Section(data=data.astype(np.float32), origin=s.origin, normalized=True)


# ---------------------------------------------------------------------------
# Boundary CSV and PNG export
# ---------------------------------------------------------------------------

def write_boundary_csv(b: Boundary, path) -> None:
    lines = ["col,row"] + [f"{int(c)},{int(r)}" for c, r in b.points]
    Path(path).write_text("\n".join(lines) + "\n")


def read_boundary_csv(path, section_index: int = -1) -> Boundary:
    text = Path(path).read_text().strip().splitlines()
    if not text or text[0].strip().lower() != "col,row":
        raise BadSidecar(f"{path}: boundary CSV must start with header 'col,row'")
    pts = []
    for line in text[1:]:
        if not line.strip():
            continue
        c, r = line.split(",")
        pts.append((int(c), int(r)))
    points = np.asarray(pts, dtype=np.int64).reshape(-1, 2)
    closed = False
    if len(points) >= 3:
        gap = np.abs(points[0] - points[-1]).max()
        closed = gap <= 1
    return Boundary(points=points, closed=closed, section_index=section_index)


def write_png(data: np.ndarray, path) -> None:
    """Export a 2D array as an 8-bit grayscale PNG (min-max scaled, lossy)."""
    from PIL import Image

    arr = np.asarray(data, dtype=np.float64)
    lo, hi = float(arr.min()), float(arr.max())
    scaled = np.zeros_like(arr) if hi == lo else (arr - lo) / (hi - lo)
    Image.fromarray((scaled * 255.0).round().astype(np.uint8), mode="L").save(path)
