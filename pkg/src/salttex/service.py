"""HTTP facade for interactive detection and tracking.

JSON carries control data; bulk pixels travel as raw little-endian f32
grids (with ``X-Dims``/``X-Dtype`` headers) or min-max-scaled PNGs.
Attribute maps are computed once per (volume, section, attribute, config)
key and cached, so re-detections with a new seed or threshold cost only
the region growing, which is what keeps live threshold tuning responsive.
"""

from __future__ import annotations

import hashlib
import io
import json
import threading
from dataclasses import dataclass, field

import numpy as np
from fastapi import FastAPI, HTTPException, Query, Response
from fastapi.middleware.cors import CORSMiddleware
from pydantic import BaseModel

from .errors import DataError, PipelineError, SaltTexError, SeedOutOfRange, SeedAboveThreshold
from .segmentation import DetectionConfig, compute_attribute, detect
from .tracking import TrackingConfig, track_volume
from .volume_io import Boundary, SeismicVolume, extract_section, normalize_section

_ATTR_KINDS = ("got", "directionality", "glcm", "gradient")


@dataclass
class SessionState:
    """Loaded volumes plus compute-once caches keyed by content hashes.

    Detect responses are cached whole (keyed by the canonical request body)
    so replaying a request returns a byte-identical body, original timings
    included."""

    volumes: dict[str, SeismicVolume]
    attr_cache: dict = field(default_factory=dict)
    detect_cache: dict = field(default_factory=dict)
    lock: threading.Lock = field(default_factory=threading.Lock)
    key_locks: dict = field(default_factory=dict)

    def _key_lock(self, key) -> threading.Lock:
        with self.lock:
            if key not in self.key_locks:
                self.key_locks[key] = threading.Lock()
            return self.key_locks[key]

    def attribute(self, vid: str, axis: str, idx: int, kind: str, cfg: DetectionConfig):
        cfg_hash = hashlib.sha256(repr((cfg.got.scales, cfg.got.weights, cfg.glcm_r_d,
                                        cfg.glcm_levels)).encode()).hexdigest()[:16]
        key = (vid, axis, idx, kind, cfg_hash)
        with self._key_lock(key):
            if key not in self.attr_cache:
                section = extract_section(self.volumes[vid], axis, idx)
                if kind == "directionality":
                    from .attributes import directionality_map
                    ns = normalize_section(section)
                    a_map = directionality_map(ns, cfg.got.scales)
                else:
                    a_map = compute_attribute(section, kind, cfg,
                                              self.volumes[vid] if kind == "gradient" else None)
                with self.lock:
                    self.attr_cache[key] = a_map
            return self.attr_cache[key]


class DetectRequest(BaseModel):
    volume: str
    axis: str = "inline"
    idx: int = 0
    seed: tuple[int, int] | None = None
    t_g: float | None = None
    attr: str = "got"


class TrackRequest(BaseModel):
    volume: str
    ref_idx: int
    boundary: list[tuple[int, int]]
    axis: str = "inline"
    config: dict = {}


def _grid_response(data: np.ndarray) -> Response:
    payload = np.ascontiguousarray(data, dtype="<f4").tobytes()
    return Response(content=payload, media_type="application/octet-stream",
                    headers={"X-Dims": ",".join(str(d) for d in data.shape),
                             "X-Dtype": "f32le"})


def _png_response(data: np.ndarray) -> Response:
    from PIL import Image

    arr = np.asarray(data, dtype=np.float64)
    lo, hi = float(arr.min()), float(arr.max())
    scaled = np.zeros_like(arr) if hi == lo else (arr - lo) / (hi - lo)
    img = Image.fromarray((scaled * 255.0).round().astype(np.uint8), mode="L")
    buf = io.BytesIO()
    img.save(buf, format="PNG")
    return Response(content=buf.getvalue(), media_type="image/png")


def create_app(volumes: dict[str, SeismicVolume]) -> FastAPI:
    state = SessionState(volumes=dict(volumes))
    app = FastAPI(title="salttex service")
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["*"],
                       allow_headers=["*"])
    app.state.session = state

    def _volume(vid: str) -> SeismicVolume:
        if vid not in state.volumes:
            raise HTTPException(status_code=404, detail={"code": "UnknownVolume", "volume": vid})
        return state.volumes[vid]

    def _section(vid: str, axis: str, idx: int):
        vol = _volume(vid)
        try:
            return extract_section(vol, axis, idx)
        except SaltTexError as exc:
            raise HTTPException(status_code=404, detail={"code": exc.code, "message": str(exc)})

    @app.get("/v1/volumes")
    def list_volumes():
        return {"volumes": [{"id": vid, "dims": list(vol.dims)}
                            for vid, vol in sorted(state.volumes.items())]}

    @app.get("/v1/volumes/{vid}/sections/{axis}/{idx}")
    def get_section(vid: str, axis: str, idx: int, as_: str = Query("png", alias="as")):
        section = _section(vid, axis, idx)
        return _png_response(section.data) if as_ == "png" else _grid_response(section.data)

    @app.get("/v1/volumes/{vid}/sections/{axis}/{idx}/attr/{kind}")
    def get_attribute(vid: str, axis: str, idx: int, kind: str,
                      as_: str = Query("png", alias="as")):
        _section(vid, axis, idx)
        if kind not in _ATTR_KINDS:
            raise HTTPException(status_code=404, detail={"code": "UnknownAttribute", "kind": kind})
        try:
            a_map = state.attribute(vid, axis, idx, kind, DetectionConfig())
        except SaltTexError as exc:
            raise HTTPException(status_code=500, detail={"code": exc.code, "message": str(exc)})
        return _png_response(a_map.data) if as_ == "png" else _grid_response(a_map.data)

    @app.get("/v1/volumes/{vid}/sections/{axis}/{idx}/attr/{kind}/range")
    def get_attribute_range(vid: str, axis: str, idx: int, kind: str):
        _section(vid, axis, idx)
        if kind not in _ATTR_KINDS:
            raise HTTPException(status_code=404, detail={"code": "UnknownAttribute", "kind": kind})
        a_map = state.attribute(vid, axis, idx, kind, DetectionConfig())
        vals = a_map.interior()
        return {"min": float(vals.min()), "max": float(vals.max()),
                "border_margin": a_map.border_margin}

    @app.post("/v1/detect")
    def post_detect(req: DetectRequest):
        cache_key = json.dumps(req.model_dump(), sort_keys=True)
        with state._key_lock(("detect", cache_key)):
            cached = state.detect_cache.get(cache_key)
            if cached is not None:
                return Response(content=cached, media_type="application/json")
            section = _section(req.volume, req.axis, req.idx)
            if req.attr not in ("got", "glcm", "gradient"):
                raise HTTPException(status_code=422, detail={"code": "UnknownAttribute",
                                                             "attr": req.attr})
            cfg = DetectionConfig(
                threshold_mode="manual" if req.t_g is not None else "otsu",
                t_g=req.t_g,
                seed_mode="manual" if req.seed is not None else "auto",
                seed=tuple(req.seed) if req.seed is not None else None,
            )
            a_map = state.attribute(req.volume, req.axis, req.idx, req.attr, cfg)
            try:
                result = detect(section, cfg, attr=req.attr, attr_map=a_map)
            except (SeedOutOfRange, SeedAboveThreshold) as exc:
                raise HTTPException(status_code=422,
                                    detail={"code": exc.code, "message": str(exc)})
            except SaltTexError as exc:
                raise HTTPException(status_code=500,
                                    detail={"code": exc.code, "message": str(exc)})
            body = json.dumps({
                "boundary": [[int(c), int(r)] for c, r in result.boundary.points],
                "seed_used": list(result.seed),
                "threshold_used": result.threshold,
                "region_px": result.mask.count(),
                "timings_ms": result.timings_ms,
            })
            state.detect_cache[cache_key] = body
        return Response(content=body, media_type="application/json")

    @app.post("/v1/track")
    def post_track(req: TrackRequest):
        vol = _volume(req.volume)
        if len(req.boundary) < 3:
            raise HTTPException(status_code=422, detail={"code": "TooFewPatches",
                                                         "message": "boundary needs >= 3 points"})
        boundary = Boundary(points=np.array(req.boundary, dtype=np.int64), closed=True,
                            section_index=req.ref_idx)
        try:
            cfg = TrackingConfig(**req.config)
            tracked = track_volume(vol, req.ref_idx, boundary, cfg, axis=req.axis)
        except (DataError, PipelineError) as exc:
            raise HTTPException(status_code=422, detail={"code": exc.code, "message": str(exc)})
        except SaltTexError as exc:
            raise HTTPException(status_code=500, detail={"code": exc.code, "message": str(exc)})
        except TypeError as exc:
            raise HTTPException(status_code=422, detail={"code": "BadConfig", "message": str(exc)})
        return {"boundaries": [{"section": b.section_index,
                                "points": [[int(c), int(r)] for c, r in b.points]}
                               for b in tracked]}

    return app
