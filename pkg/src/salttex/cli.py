"""Command-line entry point.

Subcommands: ``gen`` (synthetic fixtures), ``attr`` (attribute maps),
``detect`` (boundary detection), ``track`` (boundary tracking), ``eval``
(boundary metrics), ``noise`` (noise sweep), ``serve`` (HTTP service).

Every run writes a machine-readable ``run_report.json`` beside its outputs
(subcommand, config echo, timings, output list).  Report-style subcommands
also render matplotlib figures next to their delimited outputs.  Exit
codes: 0 success, 2 usage error, 3 data error, 4 pipeline error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import figures
from .attributes import directionality_map
from .errors import DataError, SaltTexError
from .evaluation import amd, boundary_metrics, summarize
from .noisebench import BilateralConfig, NoiseSweepConfig, run_noise_sweep, sweep_csv, sweep_detail_csv
from .segmentation import DetectionConfig, compute_attribute, detect
from .synth import calibrate_threshold, disk_section, drifting_disk_volume, vertical_boundary_section
from .tracking import TrackingConfig, save_model, track_volume
from .volume_io import (
    Boundary,
    Section,
    SeismicVolume,
    extract_section,
    normalize_section,
    read_boundary_csv,
    read_grid,
    read_segy,
    write_boundary_csv,
    write_grid,
)

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_PIPELINE = 0, 2, 3, 4


class _Report:
    def __init__(self, subcommand: str, out_dir: Path, config: dict):
        config = {k: v for k, v in config.items() if k != "func"}
        self.data = {"subcommand": subcommand, "config": config, "timings_ms": {}, "outputs": []}
        self.out_dir = out_dir
        self._t0 = time.perf_counter()

    def add(self, path: Path) -> Path:
        self.data["outputs"].append(str(path.relative_to(self.out_dir)))
        return path

    def write(self):
        self.data["timings_ms"]["total"] = (time.perf_counter() - self._t0) * 1000.0
        (self.out_dir / "run_report.json").write_text(json.dumps(self.data, indent=1) + "\n")


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _load_section(path) -> Section:
    grid = read_grid(path)
    if isinstance(grid, Section):
        return grid
    raise DataError(f"{path} holds a volume; pass --axis/--index via a volume flag instead")


def _load_volume(path) -> SeismicVolume:
    p = Path(path)
    if p.suffix in (".sgy", ".segy"):
        return read_segy(p.read_bytes())
    grid = read_grid(path)
    if isinstance(grid, SeismicVolume):
        return grid
    raise DataError(f"{path} holds a 2D section, expected a volume")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_gen(args) -> int:
    out = _out_dir(args)
    report = _Report("gen", out, vars(args).copy())
    params = {"kind": args.kind, "size": args.size, "seed": args.seed}
    if args.kind == "disk":
        sec, truth = disk_section(size=args.size, seed=args.seed)
        write_grid(sec, report.add(out / "section.json"))
        report.add(out / "section.f32")
        write_boundary_csv(truth, report.add(out / "truth.csv"))
    elif args.kind == "bands":
        sec = vertical_boundary_section(rows=args.size, cols=args.size, seed=args.seed)
        write_grid(sec, report.add(out / "section.json"))
        report.add(out / "section.f32")
        col = args.size // 2
        line = Boundary(points=np.array([(col, r) for r in range(args.size)]), closed=False)
        write_boundary_csv(line, report.add(out / "truth.csv"))
    else:
        vol, truths = drifting_disk_volume(n_sections=args.sections, size=args.size,
                                           ref_index=args.sections // 2, seed=args.seed)
        params.update({"sections": args.sections, "ref_index": args.sections // 2})
        write_grid(vol, report.add(out / "volume.json"))
        report.add(out / "volume.f32")
        for k, truth in enumerate(truths):
            write_boundary_csv(truth, report.add(out / f"truth_{k:03d}.csv"))
    (out / "params.json").write_text(json.dumps(params, indent=1) + "\n")
    report.add(out / "params.json")
    report.write()
    return EXIT_OK


def cmd_attr(args) -> int:
    out = _out_dir(args)
    report = _Report("attr", out, vars(args).copy())
    sec = _load_section(args.input)
    cfg = DetectionConfig(glcm_r_d=args.r_d)
    if args.attr == "directionality":
        ns = sec if sec.normalized else normalize_section(sec)
        a_map = directionality_map(ns, cfg.got.scales)
    else:
        a_map = compute_attribute(sec, args.attr, cfg)
    grid = Section(data=a_map.data, origin=sec.origin, normalized=False)
    write_grid(grid, report.add(out / f"attr_{args.attr}.json"))
    report.add(out / f"attr_{args.attr}.f32")
    figures.save_attribute(a_map.data, args.attr, report.add(out / f"attr_{args.attr}.png"))
    report.write()
    return EXIT_OK


def _detection_config(args) -> DetectionConfig:
    seed = None
    if args.seed_col is not None or args.seed_row is not None:
        if args.seed_col is None or args.seed_row is None:
            raise DataError("--seed-col and --seed-row must be given together")
        seed = (args.seed_col, args.seed_row)
    return DetectionConfig(
        threshold_mode="manual" if args.t_g is not None else "otsu",
        t_g=args.t_g,
        seed_mode="manual" if seed is not None else "auto",
        seed=seed,
        smoothing_sigma=args.smoothing_sigma,
        morph_radius=args.morph_radius,
    )


def cmd_detect(args) -> int:
    out = _out_dir(args)
    report = _Report("detect", out, vars(args).copy())
    volume = None
    if args.volume:
        volume = _load_volume(args.volume)
        sec = extract_section(volume, args.axis, args.index)
    else:
        sec = _load_section(args.input)
    cfg = _detection_config(args)
    attr_map = None
    if args.calibrate_fraction is not None:
        attr_map = compute_attribute(sec, args.attr, cfg, volume)
        t_g = calibrate_threshold(attr_map.interior(), fraction=args.calibrate_fraction)
        cfg = DetectionConfig(threshold_mode="manual", t_g=t_g, seed_mode=cfg.seed_mode,
                              seed=cfg.seed, smoothing_sigma=cfg.smoothing_sigma,
                              morph_radius=cfg.morph_radius)
    result = detect(sec, cfg, attr=args.attr, volume=volume, attr_map=attr_map)

    write_boundary_csv(result.boundary, report.add(out / "boundary.csv"))
    write_grid(Section(data=result.mask.data.astype(np.float32), origin=sec.origin),
               report.add(out / "mask.json"))
    report.add(out / "mask.f32")
    write_grid(Section(data=result.attribute_map.data, origin=sec.origin),
               report.add(out / f"attr_{args.attr}.json"))
    report.add(out / f"attr_{args.attr}.f32")
    detect_report = {
        "seed": list(result.seed),
        "threshold": result.threshold,
        "attribute": args.attr,
        "timings_ms": result.timings_ms,
    }
    # reports carry timings, so they sit beside the outputs rather than in
    # the bit-identical outputs[] list
    (out / "detect_report.json").write_text(json.dumps(detect_report, indent=1) + "\n")
    figures.save_overlay(sec.data, [(result.boundary, "detected")],
                         report.add(out / "overlay.png"), title=f"{args.attr} detection")
    report.data["timings_ms"].update(result.timings_ms)
    report.write()
    return EXIT_OK


def cmd_track(args) -> int:
    out = _out_dir(args)
    report = _Report("track", out, vars(args).copy())
    vol = _load_volume(args.volume)
    ref_boundary = read_boundary_csv(args.boundary)
    cfg = TrackingConfig(
        t_e=args.t_e,
        search_halfwidth=args.search_halfwidth,
        lambda_c=args.lambda_c,
        noise_adjusted=args.noise_adjusted,
        features=args.features,
    )
    section_stats: list[dict] = []
    boundaries = track_volume(vol, args.ref_index, ref_boundary, cfg, axis=args.axis,
                              stats_out=section_stats)

    per_section = []
    truth_dir = Path(args.truth_dir) if args.truth_dir else None
    for k, (b, stats) in enumerate(zip(boundaries, section_stats)):
        write_boundary_csv(b, report.add(out / f"boundary_{k:03d}.csv"))
        entry = {"section": k, "n_points": len(b.points),
                 "accepted": stats.get("accepted"), "dropped": stats.get("dropped")}
        if truth_dir is not None:
            tpath = truth_dir / f"truth_{k:03d}.csv"
            if tpath.exists():
                entry["amd_vs_truth"] = boundary_metrics(b, read_boundary_csv(tpath)).d_max
        per_section.append(entry)
    track_report = {"ref_index": args.ref_index, "sections": per_section}
    (out / "track_report.json").write_text(json.dumps(track_report, indent=1) + "\n")
    report.add(out / "track_report.json")

    ref_sec = extract_section(vol, args.axis, args.ref_index)
    overlays = [(b, f"section {k}") for k, b in enumerate(boundaries)]
    figures.save_overlay(ref_sec.data, overlays, report.add(out / "tracked.png"),
                         title="tracked boundaries (reference view)")
    if args.save_model:
        from .attributes import got_map as _got
        from .tracking import build_patch_tensors, learn_model
        ref_n = normalize_section(ref_sec)
        ref_got = _got(ref_n, cfg.got)
        tensors = build_patch_tensors(ref_n, ref_got, ref_boundary, cfg)
        model = learn_model(tensors, cfg, section_shape=ref_n.data.shape)
        save_model(model, report.add(out / args.save_model))
    report.write()
    return EXIT_OK


def _boundary_list(path) -> list:
    p = Path(path)
    if p.is_dir():
        files = sorted(p.glob("*.csv"))
        if not files:
            raise DataError(f"no boundary CSVs in {p}")
        return [read_boundary_csv(f) for f in files]
    return [read_boundary_csv(p)]


def cmd_eval(args) -> int:
    out = _out_dir(args)
    report = _Report("eval", out, vars(args).copy())
    set_a = _boundary_list(args.a)
    set_b = _boundary_list(args.b)
    value = amd(set_a, set_b)
    rows = []
    for i, (a, b) in enumerate(zip(set_a, set_b)):
        m = boundary_metrics(a, b)
        rows.append({"index": i, "d_max": m.d_max, "mean_sym_dist": m.mean_sym_dist})
    lines = ["index,d_max,mean_sym_dist"]
    lines += [f"{r['index']},{r['d_max']:.6g},{r['mean_sym_dist']:.6g}" for r in rows]
    (out / "metrics.csv").write_text("\n".join(lines) + "\n")
    report.add(out / "metrics.csv")
    stats = summarize([r["d_max"] for r in rows])
    summary = {"amd": value, "d_max": stats,
               "mean_sym_dist": summarize([r["mean_sym_dist"] for r in rows]),
               "n_pairs": len(rows)}
    (out / "summary.json").write_text(json.dumps(summary, indent=1) + "\n")
    report.add(out / "summary.json")
    figures.save_metrics(rows, report.add(out / "metrics.png"))
    report.write()
    print(f"AMD: {value:.6g} px over {len(rows)} pair(s)")
    return EXIT_OK


def cmd_noise(args) -> int:
    out = _out_dir(args)
    report = _Report("noise", out, vars(args).copy())
    sec = _load_section(args.input)
    truth = read_boundary_csv(args.truth)
    det_cfg = _detection_config(args)
    cfg = NoiseSweepConfig(
        sigmas=[float(s) for s in args.sigmas.split(",")],
        seed=args.seed,
        denoise=args.denoise,
        bilateral=BilateralConfig(sigma_s=args.bilateral_sigma_s,
                                  sigma_r=args.bilateral_sigma_r,
                                  radius=args.bilateral_radius),
        repetitions=args.repetitions,
    )
    cells = run_noise_sweep(sec, truth, cfg, methods=args.methods.split(","), det_cfg=det_cfg)
    (out / "sweep.csv").write_text(sweep_csv(cells))
    report.add(out / "sweep.csv")
    (out / "sweep_detail.csv").write_text(sweep_detail_csv(cells))
    report.add(out / "sweep_detail.csv")
    figures.save_sweep(cells, report.add(out / "sweep.png"))
    report.write()
    return EXIT_OK


def cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    volumes = {}
    for vp in args.volume or []:
        volumes[Path(vp).stem] = _load_volume(vp)
    app = create_app(volumes)
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="salttex",
                                     description="Texture-gradient salt dome detection and tracking")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("gen", help="generate synthetic fixtures")
    p.add_argument("--kind", choices=["disk", "bands", "volume"], default="disk")
    p.add_argument("--size", type=int, default=128)
    p.add_argument("--sections", type=int, default=5)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("attr", help="compute an attribute map")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--attr", choices=["got", "directionality", "glcm", "gradient"], default="got")
    p.add_argument("--r-d", type=int, default=4)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_attr)

    p = sub.add_parser("detect", help="detect a salt-body boundary in one section")
    p.add_argument("--in", dest="input")
    p.add_argument("--volume")
    p.add_argument("--axis", choices=["inline", "crossline"], default="inline")
    p.add_argument("--index", type=int, default=0)
    p.add_argument("--attr", choices=["got", "glcm", "gradient"], default="got")
    p.add_argument("--seed-col", type=int)
    p.add_argument("--seed-row", type=int)
    p.add_argument("--t-g", type=float)
    p.add_argument("--calibrate-fraction", type=float,
                   help="derive a manual threshold from the attribute map's high quantile")
    p.add_argument("--smoothing-sigma", type=float, default=1.0)
    p.add_argument("--morph-radius", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("track", help="track a reference boundary through a volume")
    p.add_argument("--volume", required=True)
    p.add_argument("--ref-index", type=int, required=True)
    p.add_argument("--boundary", required=True)
    p.add_argument("--axis", choices=["inline", "crossline"], default="inline")
    p.add_argument("--t-e", type=float, default=2.3)
    p.add_argument("--search-halfwidth", type=int, default=15)
    p.add_argument("--lambda-c", type=float, default=1.0)
    p.add_argument("--noise-adjusted", action="store_true")
    p.add_argument("--features", choices=["tensor", "vector"], default="tensor")
    p.add_argument("--truth-dir")
    p.add_argument("--save-model")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_track)

    p = sub.add_parser("eval", help="compare boundary sets")
    p.add_argument("--a", required=True)
    p.add_argument("--b", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("noise", help="noise-robustness sweep")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--sigmas", default="0.01,0.02,0.03,0.04,0.05")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repetitions", type=int, default=10)
    p.add_argument("--denoise", choices=["none", "bilateral"], default="none")
    p.add_argument("--methods", default="got,glcm")
    p.add_argument("--bilateral-sigma-s", type=float, default=2.0)
    p.add_argument("--bilateral-sigma-r", type=float, default=0.1)
    p.add_argument("--bilateral-radius", type=int, default=3)
    p.add_argument("--seed-col", type=int)
    p.add_argument("--seed-row", type=int)
    p.add_argument("--t-g", type=float)
    p.add_argument("--smoothing-sigma", type=float, default=1.0)
    p.add_argument("--morph-radius", type=int, default=1)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_noise)

    p = sub.add_parser("serve", help="start the HTTP service")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--volume", action="append")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.subcommand == "detect" and not args.input and not args.volume:
        parser.error("detect requires --in or --volume")
    try:
        return args.func(args)
    except DataError as exc:
        print(f"data error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_DATA
    except SaltTexError as exc:
        print(f"pipeline error [{exc.code}]: {exc}", file=sys.stderr)
        return EXIT_PIPELINE


if __name__ == "__main__":
    sys.exit(main())
