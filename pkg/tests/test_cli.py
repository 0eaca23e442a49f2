import json
from pathlib import Path

import numpy as np
import pytest

from salttex.cli import main
from salttex.evaluation import boundary_metrics
from salttex.volume_io import read_boundary_csv, read_grid


@pytest.fixture(scope="module")
def disk_dir(tmp_path_factory):
    out = tmp_path_factory.mktemp("fx")
    assert main(["gen", "--kind", "disk", "--size", "128", "--out", str(out)]) == 0
    return out


def test_gen_disk_outputs(disk_dir):
    for name in ("section.json", "section.f32", "truth.csv", "params.json", "run_report.json"):
        assert (disk_dir / name).exists()
    report = json.loads((disk_dir / "run_report.json").read_text())
    assert report["subcommand"] == "gen"
    assert "truth.csv" in report["outputs"]


def test_detect_and_eval_flow(disk_dir, tmp_path):
    out = tmp_path / "det"
    rc = main(["detect", "--in", str(disk_dir / "section.json"), "--attr", "got",
               "--calibrate-fraction", "0.76", "--out", str(out)])
    assert rc == 0
    assert (out / "boundary.csv").exists()
    assert (out / "overlay.png").exists()
    report = json.loads((out / "detect_report.json").read_text())
    assert report["attribute"] == "got" and report["threshold"] > 0
    assert "timings_ms" in report

    ev = tmp_path / "ev"
    rc = main(["eval", "--a", str(out / "boundary.csv"), "--b", str(disk_dir / "truth.csv"),
               "--out", str(ev)])
    assert rc == 0
    summary = json.loads((ev / "summary.json").read_text())
    detected = read_boundary_csv(out / "boundary.csv")
    truth = read_boundary_csv(disk_dir / "truth.csv")
    assert summary["amd"] == pytest.approx(boundary_metrics(detected, truth).d_max)
    assert summary["amd"] <= 2.0
    assert (ev / "metrics.csv").exists() and (ev / "metrics.png").exists()


def test_detect_usage_error_writes_nothing(tmp_path):
    out = tmp_path / "nothing"
    with pytest.raises(SystemExit) as exc:
        main(["detect", "--in", "x.json", "--attr", "bogus", "--out", str(out)])
    assert exc.value.code == 2
    assert not out.exists()


def test_detect_missing_input_is_data_error(tmp_path):
    out = tmp_path / "missing"
    rc = main(["detect", "--in", str(tmp_path / "nope.json"), "--out", str(out)])
    assert rc == 3


def test_detect_pipeline_error_exit_code(disk_dir, tmp_path):
    # seed inside the high-GoT ring with a threshold below it
    rc = main(["detect", "--in", str(disk_dir / "section.json"),
               "--seed-col", "64", "--seed-row", "31", "--t-g", "0.5",
               "--out", str(tmp_path / "pipe")])
    assert rc == 4


def test_cli_idempotent_outputs(disk_dir, tmp_path):
    out = tmp_path / "rerun"
    args = ["detect", "--in", str(disk_dir / "section.json"), "--attr", "glcm",
            "--out", str(out)]
    assert main(args) == 0
    report = json.loads((out / "run_report.json").read_text())
    first = {name: (out / name).read_bytes() for name in report["outputs"]}
    assert main(args) == 0
    for name, blob in first.items():
        assert (out / name).read_bytes() == blob, f"{name} changed between runs"


def test_gen_bands_and_attr(tmp_path):
    fx = tmp_path / "bands"
    assert main(["gen", "--kind", "bands", "--size", "64", "--out", str(fx)]) == 0
    out = tmp_path / "attr"
    assert main(["attr", "--in", str(fx / "section.json"), "--attr", "got",
                 "--out", str(out)]) == 0
    a = read_grid(out / "attr_got.json")
    assert a.data.shape == (64, 64)
    assert (out / "attr_got.png").exists()
    out_d = tmp_path / "attr_d"
    assert main(["attr", "--in", str(fx / "section.json"), "--attr", "directionality",
                 "--out", str(out_d)]) == 0
    assert (out_d / "attr_directionality.json").exists()


def test_gen_volume_and_track(tmp_path):
    fx = tmp_path / "vol"
    assert main(["gen", "--kind", "volume", "--size", "96", "--sections", "3",
                 "--out", str(fx)]) == 0
    assert (fx / "volume.json").exists()
    out = tmp_path / "trk"
    rc = main(["track", "--volume", str(fx / "volume.json"), "--ref-index", "1",
               "--boundary", str(fx / "truth_001.csv"), "--truth-dir", str(fx),
               "--save-model", "model.stxm", "--out", str(out)])
    assert rc == 0
    report = json.loads((out / "track_report.json").read_text())
    assert len(report["sections"]) == 3
    for entry in report["sections"]:
        assert entry["amd_vs_truth"] <= 3.0
    assert (out / "boundary_000.csv").exists()
    assert (out / "tracked.png").exists()
    assert (out / "model.stxm").exists()


def test_noise_sweep_cli(disk_dir, tmp_path):
    out = tmp_path / "sweep"
    rc = main(["noise", "--in", str(disk_dir / "section.json"),
               "--truth", str(disk_dir / "truth.csv"),
               "--sigmas", "0.01,0.02", "--repetitions", "2",
               "--methods", "got", "--seed-col", "64", "--seed-row", "64",
               "--out", str(out)])
    assert rc == 0
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "sigma,method,denoise,n,mean_amd,std_amd"
    assert len(lines) == 3
    assert (out / "sweep.png").exists()
    assert (out / "sweep_detail.csv").exists()


def test_outputs_stay_inside_out_dir(disk_dir, tmp_path):
    out = tmp_path / "contained"
    before = set(p for p in tmp_path.rglob("*"))
    assert main(["detect", "--in", str(disk_dir / "section.json"), "--attr", "gradient",
                 "--out", str(out)]) in (0, 4)
    created = set(tmp_path.rglob("*")) - before
    for p in created:
        assert str(p).startswith(str(out)), f"{p} written outside --out"
