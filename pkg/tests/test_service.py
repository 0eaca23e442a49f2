import numpy as np
import pytest
from fastapi.testclient import TestClient

from salttex.attributes import got_map
from salttex.evaluation import boundary_metrics
from salttex.segmentation import DetectionConfig, detect
from salttex.service import create_app
from salttex.synth import calibrate_threshold, drifting_disk_volume
from salttex.volume_io import Boundary, SeismicVolume, extract_section, normalize_section


@pytest.fixture(scope="module")
def service():
    vol, truths = drifting_disk_volume(n_sections=3, size=96, ref_index=1)
    app = create_app({"demo": vol})
    return TestClient(app), vol, truths


def test_list_volumes(service):
    client, vol, _ = service
    r = client.get("/v1/volumes")
    assert r.status_code == 200
    assert r.json() == {"volumes": [{"id": "demo", "dims": [3, 96, 96]}]}


def test_unknown_volume_404(service):
    client, _, _ = service
    r = client.get("/v1/volumes/ghost/sections/inline/0")
    assert r.status_code == 404
    r = client.post("/v1/detect", json={"volume": "ghost"})
    assert r.status_code == 404


def test_unknown_section_404(service):
    client, _, _ = service
    r = client.get("/v1/volumes/demo/sections/inline/99")
    assert r.status_code == 404


def test_section_png_and_grid(service):
    client, vol, _ = service
    r = client.get("/v1/volumes/demo/sections/inline/0", params={"as": "png"})
    assert r.status_code == 200 and r.headers["content-type"] == "image/png"
    assert r.content[:8] == b"\x89PNG\r\n\x1a\n"
    r = client.get("/v1/volumes/demo/sections/inline/0", params={"as": "grid"})
    assert r.headers["x-dims"] == "96,96"
    assert r.headers["x-dtype"] == "f32le"
    grid = np.frombuffer(r.content, dtype="<f4").reshape(96, 96)
    expected = extract_section(vol, "inline", 0)
    np.testing.assert_array_equal(grid, expected.data)


def test_attribute_endpoint_cached(service):
    client, _, _ = service
    r1 = client.get("/v1/volumes/demo/sections/inline/1/attr/got", params={"as": "grid"})
    assert r1.status_code == 200
    r2 = client.get("/v1/volumes/demo/sections/inline/1/attr/got", params={"as": "grid"})
    assert r1.content == r2.content
    session = client.app.state.session
    assert any(key[3] == "got" for key in session.attr_cache)
    r = client.get("/v1/volumes/demo/sections/inline/1/attr/bogus")
    assert r.status_code == 404


def test_attribute_range(service):
    client, _, _ = service
    r = client.get("/v1/volumes/demo/sections/inline/1/attr/got/range")
    assert r.status_code == 200
    body = r.json()
    assert body["max"] > body["min"] >= 0
    assert body["border_margin"] == 11


def test_detect_matches_library(service):
    client, vol, truths = service
    r = client.post("/v1/detect", json={"volume": "demo", "axis": "inline", "idx": 1})
    assert r.status_code == 200
    body = r.json()
    assert body["threshold_used"] > 0
    assert len(body["boundary"]) >= 20
    section = extract_section(vol, "inline", 1)
    expected = detect(section, DetectionConfig(), attr="got")
    assert body["seed_used"] == list(expected.seed)
    np.testing.assert_array_equal(np.array(body["boundary"]), expected.boundary.points)


def test_detect_replay_identical(service):
    client, _, _ = service
    req = {"volume": "demo", "axis": "inline", "idx": 0, "seed": [47, 47]}
    r1 = client.post("/v1/detect", json=req)
    r2 = client.post("/v1/detect", json=req)
    assert r1.status_code == 200
    assert r1.content == r2.content


def test_detect_seed_above_threshold_422(service):
    client, vol, truths = service
    # a seed on the boundary ring where GoT is high, with a tiny threshold
    ring_pt = truths[1].points[0]
    r = client.post("/v1/detect", json={"volume": "demo", "axis": "inline", "idx": 1,
                                        "seed": [int(ring_pt[0]), int(ring_pt[1])],
                                        "t_g": 1e-6})
    assert r.status_code == 422
    assert r.json()["detail"]["code"] == "SeedAboveThreshold"


def test_detect_seed_outside_section_422(service):
    client, _, _ = service
    r = client.post("/v1/detect", json={"volume": "demo", "axis": "inline", "idx": 1,
                                        "seed": [500, 500]})
    assert r.status_code == 422
    assert r.json()["detail"]["code"] == "SeedOutOfRange"


def test_region_monotone_in_threshold(service):
    client, vol, truths = service
    section = normalize_section(extract_section(vol, "inline", 1))
    g = got_map(section)
    t_lo = calibrate_threshold(g.interior(), fraction=0.5)
    t_hi = calibrate_threshold(g.interior(), fraction=0.9)
    sizes = []
    for t in (t_lo, t_hi):
        r = client.post("/v1/detect", json={"volume": "demo", "axis": "inline", "idx": 1,
                                            "seed": [47, 47], "t_g": t})
        assert r.status_code == 200
        sizes.append(r.json()["region_px"])
    assert sizes[0] <= sizes[1]


def test_track_endpoint(service):
    client, vol, truths = service
    ref = truths[1]
    r = client.post("/v1/track", json={
        "volume": "demo", "ref_idx": 1, "axis": "inline",
        "boundary": [[int(c), int(r_)] for c, r_ in ref.points],
        "config": {"search_halfwidth": 10},
    })
    assert r.status_code == 200
    body = r.json()
    assert len(body["boundaries"]) == 3
    for entry in body["boundaries"]:
        tracked = Boundary(points=np.array(entry["points"]), closed=True)
        assert boundary_metrics(tracked, truths[entry["section"]]).d_max <= 3.0


def test_track_rejects_bad_config(service):
    client, _, truths = service
    r = client.post("/v1/track", json={
        "volume": "demo", "ref_idx": 1,
        "boundary": [[int(c), int(r_)] for c, r_ in truths[1].points],
        "config": {"search_halfwidth": 0},
    })
    assert r.status_code == 422


def test_track_too_few_points(service):
    client, _, _ = service
    r = client.post("/v1/track", json={"volume": "demo", "ref_idx": 1,
                                       "boundary": [[40, 40], [41, 40]]})
    assert r.status_code == 422


def test_concurrent_detects_share_caches(service):
    from concurrent.futures import ThreadPoolExecutor

    client, _, _ = service

    def hit(idx):
        return client.post("/v1/detect", json={"volume": "demo", "axis": "inline",
                                               "idx": idx, "seed": [47, 47]})

    with ThreadPoolExecutor(max_workers=6) as pool:
        responses = list(pool.map(hit, [0, 1, 2] * 2))
    assert all(r.status_code == 200 for r in responses)
    # replays of the same section return identical bodies
    by_idx = {}
    for idx, r in zip([0, 1, 2] * 2, responses):
        by_idx.setdefault(idx, r.content)
        assert by_idx[idx] == r.content
