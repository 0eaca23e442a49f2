"""Acceptance suite: every primary criterion at its stated tolerance.

Run with ``pytest -s tests/test_acceptance.py`` to see one PASS/FAIL line
per criterion with its runtime against the stated budget.
"""

import time
from contextlib import contextmanager

import numpy as np
import pytest

from oracles import (
    dissimilarity_oracle,
    flood_fill_oracle,
    glcm_contrast_oracle,
    otsu_oracle,
    reconstruction_error_oracle,
    sobel27_oracle,
    unfolding_bases_oracle,
)
from test_volume_io import IBM_TABLE, SAMPLES, build_segy
from salttex.attributes import (
    glcm_contrast_map,
    glcm_offsets,
    got_components,
    got_map,
    dissimilarity,
    quantize,
    sobel3d_gradient,
)
from salttex.evaluation import boundary_metrics
from salttex.noisebench import BilateralConfig, NoiseSweepConfig, add_gaussian_noise, run_noise_sweep
from salttex.segmentation import DetectionConfig, detect, otsu_threshold, region_grow
from salttex.synth import calibrate_threshold, disk_section, tracking_section, vertical_boundary_section
from salttex.tracking import (
    PatchPair,
    TrackingConfig,
    build_patch_tensors,
    learn_model,
    learn_subspace,
    reconstruction_error,
    track_section,
    track_volume,
)
from salttex.attributes import AttributeMap
from salttex.volume_io import SeismicVolume, ibm_to_ieee, read_segy


@contextmanager
def criterion(name: str, limit_s: float):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException:
        print(f"[FAIL] {name} after {time.perf_counter() - t0:.1f}s")
        raise
    elapsed = time.perf_counter() - t0
    assert elapsed < limit_s, f"{name}: {elapsed:.1f}s exceeds the {limit_s:.0f}s budget"
    print(f"[PASS] {name} ({elapsed:.1f}s / limit {limit_s:.0f}s)")


def test_dissimilarity_oracle_500_pairs():
    with criterion("dissimilarity oracle (500 pairs, 1e-9 rel)", 5.0):
        rng = np.random.default_rng(1)
        for _ in range(500):
            side = int(rng.integers(3, 12))
            a = rng.normal(size=(side, side))
            b = rng.normal(size=(side, side))
            d = dissimilarity(a, b)
            assert d == pytest.approx(dissimilarity_oracle(a, b), rel=1e-9)
            assert dissimilarity(b, a) == d
            assert dissimilarity(a, a) == 0.0
            assert dissimilarity(2 * a, 2 * b) == pytest.approx(2 * d, rel=1e-9)


def test_got_correctness():
    with criterion("GoT boundary localization (20 sections, >=95% rows)", 30.0):
        from salttex.attributes import GotConfig
        from salttex.volume_io import Section

        const = Section(data=np.full((40, 40), 0.3, dtype=np.float32))
        assert got_map(const, GotConfig(scales=[1, 2, 3], weights=[1, 0.5, 1 / 3])).data.max() == 0.0

        hits = total = 0
        for seed in range(20):
            sec = vertical_boundary_section(rows=64, cols=64, boundary_col=32, seed=seed)
            gx, _ = got_components(sec)
            for r in range(11, 64 - 11):
                c_max = int(np.argmax(gx[r, 11:64 - 11])) + 11
                hits += abs(c_max - 32) <= 1
                total += 1
        assert hits / total >= 0.95, f"only {hits}/{total} rows localized"


def test_otsu_equivalence_100_histograms():
    with criterion("Otsu == exhaustive intra-class argmin (100 histograms)", 2.0):
        rng = np.random.default_rng(7)
        checked = 0
        while checked < 100:
            h = rng.integers(0, 60, size=256)
            if np.count_nonzero(h) < 2:
                continue
            assert otsu_threshold(h) == otsu_oracle(h)
            checked += 1


def test_region_growing_oracle_200_maps():
    with criterion("region growing == flood fill (200 maps)", 5.0):
        rng = np.random.default_rng(3)
        checked = 0
        while checked < 200:
            data = rng.random((16, 18)).astype(np.float32)
            g = AttributeMap(data=data, kind="got", border_margin=0)
            seed = (int(rng.integers(0, 18)), int(rng.integers(0, 16)))
            t = float(rng.uniform(0.05, 0.95))
            below = data < t
            if not below[seed[1], seed[0]]:
                continue
            mask = region_grow(g, seed, t)
            np.testing.assert_array_equal(
                mask.data, flood_fill_oracle(below, (seed[1], seed[0])))
            checked += 1


def test_glcm_and_sobel_oracles():
    with criterion("GLCM + Sobel == brute force (50 cases each, exact)", 10.0):
        from salttex.volume_io import Section

        rng = np.random.default_rng(11)
        r_d = 4
        offsets = glcm_offsets(r_d)
        for _ in range(50):
            data = rng.normal(size=(12, 12)).astype(np.float32)
            out = glcm_contrast_map(Section(data=data), r_d=r_d)
            q = quantize(data, 16)
            for r in range(r_d, 12 - r_d):
                for c in range(r_d, 12 - r_d):
                    expected = glcm_contrast_oracle(q, r_d, offsets, r, c)
                    assert out.data[r, c] == np.float32(expected)
        for _ in range(50):
            vol = rng.integers(-100, 100, size=(5, 5, 5)).astype(np.float32)
            out = sobel3d_gradient(SeismicVolume(data=vol))
            expected = sobel27_oracle(vol.astype(np.float64)).astype(np.float32)
            np.testing.assert_array_equal(out, expected)


def test_subspace_oracle_10_tensors():
    with criterion("subspace bases + training errors vs oracle (1e-9 rel)", 20.0):
        rng = np.random.default_rng(5)
        dims = (15, 15, 5)
        for _ in range(10):
            tensor = rng.normal(size=(31, 31, 20))
            sub = learn_subspace(tensor, dims)
            mean, bases = unfolding_bases_oracle(tensor, dims)
            np.testing.assert_allclose(sub.mean, mean, rtol=0, atol=1e-12)
            for mine, ref in zip((sub.basis1, sub.basis2, sub.basis3), bases):
                dots = np.abs(np.einsum("ij,ij->j", mine, ref))
                np.testing.assert_allclose(dots, 1.0, rtol=1e-9)
            from test_tracking import _model_from_sources

            model = _model_from_sources(sub, sub, 31)
            for k in range(20):
                expected = reconstruction_error_oracle(tensor[:, :, k], mean,
                                                       bases[0], bases[1])
                pp = PatchPair(amp_patch=tensor[:, :, k], got_patch=tensor[:, :, k],
                               center=(0, 0))
                assert reconstruction_error(pp, model) == pytest.approx(
                    np.hypot(expected, expected), rel=1e-9)
        # full dims reconstruct every patch exactly
        tensor = rng.normal(size=(31, 31, 12))
        sub = learn_subspace(tensor, (31, 31, 12))
        from test_tracking import _model_from_sources

        model = _model_from_sources(sub, sub, 31)
        for k in range(12):
            pp = PatchPair(amp_patch=tensor[:, :, k], got_patch=tensor[:, :, k], center=(0, 0))
            assert reconstruction_error(pp, model) == 0.0


def test_end_to_end_detection(disk_fixture, disk_got):
    with criterion("detection: AMD(got) <= 2 px and <= AMD(gradient)", 60.0):
        section, truth = disk_fixture
        t_g = calibrate_threshold(disk_got.interior())
        got_result = detect(section, DetectionConfig(threshold_mode="manual", t_g=t_g),
                            attr="got", attr_map=disk_got)
        amd_got = boundary_metrics(got_result.boundary, truth).d_max
        assert amd_got <= 2.0, f"AMD(got) = {amd_got}"

        grad_result = detect(section, DetectionConfig(), attr="gradient")
        amd_grad = boundary_metrics(grad_result.boundary, truth).d_max
        assert amd_got <= amd_grad, f"AMD(got)={amd_got} > AMD(gradient)={amd_grad}"


def test_end_to_end_tracking(tracking_volume):
    with criterion("tracking: AMD <= 3 px per section, self <= 1 px", 120.0):
        vol, truths = tracking_volume
        ref_index = 2
        boundaries = track_volume(vol, ref_index, truths[ref_index], TrackingConfig())
        for k, b in enumerate(boundaries):
            d = boundary_metrics(b, truths[k]).d_max
            if k == ref_index:
                assert d <= 1.0, f"self-tracking AMD {d}"
            else:
                assert d <= 3.0, f"section {k} AMD {d}"


def test_noise_sweep(disk_fixture, disk_got):
    with criterion("noise sweep: AMD non-decreasing + bilateral helps", 300.0):
        section, truth = disk_fixture
        det = DetectionConfig(threshold_mode="manual",
                              t_g=calibrate_threshold(disk_got.interior()),
                              seed_mode="manual", seed=(64, 64))
        cfg = NoiseSweepConfig(sigmas=[0.01, 0.02, 0.03, 0.04, 0.05], seed=0, repetitions=10)
        cells = run_noise_sweep(section, truth, cfg, methods=["got"], det_cfg=det)
        means = [c.mean_amd for c in cells]
        assert all(c.n == 10 for c in cells)
        inversions = [max(means[i] - means[i + 1], 0.0) for i in range(len(means) - 1)]
        big = [v for v in inversions if v > 0.25]
        n_inv = sum(1 for v in inversions if v > 0)
        assert len(big) == 0 and n_inv <= 1, f"means {means} not monotone enough"

        cfg_b = NoiseSweepConfig(sigmas=[0.05], seed=0, repetitions=10, denoise="bilateral",
                                 bilateral=BilateralConfig(sigma_s=2.0, sigma_r=0.1, radius=3))
        cells_b = run_noise_sweep(section, truth, cfg_b, methods=["got"], det_cfg=det)
        assert cells_b[0].mean_amd <= means[-1] + 1e-9, (
            f"bilateral {cells_b[0].mean_amd} vs plain {means[-1]}")


def test_noise_adjusted_tracking():
    with criterion("noise-adjusted tracking: mean AMD(nadj) <= mean AMD(std)", 300.0):
        ref_index = 2
        secs, truths = [], []
        for k in range(5):
            s, t = tracking_section(size=96, radius=22.0 + 2.0 * (k - ref_index),
                                    amp=0.05, section_index=k)
            secs.append(s)
            truths.append(t)
        amds = {False: [], True: []}
        for seed in range(10):
            noisy_ref = add_gaussian_noise(secs[ref_index], 0.01, 9000 + seed)
            ref_got = got_map(noisy_ref)
            models = {}
            for na in (False, True):
                cfg = TrackingConfig(noise_adjusted=na)
                tensors = build_patch_tensors(noisy_ref, ref_got, truths[ref_index], cfg)
                models[na] = (learn_model(tensors, cfg, section_shape=noisy_ref.data.shape), cfg)
            for k in range(5):
                if k == ref_index:
                    continue
                noisy_target = add_gaussian_noise(secs[k], 0.05, 9100 + seed * 10 + k)
                target_got = got_map(noisy_target)
                for na in (False, True):
                    model, cfg = models[na]
                    b = track_section(model, truths[ref_index], noisy_target, cfg,
                                      target_got=target_got)
                    amds[na].append(boundary_metrics(b, truths[k]).d_max)
        mean_std = float(np.mean(amds[False]))
        mean_nadj = float(np.mean(amds[True]))
        assert mean_nadj <= mean_std, f"noise-adjusted {mean_nadj} vs standard {mean_std}"


def test_segy_and_ibm():
    with criterion("SEG-Y round trip exact + IBM table 32/32", 10.0):
        stream = build_segy([(10, 5, SAMPLES), (11, 5, SAMPLES)], n_samples=4)
        vol = read_segy(stream)
        assert vol.dims == (2, 1, 4)
        np.testing.assert_array_equal(vol.data[0, 0], np.array(SAMPLES, dtype=np.float32))
        np.testing.assert_array_equal(vol.data[1, 0], np.array(SAMPLES, dtype=np.float32))

        words = np.array([w for w, _ in IBM_TABLE], dtype=np.uint32)
        expected = np.array([v for _, v in IBM_TABLE])
        converted = ibm_to_ieee(words)
        assert len(IBM_TABLE) == 32
        matches = sum(1 for g, e in zip(converted, expected) if g == e or (g == 0 and e == 0))
        assert matches == 32, f"IBM conversion table {matches}/32"
