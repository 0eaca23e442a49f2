import numpy as np
import pytest

from oracles import gaussian_convolve_oracle
from salttex import errors
from salttex.evaluation import boundary_metrics
from salttex.noisebench import (
    BilateralConfig,
    NoiseSweepConfig,
    add_gaussian_noise,
    bilateral_filter,
    run_noise_sweep,
    sweep_csv,
)
from salttex.segmentation import DetectionConfig
from salttex.synth import calibrate_threshold, disk_section
from salttex.volume_io import Section


def _normalized(data):
    return Section(data=np.asarray(data, dtype=np.float32), normalized=True)


# ---------------------------------------------------------------------------
# Noise injection
# ---------------------------------------------------------------------------

def test_noise_sigma_zero_is_identity(rng):
    sec = _normalized(rng.random((16, 16)))
    out = add_gaussian_noise(sec, 0.0, seed=5)
    assert out.data.tobytes() == sec.data.tobytes()


def test_noise_moments():
    sec = _normalized(np.zeros((256, 256)))
    out = add_gaussian_noise(sec, 0.05, seed=7)
    n = 256 * 256
    assert abs(float(out.data.mean())) <= 4 * 0.05 / 256
    assert abs(float(out.data.std()) - 0.05) <= 0.02 * 0.05
    # standard error of the std is about sigma/sqrt(2n)
    assert abs(float(out.data.std()) - 0.05) <= 6 * 0.05 / np.sqrt(2 * n)


def test_noise_deterministic(rng):
    sec = _normalized(rng.random((20, 20)))
    a = add_gaussian_noise(sec, 0.03, seed=99)
    b = add_gaussian_noise(sec, 0.03, seed=99)
    assert a.data.tobytes() == b.data.tobytes()
    c = add_gaussian_noise(sec, 0.03, seed=100)
    assert a.data.tobytes() != c.data.tobytes()


def test_noise_requires_normalized(rng):
    sec = Section(data=rng.random((8, 8)).astype(np.float32), normalized=False)
    with pytest.raises(errors.NotNormalized):
        add_gaussian_noise(sec, 0.01, seed=0)


def test_noise_not_clipped():
    sec = _normalized(np.ones((64, 64)))
    out = add_gaussian_noise(sec, 0.1, seed=3)
    assert out.data.max() > 1.0


# ---------------------------------------------------------------------------
# Bilateral filter
# ---------------------------------------------------------------------------

def test_bilateral_constant_unchanged():
    sec = _normalized(np.full((12, 12), 0.37))
    out = bilateral_filter(sec, sigma_s=2.0, sigma_r=0.1, radius=2)
    np.testing.assert_array_equal(out.data, sec.data)


def test_bilateral_huge_range_sigma_matches_gaussian(rng):
    img = rng.random((10, 10))
    sec = _normalized(img)
    out = bilateral_filter(sec, sigma_s=1.5, sigma_r=1e6, radius=3)
    ax = np.arange(-3, 4, dtype=float)
    kernel = np.exp(-(ax[:, None] ** 2 + ax[None, :] ** 2) / (2 * 1.5 ** 2))
    kernel /= kernel.sum()
    expected = gaussian_convolve_oracle(img.astype(np.float64), kernel)
    np.testing.assert_allclose(out.data, expected, atol=1e-6)


def test_bilateral_preserves_edge_better_than_gaussian():
    cols = np.zeros((16, 32))
    cols[:, 16:] = 1.0
    sec = _normalized(cols)
    bi = bilateral_filter(sec, sigma_s=2.0, sigma_r=0.1, radius=4)

    ax = np.arange(-4, 5, dtype=float)
    kernel = np.exp(-(ax[:, None] ** 2 + ax[None, :] ** 2) / (2 * 2.0 ** 2))
    kernel /= kernel.sum()
    blurred = gaussian_convolve_oracle(cols, kernel)

    def transition_width(profile):
        lo = np.argmax(profile > 0.1)
        hi = np.argmax(profile > 0.9)
        return hi - lo

    assert transition_width(bi.data[8]) < transition_width(blurred[8])


def test_bilateral_output_within_input_range(rng):
    img = rng.random((15, 15))
    sec = _normalized(img)
    out = bilateral_filter(sec, sigma_s=1.0, sigma_r=0.2, radius=2)
    assert out.data.min() >= img.min() - 1e-6
    assert out.data.max() <= img.max() + 1e-6


def test_bilateral_validation():
    sec = _normalized(np.zeros((8, 8)))
    with pytest.raises(errors.ShapeMismatch):
        bilateral_filter(sec, sigma_s=1.0, sigma_r=0.1, radius=0)


# ---------------------------------------------------------------------------
# Sweep
# ---------------------------------------------------------------------------

def _sweep_det_cfg(section, got):
    return DetectionConfig(threshold_mode="manual",
                           t_g=calibrate_threshold(got.interior()),
                           seed_mode="manual", seed=(64, 64))


def test_sweep_report_shape(disk_fixture, disk_got):
    section, truth = disk_fixture
    cfg = NoiseSweepConfig(sigmas=[0.01, 0.02], seed=3, repetitions=2)
    cells = run_noise_sweep(section, truth, cfg, methods=["got"],
                            det_cfg=_sweep_det_cfg(section, disk_got))
    assert len(cells) == 2
    for c in cells:
        assert c.n == 2 and len(c.amds) == 2 and not c.failures
        assert np.isfinite(c.mean_amd) and np.isfinite(c.std_amd)
    csv = sweep_csv(cells)
    assert csv.splitlines()[0] == "sigma,method,denoise,n,mean_amd,std_amd"
    assert len(csv.splitlines()) == 3


def test_sweep_sigma_zero_equals_clean_detection(disk_fixture, disk_got):
    from salttex.segmentation import detect

    section, truth = disk_fixture
    det = _sweep_det_cfg(section, disk_got)
    cfg = NoiseSweepConfig(sigmas=[0.0], seed=5, repetitions=3)
    cells = run_noise_sweep(section, truth, cfg, methods=["got"], det_cfg=det)
    clean = detect(section, det, attr="got")
    expected = boundary_metrics(clean.boundary, truth).d_max
    assert cells[0].mean_amd == expected
    assert cells[0].std_amd == 0.0


def test_sweep_records_failures_not_fatal(disk_fixture):
    section, truth = disk_fixture
    # a tiny manual threshold forces SeedAboveThreshold inside repetitions
    det = DetectionConfig(threshold_mode="manual", t_g=1e-9,
                          seed_mode="manual", seed=(64, 64))
    cfg = NoiseSweepConfig(sigmas=[0.01], seed=0, repetitions=2)
    cells = run_noise_sweep(section, truth, cfg, methods=["got"], det_cfg=det)
    assert cells[0].n == 0
    assert len(cells[0].failures) == 2
    assert np.isnan(cells[0].mean_amd)


def test_sweep_config_validation():
    with pytest.raises(errors.ShapeMismatch):
        NoiseSweepConfig(sigmas=[0.02, 0.01])
    with pytest.raises(errors.ShapeMismatch):
        NoiseSweepConfig(denoise="median")
    with pytest.raises(errors.ShapeMismatch):
        BilateralConfig(radius=0)
