import numpy as np
import pytest

from ganprint.denoise import (
    GAUSSIAN_SMOOTH,
    DenoiserConfig,
    denoise,
    extract_residual,
    mmse_shrink,
)
from ganprint.errors import GanprintError
from ganprint.fingerprint import estimate_fingerprint
from ganprint.imageops import flatten
from ganprint.synthgen import SynthSourceSpec, generate_dataset
from ganprint.attribution import corr


def test_config_hash_is_stable_and_distinct():
    a = DenoiserConfig()
    b = DenoiserConfig()
    c = DenoiserConfig(noise_variance=4.0)
    assert a.config_hash() == b.config_hash()
    assert a.config_hash() != c.config_hash()
    assert len(a.config_hash()) == 64


def test_config_text_roundtrip():
    cfg = DenoiserConfig(kind=GAUSSIAN_SMOOTH, gaussian_sigma=2.5,
                         shrink_window_sizes=(3, 5))
    assert DenoiserConfig.from_text(cfg.canonical_text()) == cfg


def test_config_validation():
    with pytest.raises(GanprintError):
        DenoiserConfig(noise_variance=0.0)
    with pytest.raises(GanprintError):
        DenoiserConfig(shrink_window_sizes=(4,))
    with pytest.raises(GanprintError):
        DenoiserConfig(kind="median")


def test_mmse_shrink_zero_band():
    out = mmse_shrink(np.zeros((16, 16)), 9.0)
    assert np.max(np.abs(out)) == 0.0


def test_mmse_shrink_near_zero_noise_is_identity():
    rng = np.random.default_rng(0)
    band = rng.normal(0, 3, size=(32, 32))
    out = mmse_shrink(band, 1e-12)
    assert np.max(np.abs(out - band)) < 1e-6


def test_mmse_shrink_attenuates_pure_noise():
    rng = np.random.default_rng(1)
    band = rng.normal(0, 3.0, size=(128, 128))  # variance == noise_variance
    out = mmse_shrink(band, 9.0)
    assert np.sum(out ** 2) < 0.5 * np.sum(band ** 2)


def test_mmse_shrink_monotone_in_noise_variance():
    rng = np.random.default_rng(2)
    band = rng.normal(0, 3, size=(64, 64))
    prev = np.abs(mmse_shrink(band, 1.0))
    for v in (2.0, 4.0, 9.0, 25.0):
        cur = np.abs(mmse_shrink(band, v))
        assert np.all(cur <= prev + 1e-15)
        prev = cur


@pytest.mark.parametrize("kind", ["wavelet_mmse", "gaussian_smooth"])
def test_constant_image_is_fixed_point(kind):
    cfg = DenoiserConfig(kind=kind)
    img = np.full((32, 32, 3), 100.0, dtype=np.float32)
    assert np.max(np.abs(denoise(img, cfg) - 100.0)) < 1e-5
    res = extract_residual(img, cfg)
    assert np.max(np.abs(res.planes)) < 1e-5


def test_denoise_improves_noisy_ramp():
    rng = np.random.default_rng(3)
    yy, xx = np.mgrid[0:64, 0:64]
    ramp = (64.0 + xx + yy)[:, :, None].astype(np.float64)
    noisy = (ramp + rng.normal(0, 3.0, size=ramp.shape)).astype(np.float32)
    for kind in ("wavelet_mmse", "gaussian_smooth"):
        out = denoise(noisy, DenoiserConfig(kind=kind))
        assert np.mean((out - ramp) ** 2) < np.mean((noisy - ramp) ** 2)


def test_gaussian_tiny_sigma_is_near_identity():
    rng = np.random.default_rng(4)
    img = rng.normal(128, 10, size=(32, 32, 1)).astype(np.float32)
    out = denoise(img, DenoiserConfig(kind=GAUSSIAN_SMOOTH, gaussian_sigma=0.05))
    assert np.max(np.abs(out - img)) < 1e-3


@pytest.mark.parametrize("kind", ["wavelet_mmse", "gaussian_smooth"])
def test_residual_plus_denoised_reconstructs(kind):
    rng = np.random.default_rng(5)
    img = rng.normal(128, 15, size=(48, 48, 3)).astype(np.float32)
    cfg = DenoiserConfig(kind=kind)
    res = extract_residual(img, cfg)
    assert np.max(np.abs(res.planes + denoise(img, cfg) - img)) < 1e-6


def test_residual_keeps_most_of_pure_noise():
    rng = np.random.default_rng(6)
    img = (128 + rng.normal(0, 3.0, size=(256, 256, 1))).astype(np.float32)
    res = extract_residual(img, DenoiserConfig())
    assert res.planes.var() >= 0.5 * 9.0


def test_residual_determinism():
    rng = np.random.default_rng(7)
    img = rng.normal(128, 10, size=(64, 64, 3)).astype(np.float32)
    cfg = DenoiserConfig()
    a = extract_residual(img, cfg)
    b = extract_residual(img, cfg)
    assert np.array_equal(a.planes, b.planes)


def test_planted_pattern_shows_up_in_residual():
    # residual of planted-fingerprint images must correlate with the plant
    # far above a shuffled baseline
    spec = SynthSourceSpec(label="s", width=64, height=64, seed=11)
    ds = generate_dataset(spec, 24)
    cfg = DenoiserConfig()
    residuals = [extract_residual(im, cfg, str(i)) for i, im in enumerate(ds.images)]
    fp = estimate_fingerprint(residuals, "s")
    truth = flatten(ds.true_fingerprint)
    observed = corr(flatten(fp.planes), truth)
    rng = np.random.default_rng(8)
    null = []
    for _ in range(200):
        null.append(corr(flatten(fp.planes), rng.permutation(truth)))
    # permutation p-value < 0.01: all 200 shuffles must score below
    assert observed > 0.5
    assert observed > max(null)
