import numpy as np
import pytest

from ganprint.attribution import corr
from ganprint.denoise import DenoiserConfig, extract_residual
from ganprint.imageops import flatten
from ganprint.synthgen import (
    SynthSourceSpec,
    generate_dataset,
    generate_image,
    make_fingerprint_pattern,
    spec_from_text,
    spec_to_text,
    true_fingerprint,
)


def test_dataset_is_deterministic():
    spec = SynthSourceSpec(label="d", width=32, height=32, seed=5)
    a = generate_dataset(spec, 4)
    b = generate_dataset(spec, 4)
    assert np.array_equal(a.true_fingerprint, b.true_fingerprint)
    for x, y in zip(a.images, b.images):
        assert np.array_equal(x, y)


def test_generate_image_is_pure_function_of_spec_and_index():
    spec = SynthSourceSpec(label="d", width=32, height=32, seed=6)
    ds = generate_dataset(spec, 5)
    assert np.array_equal(generate_image(spec, 3), ds.images[3])
    assert not np.array_equal(ds.images[2], ds.images[3])


def test_pattern_moments():
    p = make_fingerprint_pattern(96, 96, 3, amplitude=2.0, seed=7)
    assert abs(p.mean()) < 1e-12          # exactly centered
    assert p.std() == pytest.approx(2.0, rel=1e-6)


def test_pattern_zero_amplitude_is_zero():
    assert not make_fingerprint_pattern(16, 16, 1, 0.0, seed=8).any()


def test_patterns_from_different_seeds_are_uncorrelated():
    a = make_fingerprint_pattern(64, 64, 3, 2.0, seed=100)
    b = make_fingerprint_pattern(64, 64, 3, 2.0, seed=101)
    assert abs(corr(flatten(a), flatten(b))) < 0.1


def test_shared_component_correlates_siblings():
    kw = dict(width=64, height=64, shared_pattern_seed=900, shared_amplitude=1.5)
    sib1 = true_fingerprint(SynthSourceSpec(label="s1", seed=31, **kw))
    sib2 = true_fingerprint(SynthSourceSpec(label="s2", seed=32, **kw))
    lone = true_fingerprint(SynthSourceSpec(label="s3", seed=33, width=64, height=64))
    between = corr(flatten(sib1), flatten(sib2))
    outside = abs(corr(flatten(sib1), flatten(lone)))
    # shared energy fraction 1.5^2/(2^2+1.5^2) ~ 0.36 of each sibling
    assert between > 0.2
    assert between > 5.0 * max(outside, 0.01)


def test_images_respect_value_range():
    spec = SynthSourceSpec(label="r", width=32, height=32, seed=9,
                           noise_std=80.0)
    ds = generate_dataset(spec, 2)
    for im in ds.images:
        assert im.min() >= 0.0 and im.max() <= 255.0
        assert im.dtype == np.float32


@pytest.mark.parametrize("kind", ["flat", "smooth_gradient", "perlin_texture"])
def test_content_kinds_generate(kind):
    spec = SynthSourceSpec(label="c", width=48, height=32, seed=10,
                           content_kind=kind)
    ds = generate_dataset(spec, 1)
    assert ds.images[0].shape == (32, 48, 3)


def test_near_noiseless_residual_recovers_pattern():
    # with almost no per-image noise the residual is dominated by the plant
    spec = SynthSourceSpec(label="q", width=64, height=64, seed=12,
                           noise_std=0.5)
    ds = generate_dataset(spec, 1)
    res = extract_residual(ds.images[0], DenoiserConfig(), "0")
    assert corr(flatten(res.planes), flatten(ds.true_fingerprint)) > 0.8


def test_spec_text_roundtrip():
    spec = SynthSourceSpec(label="round", width=40, height=24, channels=1,
                           fingerprint_amplitude=1.25, noise_std=4.5,
                           content_kind="smooth_gradient", seed=99,
                           shared_pattern_seed=7, shared_amplitude=0.5)
    assert spec_from_text(spec_to_text(spec)) == spec


def test_spec_text_rejects_unknown_key():
    with pytest.raises(ValueError):
        spec_from_text("label=x\nwavelength=9\n")


def test_spec_validation():
    with pytest.raises(ValueError):
        SynthSourceSpec(label="x", noise_std=0.0)
    with pytest.raises(ValueError):
        SynthSourceSpec(label="x", fingerprint_amplitude=-1.0)
    with pytest.raises(ValueError):
        SynthSourceSpec(label="x", content_kind="checkers")
    with pytest.raises(ValueError):
        SynthSourceSpec(label="x", channels=4)
    with pytest.raises(ValueError):
        generate_dataset(SynthSourceSpec(label="x"), 0)
