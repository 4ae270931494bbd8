"""Synthetic corpora with planted fingerprints.

Every generated image is clip(content + F + W_i): a known deterministic
pattern F, fresh Gaussian noise W_i per image, and a content layer that
carries no per-image noise. Ground truth F is retained so the whole
extraction/attribution pipeline can be scored against it.

All randomness comes from the Philox counter-based generator keyed by
(seed, stream), so datasets are reproducible across runs and platforms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.ndimage import gaussian_filter, zoom

from .imageops import DEFAULT_VALUE_RANGE

FLAT = "flat"
SMOOTH_GRADIENT = "smooth_gradient"
PERLIN_TEXTURE = "perlin_texture"

_CONTENT_KINDS = (FLAT, SMOOTH_GRADIENT, PERLIN_TEXTURE)

# fixed stream tags so the per-purpose generators never collide
_STREAM_PATTERN = 0x46505054  # "FPPT"
_STREAM_CONTENT = 0x434F4E54  # "CONT"
_STREAM_NOISE = 0x4E4F4953    # "NOIS"


@dataclass(frozen=True)
class SynthSourceSpec:
    label: str
    width: int = 256
    height: int = 256
    channels: int = 3
    fingerprint_amplitude: float = 2.0
    noise_std: float = 6.0
    content_kind: str = FLAT
    shared_pattern_seed: Optional[int] = None
    shared_amplitude: float = 0.0
    seed: int = 0
    value_range: tuple[float, float] = DEFAULT_VALUE_RANGE

    def __post_init__(self):
        if self.fingerprint_amplitude < 0 or self.shared_amplitude < 0:
            raise ValueError("amplitudes must be >= 0")
        if self.noise_std <= 0:
            raise ValueError("noise_std must be positive")
        if self.content_kind not in _CONTENT_KINDS:
            raise ValueError(f"unknown content kind {self.content_kind!r}")
        if self.channels not in (1, 3):
            raise ValueError("channels must be 1 or 3")


@dataclass
class SynthDataset:
    spec: SynthSourceSpec
    true_fingerprint: np.ndarray  # (H, W, C) float64
    images: list[np.ndarray]      # (H, W, C) float32, clipped to value_range


def _rng(seed: int, stream: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(key=[seed & (2**64 - 1),
                                                     stream & (2**64 - 1)]))


def make_fingerprint_pattern(width: int, height: int, channels: int,
                             amplitude: float, seed: int) -> np.ndarray:
    """Deterministic planted fingerprint: white noise plus a quasi-periodic field.

    The quasi-periodic part mimics the repeating structure seen in
    upsampling-based generators: a seeded noise patch tiled at a period
    drawn from the seed in [8, 32) pixels, plus a faint sinusoid grid at
    the same period. Tiled noise is noise-like locally, so it passes
    through variance-based denoisers the same way the white part does,
    while still producing strong autocorrelation peaks at the period.
    The pattern is exactly zero-mean and scaled so its overall standard
    deviation matches the requested amplitude.
    """
    if amplitude == 0.0:
        return np.zeros((height, width, channels))
    rng = _rng(seed, _STREAM_PATTERN)
    noise = rng.normal(0.0, 1.0, size=(height, width, channels))
    period = int(rng.integers(8, 32))
    patch = rng.normal(0.0, 1.0, size=(period, period, channels))
    reps = (height // period + 1, width // period + 1, 1)
    tiled = np.tile(patch, reps)[:height, :width, :]
    yy, xx = np.mgrid[0:height, 0:width]
    grid = (np.sin(2.0 * np.pi * (xx + float(rng.uniform(0, period))) / period) +
            np.sin(2.0 * np.pi * (yy + float(rng.uniform(0, period))) / period))
    # energy shares: ~55% white, ~40% tiled, ~5% sinusoid
    pattern = (np.sqrt(0.55) * noise + np.sqrt(0.40) * tiled +
               np.sqrt(0.05 / 2.0) * grid[:, :, None])
    pattern -= pattern.mean()
    pattern *= amplitude / pattern.std()
    return pattern


def _make_content(spec: SynthSourceSpec) -> np.ndarray:
    lo, hi = spec.value_range
    mid = (lo + hi) / 2.0
    span = hi - lo
    shape = (spec.height, spec.width, spec.channels)
    if spec.content_kind == FLAT:
        return np.full(shape, mid)
    if spec.content_kind == SMOOTH_GRADIENT:
        yy, xx = np.mgrid[0:spec.height, 0:spec.width]
        ramp = (xx / max(spec.width - 1, 1) + yy / max(spec.height - 1, 1)) / 2.0
        plane = lo + span * (0.25 + 0.5 * ramp)
        return np.repeat(plane[:, :, None], spec.channels, axis=2)
    # perlin-like texture: upsampled low-resolution noise, lightly smoothed
    rng = _rng(spec.seed, _STREAM_CONTENT)
    coarse = rng.normal(0.0, 1.0, size=(max(spec.height // 16, 2),
                                        max(spec.width // 16, 2), spec.channels))
    tex = zoom(coarse, (spec.height / coarse.shape[0],
                        spec.width / coarse.shape[1], 1), order=3)
    tex = gaussian_filter(tex, sigma=(2.0, 2.0, 0.0))
    tex = (tex - tex.mean()) / max(tex.std(), 1e-12)
    return mid + 0.15 * span * tex


def true_fingerprint(spec: SynthSourceSpec) -> np.ndarray:
    """Planted pattern of a source, private plus optional sibling-shared part."""
    fp = make_fingerprint_pattern(spec.width, spec.height, spec.channels,
                                  spec.fingerprint_amplitude, spec.seed)
    if spec.shared_pattern_seed is not None and spec.shared_amplitude > 0.0:
        fp = fp + make_fingerprint_pattern(spec.width, spec.height, spec.channels,
                                           spec.shared_amplitude,
                                           spec.shared_pattern_seed)
    return fp


def generate_image(spec: SynthSourceSpec, index: int,
                   content: Optional[np.ndarray] = None,
                   fingerprint: Optional[np.ndarray] = None) -> np.ndarray:
    """Image number `index` of the dataset; a pure function of (spec, index)."""
    if content is None:
        content = _make_content(spec)
    if fingerprint is None:
        fingerprint = true_fingerprint(spec)
    rng = _rng(spec.seed ^ _STREAM_NOISE, index)
    w = rng.normal(0.0, spec.noise_std,
                   size=(spec.height, spec.width, spec.channels))
    lo, hi = spec.value_range
    return np.clip(content + fingerprint + w, lo, hi).astype(np.float32)


def generate_dataset(spec: SynthSourceSpec, count: int) -> SynthDataset:
    if count < 1:
        raise ValueError("count must be >= 1")
    content = _make_content(spec)
    fp = true_fingerprint(spec)
    images = [generate_image(spec, i, content, fp) for i in range(count)]
    return SynthDataset(spec=spec, true_fingerprint=fp, images=images)


def spec_to_text(spec: SynthSourceSpec) -> str:
    """key=value rendering, same grammar as the denoiser config files."""
    lines = [
        f"label={spec.label}",
        f"width={spec.width}",
        f"height={spec.height}",
        f"channels={spec.channels}",
        f"fingerprint_amplitude={spec.fingerprint_amplitude!r}",
        f"noise_std={spec.noise_std!r}",
        f"content_kind={spec.content_kind}",
        f"seed={spec.seed}",
    ]
    if spec.shared_pattern_seed is not None:
        lines.append(f"shared_pattern_seed={spec.shared_pattern_seed}")
        lines.append(f"shared_amplitude={spec.shared_amplitude!r}")
    return "\n".join(lines) + "\n"


def spec_from_text(text: str) -> SynthSourceSpec:
    kwargs = {}
    converters = {
        "label": str, "content_kind": str,
        "width": int, "height": int, "channels": int, "seed": int,
        "shared_pattern_seed": int,
        "fingerprint_amplitude": float, "noise_std": float,
        "shared_amplitude": float,
    }
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"bad spec line: {raw!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in converters:
            raise ValueError(f"unknown spec key {key!r}")
        kwargs[key] = converters[key](value)
    return SynthSourceSpec(**kwargs)
