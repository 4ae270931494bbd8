"""Fingerprint estimation and structural analysis.

A source fingerprint is the element-wise average of many noise
residuals. The residual model is R_i = F + W_i: averaging kills the
random part W at rate 1/N while the deterministic part F survives, so
the average converges to F and its energy converges to the fingerprint
energy from above.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .denoise import Residual
from .errors import (
    ConstantInputError,
    EmptyInputError,
    LagTooLargeError,
    MixedDenoisersError,
    NotEnoughResidualsError,
    ShapeMismatchError,
    TooFewPointsError,
)
from .imageops import pairwise_mean_arrays

PAPER_EXP = "paper_exp"   # e_inf + e0 * 2^(-N)
INVERSE_N = "inverse_n"   # e_inf + e0 / N


@dataclass
class Fingerprint:
    planes: np.ndarray          # (H, W, C) float
    n_residuals: int
    source_label: str
    denoiser_hash: str


@dataclass
class EnergyCurve:
    points: list[tuple[int, float]]  # (N, mean squared value)


@dataclass
class EnergyFit:
    e_inf: float
    e0: float
    model: str
    rss: float


@dataclass
class AutocorrMap:
    lags_y: np.ndarray
    lags_x: np.ndarray
    values: np.ndarray  # (2*max_lag+1, 2*max_lag+1), value at center == 1


def estimate_fingerprint(residuals: list[Residual], label: str) -> Fingerprint:
    """Plain average of residuals, reduced over a fixed pairwise tree."""
    if not residuals:
        raise EmptyInputError("no residuals")
    shape = residuals[0].planes.shape
    dhash = residuals[0].denoiser_hash
    for r in residuals:
        if r.planes.shape != shape:
            raise ShapeMismatchError(f"{r.planes.shape} != {shape}")
        if r.denoiser_hash != dhash:
            raise MixedDenoisersError("residuals come from different denoiser configs")
    mean = pairwise_mean_arrays([r.planes for r in residuals])
    return Fingerprint(planes=mean, n_residuals=len(residuals),
                       source_label=label, denoiser_hash=dhash)


def energy(fp: Fingerprint) -> float:
    """Mean squared value over all pixels and channels (power, not sum)."""
    a = np.asarray(fp.planes, dtype=np.float64)
    return float(np.mean(a * a))


def energy_progression(residuals: list[Residual], ns: list[int]) -> EnergyCurve:
    """Energy of the fingerprint estimated from the first N residuals.

    Prefix subsets keep the curve deterministic and nested.
    """
    if any(n2 <= n1 for n1, n2 in zip(ns, ns[1:])) or (ns and ns[0] < 1):
        raise ValueError("ns must be strictly increasing and >= 1")
    if not ns or max(ns) > len(residuals):
        raise NotEnoughResidualsError(
            f"need {max(ns) if ns else 1} residuals, have {len(residuals)}")
    points = []
    for n in ns:
        fp = estimate_fingerprint(residuals[:n], label=f"prefix_{n}")
        points.append((n, energy(fp)))
    return EnergyCurve(points=points)


def fit_energy_curve(curve: EnergyCurve, model: str = INVERSE_N) -> EnergyFit:
    """Least-squares fit of E(N) = e_inf + e0 * w(N), e_inf constrained >= 0.

    w(N) is 2^-N (paper_exp) or 1/N (inverse_n). The problem is linear in
    (e_inf, e0): solve the normal equations; if the unconstrained optimum
    has e_inf < 0 the constraint is active, so clamp e_inf to 0 and
    refit e0 alone.
    """
    if model not in (PAPER_EXP, INVERSE_N):
        raise ValueError(f"unknown model {model!r}")
    if len(curve.points) < 3:
        raise TooFewPointsError("need at least 3 points")
    n = np.array([p[0] for p in curve.points], dtype=np.float64)
    e = np.array([p[1] for p in curve.points], dtype=np.float64)
    w = np.exp2(-n) if model == PAPER_EXP else 1.0 / n
    design = np.column_stack([np.ones_like(w), w])
    coef, *_ = np.linalg.lstsq(design, e, rcond=None)
    e_inf, e0 = float(coef[0]), float(coef[1])
    if e_inf < 0.0:
        e_inf = 0.0
        e0 = float(np.dot(w, e) / np.dot(w, w))
    resid = e - (e_inf + e0 * w)
    return EnergyFit(e_inf=e_inf, e0=e0, model=model, rss=float(np.dot(resid, resid)))


def autocorrelation(fp: Fingerprint, max_lag: int, method: str = "auto") -> AutocorrMap:
    """Mean-removed, biased-normalized 2-D autocorrelation, channel-averaged.

    value(dy, dx) = sum over the overlap of (f - mu)(f shifted - mu),
    divided by the total centered energy, so value(0, 0) == 1. Spatial
    evaluation is exact by construction; the FFT path computes the same
    overlap sums via zero-padded linear correlation and matches it to
    float precision.
    """
    a = np.asarray(fp.planes, dtype=np.float64)
    h, w, c = a.shape
    if max_lag >= min(h, w) / 2:
        raise LagTooLargeError(f"max_lag {max_lag} too large for {h}x{w}")
    if method == "auto":
        method = "spatial" if max_lag <= 64 else "fft"
    acc = np.zeros((2 * max_lag + 1, 2 * max_lag + 1))
    for ch in range(c):
        plane = a[:, :, ch]
        centered = plane - plane.mean()
        denom = float(np.sum(centered * centered))
        if denom == 0.0:
            raise ConstantInputError("constant plane has undefined autocorrelation")
        if method == "spatial":
            vals = _autocorr_spatial(centered, max_lag)
        else:
            vals = _autocorr_fft(centered, max_lag)
        acc += vals / denom
    lags = np.arange(-max_lag, max_lag + 1)
    return AutocorrMap(lags_y=lags, lags_x=lags.copy(), values=acc / c)


def _autocorr_spatial(f: np.ndarray, max_lag: int) -> np.ndarray:
    h, w = f.shape
    out = np.empty((2 * max_lag + 1, 2 * max_lag + 1))
    for dy in range(0, max_lag + 1):
        for dx in range(-max_lag, max_lag + 1):
            ys = slice(0, h - dy)
            ys2 = slice(dy, h)
            if dx >= 0:
                xs, xs2 = slice(0, w - dx), slice(dx, w)
            else:
                xs, xs2 = slice(-dx, w), slice(0, w + dx)
            v = float(np.sum(f[ys, xs] * f[ys2, xs2]))
            out[max_lag + dy, max_lag + dx] = v
            out[max_lag - dy, max_lag - dx] = v
    return out


def _autocorr_fft(f: np.ndarray, max_lag: int) -> np.ndarray:
    h, w = f.shape
    sh = h + max_lag
    sw = w + max_lag
    spec = np.fft.rfft2(f, s=(2 * sh, 2 * sw))
    full = np.fft.irfft2(spec * np.conj(spec), s=(2 * sh, 2 * sw))
    out = np.empty((2 * max_lag + 1, 2 * max_lag + 1))
    for i, dy in enumerate(range(-max_lag, max_lag + 1)):
        for j, dx in enumerate(range(-max_lag, max_lag + 1)):
            out[i, j] = full[dy % (2 * sh), dx % (2 * sw)]
    return out
