"""Separable 2-D discrete wavelet transform with Daubechies filters.

Filters are generated by spectral factorization of the Daubechies
half-band polynomial, so no coefficient tables are embedded. The default
analysis bank is the 8-vanishing-moment (16-tap) orthonormal family.

Two boundary modes:

* ``symmetric`` — mirror extension, slightly expansive coefficient
  arrays, perfect reconstruction. Default; avoids wrap-around artifacts
  at the image border.
* ``periodic`` — circular extension, non-expansive, perfect
  reconstruction AND exact energy preservation (orthonormal transform).
  Requires even extents at every level.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import MalformedPyramidError, TooSmallError

DEFAULT_VANISHING_MOMENTS = 8


@lru_cache(maxsize=None)
def daubechies_filter(vanishing_moments: int) -> np.ndarray:
    """Minimum-phase Daubechies scaling filter of length 2p.

    Built by spectral factorization: collect the roots of the half-band
    autocorrelation polynomial inside the unit circle, attach p zeros at
    z = -1, normalize to sum sqrt(2).
    """
    p = int(vanishing_moments)
    if p < 1:
        raise ValueError("vanishing_moments must be >= 1")
    if p == 1:  # Haar; the factorization degenerates
        return np.array([1.0, 1.0]) / math.sqrt(2.0)
    # P(y) = sum_k C(p-1+k, k) y^k with y = -(z-1)^2 / (4z)
    u = np.array([-0.25, 0.5, -0.25])
    q = np.zeros(2 * (p - 1) + 1)
    for k in range(p):
        term = np.array([1.0])
        for _ in range(k):
            term = np.polymul(term, u)
        term = np.polymul(term, np.r_[1.0, np.zeros(p - 1 - k)])
        q[-len(term):] += math.comb(p - 1 + k, k) * term
    roots = np.roots(q)
    h = np.array([1.0])
    for _ in range(p):
        h = np.polymul(h, [1.0, 1.0])
    for r in sorted(roots[np.abs(roots) < 1.0], key=lambda z: (z.real, z.imag)):
        h = np.polymul(h, [1.0, -r])
    h = np.real(h)
    h *= math.sqrt(2.0) / h.sum()
    return h


@lru_cache(maxsize=None)
def _filter_bank(p: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    rec_lo = daubechies_filter(p)
    length = rec_lo.size
    rec_hi = np.array([(-1.0) ** n * rec_lo[length - 1 - n] for n in range(length)])
    return rec_lo[::-1].copy(), rec_hi[::-1].copy(), rec_lo, rec_hi


@dataclass
class WaveletPyramid:
    """Multi-level 2-D decomposition.

    ``details[k]`` holds the (LH, HL, HH) bands of level k+1;
    ``shapes[k]`` is the shape of the array that was decomposed at that
    level, needed to crop the synthesis output.
    """

    approx: np.ndarray
    details: list[tuple[np.ndarray, np.ndarray, np.ndarray]]
    shapes: list[tuple[int, int]]
    mode: str = "symmetric"
    vanishing_moments: int = DEFAULT_VANISHING_MOMENTS

    def validate(self) -> None:
        if len(self.details) != len(self.shapes) or not self.details:
            raise MalformedPyramidError("level count mismatch")
        ref = self.approx.shape
        for lh, hl, hh in [self.details[-1]]:
            if lh.shape != ref or hl.shape != ref or hh.shape != ref:
                raise MalformedPyramidError("deepest detail bands disagree with approx")
        for (lh, hl, hh) in self.details:
            if lh.shape != hl.shape or lh.shape != hh.shape:
                raise MalformedPyramidError("detail band shapes disagree")


def _analyze_1d(x: np.ndarray, axis: int, p: int, mode: str) -> tuple[np.ndarray, np.ndarray]:
    """One filtering+decimation pass along an axis; returns (low, high)."""
    dec_lo, dec_hi, _, _ = _filter_bank(p)
    length = dec_lo.size
    x = np.moveaxis(x, axis, -1)
    n = x.shape[-1]
    edge = [(0, 0)] * (x.ndim - 1)
    if mode == "symmetric":
        # valid windows over the mirror-extended signal; keeping the first
        # (n + length) // 2 of them pairs with a synthesis crop of length-1
        ext = np.pad(x, edge + [(length - 1, length - 1)], mode="symmetric")
        windows = np.lib.stride_tricks.sliding_window_view(ext, length, axis=-1)
        windows = windows[..., 0::2, :][..., : (n + length) // 2, :]
    else:
        ext = np.pad(x, edge + [(length // 2, length // 2)], mode="wrap")
        # zero pad so windows cover the full-convolution index range
        padded = np.pad(ext, edge + [(length - 1, length - 1)])
        windows = np.lib.stride_tricks.sliding_window_view(padded, length, axis=-1)
        windows = windows[..., length - 1:: 2, :][..., : n // 2, :]
    lo = windows @ dec_lo[::-1]
    hi = windows @ dec_hi[::-1]
    return np.moveaxis(lo, -1, axis), np.moveaxis(hi, -1, axis)


def _synthesize_1d(lo: np.ndarray, hi: np.ndarray, axis: int, n: int, p: int, mode: str) -> np.ndarray:
    """Inverse of :func:`_analyze_1d`; crops to the original extent n."""
    _, _, rec_lo, rec_hi = _filter_bank(p)
    length = rec_lo.size
    lo = np.moveaxis(lo, axis, -1)
    hi = np.moveaxis(hi, axis, -1)
    m = lo.shape[-1]
    if mode == "periodic":
        # pad with length//2 coefficient periods: upsampled pad of length-1
        # samples rounds to (length-1+1)//2 = length//2 coefficients
        pad = [(0, 0)] * (lo.ndim - 1) + [(length // 2, length // 2)]
        lo = np.pad(lo, pad, mode="wrap")
        hi = np.pad(hi, pad, mode="wrap")
        crop = (3 * length) // 2
        total = 2 * lo.shape[-1] + length - 1
    else:
        crop = length - 1
        total = 2 * m + length - 1
    y = _upsampled_conv(lo, rec_lo, total) + _upsampled_conv(hi, rec_hi, total)
    y = y[..., crop: crop + n]
    return np.moveaxis(y, -1, axis)


def _upsampled_conv(c: np.ndarray, f: np.ndarray, total: int) -> np.ndarray:
    """Full convolution of zero-upsampled coefficients with a filter.

    Polyphase form: even/odd output samples come from convolving the
    coefficients with the even/odd filter taps, skipping the zeros.
    """
    conv_e = _full_conv_last_axis(c, f[0::2])
    conv_o = _full_conv_last_axis(c, f[1::2])
    y = np.zeros(c.shape[:-1] + (total,), dtype=np.float64)
    even = y[..., 0::2]
    odd = y[..., 1::2]
    even[..., : conv_e.shape[-1]] = conv_e[..., : even.shape[-1]]
    odd[..., : conv_o.shape[-1]] = conv_o[..., : odd.shape[-1]]
    return y


def _full_conv_last_axis(x: np.ndarray, f: np.ndarray) -> np.ndarray:
    length = f.size
    padded = np.pad(x, [(0, 0)] * (x.ndim - 1) + [(length - 1, length - 1)])
    windows = np.lib.stride_tricks.sliding_window_view(padded, length, axis=-1)
    return windows @ f[::-1]


def dwt2(plane: np.ndarray, levels: int, mode: str = "symmetric",
         vanishing_moments: int = DEFAULT_VANISHING_MOMENTS) -> WaveletPyramid:
    """Multi-level separable 2-D decomposition of a single plane."""
    a = np.asarray(plane, dtype=np.float64)
    if a.ndim != 2:
        raise MalformedPyramidError("dwt2 expects a 2-D plane")
    if levels < 1:
        raise ValueError("levels must be >= 1")
    if mode not in ("symmetric", "periodic"):
        raise ValueError(f"unknown boundary mode {mode!r}")
    if min(a.shape) < 2 ** levels:
        raise TooSmallError(f"plane {a.shape} too small for {levels} levels")
    details = []
    shapes = []
    for _ in range(levels):
        if mode == "periodic" and (a.shape[0] % 2 or a.shape[1] % 2):
            raise TooSmallError("periodic mode needs even extents at every level")
        shapes.append(a.shape)
        lo_r, hi_r = _analyze_1d(a, 0, vanishing_moments, mode)
        ll, lh = _analyze_1d(lo_r, 1, vanishing_moments, mode)
        hl, hh = _analyze_1d(hi_r, 1, vanishing_moments, mode)
        details.append((lh, hl, hh))
        a = ll
    return WaveletPyramid(approx=a, details=details, shapes=shapes, mode=mode,
                          vanishing_moments=vanishing_moments)


def idwt2(pyr: WaveletPyramid) -> np.ndarray:
    """Synthesis inverse of :func:`dwt2`."""
    pyr.validate()
    a = np.asarray(pyr.approx, dtype=np.float64)
    p = pyr.vanishing_moments
    for (lh, hl, hh), shape in zip(reversed(pyr.details), reversed(pyr.shapes)):
        lo_r = _synthesize_1d(a, lh, 1, shape[1], p, pyr.mode)
        hi_r = _synthesize_1d(hl, hh, 1, shape[1], p, pyr.mode)
        a = _synthesize_1d(lo_r, hi_r, 0, shape[0], p, pyr.mode)
    return a
