"""Array primitives shared by the whole pipeline.

Images are numpy arrays of shape (height, width, channels) with channels
in {1, 3}, real-valued from ingestion onward (float32 or wider). The
nominal intensity range is [0, 255] unless stated otherwise.
"""

from __future__ import annotations

import numpy as np

from .errors import ConstantInputError, LengthMismatchError, ShapeMismatchError

DEFAULT_VALUE_RANGE = (0.0, 255.0)


def validate_image(arr: np.ndarray) -> np.ndarray:
    """Check the (H, W, C) convention and return the array unchanged."""
    a = np.asarray(arr)
    if a.ndim != 3:
        raise ShapeMismatchError(f"expected (H, W, C) array, got ndim={a.ndim}")
    h, w, c = a.shape
    if h < 1 or w < 1:
        raise ShapeMismatchError(f"degenerate image shape {a.shape}")
    if c not in (1, 3):
        raise ShapeMismatchError(f"channel count must be 1 or 3, got {c}")
    if not np.issubdtype(a.dtype, np.floating):
        raise ShapeMismatchError(f"image must be float-valued, got {a.dtype}")
    return a


def flatten(image: np.ndarray) -> np.ndarray:
    """Vectorize an image channel-major, row-major within each channel.

    Keeps per-channel sub-vectors contiguous so channel diagnostics can
    slice the flat vector directly.
    """
    a = validate_image(image)
    return np.ascontiguousarray(a.transpose(2, 0, 1), dtype=np.float64).ravel()


def unflatten(v: np.ndarray, height: int, width: int, channels: int) -> np.ndarray:
    """Inverse of :func:`flatten` for known dimensions."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size != height * width * channels:
        raise LengthMismatchError(
            f"vector length {v.size} != {channels}x{height}x{width}"
        )
    return v.reshape(channels, height, width).transpose(1, 2, 0)


def zero_mean_unit_norm(v: np.ndarray) -> np.ndarray:
    """Center a vector and scale it to unit L2 norm.

    Raises ConstantInputError when every element is equal, since the
    centered vector then has zero norm.
    """
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size < 2:
        raise ConstantInputError("need at least 2 elements")
    centered = v - pairwise_sum(v) / v.size
    norm = np.sqrt(pairwise_sum(centered * centered))
    if norm == 0.0:
        raise ConstantInputError("constant input has no direction")
    return centered / norm


def inner_product(a: np.ndarray, b: np.ndarray) -> float:
    """Plain dot product, accumulated in float64 with pairwise summation."""
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.size != b.size:
        raise LengthMismatchError(f"lengths differ: {a.size} vs {b.size}")
    return float(pairwise_sum(a.astype(np.float64) * b.astype(np.float64)))


def pairwise_sum(values: np.ndarray) -> float:
    """Deterministic pairwise (tree) summation in float64.

    np.sum already reduces pairwise over contiguous float64 input; route
    through it after forcing dtype and layout so the reduction tree is
    fixed regardless of caller.
    """
    v = np.ascontiguousarray(values, dtype=np.float64).ravel()
    return float(np.sum(v))


def pairwise_mean_arrays(arrays: list[np.ndarray]) -> np.ndarray:
    """Element-wise mean of equally shaped arrays via a fixed pairwise tree.

    The reduction order depends only on the list order, never on worker
    count or chunking, so results are bit-reproducible.
    """
    if not arrays:
        raise ValueError("empty list")
    return _pairwise_sum_arrays(arrays) / len(arrays)


def _pairwise_sum_arrays(arrays) -> np.ndarray:
    # float64 conversion happens at the leaves, so at most O(log n)
    # full-size temporaries are alive at any point
    if len(arrays) == 1:
        return np.asarray(arrays[0], dtype=np.float64)
    mid = len(arrays) // 2
    return _pairwise_sum_arrays(arrays[:mid]) + _pairwise_sum_arrays(arrays[mid:])
