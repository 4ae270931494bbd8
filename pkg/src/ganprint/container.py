"""Binary containers for fingerprints and residuals.

Layout (little-endian):

    magic        4 bytes  "GFPR" (fingerprint) or "GRES" (residual)
    version      u16      currently 1
    width        u32
    height       u32
    channels     u8
    n_residuals  u32      GFPR: averaging count; GRES: source image index
    denoiser     32 bytes SHA-256 of the denoiser config canonical text
    label_len    u16
    label        UTF-8
    payload      width*height*channels float32, channel-major, row-major

Readers reject unknown magic or version before touching the payload.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .denoise import Residual
from .errors import ContainerFormatError
from .fingerprint import Fingerprint

FINGERPRINT_MAGIC = b"GFPR"
RESIDUAL_MAGIC = b"GRES"
FORMAT_VERSION = 1

_HEADER = struct.Struct("<4sHIIBI32sH")


def _write(path, magic: bytes, planes: np.ndarray, count: int,
           denoiser_hash: str, label: str) -> None:
    h, w, c = planes.shape
    payload = np.ascontiguousarray(
        planes.transpose(2, 0, 1), dtype="<f4").tobytes()
    label_bytes = label.encode("utf-8")
    digest = bytes.fromhex(denoiser_hash)
    if len(digest) != 32:
        raise ContainerFormatError("denoiser hash must be 32 bytes of hex")
    header = _HEADER.pack(magic, FORMAT_VERSION, w, h, c, count,
                          digest, len(label_bytes))
    Path(path).write_bytes(header + label_bytes + payload)


def _read(path, magic: bytes):
    blob = Path(path).read_bytes()
    if len(blob) < _HEADER.size:
        raise ContainerFormatError(f"{path}: truncated header")
    got_magic, version, w, h, c, count, digest, label_len = _HEADER.unpack_from(blob)
    if got_magic != magic:
        raise ContainerFormatError(
            f"{path}: bad magic {got_magic!r}, expected {magic!r}")
    if version != FORMAT_VERSION:
        raise ContainerFormatError(f"{path}: unsupported version {version}")
    offset = _HEADER.size
    label = blob[offset:offset + label_len].decode("utf-8")
    offset += label_len
    expected = w * h * c * 4
    payload = blob[offset:]
    if len(payload) != expected:
        raise ContainerFormatError(
            f"{path}: payload is {len(payload)} bytes, expected {expected}")
    planes = np.frombuffer(payload, dtype="<f4").reshape(c, h, w).transpose(1, 2, 0)
    return planes.copy(), count, digest.hex(), label


def write_fingerprint(path, fp: Fingerprint) -> None:
    _write(path, FINGERPRINT_MAGIC, np.asarray(fp.planes), fp.n_residuals,
           fp.denoiser_hash, fp.source_label)


def read_fingerprint(path) -> Fingerprint:
    planes, count, dhash, label = _read(path, FINGERPRINT_MAGIC)
    return Fingerprint(planes=planes, n_residuals=count,
                       source_label=label, denoiser_hash=dhash)


def write_residual(path, res: Residual, image_index: int = 0) -> None:
    _write(path, RESIDUAL_MAGIC, np.asarray(res.planes), image_index,
           res.denoiser_hash, res.source_id)


def read_residual(path) -> tuple[Residual, int]:
    planes, index, dhash, source_id = _read(path, RESIDUAL_MAGIC)
    return Residual(planes=planes, source_id=source_id, denoiser_hash=dhash), index
