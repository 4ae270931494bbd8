"""Experiment orchestration: ingestion, identification protocol, reports.

The identification protocol per source: estimate a fingerprint from the
first n_estimation residuals, score every held-out test residual of
every source against every fingerprint, attribute by maximum
correlation, and report the average-correlation matrix, one-vs-all ROC
curves, the confusion matrix, and overall accuracy.
"""

from __future__ import annotations

import io
import json
import multiprocessing
import os
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from . import __version__
from .attribution import (
    ConfusionMatrix,
    CorrMatrix,
    RocCurve,
    ScoreSet,
    confusion,
    confusion_to_csv,
    confusion_to_json,
    corr_matrix_to_csv,
    corr_matrix_to_json,
    roc,
    roc_to_csv,
    score_against,
)
from .container import write_fingerprint
from .denoise import DenoiserConfig, Residual, extract_residual
from .errors import (
    GanprintError,
    MissingFileError,
    ShapeMismatchError,
    UnsupportedCodecError,
)
from .fingerprint import Fingerprint, estimate_fingerprint
from .manifest import DatasetManifest

SUMMARY_SCHEMA_VERSION = 1


@dataclass
class ExperimentReport:
    labels: list[str]
    fingerprint_paths: dict[str, Path]
    corr_matrix: CorrMatrix
    roc_curves: dict[str, RocCurve]
    confusion_matrix: ConfusionMatrix
    accuracy: float
    n_ties: int
    summary_path: Path


def load_image(path) -> np.ndarray:
    """8-bit grayscale or RGB raster file to a (H, W, C) float32 array."""
    path = Path(path)
    if not path.is_file():
        raise MissingFileError(f"image not found: {path}")
    try:
        with PILImage.open(path) as im:
            if im.mode not in ("L", "RGB"):
                raise GanprintError(f"{path}: unsupported mode {im.mode!r}")
            arr = np.asarray(im, dtype=np.float32)
    except GanprintError:
        raise
    except Exception as exc:
        raise GanprintError(f"unreadable image {path}: {exc}") from exc
    if arr.ndim == 2:
        arr = arr[:, :, None]
    return arr


def save_image(path, arr: np.ndarray) -> None:
    """Clip, round, and write a float image as an 8-bit PNG/JPEG."""
    a = np.clip(np.rint(arr), 0, 255).astype(np.uint8)
    if a.shape[2] == 1:
        PILImage.fromarray(a[:, :, 0], mode="L").save(path)
    else:
        PILImage.fromarray(a, mode="RGB").save(path)


def jpeg_reencode(arr: np.ndarray, quality: int) -> np.ndarray:
    """Round-trip an image through in-memory JPEG at the given quality."""
    if not 1 <= quality <= 100:
        raise UnsupportedCodecError(f"JPEG quality {quality} out of range 1..100")
    a = np.clip(np.rint(arr), 0, 255).astype(np.uint8)
    mode = "L" if a.shape[2] == 1 else "RGB"
    src = a[:, :, 0] if mode == "L" else a
    buf = io.BytesIO()
    PILImage.fromarray(src, mode=mode).save(buf, format="JPEG", quality=quality)
    buf.seek(0)
    with PILImage.open(buf) as im:
        out = np.asarray(im, dtype=np.float32)
    if out.ndim == 2:
        out = out[:, :, None]
    return out


def write_heatmap(path, plane: np.ndarray) -> None:
    """Min-max scaled 8-bit grayscale render; scale recorded in a sidecar."""
    lo = float(plane.min())
    hi = float(plane.max())
    span = hi - lo if hi > lo else 1.0
    scaled = np.rint((plane - lo) / span * 255.0).astype(np.uint8)
    PILImage.fromarray(scaled, mode="L").save(path)
    sidecar = Path(str(path) + ".scale.json")
    sidecar.write_text(json.dumps({"min": lo, "max": hi}) + "\n")


def _residual_for_path(args) -> Residual:
    path, cfg, source_id = args
    return extract_residual(load_image(path), cfg, source_id=source_id)


def extract_residuals(paths, cfg: DenoiserConfig, source_label: str,
                      threads: int = 1) -> list[Residual]:
    """Residuals for a list of image paths, optionally across workers.

    Output order follows the path list, so downstream pairwise
    reductions are identical for any worker count.
    """
    jobs = [(Path(p), cfg, f"{source_label}/{Path(p).name}") for p in paths]
    shapes = set()
    if threads > 1 and len(jobs) > 1:
        with multiprocessing.Pool(processes=threads) as pool:
            residuals = pool.map(_residual_for_path, jobs, chunksize=8)
    else:
        residuals = [_residual_for_path(j) for j in jobs]
    for r, (p, _, _) in zip(residuals, jobs):
        shapes.add(r.planes.shape)
        if len(shapes) > 1:
            raise ShapeMismatchError(
                f"source {source_label!r}: image {p} has shape "
                f"{r.planes.shape}, expected {next(iter(shapes))}")
    return residuals


class _OutputTracker:
    """Removes everything it created if the run fails midway."""

    def __init__(self, out_dir):
        self.out_dir = Path(out_dir)
        self.created: list[Path] = []
        self.out_dir.mkdir(parents=True, exist_ok=True)

    def path(self, name: str) -> Path:
        p = self.out_dir / name
        self.created.append(p)
        return p

    def discard_all(self) -> None:
        for p in self.created:
            p.unlink(missing_ok=True)
            sidecar = Path(str(p) + ".scale.json")
            sidecar.unlink(missing_ok=True)


def run_identification(manifest: DatasetManifest, cfg: DenoiserConfig,
                       out_dir, threads: int = 1,
                       _test_residuals_override=None) -> ExperimentReport:
    """Full protocol over a manifest; writes the documented report set.

    _test_residuals_override substitutes pre-extracted test residuals per
    label (used by the robustness rerun to score re-encoded images
    against the original fingerprints).
    """
    out = _OutputTracker(out_dir)
    try:
        return _run_identification(manifest, cfg, out, threads,
                                   _test_residuals_override)
    except Exception:
        out.discard_all()
        raise


def _run_identification(manifest, cfg, out, threads, test_override):
    labels = manifest.labels()
    fps: dict[str, Fingerprint] = {}
    fp_paths: dict[str, Path] = {}
    for src in manifest.sources:
        est = extract_residuals(src.estimation_paths(manifest.n_estimation),
                                cfg, src.label, threads)
        fp = estimate_fingerprint(est, src.label)
        del est
        fps[src.label] = fp
        p = out.path(f"fingerprint_{src.label}.gfpr")
        write_fingerprint(p, fp)
        fp_paths[src.label] = p
        mean_plane = fp.planes.mean(axis=2)
        write_heatmap(out.path(f"fingerprint_{src.label}.png"), mean_plane)
        for ch in range(fp.planes.shape[2]):
            write_heatmap(out.path(f"fingerprint_{src.label}_ch{ch}.png"),
                          fp.planes[:, :, ch])

    fp_list = [fps[label] for label in labels]
    # score test residuals one at a time; full sets would not fit in memory
    score_rows: dict[str, list[list[float]]] = {label: [] for label in labels}
    truths: list[str] = []
    predictions: list[str] = []
    n_ties = 0
    for src in manifest.sources:
        if test_override is not None:
            test_residuals = test_override[src.label]
        else:
            test_residuals = extract_residuals(
                src.test_paths(manifest.n_estimation), cfg, src.label, threads)
        for res in test_residuals:
            row = [score_against([res], fp)[0].value for fp in fp_list]
            score_rows[src.label].append(row)
            best = int(np.argmax(row))
            if row.count(row[best]) > 1:
                n_ties += 1
            truths.append(src.label)
            predictions.append(labels[best])
        del test_residuals

    matrix = CorrMatrix(
        row_labels=list(labels), col_labels=list(labels),
        values=np.array([[float(np.mean([r[j] for r in score_rows[a]]))
                          for j in range(len(labels))] for a in labels]))
    roc_curves = {}
    for j, label in enumerate(labels):
        positives = [r[j] for r in score_rows[label]]
        negatives = [r[j] for other in labels if other != label
                     for r in score_rows[other]]
        if negatives:
            roc_curves[label] = roc(ScoreSet(positives, negatives))
    conf = confusion(truths, predictions, labels)
    accuracy = conf.accuracy()

    corr_matrix_to_csv(matrix, out.path("corr_matrix.csv"))
    corr_matrix_to_json(matrix, out.path("corr_matrix.json"))
    confusion_to_csv(conf, out.path("confusion.csv"))
    confusion_to_json(conf, out.path("confusion.json"))
    for label, curve in roc_curves.items():
        roc_to_csv(curve, out.path(f"roc_{label}.csv"))
    write_heatmap(out.path("corr_matrix.png"), matrix.values)

    summary = {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "package_version": __version__,
        "labels": labels,
        "n_estimation": manifest.n_estimation,
        "n_test": {s.label: len(s.test_paths(manifest.n_estimation))
                   for s in manifest.sources},
        "accuracy": accuracy,
        "auc": {label: curve.auc for label, curve in roc_curves.items()},
        "n_ties": n_ties,
        "degenerate_single_source": len(labels) == 1,
        "denoiser_hash": cfg.config_hash(),
        "denoiser_config": cfg.canonical_text(),
    }
    summary_path = out.path("summary.json")
    summary_path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return ExperimentReport(labels=labels, fingerprint_paths=fp_paths,
                            corr_matrix=matrix, roc_curves=roc_curves,
                            confusion_matrix=conf, accuracy=accuracy,
                            n_ties=n_ties, summary_path=summary_path)


def run_robustness(manifest: DatasetManifest, cfg: DenoiserConfig,
                   recompress_quality: int, out_dir,
                   threads: int = 1) -> dict:
    """Identification on originals vs JPEG re-encoded test images.

    Fingerprints always come from the original estimation images; only
    the test images pass through the codec.
    """
    if not 1 <= recompress_quality <= 100:
        raise UnsupportedCodecError(
            f"JPEG quality {recompress_quality} out of range 1..100")
    out_dir = Path(out_dir)
    baseline = run_identification(manifest, cfg, out_dir / "original", threads)

    recompressed: dict[str, list[Residual]] = {}
    for src in manifest.sources:
        residuals = []
        for p in src.test_paths(manifest.n_estimation):
            arr = jpeg_reencode(load_image(p), recompress_quality)
            residuals.append(extract_residual(
                arr, cfg, source_id=f"{src.label}/{Path(p).name}"))
        recompressed[src.label] = residuals
    rerun = run_identification(
        manifest, cfg, out_dir / f"recompressed_q{recompress_quality}",
        threads, _test_residuals_override=recompressed)

    delta = baseline.accuracy - rerun.accuracy
    summary = {
        "schema_version": SUMMARY_SCHEMA_VERSION,
        "recompress_quality": recompress_quality,
        "accuracy_original": baseline.accuracy,
        "accuracy_recompressed": rerun.accuracy,
        "accuracy_delta": delta,
    }
    (out_dir / "robustness.json").write_text(
        json.dumps(summary, indent=2, sort_keys=True) + "\n")
    return {"original": baseline, "recompressed": rerun, "delta": delta}


def default_threads() -> int:
    return os.cpu_count() or 1
