"""Correlation scoring, source attribution, and evaluation metrics.

Scoring is the normalized correlation of flattened arrays: the inner
product of their zero-mean unit-norm versions. Attribution picks the
fingerprint with the highest correlation, which for normalized vectors
is the same as the minimum Euclidean distance since
||x - y||^2 = 2 - 2 corr(x, y).
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .denoise import Residual
from .errors import (
    EmptyClassError,
    EmptyFingerprintListError,
    EmptySetError,
    LengthMismatchError,
    ShapeMismatchError,
    UnknownLabelError,
)
from .fingerprint import Fingerprint
from .imageops import flatten, inner_product, zero_mean_unit_norm


@dataclass
class CorrScore:
    value: float
    residual_id: str
    fingerprint_label: str


@dataclass
class ScoreSet:
    positives: list[float]
    negatives: list[float]


@dataclass
class CorrMatrix:
    row_labels: list[str]
    col_labels: list[str]
    values: np.ndarray


@dataclass
class ConfusionMatrix:
    labels: list[str]
    counts: np.ndarray
    display_threshold: float = 0.01

    def accuracy(self) -> float:
        total = int(self.counts.sum())
        if total == 0:
            return 0.0
        return float(np.trace(self.counts)) / total


@dataclass
class RocCurve:
    points: list[tuple[float, float]]  # (fpr, tpr), (0,0) .. (1,1)
    auc: float


@dataclass
class AttributionResult:
    label: str
    scores: list[CorrScore]
    tied: bool = False


def corr(x: np.ndarray, y: np.ndarray) -> float:
    """Normalized correlation in [-1, 1]."""
    x = np.asarray(x).ravel()
    y = np.asarray(y).ravel()
    if x.size != y.size:
        raise LengthMismatchError(f"lengths differ: {x.size} vs {y.size}")
    v = inner_product(zero_mean_unit_norm(x), zero_mean_unit_norm(y))
    return float(min(1.0, max(-1.0, v)))


def score_against(residuals: list[Residual], fp: Fingerprint) -> list[CorrScore]:
    """Correlation of each residual with one fingerprint, order-preserving."""
    f = flatten(np.asarray(fp.planes, dtype=np.float64))
    f_norm = zero_mean_unit_norm(f)
    out = []
    for r in residuals:
        if r.planes.shape != fp.planes.shape:
            raise ShapeMismatchError(f"{r.planes.shape} != {fp.planes.shape}")
        v = inner_product(zero_mean_unit_norm(flatten(r.planes)), f_norm)
        out.append(CorrScore(value=float(min(1.0, max(-1.0, v))),
                             residual_id=r.source_id,
                             fingerprint_label=fp.source_label))
    return out


def correlation_matrix(sets: dict[str, list[Residual]],
                       fps: dict[str, Fingerprint]) -> CorrMatrix:
    """Mean correlation of every residual set against every fingerprint."""
    row_labels = list(sets.keys())
    col_labels = list(fps.keys())
    for label, residuals in sets.items():
        if not residuals:
            raise EmptySetError(f"residual set {label!r} is empty")
    values = np.zeros((len(row_labels), len(col_labels)))
    for j, fl in enumerate(col_labels):
        fp = fps[fl]
        for i, rl in enumerate(row_labels):
            scores = score_against(sets[rl], fp)
            values[i, j] = float(np.mean([s.value for s in scores]))
    return CorrMatrix(row_labels=row_labels, col_labels=col_labels, values=values)


def attribute(residual: Residual, fps: list[Fingerprint]) -> AttributionResult:
    """Maximum-correlation (equivalently minimum-distance) attribution.

    Ties keep the first label in input order and are flagged.
    """
    if not fps:
        raise EmptyFingerprintListError("no candidate fingerprints")
    scores = []
    for fp in fps:
        scores.extend(score_against([residual], fp))
    values = [s.value for s in scores]
    best = int(np.argmax(values))
    tied = values.count(values[best]) > 1
    return AttributionResult(label=fps[best].source_label, scores=scores, tied=tied)


def roc(scores: ScoreSet) -> RocCurve:
    """ROC by threshold sweep; higher score means more likely positive.

    AUC by trapezoidal integration, which on this construction equals the
    Mann-Whitney pair count with ties worth one half.
    """
    pos = np.asarray(scores.positives, dtype=np.float64)
    neg = np.asarray(scores.negatives, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise EmptyClassError("both score classes must be non-empty")
    thresholds = np.unique(np.concatenate([pos, neg]))[::-1]
    points = [(0.0, 0.0)]
    for t in thresholds:
        tpr = float(np.count_nonzero(pos >= t)) / pos.size
        fpr = float(np.count_nonzero(neg >= t)) / neg.size
        points.append((fpr, tpr))
    if points[-1] != (1.0, 1.0):
        points.append((1.0, 1.0))
    auc = 0.0
    for (x0, y0), (x1, y1) in zip(points, points[1:]):
        auc += (x1 - x0) * (y0 + y1) / 2.0
    return RocCurve(points=points, auc=float(auc))


def mann_whitney_auc(scores: ScoreSet) -> float:
    """Brute-force pair counting: P(pos > neg) + 0.5 P(pos == neg).

    Independent oracle for the trapezoidal AUC; O(n*m), test-scale only.
    """
    pos = np.asarray(scores.positives, dtype=np.float64)
    neg = np.asarray(scores.negatives, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise EmptyClassError("both score classes must be non-empty")
    diff = pos[:, None] - neg[None, :]
    wins = np.count_nonzero(diff > 0) + 0.5 * np.count_nonzero(diff == 0)
    return float(wins) / (pos.size * neg.size)


def confusion(truths: list[str], predictions: list[str],
              labels: list[str]) -> ConfusionMatrix:
    if len(truths) != len(predictions):
        raise LengthMismatchError(f"{len(truths)} truths vs {len(predictions)} predictions")
    index = {label: i for i, label in enumerate(labels)}
    counts = np.zeros((len(labels), len(labels)), dtype=np.int64)
    for t, p in zip(truths, predictions):
        if t not in index or p not in index:
            raise UnknownLabelError(f"label {t if t not in index else p!r} not declared")
        counts[index[t], index[p]] += 1
    return ConfusionMatrix(labels=list(labels), counts=counts)


# ---------------------------------------------------------------------------
# serialization

def corr_matrix_to_csv(m: CorrMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["residual_set"] + m.col_labels)
        for label, row in zip(m.row_labels, m.values):
            writer.writerow([label] + [repr(float(v)) for v in row])


def corr_matrix_to_json(m: CorrMatrix, path) -> None:
    payload = {"row_labels": m.row_labels, "col_labels": m.col_labels,
               "values": [[float(v) for v in row] for row in m.values]}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def confusion_to_csv(m: ConfusionMatrix, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["true\\predicted"] + m.labels)
        for label, row in zip(m.labels, m.counts):
            writer.writerow([label] + [int(v) for v in row])


def confusion_to_json(m: ConfusionMatrix, path) -> None:
    payload = {"labels": m.labels,
               "counts": [[int(v) for v in row] for row in m.counts],
               "display_threshold": m.display_threshold,
               "accuracy": m.accuracy()}
    Path(path).write_text(json.dumps(payload, indent=2) + "\n")


def roc_to_csv(curve: RocCurve, path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["false_positive_rate", "true_positive_rate"])
        for fpr, tpr in curve.points:
            writer.writerow([repr(fpr), repr(tpr)])


def render_confusion(m: ConfusionMatrix) -> str:
    """Text rendering with row fractions; entries below the display
    threshold are blanked."""
    widths = max(len(s) for s in m.labels)
    lines = [" " * (widths + 1) + " ".join(f"{s:>8}" for s in m.labels)]
    for label, row in zip(m.labels, m.counts):
        total = row.sum()
        cells = []
        for v in row:
            frac = v / total if total else 0.0
            cells.append(f"{frac:8.3f}" if frac >= m.display_threshold else " " * 8)
        lines.append(f"{label:>{widths}} " + " ".join(cells))
    return "\n".join(lines)
