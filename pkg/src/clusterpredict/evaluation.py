"""Confusion matrices, accuracy, majority baseline, ROC curves and AUC."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import EmptyInput, EmptyMatrix, LengthMismatch, OneClassOnly
from .ioutil import atomic_write_text


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    fn: int
    tn: int

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def __add__(self, other: "ConfusionMatrix") -> "ConfusionMatrix":
        return ConfusionMatrix(self.tp + other.tp, self.fp + other.fp,
                               self.fn + other.fn, self.tn + other.tn)

    def to_json(self) -> dict:
        return {"tp": self.tp, "fp": self.fp, "fn": self.fn, "tn": self.tn}


def _labels_scores(labels, scores) -> tuple[np.ndarray, np.ndarray]:
    y = np.asarray(labels, dtype=np.int64)
    s = np.asarray(scores, dtype=np.float64)
    if y.shape != s.shape or y.ndim != 1:
        raise LengthMismatch(f"{y.size} labels vs {s.size} scores")
    if y.size == 0:
        raise EmptyInput("no samples to evaluate")
    if np.any((y != 0) & (y != 1)):
        raise ValueError("labels must be 0 (negative) or 1 (positive)")
    if np.any(np.isnan(s)):
        raise ValueError("scores contain NaN")
    return y, s


def confusion(labels, scores, threshold: float = 0.5) -> ConfusionMatrix:
    """Counts with Positive predicted iff ``score >= threshold``."""
    y, s = _labels_scores(labels, scores)
    pred = s >= threshold
    pos = y == 1
    return ConfusionMatrix(
        tp=int(np.sum(pred & pos)),
        fp=int(np.sum(pred & ~pos)),
        fn=int(np.sum(~pred & pos)),
        tn=int(np.sum(~pred & ~pos)),
    )


def accuracy(cm: ConfusionMatrix) -> float:
    """(TP + TN) / (TP + FN + FP + TN)."""
    total = cm.tp + cm.fn + cm.fp + cm.tn
    if total == 0:
        raise EmptyMatrix("accuracy of an empty confusion matrix is undefined")
    return (cm.tp + cm.tn) / total


def baseline_accuracy(labels) -> float:
    """Accuracy of always predicting the majority class."""
    y = np.asarray(labels, dtype=np.int64)
    if y.size == 0:
        raise EmptyInput("baseline accuracy of zero labels is undefined")
    n_pos = int(np.sum(y == 1))
    return max(n_pos, y.size - n_pos) / y.size


@dataclass(frozen=True)
class RocCurve:
    points: tuple[tuple[float, float], ...]
    auc: float

    @property
    def fpr(self) -> np.ndarray:
        return np.array([p[0] for p in self.points])

    @property
    def tpr(self) -> np.ndarray:
        return np.array([p[1] for p in self.points])


def roc_curve(labels, scores) -> RocCurve:
    """ROC points from a descending sweep over distinct scores.

    Tied scores move as one block, so each distinct score contributes one
    point. AUC is the trapezoidal area, accumulated in integer counts and
    divided once at the end.
    """
    y, s = _labels_scores(labels, scores)
    n_pos = int(np.sum(y))
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise OneClassOnly(f"ROC needs both classes (positives={n_pos}, negatives={n_neg})")

    order = np.argsort(-s, kind="stable")
    s_sorted, y_sorted = s[order], y[order]
    # last index of each block of equal scores
    block_end = np.flatnonzero(np.append(s_sorted[1:] != s_sorted[:-1], True))
    tp = np.cumsum(y_sorted)[block_end]
    fp = (block_end + 1) - tp

    tps = [0] + tp.tolist()
    fps = [0] + fp.tolist()
    twice_area = sum((fps[i] - fps[i - 1]) * (tps[i] + tps[i - 1]) for i in range(1, len(tps)))
    auc = twice_area / (2 * n_pos * n_neg)
    points = tuple((f / n_neg, t / n_pos) for f, t in zip(fps, tps))
    if points[-1] != (1.0, 1.0):
        points = points + ((1.0, 1.0),)
    return RocCurve(points, auc)


def emit_roc_csv(curve: RocCurve, path: str | Path) -> None:
    """Write ``fpr,tpr`` rows at nine decimals (atomic replace)."""
    buf = io.StringIO()
    buf.write("fpr,tpr\n")
    for fpr, tpr in curve.points:
        buf.write(f"{fpr:.9f},{tpr:.9f}\n")
    atomic_write_text(path, buf.getvalue())


def read_roc_csv(path: str | Path) -> list[tuple[float, float]]:
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != ["fpr", "tpr"]:
            raise ValueError(f"unexpected ROC header {header}")
        return [(float(a), float(b)) for a, b in reader]


@dataclass
class EvaluationReport:
    """Metrics for one set of scored samples.

    ``n == 0`` marks a cluster that received no test rows; every metric is
    then ``None``. ``auc`` and ``roc`` are ``None`` when only one class is
    present.
    """

    n: int
    confusion: ConfusionMatrix | None
    accuracy: float | None
    baseline_accuracy: float | None
    roc: RocCurve | None
    auc: float | None
    per_cluster: dict[int, "EvaluationReport"] | None = None
    auc_cluster_mean: float | None = None
    extra: dict = field(default_factory=dict)

    @classmethod
    def empty(cls) -> "EvaluationReport":
        return cls(0, None, None, None, None, None)

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "accuracy": self.accuracy,
            "auc": self.auc,
            "baseline_accuracy": self.baseline_accuracy,
            "confusion": None if self.confusion is None else self.confusion.to_json(),
        }
        if self.per_cluster is not None:
            out["auc_cluster_mean"] = self.auc_cluster_mean
            out["per_cluster"] = {str(j): r.to_json() for j, r in sorted(self.per_cluster.items())}
        out.update(self.extra)
        return out


def evaluate(labels, scores, threshold: float = 0.5, auc_scores=None) -> EvaluationReport:
    """Confusion/accuracy at ``threshold``; ROC on ``auc_scores`` if given, else ``scores``."""
    y, s = _labels_scores(labels, scores)
    cm = confusion(y, s, threshold)
    try:
        roc = roc_curve(y, s if auc_scores is None else auc_scores)
    except OneClassOnly:
        roc = None
    return EvaluationReport(
        n=int(y.size),
        confusion=cm,
        accuracy=accuracy(cm),
        baseline_accuracy=baseline_accuracy(y),
        roc=roc,
        auc=None if roc is None else roc.auc,
    )


def mean_defined(values: Sequence[float | None]) -> float | None:
    vals = [v for v in values if v is not None and not math.isnan(v)]
    return sum(vals) / len(vals) if vals else None
