"""Confusion counting and the four classification/segmentation metrics.

Works identically at image level (one decision per image) and pixel level
(one decision per pixel); "positive" means crack / foreground throughout.
Metrics with a zero denominator are reported as None rather than raising or
silently substituting 0.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DimensionMismatchError


@dataclass(frozen=True)
class ConfusionCounts:
    n_tp: int = 0
    n_fp: int = 0
    n_fn: int = 0
    n_tn: int = 0

    def __add__(self, other):
        return ConfusionCounts(
            self.n_tp + other.n_tp,
            self.n_fp + other.n_fp,
            self.n_fn + other.n_fn,
            self.n_tn + other.n_tn,
        )

    @property
    def total(self):
        return self.n_tp + self.n_fp + self.n_fn + self.n_tn


@dataclass(frozen=True)
class MetricsReport:
    """Metric values in [0, 1]; None marks an undefined (0/0) metric."""

    precision: Optional[float]
    recall: Optional[float]
    accuracy: Optional[float]
    f1: Optional[float]


def accumulate_image(pred_positive, truth_positive, counts=ConfusionCounts()):
    """Fold one image-level decision into the confusion counts."""
    if pred_positive and truth_positive:
        delta = ConfusionCounts(n_tp=1)
    elif pred_positive:
        delta = ConfusionCounts(n_fp=1)
    elif truth_positive:
        delta = ConfusionCounts(n_fn=1)
    else:
        delta = ConfusionCounts(n_tn=1)
    return counts + delta


def accumulate_pixels(pred, truth, counts=ConfusionCounts()):
    """Fold a predicted/ground-truth mask pair into the confusion counts."""
    pred = np.asarray(pred, dtype=bool)
    truth = np.asarray(truth, dtype=bool)
    if pred.shape != truth.shape:
        raise DimensionMismatchError(
            f"mask shapes differ: {pred.shape} vs {truth.shape}"
        )
    tp = int(np.count_nonzero(pred & truth))
    fp = int(np.count_nonzero(pred & ~truth))
    fn = int(np.count_nonzero(~pred & truth))
    tn = int(np.count_nonzero(~pred & ~truth))
    return counts + ConfusionCounts(tp, fp, fn, tn)


def _ratio(num, den):
    return num / den if den > 0 else None


def compute_metrics(counts):
    """Precision, recall, accuracy and F1 from confusion counts.

    F1 is the harmonic mean of precision and recall; it is undefined when
    either of them is, or when both are zero.
    """
    precision = _ratio(counts.n_tp, counts.n_tp + counts.n_fp)
    recall = _ratio(counts.n_tp, counts.n_tp + counts.n_fn)
    accuracy = _ratio(counts.n_tp + counts.n_tn, counts.total)
    if precision is None or recall is None or precision + recall == 0:
        f1 = None
    else:
        f1 = 2 * precision * recall / (precision + recall)
    return MetricsReport(precision, recall, accuracy, f1)
