"""Confusion counts, F1, G-mean and ROC AUC for binary problems.

Ratios with a zero denominator (precision with no positive predictions,
recall with no positives, ...) are taken as 0.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be nonnegative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class EvalReport:
    dataset: str
    method: str
    classifier: str
    seed: int | None
    f1: float
    g_mean: float
    auc: float
    confusion: ConfusionMatrix

    def as_dict(self) -> dict:
        return {
            "dataset": self.dataset,
            "method": self.method,
            "classifier": self.classifier,
            "seed": self.seed,
            "f1": self.f1,
            "g_mean": self.g_mean,
            "auc": self.auc,
            "confusion": self.confusion.as_dict(),
        }


def _ratio(num: float, den: float) -> float:
    return num / den if den else 0.0


def confusion(y_true, y_pred, positive) -> ConfusionMatrix:
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise ValueError(f"length mismatch: {y_true.shape} vs {y_pred.shape}")
    t = y_true == positive
    p = y_pred == positive
    return ConfusionMatrix(
        tp=int(np.count_nonzero(t & p)),
        fp=int(np.count_nonzero(~t & p)),
        tn=int(np.count_nonzero(~t & ~p)),
        fn=int(np.count_nonzero(t & ~p)),
    )


def precision(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tp, cm.tp + cm.fp)


def recall(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tp, cm.tp + cm.fn)


true_positive_rate = recall


def true_negative_rate(cm: ConfusionMatrix) -> float:
    return _ratio(cm.tn, cm.tn + cm.fp)


def f1_score(cm: ConfusionMatrix) -> float:
    p, r = precision(cm), recall(cm)
    return _ratio(2.0 * p * r, p + r)


def g_mean(cm: ConfusionMatrix) -> float:
    return math.sqrt(true_positive_rate(cm) * true_negative_rate(cm))


def average_ranks(values) -> np.ndarray:
    """1-based ranks; tied values share the mean of the ranks they span."""
    values = np.asarray(values, dtype=np.float64)
    order = np.argsort(values, kind="mergesort")
    sorted_vals = values[order]
    n = values.size
    # boundaries of runs of equal values
    starts = np.flatnonzero(np.r_[True, sorted_vals[1:] != sorted_vals[:-1]])
    ends = np.r_[starts[1:], n]
    run_rank = (starts + ends + 1) / 2.0
    ranks = np.empty(n)
    ranks[order] = np.repeat(run_rank, ends - starts)
    return ranks


def roc_auc(y_true, scores, positive) -> float:
    """Probability that a random positive outscores a random negative.

    Tied (positive, negative) pairs count one half. This equals the
    trapezoidal area under the ROC curve with equal scores collapsed into
    one threshold.
    """
    y_true = np.asarray(y_true)
    scores = np.asarray(scores, dtype=np.float64)
    if y_true.shape != scores.shape:
        raise ValueError(f"length mismatch: {y_true.shape} vs {scores.shape}")
    pos = y_true == positive
    n_pos = int(np.count_nonzero(pos))
    n_neg = pos.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("roc_auc needs at least one positive and one negative instance")
    ranks = average_ranks(scores)
    u = ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))
