"""Small classifiers used to score resampled training sets.

Both return ``(predictions, scores)`` where scores are the estimated
probability of the positive class. A score of exactly 0.5 predicts the
negative class.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dataset import LabeledDataset, class_summary


class TrainingError(RuntimeError):
    pass


def _predict_labels(scores: np.ndarray, positive, negative) -> np.ndarray:
    return np.where(scores > 0.5, positive, negative)


def _negative_of(classes, positive):
    if positive not in classes:
        raise ValueError(f"positive label {positive!r} not among classes {classes}")
    return classes[1] if classes[0] == positive else classes[0]


@dataclass(frozen=True)
class Standardizer:
    mean: np.ndarray
    scale: np.ndarray
    constant: np.ndarray  # features with zero training variance (scale forced to 1)

    @classmethod
    def fit(cls, X: np.ndarray) -> "Standardizer":
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        constant = std == 0
        return cls(mean, np.where(constant, 1.0, std), constant)

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.scale


@dataclass(frozen=True)
class KnnClassifierModel:
    train: LabeledDataset
    k_votes: int
    positive: object
    standardizer: Standardizer | None = None

    def __post_init__(self):
        if not 1 <= self.k_votes <= self.train.n_samples:
            raise ValueError(
                f"k_votes must be in [1, {self.train.n_samples}], got {self.k_votes}"
            )


def knn_scores(model: KnnClassifierModel, X_test) -> np.ndarray:
    """Fraction of the k nearest training rows labeled positive.

    Distance ties are resolved towards the lower training row index.
    """
    Xtr = model.train.features
    Xte = np.asarray(X_test, dtype=np.float64)
    if Xte.ndim != 2 or Xte.shape[1] != Xtr.shape[1]:
        raise ValueError(f"test width {Xte.shape[-1]} does not match training width {Xtr.shape[1]}")
    if model.standardizer is not None:
        Xtr = model.standardizer.transform(Xtr)
        Xte = model.standardizer.transform(Xte)
    is_pos = model.train.labels == model.positive
    scores = np.empty(Xte.shape[0])
    for q in range(Xte.shape[0]):
        diff = Xtr - Xte[q]
        dist = np.einsum("ij,ij->i", diff, diff)
        nearest = np.argsort(dist, kind="stable")[: model.k_votes]
        scores[q] = np.count_nonzero(is_pos[nearest]) / model.k_votes
    return scores


def knn_fit_predict(train: LabeledDataset, X_test, k_votes: int = 5, positive=None,
                    standardize: bool = False):
    """Majority vote among the `k_votes` nearest training rows.

    `positive` defaults to the label that is less frequent in `train`; pass
    it explicitly when `train` has been rebalanced.
    """
    if train is None or train.n_samples == 0:
        raise ValueError("empty training set")
    if positive is None:
        positive = class_summary(train).minority_label
    std = Standardizer.fit(train.features) if standardize else None
    model = KnnClassifierModel(train, k_votes, positive, std)
    scores = knn_scores(model, X_test)
    return _predict_labels(scores, positive, _negative_of(train.classes, positive)), scores


@dataclass(frozen=True)
class LogisticModel:
    weights: np.ndarray
    bias: float
    standardizer: Standardizer
    positive: object
    negative: object


def sigmoid(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def log_loss(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray) -> float:
    """Mean binary cross-entropy of ``sigmoid(X @ w + b)`` against 0/1 targets."""
    z = X @ w + b
    return float(np.mean(np.logaddexp(0.0, z) - y * z))


def log_loss_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray):
    """Gradient of :func:`log_loss` with respect to ``(w, b)``."""
    r = sigmoid(X @ w + b) - y
    return X.T @ r / X.shape[0], float(r.mean())


def logistic_fit(train: LabeledDataset, epochs: int = 500, learning_rate: float = 0.1,
                 rng=None, positive=None, init_scale: float = 0.0) -> LogisticModel:
    """Full-batch gradient descent on mean log-loss over standardized features.

    Weights start at zero. With ``init_scale > 0`` they are drawn from
    ``Normal(0, init_scale)`` using `rng`; that is the only use of `rng`.
    """
    if positive is None:
        positive = class_summary(train).minority_label
    negative = _negative_of(train.classes, positive)
    std = Standardizer.fit(train.features)
    X = std.transform(train.features)
    y = (train.labels == positive).astype(np.float64)

    if init_scale > 0:
        if rng is None:
            raise ValueError("init_scale > 0 needs an rng")
        w = rng.normal(0.0, init_scale, size=X.shape[1])
    else:
        w = np.zeros(X.shape[1])
    b = 0.0
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(int(epochs)):
            gw, gb = log_loss_grad(w, b, X, y)
            w = w - learning_rate * gw
            b = b - learning_rate * gb
            loss = log_loss(w, b, X, y)
            if not np.isfinite(loss):
                raise TrainingError(f"non-finite loss at epoch {epoch + 1}")
    return LogisticModel(w, b, std, positive, negative)


def logistic_predict(model: LogisticModel, X):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] != model.weights.shape[0]:
        raise ValueError(
            f"feature width {X.shape[-1]} does not match model width {model.weights.shape[0]}"
        )
    z = model.standardizer.transform(X) @ model.weights + model.bias
    # keep scores inside the open interval even where float64 saturates
    scores = np.clip(sigmoid(z), np.finfo(np.float64).tiny, 1.0 - np.finfo(np.float64).epsneg)
    return _predict_labels(scores, model.positive, model.negative), scores
