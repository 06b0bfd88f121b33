"""Gaussian kernel weights and the default bandwidth heuristic."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np


class DegenerateMinorityError(ValueError):
    pass


class BandwidthSource(str, Enum):
    USER_SUPPLIED = "user_supplied"
    HEURISTIC = "heuristic"


@dataclass(frozen=True)
class Bandwidth:
    sigma: float
    source: BandwidthSource = BandwidthSource.USER_SUPPLIED

    def __post_init__(self):
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise ValueError(f"sigma must be positive and finite, got {self.sigma}")


def _sigma(bw) -> float:
    return bw.sigma if isinstance(bw, Bandwidth) else Bandwidth(float(bw)).sigma


def gaussian_kernel(a, b, bw) -> float:
    """exp(-|a - b|^2 / (2 sigma^2)); equals 1 when a == b."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    d = a - b
    sigma = _sigma(bw)
    return math.exp(-float(np.dot(d, d)) / (2.0 * sigma * sigma))


def gaussian_weights(sq_dist: np.ndarray, bw) -> np.ndarray:
    """Vectorized kernel over precomputed squared distances."""
    sigma = _sigma(bw)
    return np.exp(-np.asarray(sq_dist, dtype=np.float64) / (2.0 * sigma * sigma))


def default_bandwidth(X_min) -> Bandwidth:
    """sigma = sqrt(Var(X_min) * n_features / 2).

    Var is the population variance of all entries of `X_min` taken as one
    flat sequence. This is the width for which the Gaussian kernel matches
    an RBF kernel with ``gamma = 1 / (n_features * X.var())``.
    """
    X_min = np.asarray(X_min, dtype=np.float64)
    if X_min.ndim != 2 or X_min.shape[0] < 2:
        raise ValueError("default_bandwidth needs a 2-D matrix with at least 2 rows")
    var = float(np.var(X_min.ravel()))
    if var == 0.0:
        raise DegenerateMinorityError(
            "all minority feature entries are identical (zero variance); "
            "supply an explicit kernel width sigma"
        )
    return Bandwidth(math.sqrt(var * X_min.shape[1] / 2.0), BandwidthSource.HEURISTIC)
