"""Exact brute-force Euclidean k-nearest-neighbor search."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class NeighborList:
    query_index: int
    indices: np.ndarray
    distances: np.ndarray

    def __len__(self):
        return len(self.indices)


def euclidean_distance(a, b) -> float:
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.sqrt(np.dot(d, d)))


def distances_from(X: np.ndarray, point: np.ndarray) -> np.ndarray:
    """Distances from `point` to every row of `X`.

    Computed from explicit differences rather than the
    ``|a|^2 + |b|^2 - 2ab`` expansion, so coincident rows give exactly 0.
    """
    diff = X - point
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def _check_k(n_rows: int, k: int) -> None:
    if not 1 <= k <= n_rows - 1:
        raise ValueError(f"k must be in [1, {n_rows - 1}] for {n_rows} rows, got {k}")


def k_nearest(X, query_index: int, k: int) -> NeighborList:
    """The `k` rows closest to row `query_index`, excluding the row itself.

    Distance ties go to the lower row index.
    """
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    _check_k(n, k)
    if not 0 <= query_index < n:
        raise IndexError(f"query_index {query_index} out of range for {n} rows")
    dist = distances_from(X, X[query_index])
    order = np.argsort(dist, kind="stable")
    order = order[order != query_index][:k]
    return NeighborList(int(query_index), order, dist[order])


def knn_table(X, k: int) -> tuple[np.ndarray, np.ndarray]:
    """Neighbor indices and distances for every row, shape (n_rows, k) each."""
    X = np.asarray(X, dtype=np.float64)
    n = X.shape[0]
    _check_k(n, k)
    idx = np.empty((n, k), dtype=np.intp)
    dist = np.empty((n, k), dtype=np.float64)
    for i in range(n):
        nl = k_nearest(X, i, k)
        idx[i] = nl.indices
        dist[i] = nl.distances
    return idx, dist
