"""Synthetic minority sample generators.

Four generators share one output type, :class:`SyntheticBatch`, which keeps
for every generated row the seed row, the neighbor rows it was built from
and the raw weights, so each sample can be rebuilt and audited.

* ``smote`` -- uniform interpolation between a seed and one of its k
  nearest minority neighbors.
* ``normal_center`` -- moves the seed towards the minority centroid by a
  normally distributed step with mean 1.
* ``snocc`` -- random convex combination of a seed and c of its k nearest
  neighbors (uniform weights, normalized).
* ``kwsmote`` -- convex combination of a seed and c of its k nearest
  neighbors weighted by a Gaussian kernel; the seed has weight 1.
  Candidates whose neighbor weights are all below a threshold are skipped.

All generators are pure functions of their inputs and the generator state
passed in as ``rng`` (a :class:`numpy.random.Generator`).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .dataset import ClassSummary, LabeledDataset, append_synthetic, class_summary
from .kernel import Bandwidth, default_bandwidth, gaussian_weights
from .neighbors import knn_table

Method = Literal["smote", "kwsmote", "normal_center", "snocc"]
METHODS = ("smote", "kwsmote", "normal_center", "snocc")


class SamplerError(ValueError):
    pass


class AttemptCapError(RuntimeError):
    """KWSMOTE gave up after too many rejected candidates."""

    def __init__(self, requested: int, accepted: int, skipped: int, attempts: int):
        self.requested = requested
        self.accepted = accepted
        self.skipped = skipped
        self.attempts = attempts
        super().__init__(
            f"attempt cap reached after {attempts} candidates: accepted {accepted} of "
            f"{requested} requested samples, skipped {skipped}; the threshold tau and "
            f"kernel width sigma are incompatible with this data"
        )


@dataclass(frozen=True)
class SamplerConfig:
    """Parameters for one oversampling method.

    Parameters
    ----------
    method : {'smote', 'kwsmote', 'normal_center', 'snocc'}
    k_neighbors : int
        Size of the nearest-neighbor pool per seed.
    convex_points : int
        Number of neighbors combined with the seed (kwsmote, snocc).
    threshold : float
        Kwsmote skips a candidate when every neighbor weight is below this.
    sigma : float, optional
        Kwsmote kernel width. The flattened-variance heuristic is used when
        omitted.
    sigma_normal : float
        Standard deviation of the step multiplier for normal_center.
    max_attempt_factor : int
        Kwsmote draws at most ``max_attempt_factor * n`` candidates.
    """

    method: Method = "kwsmote"
    k_neighbors: int = 5
    convex_points: int = 3
    threshold: float = 0.0
    sigma: float | None = None
    sigma_normal: float = 0.5
    max_attempt_factor: int = 100

    def __post_init__(self):
        if self.method not in METHODS:
            raise SamplerError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.k_neighbors < 1:
            raise SamplerError("k_neighbors must be positive")
        if self.convex_points < 1:
            raise SamplerError("convex_points must be positive")
        if self.convex_points > self.k_neighbors:
            raise SamplerError(
                f"convex_points ({self.convex_points}) cannot exceed k_neighbors ({self.k_neighbors})"
            )
        if not 0.0 <= self.threshold < 1.0:
            raise SamplerError(f"threshold must lie in [0, 1), got {self.threshold}")
        if self.sigma is not None and not (np.isfinite(self.sigma) and self.sigma > 0):
            raise SamplerError("sigma must be positive and finite")
        if not (np.isfinite(self.sigma_normal) and self.sigma_normal > 0):
            raise SamplerError("sigma_normal must be positive and finite")
        if self.max_attempt_factor < 1:
            raise SamplerError("max_attempt_factor must be positive")


@dataclass(frozen=True)
class ProvenanceRecord:
    seed_index: int
    neighbor_indices: np.ndarray
    weights: np.ndarray
    normalizer: float


@dataclass(frozen=True, eq=False)
class SyntheticBatch:
    """Generated rows and how each one was built.

    ``weights[i]`` holds the raw weights of sample ``i`` over the points
    ``[seed, neighbor_1, ..., neighbor_c]`` and ``normalizers[i]`` their
    sum, so ``samples[i] == weights[i] / normalizers[i] @ points``. For
    normal_center the two points are the seed and the minority centroid
    (``center``), and the weights ``(1 - g, g)`` may be negative because
    the step ``g`` is not truncated.
    """

    method: str
    samples: np.ndarray
    seed_indices: np.ndarray
    neighbor_indices: np.ndarray
    weights: np.ndarray
    normalizers: np.ndarray
    skipped_count: int = 0
    steps: np.ndarray | None = None
    center: np.ndarray | None = None
    bandwidth: Bandwidth | None = None
    attempts: int = 0
    skipped_seed_indices: np.ndarray = field(default_factory=lambda: np.empty(0, dtype=np.intp))

    def __len__(self):
        return self.samples.shape[0]

    @property
    def normalized_weights(self) -> np.ndarray:
        return self.weights / self.normalizers[:, None]

    def record(self, i: int) -> ProvenanceRecord:
        return ProvenanceRecord(
            int(self.seed_indices[i]),
            self.neighbor_indices[i],
            self.weights[i],
            float(self.normalizers[i]),
        )

    def source_points(self, X_min: np.ndarray, i: int) -> np.ndarray:
        X_min = np.asarray(X_min, dtype=np.float64)
        seed = X_min[self.seed_indices[i]]
        if self.center is not None:
            return np.vstack([seed, self.center])
        return np.vstack([seed, X_min[self.neighbor_indices[i]]])

    def reconstruct(self, X_min) -> np.ndarray:
        """Rebuild every sample from the cited rows and stored weights."""
        X_min = np.asarray(X_min, dtype=np.float64)
        out = np.empty_like(self.samples)
        nu = self.normalized_weights
        for i in range(len(self)):
            out[i] = nu[i] @ self.source_points(X_min, i)
        return out


def _empty_batch(method: str, d: int, c: int, **kw) -> SyntheticBatch:
    return SyntheticBatch(
        method=method,
        samples=np.empty((0, d)),
        seed_indices=np.empty(0, dtype=np.intp),
        neighbor_indices=np.empty((0, c), dtype=np.intp),
        weights=np.empty((0, c + 1)),
        normalizers=np.empty(0),
        **kw,
    )


def _as_matrix(X_min) -> np.ndarray:
    X = np.asarray(X_min, dtype=np.float64)
    if X.ndim != 2:
        raise SamplerError("minority matrix must be 2-D")
    return X


def _check_rows(X: np.ndarray, k: int) -> None:
    if X.shape[0] < k + 1:
        raise SamplerError(
            f"too few minority rows ({X.shape[0]}) for k={k}; need at least {k + 1}"
        )


def _check_n(n: int) -> int:
    n = int(n)
    if n < 0:
        raise SamplerError("sample count must be nonnegative")
    return n


def smote_generate(X_min, k: int, n: int, rng) -> SyntheticBatch:
    """p = x_i + u * (x_j - x_i), u ~ U[0, 1), x_j one of the k nearest neighbors of x_i."""
    X = _as_matrix(X_min)
    n = _check_n(n)
    if n == 0:
        return _empty_batch("smote", X.shape[1], 1, steps=np.empty(0))
    _check_rows(X, k)
    nbr_idx, _ = knn_table(X, k)
    seeds = rng.integers(0, X.shape[0], size=n)
    picks = rng.integers(0, k, size=n)
    u = rng.random(n)
    partners = nbr_idx[seeds, picks]
    samples = X[seeds] + u[:, None] * (X[partners] - X[seeds])
    return SyntheticBatch(
        method="smote",
        samples=samples,
        seed_indices=seeds.astype(np.intp),
        neighbor_indices=partners[:, None].astype(np.intp),
        weights=np.column_stack([1.0 - u, u]),
        normalizers=np.ones(n),
        steps=u,
    )


def normal_center_generate(X_min, sigma_normal: float, n: int, rng) -> SyntheticBatch:
    """p = x_i + g * (center - x_i) with g ~ Normal(1, sigma_normal), untruncated."""
    X = _as_matrix(X_min)
    n = _check_n(n)
    if not sigma_normal > 0:
        raise SamplerError("sigma_normal must be positive")
    if n == 0:
        return _empty_batch("normal_center", X.shape[1], 0, steps=np.empty(0))
    if X.shape[0] < 2:
        raise SamplerError("normal_center needs at least 2 minority rows")
    center = X.mean(axis=0)
    seeds = rng.integers(0, X.shape[0], size=n)
    g = rng.normal(1.0, sigma_normal, size=n)
    samples = X[seeds] + g[:, None] * (center - X[seeds])
    return SyntheticBatch(
        method="normal_center",
        samples=samples,
        seed_indices=seeds.astype(np.intp),
        neighbor_indices=np.empty((n, 0), dtype=np.intp),
        weights=np.column_stack([1.0 - g, g]),
        normalizers=np.ones(n),
        steps=g,
        center=center,
    )


def snocc_generate(X_min, k: int, c: int, n: int, rng) -> SyntheticBatch:
    """Convex combinations of a seed and `c` of its `k` nearest neighbors.

    Weights are independent U[0, 1) draws normalized to sum to one. This is
    a reconstruction of the convex-combination sampler: only the idea of
    filling the hull of nearby minority points is fixed, not the weight law.
    """
    X = _as_matrix(X_min)
    n = _check_n(n)
    if not 1 <= c <= k:
        raise SamplerError(f"need 1 <= c <= k, got c={c}, k={k}")
    if n == 0:
        return _empty_batch("snocc", X.shape[1], c)
    _check_rows(X, k)
    nbr_idx, _ = knn_table(X, k)
    seeds = np.empty(n, dtype=np.intp)
    nbrs = np.empty((n, c), dtype=np.intp)
    weights = np.empty((n, c + 1))
    for s in range(n):
        i = int(rng.integers(0, X.shape[0]))
        chosen = nbr_idx[i, rng.choice(k, size=c, replace=False)]
        w = rng.random(c + 1)
        if w.sum() == 0.0:
            w[:] = 1.0
        seeds[s], nbrs[s], weights[s] = i, chosen, w
    D = weights.sum(axis=1)
    samples = np.empty((n, X.shape[1]))
    for s in range(n):
        pts = np.vstack([X[seeds[s]], X[nbrs[s]]])
        samples[s] = (weights[s] / D[s]) @ pts
    return SyntheticBatch("snocc", samples, seeds, nbrs, weights, D)


def resolve_bandwidth(X_min, sigma: float | None) -> Bandwidth:
    if sigma is not None:
        return Bandwidth(float(sigma))
    return default_bandwidth(X_min)


def kwsmote_generate(X_min, cfg: SamplerConfig, n: int, rng) -> SyntheticBatch:
    """Kernel-weighted convex combinations of a seed and c of its neighbors.

    Each candidate: draw a seed row uniformly, draw c of its k nearest
    neighbors without replacement, weight every point by
    ``exp(-|x_seed - x|^2 / (2 sigma^2))`` (the seed itself gets 1) and
    emit the weighted mean. A candidate is skipped when the largest
    neighbor weight is below ``cfg.threshold``; the seed weight takes no
    part in that test. Skipped candidates still consume their random draws.

    Raises
    ------
    AttemptCapError
        If ``cfg.max_attempt_factor * n`` candidates were drawn without
        reaching `n` accepted samples.
    """
    X = _as_matrix(X_min)
    n = _check_n(n)
    k, c, tau = cfg.k_neighbors, cfg.convex_points, cfg.threshold
    if n == 0:
        return _empty_batch("kwsmote", X.shape[1], c)
    _check_rows(X, k)
    bw = resolve_bandwidth(X, cfg.sigma)

    nbr_idx, _ = knn_table(X, k)
    max_attempts = cfg.max_attempt_factor * n
    seeds = np.empty(n, dtype=np.intp)
    nbrs = np.empty((n, c), dtype=np.intp)
    weights = np.empty((n, c + 1))
    skipped_seeds = []
    accepted = attempts = 0
    while accepted < n:
        if attempts >= max_attempts:
            raise AttemptCapError(n, accepted, len(skipped_seeds), attempts)
        attempts += 1
        i = int(rng.integers(0, X.shape[0]))
        chosen = nbr_idx[i, rng.choice(k, size=c, replace=False)]
        diff = X[chosen] - X[i]
        w = gaussian_weights(np.einsum("ij,ij->i", diff, diff), bw)
        if w.max() < tau:
            skipped_seeds.append(i)
            continue
        seeds[accepted] = i
        nbrs[accepted] = chosen
        weights[accepted, 0] = 1.0
        weights[accepted, 1:] = w
        accepted += 1

    D = weights.sum(axis=1)
    samples = np.empty((n, X.shape[1]))
    for s in range(n):
        pts = np.vstack([X[seeds[s]], X[nbrs[s]]])
        samples[s] = (weights[s] / D[s]) @ pts
    return SyntheticBatch(
        "kwsmote",
        samples,
        seeds,
        nbrs,
        weights,
        D,
        skipped_count=len(skipped_seeds),
        bandwidth=bw,
        attempts=attempts,
        skipped_seed_indices=np.asarray(skipped_seeds, dtype=np.intp),
    )


def required_count(summary: ClassSummary) -> int:
    return summary.majority_count - summary.minority_count


def generate(X_min, cfg: SamplerConfig, n: int, rng) -> SyntheticBatch:
    if cfg.method == "smote":
        return smote_generate(X_min, cfg.k_neighbors, n, rng)
    if cfg.method == "normal_center":
        return normal_center_generate(X_min, cfg.sigma_normal, n, rng)
    if cfg.method == "snocc":
        return snocc_generate(X_min, cfg.k_neighbors, cfg.convex_points, n, rng)
    return kwsmote_generate(X_min, cfg, n, rng)


def oversample(ds: LabeledDataset, cfg: SamplerConfig, rng) -> tuple[LabeledDataset, SyntheticBatch]:
    """Balance `ds` by appending synthetic minority rows; also return the batch."""
    summary = class_summary(ds)
    X_min = ds.features[ds.labels == summary.minority_label]
    batch = generate(X_min, cfg, required_count(summary), rng)
    return append_synthetic(ds, batch, summary.minority_label), batch


def resample(ds: LabeledDataset, cfg: SamplerConfig, rng) -> LabeledDataset:
    return oversample(ds, cfg, rng)[0]
