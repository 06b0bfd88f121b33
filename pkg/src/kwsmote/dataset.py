"""Labeled binary datasets: CSV ingestion, class summaries, stratified
splitting and appending synthetic rows.

Datasets are immutable. Every operation returns a new value and the
underlying arrays are flagged read-only.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from decimal import ROUND_HALF_UP, Decimal
from pathlib import Path
from typing import Sequence

import numpy as np


class DatasetError(ValueError):
    """Raised for malformed input data or invalid dataset operations."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, copy=True)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class LabeledDataset:
    """Real feature matrix with a binary label vector.

    Parameters
    ----------
    features : array-like of shape (n_samples, n_features)
    labels : array-like of shape (n_samples,)
        Exactly two distinct values must be present.
    feature_names : sequence of str, optional
    label_name : str, optional
        Header of the label column, kept so a dataset can be written back
        with the schema it was read with.
    label_position : int, optional
        Zero-based column position of the label in the source file.
    """

    features: np.ndarray
    labels: np.ndarray
    feature_names: tuple[str, ...] | None = None
    label_name: str = "label"
    label_position: int | None = None
    _classes: tuple = field(init=False, repr=False)

    def __post_init__(self):
        X = np.asarray(self.features, dtype=np.float64)
        if X.ndim != 2:
            raise DatasetError(f"features must be 2-D, got shape {X.shape}")
        y = np.asarray(self.labels)
        if y.ndim != 1:
            raise DatasetError("labels must be 1-D")
        if X.shape[0] != y.shape[0]:
            raise DatasetError(
                f"row count mismatch: {X.shape[0]} feature rows, {y.shape[0]} labels"
            )
        if X.shape[0] == 0:
            raise DatasetError("empty dataset")
        if not np.all(np.isfinite(X)):
            raise DatasetError("all feature entries must be finite")
        classes = tuple(np.unique(y).tolist())
        if len(classes) != 2:
            raise DatasetError(
                f"expected exactly two distinct labels, found {len(classes)}: {list(classes)[:10]}"
            )
        names = self.feature_names
        if names is not None:
            names = tuple(str(n) for n in names)
            if len(names) != X.shape[1]:
                raise DatasetError(
                    f"{len(names)} feature names for {X.shape[1]} feature columns"
                )
        object.__setattr__(self, "features", _frozen(X))
        object.__setattr__(self, "labels", _frozen(y))
        object.__setattr__(self, "feature_names", names)
        object.__setattr__(self, "_classes", classes)

    @property
    def n_samples(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def classes(self) -> tuple:
        """The two label values in canonical (sorted) order."""
        return self._classes

    def with_rows(self, features: np.ndarray, labels: np.ndarray) -> "LabeledDataset":
        """Return a dataset with new rows and this dataset's schema."""
        return LabeledDataset(
            features,
            labels,
            feature_names=self.feature_names,
            label_name=self.label_name,
            label_position=self.label_position,
        )

    def take(self, rows: Sequence[int] | np.ndarray) -> "LabeledDataset":
        rows = np.asarray(rows, dtype=np.intp)
        return self.with_rows(self.features[rows], self.labels[rows])

    def equals(self, other: "LabeledDataset") -> bool:
        return (
            self.features.shape == other.features.shape
            and np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
        )


@dataclass(frozen=True)
class ClassSummary:
    minority_label: object
    majority_label: object
    minority_count: int
    majority_count: int

    @property
    def imbalance_ratio(self) -> float:
        return self.majority_count / self.minority_count


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: float = 0.7
    rng_seed: int = 0

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise DatasetError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        if not 0 <= int(self.rng_seed) < 2**64:
            raise DatasetError("rng_seed must be an unsigned 64-bit integer")


def _parse_labels(raw: list[str]) -> np.ndarray:
    try:
        return np.array([int(v) for v in raw], dtype=np.int64)
    except ValueError:
        return np.array(raw, dtype=str)


def load_csv(path, label_column: str | int) -> LabeledDataset:
    """Read a comma-delimited UTF-8 file with a header row.

    `label_column` is a header name or a zero-based column index. Every
    other column must hold finite reals. Rows keep file order.
    """
    path = Path(path)
    if not path.is_file():
        raise DatasetError(f"no such file: {path}")
    with path.open(newline="", encoding="utf-8") as fh:
        rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    if not rows:
        raise DatasetError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    body = rows[1:]
    if not body:
        raise DatasetError(f"{path}: empty dataset (header only)")

    if isinstance(label_column, int) or (isinstance(label_column, str) and label_column.isdigit()
                                         and label_column not in header):
        pos = int(label_column)
        if not 0 <= pos < len(header):
            raise DatasetError(f"label column index {pos} out of range for {len(header)} columns")
    else:
        if label_column not in header:
            raise DatasetError(f"label column {label_column!r} not in header {header}")
        pos = header.index(label_column)

    feat_cols = [j for j in range(len(header)) if j != pos]
    X = np.empty((len(body), len(feat_cols)), dtype=np.float64)
    raw_labels = []
    for i, row in enumerate(body):
        line = i + 2  # 1-based, header is line 1
        if len(row) != len(header):
            raise DatasetError(f"{path}: row {line} has {len(row)} cells, expected {len(header)}")
        for out_j, j in enumerate(feat_cols):
            cell = row[j].strip()
            try:
                v = float(cell)
            except ValueError:
                raise DatasetError(
                    f"{path}: row {line}, column {header[j]!r}: cannot parse {cell!r} as a number"
                ) from None
            if not math.isfinite(v):
                raise DatasetError(f"{path}: row {line}, column {header[j]!r}: non-finite value {cell!r}")
            X[i, out_j] = v
        raw_labels.append(row[pos].strip())

    return LabeledDataset(
        X,
        _parse_labels(raw_labels),
        feature_names=[header[j] for j in feat_cols],
        label_name=header[pos],
        label_position=pos,
    )


def _format_number(v: float) -> str:
    if v.is_integer() and abs(v) < 2**53:
        return str(int(v))
    return repr(float(v))


def write_csv(ds: LabeledDataset, path, synthetic: np.ndarray | None = None) -> None:
    """Write `ds` with its original column layout.

    If `synthetic` (a boolean mask over rows) is given, a trailing
    ``synthetic`` column with 0/1 values is added.
    """
    names = list(ds.feature_names or [f"x{j}" for j in range(ds.n_features)])
    pos = ds.label_position if ds.label_position is not None else len(names)
    pos = min(pos, len(names))
    header = names[:pos] + [ds.label_name] + names[pos:]
    if synthetic is not None:
        header.append("synthetic")
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for i in range(ds.n_samples):
            cells = [_format_number(v) for v in ds.features[i].tolist()]
            cells.insert(pos, str(ds.labels[i]))
            if synthetic is not None:
                cells.append("1" if synthetic[i] else "0")
            w.writerow(cells)


def class_summary(ds: LabeledDataset) -> ClassSummary:
    """Minority/majority counts. An exact tie makes the smaller label minority."""
    a, b = ds.classes
    na = int(np.count_nonzero(ds.labels == a))
    nb = ds.n_samples - na
    if nb < na:
        return ClassSummary(b, a, nb, na)
    return ClassSummary(a, b, na, nb)


def stratified_counts(total: int, train_fraction: float) -> int:
    """Train count for one class: round(fraction * total), halves away from zero."""
    exact = Decimal(repr(float(train_fraction))) * total
    return int(exact.quantize(Decimal(1), rounding=ROUND_HALF_UP))


def stratified_split_indices(ds: LabeledDataset, spec: SplitSpec) -> tuple[np.ndarray, np.ndarray]:
    """Row indices of the train and test partitions, each ascending."""
    rng = np.random.default_rng(int(spec.rng_seed))
    train, test = [], []
    for label in ds.classes:
        idx = np.flatnonzero(ds.labels == label)
        n_train = stratified_counts(idx.size, spec.train_fraction)
        if n_train == 0 or n_train == idx.size:
            raise DatasetError(
                f"class {label!r} with {idx.size} rows would leave an empty partition "
                f"at train_fraction={spec.train_fraction}"
            )
        perm = rng.permutation(idx)
        train.append(perm[:n_train])
        test.append(perm[n_train:])
    return np.sort(np.concatenate(train)), np.sort(np.concatenate(test))


def stratified_split(ds: LabeledDataset, spec: SplitSpec) -> tuple[LabeledDataset, LabeledDataset]:
    train_idx, test_idx = stratified_split_indices(ds, spec)
    return ds.take(train_idx), ds.take(test_idx)


def append_synthetic(ds: LabeledDataset, batch, label) -> LabeledDataset:
    """Append the rows of `batch` (a SyntheticBatch or a plain matrix), all labeled `label`."""
    samples = np.asarray(getattr(batch, "samples", batch), dtype=np.float64)
    if samples.size == 0:
        return ds
    if samples.ndim != 2 or samples.shape[1] != ds.n_features:
        raise DatasetError(
            f"batch width {samples.shape[-1] if samples.ndim else 0} does not match "
            f"dataset width {ds.n_features}"
        )
    new_labels = np.array([label] * samples.shape[0])
    return ds.with_rows(
        np.vstack([ds.features, samples]),
        np.concatenate([ds.labels, new_labels]),
    )
