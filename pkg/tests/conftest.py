import os
from pathlib import Path

import numpy as np
import pytest

from kwsmote.dataset import LabeledDataset, load_csv

# (n_features, minority, majority) per dataset summary table
TABLE_I = {
    "blood": (4, 178, 570),
    "haberman": (3, 81, 225),
    "breast_cancer": (30, 212, 357),
    "diabetes": (8, 268, 500),
}


def blobs(n_min, n_maj, d=2, sep=1.5, seed=0):
    """Two isotropic Gaussian classes; minority (label 1) shifted by `sep` on every axis."""
    r = np.random.default_rng(seed)
    X = np.vstack([r.normal(0.0, 1.0, (n_maj, d)), r.normal(sep, 1.0, (n_min, d))])
    y = np.r_[np.zeros(n_maj, dtype=np.int64), np.ones(n_min, dtype=np.int64)]
    return LabeledDataset(X, y)


def table1_standin(name, seed=0):
    d, n_min, n_maj = TABLE_I[name]
    return blobs(n_min, n_maj, d=d, sep=1.0, seed=seed)


def real_dataset(name):
    """Load a real CSV from $KWSMOTE_DATA_DIR/<name>.csv (label = last column), if present."""
    root = os.environ.get("KWSMOTE_DATA_DIR")
    if not root:
        return None
    path = Path(root) / f"{name}.csv"
    if not path.is_file():
        return None
    with path.open(encoding="utf-8") as fh:
        n_cols = len(fh.readline().split(","))
    return load_csv(path, n_cols - 1)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def write_text(path, text):
    path.write_text(text, encoding="utf-8")
    return path


_ACCEPTANCE_LINES = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion, then assert."""

    def check(number, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line

    return check


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
