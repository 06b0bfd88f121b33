"""Split / resample / fit / score pipeline and the benchmark grid runner.

A plan file is YAML::

    train_fraction: 0.7          # optional, default 0.7
    seeds: [1, 2, 3, 4, 5]       # distinct unsigned 64-bit integers
    datasets:
      - path: data/haberman.csv  # relative to the plan file
        label: survival          # column name or zero-based index
        name: haberman           # optional, defaults to the file stem
        positive: minority       # optional; "minority" or a label value
    methods:
      - {name: raw, method: none}
      - {name: smote, method: smote, k: 5}
      - {name: kwsmote, method: kwsmote, k: 5, c: 3, tau: 0.01}
    classifiers:
      - {name: knn, kind: knn, k_votes: 5}
      - {name: logistic, kind: logistic, epochs: 500, learning_rate: 0.1}

Method entries accept ``k``, ``c``, ``tau``, ``sigma``, ``sigma_normal`` and
``max_attempt_factor``. Classifier entries accept ``k_votes`` and
``standardize`` (knn) or ``epochs`` and ``learning_rate`` (logistic).
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .classifiers import knn_fit_predict, logistic_fit, logistic_predict
from .dataset import LabeledDataset, SplitSpec, class_summary, load_csv, stratified_split
from .metrics import EvalReport, confusion, f1_score, g_mean, roc_auc
from .samplers import SamplerConfig, oversample

METHOD_ALIASES = {
    "none": None,
    "raw": None,
    "smote": "smote",
    "kwsmote": "kwsmote",
    "normal": "normal_center",
    "normal_center": "normal_center",
    "snocc": "snocc",
}


class PlanError(ValueError):
    pass


@dataclass(frozen=True)
class MethodSpec:
    name: str
    config: SamplerConfig | None  # None means no resampling

    @classmethod
    def build(cls, method: str, name: str | None = None, k: int = 5, c: int = 3,
              tau: float = 0.0, sigma: float | None = None, sigma_normal: float = 0.5,
              max_attempt_factor: int = 100) -> "MethodSpec":
        if method not in METHOD_ALIASES:
            raise PlanError(f"unknown method {method!r}; expected one of {sorted(METHOD_ALIASES)}")
        resolved = METHOD_ALIASES[method]
        if resolved is None:
            return cls(name or "raw", None)
        cfg = SamplerConfig(
            method=resolved,
            k_neighbors=int(k),
            convex_points=int(c) if resolved in ("kwsmote", "snocc") else min(int(c), int(k)),
            threshold=float(tau),
            sigma=None if sigma is None else float(sigma),
            sigma_normal=float(sigma_normal),
            max_attempt_factor=int(max_attempt_factor),
        )
        return cls(name or method, cfg)


@dataclass(frozen=True)
class ClassifierSpec:
    name: str
    kind: str = "knn"
    k_votes: int = 5
    standardize: bool = False
    epochs: int = 500
    learning_rate: float = 0.1

    def __post_init__(self):
        if self.kind not in ("knn", "logistic"):
            raise PlanError(f"unknown classifier kind {self.kind!r}; expected knn or logistic")


@dataclass(frozen=True)
class DatasetSpec:
    path: Path
    label: str | int
    name: str
    positive: object = "minority"


@dataclass(frozen=True)
class BenchmarkPlan:
    datasets: list[DatasetSpec]
    methods: list[MethodSpec]
    classifiers: list[ClassifierSpec]
    seeds: list[int]
    train_fraction: float = 0.7

    def __post_init__(self):
        for what in ("datasets", "methods", "classifiers", "seeds"):
            if not getattr(self, what):
                raise PlanError(f"plan has no {what}")
        if len(set(self.seeds)) != len(self.seeds):
            raise PlanError("plan seeds must be distinct")
        for s in self.seeds:
            if not (isinstance(s, int) and 0 <= s < 2**64):
                raise PlanError(f"seed {s!r} is not an unsigned 64-bit integer")
        SplitSpec(self.train_fraction, 0)
        for what in ("methods", "classifiers", "datasets"):
            names = [x.name for x in getattr(self, what)]
            if len(set(names)) != len(names):
                raise PlanError(f"{what} names must be unique, got {names}")


def _pop_known(entry: dict, keys: set, where: str) -> None:
    unknown = set(entry) - keys
    if unknown:
        raise PlanError(f"{where}: unknown keys {sorted(unknown)}")


def load_plan(path) -> BenchmarkPlan:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise PlanError(f"cannot read plan {path}: {exc}") from None
    except yaml.YAMLError as exc:
        raise PlanError(f"invalid plan {path}: {exc}") from None
    if not isinstance(doc, dict):
        raise PlanError("plan must be a mapping")
    _pop_known(doc, {"datasets", "methods", "classifiers", "seeds", "train_fraction"}, "plan")
    base = path.parent

    datasets = []
    for d in doc.get("datasets") or []:
        _pop_known(d, {"path", "label", "name", "positive"}, "dataset")
        if "path" not in d or "label" not in d:
            raise PlanError("each dataset needs 'path' and 'label'")
        p = Path(d["path"])
        p = p if p.is_absolute() else base / p
        datasets.append(DatasetSpec(p, d["label"], str(d.get("name", p.stem)),
                                    d.get("positive", "minority")))

    methods = []
    for m in doc.get("methods") or []:
        m = dict(m)
        _pop_known(m, {"name", "method", "k", "c", "tau", "sigma", "sigma_normal",
                       "max_attempt_factor"}, "method")
        if "method" not in m:
            raise PlanError("each method needs 'method'")
        methods.append(MethodSpec.build(**m))

    classifiers = []
    for c in doc.get("classifiers") or []:
        c = dict(c)
        _pop_known(c, {"name", "kind", "k_votes", "standardize", "epochs", "learning_rate"},
                   "classifier")
        c.setdefault("kind", c.get("name", "knn"))
        c.setdefault("name", c["kind"])
        classifiers.append(ClassifierSpec(**c))

    return BenchmarkPlan(
        datasets=datasets,
        methods=methods,
        classifiers=classifiers,
        seeds=list(doc.get("seeds") or []),
        train_fraction=float(doc.get("train_fraction", 0.7)),
    )


def coerce_label(ds: LabeledDataset, value):
    """Map a label given as text (CLI, YAML) onto the dataset's label values."""
    for cls in ds.classes:
        if cls == value or str(cls) == str(value):
            return cls
    raise ValueError(f"label {value!r} not among dataset classes {list(ds.classes)}")


def positive_label(ds: LabeledDataset, policy="minority"):
    if policy in (None, "minority"):
        return class_summary(ds).minority_label
    return coerce_label(ds, policy)


def fit_and_score(train: LabeledDataset, test: LabeledDataset, clf: ClassifierSpec, positive):
    if clf.kind == "knn":
        return knn_fit_predict(train, test.features, clf.k_votes, positive, clf.standardize)
    model = logistic_fit(train, clf.epochs, clf.learning_rate, positive=positive)
    return logistic_predict(model, test.features)


def score_predictions(test: LabeledDataset, pred, scores, positive) -> dict:
    cm = confusion(test.labels, pred, positive)
    return {
        "f1": f1_score(cm),
        "g_mean": g_mean(cm),
        "auc": roc_auc(test.labels, scores, positive),
        "confusion": cm,
    }


def evaluate(train: LabeledDataset, test: LabeledDataset, method: MethodSpec,
             clf: ClassifierSpec, positive, seed: int | None, dataset_name: str) -> tuple[EvalReport, int]:
    """Resample `train` only, fit, and score on the untouched `test`.

    Returns the report and the sampler's skipped-candidate count.
    """
    skipped = 0
    if method.config is not None:
        rng = np.random.default_rng(seed)
        train, batch = oversample(train, method.config, rng)
        skipped = batch.skipped_count
    pred, scores = fit_and_score(train, test, clf, positive)
    s = score_predictions(test, pred, scores, positive)
    return EvalReport(dataset_name, method.name, clf.name, seed, s["f1"], s["g_mean"],
                      s["auc"], s["confusion"]), skipped


@dataclass
class _Run:
    seed: int
    ok: bool
    values: dict = field(default_factory=dict)
    error: str | None = None

    def as_dict(self) -> dict:
        out = {"seed": self.seed, "status": "ok" if self.ok else "failed"}
        if self.ok:
            out.update(self.values)
        else:
            out["error"] = self.error
        return out


def run_plan(plan: BenchmarkPlan) -> dict:
    """Evaluate every (dataset, method, classifier, seed) combination.

    A failing combination is recorded with its error message and does not
    stop the run. Output order follows the plan.
    """
    runs: dict[tuple[str, str, str], list[_Run]] = {}
    for d in plan.datasets:
        try:
            ds = load_csv(d.path, d.label)
            positive = positive_label(ds, d.positive)
            load_error = None
        except Exception as exc:  # noqa: BLE001 - recorded per cell
            load_error = f"{type(exc).__name__}: {exc}"
        for seed in plan.seeds:
            split_error = load_error
            if split_error is None:
                try:
                    train, test = stratified_split(ds, SplitSpec(plan.train_fraction, seed))
                except Exception as exc:  # noqa: BLE001
                    split_error = f"{type(exc).__name__}: {exc}"
            for m in plan.methods:
                resampled, err, skipped = None, split_error, 0
                if err is None:
                    try:
                        if m.config is None:
                            resampled = train
                        else:
                            resampled, batch = oversample(train, m.config, np.random.default_rng(seed))
                            skipped = batch.skipped_count
                    except Exception as exc:  # noqa: BLE001
                        err = f"{type(exc).__name__}: {exc}"
                for c in plan.classifiers:
                    key = (d.name, m.name, c.name)
                    cell_err = err
                    values = {}
                    if cell_err is None:
                        try:
                            pred, scores = fit_and_score(resampled, test, c, positive)
                            s = score_predictions(test, pred, scores, positive)
                            values = {"f1": s["f1"], "g_mean": s["g_mean"], "auc": s["auc"],
                                      "confusion": s["confusion"].as_dict(),
                                      "skipped_count": skipped}
                        except Exception as exc:  # noqa: BLE001
                            cell_err = f"{type(exc).__name__}: {exc}"
                    runs.setdefault(key, []).append(
                        _Run(seed, cell_err is None, values, cell_err))

    cells = []
    for d in plan.datasets:
        for m in plan.methods:
            for c in plan.classifiers:
                rs = runs[(d.name, m.name, c.name)]
                ok = [r for r in rs if r.ok]
                mean = None
                if ok:
                    mean = {k: math.fsum(r.values[k] for r in ok) / len(ok)
                            for k in ("f1", "g_mean", "auc")}
                cells.append({
                    "dataset": d.name,
                    "method": m.name,
                    "classifier": c.name,
                    "seed_mean": mean,
                    "n_ok": len(ok),
                    "n_failed": len(rs) - len(ok),
                    "per_seed": [r.as_dict() for r in rs],
                })
    return {
        "train_fraction": plan.train_fraction,
        "seeds": list(plan.seeds),
        "datasets": [d.name for d in plan.datasets],
        "methods": [m.name for m in plan.methods],
        "classifiers": [c.name for c in plan.classifiers],
        "cells": cells,
    }


def report_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"


def report_csv(report: dict) -> str:
    """Wide table: one row per (dataset, method), three metric columns per classifier."""
    metrics = ("f1", "g_mean", "auc")
    by_key = {(c["dataset"], c["method"], c["classifier"]): c for c in report["cells"]}
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["dataset", "method"] + [f"{c}_{m}" for c in report["classifiers"] for m in metrics])
    for d in report["datasets"]:
        for m in report["methods"]:
            row = [d, m]
            for c in report["classifiers"]:
                mean = by_key[(d, m, c)]["seed_mean"]
                row += ["" if mean is None else f"{mean[k]:.4f}" for k in metrics]
            w.writerow(row)
    return buf.getvalue()
