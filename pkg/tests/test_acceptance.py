"""Exit criteria for the package, one test per criterion.

Each test prints a PASS/FAIL line; the lines are repeated in the pytest
terminal summary under "acceptance criteria".
"""

import math
import time
from fractions import Fraction

import numpy as np
import pytest
import yaml

from conftest import TABLE_I, real_dataset, table1_standin
from kwsmote.benchmark import ClassifierSpec, MethodSpec, evaluate
from kwsmote.classifiers import log_loss, log_loss_grad
from kwsmote.cli import main
from kwsmote.dataset import LabeledDataset, SplitSpec, class_summary, stratified_split, write_csv
from kwsmote.kernel import default_bandwidth
from kwsmote.metrics import ConfusionMatrix, f1_score, g_mean, roc_auc
from kwsmote.samplers import (
    SamplerConfig,
    kwsmote_generate,
    oversample,
    smote_generate,
    snocc_generate,
)

N_DATASETS = 20
PER_DATASET = 500  # 20 x 500 = 10,000 samples per method


def _random_minority_sets():
    r = np.random.default_rng(2024)
    for _ in range(N_DATASETS):
        d = int(r.integers(2, 11))
        n = int(r.integers(20, 80))
        scale = r.uniform(0.1, 10.0, size=d)
        yield r, r.normal(size=(n, d)) * scale + r.normal(size=d) * 5


@pytest.fixture(scope="module")
def convex_suite():
    t0 = time.perf_counter()
    batches = []
    for r, X in _random_minority_sets():
        k = int(r.integers(3, 9))
        c = int(r.integers(1, k + 1))
        cfg = SamplerConfig(method="kwsmote", k_neighbors=k, convex_points=c, threshold=0.0)
        batches.append((X, kwsmote_generate(X, cfg, PER_DATASET, r)))
        batches.append((X, snocc_generate(X, k, c, PER_DATASET, r)))
    return batches, time.perf_counter() - t0


def _max_cited_distance(X, batch):
    seeds = X[batch.seed_indices]
    nbrs = X[batch.neighbor_indices]  # (m, c, d)
    return np.linalg.norm(nbrs - seeds[:, None, :], axis=2).max(axis=1)


def test_c01_convexity(convex_suite, criterion):
    batches, elapsed = convex_suite
    total = {"kwsmote": 0, "snocc": 0}
    violations = 0
    for X, b in batches:
        total[b.method] += len(b)
        nu = b.normalized_weights
        violations += int(np.count_nonzero(np.any(b.weights < 0, axis=1)))
        violations += int(np.count_nonzero(np.abs(nu.sum(axis=1) - 1.0) > 1e-12))
        dist = np.linalg.norm(b.samples - X[b.seed_indices], axis=1)
        violations += int(np.count_nonzero(dist > _max_cited_distance(X, b) + 1e-9))
    ok = violations == 0 and total == {"kwsmote": 10_000, "snocc": 10_000} and elapsed < 10.0
    criterion(1, ok, f"{total['kwsmote']} kwsmote + {total['snocc']} snocc samples, "
                     f"{violations} violations, {elapsed:.2f}s (< 10s)")


def test_c02_self_weight_dominance(convex_suite, criterion):
    batches, _ = convex_suite
    records = violations = 0
    for _, b in batches:
        if b.method != "kwsmote":
            continue
        nu = b.normalized_weights
        records += len(b)
        violations += int(np.count_nonzero(b.weights[:, 0] != 1.0))
        violations += int(np.count_nonzero(nu[:, 0] != nu.max(axis=1)))
    criterion(2, violations == 0 and records == 10_000,
              f"{records} kwsmote provenance records, {violations} violations of w0 = 1 / nu0 = max")


def test_c03_smote_segment(criterion):
    n_samples = violations = 0
    for r, X in _random_minority_sets():
        b = smote_generate(X, int(r.integers(1, 9)), PER_DATASET, r)
        xi = X[b.seed_indices]
        d = X[b.neighbor_indices[:, 0]] - xi
        off = b.samples - xi
        u = np.einsum("ij,ij->i", off, d) / np.einsum("ij,ij->i", d, d)
        resid = np.linalg.norm(off - u[:, None] * d, axis=1)
        violations += int(np.count_nonzero((u < 0) | (u > 1) | (resid > 1e-9)))
        n_samples += len(b)
    criterion(3, violations == 0 and n_samples == 10_000,
              f"{n_samples} smote samples, {violations} off-segment or u outside [0, 1]")


@pytest.mark.parametrize("name,appended", [("blood", 392), ("haberman", 144),
                                           ("breast_cancer", 145), ("diabetes", 232)])
def test_c04_balance_counts(name, appended, criterion):
    real = real_dataset(name)
    source = "real CSV" if real is not None else "synthetic stand-in"
    ds = real if real is not None else table1_standin(name)
    _, n_min, n_maj = TABLE_I[name]
    got = []
    for method in ("kwsmote", "smote", "snocc", "normal_center"):
        out, batch = oversample(ds, SamplerConfig(method=method, threshold=0.0), np.random.default_rng(0))
        s = class_summary(out)
        got.append((len(batch), s.minority_count, s.majority_count))
    ok = all(g == (appended, n_maj, n_maj) for g in got) and class_summary(ds).minority_count == n_min
    criterion(4, ok, f"{name} ({source}): appended {sorted({g[0] for g in got})} "
                     f"(expected {appended}), balanced at {n_maj}/{n_maj}")


def _pair_auc(y, s):
    pos, neg = s[y == 1], s[y == 0]
    wins = Fraction(int(np.sum(pos[:, None] > neg[None, :])))
    wins += Fraction(int(np.sum(pos[:, None] == neg[None, :])), 2)
    return float(wins / (len(pos) * len(neg)))


def _f1_direct(tp, fp, fn):
    p = Fraction(tp, tp + fp) if tp + fp else Fraction(0)
    r = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
    return float(2 * p * r / (p + r)) if p + r else 0.0


def _gmean_direct(tp, fp, tn, fn):
    tpr = Fraction(tp, tp + fn) if tp + fn else Fraction(0)
    tnr = Fraction(tn, tn + fp) if tn + fp else Fraction(0)
    return math.sqrt(tpr * tnr)


def test_c05_metric_oracles(criterion):
    r = np.random.default_rng(5)
    auc_err = 0.0
    for _ in range(200):
        n = int(r.integers(2, 101))
        y = r.integers(0, 2, n)
        y[:2] = [0, 1]
        s = r.random(n)
        ties = r.random(n) < 0.3
        s[ties] = np.round(s[ties], 1)
        auc_err = max(auc_err, abs(roc_auc(y, s, 1) - _pair_auc(y, s)))
    cm_err = 0.0
    for _ in range(200):
        tp, fp, tn, fn = (int(v) for v in r.integers(0, 60, 4))
        cm = ConfusionMatrix(tp, fp, tn, fn)
        cm_err = max(cm_err, abs(f1_score(cm) - _f1_direct(tp, fp, fn)),
                     abs(g_mean(cm) - _gmean_direct(tp, fp, tn, fn)))
    tie_auc = roc_auc(np.array([0, 1, 1, 0, 1, 0]), np.full(6, 0.42), 1)
    ok = auc_err <= 1e-12 and cm_err <= 1e-12 and tie_auc == 0.5
    criterion(5, ok, f"AUC max err {auc_err:.1e}, F1/G-mean max err {cm_err:.1e}, "
                     f"all-ties AUC = {tie_auc}")


def test_c06_gradient_check(criterion):
    r = np.random.default_rng(6)
    h = 1e-5
    worst = 0.0
    for _ in range(50):
        n, d = int(r.integers(3, 40)), int(r.integers(1, 8))
        X = r.normal(size=(n, d))
        y = r.integers(0, 2, n).astype(float)
        w, b = r.normal(size=d), float(r.normal())
        gw, gb = log_loss_grad(w, b, X, y)
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            fd = (log_loss(w + e, b, X, y) - log_loss(w - e, b, X, y)) / (2 * h)
            worst = max(worst, abs(fd - gw[j]))
        fd_b = (log_loss(w, b + h, X, y) - log_loss(w, b - h, X, y)) / (2 * h)
        worst = max(worst, abs(fd_b - gb))
    criterion(6, worst <= 1e-5, f"50 instances, max |analytic - central difference| = {worst:.2e}")


def test_c07_cli_determinism(tmp_path, capsys, criterion):
    src = tmp_path / "blood.csv"
    write_csv(table1_standin("blood"), src)
    plan = tmp_path / "plan.yaml"
    plan.write_text(yaml.safe_dump({
        "seeds": [11, 12],
        "datasets": [{"path": "blood.csv", "label": "label"}],
        "methods": [{"name": "raw", "method": "none"},
                    {"name": "kwsmote", "method": "kwsmote", "k": 5, "c": 3, "tau": 0.01}],
        "classifiers": [{"name": "knn", "kind": "knn"}, {"name": "logistic", "kind": "logistic",
                                                         "epochs": 100}],
    }))
    same = {}
    for cmd in ("resample", "eval", "benchmark"):
        outputs = []
        for i in range(2):
            files = {}
            if cmd == "resample":
                files["csv"] = tmp_path / f"res{i}.csv"
                argv = ["resample", "--input", str(src), "--label", "label", "--method", "kwsmote",
                        "--tau", "0.01", "--seed", "7", "--output", str(files["csv"]),
                        "--emit-synthetic-flag"]
            elif cmd == "eval":
                files["json"] = tmp_path / f"eval{i}.json"
                argv = ["eval", "--input", str(src), "--label", "label", "--method", "snocc",
                        "--classifier", "logistic", "--seed", "7", "--output", str(files["json"])]
            else:
                files["json"] = tmp_path / f"bench{i}.json"
                files["csv"] = tmp_path / f"bench{i}.csv"
                argv = ["benchmark", str(plan), "--json", str(files["json"]), "--csv", str(files["csv"])]
            assert main(argv) == 0
            stdout = capsys.readouterr().out
            outputs.append((stdout, {k: p.read_bytes() for k, p in files.items()}))
        same[cmd] = outputs[0] == outputs[1]
    criterion(7, all(same.values()), "byte-identical reruns: " +
              ", ".join(f"{k}={'yes' if v else 'NO'}" for k, v in same.items()))


def _two_gaussians(seed, sep=1.5):
    r = np.random.default_rng([seed, 600])
    X = np.vstack([r.normal(0.0, 1.0, (500, 2)), r.normal(sep, 1.0, (100, 2))])
    y = np.r_[np.zeros(500, dtype=np.int64), np.ones(100, dtype=np.int64)]
    return LabeledDataset(X, y)


def _mean_gmean(datasets, method, seeds):
    knn = ClassifierSpec("knn", "knn", k_votes=5)
    vals = []
    for seed, ds in zip(seeds, datasets):
        train, test = stratified_split(ds, SplitSpec(0.7, seed))
        rep, _ = evaluate(train, test, method, knn, 1, seed, "two_gaussians")
        vals.append(rep.g_mean)
    return float(np.mean(vals))


def test_c08_directional_benchmark(criterion):
    t0 = time.perf_counter()
    seeds = list(range(20))
    datasets = [_two_gaussians(s) for s in seeds]
    raw = _mean_gmean(datasets, MethodSpec.build("none"), seeds)
    smote = _mean_gmean(datasets, MethodSpec.build("smote", k=5), seeds)
    kws = _mean_gmean(datasets, MethodSpec.build("kwsmote", k=10, c=2, tau=0.01), seeds)
    elapsed = time.perf_counter() - t0
    ok = kws >= raw + 0.02 and kws >= smote - 0.02 and elapsed < 60.0
    criterion(8, ok, f"two-Gaussian 500/100, knn, 20 seeds: G-mean raw {raw:.4f}, "
                     f"smote {smote:.4f}, kwsmote {kws:.4f}; {elapsed:.1f}s (< 60s)")


def test_c08_haberman_real(criterion):
    ds = real_dataset("haberman")
    if ds is None:
        pytest.skip("set KWSMOTE_DATA_DIR with haberman.csv (label in last column) to run")
    seeds = list(range(20))
    positive = class_summary(ds).minority_label
    knn = ClassifierSpec("knn", "knn", k_votes=5)
    means = {}
    for method in (MethodSpec.build("none"), MethodSpec.build("kwsmote", k=10, c=2, tau=0.01)):
        vals = []
        for seed in seeds:
            train, test = stratified_split(ds, SplitSpec(0.7, seed))
            vals.append(evaluate(train, test, method, knn, positive, seed, "haberman")[0].g_mean)
        means[method.name] = float(np.mean(vals))
    criterion(8, means["kwsmote"] >= means["raw"] + 0.01,
              f"haberman (real): G-mean raw {means['raw']:.4f}, kwsmote {means['kwsmote']:.4f}")


def test_c09_threshold(criterion):
    r = np.random.default_rng(9)
    cluster = r.normal(0.0, 0.1, size=(12, 2))
    outlier = np.array([[8.0, 8.0]])
    X = np.vstack([cluster, outlier])
    out_idx = 12
    base = dict(method="kwsmote", k_neighbors=3, convex_points=2, sigma=0.5)
    strict = kwsmote_generate(X, SamplerConfig(threshold=0.5, **base), 60, np.random.default_rng(1))
    loose = kwsmote_generate(X, SamplerConfig(threshold=0.0, **base), 60, np.random.default_rng(1))
    ok = (strict.skipped_count > 0
          and out_idx not in strict.seed_indices
          and out_idx in strict.skipped_seed_indices
          and bool(np.all(strict.weights[:, 1:].max(axis=1) >= 0.5))
          and out_idx in loose.seed_indices
          and loose.skipped_count == 0)
    criterion(9, ok, f"tau=0.5: skipped {strict.skipped_count}, outlier-seeded accepted "
                     f"{int(np.sum(strict.seed_indices == out_idx))}; tau=0: outlier-seeded accepted "
                     f"{int(np.sum(loose.seed_indices == out_idx))}")


def test_c10_bandwidth(criterion):
    sigma = default_bandwidth(np.array([[0.0], [2.0]])).sigma
    err = abs(sigma - math.sqrt(0.5))
    r = np.random.default_rng(10)
    worst = 0.0
    for _ in range(100):
        X = r.normal(size=(int(r.integers(2, 30)), int(r.integers(1, 8))))
        s = float(r.choice([-1, 1]) * 10 ** r.uniform(-3, 3))
        ratio = default_bandwidth(s * X).sigma / (abs(s) * default_bandwidth(X).sigma)
        worst = max(worst, abs(ratio - 1.0))
    criterion(10, err <= 1e-12 and worst <= 1e-12,
              f"sigma([[0],[2]]) error {err:.1e}; scaling homogeneity max rel err {worst:.1e}")
