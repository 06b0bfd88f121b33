"""Command-line entry point.

Commands::

    kwsmote resample  --input data.csv --label Class --method kwsmote --output out.csv
    kwsmote eval      --input data.csv --label Class --method smote --classifier knn
    kwsmote benchmark plan.yaml --json report.json --csv report.csv

Exit status is 0 on success, 1 on a data or runtime error and 2 on a
usage error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .benchmark import (
    ClassifierSpec,
    MethodSpec,
    coerce_label,
    evaluate,
    load_plan,
    positive_label,
    report_csv,
    report_json,
    run_plan,
)
from .dataset import SplitSpec, class_summary, load_csv, stratified_split, write_csv
from .samplers import oversample

CLI_METHODS = ("smote", "kwsmote", "normal", "snocc", "none")


def _uint64(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= v < 2**64:
        raise argparse.ArgumentTypeError("seed must be an unsigned 64-bit integer")
    return v


def _label(text: str):
    return int(text) if text.isdigit() else text


def _add_sampler_args(p: argparse.ArgumentParser, default_method: str) -> None:
    p.add_argument("--method", choices=CLI_METHODS, default=default_method)
    p.add_argument("--k", type=int, default=5, help="nearest neighbors per seed")
    p.add_argument("--c", type=int, default=3, help="neighbors per convex combination")
    p.add_argument("--tau", type=float, default=0.0, help="kwsmote neighbor-weight threshold")
    p.add_argument("--sigma", type=float, default=None,
                   help="kwsmote kernel width (flattened-variance heuristic when absent)")
    p.add_argument("--sigma-normal", type=float, default=0.5,
                   help="spread of the normal_center step multiplier")
    p.add_argument("--max-attempt-factor", type=int, default=100)
    p.add_argument("--seed", type=_uint64, default=0)


def _method_spec(args) -> MethodSpec:
    return MethodSpec.build(args.method, name=args.method, k=args.k, c=args.c, tau=args.tau,
                            sigma=args.sigma, sigma_normal=args.sigma_normal,
                            max_attempt_factor=args.max_attempt_factor)


def _counts_line(tag: str, ds) -> str:
    counts = " ".join(f"{c}={int(np.count_nonzero(ds.labels == c))}" for c in ds.classes)
    return f"{tag}: {counts}"


def cmd_resample(args) -> int:
    ds = load_csv(args.input, args.label)
    spec = _method_spec(args)
    print(_counts_line("before", ds))
    if spec.config is None:
        out, skipped = ds, 0
    else:
        out, batch = oversample(ds, spec.config, np.random.default_rng(args.seed))
        skipped = batch.skipped_count
    if out.n_samples == ds.n_samples:
        print("note: nothing generated (classes already balanced or method 'none')")
    print(_counts_line("after", out))
    print(f"generated: {out.n_samples - ds.n_samples}")
    print(f"skipped_count: {skipped}")
    flag = None
    if args.emit_synthetic_flag:
        flag = np.arange(out.n_samples) >= ds.n_samples
    write_csv(out, args.output, synthetic=flag)
    return 0


def cmd_eval(args) -> int:
    if args.input:
        ds = load_csv(args.input, args.label)
        positive = positive_label(ds, args.positive or "minority")
        train, test = stratified_split(ds, SplitSpec(args.train_fraction, args.seed))
        name = Path(args.input).stem
    else:
        train = load_csv(args.train, args.label)
        test = load_csv(args.test, args.label)
        positive = (coerce_label(train, args.positive) if args.positive
                    else class_summary(train).minority_label)
        name = Path(args.train).stem
    clf = ClassifierSpec(args.classifier, args.classifier, args.k_votes, args.standardize,
                         args.epochs, args.learning_rate)
    report, skipped = evaluate(train, test, _method_spec(args), clf, positive, args.seed, name)
    doc = report.as_dict()
    doc["skipped_count"] = skipped
    text = json.dumps(doc, indent=2) + "\n"
    sys.stdout.write(text)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    return 0


def cmd_benchmark(args) -> int:
    report = run_plan(load_plan(args.plan))
    js = report_json(report)
    if args.json:
        Path(args.json).write_text(js, encoding="utf-8")
    if args.csv:
        Path(args.csv).write_text(report_csv(report), encoding="utf-8")
    if not args.json and not args.csv:
        sys.stdout.write(js)
    failed = sum(c["n_failed"] for c in report["cells"])
    total = sum(c["n_ok"] + c["n_failed"] for c in report["cells"])
    print(f"benchmark: {total - failed}/{total} runs ok", file=sys.stderr)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="kwsmote", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)

    r = sub.add_parser("resample", help="balance a CSV dataset with synthetic minority rows")
    r.add_argument("--input", required=True)
    r.add_argument("--label", required=True, type=_label, help="label column name or index")
    r.add_argument("--output", required=True)
    r.add_argument("--emit-synthetic-flag", action="store_true",
                   help="append a 0/1 'synthetic' column to the output")
    _add_sampler_args(r, "kwsmote")
    r.set_defaults(func=cmd_resample)

    e = sub.add_parser("eval", help="resample a training split, fit a classifier, score the test split")
    src = e.add_mutually_exclusive_group(required=True)
    src.add_argument("--input", help="single CSV, split by --train-fraction")
    src.add_argument("--train", help="training CSV (requires --test)")
    e.add_argument("--test")
    e.add_argument("--label", required=True, type=_label)
    e.add_argument("--positive", default=None, help="positive label (default: minority)")
    e.add_argument("--train-fraction", type=float, default=0.7)
    e.add_argument("--classifier", choices=("knn", "logistic"), default="knn")
    e.add_argument("--k-votes", type=int, default=5)
    e.add_argument("--standardize", action="store_true", help="standardize features for knn")
    e.add_argument("--epochs", type=int, default=500)
    e.add_argument("--learning-rate", type=float, default=0.1)
    e.add_argument("--output", help="also write the JSON report to this path")
    _add_sampler_args(e, "none")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("benchmark", help="run a YAML benchmark plan")
    b.add_argument("plan")
    b.add_argument("--json", help="write the JSON report here")
    b.add_argument("--csv", help="write the summary table here")
    b.set_defaults(func=cmd_benchmark)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "eval" and args.train and not args.test:
        parser.error("--train requires --test")
    try:
        return args.func(args)
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
