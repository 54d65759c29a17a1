"""Command-line entry point for reproducible simulation/training/eval runs.

Exit codes: 0 success, 1 usage error, 2 data or format error, 3 training
failure. Every report embeds the tool version and the fully resolved
configuration, and all outputs are written atomically, so identical
command lines (including seeds) produce byte-identical files.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from . import __version__
from .classifiers.kernels import KERNEL_KINDS, KernelSpec
from .classifiers.nn import TrainingParams
from .core import Label, make_folds, split_train_test
from .errors import ThermalSenseError, TrainingError
from .evaluate import (
    CvResult,
    KnnSpec,
    MetricsReport,
    NnSpec,
    SWEEP_FAMILIES,
    SvmSpec,
    Trainer,
    cross_validate,
    evaluate_by_condition,
    predictor,
    sweep,
)
from .monitor import MonitorConfig, initial_state, step
from .persist import (
    atomic_write_text,
    load_dataset,
    load_model,
    save_dataset,
    save_model,
    save_report,
)
from .simulate import DEFAULT_SIM_PARAMS, generate_main, generate_variational, load_sim_params

TOOL_NAME = "thermal-sense"
THREADS_ENV = "THERMAL_SENSE_THREADS"


def _max_workers() -> int:
    raw = os.environ.get(THREADS_ENV, "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _config_dict(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k != "func"}


def _base_report(args: argparse.Namespace) -> dict:
    return {
        "tool": TOOL_NAME,
        "version": __version__,
        "command": args.command,
        "config": _config_dict(args),
    }


def _metrics_dict(report: MetricsReport) -> dict:
    return {
        "tp": report.counts.tp,
        "fp": report.counts.fp,
        "tn": report.counts.tn,
        "fn": report.counts.fn,
        "accuracy": report.accuracy,
        "sensitivity": report.sensitivity,
        "specificity": report.specificity,
    }


def _cv_dict(result: CvResult) -> dict:
    return {
        "accuracy_mean": result.accuracy_mean,
        "accuracy_std": result.accuracy_std,
        "folds": [_metrics_dict(r) for r in result.fold_reports],
    }


def _spec_from_args(args: argparse.Namespace):
    if args.model == "knn":
        return KnnSpec(args.k, args.weighting)
    if args.model == "svm":
        kernel = KernelSpec(args.kernel, args.degree, args.gamma, args.coef0)
        return SvmSpec(kernel, args.c, args.tol, args.max_iter)
    return NnSpec(args.hidden, TrainingParams(args.lr, args.batch_size, args.epochs))


def _add_model_flags(sp: argparse.ArgumentParser) -> None:
    sp.add_argument("--model", required=True, choices=("knn", "svm", "nn"))
    sp.add_argument("--k", type=int, default=1, help="k-NN neighbor count")
    sp.add_argument("--weighting", choices=("uniform", "distance"), default="uniform")
    sp.add_argument("--kernel", choices=KERNEL_KINDS, default="linear")
    sp.add_argument("--c", type=float, default=1.0, help="SVM regularization")
    sp.add_argument("--gamma", type=float, default=None)
    sp.add_argument("--degree", type=int, default=3)
    sp.add_argument("--coef0", type=float, default=0.0)
    sp.add_argument("--tol", type=float, default=1e-3)
    sp.add_argument("--max-iter", type=int, default=1_000_000, help="SMO pair-update cap")
    sp.add_argument("--hidden", type=int, default=128, help="NN hidden width")
    sp.add_argument("--lr", type=float, default=0.01)
    sp.add_argument("--batch-size", type=int, default=32)
    sp.add_argument("--epochs", type=int, default=500)


def _load_params(args: argparse.Namespace):
    return load_sim_params(args.params) if args.params else DEFAULT_SIM_PARAMS


def cmd_simulate(args: argparse.Namespace) -> int:
    params = _load_params(args)
    if args.variant == "main":
        ds = generate_main(args.n_per_class, args.seed, params)
    else:
        ds = generate_variational(args.n_per_cell, args.seed, params)
    save_dataset(ds, args.out)
    print(f"wrote {len(ds)} samples to {args.out}")
    return 0


def cmd_split(args: argparse.Namespace) -> int:
    ds = load_dataset(args.data)
    train, test = split_train_test(ds, args.test_fraction, args.seed)
    save_dataset(train, args.train_out)
    save_dataset(test, args.test_out)
    print(f"wrote {len(train)} train samples to {args.train_out}")
    print(f"wrote {len(test)} test samples to {args.test_out}")
    return 0


def cmd_cv(args: argparse.Namespace) -> int:
    ds = load_dataset(args.data)
    plan = make_folds(ds, args.folds, args.seed)
    spec = _spec_from_args(args)
    result = cross_validate(ds, plan, Trainer(spec, args.seed))
    print(f"{spec.label()}: accuracy mean={result.accuracy_mean:.4f} std={result.accuracy_std:.4f}")
    if args.report:
        report = _base_report(args)
        report["results"] = _cv_dict(result)
        save_report(report, args.report)
        print(f"wrote report to {args.report}")
    return 0


def cmd_sweep(args: argparse.Namespace) -> int:
    ds = load_dataset(args.data)
    # Fold plan always regenerated from (data, seed): every row shares folds.
    plan = make_folds(ds, args.folds, args.seed)
    rows = sweep(ds, plan, args.family, args.seed, max_workers=_max_workers())
    for row in rows:
        print(f"{row.label}: accuracy mean={row.result.accuracy_mean:.4f} "
              f"std={row.result.accuracy_std:.4f}")
    if args.report:
        report = _base_report(args)
        report["results"] = {
            "rows": [
                {"label": row.label, "cv": _cv_dict(row.result)}
                for row in rows
            ]
        }
        save_report(report, args.report)
    if args.emit_plot_data:
        lines = ["config,accuracy_mean,accuracy_std"]
        lines += [
            f"{row.label},{row.result.accuracy_mean!r},{row.result.accuracy_std!r}"
            for row in rows
        ]
        atomic_write_text(args.emit_plot_data, "\n".join(lines) + "\n")
        print(f"wrote plot data to {args.emit_plot_data}")
    if args.report:
        print(f"wrote report to {args.report}")
    return 0


def cmd_train(args: argparse.Namespace) -> int:
    ds = load_dataset(args.data)
    spec = _spec_from_args(args)
    model = spec.train_model(ds, args.seed)
    save_model(model, args.out)
    print(f"trained {spec.label()} on {len(ds)} samples; wrote model to {args.out}")
    return 0


def _metric_csv_value(value: float | None) -> str:
    return "" if value is None else repr(value)


def cmd_eval(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    ds = load_dataset(args.data)
    overall, by_condition = evaluate_by_condition(model, ds)
    if args.report:
        report = _base_report(args)
        results: dict = {"overall": _metrics_dict(overall)}
        if args.by_condition:
            results["by_condition"] = {
                tag.value: _metrics_dict(rep) for tag, rep in by_condition.items()
            }
        report["results"] = results
        save_report(report, args.report)

    def fmt(value):
        return "n/a" if value is None else f"{value:.4f}"

    print(f"overall: n={overall.counts.total} accuracy={fmt(overall.accuracy)} "
          f"sensitivity={fmt(overall.sensitivity)} specificity={fmt(overall.specificity)}")
    if args.by_condition:
        for tag, rep in by_condition.items():
            print(f"{tag.value}: n={rep.counts.total} accuracy={fmt(rep.accuracy)} "
                  f"sensitivity={fmt(rep.sensitivity)} specificity={fmt(rep.specificity)}")
    if args.emit_plot_data:
        lines = ["condition,n,accuracy,sensitivity,specificity"]
        rows = [("overall", overall)] + [
            (tag.value, rep) for tag, rep in by_condition.items()
        ]
        for name, rep in rows:
            lines.append(
                f"{name},{rep.counts.total},{rep.accuracy!r},"
                f"{_metric_csv_value(rep.sensitivity)},{_metric_csv_value(rep.specificity)}"
            )
        atomic_write_text(args.emit_plot_data, "\n".join(lines) + "\n")
        print(f"wrote plot data to {args.emit_plot_data}")
    if args.report:
        print(f"wrote report to {args.report}")
    return 0


def cmd_predict(args: argparse.Namespace) -> int:
    model = load_model(args.model)
    ds = load_dataset(args.data)
    labels = predictor(model)(ds.feature_matrix())
    lines = ["index,label"]
    lines += [f"{i},{Label(int(v)).to_text()}" for i, v in enumerate(labels)]
    atomic_write_text(args.out, "\n".join(lines) + "\n")
    print(f"wrote {len(labels)} predictions to {args.out}")
    return 0


def _read_trace(path) -> list[tuple[float, Label]]:
    from .errors import DataFormatError

    text = Path(path).read_text(encoding="utf-8")
    lines = text.splitlines()
    if not lines or lines[0] != "timestamp,label":
        raise DataFormatError(f"{path}:1: expected header 'timestamp,label'")
    trace = []
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != 2:
            raise DataFormatError(f"{path}:{lineno}: expected 2 fields")
        try:
            ts = float(fields[0])
        except ValueError:
            raise DataFormatError(f"{path}:{lineno}: bad timestamp {fields[0]!r}") from None
        trace.append((ts, Label.from_text(fields[1])))
    return trace


def cmd_monitor(args: argparse.Namespace) -> int:
    cfg = MonitorConfig(
        debounce_frames=args.debounce_frames,
        long_absence_s=args.long_absence_min * 60.0,
        window_s=args.window_hours * 3600.0,
        max_exits=args.max_exits,
    )
    trace = _read_trace(args.input)
    state = initial_state()
    out_lines = []
    for ts, label in trace:
        state, events = step(state, label, ts, cfg)
        out_lines += [f"{ts!r},{e.kind.value},{args.bed_id}" for e in events]
    atomic_write_text(args.out, "\n".join(out_lines) + ("\n" if out_lines else ""))
    print(f"replayed {len(trace)} frames, {len(out_lines)} events -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog=TOOL_NAME,
        description="Bed-occupancy classification toolkit for 8x8 thermal frames",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("simulate", help="generate a synthetic dataset")
    sp.add_argument("variant", choices=("main", "variational"))
    sp.add_argument("--n-per-class", type=int, default=240)
    sp.add_argument("--n-per-cell", type=int, default=30)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--out", required=True)
    sp.add_argument("--params", default=None, help="key=value simulator parameter file")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("split", help="stratified train/test split")
    sp.add_argument("--data", required=True)
    sp.add_argument("--test-fraction", type=float, default=0.2)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--train-out", required=True)
    sp.add_argument("--test-out", required=True)
    sp.set_defaults(func=cmd_split)

    sp = sub.add_parser("cv", help="stratified k-fold cross-validation")
    sp.add_argument("--data", required=True)
    sp.add_argument("--folds", type=int, default=10)
    sp.add_argument("--seed", type=int, required=True)
    _add_model_flags(sp)
    sp.add_argument("--report", default=None, help="machine-readable report file")
    sp.set_defaults(func=cmd_cv)

    sp = sub.add_parser("sweep", help="cross-validate a family of configurations")
    sp.add_argument("--data", required=True)
    sp.add_argument("--folds", type=int, default=10)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--family", required=True, choices=SWEEP_FAMILIES)
    sp.add_argument("--report", default=None, help="machine-readable report file")
    sp.add_argument("--emit-plot-data", default=None, help="also write a per-row CSV")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("train", help="train one model and save it")
    sp.add_argument("--data", required=True)
    sp.add_argument("--seed", type=int, required=True)
    _add_model_flags(sp)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("eval", help="evaluate a saved model on a dataset")
    sp.add_argument("--model", required=True, help="model file")
    sp.add_argument("--data", required=True)
    sp.add_argument("--by-condition", action="store_true")
    sp.add_argument("--report", default=None, help="machine-readable report file")
    sp.add_argument("--emit-plot-data", default=None, help="also write a per-condition CSV")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("predict", help="predict labels for a dataset")
    sp.add_argument("--model", required=True, help="model file")
    sp.add_argument("--data", required=True)
    sp.add_argument("--out", required=True)
    sp.set_defaults(func=cmd_predict)

    sp = sub.add_parser("monitor", help="replay a label trace through the bed-exit monitor")
    sp.add_argument("--input", required=True, help="CSV of timestamp,label")
    sp.add_argument("--out", required=True, help="event records: timestamp,event_kind,bed_id")
    sp.add_argument("--bed-id", default="bed0")
    sp.add_argument("--debounce-frames", type=int, default=3)
    sp.add_argument("--long-absence-min", type=float, default=15.0)
    sp.add_argument("--window-hours", type=float, default=8.0)
    sp.add_argument("--max-exits", type=int, default=5)
    sp.set_defaults(func=cmd_monitor)

    return parser


def run(argv) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except TrainingError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ThermalSenseError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
