#!/usr/bin/env python3
"""Robustness of main-trained classifiers under environmental perturbations.

Trains the three reference configurations (linear SVM, 1-NN, NN with 128
hidden units) on the synthetic main dataset, evaluates them on the
variational dataset as a whole and per condition, and writes one report
and one plot CSV per classifier into --out-dir.
"""

import argparse
from pathlib import Path

from thermal_sense import __version__
from thermal_sense.classifiers.kernels import KernelSpec
from thermal_sense.evaluate import KnnSpec, NnSpec, SvmSpec, evaluate_by_condition
from thermal_sense.persist import atomic_write_text, save_dataset, save_report
from thermal_sense.simulate import generate_main, generate_variational


def metric_cell(value):
    return "" if value is None else repr(value)


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--n-per-class", type=int, default=240)
    parser.add_argument("--n-per-cell", type=int, default=30)
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    main_ds = generate_main(args.n_per_class, args.seed)
    var_ds = generate_variational(args.n_per_cell, args.seed + 5000)
    save_dataset(main_ds, out_dir / "main.csv")
    save_dataset(var_ds, out_dir / "variational.csv")

    classifiers = (
        ("svm_linear", SvmSpec(KernelSpec("linear"))),
        ("knn_1", KnnSpec(1, "uniform")),
        ("nn_128", NnSpec(128)),
    )

    def fmt(value):
        return "  n/a " if value is None else f"{value:.4f}"

    for name, spec in classifiers:
        model = spec.train_model(main_ds, args.seed)
        overall, per = evaluate_by_condition(model, var_ds)
        print(f"== {name}")
        rows = [("overall", overall)] + [(tag.value, rep) for tag, rep in per.items()]
        for row_name, rep in rows:
            print(f"  {row_name:14s} n={rep.counts.total:3d} acc={fmt(rep.accuracy)} "
                  f"sens={fmt(rep.sensitivity)} spec={fmt(rep.specificity)}")

        report = {
            "tool": "thermal-sense",
            "version": __version__,
            "command": f"scripts/run_robustness {name}",
            "config": vars(args) | {"classifier": name},
            "results": {
                row_name: {
                    "n": rep.counts.total,
                    "tp": rep.counts.tp,
                    "fp": rep.counts.fp,
                    "tn": rep.counts.tn,
                    "fn": rep.counts.fn,
                    "accuracy": rep.accuracy,
                    "sensitivity": rep.sensitivity,
                    "specificity": rep.specificity,
                }
                for row_name, rep in rows
            },
        }
        save_report(report, out_dir / f"robustness_{name}.json")
        lines = ["condition,n,accuracy,sensitivity,specificity"]
        lines += [
            f"{row_name},{rep.counts.total},{rep.accuracy!r},"
            f"{metric_cell(rep.sensitivity)},{metric_cell(rep.specificity)}"
            for row_name, rep in rows
        ]
        atomic_write_text(out_dir / f"robustness_{name}.csv", "\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
