#!/usr/bin/env python3
"""Cross-validated parameter sweeps on a synthetic baseline dataset.

Generates the main dataset, then runs all three sweep families (SVM
kernels, k-NN grid, NN widths) on shared folds, and writes one report
plus one plot CSV per family into --out-dir.
"""

import argparse
import os
import time
from pathlib import Path

from thermal_sense import __version__
from thermal_sense.core import make_folds
from thermal_sense.evaluate import NnSpec, sweep, sweep_specs
from thermal_sense.classifiers.nn import TrainingParams
from thermal_sense.persist import atomic_write_text, save_dataset, save_report
from thermal_sense.simulate import generate_main


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--n-per-class", type=int, default=240)
    parser.add_argument("--folds", type=int, default=10)
    parser.add_argument("--nn-epochs", type=int, default=200,
                        help="epochs for the width sweep (wide nets train slowly)")
    args = parser.parse_args()

    out_dir = Path(args.out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)

    ds = generate_main(args.n_per_class, args.seed)
    save_dataset(ds, out_dir / "main.csv")
    plan = make_folds(ds, args.folds, args.seed)
    workers = max(1, int(os.environ.get("THERMAL_SENSE_THREADS", "1")))

    for family in ("svm-kernels", "knn-grid", "nn-widths"):
        specs = sweep_specs(family)
        if family == "nn-widths":
            hp = TrainingParams(epochs=args.nn_epochs)
            specs = tuple(NnSpec(s.hidden, hp) for s in specs)
        start = time.perf_counter()
        rows = sweep(ds, plan, family, args.seed, specs=specs, max_workers=workers)
        elapsed = time.perf_counter() - start

        print(f"== {family} ({elapsed:.1f}s)")
        for row in rows:
            print(f"  {row.label:20s} {row.result.accuracy_mean:.4f} "
                  f"+- {row.result.accuracy_std:.4f}")

        report = {
            "tool": "thermal-sense",
            "version": __version__,
            "command": f"scripts/run_sweeps {family}",
            "config": vars(args) | {"family": family},
            "results": {
                "rows": [
                    {
                        "label": row.label,
                        "accuracy_mean": row.result.accuracy_mean,
                        "accuracy_std": row.result.accuracy_std,
                    }
                    for row in rows
                ]
            },
        }
        save_report(report, out_dir / f"sweep_{family}.json")
        lines = ["config,accuracy_mean,accuracy_std"]
        lines += [f"{r.label},{r.result.accuracy_mean!r},{r.result.accuracy_std!r}" for r in rows]
        atomic_write_text(out_dir / f"sweep_{family}.csv", "\n".join(lines) + "\n")


if __name__ == "__main__":
    main()
