"""Confusion counting, metrics, cross-validation harness and sweeps.

PERSON is the positive class: sensitivity = TP/(TP+FN) measures how well
occupied beds are detected, specificity = TN/(TN+FP) how well empty beds
are. Metrics whose denominator is zero are reported as None rather than
0 (single-class subsets occur in per-condition evaluation).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .classifiers.kernels import KernelSpec
from .classifiers.knn import KnnModel, predict_knn_batch, train_knn
from .classifiers.nn import NnModel, TrainingParams, predict_nn_batch, train_nn
from .classifiers.svm import MAX_PAIR_UPDATES, SvmModel, predict_svm_batch, train_svm
from .core import ConditionTag, Dataset, FoldPlan, Label
from .errors import InvalidInputError, StratificationError


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self) -> None:
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise InvalidInputError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn


def confusion(predicted, truth) -> ConfusionCounts:
    if len(predicted) != len(truth):
        raise InvalidInputError("predicted and truth lengths differ")
    if len(predicted) == 0:
        raise InvalidInputError("cannot build confusion counts from zero samples")
    tp = fp = tn = fn = 0
    for p, t in zip(predicted, truth):
        if p == Label.PERSON:
            if t == Label.PERSON:
                tp += 1
            else:
                fp += 1
        else:
            if t == Label.NO_PERSON:
                tn += 1
            else:
                fn += 1
    return ConfusionCounts(tp, fp, tn, fn)


def accuracy(c: ConfusionCounts) -> float:
    if c.total == 0:
        raise InvalidInputError("accuracy undefined for zero samples")
    return (c.tp + c.tn) / c.total


def sensitivity(c: ConfusionCounts) -> float | None:
    return c.tp / (c.tp + c.fn) if (c.tp + c.fn) > 0 else None


def specificity(c: ConfusionCounts) -> float | None:
    return c.tn / (c.tn + c.fp) if (c.tn + c.fp) > 0 else None


@dataclass(frozen=True)
class MetricsReport:
    counts: ConfusionCounts
    accuracy: float
    sensitivity: float | None
    specificity: float | None

    @classmethod
    def from_counts(cls, c: ConfusionCounts) -> "MetricsReport":
        return cls(c, accuracy(c), sensitivity(c), specificity(c))


@dataclass(frozen=True)
class CvResult:
    fold_reports: tuple[MetricsReport, ...]
    accuracy_mean: float
    accuracy_std: float

    @classmethod
    def from_reports(cls, reports) -> "CvResult":
        accs = np.array([r.accuracy for r in reports])
        return cls(tuple(reports), float(accs.mean()), float(accs.std()))


# --- classifier specs -------------------------------------------------

@dataclass(frozen=True)
class KnnSpec:
    k: int = 1
    weighting: str = "uniform"

    def label(self) -> str:
        return f"knn k={self.k} {self.weighting}"

    def train_model(self, train: Dataset, seed: int) -> KnnModel:
        return train_knn(train, self.k, self.weighting)


@dataclass(frozen=True)
class SvmSpec:
    kernel: KernelSpec = KernelSpec("linear")
    c: float = 1.0
    tol: float = 1e-3
    max_iter: int = MAX_PAIR_UPDATES

    def label(self) -> str:
        return f"svm {self.kernel.kind}"

    def train_model(self, train: Dataset, seed: int) -> SvmModel:
        return train_svm(train, self.kernel, self.c, self.tol, self.max_iter)


@dataclass(frozen=True)
class NnSpec:
    hidden: int = 128
    params: TrainingParams = field(default_factory=TrainingParams)

    def label(self) -> str:
        return f"nn h={self.hidden}"

    def train_model(self, train: Dataset, seed: int) -> NnModel:
        return train_nn(train, self.hidden, self.params, seed)


ClassifierSpec = KnnSpec | SvmSpec | NnSpec


def predictor(model):
    """Batch prediction closure (n, 64) -> (n,) int labels for any model kind."""
    if isinstance(model, KnnModel):
        return lambda xs: predict_knn_batch(model, xs)
    if isinstance(model, SvmModel):
        return lambda xs: predict_svm_batch(model, xs)
    if isinstance(model, NnModel):
        return lambda xs: predict_nn_batch(model, xs)
    raise InvalidInputError(f"unknown model type {type(model).__name__}")


def derive_seed(seed: int, index: int) -> int:
    """Stable per-fold / per-cell seed derivation."""
    return int(np.random.SeedSequence((seed, index)).generate_state(1)[0])


@dataclass(frozen=True)
class Trainer:
    """Binds a classifier spec to a base seed for cross-validation."""

    spec: ClassifierSpec
    seed: int = 0

    def fit(self, train: Dataset, fold_index: int):
        model = self.spec.train_model(train, derive_seed(self.seed, fold_index))
        return predictor(model)


def cross_validate(ds: Dataset, plan: FoldPlan, trainer) -> CvResult:
    """Train/evaluate once per fold; deterministic given plan and trainer seed."""
    if len(plan.assignment) != len(ds):
        raise InvalidInputError("fold plan does not match dataset size")
    assignment = np.array(plan.assignment)
    x = ds.feature_matrix()
    y = ds.labels_array()
    reports = []
    for f in range(plan.num_folds):
        test_mask = assignment == f
        train_idx = np.flatnonzero(~test_mask)
        test_idx = np.flatnonzero(test_mask)
        if len(test_idx) == 0:
            raise StratificationError(f"fold {f} is empty")
        train_labels = y[train_idx]
        if len(np.unique(train_labels)) < 2:
            raise StratificationError(f"training portion for fold {f} is missing a class")
        predict = trainer.fit(ds.subset(train_idx, f"{ds.name}-fold{f}-train"), f)
        preds = [Label(int(p)) for p in predict(x[test_idx])]
        truth = [Label(int(t)) for t in y[test_idx]]
        reports.append(MetricsReport.from_counts(confusion(preds, truth)))
    return CvResult.from_reports(reports)


# --- parameter sweeps -------------------------------------------------

SWEEP_FAMILIES = ("svm-kernels", "knn-grid", "nn-widths")


@dataclass(frozen=True)
class SweepRow:
    label: str
    spec: ClassifierSpec
    result: CvResult


def sweep_specs(family: str) -> tuple[ClassifierSpec, ...]:
    if family == "svm-kernels":
        return tuple(SvmSpec(KernelSpec(kind)) for kind in ("linear", "poly", "rbf", "sigmoid"))
    if family == "knn-grid":
        return tuple(KnnSpec(k, w) for k in (1, 3, 5, 7) for w in ("uniform", "distance"))
    if family == "nn-widths":
        return tuple(NnSpec(2 ** i) for i in range(11))
    raise InvalidInputError(f"unknown sweep family {family!r}")


def sweep(ds: Dataset, plan: FoldPlan, family: str, seed: int = 0,
          specs: tuple[ClassifierSpec, ...] | None = None,
          max_workers: int = 1) -> tuple[SweepRow, ...]:
    """One CvResult per configuration, all sharing the same fold plan.

    Cells are independently seeded, so parallel evaluation returns
    exactly the serial result.
    """
    grid = specs if specs is not None else sweep_specs(family)

    def run_cell(item):
        index, spec = item
        result = cross_validate(ds, plan, Trainer(spec, derive_seed(seed, index)))
        return SweepRow(spec.label(), spec, result)

    items = list(enumerate(grid))
    if max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            rows = list(pool.map(run_cell, items))
    else:
        rows = [run_cell(item) for item in items]
    return tuple(rows)


def evaluate_by_condition(model, ds: Dataset) -> tuple[MetricsReport, dict[ConditionTag, MetricsReport]]:
    """Metrics on the full set plus one report per condition present."""
    if len(ds) == 0:
        raise InvalidInputError("dataset is empty")
    predict = predictor(model)
    preds = [Label(int(p)) for p in predict(ds.feature_matrix())]
    truth = [s.label for s in ds.samples]
    overall = MetricsReport.from_counts(confusion(preds, truth))
    by_condition: dict[ConditionTag, MetricsReport] = {}
    for tag in ConditionTag:
        idx = [i for i, s in enumerate(ds.samples) if s.condition is tag]
        if not idx:
            continue
        by_condition[tag] = MetricsReport.from_counts(
            confusion([preds[i] for i in idx], [truth[i] for i in idx]))
    return overall, by_condition
