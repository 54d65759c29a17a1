"""Bit-exact readers and writers for datasets, fold plans, models, reports.

Datasets are UTF-8 CSV with header `p00,...,p77,label,condition`, LF line
endings, temperatures printed with exactly two decimals (quarter degrees
need no more). Models and fold plans are versioned line-oriented text;
numeric payloads use the shortest round-trip decimal representation, so
a reloaded model reproduces the original's predictions bit for bit.
Reports are canonical JSON (sorted keys, two-space indent).

All writers go through an atomic temp-file + rename.
"""

from __future__ import annotations

import json
import os
import tempfile
from pathlib import Path

import numpy as np

from .classifiers.kernels import KernelSpec
from .classifiers.knn import KnnModel
from .classifiers.nn import NnModel, TrainingParams
from .classifiers.svm import SvmModel
from .core import (
    GRID_SIZE,
    TEMP_MAX_C,
    TEMP_MIN_C,
    ConditionTag,
    Dataset,
    FoldPlan,
    Label,
    LabeledSample,
)
from .errors import DataFormatError, FormatVersionError

DATASET_FORMAT_VERSION = 1
FOLD_PLAN_FORMAT_VERSION = 1
MODEL_FORMAT_VERSION = 1
REPORT_FORMAT_VERSION = 1

CSV_HEADER = ",".join(
    [f"p{r}{c}" for r in range(GRID_SIZE) for c in range(GRID_SIZE)] + ["label", "condition"]
)
_CONDITIONS = {tag.value for tag in ConditionTag}


def atomic_write_text(path, text: str) -> None:
    path = Path(path)
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(value: float) -> str:
    return repr(float(value))


def _floats_line(values) -> str:
    return " ".join(_fmt(v) for v in values)


def _parse_floats(text: str, path, lineno: int) -> np.ndarray:
    try:
        values = np.array([float(tok) for tok in text.split()], dtype=np.float64)
    except ValueError:
        raise DataFormatError(f"{path}:{lineno}: bad numeric payload") from None
    if not np.all(np.isfinite(values)):
        raise DataFormatError(f"{path}:{lineno}: non-finite value in payload")
    return values


# --- datasets ----------------------------------------------------------

def format_temperature(value: float) -> str:
    return f"{value:.2f}"


def dataset_to_csv(ds: Dataset) -> str:
    lines = [CSV_HEADER]
    for i, s in enumerate(ds.samples):
        for j, v in enumerate(s.features):
            if not (TEMP_MIN_C <= v <= TEMP_MAX_C) or not float(v * 4).is_integer():
                raise DataFormatError(
                    f"sample {i} field p{j // GRID_SIZE}{j % GRID_SIZE}: "
                    f"{v!r} is not a quarter degree in [20, 100]"
                )
        fields = [format_temperature(v) for v in s.features]
        fields.append(s.label.to_text())
        fields.append(s.condition.value)
        lines.append(",".join(fields))
    return "\n".join(lines) + "\n"


def save_dataset(ds: Dataset, path) -> None:
    atomic_write_text(path, dataset_to_csv(ds))


def _parse_temperature(tok: str, path, lineno: int, field: str) -> float:
    # Writer emits exactly two decimals; accept nothing looser.
    whole, dot, frac = tok.partition(".")
    if not (whole.isdigit() and dot and len(frac) == 2 and frac.isdigit()):
        raise DataFormatError(f"{path}:{lineno}: field {field}: malformed temperature {tok!r}")
    value = float(tok)
    if not (TEMP_MIN_C <= value <= TEMP_MAX_C) or not (value * 4).is_integer():
        raise DataFormatError(
            f"{path}:{lineno}: field {field}: {tok} is not a quarter degree in [20, 100]"
        )
    return value


def dataset_from_csv(text: str, name: str, path="<memory>") -> Dataset:
    if "\r" in text:
        raise DataFormatError(f"{path}: CR line endings are not accepted")
    if not text.endswith("\n"):
        raise DataFormatError(f"{path}: missing trailing newline")
    lines = text.split("\n")[:-1]
    if not lines or lines[0] != CSV_HEADER:
        raise DataFormatError(f"{path}:1: bad or missing header")
    samples = []
    n_fields = GRID_SIZE * GRID_SIZE + 2
    for lineno, line in enumerate(lines[1:], start=2):
        fields = line.split(",")
        if len(fields) != n_fields:
            raise DataFormatError(
                f"{path}:{lineno}: expected {n_fields} fields, got {len(fields)}"
            )
        features = tuple(
            _parse_temperature(tok, path, lineno, f"p{j // GRID_SIZE}{j % GRID_SIZE}")
            for j, tok in enumerate(fields[:-2])
        )
        label_text = fields[-2]
        if label_text not in ("person", "no_person"):
            raise DataFormatError(f"{path}:{lineno}: field label: unknown label {label_text!r}")
        condition_text = fields[-1]
        if condition_text not in _CONDITIONS:
            raise DataFormatError(
                f"{path}:{lineno}: field condition: unknown condition {condition_text!r}"
            )
        samples.append(LabeledSample(
            features, Label.from_text(label_text), ConditionTag(condition_text)))
    return Dataset(tuple(samples), name)


def load_dataset(path, name: str | None = None) -> Dataset:
    text = Path(path).read_text(encoding="utf-8")
    return dataset_from_csv(text, name if name is not None else Path(path).stem, path)


# --- fold plans ---------------------------------------------------------

def save_fold_plan(plan: FoldPlan, path) -> None:
    text = (
        f"format-version: {FOLD_PLAN_FORMAT_VERSION}\n"
        "artifact: fold-plan\n"
        f"num-folds: {plan.num_folds}\n"
        f"assignment: {' '.join(str(a) for a in plan.assignment)}\n"
    )
    atomic_write_text(path, text)


def _read_header_line(lines: list[str], index: int, key: str, path) -> str:
    if index >= len(lines) or not lines[index].startswith(key + ":"):
        raise DataFormatError(f"{path}:{index + 1}: expected '{key}: ...'")
    return lines[index][len(key) + 1:].strip()


def _check_version(lines: list[str], supported: int, path) -> None:
    raw = _read_header_line(lines, 0, "format-version", path)
    try:
        version = int(raw)
    except ValueError:
        raise DataFormatError(f"{path}:1: bad format version {raw!r}") from None
    if version > supported:
        raise FormatVersionError(
            f"{path}: format-version {version} is newer than supported ({supported})"
        )


def load_fold_plan(path) -> FoldPlan:
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    _check_version(lines, FOLD_PLAN_FORMAT_VERSION, path)
    if _read_header_line(lines, 1, "artifact", path) != "fold-plan":
        raise DataFormatError(f"{path}:2: not a fold-plan file")
    try:
        num_folds = int(_read_header_line(lines, 2, "num-folds", path))
        assignment = tuple(int(tok) for tok in _read_header_line(lines, 3, "assignment", path).split())
    except ValueError:
        raise DataFormatError(f"{path}: bad fold plan payload") from None
    return FoldPlan(num_folds, assignment)


# --- models --------------------------------------------------------------

def save_model(model, path) -> None:
    atomic_write_text(path, model_to_text(model))


def model_to_text(model) -> str:
    if isinstance(model, KnnModel):
        return _knn_to_text(model)
    if isinstance(model, SvmModel):
        return _svm_to_text(model)
    if isinstance(model, NnModel):
        return _nn_to_text(model)
    raise DataFormatError(f"cannot serialize model of type {type(model).__name__}")


def _knn_to_text(model: KnnModel) -> str:
    lines = [
        f"format-version: {MODEL_FORMAT_VERSION}",
        "model-kind: knn",
        f"k: {model.k}",
        f"weighting: {model.weighting}",
        f"n-samples: {len(model.train_y)}",
        f"n-features: {model.train_x.shape[1]}",
    ]
    for label, row in zip(model.train_y, model.train_x):
        lines.append(f"{int(label)} {_floats_line(row)}")
    return "\n".join(lines) + "\n"


def _svm_to_text(model: SvmModel) -> str:
    k = model.kernel
    lines = [
        f"format-version: {MODEL_FORMAT_VERSION}",
        "model-kind: svm",
        f"kernel: {k.kind}",
        f"degree: {k.degree}",
        f"gamma: {_fmt(k.gamma) if k.gamma is not None else 'none'}",
        f"coef0: {_fmt(k.coef0)}",
        f"c: {_fmt(model.c)}",
        f"bias: {_fmt(model.bias)}",
        f"n-support: {len(model.support_alpha)}",
        f"n-features: {model.support_x.shape[1]}",
        f"feature-mean: {_floats_line(model.feature_mean)}",
        f"feature-scale: {_floats_line(model.feature_scale)}",
    ]
    for alpha, y, row in zip(model.support_alpha, model.support_y, model.support_x):
        lines.append(f"{_fmt(alpha)} {_fmt(y)} {_floats_line(row)}")
    return "\n".join(lines) + "\n"


def _nn_to_text(model: NnModel) -> str:
    lines = [
        f"format-version: {MODEL_FORMAT_VERSION}",
        "model-kind: nn",
        f"hidden: {model.hidden}",
        f"learning-rate: {_fmt(model.params.learning_rate)}",
        f"batch-size: {model.params.batch_size}",
        f"epochs: {model.params.epochs}",
        f"seed: {model.seed}",
        f"n-features: {model.w1.shape[0]}",
        f"feature-mean: {_floats_line(model.feature_mean)}",
        f"feature-scale: {_floats_line(model.feature_scale)}",
        f"b1: {_floats_line(model.b1)}",
        f"b2: {_floats_line(model.b2)}",
    ]
    for row in model.w1:
        lines.append(f"w1: {_floats_line(row)}")
    for row in model.w2:
        lines.append(f"w2: {_floats_line(row)}")
    return "\n".join(lines) + "\n"


def load_model(path):
    lines = Path(path).read_text(encoding="utf-8").splitlines()
    _check_version(lines, MODEL_FORMAT_VERSION, path)
    kind = _read_header_line(lines, 1, "model-kind", path)
    if kind == "knn":
        return _knn_from_lines(lines, path)
    if kind == "svm":
        return _svm_from_lines(lines, path)
    if kind == "nn":
        return _nn_from_lines(lines, path)
    raise DataFormatError(f"{path}:2: unknown model kind {kind!r}")


def _knn_from_lines(lines: list[str], path) -> KnnModel:
    try:
        k = int(_read_header_line(lines, 2, "k", path))
        weighting = _read_header_line(lines, 3, "weighting", path)
        n_samples = int(_read_header_line(lines, 4, "n-samples", path))
        n_features = int(_read_header_line(lines, 5, "n-features", path))
    except ValueError:
        raise DataFormatError(f"{path}: bad knn header") from None
    payload = lines[6:]
    if len(payload) != n_samples:
        raise DataFormatError(f"{path}: expected {n_samples} sample lines, got {len(payload)}")
    labels = np.empty(n_samples, dtype=np.int64)
    x = np.empty((n_samples, n_features), dtype=np.float64)
    for row_index, line in enumerate(payload):
        values = _parse_floats(line, path, 7 + row_index)
        if len(values) != n_features + 1:
            raise DataFormatError(f"{path}:{7 + row_index}: expected {n_features + 1} values")
        labels[row_index] = int(values[0])
        x[row_index] = values[1:]
    return KnnModel(x, labels, k, weighting)


def _svm_from_lines(lines: list[str], path) -> SvmModel:
    try:
        kind = _read_header_line(lines, 2, "kernel", path)
        degree = int(_read_header_line(lines, 3, "degree", path))
        gamma_raw = _read_header_line(lines, 4, "gamma", path)
        gamma = None if gamma_raw == "none" else float(gamma_raw)
        coef0 = float(_read_header_line(lines, 5, "coef0", path))
        c = float(_read_header_line(lines, 6, "c", path))
        bias = float(_read_header_line(lines, 7, "bias", path))
        n_support = int(_read_header_line(lines, 8, "n-support", path))
        n_features = int(_read_header_line(lines, 9, "n-features", path))
    except ValueError:
        raise DataFormatError(f"{path}: bad svm header") from None
    mean = _parse_floats(_read_header_line(lines, 10, "feature-mean", path), path, 11)
    scale = _parse_floats(_read_header_line(lines, 11, "feature-scale", path), path, 12)
    if len(mean) != n_features or len(scale) != n_features:
        raise DataFormatError(f"{path}: feature constants length mismatch")
    payload = lines[12:]
    if len(payload) != n_support:
        raise DataFormatError(f"{path}: expected {n_support} support lines, got {len(payload)}")
    alpha = np.empty(n_support)
    y = np.empty(n_support)
    x = np.empty((n_support, n_features))
    for row_index, line in enumerate(payload):
        values = _parse_floats(line, path, 13 + row_index)
        if len(values) != n_features + 2:
            raise DataFormatError(f"{path}:{13 + row_index}: expected {n_features + 2} values")
        alpha[row_index], y[row_index] = values[0], values[1]
        x[row_index] = values[2:]
    return SvmModel(KernelSpec(kind, degree, gamma, coef0), c, mean, scale, x, alpha, y, bias)


def _nn_from_lines(lines: list[str], path) -> NnModel:
    try:
        hidden = int(_read_header_line(lines, 2, "hidden", path))
        lr = float(_read_header_line(lines, 3, "learning-rate", path))
        batch = int(_read_header_line(lines, 4, "batch-size", path))
        epochs = int(_read_header_line(lines, 5, "epochs", path))
        seed = int(_read_header_line(lines, 6, "seed", path))
        n_features = int(_read_header_line(lines, 7, "n-features", path))
    except ValueError:
        raise DataFormatError(f"{path}: bad nn header") from None
    mean = _parse_floats(_read_header_line(lines, 8, "feature-mean", path), path, 9)
    scale = _parse_floats(_read_header_line(lines, 9, "feature-scale", path), path, 10)
    b1 = _parse_floats(_read_header_line(lines, 10, "b1", path), path, 11)
    b2 = _parse_floats(_read_header_line(lines, 11, "b2", path), path, 12)
    expected = n_features + hidden
    payload = lines[12:]
    if len(payload) != expected:
        raise DataFormatError(f"{path}: expected {expected} weight lines, got {len(payload)}")
    w1 = np.empty((n_features, hidden))
    w2 = np.empty((hidden, 2))
    for row_index in range(n_features):
        w1[row_index] = _parse_floats(
            _read_header_line(payload, row_index, "w1", path), path, 13 + row_index)
    for row_index in range(hidden):
        w2[row_index] = _parse_floats(
            _read_header_line(payload, n_features + row_index, "w2", path),
            path, 13 + n_features + row_index)
    if len(b1) != hidden or len(b2) != 2 or w1.shape != (n_features, hidden):
        raise DataFormatError(f"{path}: inconsistent nn payload shapes")
    return NnModel(hidden, w1, b1, w2, b2, mean, scale,
                   TrainingParams(lr, batch, epochs), seed)


# --- reports ---------------------------------------------------------------

def report_to_text(report: dict) -> str:
    payload = dict(report)
    payload.setdefault("format-version", REPORT_FORMAT_VERSION)
    return json.dumps(payload, indent=2, sort_keys=True) + "\n"


def save_report(report: dict, path) -> None:
    atomic_write_text(path, report_to_text(report))


def load_report(path) -> dict:
    try:
        payload = json.loads(Path(path).read_text(encoding="utf-8"))
    except json.JSONDecodeError as exc:
        raise DataFormatError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(payload, dict):
        raise DataFormatError(f"{path}: report must be a JSON object")
    version = payload.get("format-version")
    if not isinstance(version, int):
        raise DataFormatError(f"{path}: missing integer format-version")
    if version > REPORT_FORMAT_VERSION:
        raise FormatVersionError(
            f"{path}: format-version {version} is newer than supported ({REPORT_FORMAT_VERSION})"
        )
    return payload
