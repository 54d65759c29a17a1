"""Domain types and dataset plumbing: frames, samples, splits, folds.

Temperatures follow the sensor contract: every stored pixel lies in
[20, 100] degrees Celsius and is an exact multiple of 0.25. Midpoints
(x.125, x.375, ...) round up. All types are immutable values; the
split/fold operations are pure functions of (data, parameters, seed).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum, IntEnum
from fractions import Fraction

import numpy as np

from .errors import InvalidInputError, StratificationError

GRID_SIZE = 8
NUM_PIXELS = GRID_SIZE * GRID_SIZE
TEMP_MIN_C = 20.0
TEMP_MAX_C = 100.0


class Label(IntEnum):
    NO_PERSON = 0
    PERSON = 1

    def to_text(self) -> str:
        return "person" if self is Label.PERSON else "no_person"

    @classmethod
    def from_text(cls, text: str) -> "Label":
        if text == "person":
            return cls.PERSON
        if text == "no_person":
            return cls.NO_PERSON
        raise InvalidInputError(f"unknown label {text!r}")


class ConditionTag(str, Enum):
    BASELINE = "baseline"
    HOT_ROOM = "hot_room"
    WATER_BOTTLE = "water_bottle"
    DUVET_0 = "duvet_0"
    DUVET_5 = "duvet_5"
    DUVET_10 = "duvet_10"

    @classmethod
    def from_text(cls, text: str) -> "ConditionTag":
        try:
            return cls(text)
        except ValueError:
            raise InvalidInputError(f"unknown condition {text!r}") from None


def _is_quarter(value: float) -> bool:
    return float(value * 4.0).is_integer()


@dataclass(frozen=True)
class ThermalFrame:
    """One 8x8 grid of quantized temperatures, row 0 at the bed-head edge."""

    pixels: tuple[tuple[float, ...], ...]

    def __post_init__(self) -> None:
        if len(self.pixels) != GRID_SIZE or any(len(r) != GRID_SIZE for r in self.pixels):
            raise InvalidInputError("frame must be 8x8")
        for r, row in enumerate(self.pixels):
            for c, v in enumerate(row):
                if not np.isfinite(v):
                    raise InvalidInputError(f"non-finite pixel ({r}, {c})")
                if not (TEMP_MIN_C <= v <= TEMP_MAX_C) or not _is_quarter(v):
                    raise InvalidInputError(
                        f"pixel ({r}, {c}) = {v!r} is not a quarter degree in [20, 100]"
                    )

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "ThermalFrame":
        return cls(tuple(tuple(float(v) for v in row) for row in arr))

    def as_array(self) -> np.ndarray:
        return np.array(self.pixels, dtype=np.float64)


def quantize(raw) -> ThermalFrame:
    """Quantize an 8x8 array of Celsius floats to the sensor's output grid.

    Each pixel is rounded to the nearest quarter degree (midpoints round
    up) and clamped to [20, 100].
    """
    arr = np.asarray(raw, dtype=np.float64)
    if arr.shape != (GRID_SIZE, GRID_SIZE):
        raise InvalidInputError(f"expected an 8x8 array, got shape {arr.shape}")
    bad = ~np.isfinite(arr)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise InvalidInputError(f"non-finite value at pixel ({r}, {c})")
    quarters = np.floor(arr * 4.0 + 0.5) / 4.0
    return ThermalFrame.from_array(np.clip(quarters, TEMP_MIN_C, TEMP_MAX_C))


def flatten(frame: ThermalFrame) -> tuple[float, ...]:
    """Row-major flattening of a frame into the 64-value feature vector."""
    return tuple(v for row in frame.pixels for v in row)


def unflatten(features) -> ThermalFrame:
    vec = tuple(float(v) for v in features)
    if len(vec) != NUM_PIXELS:
        raise InvalidInputError(f"expected 64 values, got {len(vec)}")
    return ThermalFrame(tuple(vec[r * GRID_SIZE:(r + 1) * GRID_SIZE] for r in range(GRID_SIZE)))


@dataclass(frozen=True)
class LabeledSample:
    """A 64-value feature vector with its occupancy label and condition tag.

    Pipeline-produced samples always satisfy the frame invariants; the
    constructor itself only checks shape and finiteness so that synthetic
    feature vectors (toy problems, random test points) can flow through
    the classifiers. Range/quantization is enforced at the quantizer and
    the CSV boundary.
    """

    features: tuple[float, ...]
    label: Label
    condition: ConditionTag = ConditionTag.BASELINE

    def __post_init__(self) -> None:
        if len(self.features) != NUM_PIXELS:
            raise InvalidInputError(f"expected 64 features, got {len(self.features)}")
        if not all(np.isfinite(v) for v in self.features):
            raise InvalidInputError("non-finite feature value")


@dataclass(frozen=True)
class Dataset:
    samples: tuple[LabeledSample, ...]
    name: str = "dataset"

    def __len__(self) -> int:
        return len(self.samples)

    def feature_matrix(self) -> np.ndarray:
        return np.array([s.features for s in self.samples], dtype=np.float64)

    def labels_array(self) -> np.ndarray:
        return np.array([int(s.label) for s in self.samples], dtype=np.int64)

    def class_counts(self) -> dict[Label, int]:
        counts = {Label.NO_PERSON: 0, Label.PERSON: 0}
        for s in self.samples:
            counts[s.label] += 1
        return counts

    def subset(self, indices, name: str | None = None) -> "Dataset":
        return Dataset(
            tuple(self.samples[int(i)] for i in indices),
            name if name is not None else self.name,
        )


@dataclass(frozen=True)
class FoldPlan:
    """Deterministic per-sample fold assignment for cross-validation."""

    num_folds: int
    assignment: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.num_folds < 2:
            raise InvalidInputError("need at least 2 folds")
        for a in self.assignment:
            if not (0 <= a < self.num_folds):
                raise InvalidInputError(f"fold index {a} out of range")


def _round_half_up(x: Fraction) -> int:
    # floor(x + 1/2) in exact arithmetic
    return (2 * x.numerator + x.denominator) // (2 * x.denominator)


def _indices_by_class(ds: Dataset) -> dict[Label, list[int]]:
    by_class: dict[Label, list[int]] = {Label.NO_PERSON: [], Label.PERSON: []}
    for i, s in enumerate(ds.samples):
        by_class[s.label].append(i)
    return by_class


def split_train_test(ds: Dataset, test_fraction: float, seed: int) -> tuple[Dataset, Dataset]:
    """Stratified train/test split, deterministic in the seed.

    Per-class test counts are round(class_count * test_fraction) with
    half-up rounding done in exact arithmetic on the decimal value of
    the fraction. Sample order within each part follows the input order.
    """
    if not (0.0 < test_fraction < 1.0):
        raise InvalidInputError("test_fraction must be strictly between 0 and 1")
    frac = Fraction(str(test_fraction))
    rng = np.random.default_rng(seed)
    test_idx: list[int] = []
    for label, idx in _indices_by_class(ds).items():
        if not idx:
            raise StratificationError(f"class {label.to_text()} has no samples")
        n_test = _round_half_up(Fraction(len(idx)) * frac)
        perm = rng.permutation(len(idx))
        test_idx.extend(idx[p] for p in perm[:n_test])
    chosen = set(test_idx)
    train = ds.subset([i for i in range(len(ds)) if i not in chosen], f"{ds.name}-train")
    test = ds.subset(sorted(chosen), f"{ds.name}-test")
    return train, test


def make_folds(ds: Dataset, k: int, seed: int) -> FoldPlan:
    """Stratified k-fold assignment: per-class fold counts differ by at most 1."""
    if k < 2:
        raise InvalidInputError("k must be at least 2")
    rng = np.random.default_rng(seed)
    assignment = [0] * len(ds)
    for label, idx in _indices_by_class(ds).items():
        if len(idx) < k:
            raise StratificationError(
                f"class {label.to_text()} has {len(idx)} samples, fewer than {k} folds"
            )
        perm = rng.permutation(len(idx))
        for pos, p in enumerate(perm):
            assignment[idx[p]] = pos % k
    return FoldPlan(k, tuple(assignment))
