import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from thermal_sense.core import (
    FoldPlan,
    Label,
    LabeledSample,
    ThermalFrame,
    flatten,
    make_folds,
    quantize,
    split_train_test,
    unflatten,
)
from thermal_sense.errors import InvalidInputError, StratificationError

from conftest import balanced_dataset, dataset_from_arrays

quarter_temps = st.integers(80, 400).map(lambda q: q / 4.0)
raw_pixels = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def frame_of(value):
    return np.full((8, 8), value)


class TestQuantize:
    @pytest.mark.parametrize(
        "raw,expected",
        [
            (22.10, 22.00),
            (19.40, 20.00),   # clamped to the sensor floor
            (36.80, 36.75),
            (22.125, 22.25),  # midpoint rounds up
            (99.875, 100.00),
            (150.0, 100.00),
            (20.0, 20.0),
        ],
    )
    def test_examples(self, raw, expected):
        assert quantize(frame_of(raw)).pixels[0][0] == expected

    def test_non_finite_names_pixel(self):
        arr = frame_of(25.0)
        arr[3, 5] = np.nan
        with pytest.raises(InvalidInputError, match=r"\(3, 5\)"):
            quantize(arr)

    def test_wrong_shape(self):
        with pytest.raises(InvalidInputError):
            quantize(np.zeros((4, 4)))

    @given(st.lists(raw_pixels, min_size=64, max_size=64))
    def test_idempotent_and_in_range(self, values):
        arr = np.array(values).reshape(8, 8)
        once = quantize(arr)
        twice = quantize(once.as_array())
        assert once == twice
        for row in once.pixels:
            for v in row:
                assert 20.0 <= v <= 100.0
                assert float(v * 4).is_integer()


class TestFlatten:
    def test_constant(self):
        f = quantize(frame_of(20.25))
        assert flatten(f) == tuple([20.25] * 64)

    def test_single_hot_pixel(self):
        arr = frame_of(20.0)
        arr[0, 0] = 25.0
        vec = flatten(quantize(arr))
        assert vec[0] == 25.0
        assert set(vec[1:]) == {20.0}

    @given(st.lists(quarter_temps, min_size=64, max_size=64))
    def test_round_trip(self, values):
        frame = unflatten(values)
        assert unflatten(flatten(frame)) == frame

    def test_unflatten_wrong_length(self):
        with pytest.raises(InvalidInputError):
            unflatten([20.0] * 63)


class TestSplit:
    def test_paper_counts(self):
        train, test = split_train_test(balanced_dataset(240), 0.2, 7)
        assert len(test) == 96
        assert test.class_counts()[Label.PERSON] == 48
        assert test.class_counts()[Label.NO_PERSON] == 48
        assert len(train) == 384

    def test_half_fraction_rounds_up(self):
        # round(5 * 0.5) with half-up gives 3 per class -> 6 test samples
        train, test = split_train_test(balanced_dataset(5), 0.5, 1)
        assert len(test) == 6
        assert len(train) == 4

    def test_deterministic(self):
        ds = balanced_dataset(5)
        a = split_train_test(ds, 0.2, 11)
        b = split_train_test(ds, 0.2, 11)
        assert a[0].samples == b[0].samples
        assert a[1].samples == b[1].samples

    def test_disjoint_union(self, rng):
        x = rng.normal(25, 2, (30, 64))
        y = rng.integers(0, 2, 30)
        y[:2] = [0, 1]
        ds = dataset_from_arrays(x, y)
        train, test = split_train_test(ds, 0.3, 5)
        combined = sorted(train.samples + test.samples, key=lambda s: s.features)
        assert combined == sorted(ds.samples, key=lambda s: s.features)

    def test_empty_class_errors(self):
        x = np.full((4, 64), 25.0)
        ds = dataset_from_arrays(x, [1, 1, 1, 1])
        with pytest.raises(StratificationError):
            split_train_test(ds, 0.5, 0)

    def test_bad_fraction(self):
        with pytest.raises(InvalidInputError):
            split_train_test(balanced_dataset(5), 1.0, 0)


class TestFolds:
    def test_paper_counts(self):
        plan = make_folds(balanced_dataset(240), 10, 7)
        for f in range(10):
            idx = [i for i, a in enumerate(plan.assignment) if a == f]
            assert len(idx) == 48

    def test_two_by_two(self):
        plan = make_folds(balanced_dataset(2), 2, 0)
        ds = balanced_dataset(2)
        for f in range(2):
            labels = [ds.samples[i].label for i, a in enumerate(plan.assignment) if a == f]
            assert sorted(labels) == [Label.NO_PERSON, Label.PERSON]

    def test_deterministic(self):
        ds = balanced_dataset(12)
        assert make_folds(ds, 4, 9) == make_folds(ds, 4, 9)

    def test_class_smaller_than_k(self):
        with pytest.raises(StratificationError):
            make_folds(balanced_dataset(3), 4, 0)

    @given(
        n_person=st.integers(3, 25),
        n_no=st.integers(3, 25),
        k=st.integers(2, 3),
        seed=st.integers(0, 10),
    )
    def test_stratified_within_one(self, n_person, n_no, k, seed):
        x = np.full((n_person + n_no, 64), 25.0)
        y = [1] * n_person + [0] * n_no
        ds = dataset_from_arrays(x, y)
        plan = make_folds(ds, k, seed)
        for label in (Label.PERSON, Label.NO_PERSON):
            counts = [
                sum(
                    1
                    for i, a in enumerate(plan.assignment)
                    if a == f and ds.samples[i].label is label
                )
                for f in range(k)
            ]
            assert max(counts) - min(counts) <= 1


class TestTypes:
    def test_frame_rejects_off_grid_values(self):
        with pytest.raises(InvalidInputError):
            ThermalFrame(tuple(tuple([20.1] * 8) for _ in range(8)))

    def test_sample_needs_64_features(self):
        with pytest.raises(InvalidInputError):
            LabeledSample(tuple([20.0] * 63), Label.PERSON)

    def test_fold_plan_bounds(self):
        with pytest.raises(InvalidInputError):
            FoldPlan(2, (0, 1, 2))
        with pytest.raises(InvalidInputError):
            FoldPlan(1, (0,))

    def test_label_round_trip(self):
        assert Label.from_text(Label.PERSON.to_text()) is Label.PERSON
        assert Label.from_text("no_person") is Label.NO_PERSON
        with pytest.raises(InvalidInputError):
            Label.from_text("maybe")
