"""One-hidden-layer network: ReLU hidden units, 2-way softmax output,
mini-batch gradient descent on mean cross-entropy.

Features are standardized with constants fitted on the training set and
stored in the model. Initialization is uniform scaled by fan-in, biases
start at zero, and both the initial weights and the epoch shuffles come
from the seed, so training is a pure function of (data, params, seed).

Flat parameter layout (used by nn_gradient and the weight helpers):
w1 row-major, b1, w2 row-major, b2.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..core import Dataset, Label
from ..errors import ConfigError, InvalidInputError, TrainingError
from .svm import standardize_fit

MAX_HIDDEN = 1024


@dataclass(frozen=True)
class TrainingParams:
    learning_rate: float = 0.01
    batch_size: int = 32
    epochs: int = 500


@dataclass(frozen=True, eq=False)
class NnModel:
    hidden: int
    w1: np.ndarray  # (64, hidden)
    b1: np.ndarray  # (hidden,)
    w2: np.ndarray  # (hidden, 2)
    b2: np.ndarray  # (2,)
    feature_mean: np.ndarray
    feature_scale: np.ndarray
    params: TrainingParams
    seed: int

    def __post_init__(self) -> None:
        if not (1 <= self.hidden <= MAX_HIDDEN):
            raise ConfigError(f"hidden width {self.hidden} outside [1, {MAX_HIDDEN}]")
        if self.w1.shape[1] != self.hidden or self.w2.shape != (self.hidden, 2):
            raise InvalidInputError("weight shapes do not match the hidden width")


def _forward(model: NnModel, x_std: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    z1 = x_std @ model.w1 + model.b1
    a1 = np.maximum(z1, 0.0)
    logits = a1 @ model.w2 + model.b2
    return z1, a1, logits


def _softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e / e.sum(axis=1, keepdims=True)


def _batch_arrays(model: NnModel, batch) -> tuple[np.ndarray, np.ndarray]:
    samples = batch.samples if isinstance(batch, Dataset) else tuple(batch)
    if len(samples) == 0:
        raise InvalidInputError("batch must be non-empty")
    x = np.array([s.features for s in samples], dtype=np.float64)
    y = np.array([int(s.label) for s in samples], dtype=np.int64)
    return (x - model.feature_mean) / model.feature_scale, y


def _loss_and_grads(model: NnModel, x_std: np.ndarray, y: np.ndarray):
    # Overflow here is legitimate divergence; it surfaces as a non-finite
    # loss and is raised as TrainingError by the training loop.
    n = len(y)
    with np.errstate(over="ignore", invalid="ignore"):
        return _loss_and_grads_unchecked(model, x_std, y, n)


def _loss_and_grads_unchecked(model: NnModel, x_std: np.ndarray, y: np.ndarray, n: int):
    z1, a1, logits = _forward(model, x_std)
    probs = _softmax(logits)
    loss = float(-np.mean(np.log(probs[np.arange(n), y] + 1e-300)))
    d_logits = probs.copy()
    d_logits[np.arange(n), y] -= 1.0
    d_logits /= n
    gw2 = a1.T @ d_logits
    gb2 = d_logits.sum(axis=0)
    d_a1 = d_logits @ model.w2.T
    d_z1 = d_a1 * (z1 > 0)
    gw1 = x_std.T @ d_z1
    gb1 = d_z1.sum(axis=0)
    return loss, gw1, gb1, gw2, gb2


def train_nn(train: Dataset, hidden: int, params: TrainingParams = TrainingParams(),
             seed: int = 0) -> NnModel:
    if not (1 <= hidden <= MAX_HIDDEN):
        raise ConfigError(f"hidden width {hidden} outside [1, {MAX_HIDDEN}]")
    if params.learning_rate <= 0 or params.batch_size < 1 or params.epochs < 1:
        raise ConfigError("learning_rate, batch_size and epochs must be positive")

    x = train.feature_matrix()
    y = train.labels_array()
    mean, scale = standardize_fit(x)
    x_std = (x - mean) / scale
    n, d = x_std.shape

    rng = np.random.default_rng(seed)
    w1 = rng.uniform(-1.0, 1.0, (d, hidden)) / np.sqrt(d)
    b1 = np.zeros(hidden)
    w2 = rng.uniform(-1.0, 1.0, (hidden, 2)) / np.sqrt(hidden)
    b2 = np.zeros(2)
    model = NnModel(hidden, w1, b1, w2, b2, mean, scale, params, seed)

    lr = params.learning_rate
    for epoch in range(params.epochs):
        perm = rng.permutation(n)
        epoch_loss = 0.0
        for start in range(0, n, params.batch_size):
            idx = perm[start:start + params.batch_size]
            loss, gw1, gb1, gw2, gb2 = _loss_and_grads(model, x_std[idx], y[idx])
            epoch_loss += loss * len(idx)
            w1 -= lr * gw1
            b1 -= lr * gb1
            w2 -= lr * gw2
            b2 -= lr * gb2
        if not np.isfinite(epoch_loss):
            raise TrainingError(f"loss diverged at epoch {epoch}")
    if not all(np.all(np.isfinite(a)) for a in (w1, b1, w2, b2)):
        raise TrainingError("non-finite weights after training")
    return model


def nn_gradient(model: NnModel, batch) -> np.ndarray:
    """Backprop gradient of mean cross-entropy over the batch, flattened."""
    x_std, y = _batch_arrays(model, batch)
    _, gw1, gb1, gw2, gb2 = _loss_and_grads(model, x_std, y)
    return np.concatenate([gw1.ravel(), gb1, gw2.ravel(), gb2])


def nn_loss(model: NnModel, batch) -> float:
    x_std, y = _batch_arrays(model, batch)
    return _loss_and_grads(model, x_std, y)[0]


def flatten_weights(model: NnModel) -> np.ndarray:
    return np.concatenate(
        [model.w1.ravel(), model.b1, model.w2.ravel(), model.b2])


def replace_weights(model: NnModel, flat: np.ndarray) -> NnModel:
    d, h = model.w1.shape
    sizes = (d * h, h, h * 2, 2)
    if flat.shape != (sum(sizes),):
        raise InvalidInputError(f"expected {sum(sizes)} parameters")
    parts = np.split(np.asarray(flat, dtype=np.float64), np.cumsum(sizes)[:-1])
    return NnModel(model.hidden, parts[0].reshape(d, h), parts[1],
                   parts[2].reshape(h, 2), parts[3], model.feature_mean,
                   model.feature_scale, model.params, model.seed)


def predict_nn(model: NnModel, x) -> Label:
    xv = np.asarray(x, dtype=np.float64)
    if xv.shape != (model.w1.shape[0],):
        raise InvalidInputError(f"expected a {model.w1.shape[0]}-vector")
    x_std = (xv - model.feature_mean) / model.feature_scale
    logits = _forward(model, x_std[None, :])[2][0]
    return Label.PERSON if logits[Label.PERSON] > logits[Label.NO_PERSON] else Label.NO_PERSON


def predict_nn_batch(model: NnModel, xs: np.ndarray) -> np.ndarray:
    xs_std = (np.asarray(xs, dtype=np.float64) - model.feature_mean) / model.feature_scale
    logits = _forward(model, xs_std)[2]
    return np.where(logits[:, 1] > logits[:, 0], int(Label.PERSON), int(Label.NO_PERSON))
