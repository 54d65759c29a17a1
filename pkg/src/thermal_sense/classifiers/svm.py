"""Soft-margin SVM trained by sequential minimal optimization.

Solves the dual problem
    min  0.5 * a' Q a - sum(a)   s.t.  y' a = 0,  0 <= a_i <= C
with Q[i, j] = y_i y_j k(x_i, x_j), selecting the maximal-violating pair
at each step and stopping when the largest KKT violation drops below
tol. Features are standardized internally (per-feature z-score fitted
on the training set); the model stores the standardization constants
and standardized support vectors.

Decision rule: f(x) = sum_i a_i y_i k(s_i, x) + b, with f(x) >= 0
mapped to PERSON (the tie at exactly 0 goes to PERSON).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from ..core import Dataset, Label
from ..errors import InvalidInputError, StratificationError, TrainingError
from .kernels import KernelSpec, kernel_matrix

DEFAULT_C = 1.0
DEFAULT_TOL = 1e-3
MAX_PAIR_UPDATES = 1_000_000


@dataclass(frozen=True, eq=False)
class SvmModel:
    kernel: KernelSpec  # gamma resolved to a concrete value
    c: float
    feature_mean: np.ndarray
    feature_scale: np.ndarray
    support_x: np.ndarray  # standardized support vectors
    support_alpha: np.ndarray
    support_y: np.ndarray  # -1 / +1
    bias: float

    def __post_init__(self) -> None:
        if np.any(self.support_alpha < 0) or np.any(self.support_alpha > self.c):
            raise InvalidInputError("dual coefficients must lie in [0, C]")
        if abs(float(self.support_alpha @ self.support_y)) > 1e-8:
            raise InvalidInputError("dual coefficients violate sum(alpha * y) = 0")
        if not np.isfinite(self.bias):
            raise InvalidInputError("bias must be finite")


def standardize_fit(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Per-feature mean and population std; constant features get scale 1."""
    mean = x.mean(axis=0)
    scale = x.std(axis=0)
    scale = np.where(scale < 1e-12, 1.0, scale)
    return mean, scale


def _resolve_kernel(spec: KernelSpec, x_std: np.ndarray) -> KernelSpec:
    if spec.kind == "linear" or spec.gamma is not None:
        return spec
    var = float(x_std.var())
    gamma = 1.0 / (x_std.shape[1] * var) if var > 0 else 1.0 / x_std.shape[1]
    return replace(spec, gamma=gamma)


def _smo(k: np.ndarray, y: np.ndarray, c: float, tol: float,
         max_iter: int) -> tuple[np.ndarray, float]:
    n = len(y)
    alpha = np.zeros(n)
    grad = -np.ones(n)  # gradient of the dual objective at alpha = 0
    pos = y > 0

    for _ in range(max_iter):
        yg = -y * grad
        up = np.where(pos, alpha < c, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < c)
        i = int(np.flatnonzero(up)[np.argmax(yg[up])])
        j = int(np.flatnonzero(low)[np.argmin(yg[low])])
        m_up, m_low = yg[i], yg[j]
        if m_up - m_low <= tol:
            break

        quad = k[i, i] + k[j, j] - 2.0 * k[i, j]
        step = (m_up - m_low) / max(quad, 1e-12)
        room_i = c - alpha[i] if y[i] > 0 else alpha[i]
        room_j = alpha[j] if y[j] > 0 else c - alpha[j]
        step = min(step, room_i, room_j)
        # Snap exactly onto the box bound so alpha stays in [0, C] bitwise.
        if step == room_i:
            alpha[i] = c if y[i] > 0 else 0.0
        else:
            alpha[i] += y[i] * step
        if step == room_j:
            alpha[j] = 0.0 if y[j] > 0 else c
        else:
            alpha[j] -= y[j] * step
        grad += step * y * (k[:, i] - k[:, j])
    else:
        yg = -y * grad
        up = np.where(pos, alpha < c, alpha > 0)
        low = np.where(pos, alpha > 0, alpha < c)
        violation = float(np.max(yg[up]) - np.min(yg[low]))
        raise TrainingError(
            f"SMO did not converge in {max_iter} pair updates; max KKT violation {violation:.3e}"
        )

    free = (alpha > 0) & (alpha < c)
    if free.any():
        bias = float(np.mean((-y * grad)[free]))
    else:
        bias = float((m_up + m_low) / 2.0)
    return alpha, bias


def train_svm(train: Dataset, kernel: KernelSpec, c: float = DEFAULT_C,
              tol: float = DEFAULT_TOL, max_iter: int = MAX_PAIR_UPDATES) -> SvmModel:
    if c <= 0:
        raise InvalidInputError("C must be positive")
    y_int = train.labels_array()
    if len(np.unique(y_int)) < 2:
        raise StratificationError("training set must contain both classes")
    x = train.feature_matrix()
    mean, scale = standardize_fit(x)
    x_std = (x - mean) / scale
    spec = _resolve_kernel(kernel, x_std)
    y = np.where(y_int == Label.PERSON, 1.0, -1.0)

    k = kernel_matrix(spec, x_std, x_std)
    alpha, bias = _smo(k, y, float(c), float(tol), max_iter)

    sv = alpha > 0
    return SvmModel(
        kernel=spec,
        c=float(c),
        feature_mean=mean,
        feature_scale=scale,
        support_x=x_std[sv],
        support_alpha=alpha[sv],
        support_y=y[sv],
        bias=bias,
    )


def decision_function(model: SvmModel, xs: np.ndarray) -> np.ndarray:
    xs_std = (np.asarray(xs, dtype=np.float64) - model.feature_mean) / model.feature_scale
    k = kernel_matrix(model.kernel, model.support_x, xs_std)
    return (model.support_alpha * model.support_y) @ k + model.bias


def predict_svm(model: SvmModel, x) -> Label:
    xv = np.asarray(x, dtype=np.float64)
    if xv.shape != (model.support_x.shape[1],):
        raise InvalidInputError(f"expected a {model.support_x.shape[1]}-vector")
    return Label.PERSON if decision_function(model, xv[None, :])[0] >= 0 else Label.NO_PERSON


def predict_svm_batch(model: SvmModel, xs: np.ndarray) -> np.ndarray:
    return np.where(decision_function(model, xs) >= 0, int(Label.PERSON), int(Label.NO_PERSON))
