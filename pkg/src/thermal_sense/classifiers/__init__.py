from .kernels import KernelSpec, kernel_eval
from .knn import KnnModel, predict_knn, train_knn
from .nn import NnModel, TrainingParams, nn_gradient, predict_nn, train_nn
from .svm import SvmModel, predict_svm, train_svm

__all__ = [
    "KernelSpec",
    "kernel_eval",
    "KnnModel",
    "train_knn",
    "predict_knn",
    "SvmModel",
    "train_svm",
    "predict_svm",
    "NnModel",
    "TrainingParams",
    "train_nn",
    "predict_nn",
    "nn_gradient",
]
