"""Classical classifiers, metrics and splitting helpers."""

from eyefresh.classify.forest import ExtraTreesClassifier, RandomForestClassifier, majority_vote
from eyefresh.classify.knn import KNNClassifier
from eyefresh.classify.linear import LogisticRegression, softmax_loss_and_grad
from eyefresh.classify.metrics import EvalReport, confusion_matrix, evaluate, report_from_confusion
from eyefresh.classify.mlp import MLPClassifier, mlp_loss_and_grad
from eyefresh.classify.models import (
    ModelArtifact,
    default_hyperparameters,
    load_model,
    predict,
    predict_proba,
    resolve_kind,
    save_model,
    train,
)
from eyefresh.classify.preprocessing import StandardScaler, kfold_indices, standardize

__all__ = [
    "EvalReport",
    "ExtraTreesClassifier",
    "KNNClassifier",
    "LogisticRegression",
    "MLPClassifier",
    "ModelArtifact",
    "RandomForestClassifier",
    "StandardScaler",
    "confusion_matrix",
    "default_hyperparameters",
    "evaluate",
    "kfold_indices",
    "load_model",
    "majority_vote",
    "mlp_loss_and_grad",
    "predict",
    "predict_proba",
    "report_from_confusion",
    "resolve_kind",
    "save_model",
    "softmax_loss_and_grad",
    "standardize",
    "train",
]
