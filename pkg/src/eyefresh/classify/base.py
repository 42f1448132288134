from __future__ import annotations

import numpy as np

from eyefresh.errors import ConfigError, TrainingError


def check_xy(X, y) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Validate a training set; returns ``(X, y, classes, encoded y)``."""
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2:
        raise ConfigError(f"X must be 2-D, got shape {X.shape}")
    if X.shape[0] != y.shape[0]:
        raise ConfigError(f"{X.shape[0]} rows but {y.shape[0]} labels")
    if X.shape[0] == 0:
        raise TrainingError("empty training set")
    if not np.all(np.isfinite(X)):
        raise TrainingError("training matrix contains non-finite values")
    classes, encoded = np.unique(y, return_inverse=True)
    if classes.size < 2:
        raise TrainingError(f"need at least two classes to train, got {classes.tolist()}")
    return X, y, classes, encoded


def check_x(X, n_features: int) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != n_features:
        raise ConfigError(f"expected {n_features} features per row, got shape {X.shape}")
    return X


def softmax(z: np.ndarray) -> np.ndarray:
    z = z - z.max(axis=1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=1, keepdims=True)


def one_hot(encoded: np.ndarray, n_classes: int) -> np.ndarray:
    out = np.zeros((encoded.size, n_classes))
    out[np.arange(encoded.size), encoded] = 1.0
    return out
