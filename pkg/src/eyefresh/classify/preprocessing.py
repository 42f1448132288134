from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from eyefresh.errors import ConfigError


@dataclass
class StandardScaler:
    """Per-column z-score fitted on training rows; constant columns pass through."""

    mean: np.ndarray | None = None
    scale: np.ndarray | None = None

    def fit(self, X) -> "StandardScaler":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim != 2 or X.shape[0] == 0:
            raise ConfigError("scaler needs a non-empty 2-D training matrix")
        mean = X.mean(axis=0)
        std = X.std(axis=0)
        constant = std == 0
        self.mean = np.where(constant, 0.0, mean)
        self.scale = np.where(constant, 1.0, std)
        return self

    def transform(self, X) -> np.ndarray:
        return (np.asarray(X, dtype=np.float64) - self.mean) / self.scale

    def to_state(self) -> dict:
        return {"mean": self.mean.tolist(), "scale": self.scale.tolist()}

    @classmethod
    def from_state(cls, state: dict) -> "StandardScaler":
        return cls(np.array(state["mean"], dtype=np.float64), np.array(state["scale"], dtype=np.float64))


def standardize(train, apply_to=None):
    """Fit on ``train`` and transform ``apply_to`` (default: ``train``)."""
    scaler = StandardScaler().fit(train)
    return scaler.transform(train if apply_to is None else apply_to), scaler


def kfold_indices(n: int, k: int, labels, seed: int = 42) -> list[tuple[np.ndarray, np.ndarray]]:
    """Stratified k-fold ``(train_idx, test_idx)`` pairs.

    Each class is shuffled with ``seed`` and dealt round-robin across folds,
    each class starting where the previous one stopped so fold sizes stay
    balanced overall.
    """
    labels = np.asarray(labels)
    if k < 2:
        raise ConfigError(f"k must be >= 2, got {k}")
    if labels.shape[0] != n:
        raise ConfigError(f"{labels.shape[0]} labels for n={n}")
    rng = np.random.default_rng(seed)
    fold_of = np.empty(n, dtype=np.int64)
    start = 0
    for cls in np.unique(labels):
        members = np.flatnonzero(labels == cls)
        if members.size < k:
            raise ConfigError(f"class {cls} has {members.size} samples, fewer than k={k}")
        members = members[rng.permutation(members.size)]
        fold_of[members] = (start + np.arange(members.size)) % k
        start = (start + members.size) % k
    idx = np.arange(n)
    return [(idx[fold_of != f], idx[fold_of == f]) for f in range(k)]
