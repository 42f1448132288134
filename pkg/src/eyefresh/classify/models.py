"""Model artifacts: train, predict, and a versioned JSON container."""

from __future__ import annotations

import inspect
import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from eyefresh.classify.forest import ExtraTreesClassifier, RandomForestClassifier
from eyefresh.classify.knn import KNNClassifier
from eyefresh.classify.linear import LogisticRegression
from eyefresh.classify.mlp import MLPClassifier
from eyefresh.classify.preprocessing import StandardScaler
from eyefresh.errors import ConfigError, DatasetError

FORMAT_VERSION = 1

ESTIMATORS = {
    "KNN": KNNClassifier,
    "LR": LogisticRegression,
    "MLP": MLPClassifier,
    "RF": RandomForestClassifier,
    "ET": ExtraTreesClassifier,
}
ALIASES = {"ANN": "MLP"}
SCALED = {"KNN", "LR", "MLP"}
UNSUPPORTED = {
    "SVM": "SVM (RBF kernel)",
    "LGBM": "LightGBM",
    "LIGHTGBM": "LightGBM",
    "CB": "CatBoost",
    "CATBOOST": "CatBoost",
}


def resolve_kind(kind: str) -> str:
    key = kind.upper()
    key = ALIASES.get(key, key)
    if key in UNSUPPORTED:
        raise ConfigError(
            f"unsupported model {kind!r}: {UNSUPPORTED[key]} is not implemented "
            f"(SVM, LGBM and CatBoost are excluded); choose one of {sorted(ESTIMATORS)}"
        )
    if key not in ESTIMATORS:
        raise ConfigError(f"unknown model kind {kind!r}; choose one of {sorted(ESTIMATORS)}")
    return key


def default_hyperparameters(kind: str) -> dict:
    sig = inspect.signature(ESTIMATORS[resolve_kind(kind)].__init__)
    return {name: p.default for name, p in sig.parameters.items() if name != "self"}


def _make(kind: str, hyperparameters: dict):
    known = default_hyperparameters(kind)
    unknown = sorted(set(hyperparameters) - set(known))
    if unknown:
        raise ConfigError(f"unknown hyperparameter(s) for {kind}: {', '.join(unknown)}")
    params = {**known, **hyperparameters}
    return ESTIMATORS[kind](**params), params


@dataclass
class ModelArtifact:
    kind: str
    hyperparameters: dict
    estimator: object
    n_features: int
    scaler: StandardScaler | None = None
    feature_set_id: str | None = None
    feature_names: list[str] | None = None
    train_seed: int = 0
    meta: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "format": "eyefresh-model",
            "format_version": FORMAT_VERSION,
            "kind": self.kind,
            "hyperparameters": _jsonable(self.hyperparameters),
            "n_features": self.n_features,
            "feature_set_id": self.feature_set_id,
            "feature_names": self.feature_names,
            "train_seed": self.train_seed,
            "scaler": None if self.scaler is None else self.scaler.to_state(),
            "state": self.estimator.to_state(),
            "meta": self.meta,
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ModelArtifact":
        if doc.get("format") != "eyefresh-model" or doc.get("format_version") != FORMAT_VERSION:
            raise ConfigError("not an eyefresh model file or unsupported format version")
        kind = resolve_kind(doc["kind"])
        estimator, params = _make(kind, _from_jsonable(kind, doc["hyperparameters"]))
        estimator.load_state(doc["state"])
        scaler = None if doc["scaler"] is None else StandardScaler.from_state(doc["scaler"])
        return cls(kind, params, estimator, int(doc["n_features"]), scaler, doc.get("feature_set_id"),
                   doc.get("feature_names"), int(doc.get("train_seed", 0)), doc.get("meta", {}))


def _jsonable(params: dict) -> dict:
    return {k: list(v) if isinstance(v, tuple) else v for k, v in params.items()}


def _from_jsonable(kind: str, params: dict) -> dict:
    if kind == "MLP" and "hidden_layer_sizes" in params:
        params = {**params, "hidden_layer_sizes": tuple(params["hidden_layer_sizes"])}
    return params


def train(kind: str, hyperparameters: dict | None, X, y, seed: int = 42, feature_set_id: str | None = None,
          feature_names: list[str] | None = None) -> ModelArtifact:
    """Fit a model; KNN, LR and MLP see standardized features, trees see raw ones."""
    kind = resolve_kind(kind)
    estimator, params = _make(kind, dict(hyperparameters or {}))
    X = np.asarray(X, dtype=np.float64)
    scaler = None
    if kind in SCALED:
        scaler = StandardScaler().fit(X)
        X = scaler.transform(X)
    estimator.fit(X, y, seed=seed)
    return ModelArtifact(kind, params, estimator, X.shape[1], scaler, feature_set_id, feature_names, seed)


def _prepare(model: ModelArtifact, X) -> np.ndarray:
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[None, :]
    if X.ndim != 2 or X.shape[1] != model.n_features:
        raise ConfigError(f"model expects {model.n_features} features per row, got shape {X.shape}")
    return X if model.scaler is None else model.scaler.transform(X)


def predict(model: ModelArtifact, X) -> np.ndarray:
    return model.estimator.predict(_prepare(model, X))


def predict_proba(model: ModelArtifact, X) -> np.ndarray:
    return model.estimator.predict_proba(_prepare(model, X))


def save_model(model: ModelArtifact, path: str | Path) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model.to_json()), encoding="utf-8")


def load_model(path: str | Path) -> ModelArtifact:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise DatasetError(f"cannot read model {path}: {exc}") from exc
    return ModelArtifact.from_json(doc)
