from __future__ import annotations

import numpy as np

from eyefresh.classify.base import check_x, check_xy
from eyefresh.errors import ConfigError


class KNNClassifier:
    """k-nearest neighbours with Minkowski distance and uniform or inverse-distance votes.

    Neighbour ties in distance go to the earlier training row; vote ties go to
    the lowest class. With inverse-distance weights, exact matches (distance
    0) take the whole vote. ``algorithm`` is recorded only; the search is
    exhaustive, which returns the same neighbours as any tree index.
    """

    def __init__(self, n_neighbors=17, weights="distance", metric="minkowski", p=2, algorithm="ball_tree"):
        if n_neighbors < 1:
            raise ConfigError("n_neighbors must be >= 1")
        if weights not in ("uniform", "distance"):
            raise ConfigError(f"weights must be 'uniform' or 'distance', got {weights!r}")
        if metric != "minkowski" or p < 1:
            raise ConfigError("only the Minkowski metric with p >= 1 is supported")
        self.n_neighbors = int(n_neighbors)
        self.weights = weights
        self.metric = metric
        self.p = p
        self.algorithm = algorithm

    def fit(self, X, y, seed: int = 0) -> "KNNClassifier":
        X, _, self.classes_, enc = check_xy(X, y)
        self.X_ = X
        self.y_ = enc
        return self

    def _distances(self, Q: np.ndarray) -> np.ndarray:
        n, d = self.X_.shape
        out = np.empty((Q.shape[0], n))
        chunk = max(1, int(2e7 // max(1, n * d)))
        for s in range(0, Q.shape[0], chunk):
            diff = np.abs(Q[s : s + chunk, None, :] - self.X_[None, :, :])
            if self.p == 2:
                out[s : s + chunk] = np.sqrt((diff * diff).sum(axis=2))
            else:
                out[s : s + chunk] = (diff**self.p).sum(axis=2) ** (1.0 / self.p)
        return out

    def predict_proba(self, X) -> np.ndarray:
        Q = check_x(X, self.X_.shape[1])
        dist = self._distances(Q)
        k = min(self.n_neighbors, self.X_.shape[0])
        nbrs = np.argsort(dist, axis=1, kind="stable")[:, :k]
        nd = np.take_along_axis(dist, nbrs, axis=1)
        if self.weights == "uniform":
            w = np.ones_like(nd)
        else:
            exact = nd == 0
            with np.errstate(divide="ignore"):
                w = np.where(exact.any(axis=1, keepdims=True), exact.astype(np.float64), 1.0 / nd)
        votes = np.zeros((Q.shape[0], self.classes_.size))
        np.add.at(votes, (np.repeat(np.arange(Q.shape[0]), k), self.y_[nbrs].ravel()), w.ravel())
        return votes / votes.sum(axis=1, keepdims=True)

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def to_state(self) -> dict:
        return {"classes": self.classes_.tolist(), "X": self.X_.tolist(), "y": self.y_.tolist()}

    def load_state(self, state: dict) -> "KNNClassifier":
        self.classes_ = np.array(state["classes"])
        self.X_ = np.array(state["X"], dtype=np.float64)
        self.y_ = np.array(state["y"], dtype=np.int64)
        return self
