"""CART trees and the two bagged ensembles built from them.

Random forests search the best threshold of each candidate feature; extra
trees draw one threshold per candidate feature uniformly between the node's
minimum and maximum. Each tree draws from its own stream seeded by
``(seed, tree index)``, so the ensemble does not depend on build order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from eyefresh.classify.base import check_x, check_xy
from eyefresh.errors import ConfigError

LEAF = -1


def _impurity(counts: np.ndarray, totals: np.ndarray, criterion: str) -> np.ndarray:
    """Impurity of class-count rows ``counts[..., C]`` with row sums ``totals``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        p = counts / totals[..., None]
        if criterion == "gini":
            out = 1.0 - (p * p).sum(axis=-1)
        else:
            out = -np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0).sum(axis=-1)
    return np.where(totals > 0, out, 0.0)


@dataclass
class Tree:
    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray  # (n_nodes, n_classes) class counts

    def apply(self, X: np.ndarray) -> np.ndarray:
        """Leaf index reached by every row (``x <= threshold`` goes left)."""
        node = np.zeros(X.shape[0], dtype=np.int64)
        active = np.flatnonzero(self.feature[node] != LEAF)
        while active.size:
            cur = node[active]
            go_left = X[active, self.feature[cur]] <= self.threshold[cur]
            node[active] = np.where(go_left, self.left[cur], self.right[cur])
            active = active[self.feature[node[active]] != LEAF]
        return node

    def predict_class(self, X: np.ndarray) -> np.ndarray:
        return np.argmax(self.value[self.apply(X)], axis=1)

    def to_state(self) -> dict:
        return {
            "feature": self.feature.tolist(),
            "threshold": self.threshold.tolist(),
            "left": self.left.tolist(),
            "right": self.right.tolist(),
            "value": self.value.tolist(),
        }

    @classmethod
    def from_state(cls, s: dict) -> "Tree":
        return cls(
            np.array(s["feature"], dtype=np.int64),
            np.array(s["threshold"], dtype=np.float64),
            np.array(s["left"], dtype=np.int64),
            np.array(s["right"], dtype=np.int64),
            np.array(s["value"], dtype=np.float64),
        )


def _best_threshold_split(Xn, yn, n_classes, criterion, min_leaf):
    """Exhaustive threshold search over the columns of ``Xn``.

    Returns ``(score, column, threshold)`` or None when no column can be split.
    """
    n, m = Xn.shape
    order = np.argsort(Xn, axis=0, kind="stable")
    xs = np.take_along_axis(Xn, order, axis=0)
    ys = yn[order]
    onehot = ys[..., None] == np.arange(n_classes)
    left = np.cumsum(onehot, axis=0)[:-1].astype(np.float64)
    total = left[-1] + onehot[-1]
    right = total[None] - left
    n_left = np.arange(1, n, dtype=np.float64)[:, None]
    n_right = n - n_left
    score = (n_left * _impurity(left, np.broadcast_to(n_left, (n - 1, m)), criterion)
             + n_right * _impurity(right, np.broadcast_to(n_right, (n - 1, m)), criterion)) / n
    valid = (xs[:-1] < xs[1:]) & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    score = np.where(valid, score, np.inf)
    pos = int(np.argmin(score))  # row-major: first position, then first column
    i, j = divmod(pos, m)
    thr = (xs[i, j] + xs[i + 1, j]) / 2.0
    if not thr < xs[i + 1, j]:
        thr = xs[i, j]
    return float(score[i, j]), j, float(thr)


def _random_threshold_split(Xn, yn, n_classes, criterion, min_leaf, rng):
    """One uniform threshold per column in ``[min, max)``; keeps the best column."""
    n, m = Xn.shape
    lo, hi = Xn.min(axis=0), Xn.max(axis=0)
    draws = rng.uniform(size=m)
    ok = lo < hi
    if not ok.any():
        return None
    thr = lo + draws * (hi - lo)
    thr = np.where(thr < hi, thr, lo)
    go_left = Xn <= thr
    onehot = (yn[:, None] == np.arange(n_classes)).astype(np.float64)
    left = go_left.T.astype(np.float64) @ onehot
    n_left = left.sum(axis=1)
    right = onehot.sum(axis=0)[None] - left
    n_right = n - n_left
    score = (n_left * _impurity(left, n_left, criterion) + n_right * _impurity(right, n_right, criterion)) / n
    valid = ok & (n_left >= min_leaf) & (n_right >= min_leaf)
    if not valid.any():
        return None
    j = int(np.argmin(np.where(valid, score, np.inf)))
    return float(score[j]), j, float(thr[j])


def build_tree(X, y, n_classes, rng, *, splitter="best", criterion="gini", max_depth=None,
               min_samples_split=2, min_samples_leaf=1, max_features=None) -> Tree:
    """Grow one tree depth-first on rows ``X`` with encoded labels ``y``."""
    n_features = X.shape[1]
    k = n_features if max_features is None else max(1, min(int(max_features), n_features))
    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(counts):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(counts)
        return len(feature) - 1

    root_idx = np.arange(X.shape[0])
    stack = [(new_node(np.bincount(y, minlength=n_classes).astype(np.float64)), root_idx, 0)]
    while stack:
        node, idx, depth = stack.pop()
        counts = value[node]
        if (
            (max_depth is not None and depth >= max_depth)
            or idx.size < min_samples_split
            or np.count_nonzero(counts) <= 1
        ):
            continue
        yn = y[idx]
        perm = rng.permutation(n_features)
        found = None
        # like the reference CART, keep drawing features while none so far can split
        for s in range(0, n_features, k):
            feats = perm[s : s + k]
            Xn = X[np.ix_(idx, feats)]
            if splitter == "best":
                found = _best_threshold_split(Xn, yn, n_classes, criterion, min_samples_leaf)
            else:
                found = _random_threshold_split(Xn, yn, n_classes, criterion, min_samples_leaf, rng)
            if found is not None:
                found = (found[0], int(feats[found[1]]), found[2])
                break
        if found is None:
            continue
        _, f, thr = found
        mask = X[idx, f] <= thr
        li, ri = idx[mask], idx[~mask]
        feature[node] = f
        threshold[node] = thr
        ln = new_node(np.bincount(y[li], minlength=n_classes).astype(np.float64))
        rn = new_node(np.bincount(y[ri], minlength=n_classes).astype(np.float64))
        left[node], right[node] = ln, rn
        stack.append((rn, ri, depth + 1))
        stack.append((ln, li, depth + 1))

    return Tree(
        np.array(feature, dtype=np.int64),
        np.array(threshold, dtype=np.float64),
        np.array(left, dtype=np.int64),
        np.array(right, dtype=np.int64),
        np.array(value, dtype=np.float64),
    )


def majority_vote(votes: np.ndarray, n_classes: int) -> np.ndarray:
    """Per-row class with most votes; ties go to the lowest class index.

    ``votes`` is ``(n_rows, n_trees)`` of encoded class predictions.
    """
    counts = np.zeros((votes.shape[0], n_classes), dtype=np.int64)
    for c in range(n_classes):
        counts[:, c] = (votes == c).sum(axis=1)
    return np.argmax(counts, axis=1)


def _resolve_max_features(max_features, n_features: int) -> int | None:
    if max_features is None:
        return None
    if max_features == "sqrt":
        return max(1, int(np.sqrt(n_features)))
    if max_features == "log2":
        return max(1, int(np.log2(n_features)))
    if isinstance(max_features, float) and 0 < max_features <= 1:
        return max(1, int(max_features * n_features))
    if isinstance(max_features, int) and max_features >= 1:
        return max_features
    raise ConfigError(f"invalid max_features {max_features!r}")


class _Forest:
    splitter = "best"

    def __init__(self, n_estimators, criterion, max_depth, min_samples_split, min_samples_leaf,
                 max_features, bootstrap):
        if criterion not in ("gini", "entropy"):
            raise ConfigError(f"criterion must be 'gini' or 'entropy', got {criterion!r}")
        if n_estimators < 1:
            raise ConfigError("n_estimators must be >= 1")
        if min_samples_split < 2 or min_samples_leaf < 1:
            raise ConfigError("min_samples_split must be >= 2 and min_samples_leaf >= 1")
        self.n_estimators = int(n_estimators)
        self.criterion = criterion
        self.max_depth = None if max_depth is None else int(max_depth)
        self.min_samples_split = int(min_samples_split)
        self.min_samples_leaf = int(min_samples_leaf)
        self.max_features = max_features
        self.bootstrap = bool(bootstrap)

    def fit(self, X, y, seed: int = 0):
        X, _, self.classes_, enc = check_xy(X, y)
        n, d = X.shape
        k = _resolve_max_features(self.max_features, d)
        self.n_features_ = d
        self.trees_ = []
        for t in range(self.n_estimators):
            rng = np.random.default_rng([seed, t])
            rows = rng.integers(0, n, n) if self.bootstrap else np.arange(n)
            self.trees_.append(
                build_tree(
                    X[rows], enc[rows], self.classes_.size, rng,
                    splitter=self.splitter, criterion=self.criterion, max_depth=self.max_depth,
                    min_samples_split=self.min_samples_split, min_samples_leaf=self.min_samples_leaf,
                    max_features=k,
                )
            )
        return self

    def _votes(self, X) -> np.ndarray:
        X = check_x(X, self.n_features_)
        return np.stack([t.predict_class(X) for t in self.trees_], axis=1)

    def predict_proba(self, X) -> np.ndarray:
        votes = self._votes(X)
        counts = np.stack([(votes == c).sum(axis=1) for c in range(self.classes_.size)], axis=1)
        return counts / votes.shape[1]

    def predict(self, X) -> np.ndarray:
        return self.classes_[majority_vote(self._votes(X), self.classes_.size)]

    def to_state(self) -> dict:
        return {
            "classes": self.classes_.tolist(),
            "n_features": self.n_features_,
            "trees": [t.to_state() for t in self.trees_],
        }

    def load_state(self, state: dict):
        self.classes_ = np.array(state["classes"])
        self.n_features_ = int(state["n_features"])
        self.trees_ = [Tree.from_state(s) for s in state["trees"]]
        return self


class RandomForestClassifier(_Forest):
    splitter = "best"

    def __init__(self, n_estimators=300, criterion="gini", max_depth=15, min_samples_split=2,
                 min_samples_leaf=1, max_features="sqrt", bootstrap=True):
        super().__init__(n_estimators, criterion, max_depth, min_samples_split, min_samples_leaf,
                         max_features, bootstrap)


class ExtraTreesClassifier(_Forest):
    splitter = "random"

    def __init__(self, n_estimators=180, criterion="entropy", max_depth=35, min_samples_split=3,
                 min_samples_leaf=1, max_features="sqrt", bootstrap=True):
        super().__init__(n_estimators, criterion, max_depth, min_samples_split, min_samples_leaf,
                         max_features, bootstrap)
