"""Multinomial (softmax) logistic regression with an L2 penalty."""

from __future__ import annotations

import numpy as np
from scipy.optimize import minimize

from eyefresh.classify.base import check_x, check_xy, one_hot, softmax
from eyefresh.errors import ConfigError


def softmax_loss_and_grad(params: np.ndarray, X: np.ndarray, Y: np.ndarray, C: float):
    """Mean cross-entropy plus ``||W||^2 / (2 C n)``; the bias is not penalized.

    ``params`` is ``W`` (d x k, row-major) followed by ``b`` (k). Returns
    ``(loss, flat gradient)``.
    """
    n, d = X.shape
    k = Y.shape[1]
    W = params[: d * k].reshape(d, k)
    b = params[d * k :]
    Z = X @ W + b
    Z = Z - Z.max(axis=1, keepdims=True)
    log_p = Z - np.log(np.exp(Z).sum(axis=1, keepdims=True))
    loss = -(Y * log_p).sum() / n + (W * W).sum() / (2.0 * C * n)
    G = (np.exp(log_p) - Y) / n
    dW = X.T @ G + W / (C * n)
    db = G.sum(axis=0)
    return loss, np.concatenate([dW.ravel(), db])


class LogisticRegression:
    """L-BFGS fit of the regularized softmax objective.

    ``solver`` is stored as metadata only; every fit uses the same
    quasi-Newton routine on the convex objective.
    """

    def __init__(self, C=1.0, max_iter=300, penalty="l2", solver="liblinear", tol=1e-8):
        if penalty != "l2":
            raise ConfigError(f"only the l2 penalty is supported, got {penalty!r}")
        if C <= 0:
            raise ConfigError("C must be positive")
        self.C = float(C)
        self.max_iter = int(max_iter)
        self.penalty = penalty
        self.solver = solver
        self.tol = tol

    def fit(self, X, y, seed: int = 0) -> "LogisticRegression":
        X, _, self.classes_, enc = check_xy(X, y)
        Y = one_hot(enc, self.classes_.size)
        d, k = X.shape[1], self.classes_.size
        res = minimize(
            softmax_loss_and_grad,
            np.zeros(d * k + k),
            args=(X, Y, self.C),
            jac=True,
            method="L-BFGS-B",
            options={"maxiter": self.max_iter, "gtol": self.tol, "ftol": 1e-15},
        )
        self.coef_ = res.x[: d * k].reshape(d, k)
        self.intercept_ = res.x[d * k :]
        self.n_iter_ = int(res.nit)
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = check_x(X, self.coef_.shape[0])
        return softmax(X @ self.coef_ + self.intercept_)

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def to_state(self) -> dict:
        return {"classes": self.classes_.tolist(), "coef": self.coef_.tolist(), "intercept": self.intercept_.tolist()}

    def load_state(self, state: dict) -> "LogisticRegression":
        self.classes_ = np.array(state["classes"])
        self.coef_ = np.array(state["coef"], dtype=np.float64)
        self.intercept_ = np.array(state["intercept"], dtype=np.float64)
        return self
