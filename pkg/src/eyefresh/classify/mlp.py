"""Multilayer perceptron with softmax output trained by Adam on minibatches."""

from __future__ import annotations

import numpy as np

from eyefresh.classify.base import check_x, check_xy, one_hot, softmax
from eyefresh.errors import ConfigError

_ACTIVATIONS = {
    "tanh": (np.tanh, lambda a: 1.0 - a * a),
    "relu": (lambda z: np.maximum(z, 0.0), lambda a: (a > 0).astype(np.float64)),
    "logistic": (lambda z: 1.0 / (1.0 + np.exp(-z)), lambda a: a * (1.0 - a)),
}


def layer_shapes(n_in: int, hidden, n_out: int) -> list[tuple[int, int]]:
    sizes = [n_in, *hidden, n_out]
    return list(zip(sizes[:-1], sizes[1:]))


def unpack(params: np.ndarray, shapes) -> list[tuple[np.ndarray, np.ndarray]]:
    layers, pos = [], 0
    for fan_in, fan_out in shapes:
        W = params[pos : pos + fan_in * fan_out].reshape(fan_in, fan_out)
        pos += fan_in * fan_out
        b = params[pos : pos + fan_out]
        pos += fan_out
        layers.append((W, b))
    return layers


def mlp_loss_and_grad(params: np.ndarray, X: np.ndarray, Y: np.ndarray, shapes, alpha: float, activation: str = "tanh"):
    """Mean cross-entropy plus ``alpha / (2 n) * sum ||W||^2`` and its backpropagated gradient."""
    act, dact = _ACTIVATIONS[activation]
    layers = unpack(params, shapes)
    n = X.shape[0]

    acts = [X]
    for W, b in layers[:-1]:
        acts.append(act(acts[-1] @ W + b))
    W_out, b_out = layers[-1]
    P = softmax(acts[-1] @ W_out + b_out)

    log_p = np.log(np.clip(P, 1e-300, None))
    penalty = sum(float((W * W).sum()) for W, _ in layers)
    loss = -(Y * log_p).sum() / n + alpha * penalty / (2.0 * n)

    grads = []
    delta = (P - Y) / n
    for li in range(len(layers) - 1, -1, -1):
        W, _ = layers[li]
        a_prev = acts[li]
        grads.append((a_prev.T @ delta + alpha * W / n, delta.sum(axis=0)))
        if li > 0:
            delta = (delta @ W.T) * dact(a_prev)
    grads.reverse()
    return loss, np.concatenate([np.concatenate([gW.ravel(), gb]) for gW, gb in grads])


def init_params(shapes, rng: np.random.Generator, activation: str = "tanh") -> np.ndarray:
    """Glorot-uniform weights (gain 2 for logistic), zero-mean uniform biases."""
    chunks = []
    factor = 2.0 if activation == "logistic" else 6.0
    for fan_in, fan_out in shapes:
        bound = np.sqrt(factor / (fan_in + fan_out))
        chunks.append(rng.uniform(-bound, bound, fan_in * fan_out))
        chunks.append(rng.uniform(-bound, bound, fan_out))
    return np.concatenate(chunks)


class MLPClassifier:
    """Fully connected network, softmax output, Adam on shuffled minibatches.

    With ``learning_rate="adaptive"`` the step size is divided by 5 whenever
    the epoch loss fails to improve by ``tol`` for ``n_iter_no_change``
    consecutive epochs; training stops once it drops below 1e-6 or after
    ``max_iter`` epochs. With ``"constant"`` training stops at the first such
    plateau.
    """

    def __init__(
        self,
        hidden_layer_sizes=(128,),
        activation="tanh",
        solver="adam",
        learning_rate="adaptive",
        learning_rate_init=1e-3,
        alpha=1e-3,
        batch_size=32,
        max_iter=500,
        early_stopping=False,
        tol=1e-4,
        n_iter_no_change=10,
        beta_1=0.9,
        beta_2=0.999,
        epsilon=1e-8,
    ):
        if isinstance(hidden_layer_sizes, int):
            hidden_layer_sizes = (hidden_layer_sizes,)
        if activation not in _ACTIVATIONS:
            raise ConfigError(f"activation must be one of {sorted(_ACTIVATIONS)}, got {activation!r}")
        if solver.lower() != "adam":
            raise ConfigError(f"only the adam solver is supported, got {solver!r}")
        if learning_rate not in ("adaptive", "constant"):
            raise ConfigError(f"learning_rate must be 'adaptive' or 'constant', got {learning_rate!r}")
        if early_stopping:
            raise ConfigError("early_stopping is not supported")
        self.hidden_layer_sizes = tuple(int(h) for h in hidden_layer_sizes)
        self.activation = activation
        self.solver = solver
        self.learning_rate = learning_rate
        self.learning_rate_init = float(learning_rate_init)
        self.alpha = float(alpha)
        self.batch_size = int(batch_size)
        self.max_iter = int(max_iter)
        self.early_stopping = early_stopping
        self.tol = tol
        self.n_iter_no_change = int(n_iter_no_change)
        self.beta_1, self.beta_2, self.epsilon = beta_1, beta_2, epsilon

    def fit(self, X, y, seed: int = 0) -> "MLPClassifier":
        X, _, self.classes_, enc = check_xy(X, y)
        Y = one_hot(enc, self.classes_.size)
        n = X.shape[0]
        rng = np.random.default_rng(seed)
        self.shapes_ = layer_shapes(X.shape[1], self.hidden_layer_sizes, self.classes_.size)
        params = init_params(self.shapes_, rng, self.activation)

        m = np.zeros_like(params)
        v = np.zeros_like(params)
        step, lr = 0, self.learning_rate_init
        best, stale = np.inf, 0
        self.loss_curve_ = []
        batch = min(self.batch_size, n)
        for _ in range(self.max_iter):
            order = rng.permutation(n)
            total = 0.0
            for s in range(0, n, batch):
                idx = order[s : s + batch]
                loss, grad = mlp_loss_and_grad(params, X[idx], Y[idx], self.shapes_, self.alpha, self.activation)
                total += loss * idx.size
                step += 1
                m = self.beta_1 * m + (1 - self.beta_1) * grad
                v = self.beta_2 * v + (1 - self.beta_2) * grad * grad
                m_hat = m / (1 - self.beta_1**step)
                v_hat = v / (1 - self.beta_2**step)
                params = params - lr * m_hat / (np.sqrt(v_hat) + self.epsilon)
            epoch_loss = total / n
            self.loss_curve_.append(epoch_loss)
            if epoch_loss > best - self.tol:
                stale += 1
            else:
                stale = 0
            best = min(best, epoch_loss)
            if stale >= self.n_iter_no_change:
                if self.learning_rate == "constant":
                    break
                lr /= 5.0
                stale = 0
                if lr < 1e-6:
                    break
        self.params_ = params
        self.n_iter_ = len(self.loss_curve_)
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = check_x(X, self.shapes_[0][0])
        act, _ = _ACTIVATIONS[self.activation]
        layers = unpack(self.params_, self.shapes_)
        a = X
        for W, b in layers[:-1]:
            a = act(a @ W + b)
        W, b = layers[-1]
        return softmax(a @ W + b)

    def predict(self, X) -> np.ndarray:
        return self.classes_[np.argmax(self.predict_proba(X), axis=1)]

    def to_state(self) -> dict:
        return {
            "classes": self.classes_.tolist(),
            "shapes": [list(s) for s in self.shapes_],
            "params": self.params_.tolist(),
        }

    def load_state(self, state: dict) -> "MLPClassifier":
        self.classes_ = np.array(state["classes"])
        self.shapes_ = [tuple(s) for s in state["shapes"]]
        self.params_ = np.array(state["params"], dtype=np.float64)
        return self
