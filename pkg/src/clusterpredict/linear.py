"""Logistic regression and linear SVM baselines."""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, DimensionMismatch, LambdaZero, NonFiniteLoss, ShapeMismatch
from .featurizer import as_dense, as_dense_row
from .seeding import check_seed

LR_FLOOR = 1e-6


class LinearKind(str, enum.Enum):
    LOGISTIC = "logistic"
    SVM = "svm"


@dataclass(frozen=True)
class GdConfig:
    learning_rate: float = 0.1
    l2_lambda: float = 1e-3
    epochs: int = 200
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")
        if self.l2_lambda < 0:
            raise ConfigError(f"l2_lambda must be >= 0, got {self.l2_lambda}")
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        check_seed(self.seed)


SVM_DEFAULTS = GdConfig(learning_rate=1.0)


@dataclass(frozen=True, eq=False)
class LinearModel:
    weights: np.ndarray
    bias: float
    kind: LinearKind
    training_meta: dict = field(default_factory=dict)

    @property
    def n_cols(self) -> int:
        return self.weights.shape[0]

    @property
    def threshold(self) -> float:
        """Decision threshold on :meth:`scores` (score >= threshold is Positive)."""
        return 0.5 if self.kind is LinearKind.LOGISTIC else 0.0

    def scores(self, matrix) -> np.ndarray:
        X = as_dense(matrix)
        if X.shape[1] != self.n_cols:
            raise DimensionMismatch(f"matrix has {X.shape[1]} columns, model expects {self.n_cols}")
        margin = X @ self.weights + self.bias
        return sigmoid(margin) if self.kind is LinearKind.LOGISTIC else margin

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "weights": self.weights.tolist(), "bias": self.bias}

    @classmethod
    def from_json(cls, data: dict) -> "LinearModel":
        return cls(np.asarray(data["weights"], dtype=np.float64), float(data["bias"]),
                   LinearKind(data["kind"]))


def sigmoid(z):
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _check_xy(matrix, labels):
    X = as_dense(matrix)
    y = np.asarray(labels, dtype=np.float64)
    if y.ndim != 1 or y.shape[0] != X.shape[0]:
        raise ShapeMismatch(f"{y.size} labels for {X.shape[0]} rows")
    if X.shape[0] == 0:
        raise ShapeMismatch("cannot train on zero rows")
    return X, y


def logistic_loss_grad(w: np.ndarray, b: float, X: np.ndarray, y: np.ndarray, l2_lambda: float):
    """Mean negative log-likelihood plus ``l2/2 * |w|^2`` and its gradient.

    Returns ``(loss, grad_w, grad_b)``. The bias is not regularized.
    """
    z = X @ w + b
    loss = float(np.mean(np.logaddexp(0.0, z) - y * z) + 0.5 * l2_lambda * (w @ w))
    resid = sigmoid(z) - y
    grad_w = X.T @ resid / X.shape[0] + l2_lambda * w
    grad_b = float(resid.mean())
    return loss, grad_w, grad_b


def logistic_fit(matrix, labels, config: GdConfig = GdConfig()) -> LinearModel:
    """Full-batch gradient descent from zero with step halving on any loss increase.

    Training stops early once the step would have to fall below ``1e-6``.
    """
    X, y = _check_xy(matrix, labels)
    if np.any((y != 0) & (y != 1)):
        raise ValueError("logistic labels must be 0 or 1")
    w = np.zeros(X.shape[1])
    b = 0.0
    lr = config.learning_rate
    loss, gw, gb = logistic_loss_grad(w, b, X, y, config.l2_lambda)
    history = [loss]
    accepted = 0
    for _ in range(config.epochs):
        while True:
            w_new, b_new = w - lr * gw, b - lr * gb
            new_loss, new_gw, new_gb = logistic_loss_grad(w_new, b_new, X, y, config.l2_lambda)
            if np.isfinite(new_loss) and new_loss < loss:
                break
            lr /= 2.0
            if lr < LR_FLOOR:
                if not np.isfinite(new_loss):
                    raise NonFiniteLoss(f"loss diverged even at learning rate {lr * 2:g}")
                break
        if lr < LR_FLOOR:
            break
        w, b, loss, gw, gb = w_new, b_new, new_loss, new_gw, new_gb
        history.append(loss)
        accepted += 1
    if not np.all(np.isfinite(w)) or not np.isfinite(b):
        raise NonFiniteLoss("non-finite weights after training")
    meta = {"iterations": accepted, "final_loss": loss, "loss_history": tuple(history),
            "final_learning_rate": lr}
    return LinearModel(w, float(b), LinearKind.LOGISTIC, meta)


def _pm_one(y: np.ndarray) -> np.ndarray:
    if np.all((y == 0) | (y == 1)):
        return 2.0 * y - 1.0
    if np.all((y == -1) | (y == 1)):
        return y
    raise ValueError("SVM labels must be in {0, 1} or {-1, +1}")


def svm_objective(w: np.ndarray, b: float, X: np.ndarray, y_pm: np.ndarray, l2_lambda: float) -> float:
    hinge = np.maximum(0.0, 1.0 - y_pm * (X @ w + b))
    return float(0.5 * l2_lambda * (w @ w + b * b) + hinge.mean())


def svm_fit(matrix, labels, config: GdConfig = SVM_DEFAULTS) -> LinearModel:
    """Full-batch primal subgradient descent on the L2-regularized mean hinge loss.

    Step ``t`` (1-based) is ``min(learning_rate, 1 / (l2_lambda * t))``, so
    ``learning_rate`` caps the early steps of the ``1 / (l2_lambda * t)``
    schedule, which would otherwise start at ``1 / l2_lambda``. Each step is
    projected onto the ball of radius ``1 / sqrt(l2_lambda)``, which holds the
    optimum, and the returned model is the average of the iterates from the
    second half of training; the last iterate alone keeps bouncing around the
    kinks of the hinge. The bias is folded in as a constant feature and
    shrunk with the weights.

    ``training_meta["objective_history"]`` traces the current iterate for the
    first half and the running average after that, so its last entry is the
    objective of the returned model.
    """
    X, y = _check_xy(matrix, labels)
    y = _pm_one(y)
    if config.l2_lambda == 0:
        raise LambdaZero("the projection radius 1/sqrt(l2_lambda) needs l2_lambda > 0")
    lam = config.l2_lambda
    radius = 1.0 / np.sqrt(lam)
    n = X.shape[0]
    w = np.zeros(X.shape[1])
    b = 0.0
    w_avg, b_avg, n_avg = w, b, 0
    start_avg = config.epochs // 2 + 1
    history = [svm_objective(w, b, X, y, lam)]
    for t in range(1, config.epochs + 1):
        eta = min(config.learning_rate, 1.0 / (lam * t))
        active = y * (X @ w + b) < 1.0
        gw = lam * w - X[active].T @ y[active] / n
        gb = lam * b - y[active].sum() / n
        w = w - eta * gw
        b = b - eta * gb
        norm = np.sqrt(w @ w + b * b)
        if norm > radius:
            w, b = w * (radius / norm), b * (radius / norm)
        if t < start_avg:
            history.append(svm_objective(w, b, X, y, lam))
            continue
        n_avg += 1
        w_avg = w_avg + (w - w_avg) / n_avg if n_avg > 1 else w
        b_avg = b_avg + (b - b_avg) / n_avg if n_avg > 1 else b
        history.append(svm_objective(w_avg, b_avg, X, y, lam))
    if not np.all(np.isfinite(w_avg)) or not np.isfinite(b_avg):
        raise NonFiniteLoss("non-finite SVM weights")
    meta = {"iterations": config.epochs, "final_loss": history[-1],
            "objective_history": tuple(history)}
    return LinearModel(w_avg, float(b_avg), LinearKind.SVM, meta)


def linear_score(model: LinearModel, row) -> float:
    """Sigmoid probability for logistic models, raw margin for SVMs."""
    x = as_dense_row(row, model.n_cols)
    return float(model.scores(x[None, :])[0])
