"""Weighted linear and logistic regression, plus R^2 and AUROC.

Both fits standardize features with the weighted mean and standard deviation
of the training rows, so a row of weight 2 and a duplicated row are the same
thing to the fit. Coefficients are stored on that
standardized scale; ``coef`` and ``intercept`` report them in raw units.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg
from scipy.stats import rankdata

from .weights import as_weight_array

DEFAULT_RIDGE = 1e-8
DEFAULT_L2 = 1e-4
LOGISTIC_TOL = 1e-8
LOGISTIC_MAX_ITER = 500


@dataclass(frozen=True, eq=False)
class Standardizer:
    shift: np.ndarray
    scale: np.ndarray

    @classmethod
    def fit(cls, X: np.ndarray, weights=None) -> "Standardizer":
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        w = np.ones(X.shape[0]) if weights is None else np.asarray(weights, dtype=np.float64)
        w = w / w.sum()
        shift = w @ X
        scale = np.sqrt(w @ (X - shift) ** 2)
        # constant columns: centre only
        scale = np.where(scale > 0, scale, 1.0)
        return cls(shift, scale)

    def transform(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(-1, 1)
        if X.shape[1] != self.shift.size:
            raise ValueError(f"expected {self.shift.size} features, got {X.shape[1]}")
        return (X - self.shift) / self.scale


class _Linear:
    std_coef: np.ndarray
    std_intercept: float
    standardizer: Standardizer

    @property
    def coef(self) -> np.ndarray:
        return self.std_coef / self.standardizer.scale

    @property
    def intercept(self) -> float:
        return float(self.std_intercept - self.coef @ self.standardizer.shift)

    def decision_function(self, X) -> np.ndarray:
        return self.standardizer.transform(X) @ self.std_coef + self.std_intercept


@dataclass(frozen=True, eq=False)
class LinearModel(_Linear):
    std_coef: np.ndarray
    std_intercept: float
    standardizer: Standardizer

    def predict(self, X) -> np.ndarray:
        return self.decision_function(X)


@dataclass(frozen=True, eq=False)
class LogisticModel(_Linear):
    std_coef: np.ndarray
    std_intercept: float
    standardizer: Standardizer
    iterations: int
    grad_norm: float
    converged: bool

    def predict_proba(self, X) -> np.ndarray:
        return _sigmoid(self.decision_function(X))


def _prepare(X, y, weights):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=np.float64)
    if X.ndim != 2 or y.shape != (X.shape[0],):
        raise ValueError(f"X has {X.shape[0]} rows but y has shape {y.shape}")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y))):
        raise ValueError("X and y must be finite")
    w = as_weight_array(weights, X.shape[0])
    active = w > 0
    if not np.any(active):
        raise ValueError("all weights are zero")
    std = Standardizer.fit(X[active], w[active])
    return std.transform(X), y, w, active, std


def fit_weighted_linear(X, y, weights=None, ridge: float = DEFAULT_RIDGE) -> LinearModel:
    """Weighted least squares on standardized features.

    Minimizes ``sum w_i (y_i - yhat_i)^2`` after rescaling the positive weights
    to mean one, which makes the fit invariant to the overall weight scale.
    Solved by SVD least squares on the square-root-weighted design. ``ridge``
    is a jitter: only when that design is rank-deficient is the problem
    re-solved with ``ridge * |beta|^2`` added (intercept not penalized).
    """
    if ridge < 0:
        raise ValueError("ridge must be non-negative")
    Xs, y, w, active, std = _prepare(X, y, weights)
    n_active = int(active.sum())
    p = Xs.shape[1]
    if n_active < p + 1:
        raise ValueError(f"need at least {p + 1} positively weighted rows, got {n_active}")
    w = w * (n_active / w[active].sum())
    sw = np.sqrt(w[active])
    A = np.column_stack([np.ones(n_active), Xs[active]]) * sw[:, None]
    b = y[active] * sw
    sol, _, rank, _ = np.linalg.lstsq(A, b, rcond=None)
    if rank < p + 1 and ridge > 0:
        penalty = np.zeros((p, p + 1))
        penalty[:, 1:] = np.sqrt(ridge) * np.eye(p)
        sol, _, rank, _ = np.linalg.lstsq(np.vstack([A, penalty]),
                                          np.concatenate([b, np.zeros(p)]), rcond=None)
    if rank < p + 1:
        raise ValueError("weighted normal equations are singular")
    return LinearModel(sol[1:], float(sol[0]), std)


def _sigmoid(z):
    return np.exp(-np.logaddexp(0.0, -z))


def logistic_objective(params, Xs, y, w, l2: float = DEFAULT_L2):
    """Penalized weighted negative log-likelihood and its gradient.

    ``params[0]`` is the intercept, which is not penalized.
    """
    z = params[0] + Xs @ params[1:]
    loss = np.dot(w, np.logaddexp(0.0, z) - y * z) + 0.5 * l2 * np.dot(params[1:], params[1:])
    resid = w * (_sigmoid(z) - y)
    grad = np.concatenate(([resid.sum()], Xs.T @ resid + l2 * params[1:]))
    return float(loss), grad


def fit_weighted_logistic(X, y, weights=None, l2: float = DEFAULT_L2, *,
                          tol: float = LOGISTIC_TOL,
                          max_iter: int = LOGISTIC_MAX_ITER) -> LogisticModel:
    """Damped Newton iterations on the penalized weighted log-likelihood.

    Deterministic: full-batch steps with a backtracking line search, stopping
    once the gradient's max-norm is at most ``tol``.
    """
    if l2 < 0:
        raise ValueError("l2 must be non-negative")
    Xs, y, w, active, std = _prepare(X, y, weights)
    if not np.all((y == 0) | (y == 1)):
        raise ValueError("logistic regression needs labels in {0, 1}")
    present = np.unique(y[active])
    if present.size < 2:
        raise ValueError("logistic regression needs both classes among weighted rows")
    Xs, y, w = Xs[active], y[active], w[active]
    D = np.column_stack([np.ones(Xs.shape[0]), Xs])
    p = D.shape[1]
    reg = l2 * np.eye(p)
    reg[0, 0] = 0.0

    params = np.zeros(p)
    loss, grad = logistic_objective(params, Xs, y, w, l2)
    it = 0
    while np.max(np.abs(grad)) > tol and it < max_iter:
        it += 1
        prob = _sigmoid(D @ params)
        H = D.T @ (D * (w * prob * (1.0 - prob))[:, None]) + reg
        try:
            step = scipy.linalg.solve(H, grad, assume_a="pos")
        except (scipy.linalg.LinAlgError, ValueError):
            step = np.linalg.lstsq(H, grad, rcond=None)[0]
        gmax = np.max(np.abs(grad))
        slack = 1e-13 * (abs(loss) + 1.0)
        t = 1.0
        while t >= 1e-10:
            cand = params - t * step
            cand_loss, cand_grad = logistic_objective(cand, Xs, y, w, l2)
            if cand_loss <= loss - 1e-4 * t * np.dot(grad, step):
                break
            # near the optimum the loss change drowns in rounding
            if cand_loss <= loss + slack and np.max(np.abs(cand_grad)) < gmax:
                break
            t *= 0.5
        else:
            break
        params, loss, grad = cand, cand_loss, cand_grad
    gnorm = float(np.max(np.abs(grad)))
    return LogisticModel(params[1:], float(params[0]), std, it, gnorm, gnorm <= tol)


def r2_score(y_true, y_pred) -> float:
    y_true = np.asarray(y_true, dtype=np.float64)
    y_pred = np.asarray(y_pred, dtype=np.float64)
    if y_true.shape != y_pred.shape or y_true.ndim != 1:
        raise ValueError("y_true and y_pred must be 1-D and the same length")
    if y_true.size < 2:
        raise ValueError("R^2 needs at least two points")
    ss_tot = np.sum((y_true - y_true.mean()) ** 2)
    if ss_tot == 0:
        raise ValueError("R^2 is undefined for constant y_true")
    return float(1.0 - np.sum((y_true - y_pred) ** 2) / ss_tot)


def auroc(labels, scores) -> float:
    """Area under the ROC curve via the rank-sum statistic; ties count one half."""
    labels = np.asarray(labels, dtype=np.float64)
    scores = np.asarray(scores, dtype=np.float64)
    if labels.shape != scores.shape or labels.ndim != 1:
        raise ValueError("labels and scores must be 1-D and the same length")
    if not np.all((labels == 0) | (labels == 1)):
        raise ValueError("labels must be 0 or 1")
    n_pos = int(labels.sum())
    n_neg = labels.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("AUROC needs both classes")
    ranks = rankdata(scores)
    u = ranks[labels == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))
