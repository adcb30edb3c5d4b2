"""Weighted, ridge-stabilized logistic regression fitted by IRLS."""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from config.exceptions import SingularFitError, ValidationError
from learners.base_learner import LearnerModel
from models.enums import LearnerKind
from models.learner import LogisticConfig

logger = logging.getLogger(__name__)

_MAX_HALVINGS = 30


@dataclass(eq=False)
class LogisticModel(LearnerModel):
    """Intercept plus coefficient vector; scores are sigmoid(b0 + X @ beta)."""
    intercept: float
    coefficients: np.ndarray
    n_iterations: int = 0
    converged: bool = True
    objective_trace: tuple[float, ...] = field(default=(), repr=False)

    kind = LearnerKind.LOGISTIC

    def __post_init__(self) -> None:
        self.coefficients = np.asarray(self.coefficients, dtype=np.float64).ravel()
        self.intercept = float(self.intercept)

    @property
    def n_features(self) -> int:
        return int(self.coefficients.size)

    def _predict(self, X: np.ndarray) -> np.ndarray:
        return expit(self.intercept + X @ self.coefficients)


def _objective(eta: np.ndarray, y: np.ndarray, v: np.ndarray, beta: np.ndarray, ridge: float) -> float:
    loglik = np.sum(v * (y * eta - np.logaddexp(0.0, eta)))
    return float(loglik - ridge * np.dot(beta[1:], beta[1:]))


def fit_logistic(X, y, w=None, cfg: LogisticConfig | None = None) -> LogisticModel:
    """Maximize the normalized weighted log-likelihood minus ridge * ||beta||^2.

    Weights are rescaled to sum to one, so multiplying them by a constant, or
    replacing an integer weight by repeated rows, leaves the fit unchanged.
    The intercept is not penalized. Each Newton step is halved until the
    objective does not decrease; hitting ``max_iterations`` is logged, not
    raised.
    """
    cfg = cfg or LogisticConfig()
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(-1, 1)
    y = np.asarray(y, dtype=np.float64).ravel()
    n, p = X.shape
    if y.shape[0] != n:
        raise ValidationError("X and y differ in length", {"n_rows": n, "n_labels": y.shape[0]})
    w = np.ones(n) if w is None else np.asarray(w, dtype=np.float64).ravel()
    if w.shape[0] != n or np.any(w < 0) or not np.any(w > 0):
        raise ValidationError("Weights must be >= 0, not all zero, one per row")
    v = w / w.sum()

    Z = np.column_stack([np.ones(n), X])
    penalty = np.full(p + 1, 2.0 * cfg.ridge)
    penalty[0] = 0.0

    beta = np.zeros(p + 1)
    eta = Z @ beta
    objective = _objective(eta, y, v, beta, cfg.ridge)
    trace = [objective]
    converged = False
    iteration = 0

    for iteration in range(1, cfg.max_iterations + 1):
        mu = expit(eta)
        gradient = Z.T @ (v * (y - mu)) - penalty * beta
        hessian = (Z * (v * mu * (1.0 - mu))[:, None]).T @ Z + np.diag(penalty)
        try:
            step = np.linalg.solve(hessian, gradient)
        except np.linalg.LinAlgError as e:
            raise SingularFitError(
                "Singular weighted normal equations", {"iteration": iteration, "p": p}
            ) from e
        if not np.all(np.isfinite(step)):
            raise SingularFitError("Non-finite IRLS step", {"iteration": iteration})

        scale = 1.0
        for _ in range(_MAX_HALVINGS):
            candidate = beta + scale * step
            candidate_eta = Z @ candidate
            candidate_objective = _objective(candidate_eta, y, v, candidate, cfg.ridge)
            if candidate_objective >= objective:
                break
            scale *= 0.5
        else:
            # No ascent direction left at working precision.
            converged = True
            break

        change = float(np.max(np.abs(candidate - beta)))
        beta, eta, objective = candidate, candidate_eta, candidate_objective
        trace.append(objective)
        if change < cfg.tolerance:
            converged = True
            break

    if not converged:
        logger.debug("IRLS hit iteration cap (%d) before tolerance %.1e", cfg.max_iterations, cfg.tolerance)

    return LogisticModel(
        intercept=beta[0],
        coefficients=beta[1:],
        n_iterations=iteration,
        converged=converged,
        objective_trace=tuple(trace),
    )
