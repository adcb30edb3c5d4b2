"""Base class shared by fitted learner models."""

from abc import ABC, abstractmethod

import numpy as np

from config.exceptions import ValidationError
from models.enums import LearnerKind


class LearnerModel(ABC):
    """A fitted classifier scoring feature rows with P(label = 1)."""

    kind: LearnerKind
    n_features: int

    def _check_matrix(self, X) -> np.ndarray:
        X = np.asarray(X, dtype=np.float64)
        if X.ndim == 1:
            X = X.reshape(1, -1)
        if X.ndim != 2 or X.shape[1] != self.n_features:
            raise ValidationError(
                "Feature dimension mismatch",
                {"expected": self.n_features, "got": X.shape[-1] if X.ndim else 0},
            )
        return X

    def predict_proba(self, X) -> np.ndarray:
        """Scores in [0, 1], one per row of ``X``."""
        return self._predict(self._check_matrix(X))

    @abstractmethod
    def _predict(self, X: np.ndarray) -> np.ndarray:
        ...
