"""Scored test set model."""

from dataclasses import dataclass

import numpy as np

from config.exceptions import LengthMismatchError, ValidationError


@dataclass(frozen=True, eq=False)
class ScoredTestSet:
    """Predicted scores paired with observed labels."""
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self) -> None:
        scores = np.asarray(self.scores, dtype=np.float64).ravel()
        labels = np.asarray(self.labels, dtype=np.float64).ravel()
        if scores.shape != labels.shape:
            raise LengthMismatchError(int(scores.size), int(labels.size))
        if scores.size == 0:
            raise ValidationError("Scored test set is empty")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels)

    @property
    def m(self) -> int:
        return int(self.scores.size)

    @property
    def n_positive(self) -> int:
        return int(np.count_nonzero(self.labels == 1))

    @property
    def n_negative(self) -> int:
        return int(np.count_nonzero(self.labels == 0))
