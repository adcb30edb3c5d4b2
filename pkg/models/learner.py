"""Learner specification models."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from config.exceptions import InvalidConfigError
from models.enums import LearnerKind


@dataclass(frozen=True)
class LogisticConfig:
    max_iterations: int = 100
    tolerance: float = 1e-8
    ridge: float = 1e-6

    def __post_init__(self) -> None:
        if self.max_iterations < 1:
            raise InvalidConfigError("max_iterations must be >= 1")
        if self.tolerance <= 0:
            raise InvalidConfigError("tolerance must be > 0")
        if self.ridge < 0:
            raise InvalidConfigError("ridge must be >= 0")


@dataclass(frozen=True)
class ForestConfig:
    n_trees: int = 200
    max_depth: int = 8
    min_leaf: int = 5
    features_per_split: Optional[int] = None  # None -> ceil(sqrt(p))
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_trees < 1:
            raise InvalidConfigError("n_trees must be >= 1")
        if self.max_depth < 0:
            raise InvalidConfigError("max_depth must be >= 0")
        if self.min_leaf < 1:
            raise InvalidConfigError("min_leaf must be >= 1")
        if self.features_per_split is not None and self.features_per_split < 1:
            raise InvalidConfigError("features_per_split must be >= 1")


@dataclass(frozen=True)
class LearnerSpec:
    """Which learner to fit and its frozen hyperparameters."""
    kind: LearnerKind = LearnerKind.LOGISTIC
    logistic: LogisticConfig = field(default_factory=LogisticConfig)
    forest: ForestConfig = field(default_factory=ForestConfig)

    @classmethod
    def from_settings(cls, settings, kind: LearnerKind | str = LearnerKind.LOGISTIC) -> "LearnerSpec":
        return cls(
            kind=LearnerKind(kind),
            logistic=LogisticConfig(
                max_iterations=settings.logistic_max_iterations,
                tolerance=settings.logistic_tolerance,
                ridge=settings.logistic_ridge,
            ),
            forest=ForestConfig(
                n_trees=settings.forest_n_trees,
                max_depth=settings.forest_max_depth,
                min_leaf=settings.forest_min_leaf,
                features_per_split=settings.forest_features_per_split,
                seed=settings.forest_seed,
            ),
        )

    def with_forest_seed(self, seed: int) -> "LearnerSpec":
        return replace(self, forest=replace(self.forest, seed=seed))
