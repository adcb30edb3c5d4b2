"""Confounding report and target-population joint models."""

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from config.exceptions import InvalidTableError
from models.enums import MetricKind, ReferenceProvenance
from models.nulls import NullSummary

_PROB_TOLERANCE = 1e-6


@dataclass(frozen=True, eq=False)
class TargetJoint:
    """P(confounder level, label) in the target population.

    ``probabilities[j, y]`` is the mass of level ``levels[j]`` with label ``y``.
    """
    levels: tuple[str, ...]
    probabilities: np.ndarray

    def __post_init__(self) -> None:
        probs = np.array(self.probabilities, dtype=np.float64, copy=True)
        if probs.shape != (len(self.levels), 2):
            raise InvalidTableError("Target joint must be a J x 2 table",
                                    {"shape": probs.shape, "levels": len(self.levels)})
        if len(set(self.levels)) != len(self.levels):
            raise InvalidTableError("Duplicate level in target joint")
        if not np.all(np.isfinite(probs)) or np.any(probs < 0):
            raise InvalidTableError("Target joint entries must be finite and >= 0")
        if abs(probs.sum() - 1.0) > _PROB_TOLERANCE:
            raise InvalidTableError("Target joint must sum to 1", {"sum": float(probs.sum())})
        if np.any(probs.sum(axis=1) <= 0):
            raise InvalidTableError("Every target level needs positive mass")
        probs.setflags(write=False)
        object.__setattr__(self, "levels", tuple(str(level) for level in self.levels))
        object.__setattr__(self, "probabilities", probs)

    def independent(self) -> "TargetJoint":
        """Product of this table's marginals (no level/label association)."""
        level_marginal = self.probabilities.sum(axis=1)
        label_marginal = self.probabilities.sum(axis=0)
        return TargetJoint(self.levels, np.outer(level_marginal, label_marginal))


@dataclass(frozen=True)
class ReferenceResult:
    """Unconfounded estimate and p-value against one reference null."""
    provenance: ReferenceProvenance
    summary: NullSummary
    unconfounded: float
    p_value: float


@dataclass(frozen=True)
class ConfoundingReport:
    """Outcome of one confounding analysis.

    ``references[0]`` is the primary reference; the rest are shown alongside
    it for comparison (e.g. empirical vs analytic AUC reference).
    """
    metric: MetricKind
    observed: float
    restricted: NullSummary
    references: tuple[ReferenceResult, ...]
    n_test: int
    n_negative: Optional[int] = None
    n_positive: Optional[int] = None
    metadata: dict = field(default_factory=dict)

    @property
    def primary(self) -> ReferenceResult:
        return self.references[0]

    @property
    def unconfounded(self) -> float:
        return self.primary.unconfounded

    @property
    def p_value(self) -> float:
        return self.primary.p_value

    @property
    def reference(self) -> NullSummary:
        return self.primary.summary

    @property
    def provenance(self) -> ReferenceProvenance:
        return self.primary.provenance
