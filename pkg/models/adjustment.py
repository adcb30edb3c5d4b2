"""Propensity-score and balance-table models."""

from dataclasses import dataclass

import numpy as np

from config.exceptions import ValidationError


@dataclass(frozen=True, eq=False)
class PropensityScores:
    """P(label=1 | confounders), clipped into (0, 1)."""
    scores: np.ndarray
    model: object = None

    def __post_init__(self) -> None:
        scores = np.array(self.scores, dtype=np.float64, copy=True).ravel()
        if np.any(scores <= 0) or np.any(scores >= 1):
            raise ValidationError("Propensity scores must lie strictly inside (0, 1)")
        scores.setflags(write=False)
        object.__setattr__(self, "scores", scores)

    def __len__(self) -> int:
        return int(self.scores.size)


@dataclass(frozen=True, eq=False)
class BalanceTable:
    """Per-level (label 0, label 1) masses; integer counts unless weighted."""
    levels: tuple[str, ...]
    counts: np.ndarray
    weighted: bool = False

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts, dtype=np.float64)
        if counts.shape != (len(self.levels), 2) or np.any(counts < 0):
            raise ValidationError("Balance table must be a non-negative K x 2 table")
        object.__setattr__(self, "counts", counts)

    @property
    def level_totals(self) -> np.ndarray:
        return self.counts.sum(axis=1)

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    @property
    def case_fractions(self) -> np.ndarray:
        """Case share per level; 0 for a level with no mass."""
        totals = self.level_totals
        return np.divide(self.counts[:, 1], totals, out=np.zeros_like(totals), where=totals > 0)

    @property
    def global_case_fraction(self) -> float:
        return float(self.counts[:, 1].sum() / self.total)

    def rows(self) -> list[tuple[str, float, float, float]]:
        """(level, controls, cases, case fraction) per level."""
        return [
            (level, float(c[0]), float(c[1]), float(frac))
            for level, c, frac in zip(self.levels, self.counts, self.case_fractions)
        ]
