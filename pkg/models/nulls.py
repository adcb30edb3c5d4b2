"""Null distribution and summary models."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from config.exceptions import ValidationError
from models.enums import MetricKind, PermutationScheme


@dataclass(frozen=True, eq=False)
class NullDistribution:
    """Monte Carlo metric samples m*_1..m*_b from one permutation scheme."""
    samples: np.ndarray
    scheme: PermutationScheme
    metric: MetricKind

    def __post_init__(self) -> None:
        samples = np.array(self.samples, dtype=np.float64, copy=True).ravel()
        if samples.size < 1:
            raise ValidationError("Null distribution needs b >= 1 samples")
        if not np.all(np.isfinite(samples)):
            raise ValidationError("Null distribution contains non-finite samples")
        samples.setflags(write=False)
        object.__setattr__(self, "samples", samples)

    @property
    def b(self) -> int:
        return int(self.samples.size)

    @property
    def summary_defined(self) -> bool:
        """False for single-sample nulls, whose spread is undefined."""
        return self.b >= 2


@dataclass(frozen=True)
class NullSummary:
    """Gaussian summary of a null: mean, sample sd (divisor b-1), count.

    ``count`` is None for analytic summaries that have no Monte Carlo samples.
    """
    mean: float
    sd: float
    count: Optional[int] = None

    def __post_init__(self) -> None:
        if not np.isfinite(self.mean) or not np.isfinite(self.sd) or self.sd < 0:
            raise ValidationError("Null summary needs a finite mean and sd >= 0",
                                  {"mean": self.mean, "sd": self.sd})

    @property
    def variance(self) -> float:
        return self.sd ** 2
