"""Simulation scenario and power-curve models."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from config.exceptions import InvalidConfigError, InvalidTableError


def validate_joint(joint) -> np.ndarray:
    """Return a validated 2x2 table P(C=c, Y=y) indexed [c, y]."""
    table = np.array(joint, dtype=np.float64, copy=True)
    if table.shape != (2, 2):
        raise InvalidTableError("Joint table must be 2 x 2", {"shape": table.shape})
    if not np.all(np.isfinite(table)) or np.any(table < 0):
        raise InvalidTableError("Joint table entries must be finite and >= 0")
    if abs(table.sum() - 1.0) > 1e-9:
        raise InvalidTableError("Joint table must sum to 1", {"sum": float(table.sum())})
    table.setflags(write=False)
    return table


def independent_joint(p_c: float, p_y: float) -> np.ndarray:
    """2x2 table with P(C=1)=p_c, P(Y=1)=p_y and no association."""
    return np.outer([1 - p_c, p_c], [1 - p_y, p_y])


@dataclass(frozen=True, eq=False)
class SimScenario:
    """Bivariate Bernoulli (C, Y) plus linear-Gaussian features.

    X_ij = beta_y * Y_i + beta_c * C_i + e_ij with e_ij ~ N(0, 1). When ``b``
    is None the permutation count equals the test-set size.
    """
    name: str
    joint: np.ndarray
    n_samples: int = 600
    n_features: int = 10
    beta_y: float = 0.0
    beta_c: float = 0.0
    test_fraction: float = 0.5
    b: Optional[int] = None
    seed: Optional[int] = None
    noise_sd: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "joint", validate_joint(self.joint))
        if self.n_samples < 4:
            raise InvalidConfigError("n_samples must be >= 4", {"scenario": self.name})
        if self.n_features < 1:
            raise InvalidConfigError("n_features must be >= 1", {"scenario": self.name})
        if not 0 < self.test_fraction < 1:
            raise InvalidConfigError("test_fraction must lie in (0, 1)", {"scenario": self.name})
        if self.b is not None and self.b < 2:
            raise InvalidConfigError("b must be >= 2", {"scenario": self.name})
        if self.noise_sd != 1.0:
            raise InvalidConfigError("noise_sd is fixed at 1", {"scenario": self.name})

    @property
    def association(self) -> float:
        """Odds ratio of the (C, Y) table; inf when an off-diagonal cell is 0."""
        t = self.joint
        num, den = t[1, 1] * t[0, 0], t[1, 0] * t[0, 1]
        return float("inf") if den == 0 else float(num / den)


@dataclass(frozen=True, eq=False)
class PowerCurve:
    """Empirical rejection proportion over a grid of nominal levels."""
    alphas: np.ndarray
    power: np.ndarray
    replicates: int

    def __post_init__(self) -> None:
        alphas = np.asarray(self.alphas, dtype=np.float64)
        power = np.asarray(self.power, dtype=np.float64)
        if alphas.shape != power.shape:
            raise InvalidConfigError("alpha grid and power vector differ in length")
        if np.any(power < 0) or np.any(power > 1):
            raise InvalidConfigError("power must lie in [0, 1]")
        assert np.all(np.diff(power) >= 0), "power curve must be non-decreasing in alpha"
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "power", power)

    def at(self, alpha: float) -> float:
        idx = int(np.argmin(np.abs(self.alphas - alpha)))
        return float(self.power[idx])

    def standard_errors(self) -> np.ndarray:
        return np.sqrt(self.power * (1 - self.power) / self.replicates)
