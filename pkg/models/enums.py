"""Enumerations for metrics, permutation schemes, learners and adjustments."""

from enum import Enum


class MetricKind(str, Enum):
    AUC = "auc"
    ACCURACY = "accuracy"
    MSE = "mse"
    MAE = "mae"


class PermutationScheme(str, Enum):
    RESTRICTED = "restricted"
    STANDARD = "standard"
    BASELINE = "baseline"


class LearnerKind(str, Enum):
    LOGISTIC = "logistic"
    FOREST = "forest"


class ReferenceProvenance(str, Enum):
    EMPIRICAL_STANDARD = "empirical-standard"
    ANALYTIC_AUC = "analytic-auc"
    BASELINE_TARGET = "baseline-target"


class ReferenceMode(str, Enum):
    """Which standard-null reference to build for AUC analyses."""
    ANALYTIC = "analytic"
    EMPIRICAL = "empirical"
    BOTH = "both"


class AdjustMethod(str, Enum):
    MATCH = "match"
    IPW_WEIGHTS = "ipw-weights"
    IPW_RESAMPLE = "ipw-resample"


class IPWMode(str, Enum):
    WEIGHTS = "weights"
    RESAMPLE = "resample"


class ExperimentKind(str, Enum):
    POWER = "power"
    TYPE1 = "type1"
