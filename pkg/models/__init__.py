"""Models package: datasets, nulls, reports, scenarios, and enums."""

from models.adjustment import BalanceTable, PropensityScores
from models.dataset import ColumnSchema, Dataset, DiscretizationSpec, LevelVector, SplitIndices
from models.enums import (
    AdjustMethod,
    ExperimentKind,
    IPWMode,
    LearnerKind,
    MetricKind,
    PermutationScheme,
    ReferenceMode,
    ReferenceProvenance,
)
from models.learner import ForestConfig, LearnerSpec, LogisticConfig
from models.nulls import NullDistribution, NullSummary
from models.report import ConfoundingReport, ReferenceResult, TargetJoint
from models.scenario import PowerCurve, SimScenario
from models.scores import ScoredTestSet

__all__ = [
    "BalanceTable",
    "PropensityScores",
    "ColumnSchema",
    "Dataset",
    "DiscretizationSpec",
    "LevelVector",
    "SplitIndices",
    "AdjustMethod",
    "ExperimentKind",
    "IPWMode",
    "LearnerKind",
    "MetricKind",
    "PermutationScheme",
    "ReferenceMode",
    "ReferenceProvenance",
    "ForestConfig",
    "LearnerSpec",
    "LogisticConfig",
    "NullDistribution",
    "NullSummary",
    "ConfoundingReport",
    "ReferenceResult",
    "TargetJoint",
    "PowerCurve",
    "SimScenario",
    "ScoredTestSet",
]
