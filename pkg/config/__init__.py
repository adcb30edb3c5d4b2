"""Configuration package: settings, run config, logging, and exceptions."""

from config.exceptions import (
    ConfoundLabError,
    SchemaError,
    MissingColumnError,
    EmptyFileError,
    NonNumericCellError,
    InvalidLabelError,
    MissingValueError,
    ContinuousConfounderError,
    NumericError,
    DegenerateNullError,
    SingularFitError,
    LearnerFitError,
    SingleClassError,
    InfeasibleError,
    CellTooSmallError,
    NoMatchableStratumError,
    InfeasibleSubsampleError,
    ValidationError,
    InvalidConfigError,
    LengthMismatchError,
    DiscretizationError,
    InvalidTableError,
)
from config.logging_config import setup_logging
from config.settings import Settings, get_settings

__all__ = [
    "Settings",
    "get_settings",
    "setup_logging",
    "ConfoundLabError",
    "SchemaError",
    "MissingColumnError",
    "EmptyFileError",
    "NonNumericCellError",
    "InvalidLabelError",
    "MissingValueError",
    "ContinuousConfounderError",
    "NumericError",
    "DegenerateNullError",
    "SingularFitError",
    "LearnerFitError",
    "SingleClassError",
    "InfeasibleError",
    "CellTooSmallError",
    "NoMatchableStratumError",
    "InfeasibleSubsampleError",
    "ValidationError",
    "InvalidConfigError",
    "LengthMismatchError",
    "DiscretizationError",
    "InvalidTableError",
]
