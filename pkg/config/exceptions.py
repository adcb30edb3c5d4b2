"""Custom exception hierarchy for confounding analysis."""

from typing import Optional


class ConfoundLabError(Exception):
    """Base exception for all confoundlab errors."""

    exit_code: int = 1

    def __init__(self, message: str, details: Optional[dict] = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)

    def __str__(self) -> str:
        if self.details:
            detail_str = ", ".join(f"{k}={v}" for k, v in self.details.items())
            return f"{self.message} ({detail_str})"
        return self.message


# ---- Schema Errors ----

class SchemaError(ConfoundLabError):
    """Input file does not match the declared column schema."""

    exit_code = 3


class MissingColumnError(SchemaError):
    """A column named by the schema is absent from the header."""

    def __init__(self, column: str, path: str = ""):
        details = {"column": column}
        if path:
            details["path"] = path
        super().__init__(f"Missing column: {column}", details)
        self.column = column


class EmptyFileError(SchemaError):
    """File has no header or no data rows."""


class NonNumericCellError(SchemaError):
    """A feature cell could not be parsed as a finite real."""

    def __init__(self, column: str, row: int, value: str):
        super().__init__(
            f"Non-numeric feature cell in column {column}",
            {"column": column, "row": row, "value": value},
        )


class InvalidLabelError(SchemaError):
    """A label cell is not exactly 0 or 1."""

    def __init__(self, row: int, value: str):
        super().__init__("invalid label", {"row": row, "value": value})


class MissingValueError(SchemaError):
    """Empty cell encountered; missing values are unsupported."""

    def __init__(self, column: str, row: int):
        super().__init__(f"Missing value in column {column}", {"column": column, "row": row})


class ContinuousConfounderError(SchemaError):
    """Continuous confounder supplied without a discretization spec."""

    def __init__(self, column: str, n_levels: int):
        super().__init__(
            f"Confounder column {column} looks continuous; supply discretize.{column}",
            {"column": column, "distinct_values": n_levels},
        )


# ---- Numeric Errors ----

class NumericError(ConfoundLabError):
    """Numerical computation could not proceed."""

    exit_code = 4


class DegenerateNullError(NumericError):
    """Null distribution has zero spread or too few samples."""


class SingularFitError(NumericError):
    """Weighted normal equations are singular despite the ridge term."""


class LearnerFitError(NumericError):
    """Learner failed to fit."""


class SingleClassError(NumericError):
    """Only one class present where both are required."""


# ---- Infeasibility Errors ----

class InfeasibleError(ConfoundLabError):
    """Requested sampling design cannot be realized with the available data."""

    exit_code = 5


class CellTooSmallError(InfeasibleError):
    """A (level, label) cell cannot place a sample on both sides of a split."""

    def __init__(self, level: str, label: int, size: int):
        super().__init__(
            "Cell too small to split",
            {"level": level, "label": label, "size": size},
        )


class NoMatchableStratumError(InfeasibleError):
    """No confounder stratum contains both cases and controls."""


class InfeasibleSubsampleError(InfeasibleError):
    """Development data cannot realize the target joint at the requested size."""


# ---- Validation Errors ----

class ValidationError(ConfoundLabError):
    """Input validation failed."""

    exit_code = 2


class InvalidConfigError(ValidationError):
    """Configuration value is invalid."""


class LengthMismatchError(ValidationError):
    """Vectors that must align have different lengths."""

    def __init__(self, *lengths: int):
        super().__init__("Length mismatch", {"lengths": list(lengths)})


class DiscretizationError(ValidationError):
    """Value outside every interval of a discretization spec."""


class InvalidTableError(ValidationError):
    """Probability table is malformed."""
