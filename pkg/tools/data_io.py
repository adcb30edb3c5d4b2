"""CSV/TSV ingestion and emission for datasets, nulls and result tables."""

import logging
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd

from config.exceptions import (
    ConfoundLabError,
    ContinuousConfounderError,
    EmptyFileError,
    InvalidLabelError,
    InvalidTableError,
    MissingColumnError,
    MissingValueError,
    NonNumericCellError,
)
from models.dataset import ColumnSchema, Dataset, LevelVector, SplitIndices
from models.enums import MetricKind, PermutationScheme
from models.nulls import NullDistribution
from models.report import TargetJoint
from tools.preprocessing import combine_confounders, discretize

logger = logging.getLogger(__name__)

DEFAULT_MAX_CATEGORICAL_LEVELS = 10
WEIGHT_COLUMN = "weight"
FLOAT_FORMAT = "%.17g"


def read_frame(path: str | Path) -> pd.DataFrame:
    """Read a CSV file as stripped strings, header required."""
    path = Path(path)
    if not path.exists():
        raise ConfoundLabError("File not found", {"path": str(path)})
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding="utf-8")
    except pd.errors.EmptyDataError as e:
        raise EmptyFileError("File is empty", {"path": str(path)}) from e
    if frame.shape[0] == 0:
        raise EmptyFileError("File has a header but no data rows", {"path": str(path)})
    frame.columns = [str(c).strip() for c in frame.columns]
    return frame.apply(lambda col: col.str.strip())


def write_frame(frame: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, lineterminator="\n", float_format=FLOAT_FORMAT)
    return path


def _require_columns(frame: pd.DataFrame, columns, source: str) -> None:
    for column in columns:
        if column not in frame.columns:
            raise MissingColumnError(column, source)


def _line_number(position: int) -> int:
    # header is line 1
    return position + 2


def _parse_reals(frame: pd.DataFrame, column: str) -> np.ndarray:
    cells = frame[column]
    empty = np.flatnonzero((cells == "").to_numpy())
    if empty.size:
        raise MissingValueError(column, _line_number(int(empty[0])))
    checked = pd.to_numeric(cells, errors="coerce").to_numpy(dtype=np.float64)
    bad = np.flatnonzero(~np.isfinite(checked))
    if bad.size:
        pos = int(bad[0])
        raise NonNumericCellError(column, _line_number(pos), cells.iloc[pos])
    # float() reads repr output back bit for bit
    return np.array([float(cell) for cell in cells], dtype=np.float64)


def _parse_labels(frame: pd.DataFrame, column: str) -> np.ndarray:
    cells = frame[column]
    bad = np.flatnonzero(~cells.isin(("0", "1")).to_numpy())
    if bad.size:
        pos = int(bad[0])
        raise InvalidLabelError(_line_number(pos), cells.iloc[pos])
    return (cells == "1").to_numpy().astype(np.int64)


def _parse_confounder(
    frame: pd.DataFrame,
    column: str,
    schema: ColumnSchema,
    max_categorical_levels: int,
) -> LevelVector:
    spec = schema.discretize.get(column)
    if spec is not None:
        return discretize(_parse_reals(frame, column), spec)
    cells = frame[column]
    empty = np.flatnonzero((cells == "").to_numpy())
    if empty.size:
        raise MissingValueError(column, _line_number(int(empty[0])))
    numeric = pd.to_numeric(cells, errors="coerce")
    n_distinct = int(cells.nunique())
    if numeric.notna().all() and n_distinct > max_categorical_levels:
        raise ContinuousConfounderError(column, n_distinct)
    return LevelVector.from_values(cells.tolist())


def frame_to_dataset(
    frame: pd.DataFrame,
    schema: ColumnSchema,
    source: str = "",
    max_categorical_levels: int = DEFAULT_MAX_CATEGORICAL_LEVELS,
) -> Dataset:
    """Build a Dataset from a string-typed frame according to ``schema``."""
    reserved = schema.reserved_columns()
    _require_columns(frame, reserved, source)
    if schema.features is None:
        feature_columns = [c for c in frame.columns if c not in reserved]
        if not feature_columns:
            raise MissingColumnError("<features>", source)
    else:
        feature_columns = list(schema.features)
        _require_columns(frame, feature_columns, source)

    features = np.column_stack([_parse_reals(frame, c) for c in feature_columns])
    labels = _parse_labels(frame, schema.label)

    confounder = _parse_confounder(frame, schema.confounders[0], schema, max_categorical_levels)
    for column in schema.confounders[1:]:
        confounder = combine_confounders(
            confounder, _parse_confounder(frame, column, schema, max_categorical_levels)
        )
    # Re-encode so only observed levels remain, in first-appearance order.
    confounder = LevelVector.from_values(confounder.labels())

    weights: Optional[np.ndarray] = None
    if schema.weight:
        weights = _parse_reals(frame, schema.weight)

    return Dataset(
        features=features,
        labels=labels,
        confounder=confounder,
        weights=weights,
        feature_names=tuple(feature_columns),
        label_name=schema.label,
        confounder_name="*".join(schema.confounders),
    )


def load_csv(
    path: str | Path,
    schema: ColumnSchema,
    max_categorical_levels: int = DEFAULT_MAX_CATEGORICAL_LEVELS,
) -> Dataset:
    """Load a CSV file into a Dataset; confounder levels by first appearance."""
    frame = read_frame(path)
    ds = frame_to_dataset(frame, schema, str(path), max_categorical_levels)
    logger.info("Loaded %s: n=%d p=%d levels=%d", path, ds.n, ds.p, ds.confounder.n_levels)
    return ds


def load_split(
    train_path: str | Path,
    test_path: str | Path,
    schema: ColumnSchema,
    max_categorical_levels: int = DEFAULT_MAX_CATEGORICAL_LEVELS,
) -> tuple[Dataset, SplitIndices]:
    """Load train and test files with one shared level encoding (train rows first)."""
    train = read_frame(train_path)
    test = read_frame(test_path)
    frame = pd.concat([train, test], ignore_index=True)
    ds = frame_to_dataset(frame, schema, f"{train_path}+{test_path}", max_categorical_levels)
    n_train = train.shape[0]
    split = SplitIndices(train=np.arange(n_train), test=np.arange(n_train, ds.n))
    logger.info("Loaded split: %d train / %d test", n_train, ds.n - n_train)
    return ds, split


def dataset_to_frame(ds: Dataset) -> pd.DataFrame:
    columns: dict[str, list[str]] = {}
    for j, name in enumerate(ds.feature_names):
        columns[name] = [repr(float(v)) for v in ds.features[:, j]]
    columns[ds.label_name] = [str(int(v)) for v in ds.labels]
    columns[ds.confounder_name] = ds.confounder.labels()
    if ds.weights is not None:
        columns[WEIGHT_COLUMN] = [repr(float(v)) for v in ds.weights]
    return pd.DataFrame(columns)


def dataset_schema(ds: Dataset) -> ColumnSchema:
    """Schema that reads back what ``write_csv`` emits for ``ds``."""
    return ColumnSchema(
        label=ds.label_name,
        confounders=(ds.confounder_name,),
        features=ds.feature_names,
        weight=WEIGHT_COLUMN if ds.weights is not None else None,
    )


def write_csv(ds: Dataset, path: str | Path) -> Path:
    """Write features, label, confounder level names and optional weights."""
    return write_frame(dataset_to_frame(ds), path)


def write_null_tsv(nd: NullDistribution, path: str | Path) -> Path:
    """One metric sample per line, full precision."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pd.DataFrame({"sample": nd.samples}).to_csv(
        path, sep="\t", header=False, index=False, lineterminator="\n", float_format=FLOAT_FORMAT
    )
    return path


def read_null_tsv(
    path: str | Path,
    scheme: PermutationScheme | str,
    metric: MetricKind | str,
) -> NullDistribution:
    frame = pd.read_csv(path, sep="\t", header=None, float_precision="round_trip")
    values = frame.iloc[:, 0].to_numpy(dtype=np.float64)
    return NullDistribution(values, PermutationScheme(scheme), MetricKind(metric))


def write_table(frame: pd.DataFrame, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, sep="\t", index=False, lineterminator="\n", float_format=FLOAT_FORMAT)
    return path


def load_target_joint(path: str | Path) -> TargetJoint:
    """Read ``level,label,probability`` rows; absent cells have zero mass."""
    frame = read_frame(path)
    _require_columns(frame, ("level", "label", "probability"), str(path))
    levels: list[str] = []
    for level in frame["level"]:
        if level not in levels:
            levels.append(level)
    table = np.zeros((len(levels), 2))
    labels = _parse_labels(frame, "label")
    probs = _parse_reals(frame, "probability")
    for level, label, prob in zip(frame["level"], labels, probs):
        row = levels.index(level)
        if table[row, label] != 0:
            raise InvalidTableError("Duplicate target cell", {"level": level, "label": int(label)})
        table[row, label] = prob
    return TargetJoint(tuple(levels), table)