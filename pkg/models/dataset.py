"""Dataset, level-vector, split and discretization data models."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from config.exceptions import (
    DiscretizationError,
    InvalidConfigError,
    LengthMismatchError,
    ValidationError,
)


def _frozen(array: np.ndarray) -> np.ndarray:
    array = np.array(array, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class LevelVector:
    """Categorical vector: integer codes 0..K-1 plus one name per level."""
    codes: np.ndarray
    names: tuple[str, ...]

    def __post_init__(self) -> None:
        codes = np.asarray(self.codes)
        if codes.ndim != 1:
            raise ValidationError("Level codes must be a 1-D vector")
        if codes.size and not np.issubdtype(codes.dtype, np.integer):
            raise ValidationError("Level codes must be integers")
        codes = codes.astype(np.int64)
        if codes.size and (codes.min() < 0 or codes.max() >= len(self.names)):
            raise ValidationError(
                "Level code out of range", {"n_levels": len(self.names)}
            )
        object.__setattr__(self, "codes", _frozen(codes))
        object.__setattr__(self, "names", tuple(str(n) for n in self.names))

    @classmethod
    def from_values(cls, values: Iterable[object]) -> "LevelVector":
        """Encode raw values by order of first appearance."""
        index: dict[str, int] = {}
        codes = []
        for value in values:
            key = str(value)
            if key not in index:
                index[key] = len(index)
            codes.append(index[key])
        return cls(np.asarray(codes, dtype=np.int64), tuple(index))

    @property
    def n_levels(self) -> int:
        return len(self.names)

    def __len__(self) -> int:
        return int(self.codes.shape[0])

    def take(self, indices: np.ndarray) -> "LevelVector":
        """Subset rows; level names are kept even if a level empties out."""
        return LevelVector(self.codes[np.asarray(indices, dtype=np.int64)], self.names)

    def labels(self) -> list[str]:
        return [self.names[c] for c in self.codes]

    def equals(self, other: "LevelVector") -> bool:
        return self.names == other.names and np.array_equal(self.codes, other.codes)


@dataclass(frozen=True, eq=False)
class Dataset:
    """Feature matrix, binary response, categorical confounder, optional weights."""
    features: np.ndarray
    labels: np.ndarray
    confounder: LevelVector
    weights: Optional[np.ndarray] = None
    feature_names: tuple[str, ...] = ()
    label_name: str = "label"
    confounder_name: str = "confounder"

    def __post_init__(self) -> None:
        features = np.asarray(self.features, dtype=np.float64)
        if features.ndim == 1:
            features = features.reshape(-1, 1)
        if features.ndim != 2:
            raise ValidationError("Feature matrix must be 2-D")
        n, p = features.shape
        if n < 1 or p < 1:
            raise ValidationError("Dataset needs n >= 1 and p >= 1", {"n": n, "p": p})
        if not np.all(np.isfinite(features)):
            raise ValidationError("Feature matrix contains non-finite values")

        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.shape[0] != n or len(self.confounder) != n:
            raise LengthMismatchError(n, int(labels.shape[0]), len(self.confounder))
        if not np.all(np.isin(labels, (0, 1))):
            raise ValidationError("Labels must be 0 or 1")

        weights = self.weights
        if weights is not None:
            weights = np.asarray(weights, dtype=np.float64)
            if weights.shape != (n,):
                raise LengthMismatchError(n, int(weights.size))
            if not np.all(np.isfinite(weights)) or np.any(weights < 0) or not np.any(weights > 0):
                raise ValidationError("Weights must be finite, >= 0, and not all zero")
            weights = _frozen(weights)

        names = tuple(self.feature_names) or tuple(f"x{j + 1}" for j in range(p))
        if len(names) != p:
            raise LengthMismatchError(p, len(names))

        object.__setattr__(self, "features", _frozen(features))
        object.__setattr__(self, "labels", _frozen(labels.astype(np.int64)))
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "feature_names", names)

    @property
    def n(self) -> int:
        return int(self.features.shape[0])

    @property
    def p(self) -> int:
        return int(self.features.shape[1])

    @property
    def level_names(self) -> tuple[str, ...]:
        return self.confounder.names

    def sample_weights(self) -> np.ndarray:
        """Weights, or all ones when none are attached."""
        if self.weights is None:
            return np.ones(self.n)
        return np.asarray(self.weights)

    def subset(self, indices: Sequence[int] | np.ndarray) -> "Dataset":
        idx = np.asarray(indices, dtype=np.int64)
        return replace(
            self,
            features=self.features[idx],
            labels=self.labels[idx],
            confounder=self.confounder.take(idx),
            weights=None if self.weights is None else self.weights[idx],
        )

    def with_confounder(self, confounder: LevelVector, name: Optional[str] = None) -> "Dataset":
        return replace(self, confounder=confounder, confounder_name=name or self.confounder_name)

    def with_weights(self, weights: Optional[np.ndarray]) -> "Dataset":
        return replace(self, weights=weights)

    def concat(self, other: "Dataset") -> "Dataset":
        """Rows of ``self`` then ``other``; both must share level names and columns."""
        if self.level_names != other.level_names or self.feature_names != other.feature_names:
            raise ValidationError("Datasets differ in levels or feature columns")
        if (self.weights is None) != (other.weights is None):
            raise ValidationError("Cannot concatenate weighted with unweighted data")
        return replace(
            self,
            features=np.vstack([self.features, other.features]),
            labels=np.concatenate([self.labels, other.labels]),
            confounder=LevelVector(
                np.concatenate([self.confounder.codes, other.confounder.codes]), self.level_names
            ),
            weights=None if self.weights is None else np.concatenate([self.weights, other.weights]),
        )

    def cells(self) -> dict[tuple[int, int], np.ndarray]:
        """Sorted row indices for every observed (level, label) cell."""
        out: dict[tuple[int, int], np.ndarray] = {}
        for level in np.unique(self.confounder.codes):
            for label in (0, 1):
                mask = (self.confounder.codes == level) & (self.labels == label)
                idx = np.flatnonzero(mask)
                if idx.size:
                    out[(int(level), label)] = idx
        return out

    def equals(self, other: "Dataset") -> bool:
        same_weights = (
            (self.weights is None and other.weights is None)
            or (
                self.weights is not None and other.weights is not None
                and np.array_equal(self.weights, other.weights)
            )
        )
        return (
            np.array_equal(self.features, other.features)
            and np.array_equal(self.labels, other.labels)
            and self.confounder.equals(other.confounder)
            and same_weights
            and self.feature_names == other.feature_names
        )


@dataclass(frozen=True, eq=False)
class SplitIndices:
    """Disjoint, sorted, non-empty train/test row indices."""
    train: np.ndarray
    test: np.ndarray

    def __post_init__(self) -> None:
        train = np.sort(np.asarray(self.train, dtype=np.int64))
        test = np.sort(np.asarray(self.test, dtype=np.int64))
        if train.size == 0 or test.size == 0:
            raise ValidationError("Train and test index sets must be non-empty")
        if np.intersect1d(train, test).size:
            raise ValidationError("Train and test index sets overlap")
        if np.unique(train).size != train.size or np.unique(test).size != test.size:
            raise ValidationError("Duplicate indices in split")
        object.__setattr__(self, "train", _frozen(train))
        object.__setattr__(self, "test", _frozen(test))

    def check_bounds(self, n: int) -> None:
        if self.train.min() < 0 or self.test.min() < 0 or max(self.train.max(), self.test.max()) >= n:
            raise ValidationError("Split indices outside dataset", {"n": n})

    def equals(self, other: "SplitIndices") -> bool:
        return np.array_equal(self.train, other.train) and np.array_equal(self.test, other.test)


def _format_bound(value: float) -> str:
    return str(int(value)) if float(value).is_integer() else repr(float(value))


@dataclass(frozen=True)
class DiscretizationSpec:
    """Ordered closed intervals covering a variable's support.

    Integer-bounded specs must be contiguous on the integers (next low bound =
    previous high bound + 1); real-bounded specs only need to be increasing
    and non-overlapping.
    """
    cut_ranges: tuple[tuple[float, float], ...]

    def __post_init__(self) -> None:
        ranges = tuple((float(lo), float(hi)) for lo, hi in self.cut_ranges)
        if not ranges:
            raise InvalidConfigError("Discretization needs at least one interval")
        integral = all(lo.is_integer() and hi.is_integer() for lo, hi in ranges)
        for lo, hi in ranges:
            if not (math.isfinite(lo) and math.isfinite(hi)) or lo > hi:
                raise InvalidConfigError("Invalid interval", {"interval": (lo, hi)})
        for (lo0, hi0), (lo1, hi1) in zip(ranges, ranges[1:]):
            if lo1 <= hi0:
                raise InvalidConfigError("Intervals overlap", {"intervals": [(lo0, hi0), (lo1, hi1)]})
            if integral and lo1 != hi0 + 1:
                raise InvalidConfigError("Intervals not contiguous", {"intervals": [(lo0, hi0), (lo1, hi1)]})
        object.__setattr__(self, "cut_ranges", ranges)

    @classmethod
    def from_string(cls, text: str) -> "DiscretizationSpec":
        """Parse ``"18..44, 45..65, 66..99"``."""
        ranges = []
        for chunk in text.split(","):
            chunk = chunk.strip()
            if not chunk:
                continue
            lo, sep, hi = chunk.partition("..")
            if not sep:
                raise InvalidConfigError("Interval must look like lo..hi", {"interval": chunk})
            try:
                ranges.append((float(lo), float(hi)))
            except ValueError as e:
                raise InvalidConfigError("Non-numeric interval bound", {"interval": chunk}) from e
        return cls(tuple(ranges))

    @property
    def n_levels(self) -> int:
        return len(self.cut_ranges)

    @property
    def level_names(self) -> tuple[str, ...]:
        return tuple(f"{_format_bound(lo)}-{_format_bound(hi)}" for lo, hi in self.cut_ranges)

    def to_string(self) -> str:
        return ", ".join(f"{_format_bound(lo)}..{_format_bound(hi)}" for lo, hi in self.cut_ranges)

    def locate(self, value: float) -> int:
        for level, (lo, hi) in enumerate(self.cut_ranges):
            if lo <= value <= hi:
                return level
        raise DiscretizationError(
            "Value outside discretization support",
            {"value": value, "support": (self.cut_ranges[0][0], self.cut_ranges[-1][1])},
        )


@dataclass(frozen=True)
class ColumnSchema:
    """Column-role map for CSV ingestion.

    ``features=None`` selects every column that has no other role.
    """
    label: str
    confounders: tuple[str, ...]
    features: Optional[tuple[str, ...]] = None
    weight: Optional[str] = None
    discretize: Mapping[str, DiscretizationSpec] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.label:
            raise InvalidConfigError("Schema needs a label column")
        if not self.confounders:
            raise InvalidConfigError("Schema needs at least one confounder column")
        if self.features is not None and not self.features:
            raise InvalidConfigError("Schema needs at least one feature column")
        object.__setattr__(self, "confounders", tuple(self.confounders))
        if self.features is not None:
            object.__setattr__(self, "features", tuple(self.features))

    def with_confounders(self, confounders: Sequence[str]) -> "ColumnSchema":
        return replace(self, confounders=tuple(confounders))

    def reserved_columns(self) -> set[str]:
        cols = {self.label, *self.confounders}
        if self.weight:
            cols.add(self.weight)
        return cols
