"""Confounder discretization/combination and joint-preserving splits."""

import logging
import math
from fractions import Fraction
from numbers import Real
from typing import Iterable

import numpy as np

from config.exceptions import CellTooSmallError, InvalidConfigError, LengthMismatchError
from models.dataset import Dataset, DiscretizationSpec, LevelVector, SplitIndices
from tools.seeding import STREAM_SPLIT, derive_rng

logger = logging.getLogger(__name__)

# Age cut sets for 2, 3, 4 and 5 levels.
AGE_DISCRETIZATIONS: dict[int, DiscretizationSpec] = {
    2: DiscretizationSpec(((18, 58), (59, 99))),
    3: DiscretizationSpec(((18, 44), (45, 65), (66, 99))),
    4: DiscretizationSpec(((18, 35), (36, 50), (51, 65), (66, 99))),
    5: DiscretizationSpec(((18, 30), (31, 45), (46, 60), (61, 75), (76, 99))),
}


def discretize(values: Iterable[float], spec: DiscretizationSpec) -> LevelVector:
    """Map each value to the index of the unique interval containing it."""
    codes = [spec.locate(float(v)) for v in values]
    return LevelVector(np.asarray(codes, dtype=np.int64), spec.level_names)


def combine_confounders(a: LevelVector, b: LevelVector, sep: str = "|") -> LevelVector:
    """Cross two level vectors; only observed combinations get indices.

    Combined indices follow first appearance; names join the source names.
    """
    if len(a) != len(b):
        raise LengthMismatchError(len(a), len(b))
    index: dict[tuple[int, int], int] = {}
    names: list[str] = []
    codes = np.empty(len(a), dtype=np.int64)
    for i, pair in enumerate(zip(a.codes.tolist(), b.codes.tolist())):
        if pair not in index:
            index[pair] = len(index)
            names.append(f"{a.names[pair[0]]}{sep}{b.names[pair[1]]}")
        codes[i] = index[pair]
    return LevelVector(codes, tuple(names))


def round_half_up(x: Real) -> int:
    return int(math.floor(x + Fraction(1, 2)))


def stratified_split(ds: Dataset, test_fraction: float, seed: int) -> SplitIndices:
    """Split preserving the joint (confounder level, label) distribution.

    Each cell sends round-half-up(size * test_fraction) rows to test, repaired
    so both sides receive at least one row of every cell.
    """
    if not 0 < test_fraction < 1:
        raise InvalidConfigError("test_fraction must lie in (0, 1)", {"test_fraction": test_fraction})
    # decimal fraction, so 0.35 * 90 is exactly 31.5
    fraction = Fraction(str(test_fraction))
    rng = derive_rng(seed, STREAM_SPLIT)
    test_parts = []
    for (level, label), idx in sorted(ds.cells().items()):
        size = int(idx.size)
        if size < 2:
            raise CellTooSmallError(ds.level_names[level], label, size)
        k = min(max(round_half_up(size * fraction), 1), size - 1)
        test_parts.append(rng.choice(idx, size=k, replace=False))
    test = np.sort(np.concatenate(test_parts))
    train = np.setdiff1d(np.arange(ds.n), test)
    logger.debug("Stratified split: %d train / %d test (fraction=%.3f)", train.size, test.size, test_fraction)
    return SplitIndices(train=train, test=test)


def count_restricted_permutations(labels: np.ndarray, confounder: LevelVector) -> int:
    """Number of distinct label arrangements reachable by restricted shuffling."""
    labels = np.asarray(labels)
    if labels.shape[0] != len(confounder):
        raise LengthMismatchError(int(labels.shape[0]), len(confounder))
    total = 1
    for level in np.unique(confounder.codes):
        in_level = labels[confounder.codes == level]
        total *= math.comb(int(in_level.size), int(np.count_nonzero(in_level == 1)))
    return total
