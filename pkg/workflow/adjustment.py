"""Confounding adjustment: exact matching, propensity scores and IPW, balance checks."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from config.exceptions import (
    LengthMismatchError,
    NoMatchableStratumError,
    SingleClassError,
    ValidationError,
)
from learners.logistic import fit_logistic
from models.adjustment import BalanceTable, PropensityScores
from models.dataset import Dataset, LevelVector, SplitIndices
from models.enums import AdjustMethod, IPWMode
from models.learner import LogisticConfig
from tools.seeding import STREAM_MATCH, STREAM_RESAMPLE, derive_rng, derive_seed

logger = logging.getLogger(__name__)

DEFAULT_CLIP = 1e-3


def match_exact(ds: Dataset, seed: int) -> np.ndarray:
    """1:1 exact matching within confounder levels.

    The majority class of each level is subsampled down to the minority
    count; levels missing a class are dropped. Returns sorted row indices.
    """
    rng = derive_rng(seed, STREAM_MATCH)
    kept = []
    for level in np.unique(ds.confounder.codes):
        in_level = ds.confounder.codes == level
        cases = np.flatnonzero(in_level & (ds.labels == 1))
        controls = np.flatnonzero(in_level & (ds.labels == 0))
        k = min(cases.size, controls.size)
        if k == 0:
            logger.debug("Dropping level %s: %d cases / %d controls",
                         ds.level_names[level], cases.size, controls.size)
            continue
        for group in (cases, controls):
            kept.append(group if group.size == k else rng.choice(group, size=k, replace=False))
    if not kept:
        raise NoMatchableStratumError("No confounder level has both cases and controls")
    indices = np.sort(np.concatenate(kept))
    logger.info("Exact matching kept %d of %d rows", indices.size, ds.n)
    return indices


def _indicator_matrix(confounders: Sequence[LevelVector]) -> np.ndarray:
    # One-hot blocks without each block's first observed level (intercept is separate).
    blocks = []
    for vector in confounders:
        observed = np.unique(vector.codes)
        for level in observed[1:]:
            blocks.append((vector.codes == level).astype(np.float64))
    if not blocks:
        return np.zeros((len(confounders[0]), 1))
    return np.column_stack(blocks)


def estimate_propensity(
    confounders: LevelVector | Sequence[LevelVector],
    labels,
    cfg: Optional[LogisticConfig] = None,
    clip: float = DEFAULT_CLIP,
) -> PropensityScores:
    """P(label = 1 | confounders) from a logistic model on level indicators.

    Several level vectors enter as separate indicator blocks (main effects
    only), so the model can be coarser than the analysis strata. Scores are
    clipped to [clip, 1 - clip].
    """
    if isinstance(confounders, LevelVector):
        confounders = [confounders]
    labels = np.asarray(labels)
    for vector in confounders:
        if len(vector) != labels.shape[0]:
            raise LengthMismatchError(len(vector), int(labels.shape[0]))
    if np.unique(labels).size < 2:
        raise SingleClassError("Propensity model needs both classes", {"n": int(labels.shape[0])})
    if not 0 < clip < 0.5:
        raise ValidationError("clip must lie in (0, 0.5)", {"clip": clip})

    design = _indicator_matrix(confounders)
    model = fit_logistic(design, labels, None, cfg)
    scores = np.clip(model.predict_proba(design), clip, 1.0 - clip)
    return PropensityScores(scores, model)


def ipw_weights(labels, ps: PropensityScores) -> np.ndarray:
    """1/ps for cases and 1/(1 - ps) for controls."""
    labels = np.asarray(labels)
    if labels.shape[0] != len(ps):
        raise LengthMismatchError(int(labels.shape[0]), len(ps))
    return np.where(labels == 1, 1.0 / ps.scores, 1.0 / (1.0 - ps.scores))


def ipw_augment(
    ds: Dataset,
    ps: PropensityScores,
    mode: IPWMode | str,
    seed: int,
    size: Optional[int] = None,
) -> Dataset:
    """Attach IPW weights (mean 1) or resample rows with P ∝ weight.

    Resampling draws ``size`` rows (default n) with replacement and returns
    them in row order without weights.
    """
    mode = IPWMode(mode)
    weights = ipw_weights(ds.labels, ps)
    if mode is IPWMode.WEIGHTS:
        return ds.with_weights(weights / weights.mean())
    return ds.subset(resample_indices(weights, seed, size)).with_weights(None)


def resample_indices(weights, seed: int, size: Optional[int] = None) -> np.ndarray:
    """Sorted draw of ``size`` row indices with replacement, P ∝ weights."""
    weights = np.asarray(weights, dtype=np.float64)
    size = weights.size if size is None else size
    if size < 1:
        raise ValidationError("Resample size must be >= 1", {"size": size})
    rng = derive_rng(seed, STREAM_RESAMPLE)
    drawn = np.sort(rng.choice(weights.size, size=size, replace=True, p=weights / weights.sum()))
    logger.info("IPW resample: %d rows drawn, %d distinct", size, np.unique(drawn).size)
    return drawn


@dataclass(frozen=True, eq=False)
class AdjustedSplit:
    """Adjusted train/test rows as indices into the source dataset.

    Rows may repeat (resampling). ``weights`` aligns with train rows then
    test rows and is set only for weight-mode IPW.
    """
    train_rows: np.ndarray
    test_rows: np.ndarray
    weights: Optional[np.ndarray] = None
    notes: tuple[str, ...] = ()

    @property
    def rows(self) -> np.ndarray:
        return np.concatenate([self.train_rows, self.test_rows])

    def apply(self, ds: Dataset) -> tuple[Dataset, SplitIndices]:
        adjusted = ds.subset(self.rows).with_weights(self.weights)
        n_train = self.train_rows.size
        return adjusted, SplitIndices(np.arange(n_train), np.arange(n_train, adjusted.n))


def adjust_split(
    ds: Dataset,
    split: SplitIndices,
    method: AdjustMethod | str,
    seed: int,
    propensity_levels: Optional[Sequence[LevelVector]] = None,
    resample_size: Optional[int] = None,
    cfg: Optional[LogisticConfig] = None,
    clip: float = DEFAULT_CLIP,
) -> AdjustedSplit:
    """Adjust training and test rows separately.

    ``propensity_levels`` (aligned with ``ds``) replace the analysis
    confounder in the propensity model. ``resample_size`` is the total row
    count, shared between train and test in proportion to their sizes.
    """
    method = AdjustMethod(method)
    total = split.train.size + split.test.size
    rows_out, weights_out, notes = [], [], []
    for k, (name, rows) in enumerate((("train", split.train), ("test", split.test))):
        part = ds.subset(rows)
        part_seed = derive_seed(seed, k)
        if method is AdjustMethod.MATCH:
            rows_out.append(rows[match_exact(part, part_seed)])
            continue
        levels = [v.take(rows) for v in propensity_levels] if propensity_levels else [part.confounder]
        ps = estimate_propensity(levels, part.labels, cfg, clip)
        weights = ipw_weights(part.labels, ps)
        if method is AdjustMethod.IPW_WEIGHTS:
            rows_out.append(rows)
            weights_out.append(weights / weights.mean())
            continue
        size = None if resample_size is None else max(1, int(round(resample_size * rows.size / total)))
        drawn = resample_indices(weights, part_seed, size)
        rows_out.append(rows[drawn])
        duplicates = drawn.size - np.unique(drawn).size
        if name == "test" and duplicates:
            notes.append(f"IPW resampling repeated {duplicates} test rows; test metrics count them once per copy")
    return AdjustedSplit(
        train_rows=rows_out[0],
        test_rows=rows_out[1],
        weights=np.concatenate(weights_out) if weights_out else None,
        notes=tuple(notes),
    )


def balance_table(ds: Dataset, weighted: bool = False) -> BalanceTable:
    """(controls, cases) per observed confounder level, in level order.

    ``weighted`` sums sample weights instead of counting rows.
    """
    codes = ds.confounder.codes
    observed = np.unique(codes)
    w = ds.sample_weights() if weighted else np.ones(ds.n)
    counts = np.zeros((observed.size, 2))
    for i, level in enumerate(observed):
        in_level = codes == level
        counts[i, 0] = w[in_level & (ds.labels == 0)].sum()
        counts[i, 1] = w[in_level & (ds.labels == 1)].sum()
    return BalanceTable(tuple(ds.level_names[c] for c in observed), counts, weighted)


def imbalance(table: BalanceTable) -> float:
    """Mean absolute deviation of per-level case fractions from the global one."""
    occupied = table.level_totals > 0
    deviations = np.abs(table.case_fractions - table.global_case_fraction)
    return float(np.mean(deviations[occupied]))
