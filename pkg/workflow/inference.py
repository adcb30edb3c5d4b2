"""Unconfounded metric estimates, the analytic AUC null, and confounding p-values."""

import logging
import math
from typing import Optional

import numpy as np

from config.exceptions import DegenerateNullError, InfeasibleSubsampleError, ValidationError
from models.dataset import Dataset, SplitIndices
from models.enums import MetricKind, PermutationScheme
from models.learner import LearnerSpec
from models.nulls import NullDistribution, NullSummary
from models.report import TargetJoint
from tools.metrics import normal_sf
from tools.seeding import STREAM_SUBSAMPLE, derive_rng
from workflow.callbacks import ProgressCallback
from workflow.permutation import permutation_null

logger = logging.getLogger(__name__)


def unconfounded_metric(m_o: float, restricted: NullSummary, reference: NullSummary) -> float:
    """Map ``m_o`` from the restricted null onto the reference null.

    (m_o - a*) * s** / s* + a**, which keeps the Gaussian tail probability.
    """
    if restricted.sd == 0:
        raise DegenerateNullError("Restricted null has zero spread", {"mean": restricted.mean})
    return (m_o - restricted.mean) * (reference.sd / restricted.sd) + reference.mean


def _check_counts(n_n: int, n_p: int) -> None:
    if n_n < 1 or n_p < 1:
        raise ValidationError("AUC null needs both classes", {"n_negative": n_n, "n_positive": n_p})


def analytic_auc_variance(n_n: int, n_p: int) -> float:
    _check_counts(n_n, n_p)
    return (n_n + n_p + 1) / (12.0 * n_n * n_p)


def analytic_auc_null(n_n: int, n_p: int) -> NullSummary:
    """Normal approximation of the standard AUC null: mean 0.5."""
    return NullSummary(mean=0.5, sd=math.sqrt(analytic_auc_variance(n_n, n_p)), count=None)


def unconfounded_auc(auc_o: float, restricted: NullSummary, n_n: int, n_p: int) -> float:
    if restricted.sd == 0:
        raise DegenerateNullError("Restricted null has zero spread", {"mean": restricted.mean})
    return (auc_o - restricted.mean) * math.sqrt(analytic_auc_variance(n_n, n_p)) / restricted.sd + 0.5


def confounding_pvalue(restricted: NullSummary, reference: NullSummary, n: int) -> float:
    """One-sided upper-tail p-value of the restricted-null mean.

    The statistic's spread is the reference sd over sqrt(n), with n the test
    size (not the number of permutations).
    """
    if reference.sd <= 0:
        raise DegenerateNullError("Reference null has zero spread", {"mean": reference.mean})
    if n < 1:
        raise ValidationError("Test-set size must be >= 1", {"n": n})
    z = (restricted.mean - reference.mean) / (reference.sd / math.sqrt(n))
    return normal_sf(z)


def auc_confounding_pvalue(a_restricted: float, n_n: int, n_p: int, n: int) -> float:
    if n < 1:
        raise ValidationError("Test-set size must be >= 1", {"n": n})
    sd = math.sqrt(analytic_auc_variance(n_n, n_p) / n)
    return normal_sf((a_restricted - 0.5) / sd)


def target_joint_counts(target: TargetJoint, total: int) -> np.ndarray:
    """Integer J x 2 cell counts summing to ``total`` (largest remainder).

    Ties in the fractional parts go to the earlier cell in row-major order.
    """
    if total < 0:
        raise ValidationError("total must be >= 0", {"total": total})
    raw = target.probabilities.ravel() * total
    counts = np.floor(raw).astype(np.int64)
    shortfall = int(total - counts.sum())
    if shortfall > 0:
        order = np.argsort(-(raw - counts), kind="stable")
        counts[order[:shortfall]] += 1
    return counts.reshape(target.probabilities.shape)


def baseline_subsample(
    target: TargetJoint,
    ds: Dataset,
    test_size: int,
    seed: int,
    train_size: Optional[int] = None,
) -> tuple[Dataset, SplitIndices]:
    """Train/test subsample whose (level, label) joint realizes ``target``.

    ``train_size`` defaults to ``test_size``. Cells are filled test-first from
    one shuffle per cell.
    """
    train_size = test_size if train_size is None else train_size
    if test_size < 1 or train_size < 1:
        raise ValidationError("Baseline sizes must be >= 1",
                              {"test_size": test_size, "train_size": train_size})
    test_counts = target_joint_counts(target, test_size)
    train_counts = target_joint_counts(target, train_size)
    cells = ds.cells()
    rng = derive_rng(seed, STREAM_SUBSAMPLE)

    train_parts, test_parts = [], []
    for j, level_name in enumerate(target.levels):
        if level_name not in ds.level_names:
            raise InfeasibleSubsampleError("Target level absent from data", {"level": level_name})
        level = ds.level_names.index(level_name)
        for label in (0, 1):
            k_test, k_train = int(test_counts[j, label]), int(train_counts[j, label])
            available = cells.get((level, label), np.empty(0, dtype=np.int64))
            if k_test + k_train > available.size:
                raise InfeasibleSubsampleError(
                    "Not enough samples to realize target cell",
                    {"level": level_name, "label": label,
                     "needed": k_test + k_train, "available": int(available.size)},
                )
            drawn = rng.permutation(available)
            test_parts.append(drawn[:k_test])
            train_parts.append(drawn[k_test:k_test + k_train])

    train_idx = np.sort(np.concatenate(train_parts))
    test_idx = np.sort(np.concatenate(test_parts))
    sub = ds.subset(np.concatenate([train_idx, test_idx]))
    split = SplitIndices(np.arange(train_idx.size), np.arange(train_idx.size, sub.n))
    logger.debug("Baseline subsample: %d train / %d test", train_idx.size, test_idx.size)
    return sub, split


def baseline_null(
    target: TargetJoint,
    ds: Dataset,
    learner: LearnerSpec,
    metric: MetricKind | str,
    b: int,
    test_size: int,
    seed: int,
    train_size: Optional[int] = None,
    n_jobs: int = 1,
    callback: Optional[ProgressCallback] = None,
) -> NullDistribution:
    """Restricted null on a subsample that mirrors the target population joint.

    ``test_size`` should equal the development test size so both nulls share
    the same scale.
    """
    sub, split = baseline_subsample(target, ds, test_size, seed, train_size)
    return permutation_null(learner, sub, split, metric, PermutationScheme.BASELINE,
                            b, seed, n_jobs=n_jobs, callback=callback)
