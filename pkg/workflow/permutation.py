"""Restricted and standard Monte Carlo permutation nulls.

Each iteration shuffles the training and test labels (independently, within
confounder levels for the restricted scheme), refits the learner on the
shuffled training labels and scores the test set against the shuffled test
labels. Iteration ``i`` draws from the stream (seed, scheme, i), so the
samples do not depend on ``n_jobs``.
"""

import logging
from typing import Optional

import numpy as np
from joblib import Parallel, delayed

from config.exceptions import (
    ConfoundLabError,
    DegenerateNullError,
    LearnerFitError,
    LengthMismatchError,
    ValidationError,
)
from learners import fit_learner
from models.dataset import Dataset, LevelVector, SplitIndices
from models.enums import LearnerKind, MetricKind, PermutationScheme
from models.learner import LearnerSpec
from models.nulls import NullDistribution, NullSummary
from tools.metrics import compute_metric
from tools.seeding import STREAM_BASELINE, STREAM_RESTRICTED, STREAM_STANDARD, derive_rng
from workflow.callbacks import ProgressCallback, notify

logger = logging.getLogger(__name__)

_STREAMS = {
    PermutationScheme.RESTRICTED: STREAM_RESTRICTED,
    PermutationScheme.STANDARD: STREAM_STANDARD,
    PermutationScheme.BASELINE: STREAM_BASELINE,
}


def _codes(c) -> np.ndarray:
    return c.codes if isinstance(c, LevelVector) else np.asarray(c)


def restricted_shuffle(y, c, rng: np.random.Generator) -> np.ndarray:
    """Shuffle ``y`` within each level of ``c``; level label counts are kept."""
    y = np.asarray(y)
    codes = _codes(c)
    if y.shape[0] != codes.shape[0]:
        raise LengthMismatchError(int(y.shape[0]), int(codes.shape[0]))
    out = y.copy()
    for level in np.unique(codes):
        idx = np.flatnonzero(codes == level)
        out[idx] = rng.permutation(y[idx])
    return out


def standard_shuffle(y, rng: np.random.Generator) -> np.ndarray:
    return rng.permutation(np.asarray(y))


def fit_and_score(
    learner: LearnerSpec,
    ds: Dataset,
    split: SplitIndices,
    metric: MetricKind,
    y_train: Optional[np.ndarray] = None,
    y_test: Optional[np.ndarray] = None,
) -> float:
    """Fit on the training rows and return the test-set metric.

    ``y_train`` / ``y_test`` replace the dataset labels when given.
    """
    y_train = ds.labels[split.train] if y_train is None else y_train
    y_test = ds.labels[split.test] if y_test is None else y_test
    weights = None if ds.weights is None else ds.weights[split.train]
    model = fit_learner(learner, ds.features[split.train], y_train, weights)
    scores = model.predict_proba(ds.features[split.test])
    return compute_metric(metric, scores, y_test)


def _iteration(
    i: int,
    learner: LearnerSpec,
    ds: Dataset,
    split: SplitIndices,
    metric: MetricKind,
    restricted: bool,
    seed: int,
    stream: int,
) -> float:
    rng = derive_rng(seed, stream, i)
    y_train = ds.labels[split.train]
    y_test = ds.labels[split.test]
    if restricted:
        y_train = restricted_shuffle(y_train, ds.confounder.codes[split.train], rng)
        y_test = restricted_shuffle(y_test, ds.confounder.codes[split.test], rng)
    else:
        y_train = standard_shuffle(y_train, rng)
        y_test = standard_shuffle(y_test, rng)
    if learner.kind is LearnerKind.FOREST:
        learner = learner.with_forest_seed(int(rng.integers(2**63 - 1)))
    try:
        return fit_and_score(learner, ds, split, metric, y_train, y_test)
    except ConfoundLabError as e:
        e.details["iteration"] = i
        raise
    except Exception as e:
        raise LearnerFitError(f"Permutation iteration failed: {e}", {"iteration": i}) from e


def permutation_null(
    learner: LearnerSpec,
    ds: Dataset,
    split: SplitIndices,
    metric: MetricKind | str,
    scheme: PermutationScheme | str,
    b: int,
    seed: int,
    n_jobs: int = 1,
    callback: Optional[ProgressCallback] = None,
) -> NullDistribution:
    """Monte Carlo null of ``metric`` under ``scheme`` with ``b`` iterations.

    The baseline scheme shuffles like the restricted one but draws from its
    own stream; it is used on target-matched subsamples.
    """
    metric = MetricKind(metric)
    scheme = PermutationScheme(scheme)
    if b < 1:
        raise ValidationError("b must be >= 1", {"b": b})
    split.check_bounds(ds.n)
    restricted = scheme is not PermutationScheme.STANDARD
    stream = _STREAMS[scheme]
    stage = f"{scheme.value} null"

    logger.info("Generating %s null: b=%d metric=%s learner=%s n_jobs=%d",
                scheme.value, b, metric.value, learner.kind.value, n_jobs)
    notify(callback, "on_stage_start", stage, b)

    jobs = (
        delayed(_iteration)(i, learner, ds, split, metric, restricted, seed, stream)
        for i in range(b)
    )
    samples = np.empty(b)
    try:
        for i, value in enumerate(Parallel(n_jobs=n_jobs, return_as="generator")(jobs)):
            samples[i] = value
            logger.debug("%s iteration %d: %.17g", scheme.value, i, value)
            notify(callback, "on_iteration", stage, i, value)
    except ConfoundLabError as e:
        notify(callback, "on_error", stage, str(e))
        raise

    nd = NullDistribution(samples, scheme, metric)
    notify(callback, "on_stage_complete", stage,
           {"b": b, "mean": f"{samples.mean():.4f}"})
    return nd


def summarize(nd: NullDistribution) -> NullSummary:
    """Mean and sample standard deviation (divisor b - 1)."""
    if nd.b < 2:
        raise DegenerateNullError("Null summary needs b >= 2", {"b": nd.b, "scheme": nd.scheme.value})
    return NullSummary(
        mean=float(np.mean(nd.samples)),
        sd=float(np.std(nd.samples, ddof=1)),
        count=nd.b,
    )
