"""End-to-end confounding analysis behind the ``analyze`` command."""

import logging
from typing import Optional

import numpy as np

from models.dataset import Dataset, SplitIndices
from models.enums import (
    MetricKind,
    PermutationScheme,
    ReferenceMode,
    ReferenceProvenance,
)
from models.learner import LearnerSpec
from models.nulls import NullDistribution
from models.report import ConfoundingReport, ReferenceResult, TargetJoint
from workflow.callbacks import ProgressCallback
from workflow.inference import (
    analytic_auc_null,
    auc_confounding_pvalue,
    baseline_null,
    confounding_pvalue,
    unconfounded_auc,
    unconfounded_metric,
)
from workflow.permutation import fit_and_score, permutation_null, summarize

logger = logging.getLogger(__name__)


def analyze(
    ds: Dataset,
    split: SplitIndices,
    learner: LearnerSpec,
    metric: MetricKind | str,
    b: int,
    seed: int,
    reference: ReferenceMode | str = ReferenceMode.BOTH,
    target: Optional[TargetJoint] = None,
    baseline_train_size: Optional[int] = None,
    n_jobs: int = 1,
    callback: Optional[ProgressCallback] = None,
) -> tuple[ConfoundingReport, dict[PermutationScheme, NullDistribution]]:
    """Observed metric, restricted null and every requested reference.

    Primary reference: the baseline null when ``target`` is given, else the
    analytic null for AUC (unless ``reference`` is ``empirical``), else the
    empirical standard null. Non-AUC metrics always use the empirical null.
    """
    metric = MetricKind(metric)
    reference = ReferenceMode(reference)
    split.check_bounds(ds.n)

    observed = fit_and_score(learner, ds, split, metric)
    y_test = ds.labels[split.test]
    n_test = int(split.test.size)
    n_pos = int(np.count_nonzero(y_test == 1))
    n_neg = n_test - n_pos
    logger.info("Observed %s = %.6f on %d test rows", metric.value, observed, n_test)

    nulls: dict[PermutationScheme, NullDistribution] = {}
    nulls[PermutationScheme.RESTRICTED] = permutation_null(
        learner, ds, split, metric, PermutationScheme.RESTRICTED, b, seed,
        n_jobs=n_jobs, callback=callback,
    )
    restricted = summarize(nulls[PermutationScheme.RESTRICTED])

    references: list[ReferenceResult] = []
    if target is not None:
        nulls[PermutationScheme.BASELINE] = baseline_null(
            target, ds, learner, metric, b, n_test, seed,
            train_size=baseline_train_size, n_jobs=n_jobs, callback=callback,
        )
        summary = summarize(nulls[PermutationScheme.BASELINE])
        references.append(ReferenceResult(
            ReferenceProvenance.BASELINE_TARGET,
            summary,
            unconfounded_metric(observed, restricted, summary),
            confounding_pvalue(restricted, summary, n_test),
        ))

    is_auc = metric is MetricKind.AUC
    if is_auc and reference in (ReferenceMode.ANALYTIC, ReferenceMode.BOTH):
        analytic = ReferenceResult(
            ReferenceProvenance.ANALYTIC_AUC,
            analytic_auc_null(n_neg, n_pos),
            unconfounded_auc(observed, restricted, n_neg, n_pos),
            auc_confounding_pvalue(restricted.mean, n_neg, n_pos, n_test),
        )
    else:
        analytic = None

    if not is_auc or reference in (ReferenceMode.EMPIRICAL, ReferenceMode.BOTH):
        nulls[PermutationScheme.STANDARD] = permutation_null(
            learner, ds, split, metric, PermutationScheme.STANDARD, b, seed,
            n_jobs=n_jobs, callback=callback,
        )
        summary = summarize(nulls[PermutationScheme.STANDARD])
        empirical = ReferenceResult(
            ReferenceProvenance.EMPIRICAL_STANDARD,
            summary,
            unconfounded_metric(observed, restricted, summary),
            confounding_pvalue(restricted, summary, n_test),
        )
    else:
        empirical = None

    if reference is ReferenceMode.EMPIRICAL:
        references.extend(r for r in (empirical, analytic) if r is not None)
    else:
        references.extend(r for r in (analytic, empirical) if r is not None)

    report = ConfoundingReport(
        metric=metric,
        observed=observed,
        restricted=restricted,
        references=tuple(references),
        n_test=n_test,
        n_negative=n_neg,
        n_positive=n_pos,
        metadata={
            "learner": learner.kind.value,
            "b": b,
            "seed": seed,
            "n_train": int(split.train.size),
            "n_levels": int(np.unique(ds.confounder.codes).size),
            "confounder": ds.confounder_name,
            "weighted": ds.weights is not None,
        },
    )
    logger.info("Confounding p-value %.3g (%s), unconfounded %s = %.6f",
                report.p_value, report.provenance.value, metric.value, report.unconfounded)
    return report, nulls
