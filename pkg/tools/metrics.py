"""Performance metrics: AUC, Mann-Whitney U, averaged losses, normal tails."""

import numpy as np
from scipy.special import ndtr
from scipy.stats import rankdata

from config.exceptions import SingleClassError, ValidationError
from models.enums import MetricKind
from models.scores import ScoredTestSet


def _class_counts(s: ScoredTestSet) -> tuple[int, int]:
    n_p, n_n = s.n_positive, s.n_negative
    if n_p < 1 or n_n < 1:
        raise SingleClassError("AUC needs both classes", {"n_positive": n_p, "n_negative": n_n})
    if n_p + n_n != s.m:
        raise ValidationError("AUC labels must be 0 or 1")
    return n_p, n_n


def auc(s: ScoredTestSet) -> float:
    """Area under the ROC curve from midranks; a tied pair counts 0.5.

    O(m log m).
    """
    n_p, n_n = _class_counts(s)
    ranks = rankdata(s.scores, method="average")
    rank_sum_pos = ranks[s.labels == 1].sum()
    return float((rank_sum_pos - n_p * (n_p + 1) / 2.0) / (n_p * n_n))


def auc_pairwise_oracle(s: ScoredTestSet) -> float:
    """AUC by explicit enumeration of every (positive, negative) pair."""
    n_p, n_n = _class_counts(s)
    positives = [float(v) for v, y in zip(s.scores, s.labels) if y == 1]
    negatives = [float(v) for v, y in zip(s.scores, s.labels) if y == 0]
    total = 0.0
    for sp in positives:
        for sn in negatives:
            if sp > sn:
                total += 1.0
            elif sp == sn:
                total += 0.5
    return total / (n_p * n_n)


def mann_whitney_u(s: ScoredTestSet) -> float:
    """U statistic of the negatives: pairs where the negative outscores the positive.

    Equals n_n * n_p * (1 - AUC).
    """
    _, n_n = _class_counts(s)
    ranks = rankdata(s.scores, method="average")
    return float(ranks[s.labels == 0].sum() - n_n * (n_n + 1) / 2.0)


def mean_metric(kind: MetricKind | str, s: ScoredTestSet, threshold: float = 0.5) -> float:
    """Accuracy, mean squared error or mean absolute error."""
    kind = MetricKind(kind)
    if kind is MetricKind.ACCURACY:
        if not np.all(np.isin(s.labels, (0, 1))):
            raise ValidationError("Accuracy needs binary labels")
        predicted = (s.scores >= threshold).astype(np.float64)
        return float(np.mean(predicted == s.labels))
    if kind is MetricKind.MSE:
        return float(np.mean((s.scores - s.labels) ** 2))
    if kind is MetricKind.MAE:
        return float(np.mean(np.abs(s.scores - s.labels)))
    raise ValidationError(f"{kind.value} is not an averaged metric")


def compute_metric(kind: MetricKind | str, scores, labels) -> float:
    kind = MetricKind(kind)
    s = ScoredTestSet(scores, labels)
    if kind is MetricKind.AUC:
        return auc(s)
    return mean_metric(kind, s)


def normal_cdf(x: float) -> float:
    """Standard normal c.d.f."""
    return float(ndtr(x))


def normal_sf(x: float) -> float:
    """Upper tail 1 - Phi(x), accurate far into the tail."""
    return float(ndtr(-x))
