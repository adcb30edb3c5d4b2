"""Tests for unconfounded metrics, the analytic AUC null and confounding p-values."""

import math

import numpy as np
import pytest

from config.exceptions import DegenerateNullError, InfeasibleSubsampleError, ValidationError
from models.dataset import Dataset, LevelVector
from models.nulls import NullSummary
from models.report import TargetJoint
from tools.metrics import normal_cdf, normal_sf
from workflow.inference import (
    analytic_auc_null,
    analytic_auc_variance,
    auc_confounding_pvalue,
    baseline_null,
    baseline_subsample,
    confounding_pvalue,
    target_joint_counts,
    unconfounded_auc,
    unconfounded_metric,
)


class TestUnconfoundedMetric:
    def test_mapping(self):
        m = unconfounded_metric(0.8, NullSummary(0.7, 0.02), NullSummary(0.5, 0.04))
        assert m == pytest.approx(0.7)

    def test_at_restricted_mean_maps_to_reference_mean(self):
        assert unconfounded_metric(0.7, NullSummary(0.7, 0.02), NullSummary(0.5, 0.04)) == pytest.approx(0.5)

    def test_zero_restricted_sd(self):
        with pytest.raises(DegenerateNullError):
            unconfounded_metric(0.8, NullSummary(0.7, 0.0), NullSummary(0.5, 0.04))

    def test_tail_probability_preserved(self):
        from scipy.stats import norm
        restricted, reference = NullSummary(0.65, 0.03), NullSummary(0.5, 0.05)
        m_o = 0.71
        m_u = unconfounded_metric(m_o, restricted, reference)
        assert norm.sf(m_o, 0.65, 0.03) == pytest.approx(norm.sf(m_u, 0.5, 0.05))


class TestAnalyticAuc:
    def test_variance(self):
        assert analytic_auc_variance(10, 20) == pytest.approx(31 / 2400)

    def test_null_summary(self):
        s = analytic_auc_null(50, 50)
        assert s.mean == 0.5
        assert s.sd == pytest.approx(math.sqrt(101 / 30000))
        assert s.count is None

    def test_unconfounded_auc_matches_generic(self):
        restricted = NullSummary(0.68, 0.03)
        generic = unconfounded_metric(0.75, restricted, analytic_auc_null(40, 60))
        assert unconfounded_auc(0.75, restricted, 40, 60) == pytest.approx(generic)

    def test_requires_both_classes(self):
        with pytest.raises(ValidationError):
            analytic_auc_variance(0, 10)


class TestConfoundingPvalue:
    def test_at_reference_mean_is_half(self):
        assert confounding_pvalue(NullSummary(0.5, 0.02), NullSummary(0.5, 0.04), 100) == pytest.approx(0.5)

    def test_uses_test_size_not_b(self):
        # z = (0.52 - 0.5) / (0.1 / sqrt(100)) = 2
        p = confounding_pvalue(NullSummary(0.52, 0.05, count=10_000), NullSummary(0.5, 0.1), 100)
        assert p == pytest.approx(0.0227501319, rel=1e-6)

    def test_decreases_with_restricted_mean(self):
        ref = NullSummary(0.5, 0.05)
        ps = [confounding_pvalue(NullSummary(m, 0.03), ref, 50) for m in (0.5, 0.52, 0.55, 0.6)]
        assert ps == sorted(ps, reverse=True)

    def test_extreme_tail_not_zero(self):
        p = confounding_pvalue(NullSummary(0.6, 0.03), NullSummary(0.5, 0.05), 50)
        assert 0 < p < 1e-40

    def test_zero_reference_sd(self):
        with pytest.raises(DegenerateNullError):
            confounding_pvalue(NullSummary(0.6, 0.02), NullSummary(0.5, 0.0), 100)

    def test_auc_form_matches_generic(self):
        restricted = NullSummary(0.56, 0.03)
        generic = confounding_pvalue(restricted, analytic_auc_null(60, 40), 100)
        assert auc_confounding_pvalue(0.56, 60, 40, 100) == pytest.approx(generic)


N_SUMMARIES = 10_000


@pytest.fixture(scope="module")
def random_summaries():
    """Observed metric, restricted and reference summaries and AUC class counts."""
    rng = np.random.default_rng(2024)
    rows = []
    for _ in range(N_SUMMARIES):
        n_n, n_p = (int(v) for v in rng.integers(5, 500, size=2))
        rows.append((
            float(rng.uniform(0.3, 1.0)),
            NullSummary(float(rng.uniform(0.3, 0.9)), float(rng.uniform(0.005, 0.1)), int(rng.integers(2, 2000))),
            NullSummary(float(rng.uniform(0.3, 0.7)), float(rng.uniform(0.005, 0.1))),
            n_n,
            n_p,
        ))
    return rows


class TestIdentities:
    def test_unconfounded_auc_is_generic_with_analytic_reference(self, random_summaries):
        for m_o, restricted, _, n_n, n_p in random_summaries:
            generic = unconfounded_metric(m_o, restricted, analytic_auc_null(n_n, n_p))
            assert abs(unconfounded_auc(m_o, restricted, n_n, n_p) - generic) <= 1e-12

    def test_auc_pvalue_is_generic_with_analytic_reference(self, random_summaries):
        for _, restricted, _, n_n, n_p in random_summaries:
            n = n_n + n_p
            generic = confounding_pvalue(restricted, analytic_auc_null(n_n, n_p), n)
            assert abs(auc_confounding_pvalue(restricted.mean, n_n, n_p, n) - generic) <= 1e-12

    def test_mapping_keeps_tail_probability(self, random_summaries):
        for m_o, restricted, reference, _, _ in random_summaries:
            m_u = unconfounded_metric(m_o, restricted, reference)
            before = normal_cdf((m_o - restricted.mean) / restricted.sd)
            after = normal_cdf((m_u - reference.mean) / reference.sd)
            assert abs(before - after) <= 1e-9

    def test_permutation_count_does_not_move_pvalue(self, random_summaries):
        for _, restricted, reference, n_n, n_p in random_summaries:
            doubled = NullSummary(restricted.mean, restricted.sd, restricted.count * 2)
            n = n_n + n_p
            assert confounding_pvalue(doubled, reference, n) == confounding_pvalue(restricted, reference, n)

    def test_test_size_moves_pvalue(self, random_summaries):
        for _, restricted, reference, n_n, n_p in random_summaries:
            n = n_n + n_p
            p, p_larger = (confounding_pvalue(restricted, reference, k) for k in (n, 4 * n))
            if restricted.mean > reference.mean:
                assert p_larger <= p
            elif restricted.mean < reference.mean:
                assert p_larger >= p
        # z = 0.01 / (0.1 / 20)
        assert confounding_pvalue(NullSummary(0.51, 0.02), NullSummary(0.5, 0.1), 400) == pytest.approx(
            normal_sf(2.0), abs=1e-12)


@pytest.fixture
def self_selected():
    """Development data: 60 male/female rows per label with names matching the target."""
    rng = np.random.default_rng(0)
    codes = np.repeat([0, 0, 1, 1], 60)
    labels = np.tile(np.repeat([0, 1], 60), 2)
    X = (0.8 * (codes == 0) + 0.3 * labels)[:, None] + rng.standard_normal((240, 2))
    return Dataset(X, labels, LevelVector(codes, ("male", "female")), confounder_name="gender")


@pytest.fixture
def target():
    return TargetJoint(("male", "female"), np.array([[5.0, 4.0], [7.0, 2.0]]) / 18.0)


class TestTargetJointCounts:
    def test_exact_when_divisible(self, target):
        assert target_joint_counts(target, 18).tolist() == [[5, 4], [7, 2]]

    def test_sums_to_total(self, target):
        for total in (1, 7, 50, 101):
            assert target_joint_counts(target, total).sum() == total

    def test_largest_remainder(self, target):
        # raw = [2.78, 2.22, 3.89, 1.11] -> floors [2, 2, 3, 1], two extra to the largest remainders
        assert target_joint_counts(target, 10).tolist() == [[3, 2], [4, 1]]


class TestBaselineSubsample:
    def test_joint_realized(self, self_selected, target):
        sub, split = baseline_subsample(target, self_selected, 36, seed=1)
        for rows in (split.train, split.test):
            part = sub.subset(rows)
            counts = [[int(np.sum((part.confounder.codes == j) & (part.labels == y))) for y in (0, 1)]
                      for j in range(2)]
            assert counts == [[10, 8], [14, 4]]

    def test_train_size_override(self, self_selected, target):
        _, split = baseline_subsample(target, self_selected, 18, seed=1, train_size=36)
        assert split.test.size == 18 and split.train.size == 36

    def test_infeasible(self, self_selected, target):
        with pytest.raises(InfeasibleSubsampleError) as info:
            baseline_subsample(target, self_selected, 200, seed=1)
        assert {"level", "label", "needed", "available"} <= set(info.value.details)

    def test_unknown_level(self, self_selected):
        other = TargetJoint(("x", "y"), np.full((2, 2), 0.25))
        with pytest.raises(InfeasibleSubsampleError, match="absent"):
            baseline_subsample(other, self_selected, 10, seed=1)

    def test_deterministic(self, self_selected, target):
        a, _ = baseline_subsample(target, self_selected, 36, seed=3)
        b, _ = baseline_subsample(target, self_selected, 36, seed=3)
        assert a.equals(b)

    def test_baseline_null(self, self_selected, target, logistic):
        nd = baseline_null(target, self_selected, logistic, "auc", 5, 36, seed=2)
        assert nd.b == 5
        assert nd.scheme.value == "baseline"
