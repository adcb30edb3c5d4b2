"""Tests for exact matching, propensity scores, IPW and balance tables."""

import numpy as np
import pytest

from config.exceptions import NoMatchableStratumError, SingleClassError, ValidationError
from models.adjustment import PropensityScores
from models.dataset import Dataset, LevelVector, SplitIndices
from models.enums import AdjustMethod, IPWMode
from workflow.adjustment import (
    adjust_split,
    balance_table,
    estimate_propensity,
    imbalance,
    ipw_augment,
    ipw_weights,
    match_exact,
    resample_indices,
)


@pytest.fixture
def unbalanced():
    """Level a: 30 cases / 10 controls; level b: 5 cases / 25 controls; level c: cases only."""
    rng = np.random.default_rng(0)
    codes = np.repeat([0, 0, 1, 1, 2], [30, 10, 5, 25, 4])
    labels = np.repeat([1, 0, 1, 0, 1], [30, 10, 5, 25, 4])
    return Dataset(rng.standard_normal((codes.size, 2)), labels,
                   LevelVector(codes, ("a", "b", "c")), confounder_name="site")


class TestMatchExact:
    def test_equal_counts_per_level(self, unbalanced):
        rows = match_exact(unbalanced, seed=1)
        table = balance_table(unbalanced.subset(rows))
        assert table.levels == ("a", "b")
        assert table.counts.tolist() == [[10, 10], [5, 5]]

    def test_sorted_and_deterministic(self, unbalanced):
        rows = match_exact(unbalanced, seed=1)
        assert np.all(np.diff(rows) > 0)
        assert np.array_equal(rows, match_exact(unbalanced, seed=1))

    def test_minority_kept_entirely(self, unbalanced):
        rows = match_exact(unbalanced, seed=2)
        controls_a = np.flatnonzero((unbalanced.confounder.codes == 0) & (unbalanced.labels == 0))
        assert set(controls_a) <= set(rows)

    def test_no_matchable_stratum(self):
        ds = Dataset(np.zeros((4, 1)), np.array([1, 1, 0, 0]),
                     LevelVector(np.array([0, 0, 1, 1]), ("x", "y")))
        with pytest.raises(NoMatchableStratumError):
            match_exact(ds, seed=0)


class TestPropensity:
    def test_scores_equal_level_case_fraction(self, unbalanced):
        ps = estimate_propensity(unbalanced.confounder, unbalanced.labels)
        codes = unbalanced.confounder.codes
        assert ps.scores[codes == 0] == pytest.approx(0.75, abs=1e-3)
        assert ps.scores[codes == 1] == pytest.approx(5 / 30, abs=1e-3)

    def test_clipped(self, unbalanced):
        ps = estimate_propensity(unbalanced.confounder, unbalanced.labels, clip=0.01)
        assert ps.scores.max() <= 0.99

    def test_single_class(self):
        with pytest.raises(SingleClassError):
            estimate_propensity(LevelVector(np.array([0, 1]), ("a", "b")), [1, 1])

    def test_coarser_model_from_several_vectors(self):
        gender = LevelVector(np.array([0, 0, 1, 1] * 10), ("F", "M"))
        site = LevelVector(np.array([0, 1, 0, 1] * 10), ("s1", "s2"))
        labels = np.array([0, 1, 1, 1] * 10)
        ps = estimate_propensity([gender, site], labels)
        assert ps.scores.shape == (40,)
        assert np.all((ps.scores > 0) & (ps.scores < 1))

    def test_scores_must_be_interior(self):
        with pytest.raises(ValidationError):
            PropensityScores(np.array([0.0, 0.5]))


class TestIpw:
    def test_weights(self):
        ps = PropensityScores(np.array([0.25, 0.25, 0.8]))
        w = ipw_weights(np.array([1, 0, 0]), ps)
        assert w.tolist() == pytest.approx([4.0, 4 / 3, 5.0])

    def test_weighted_balance(self, unbalanced):
        balanced_levels = unbalanced.subset(np.flatnonzero(unbalanced.confounder.codes < 2))
        ps = estimate_propensity(balanced_levels.confounder, balanced_levels.labels)
        weighted = ipw_augment(balanced_levels, ps, IPWMode.WEIGHTS, seed=0)
        assert weighted.weights.mean() == pytest.approx(1.0)
        table = balance_table(weighted, weighted=True)
        assert table.case_fractions == pytest.approx([0.5, 0.5], abs=1e-3)
        assert imbalance(table) < 1e-3

    def test_resample_mode(self, unbalanced):
        ps = estimate_propensity(unbalanced.confounder, unbalanced.labels)
        resampled = ipw_augment(unbalanced, ps, "resample", seed=3, size=500)
        assert resampled.n == 500
        assert resampled.weights is None
        before = imbalance(balance_table(unbalanced))
        assert imbalance(balance_table(resampled)) < before

    def test_resample_deterministic(self):
        w = np.array([1.0, 2.0, 3.0, 4.0])
        assert np.array_equal(resample_indices(w, 5, 10), resample_indices(w, 5, 10))

    def test_resample_size_positive(self):
        with pytest.raises(ValidationError):
            resample_indices(np.ones(3), 0, 0)


class TestAdjustSplit:
    @pytest.fixture
    def split(self, unbalanced):
        from tools.preprocessing import stratified_split
        ab = np.flatnonzero(unbalanced.confounder.codes < 2)
        ds = unbalanced.subset(ab)
        return ds, stratified_split(ds, 0.4, seed=0)

    def test_match_each_part(self, split):
        ds, indices = split
        adjusted = adjust_split(ds, indices, AdjustMethod.MATCH, seed=4)
        assert set(adjusted.train_rows) <= set(indices.train)
        assert set(adjusted.test_rows) <= set(indices.test)
        out, out_split = adjusted.apply(ds)
        for rows in (out_split.train, out_split.test):
            counts = balance_table(out.subset(rows)).counts
            assert np.all(counts[:, 0] == counts[:, 1])

    def test_weights_mode(self, split):
        ds, indices = split
        adjusted = adjust_split(ds, indices, "ipw-weights", seed=4)
        out, out_split = adjusted.apply(ds)
        assert out.weights is not None
        assert out_split.train.size == indices.train.size
        assert out.weights[out_split.train].mean() == pytest.approx(1.0)

    def test_resample_total_size(self, split):
        ds, indices = split
        adjusted = adjust_split(ds, indices, "ipw-resample", seed=4, resample_size=100)
        assert adjusted.train_rows.size + adjusted.test_rows.size == pytest.approx(100, abs=1)
        assert adjusted.weights is None

    def test_resample_notes_duplicates(self, split):
        ds, indices = split
        adjusted = adjust_split(ds, indices, "ipw-resample", seed=4, resample_size=400)
        assert any("test rows" in note for note in adjusted.notes)

    def test_deterministic(self, split):
        ds, indices = split
        a = adjust_split(ds, indices, "ipw-resample", seed=9)
        b = adjust_split(ds, indices, "ipw-resample", seed=9)
        assert np.array_equal(a.rows, b.rows)

    def test_apply_keeps_duplicates(self):
        ds = Dataset(np.arange(4.0), np.array([0, 1, 0, 1]), LevelVector(np.zeros(4, dtype=int), ("a",)))
        from workflow.adjustment import AdjustedSplit
        out, split = AdjustedSplit(np.array([0, 1, 1]), np.array([2, 3])).apply(ds)
        assert out.n == 5
        assert split.train.tolist() == [0, 1, 2]
        assert isinstance(split, SplitIndices)


class TestBalanceTable:
    def test_counts_and_fractions(self, unbalanced):
        table = balance_table(unbalanced)
        assert table.levels == ("a", "b", "c")
        assert table.counts.tolist() == [[10, 30], [25, 5], [0, 4]]
        assert table.case_fractions.tolist() == pytest.approx([0.75, 1 / 6, 1.0])
        assert table.global_case_fraction == pytest.approx(39 / 74)

    def test_imbalance_zero_when_balanced(self):
        ds = Dataset(np.zeros((4, 1)), np.array([0, 1, 0, 1]),
                     LevelVector(np.array([0, 0, 1, 1]), ("x", "y")))
        assert imbalance(balance_table(ds)) == 0.0

    def test_zero_weight_level(self):
        ds = Dataset(np.zeros((6, 1)), np.array([0, 1, 0, 1, 0, 1]),
                     LevelVector(np.array([0, 0, 1, 1, 2, 2]), ("x", "y", "z")),
                     weights=np.array([1.0, 1.0, 0.0, 0.0, 1.0, 3.0]))
        with np.errstate(all="raise"):
            table = balance_table(ds, weighted=True)
            fractions = table.case_fractions
            spread = imbalance(table)
        assert fractions.tolist() == [0.5, 0.0, 0.75]
        assert table.rows()[1] == ("y", 0.0, 0.0, 0.0)
        # the empty level is left out of the average
        assert spread == pytest.approx((abs(0.5 - 4 / 6) + abs(0.75 - 4 / 6)) / 2)
