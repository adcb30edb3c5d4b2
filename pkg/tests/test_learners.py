"""Tests for the logistic regression and random forest learners."""

import math

import numpy as np
import pytest

from config.exceptions import LearnerFitError, SingleClassError, ValidationError
from learners import fit_learner, load_model, predict_proba, save_model
from learners.forest import ForestModel, fit_forest
from learners.logistic import LogisticModel, fit_logistic
from learners.model_io import format_model, parse_model
from models.enums import LearnerKind
from models.learner import ForestConfig, LearnerSpec, LogisticConfig


@pytest.fixture
def grouped_xy():
    # P(y=1 | x=0) = 1/4, P(y=1 | x=1) = 3/4
    X = np.array([0, 0, 0, 0, 1, 1, 1, 1], dtype=float).reshape(-1, 1)
    y = np.array([1, 0, 0, 0, 1, 1, 1, 0])
    return X, y


@pytest.fixture
def noisy_xy():
    rng = np.random.default_rng(8)
    X = rng.standard_normal((200, 3))
    y = (rng.random(200) < 1 / (1 + np.exp(-(0.5 + X[:, 0] - X[:, 1])))).astype(int)
    return X, y


class TestLogistic:
    def test_closed_form_mle(self, grouped_xy):
        X, y = grouped_xy
        model = fit_logistic(X, y, cfg=LogisticConfig(ridge=0.0))
        assert model.converged
        assert model.intercept == pytest.approx(math.log(1 / 3), abs=1e-6)
        assert model.coefficients[0] == pytest.approx(2 * math.log(3), abs=1e-6)

    def test_objective_non_decreasing(self, noisy_xy):
        X, y = noisy_xy
        trace = np.array(fit_logistic(X, y).objective_trace)
        assert np.all(np.diff(trace) >= -1e-12)

    def test_weight_scale_invariance(self, noisy_xy):
        X, y = noisy_xy
        w = np.random.default_rng(0).uniform(0.5, 2.0, size=y.size)
        a = fit_logistic(X, y, w)
        b = fit_logistic(X, y, 7.5 * w)
        assert a.intercept == pytest.approx(b.intercept, rel=1e-8, abs=1e-10)
        assert np.allclose(a.coefficients, b.coefficients, rtol=1e-8, atol=1e-10)

    def test_integer_weight_equals_duplication(self, noisy_xy):
        X, y = noisy_xy
        w = np.ones(y.size)
        w[:10] = 2.0
        weighted = fit_logistic(X, y, w)
        duplicated = fit_logistic(np.vstack([X, X[:10]]), np.concatenate([y, y[:10]]))
        assert np.allclose(weighted.coefficients, duplicated.coefficients, atol=1e-8)

    def test_separable_data_stays_finite(self):
        X = np.array([[-2.0], [-1.0], [1.0], [2.0]])
        model = fit_logistic(X, [0, 0, 1, 1], cfg=LogisticConfig(max_iterations=50))
        assert np.all(np.isfinite(model.coefficients))
        scores = model.predict_proba(X)
        assert scores[0] < 0.5 < scores[-1]

    def test_scores_in_unit_interval(self, noisy_xy):
        X, y = noisy_xy
        scores = fit_logistic(X, y).predict_proba(X)
        assert np.all((scores >= 0) & (scores <= 1))

    def test_dimension_mismatch(self, noisy_xy):
        X, y = noisy_xy
        with pytest.raises(ValidationError, match="dimension"):
            fit_logistic(X, y).predict_proba(np.zeros((2, 5)))

    def test_length_mismatch(self):
        with pytest.raises(ValidationError):
            fit_logistic(np.zeros((3, 1)), [0, 1])


class TestForest:
    def test_depth_zero_scores_class_fraction(self):
        X = np.array([[0.0], [1.0], [2.0]])
        model = fit_forest(X, [1, 1, 0], cfg=ForestConfig(n_trees=1, max_depth=0, seed=0))
        assert np.allclose(model.predict_proba(X), 2 / 3)

    def test_deterministic_for_seed(self, noisy_xy):
        X, y = noisy_xy
        cfg = ForestConfig(n_trees=5, max_depth=4, seed=12)
        assert fit_forest(X, y, cfg=cfg).equals(fit_forest(X, y, cfg=cfg))

    def test_seed_changes_forest(self, noisy_xy):
        X, y = noisy_xy
        a = fit_forest(X, y, cfg=ForestConfig(n_trees=5, max_depth=4, seed=1))
        b = fit_forest(X, y, cfg=ForestConfig(n_trees=5, max_depth=4, seed=2))
        assert not a.equals(b)

    def test_depth_limit(self, noisy_xy):
        X, y = noisy_xy
        model = fit_forest(X, y, cfg=ForestConfig(n_trees=3, max_depth=2, min_leaf=1))
        assert all(tree.depth <= 2 for tree in model.trees)

    def test_min_leaf_respected(self, noisy_xy):
        X, y = noisy_xy
        model = fit_forest(X, y, cfg=ForestConfig(n_trees=2, max_depth=6, min_leaf=20))
        tree = model.trees[0]
        # A split is only made when both children hold min_leaf bootstrap rows,
        # so no tree can have more leaves than n / min_leaf.
        n_leaves = int(np.sum(tree.feature == -1))
        assert n_leaves <= 200 // 20

    def test_learns_signal(self, noisy_xy):
        X, y = noisy_xy
        model = fit_forest(X, y, cfg=ForestConfig(n_trees=20, max_depth=4, seed=0))
        scores = model.predict_proba(X)
        assert scores[y == 1].mean() > scores[y == 0].mean()

    def test_single_class(self):
        with pytest.raises(SingleClassError):
            fit_forest(np.zeros((4, 1)), [1, 1, 1, 1])

    def test_too_few_rows(self):
        with pytest.raises(ValidationError):
            fit_forest(np.zeros((1, 1)), [1])


class TestFitLearner:
    def test_dispatch(self, noisy_xy, small_forest):
        X, y = noisy_xy
        assert isinstance(fit_learner(LearnerSpec(), X, y), LogisticModel)
        assert isinstance(fit_learner(small_forest, X, y), ForestModel)

    def test_predict_proba(self, noisy_xy):
        X, y = noisy_xy
        model = fit_learner(LearnerSpec(), X, y)
        assert predict_proba(model, X).shape == (200,)

    def test_value_errors_wrapped(self, mocker):
        mocker.patch("learners.fit_logistic", side_effect=ValueError("boom"))
        with pytest.raises(LearnerFitError, match="boom"):
            fit_learner(LearnerSpec(kind=LearnerKind.LOGISTIC), np.zeros((2, 1)), [0, 1])

    def test_known_errors_pass_through(self):
        with pytest.raises(SingleClassError):
            fit_learner(LearnerSpec(kind=LearnerKind.FOREST), np.zeros((4, 1)), [0, 0, 0, 0])


class TestModelIO:
    def test_logistic_round_trip(self, tmp_path, noisy_xy):
        X, y = noisy_xy
        model = fit_logistic(X, y)
        back = load_model(save_model(model, tmp_path / "model.txt"))
        assert back.intercept == model.intercept
        assert np.array_equal(back.coefficients, model.coefficients)
        assert np.array_equal(back.predict_proba(X), model.predict_proba(X))

    def test_forest_round_trip(self, noisy_xy):
        X, y = noisy_xy
        model = fit_forest(X, y, cfg=ForestConfig(n_trees=3, max_depth=3, seed=4))
        back = parse_model(format_model(model))
        assert back.equals(model)

    def test_header(self, noisy_xy):
        X, y = noisy_xy
        assert format_model(fit_logistic(X, y)).startswith("# confoundlab model v1\nkind = logistic\n")

    def test_truncated(self):
        with pytest.raises(ValidationError):
            parse_model("# confoundlab model v1\nkind = logistic\n")

    def test_coefficient_count_checked(self):
        text = "kind = logistic\nn_features = 3\nintercept = 0.0\ncoefficients = 1.0 2.0\n"
        with pytest.raises(ValidationError, match="n_features"):
            parse_model(text)
