"""Tests for synthetic data generation and the simulation experiments."""

import numpy as np
import pytest

from config.exceptions import ConfoundLabError, InvalidConfigError, InvalidTableError
from models.learner import LearnerSpec
from models.scenario import PowerCurve, SimScenario, independent_joint
from workflow.simulation import (
    ASSOCIATED_JOINT,
    alpha_grid,
    default_power_scenarios,
    default_type1_scenarios,
    generate_features,
    power_curve,
    run_power_experiment,
    run_scenario,
    run_type1_experiment,
    sample_bivariate_bernoulli,
    scenario_families,
    self_selection_example,
    simulate_cohort,
    simulate_dataset,
)


class TestScenario:
    def test_joint_must_sum_to_one(self):
        with pytest.raises(InvalidTableError):
            SimScenario(name="bad", joint=[[0.5, 0.5], [0.5, 0.5]])

    def test_joint_shape(self):
        with pytest.raises(InvalidTableError):
            SimScenario(name="bad", joint=[[1.0]])

    def test_association(self):
        assert SimScenario(name="i", joint=independent_joint(0.3, 0.6)).association == pytest.approx(1.0)
        assert SimScenario(name="a", joint=ASSOCIATED_JOINT).association > 5

    def test_b_floor(self):
        with pytest.raises(InvalidConfigError):
            SimScenario(name="x", joint=ASSOCIATED_JOINT, b=1)


class TestBivariateBernoulli:
    def test_marginals(self):
        C, Y = sample_bivariate_bernoulli(ASSOCIATED_JOINT, 20_000, seed=1)
        assert C.mean() == pytest.approx(0.5, abs=0.02)
        assert np.mean((C == 1) & (Y == 1)) == pytest.approx(0.35, abs=0.02)
        assert np.mean((C == 0) & (Y == 1)) == pytest.approx(0.15, abs=0.02)

    def test_deterministic(self):
        a = sample_bivariate_bernoulli(ASSOCIATED_JOINT, 50, seed=3)
        b = sample_bivariate_bernoulli(ASSOCIATED_JOINT, 50, seed=3)
        assert np.array_equal(a[0], b[0]) and np.array_equal(a[1], b[1])


class TestGenerateFeatures:
    def test_effects(self):
        scenario = SimScenario(name="s", joint=ASSOCIATED_JOINT, n_features=4, beta_y=1.0, beta_c=2.0)
        C = np.repeat([0, 1, 0, 1], 2000)
        Y = np.repeat([0, 0, 1, 1], 2000)
        X = generate_features(C, Y, scenario, seed=0)
        assert X.shape == (8000, 4)
        assert X[(C == 1) & (Y == 1)].mean() == pytest.approx(3.0, abs=0.05)
        assert X[(C == 0) & (Y == 0)].std() == pytest.approx(1.0, abs=0.05)

    def test_seed_required(self):
        scenario = SimScenario(name="s", joint=ASSOCIATED_JOINT)
        with pytest.raises(InvalidConfigError, match="seed"):
            simulate_dataset(scenario)

    def test_scenario_seed_used(self):
        scenario = SimScenario(name="s", joint=ASSOCIATED_JOINT, n_samples=50, seed=5)
        assert simulate_dataset(scenario).equals(simulate_dataset(scenario, 5))


class TestSimulateDataset:
    def test_shape_and_levels(self):
        ds = simulate_dataset(SimScenario(name="s", joint=ASSOCIATED_JOINT, n_samples=120, n_features=3), 7)
        assert (ds.n, ds.p) == (120, 3)
        assert ds.level_names == ("c0", "c1")


class TestScenarioFamilies:
    def test_power_defaults_ordered(self):
        betas = [s.beta_c for s in default_power_scenarios()]
        assert betas == sorted(betas, reverse=True)

    def test_type1_defaults_have_no_confounding(self):
        for s in default_type1_scenarios():
            assert s.beta_c == 0
            assert s.association == pytest.approx(1.0)

    def test_four_families(self):
        names = [s.name for s in scenario_families()]
        assert names == ["disease+confounding", "disease-only", "neither", "confounding-only"]


class TestPowerCurve:
    def test_alpha_grid(self):
        grid = alpha_grid(0.15, 0.005)
        assert grid.size == 31
        assert grid[0] == 0 and grid[-1] == pytest.approx(0.15)

    def test_rejection_fraction(self):
        curve = power_curve([0.001, 0.02, 0.04, 0.2], [0.0, 0.01, 0.05, 0.1])
        assert curve.power.tolist() == [0.0, 0.25, 0.75, 0.75]
        assert curve.at(0.05) == 0.75

    def test_standard_errors(self):
        curve = PowerCurve(np.array([0.05]), np.array([0.5]), 100)
        assert curve.standard_errors()[0] == pytest.approx(0.05)


@pytest.fixture
def quick_scenario():
    return SimScenario(name="quick", joint=ASSOCIATED_JOINT, n_samples=120, n_features=3,
                       beta_c=1.0, b=4)


class TestRunScenario:
    def test_reproducible(self, quick_scenario):
        a = run_scenario(quick_scenario, 3, seed=1)
        b = run_scenario(quick_scenario, 3, seed=1)
        assert np.array_equal(a, b)
        assert np.all((a >= 0) & (a <= 1))

    def test_independent_of_n_jobs(self, quick_scenario):
        assert np.array_equal(run_scenario(quick_scenario, 3, seed=2),
                              run_scenario(quick_scenario, 3, seed=2, n_jobs=2))

    def test_replicates_positive(self, quick_scenario):
        with pytest.raises(InvalidConfigError):
            run_scenario(quick_scenario, 0, seed=1)

    def test_replicate_error_has_context(self, mocker, quick_scenario):
        mocker.patch("workflow.simulation.permutation_null",
                     side_effect=ConfoundLabError("fit failed", {"iteration": 0}))
        with pytest.raises(ConfoundLabError) as info:
            run_scenario(quick_scenario, 2, seed=1)
        assert info.value.details["replicate"] == 0
        assert info.value.details["scenario"] == "quick"

    def test_callback_per_replicate(self, mocker, quick_scenario):
        callback = mocker.Mock()
        run_scenario(quick_scenario, 2, seed=1, callback=callback)
        stages = {call.args[0] for call in callback.on_iteration.call_args_list}
        assert "scenario quick" in stages

    def test_power_experiment(self, quick_scenario):
        curves = run_power_experiment([quick_scenario], 2, [0.0, 0.5, 1.0], seed=1)
        assert curves["quick"].power[0] == 0.0
        assert curves["quick"].power[-1] == 1.0

    def test_type1_requires_no_confounding(self, quick_scenario):
        with pytest.raises(InvalidConfigError, match="beta_c"):
            run_type1_experiment(quick_scenario, 2, seed=1)


class TestCohort:
    def test_sizes_and_structure(self):
        cohort = simulate_cohort(n_cases_train=40, n_controls_train=60, n_cases_test=20,
                                 n_controls_test=30, seed=3)
        ds = cohort.dataset
        assert ds.n == 150 and ds.p == 10
        assert ds.labels[cohort.split.train].sum() == 40
        assert ds.labels[cohort.split.test].sum() == 20
        assert cohort.split.train.tolist() == list(range(100))
        assert np.all((cohort.age >= 18) & (cohort.age <= 99))
        assert ds.confounder_name == "gender*age"

    def test_cases_older_and_more_male(self):
        cohort = simulate_cohort(seed=0)
        y = cohort.dataset.labels
        male = cohort.gender.codes == 1
        assert cohort.age[y == 1].mean() > cohort.age[y == 0].mean() + 10
        assert male[y == 1].mean() > male[y == 0].mean() + 0.2

    def test_deterministic(self):
        assert simulate_cohort(seed=4).dataset.equals(simulate_cohort(seed=4).dataset)


class TestSelfSelection:
    def test_target_and_development(self):
        target, ds = self_selection_example(seed=0)
        assert target.levels == ("male", "female")
        assert target.probabilities[:, 1].sum() == pytest.approx(1 / 3)
        male = ds.confounder.codes == 0
        assert ds.labels[male].mean() == pytest.approx(0.7, abs=0.05)
        assert ds.labels[~male].mean() == pytest.approx(0.2, abs=0.05)
