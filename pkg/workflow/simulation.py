"""Synthetic confounded data and the power / type-I error experiments."""

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from joblib import Parallel, delayed

from config.exceptions import ConfoundLabError, InvalidConfigError, LengthMismatchError
from models.dataset import Dataset, DiscretizationSpec, LevelVector, SplitIndices
from models.enums import MetricKind, PermutationScheme
from models.learner import LearnerSpec
from models.report import TargetJoint
from models.scenario import PowerCurve, SimScenario, independent_joint, validate_joint
from tools.preprocessing import AGE_DISCRETIZATIONS, combine_confounders, discretize, stratified_split
from tools.seeding import STREAM_SIMULATION, derive_rng, derive_seed
from workflow.callbacks import ProgressCallback, notify
from workflow.inference import auc_confounding_pvalue
from workflow.permutation import permutation_null, summarize

logger = logging.getLogger(__name__)

# P(C, Y) with odds ratio (0.35 * 0.35) / (0.15 * 0.15) ~ 5.4.
ASSOCIATED_JOINT = ((0.35, 0.15), (0.15, 0.35))
CONFOUNDER_LEVELS = ("c0", "c1")


def sample_bivariate_bernoulli(joint, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    """n i.i.d. (C, Y) pairs from the 2x2 table ``joint[c, y]``."""
    table = validate_joint(joint)
    if n < 1:
        raise InvalidConfigError("n must be >= 1", {"n": n})
    rng = derive_rng(seed, STREAM_SIMULATION, 0)
    cells = rng.choice(4, size=n, p=table.ravel())
    return cells // 2, cells % 2


def generate_features(C, Y, scenario: SimScenario, seed: Optional[int] = None) -> np.ndarray:
    """X_ij = beta_y * Y_i + beta_c * C_i + e_ij, e_ij ~ N(0, 1)."""
    C, Y = np.asarray(C), np.asarray(Y)
    if C.shape != Y.shape:
        raise LengthMismatchError(int(C.size), int(Y.size))
    seed = scenario.seed if seed is None else seed
    if seed is None:
        raise InvalidConfigError("A seed is required", {"scenario": scenario.name})
    rng = derive_rng(seed, STREAM_SIMULATION, 1)
    noise = rng.standard_normal((C.size, scenario.n_features)) * scenario.noise_sd
    return scenario.beta_y * Y[:, None] + scenario.beta_c * C[:, None] + noise


def simulate_dataset(scenario: SimScenario, seed: Optional[int] = None) -> Dataset:
    seed = scenario.seed if seed is None else seed
    if seed is None:
        raise InvalidConfigError("A seed is required", {"scenario": scenario.name})
    C, Y = sample_bivariate_bernoulli(scenario.joint, scenario.n_samples, seed)
    X = generate_features(C, Y, scenario, seed)
    return Dataset(
        features=X,
        labels=Y,
        confounder=LevelVector(C, CONFOUNDER_LEVELS),
        feature_names=tuple(f"x{j + 1}" for j in range(scenario.n_features)),
        confounder_name="c",
    )


def default_power_scenarios(n_samples: int = 600, beta_y: float = 0.3) -> list[SimScenario]:
    """Strong, moderate and weak confounding with disease signal."""
    return [
        SimScenario(name=name, joint=ASSOCIATED_JOINT, n_samples=n_samples,
                    beta_y=beta_y, beta_c=beta_c)
        for name, beta_c in (("strong", 0.8), ("moderate", 0.4), ("weak", 0.2))
    ]


def default_type1_scenarios(n_samples: int = 600, beta_y: float = 0.5) -> list[SimScenario]:
    """No confounding signal, without and with disease signal."""
    joint = independent_joint(0.5, 0.5)
    return [
        SimScenario(name="null", joint=joint, n_samples=n_samples),
        SimScenario(name="disease-only", joint=joint, n_samples=n_samples, beta_y=beta_y),
    ]


def scenario_families(n_samples: int = 600, beta_y: float = 0.5, beta_c: float = 0.5) -> list[SimScenario]:
    """Disease plus confounding, disease only, neither, confounding only."""
    joint = ASSOCIATED_JOINT
    return [
        SimScenario(name="disease+confounding", joint=joint, n_samples=n_samples, beta_y=beta_y, beta_c=beta_c),
        SimScenario(name="disease-only", joint=joint, n_samples=n_samples, beta_y=beta_y),
        SimScenario(name="neither", joint=joint, n_samples=n_samples),
        SimScenario(name="confounding-only", joint=joint, n_samples=n_samples, beta_c=beta_c),
    ]


def alpha_grid(alpha_max: float = 0.15, step: float = 0.005) -> np.ndarray:
    """Nominal levels 0, step, ..., alpha_max."""
    n_steps = int(round(alpha_max / step))
    return np.round(np.arange(n_steps + 1) * step, 12)


def power_curve(pvalues, alphas) -> PowerCurve:
    """Fraction of p-values <= alpha at each level (empty rejection region at alpha 0)."""
    pvalues = np.asarray(pvalues, dtype=np.float64)
    alphas = np.asarray(alphas, dtype=np.float64)
    rejected = (pvalues[None, :] <= alphas[:, None]) & (alphas[:, None] > 0)
    return PowerCurve(alphas, rejected.mean(axis=1), int(pvalues.size))


def _replicate(
    scenario: SimScenario,
    learner: LearnerSpec,
    replicate: int,
    seed: int,
) -> float:
    rep_seed = derive_seed(seed, STREAM_SIMULATION, replicate)
    try:
        ds = simulate_dataset(scenario, rep_seed)
        split = stratified_split(ds, scenario.test_fraction, rep_seed)
        b = scenario.b or int(split.test.size)
        null = permutation_null(learner, ds, split, MetricKind.AUC,
                                PermutationScheme.RESTRICTED, b, rep_seed)
        y_test = ds.labels[split.test]
        n_p = int(np.count_nonzero(y_test == 1))
        return auc_confounding_pvalue(summarize(null).mean, y_test.size - n_p, n_p, int(y_test.size))
    except ConfoundLabError as e:
        e.details.update({"scenario": scenario.name, "replicate": replicate})
        raise


def run_scenario(
    scenario: SimScenario,
    replicates: int,
    seed: int,
    learner: Optional[LearnerSpec] = None,
    n_jobs: int = 1,
    callback: Optional[ProgressCallback] = None,
) -> np.ndarray:
    """Confounding-test p-values of ``replicates`` simulated datasets.

    ``scenario.seed``, when set, replaces ``seed``.
    """
    if replicates < 1:
        raise InvalidConfigError("replicates must be >= 1", {"replicates": replicates})
    learner = learner or LearnerSpec()
    seed = scenario.seed if scenario.seed is not None else seed
    stage = f"scenario {scenario.name}"
    notify(callback, "on_stage_start", stage, replicates)
    jobs = (delayed(_replicate)(scenario, learner, r, seed) for r in range(replicates))
    pvalues = np.empty(replicates)
    try:
        for r, p in enumerate(Parallel(n_jobs=n_jobs, return_as="generator")(jobs)):
            pvalues[r] = p
            notify(callback, "on_iteration", stage, r, p)
    except ConfoundLabError as e:
        notify(callback, "on_error", stage, str(e))
        raise
    notify(callback, "on_stage_complete", stage,
           {"replicates": replicates, "rejected@0.05": f"{np.mean(pvalues <= 0.05):.3f}"})
    logger.info("Scenario %s: %d replicates, median p %.3g", scenario.name, replicates, np.median(pvalues))
    return pvalues


def run_pvalue_experiment(
    scenarios: Sequence[SimScenario],
    replicates: int,
    seed: int,
    learner: Optional[LearnerSpec] = None,
    n_jobs: int = 1,
    callback: Optional[ProgressCallback] = None,
) -> dict[str, np.ndarray]:
    return {
        s.name: run_scenario(s, replicates, seed, learner, n_jobs, callback)
        for s in scenarios
    }


def run_power_experiment(
    scenarios: Sequence[SimScenario],
    replicates: int,
    alphas,
    seed: int,
    learner: Optional[LearnerSpec] = None,
    n_jobs: int = 1,
    callback: Optional[ProgressCallback] = None,
) -> dict[str, PowerCurve]:
    pvalues = run_pvalue_experiment(scenarios, replicates, seed, learner, n_jobs, callback)
    return {name: power_curve(p, alphas) for name, p in pvalues.items()}


def run_type1_experiment(
    scenario: SimScenario,
    replicates: int,
    seed: int,
    learner: Optional[LearnerSpec] = None,
    n_jobs: int = 1,
    callback: Optional[ProgressCallback] = None,
) -> np.ndarray:
    """P-values under no confounding signal; expected ~ Uniform(0, 1)."""
    if scenario.beta_c != 0:
        raise InvalidConfigError("Type-I scenarios need beta_c = 0", {"scenario": scenario.name})
    return run_scenario(scenario, replicates, seed, learner, n_jobs, callback)


@dataclass(frozen=True, eq=False)
class SimulatedCohort:
    """Synthetic case/control cohort with gender and continuous age."""
    dataset: Dataset
    split: SplitIndices
    age: np.ndarray
    gender: LevelVector


def simulate_cohort(
    n_cases_train: int = 658,
    n_controls_train: int = 2144,
    n_cases_test: int = 331,
    n_controls_test: int = 1255,
    n_features: int = 10,
    beta_y: float = 0.4,
    beta_age: float = 0.35,
    beta_gender: float = 0.35,
    age_spec: DiscretizationSpec = AGE_DISCRETIZATIONS[3],
    seed: int = 0,
) -> SimulatedCohort:
    """Cases are older and more often male than controls.

    Every feature is beta_y * disease + beta_age * (age - 50) / 15 +
    beta_gender * male + N(0, 1). The confounder is gender crossed with
    discretized age; train rows come first.
    """
    rng = derive_rng(seed, STREAM_SIMULATION, 2)
    parts = []
    for n_cases, n_controls in ((n_cases_train, n_controls_train), (n_cases_test, n_controls_test)):
        y = rng.permutation(np.repeat([1, 0], [n_cases, n_controls]))
        male = (rng.random(y.size) < np.where(y == 1, 0.75, 0.4)).astype(np.int64)
        age = np.where(y == 1, rng.normal(62.0, 9.0, y.size), rng.normal(45.0, 14.0, y.size))
        age = np.clip(np.round(age), age_spec.cut_ranges[0][0], age_spec.cut_ranges[-1][1])
        noise = rng.standard_normal((y.size, n_features))
        X = (beta_y * y + beta_age * (age - 50.0) / 15.0 + beta_gender * male)[:, None] + noise
        parts.append((X, y, male, age))

    X = np.vstack([p[0] for p in parts])
    y = np.concatenate([p[1] for p in parts])
    male = np.concatenate([p[2] for p in parts])
    age = np.concatenate([p[3] for p in parts])
    gender = LevelVector(male, ("F", "M"))
    confounder = combine_confounders(gender, discretize(age, age_spec))
    n_train = n_cases_train + n_controls_train
    ds = Dataset(
        features=X,
        labels=y,
        confounder=confounder,
        feature_names=tuple(f"x{j + 1}" for j in range(n_features)),
        confounder_name="gender*age",
    )
    split = SplitIndices(np.arange(n_train), np.arange(n_train, ds.n))
    return SimulatedCohort(ds, split, age, gender)


def self_selection_example(
    n_samples: int = 4000,
    n_features: int = 5,
    beta_y: float = 0.3,
    beta_gender: float = 0.8,
    development_rates: tuple[float, float] = (0.7, 0.2),
    seed: int = 0,
) -> tuple[TargetJoint, Dataset]:
    """Target population vs a self-selected development cohort.

    In the target, prevalence is 1/3 and disease is twice as common in males
    (P(case | male) = 4/9, P(case | female) = 2/9, half the population male).
    The development cohort is half male with ``development_rates`` =
    (P(case | male), P(case | female)), a stronger association.
    """
    target = TargetJoint(
        ("male", "female"),
        np.array([[5.0, 4.0], [7.0, 2.0]]) / 18.0,
    )
    rng = derive_rng(seed, STREAM_SIMULATION, 3)
    male = (rng.random(n_samples) < 0.5).astype(np.int64)
    y = (rng.random(n_samples) < np.where(male == 1, *development_rates)).astype(np.int64)
    X = (beta_y * y + beta_gender * male)[:, None] + rng.standard_normal((n_samples, n_features))
    ds = Dataset(
        features=X,
        labels=y,
        confounder=LevelVector(1 - male, ("male", "female")),
        feature_names=tuple(f"x{j + 1}" for j in range(n_features)),
        confounder_name="gender",
    )
    return target, ds
