"""Workflow package: permutation nulls, inference, adjustment, simulation."""

from workflow.adjustment import (
    adjust_split,
    balance_table,
    estimate_propensity,
    imbalance,
    ipw_augment,
    match_exact,
)
from workflow.callbacks import LoggingCallback, ProgressCallback, RichProgressCallback
from workflow.inference import (
    analytic_auc_null,
    baseline_null,
    confounding_pvalue,
    unconfounded_auc,
    unconfounded_metric,
)
from workflow.permutation import (
    permutation_null,
    restricted_shuffle,
    standard_shuffle,
    summarize,
)
from workflow.pipeline import analyze
from workflow.sensitivity import discretization_sweep
from workflow.simulation import (
    run_power_experiment,
    run_type1_experiment,
    simulate_dataset,
)

__all__ = [
    "LoggingCallback",
    "ProgressCallback",
    "RichProgressCallback",
    "adjust_split",
    "analytic_auc_null",
    "analyze",
    "balance_table",
    "baseline_null",
    "confounding_pvalue",
    "discretization_sweep",
    "estimate_propensity",
    "imbalance",
    "ipw_augment",
    "match_exact",
    "permutation_null",
    "restricted_shuffle",
    "run_power_experiment",
    "run_type1_experiment",
    "simulate_dataset",
    "standard_shuffle",
    "summarize",
    "unconfounded_auc",
    "unconfounded_metric",
]
