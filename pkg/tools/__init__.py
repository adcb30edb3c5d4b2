"""Tools package: metrics, seeding, preprocessing, CSV I/O and report writing."""

from tools.data_io import (
    load_csv,
    load_split,
    load_target_joint,
    read_null_tsv,
    write_csv,
    write_null_tsv,
)
from tools.metrics import auc, compute_metric, mann_whitney_u, mean_metric, normal_sf
from tools.preprocessing import (
    AGE_DISCRETIZATIONS,
    combine_confounders,
    count_restricted_permutations,
    discretize,
    stratified_split,
)
from tools.report_writer import format_report, summary_line, write_report
from tools.seeding import derive_rng, derive_seed

__all__ = [
    "AGE_DISCRETIZATIONS",
    "auc",
    "combine_confounders",
    "compute_metric",
    "count_restricted_permutations",
    "derive_rng",
    "derive_seed",
    "discretize",
    "format_report",
    "load_csv",
    "load_split",
    "load_target_joint",
    "mann_whitney_u",
    "mean_metric",
    "normal_sf",
    "read_null_tsv",
    "stratified_split",
    "summary_line",
    "write_csv",
    "write_null_tsv",
    "write_report",
]
