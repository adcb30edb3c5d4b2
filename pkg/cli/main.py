"""CLI entry point: confoundlab confounding diagnostics.

Usage:
  confoundlab split    --config run.conf     joint-preserving train/test split
  confoundlab adjust   --config run.conf     matching / IPW plus balance tables
  confoundlab analyze  --config run.conf     restricted nulls, unconfounded metric, p-value
  confoundlab simulate --config sim.conf     power / type-I experiments
  confoundlab generate --kind cohort         write synthetic data sets
  confoundlab sweep    --config run.conf     discretization sensitivity
"""

import functools
import logging
import sys
from pathlib import Path
from typing import Optional

import click
import numpy as np
import pandas as pd
from scipy.stats import kstest

from cli.theme import (
    app_header,
    balance_tables,
    command_panel,
    get_console,
    power_table,
    reference_table,
    report_panel,
    success_panel,
    sweep_table,
)
from config.exceptions import ConfoundLabError, InvalidConfigError
from config.logging_config import setup_logging
from config.run_config import RunConfig, load_run_config
from config.settings import Settings
from learners import fit_learner, save_model
from models.dataset import ColumnSchema, Dataset, SplitIndices
from models.enums import (
    AdjustMethod,
    ExperimentKind,
    LearnerKind,
    MetricKind,
    ReferenceMode,
)
from tools.data_io import (
    WEIGHT_COLUMN,
    frame_to_dataset,
    load_csv,
    load_split,
    load_target_joint,
    read_frame,
    write_csv,
    write_frame,
    write_null_tsv,
    write_table,
)
from tools.preprocessing import AGE_DISCRETIZATIONS, stratified_split
from tools.report_writer import balance_frame, power_frame, pvalue_frame, write_report
from workflow.adjustment import AdjustedSplit, adjust_split, balance_table, imbalance
from workflow.callbacks import RichProgressCallback
from workflow.pipeline import analyze as run_analysis
from workflow.sensitivity import discretization_sweep
from workflow.simulation import (
    alpha_grid,
    power_curve,
    run_pvalue_experiment,
    run_type1_experiment,
    self_selection_example,
    simulate_cohort,
    simulate_dataset,
)

console = get_console()
logger = logging.getLogger(__name__)


def _init_logging(verbose: bool):
    """Configure logging based on verbosity."""
    level = logging.DEBUG if verbose else logging.INFO
    settings = Settings()
    setup_logging(level=level, log_dir=settings.log_dir, console_enabled=verbose)


def handle_errors(func):
    """Map known errors to their exit codes; KeyboardInterrupt exits 130."""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except KeyboardInterrupt:
            console.print("\n[warning]Interrupted[/]")
            sys.exit(130)
        except ConfoundLabError as e:
            console.print(f"\n[error]{type(e).__name__}: {e}[/]")
            logger.debug("Command failed", exc_info=True)
            sys.exit(e.exit_code)
        except click.ClickException:
            raise
        except Exception as e:
            console.print(f"\n[error]Run failed: {e}[/]")
            logger.exception("Command failed")
            sys.exit(1)
    return wrapper


def run_options(func):
    """Flags shared by every command; they override config-file values."""
    options = [
        click.option("--config", "config_path", type=click.Path(dir_okay=False), default=None,
                     help="Run config file (key = value lines)"),
        click.option("--input", "input", type=click.Path(dir_okay=False), default=None,
                     help="Single input CSV"),
        click.option("--train", type=click.Path(dir_okay=False), default=None, help="Training CSV"),
        click.option("--test", type=click.Path(dir_okay=False), default=None, help="Test CSV"),
        click.option("--out", "output_dir", type=click.Path(file_okay=False), default=None,
                     help="Output directory"),
        click.option("--seed", type=click.IntRange(min=0), default=None, help="Master seed"),
        click.option("--b", "b", type=click.IntRange(min=1), default=None, help="Permutations per null"),
        click.option("--metric", type=click.Choice([m.value for m in MetricKind]), default=None),
        click.option("--learner", type=click.Choice([k.value for k in LearnerKind]), default=None),
        click.option("--adjust", type=click.Choice([a.value for a in AdjustMethod]), default=None),
        click.option("--target-joint", "target_joint", type=click.Path(dir_okay=False), default=None,
                     help="Target population joint (level,label,probability)"),
        click.option("--n-jobs", "n_jobs", type=int, default=None, help="Parallel workers (-1 = all)"),
    ]
    for option in reversed(options):
        func = option(func)
    return func


def _load_config(command: str, config_path: Optional[str], **overrides) -> tuple[RunConfig, Settings]:
    settings = Settings()
    cfg = load_run_config(config_path, overrides, settings)
    cfg.require(command)
    return cfg, settings


def _load_inputs(cfg: RunConfig, schema: ColumnSchema, settings: Settings):
    """(dataset, split, raw frame); a single input is split here."""
    levels = settings.max_categorical_levels
    if cfg.train is not None and cfg.test is not None:
        ds, split = load_split(cfg.train, cfg.test, schema, levels)
        frame = pd.concat([read_frame(cfg.train), read_frame(cfg.test)], ignore_index=True)
        return ds, split, frame
    ds = load_csv(cfg.input, schema, levels)
    return ds, stratified_split(ds, cfg.test_fraction, cfg.seed), read_frame(cfg.input)


def _propensity_levels(cfg: RunConfig, schema: ColumnSchema, frame: pd.DataFrame, settings: Settings):
    if not cfg.propensity_confounders:
        return None
    return [
        frame_to_dataset(frame, schema.with_confounders([col]), "",
                         settings.max_categorical_levels).confounder
        for col in cfg.propensity_confounders
    ]


def _adjust(cfg, schema, ds, split, frame, settings) -> AdjustedSplit:
    learner = cfg.learner_spec(settings)
    return adjust_split(
        ds, split, cfg.adjust, cfg.seed,
        propensity_levels=_propensity_levels(cfg, schema, frame, settings),
        resample_size=cfg.resample_size,
        cfg=learner.logistic,
        clip=settings.propensity_clip,
    )


def _out_dir(cfg: RunConfig) -> Path:
    out = Path(cfg.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


@click.group()
@click.option("--verbose", "-v", is_flag=True, help="Enable debug logging")
@click.pass_context
def cli(ctx, verbose):
    """confoundlab: detect and quantify confounding learned by a predictive model.

    \b
    Typical flow:
      confoundlab split   --config run.conf --seed 1
      confoundlab adjust  --config run.conf --adjust match --seed 1
      confoundlab analyze --config run.conf --seed 1 --b 1000
    """
    _init_logging(verbose)


# ---------------------------------------------------------------------------
# split command
# ---------------------------------------------------------------------------

@cli.command()
@run_options
@click.option("--test-fraction", type=float, default=None, help="Fraction of each cell sent to test")
@handle_errors
def split(config_path, test_fraction, **options):
    """Split one CSV into train/test preserving the (confounder, label) joint."""
    cfg, settings = _load_config("split", config_path, test_fraction=test_fraction, **options)
    schema = cfg.to_schema()
    ds = load_csv(cfg.input, schema, settings.max_categorical_levels)
    frame = read_frame(cfg.input)

    console.print(app_header())
    console.print(command_panel("Split", {
        "input": str(cfg.input), "rows": str(ds.n),
        "test fraction": f"{cfg.test_fraction:g}", "seed": str(cfg.seed),
    }))

    indices = stratified_split(ds, cfg.test_fraction, cfg.seed)
    out = _out_dir(cfg)
    write_frame(frame.iloc[indices.train], out / "train.csv")
    write_frame(frame.iloc[indices.test], out / "test.csv")

    in_test = np.zeros(ds.n, dtype=bool)
    in_test[indices.test] = True
    lines = [
        f"seed = {cfg.seed}",
        f"test_fraction = {cfg.test_fraction!r}",
        f"n_train = {indices.train.size}",
        f"n_test = {indices.test.size}",
    ]
    for (level, label), idx in sorted(ds.cells().items()):
        lines.append(f"cell {ds.level_names[level]} label={label} size={idx.size} "
                     f"test={int(in_test[idx].sum())}")
    (out / "split_manifest.txt").write_text("\n".join(lines) + "\n", encoding="utf-8")

    console.print(success_panel("Split written", (
        f"  train: [stat.value]{indices.train.size}[/] rows\n"
        f"  test: [stat.value]{indices.test.size}[/] rows\n"
        f"  output: {out}"
    )))


# ---------------------------------------------------------------------------
# adjust command
# ---------------------------------------------------------------------------

@cli.command()
@run_options
@handle_errors
def adjust(config_path, **options):
    """Match or IPW-adjust training and test sets; report balance before/after."""
    cfg, settings = _load_config("adjust", config_path, **options)
    if cfg.adjust is None:
        raise InvalidConfigError("adjust needs an adjustment method (--adjust)")
    schema = cfg.to_schema()
    ds, split_idx, frame = _load_inputs(cfg, schema, settings)

    console.print(app_header())
    console.print(command_panel("Adjust", {
        "method": cfg.adjust.value, "rows": str(ds.n), "seed": str(cfg.seed),
        "propensity model": ",".join(cfg.propensity_confounders or cfg.confounders),
    }))

    adjusted = _adjust(cfg, schema, ds, split_idx, frame, settings)
    adjusted_ds, adjusted_split = adjusted.apply(ds)
    weighted = adjusted.weights is not None
    out = _out_dir(cfg)

    balance_parts = []
    for name, before_rows, after_rows, rows in (
        ("train", split_idx.train, adjusted_split.train, adjusted.train_rows),
        ("test", split_idx.test, adjusted_split.test, adjusted.test_rows),
    ):
        before = balance_table(ds.subset(before_rows))
        after = balance_table(adjusted_ds.subset(after_rows), weighted=weighted)
        console.print(balance_tables(f"{name} balance", before, after))
        console.print(f"  [stat.label]imbalance:[/] {imbalance(before):.4f} -> "
                      f"[stat.value]{imbalance(after):.4f}[/]")
        for stage, table in (("before", before), ("after", after)):
            part = balance_frame(table)
            part.insert(0, "stage", stage)
            part.insert(0, "set", name)
            balance_parts.append(part)

        part_frame = frame.iloc[rows].copy()
        if weighted:
            part_weights = adjusted_ds.weights[after_rows]
            part_frame[cfg.weight or WEIGHT_COLUMN] = [repr(float(w)) for w in part_weights]
        write_frame(part_frame, out / f"{name}.csv")

    write_table(pd.concat(balance_parts, ignore_index=True), out / "balance.tsv")
    for note in adjusted.notes:
        console.print(f"[warning]note:[/] {note}")
    console.print(success_panel("Adjusted data written", (
        f"  train: [stat.value]{adjusted.train_rows.size}[/] rows\n"
        f"  test: [stat.value]{adjusted.test_rows.size}[/] rows\n"
        f"  output: {out}"
    )))


# ---------------------------------------------------------------------------
# analyze command
# ---------------------------------------------------------------------------

@cli.command()
@run_options
@click.option("--reference", type=click.Choice([r.value for r in ReferenceMode]), default=None,
              help="AUC reference null(s)")
@handle_errors
def analyze(config_path, reference, **options):
    """Observed metric, restricted null, unconfounded estimate and confounding p-value."""
    cfg, settings = _load_config("analyze", config_path, reference=reference, **options)
    schema = cfg.to_schema()
    ds, split_idx, frame = _load_inputs(cfg, schema, settings)
    learner = cfg.learner_spec(settings)

    notes: list[str] = []
    if cfg.adjust is not None:
        adjusted = _adjust(cfg, schema, ds, split_idx, frame, settings)
        ds, split_idx = adjusted.apply(ds)
        notes.extend(adjusted.notes)
    target = load_target_joint(cfg.target_joint) if cfg.target_joint else None

    console.print(app_header())
    console.print(command_panel("Analyze", {
        "train / test": f"{split_idx.train.size} / {split_idx.test.size}",
        "metric": cfg.metric.value, "learner": cfg.learner.value,
        "b": str(cfg.b), "seed": str(cfg.seed),
        "adjustment": cfg.adjust.value if cfg.adjust else "none",
        "target joint": str(cfg.target_joint) if target else "none",
    }))

    with RichProgressCallback(console=console) as cb:
        report, nulls = run_analysis(
            ds, split_idx, learner, cfg.metric, cfg.b, cfg.seed,
            reference=cfg.reference, target=target,
            baseline_train_size=cfg.baseline_train_size,
            n_jobs=cfg.n_jobs, callback=cb,
        )
    if cfg.adjust is not None:
        report.metadata["adjustment"] = cfg.adjust.value
    if notes:
        report.metadata["notes"] = notes

    out = _out_dir(cfg)
    write_report(report, out / "report.txt")
    for scheme, nd in nulls.items():
        write_null_tsv(nd, out / f"null_{scheme.value}.tsv")
    weights = None if ds.weights is None else ds.weights[split_idx.train]
    model = fit_learner(learner, ds.features[split_idx.train], ds.labels[split_idx.train], weights)
    save_model(model, out / "model.txt")

    console.print(report_panel(report))
    console.print(reference_table(report))
    for note in notes:
        console.print(f"[warning]note:[/] {note}")
    console.print(f"\nReport: [info]{out / 'report.txt'}[/]")


# ---------------------------------------------------------------------------
# simulate command
# ---------------------------------------------------------------------------

@cli.command()
@run_options
@click.option("--experiment", type=click.Choice([e.value for e in ExperimentKind]), default=None)
@click.option("--replicates", type=click.IntRange(min=1), default=None,
              help="Simulated data sets per scenario")
@handle_errors
def simulate(config_path, experiment, replicates, **options):
    """Power or type-I error experiment over simulated confounded data."""
    cfg, settings = _load_config("simulate", config_path,
                                 experiment=experiment, replicates=replicates, **options)
    scenarios = cfg.scenarios()
    learner = cfg.learner_spec(settings)

    console.print(app_header())
    console.print(command_panel("Simulate", {
        "experiment": cfg.experiment.value,
        "scenarios": ", ".join(s.name for s in scenarios),
        "replicates": str(cfg.replicates), "seed": str(cfg.seed),
    }))

    with RichProgressCallback(console=console) as cb:
        if cfg.experiment is ExperimentKind.TYPE1:
            pvalues = {
                s.name: run_type1_experiment(s, cfg.replicates, cfg.seed, learner, cfg.n_jobs, cb)
                for s in scenarios
            }
        else:
            pvalues = run_pvalue_experiment(scenarios, cfg.replicates, cfg.seed, learner, cfg.n_jobs, cb)

    out = _out_dir(cfg)
    write_table(pvalue_frame(pvalues), out / "pvalues.tsv")
    curves = {name: power_curve(p, alpha_grid(cfg.alpha_max, cfg.alpha_step)) for name, p in pvalues.items()}
    write_table(power_frame(curves), out / "power.tsv")
    if cfg.experiment is ExperimentKind.TYPE1:
        rows = []
        for name, p in pvalues.items():
            ks = kstest(p, "uniform")
            rows.append((name, p.size, float(ks.statistic), float(ks.pvalue), float(np.mean(p <= 0.05))))
        write_table(pd.DataFrame(rows, columns=["scenario", "replicates", "ks_statistic",
                                                "ks_pvalue", "rejection_0.05"]), out / "type1.tsv")

    console.print(power_table(curves))
    console.print(f"\nResults: [info]{out}[/]")


# ---------------------------------------------------------------------------
# generate command
# ---------------------------------------------------------------------------

def _cohort_frame(ds: Dataset, rows: np.ndarray, age: np.ndarray, gender) -> pd.DataFrame:
    frame = pd.DataFrame({name: ds.features[rows, j] for j, name in enumerate(ds.feature_names)})
    frame["label"] = ds.labels[rows]
    frame["gender"] = [gender.names[c] for c in gender.codes[rows]]
    frame["age"] = age[rows].astype(np.int64)
    return frame


@cli.command()
@run_options
@click.option("--kind", type=click.Choice(["scenario", "cohort", "self-selection"]), default="scenario")
@click.option("--scenario", "scenario_name", default=None, help="Scenario name (kind=scenario)")
@handle_errors
def generate(config_path, kind, scenario_name, **options):
    """Write synthetic data: a scenario, a case/control cohort, or the self-selection example."""
    cfg, _ = _load_config("generate", config_path, **options)
    out = _out_dir(cfg)
    console.print(app_header())

    if kind == "scenario":
        scenarios = {s.name: s for s in cfg.scenarios()}
        name = scenario_name or next(iter(scenarios))
        if name not in scenarios:
            raise InvalidConfigError("Unknown scenario", {"scenario": name})
        ds = simulate_dataset(scenarios[name], cfg.seed)
        write_csv(ds, out / "data.csv")
        written = ["data.csv"]
    elif kind == "cohort":
        cohort = simulate_cohort(seed=cfg.seed)
        for part, rows in (("train", cohort.split.train), ("test", cohort.split.test)):
            write_frame(_cohort_frame(cohort.dataset, rows, cohort.age, cohort.gender), out / f"{part}.csv")
        written = ["train.csv", "test.csv"]
    else:
        target, ds = self_selection_example(seed=cfg.seed)
        write_csv(ds, out / "data.csv")
        joint = pd.DataFrame(
            [(level, label, target.probabilities[j, label])
             for j, level in enumerate(target.levels) for label in (0, 1)],
            columns=["level", "label", "probability"],
        )
        write_frame(joint, out / "target_joint.csv")
        written = ["data.csv", "target_joint.csv"]

    console.print(success_panel("Generated", "\n".join(f"  {out / w}" for w in written)))


# ---------------------------------------------------------------------------
# sweep command
# ---------------------------------------------------------------------------

@cli.command()
@run_options
@handle_errors
def sweep(config_path, **options):
    """Restricted-null sensitivity to the age discretization (2 to 5 levels)."""
    cfg, settings = _load_config("sweep", config_path, **options)
    if not cfg.sweep_column:
        raise InvalidConfigError("sweep needs sweep_column")
    unknown = [k for k in cfg.sweep_levels if k not in AGE_DISCRETIZATIONS]
    if unknown:
        raise InvalidConfigError("No age discretization with that many levels", {"levels": unknown})
    specs = {f"{k}-level": AGE_DISCRETIZATIONS[k] for k in cfg.sweep_levels}

    reserved = {cfg.label, cfg.sweep_column, *cfg.confounders}
    if cfg.sweep_extra:
        reserved.add(cfg.sweep_extra)
    if cfg.weight:
        reserved.add(cfg.weight)
    header = read_frame(cfg.train or cfg.input).columns
    features = cfg.features or [c for c in header if c not in reserved]
    schema = ColumnSchema(
        label=cfg.label,
        confounders=(cfg.sweep_column,),
        features=tuple(features),
        weight=cfg.weight,
        discretize={cfg.sweep_column: next(iter(specs.values()))},
    )
    ds, split_idx, frame = _load_inputs(cfg, schema, settings)
    raw = pd.to_numeric(frame[cfg.sweep_column]).to_numpy(dtype=np.float64)
    extra = None
    if cfg.sweep_extra:
        extra = frame_to_dataset(frame, schema.with_confounders([cfg.sweep_extra]), "",
                                 settings.max_categorical_levels).confounder

    console.print(app_header())
    console.print(command_panel("Sweep", {
        "column": cfg.sweep_column, "crossed with": cfg.sweep_extra or "none",
        "discretizations": ", ".join(specs), "b": str(cfg.b), "seed": str(cfg.seed),
    }))
    with RichProgressCallback(console=console) as cb:
        results = discretization_sweep(
            ds, raw, specs, split_idx, cfg.learner_spec(settings), cfg.metric,
            cfg.b, cfg.seed, extra=extra, n_jobs=cfg.n_jobs, callback=cb,
        )

    out = _out_dir(cfg)
    write_table(pd.DataFrame(
        [(name, specs[name].n_levels, s.mean, s.sd, s.count) for name, s in results.items()],
        columns=["discretization", "n_levels", "mean", "sd", "count"],
    ), out / "sweep.tsv")
    console.print(sweep_table(results))


if __name__ == "__main__":
    cli()
