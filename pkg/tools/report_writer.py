"""Structured-text reports and plot-ready tables.

Report format, version 1: ``[section]`` headers followed by ``key = value``
lines. Sections are ``analysis``, ``observed``, ``restricted`` and one
``reference.<provenance>`` per reference null, the primary one first. Floats
use 12 significant digits. The final line of the file is the summary line.
"""

from pathlib import Path
from typing import Mapping

import numpy as np
import pandas as pd

from models.adjustment import BalanceTable
from models.nulls import NullSummary
from models.report import ConfoundingReport
from models.scenario import PowerCurve

REPORT_FORMAT_VERSION = 1


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (float, np.floating)):
        return f"{float(value):.12g}"
    return str(value)


def _section(name: str, items: Mapping[str, object]) -> list[str]:
    return [f"[{name}]", *(f"{k} = {_fmt(v)}" for k, v in items.items()), ""]


def _summary_items(summary: NullSummary) -> dict:
    return {
        "mean": summary.mean,
        "sd": summary.sd,
        "count": "analytic" if summary.count is None else summary.count,
    }


def summary_line(report: ConfoundingReport) -> str:
    """One ``key=value`` line for pipelines."""
    fields = {
        "format_version": REPORT_FORMAT_VERSION,
        "metric": report.metric.value,
        "observed": report.observed,
        "restricted_mean": report.restricted.mean,
        "restricted_sd": report.restricted.sd,
        "reference": report.provenance.value,
        "unconfounded": report.unconfounded,
        "p_value": report.p_value,
        "n_test": report.n_test,
    }
    return " ".join(f"{k}={_fmt(v)}" for k, v in fields.items())


def format_report(report: ConfoundingReport) -> str:
    notes = report.metadata.get("notes", ())
    metadata = {k: v for k, v in report.metadata.items() if k != "notes"}
    lines = ["# confoundlab confounding report", f"format_version = {REPORT_FORMAT_VERSION}", ""]
    lines += _section("analysis", {
        "metric": report.metric.value,
        **metadata,
        "n_test": report.n_test,
        "n_negative": report.n_negative,
        "n_positive": report.n_positive,
    })
    lines += _section("observed", {"value": report.observed})
    lines += _section("restricted", _summary_items(report.restricted))
    for i, ref in enumerate(report.references):
        lines += _section(f"reference.{ref.provenance.value}", {
            "primary": i == 0,
            **_summary_items(ref.summary),
            "unconfounded": ref.unconfounded,
            "p_value": ref.p_value,
        })
    if notes:
        lines += _section("notes", {f"note{i + 1}": n for i, n in enumerate(notes)})
    lines.append(summary_line(report))
    return "\n".join(lines) + "\n"


def write_report(report: ConfoundingReport, path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_report(report), encoding="utf-8")
    return path


def balance_frame(table: BalanceTable) -> pd.DataFrame:
    return pd.DataFrame(
        table.rows(), columns=["level", "controls", "cases", "case_fraction"]
    )


def pvalue_frame(pvalues: Mapping[str, np.ndarray]) -> pd.DataFrame:
    """Long table: scenario, replicate, p_value."""
    rows = [
        (name, r, float(p))
        for name, values in pvalues.items()
        for r, p in enumerate(values)
    ]
    return pd.DataFrame(rows, columns=["scenario", "replicate", "p_value"])


def power_frame(curves: Mapping[str, PowerCurve]) -> pd.DataFrame:
    """Wide table: alpha column plus one power column per scenario."""
    names = list(curves)
    frame = pd.DataFrame({"alpha": curves[names[0]].alphas})
    for name in names:
        frame[name] = curves[name].power
    return frame
