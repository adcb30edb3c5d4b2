"""Unified Rich theme and reusable UI helper functions for the CLI."""

from typing import Mapping

from rich import box
from rich.console import Console
from rich.panel import Panel
from rich.rule import Rule
from rich.table import Table
from rich.theme import Theme

from models.adjustment import BalanceTable
from models.nulls import NullSummary
from models.report import ConfoundingReport
from models.scenario import PowerCurve

CONFOUND_THEME = Theme({
    "app.title": "bold",
    "success": "green",
    "warning": "yellow",
    "error": "red",
    "info": "blue",
    "muted": "dim",
    "accent": "cyan",
    "stat.label": "dim",
    "stat.value": "bold",
    "pvalue.significant": "bold red",
    "pvalue.plain": "green",
})


def get_console() -> Console:
    """Return a Console instance with the confoundlab theme applied."""
    return Console(theme=CONFOUND_THEME)


def app_header(title: str = "confoundlab") -> Rule:
    """Return a Rule element for the application header banner."""
    return Rule(title=f"[bold]{title}[/]", style="dim")


def command_panel(title: str, fields: dict[str, str]) -> Panel:
    """Return a Panel displaying command parameters.

    Args:
        title: Panel title (e.g. "Analyze").
        fields: Ordered dict of label -> value pairs.
    """
    lines = []
    for label, value in fields.items():
        lines.append(f"  [stat.label]{label}:[/] [stat.value]{value}[/]")
    body = "\n".join(lines)
    return Panel(body, title=f"[bold]{title}[/]", box=box.ROUNDED, border_style="dim", padding=(0, 2))


def success_panel(title: str, body: str) -> Panel:
    """Return a green-bordered Panel for success results."""
    return Panel(body, title=f"[success]{title}[/]", box=box.ROUNDED, border_style="green", padding=(0, 2))


def _pvalue_markup(p: float, alpha: float = 0.05) -> str:
    style = "pvalue.significant" if p <= alpha else "pvalue.plain"
    return f"[{style}]{p:.3g}[/]"


def report_panel(report: ConfoundingReport) -> Panel:
    """Observed vs unconfounded metric with the primary p-value."""
    metric = report.metric.value.upper()
    body = (
        f"  [stat.label]observed {metric}:[/] [stat.value]{report.observed:.4f}[/]\n"
        f"  [stat.label]restricted null:[/] mean [stat.value]{report.restricted.mean:.4f}[/]"
        f"  sd {report.restricted.sd:.4f}\n"
        f"  [stat.label]unconfounded {metric}:[/] [stat.value]{report.unconfounded:.4f}[/]"
        f" [muted]({report.provenance.value})[/]\n"
        f"  [stat.label]confounding p-value:[/] {_pvalue_markup(report.p_value)}"
    )
    return success_panel("Confounding analysis", body)


def reference_table(report: ConfoundingReport) -> Table:
    table = Table(box=box.ROUNDED, border_style="dim", show_header=True, padding=(0, 1))
    table.add_column("reference", style="accent")
    table.add_column("mean", justify="right")
    table.add_column("sd", justify="right")
    table.add_column("unconfounded", justify="right")
    table.add_column("p-value", justify="right")
    for ref in report.references:
        table.add_row(
            ref.provenance.value,
            f"{ref.summary.mean:.4f}",
            f"{ref.summary.sd:.4f}",
            f"{ref.unconfounded:.4f}",
            _pvalue_markup(ref.p_value),
        )
    return table


def balance_tables(title: str, before: BalanceTable, after: BalanceTable) -> Table:
    """Side-by-side case fractions per level before and after adjustment."""
    table = Table(title=title, box=box.ROUNDED, border_style="dim", show_header=True, padding=(0, 1))
    table.add_column("level", style="accent")
    table.add_column("before (ctl/case)", justify="right")
    table.add_column("frac", justify="right")
    table.add_column("after (ctl/case)", justify="right")
    table.add_column("frac", justify="right")
    after_rows = {row[0]: row for row in after.rows()}
    for level, controls, cases, frac in before.rows():
        post = after_rows.get(level)
        post_counts = f"{post[1]:.6g}/{post[2]:.6g}" if post else "[muted]dropped[/]"
        post_frac = f"{post[3]:.3f}" if post else ""
        table.add_row(level, f"{controls:.6g}/{cases:.6g}", f"{frac:.3f}", post_counts, post_frac)
    return table


def power_table(curves: Mapping[str, PowerCurve], alphas=(0.01, 0.05, 0.1, 0.15)) -> Table:
    table = Table(box=box.ROUNDED, border_style="dim", show_header=True, padding=(0, 1))
    table.add_column("scenario", style="accent")
    for alpha in alphas:
        table.add_column(f"α={alpha:g}", justify="right")
    for name, curve in curves.items():
        table.add_row(name, *(f"{curve.at(a):.3f}" for a in alphas))
    return table


def sweep_table(results: Mapping[str, NullSummary]) -> Table:
    table = Table(box=box.ROUNDED, border_style="dim", show_header=True, padding=(0, 1))
    table.add_column("discretization", style="accent")
    table.add_column("restricted mean", justify="right")
    table.add_column("sd", justify="right")
    for name, summary in results.items():
        table.add_row(name, f"{summary.mean:.4f}", f"{summary.sd:.4f}")
    return table
