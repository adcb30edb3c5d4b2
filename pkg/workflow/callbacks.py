"""Progress callbacks for permutation runs and simulation experiments."""

import logging
from typing import Optional, Protocol, runtime_checkable

logger = logging.getLogger(__name__)


@runtime_checkable
class ProgressCallback(Protocol):
    """Protocol for progress callbacks.

    Implement this protocol to hook into null generation and experiments.
    Callbacks always fire in iteration order, whatever the parallelism.
    """

    def on_stage_start(self, stage: str, total: int) -> None:
        """Called before a batch of ``total`` iterations (one null, one scenario)."""
        ...

    def on_iteration(self, stage: str, index: int, value: float) -> None:
        """Called once per finished iteration with its metric or p-value."""
        ...

    def on_stage_complete(self, stage: str, summary: dict) -> None:
        """Called when a batch finishes."""
        ...

    def on_error(self, stage: str, error: str) -> None:
        ...


class LoggingCallback:
    """Lightweight callback that logs progress to the standard logger."""

    def __init__(self, every: int = 100):
        self._every = max(1, every)

    def on_stage_start(self, stage: str, total: int) -> None:
        logger.info("Starting %s (%d iterations)", stage, total)

    def on_iteration(self, stage: str, index: int, value: float) -> None:
        if (index + 1) % self._every == 0:
            logger.debug("%s: %d done (last=%.6g)", stage, index + 1, value)

    def on_stage_complete(self, stage: str, summary: dict) -> None:
        detail = ", ".join(f"{k}={v}" for k, v in summary.items())
        logger.info("Finished %s: %s", stage, detail)

    def on_error(self, stage: str, error: str) -> None:
        logger.error("Error in %s: %s", stage, error)


class RichProgressCallback:
    """Progress callback that renders a Rich live progress bar per stage."""

    def __init__(self, console=None):
        """
        Args:
            console: Rich Console instance. Creates one if not provided.
        """
        self._console = console
        self._progress = None
        self._tasks: dict[str, int] = {}

    def start(self):
        """Start the progress display. Call before running the workflow."""
        from rich.console import Console
        from rich.progress import (
            BarColumn, Progress, SpinnerColumn, TaskProgressColumn, TextColumn,
        )

        console = self._console or Console()
        self._progress = Progress(
            SpinnerColumn("dots"),
            TextColumn("[progress.description]{task.description}"),
            BarColumn(),
            TaskProgressColumn(),
            console=console,
            transient=False,
        )
        self._progress.start()

    def stop(self):
        """Stop the progress display."""
        if self._progress:
            self._progress.stop()
            self._progress = None

    def __enter__(self) -> "RichProgressCallback":
        self.start()
        return self

    def __exit__(self, *exc) -> None:
        self.stop()

    def on_stage_start(self, stage: str, total: int) -> None:
        if not self._progress:
            return
        self._tasks[stage] = self._progress.add_task(f"[cyan]{stage}[/]", total=total)

    def on_iteration(self, stage: str, index: int, value: float) -> None:
        task = self._tasks.get(stage)
        if self._progress and task is not None:
            self._progress.update(task, completed=index + 1)

    def on_stage_complete(self, stage: str, summary: dict) -> None:
        task = self._tasks.get(stage)
        if not self._progress or task is None:
            return
        detail = " ".join(f"{k}={v}" for k, v in summary.items())
        self._progress.update(task, description=f"[green]{stage}[/] [dim]{detail}[/]")

    def on_error(self, stage: str, error: str) -> None:
        task = self._tasks.get(stage)
        if not self._progress or task is None:
            return
        self._progress.update(task, description=f"[red]{stage}: {error[:80]}[/]")


def notify(callback: Optional[ProgressCallback], event: str, *args) -> None:
    """Invoke ``callback.<event>(*args)`` if a callback is attached."""
    if callback is not None:
        getattr(callback, event)(*args)
