"""qsim CLI — run, preset, trajectories, sweep.

Entry point for the `qsim` command. Exit codes: 0 on success, 1 on a
validation error, 2 on an I/O error.
"""

from __future__ import annotations

import logging
from collections.abc import Callable
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import TypeVar

import typer
from rich.console import Console
from rich.table import Table

from qsim._version import __version__

app = typer.Typer(
    name="qsim",
    help="Cascaded atom-cavity entanglement simulator.",
    invoke_without_command=True,
)
console = Console()

T = TypeVar("T")

_LOG_FORMAT = "%(asctime)s %(levelname)-5s %(name)s  %(message)s"
_installed_handlers: list[logging.Handler] = []


def _setup_logging(verbose: bool, log_file: str | None = None) -> None:
    """Attach the stderr handler (and optional rotating file handler).

    Handlers from a previous call are replaced, so repeated invocations in
    one process never duplicate output.
    """
    root = logging.getLogger()
    for handler in _installed_handlers:
        root.removeHandler(handler)
        handler.close()
    _installed_handlers.clear()
    root.setLevel(logging.DEBUG)

    # Console: INFO (or DEBUG with --verbose), always to stderr
    console_handler = logging.StreamHandler()
    console_handler.setLevel(logging.DEBUG if verbose else logging.INFO)
    console_handler.setFormatter(logging.Formatter(_LOG_FORMAT, datefmt="%H:%M:%S"))
    _installed_handlers.append(console_handler)

    # File: DEBUG, rotated at 5 MB, keep 3 backups.
    if log_file:
        path = Path(log_file)
        path.parent.mkdir(parents=True, exist_ok=True)
        file_handler = RotatingFileHandler(path, maxBytes=5 * 1024 * 1024, backupCount=3)
        file_handler.setLevel(logging.DEBUG)
        file_handler.setFormatter(logging.Formatter(_LOG_FORMAT))
        _installed_handlers.append(file_handler)

    for handler in _installed_handlers:
        root.addHandler(handler)


def _guarded(action: Callable[[], T]) -> T:
    """Run action, mapping ValueError to exit 1 and OSError to exit 2."""
    try:
        return action()
    except ValueError as e:
        console.print(f"[red]Invalid input:[/red] {e}")
        raise typer.Exit(1) from e
    except OSError as e:
        console.print(f"[red]I/O error:[/red] {e}")
        raise typer.Exit(2) from e


@app.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    version: bool = typer.Option(False, "--version", "-V", help="Show version"),
):
    if version:
        console.print(f"qsim {__version__}")
        raise typer.Exit()
    if ctx.invoked_subcommand is None:
        console.print(ctx.get_help())
        raise typer.Exit()


@app.command()
def run(
    config: str = typer.Option(..., "--config", "-c", help="Path to the run config file"),
    output: str | None = typer.Option(None, "--output", "-o", help="Output directory"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
    log_file: str | None = typer.Option(None, "--log-file", help="Also log to this file"),
):
    """Simulate one configuration and write <output>/<mode>.csv."""
    from qsim.config import load_config
    from qsim.runner import run_config

    _setup_logging(verbose, log_file)
    overrides = {} if output is None else {"output": output}
    cfg = _guarded(lambda: load_config(config, overrides))

    written = _guarded(lambda: run_config(cfg))
    for path in written:
        console.print(f"[green]Wrote[/green] {path}")


@app.command()
def preset(
    name: str = typer.Argument(..., help="Preset name: fig2 | fig3 | fig4"),
    output: str = typer.Option("output", "--output", "-o", help="Output directory"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
    log_file: str | None = typer.Option(None, "--log-file", help="Also log to this file"),
):
    """Write the CSV series of a figure preset and print the concurrence peaks."""
    from qsim.presets import run_preset, series_peak

    _setup_logging(verbose, log_file)
    written = _guarded(lambda: run_preset(name, output))

    table = Table(title=f"{name}: atom-pair concurrence peak")
    table.add_column("File")
    table.add_column("Kt peak", justify="right")
    table.add_column("C_at max", justify="right")
    for path, series in written.items():
        t_peak, c_peak = series_peak(series)
        table.add_row(path.name, f"{t_peak:.3f}", f"{c_peak:.4f}")
    console.print(table)


@app.command()
def trajectories(
    config: str = typer.Option(..., "--config", "-c", help="Path to the run config file"),
    ntraj: int = typer.Option(..., "--ntraj", "-n", help="Number of trajectories"),
    seed: int = typer.Option(0, "--seed", "-s", help="Base seed (64-bit unsigned)"),
    output: str | None = typer.Option(None, "--output", "-o", help="Output directory"),
    workers: int | None = typer.Option(None, "--workers", "-w", help="Worker threads"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
    log_file: str | None = typer.Option(None, "--log-file", help="Also log to this file"),
):
    """Monte Carlo ensemble: writes trajectories.csv and channels.csv."""
    from qsim.config import load_config
    from qsim.runner import run_config

    _setup_logging(verbose, log_file)
    # the flags complete or replace the file keys before validation
    overrides: dict[str, object] = {"mode": "trajectories", "n_traj": ntraj, "seed": seed}
    if output is not None:
        overrides["output"] = output
    if workers is not None:
        overrides["workers"] = workers
    cfg = _guarded(lambda: load_config(config, overrides))

    written = _guarded(lambda: run_config(cfg))
    for path in written:
        console.print(f"[green]Wrote[/green] {path}")


def _ratios(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise ValueError(f"expected comma-separated numbers, got {text!r}") from e


@app.command()
def sweep(
    kappa: str = typer.Option("0.8,0.85,0.9,0.95,1.0", "--kappa", help="kappa/K values"),
    gamma: str = typer.Option("0,0.1,0.2,0.3", "--gamma", help="Gamma/K values"),
    output: str = typer.Option("output", "--output", "-o", help="Output directory"),
    verbose: bool = typer.Option(False, "--verbose", "-v"),
):
    """Peak atom-pair concurrence over a grid of loss ratios -> sweep.csv."""
    from qsim.presets import emit_sweep_csv, loss_sweep

    _setup_logging(verbose)
    rows = _guarded(lambda: loss_sweep(_ratios(kappa), _ratios(gamma)))
    path = _guarded(lambda: emit_sweep_csv(rows, Path(output) / "sweep.csv"))

    table = Table(title="Loss sweep")
    table.add_column("kappa/K", justify="right")
    table.add_column("Gamma/K", justify="right")
    table.add_column("Kt peak", justify="right")
    table.add_column("C_at max", justify="right")
    for row in rows:
        table.add_row(
            f"{row.kappa_over_k:g}",
            f"{row.gamma_over_k:g}",
            f"{row.t_peak:.3f}",
            f"{row.c_at_peak:.4f}",
        )
    console.print(table)
    console.print(f"[green]Wrote[/green] {path}")


if __name__ == "__main__":
    app()
