#!/usr/bin/env python3
"""
Command-line interface for precond-bench.

Usage:
    bench run --config sweep.json [--resume] [--jobs N] [--seed S] [--ordering rcm --ordering-label rcm]
    bench report --records bench-out --mode vs_control
    bench fetch --list matrices.json
    bench gen --kind poisson2d --k 32 --out poisson32.mtx
"""

import json
import logging
from pathlib import Path
from typing import Optional

import typer
from pydantic import TypeAdapter, ValidationError
from rich.console import Console
from rich.table import Table

from precond_bench.analysis.records import load_records
from precond_bench.errors import PrecondBenchError
from precond_bench.harness.config import BenchmarkConfig, MatrixSource
from precond_bench.harness.fetch import fetch_matrix
from precond_bench.harness.generators import generate_test_matrix
from precond_bench.harness.report import make_report
from precond_bench.harness.runner import run_benchmark
from precond_bench.logger import get_cli_logger
from precond_bench.settings import get_settings
from precond_bench.sparse.matrix_market import write_matrix_market
from precond_bench.types import ReportMode
from precond_bench.version import __version__

app = typer.Typer(help="Preconditioned conjugate gradient benchmarking toolkit.", no_args_is_help=True)
console = Console()
logger = logging.getLogger("precond_bench.cli")


def _fail(message: str) -> None:
    console.print(f"[red]Error:[/red] {message}")
    raise typer.Exit(code=1)


def _version_callback(value: bool) -> None:
    if value:
        console.print(f"precond-bench {__version__}")
        raise typer.Exit()


@app.callback()
def main_callback(
    debug: bool = typer.Option(False, "--debug", help="Verbose logging including per-solve timings"),
    log_json: Optional[bool] = typer.Option(None, "--log-json/--no-log-json", help="JSON structured logs"),
    log_file: Optional[str] = typer.Option(None, "--log-file", help="Also log to this file"),
    version: bool = typer.Option(False, "--version", callback=_version_callback, is_eager=True),
) -> None:
    settings = get_settings()
    get_cli_logger(
        debug=debug or settings.log_level.upper() == "DEBUG",
        enable_json=settings.log_json if log_json is None else log_json,
        log_file=log_file or settings.log_file,
    )


@app.command()
def run(
    config: Path = typer.Option(..., "--config", "-c", exists=True, dir_okay=False, help="Benchmark configuration (JSON)"),
    resume: bool = typer.Option(False, "--resume", help="Skip run keys already in the output directory"),
    jobs: Optional[int] = typer.Option(None, "--jobs", "-j", min=1, help="Concurrent solves (overrides the config)"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Right-hand side seed (overrides the config, default 123456789)"),
    ordering: Optional[list[str]] = typer.Option(
        None, "--ordering", help="natural, rcm or file:<path>; repeat for several (replaces the config list)"
    ),
    ordering_label: Optional[list[str]] = typer.Option(
        None, "--ordering-label", help="Report name for the --ordering at the same position"
    ),
) -> None:
    """Run a benchmark sweep."""
    try:
        cfg = BenchmarkConfig.from_json_file(config).with_overrides(
            seed=seed, orderings=ordering or (), ordering_labels=ordering_label or ()
        )
        result = run_benchmark(cfg, resume=resume, jobs=jobs)
    except PrecondBenchError as e:
        _fail(str(e))
        return

    table = Table(title=f"Sweep: {cfg.output_dir}", show_header=True, header_style="bold cyan")
    table.add_column("status")
    table.add_column("runs", justify="right")
    for status, count in sorted(result.status_counts().items()):
        table.add_row(status, str(count))
    console.print(table)
    console.print(f"[green]{result.solves} solves[/green], {result.skipped} skipped (already recorded)")


@app.command()
def report(
    records: Path = typer.Option(..., "--records", "-r", exists=True, help="Output directory or records.jsonl"),
    mode: ReportMode = typer.Option(ReportMode.VS_CONTROL, "--mode", "-m", help="Baseline and generation-cost handling"),
    out: Optional[Path] = typer.Option(None, "--out", "-o", help="Report root (defaults to the records directory)"),
    svg: bool = typer.Option(True, "--svg/--no-svg", help="Write SVG profile plots"),
) -> None:
    """Summarize run records as profiles, statistics and best-configuration tables."""
    root = out or (records if records.is_dir() else records.parent)
    try:
        result = make_report(load_records(records), mode, root, svg=svg)
    except PrecondBenchError as e:
        _fail(str(e))
        return

    table = Table(title=f"{mode.value}", show_header=True, header_style="bold cyan")
    for column in ("label", "auc", "geo_mean", "success_rate", "parity", "ge2x", "ge4x", "ge8x"):
        table.add_column(column, justify="left" if column == "label" else "right")
    for row in result.summary.sort_values("auc", ascending=False).itertuples(index=False):
        flag = " *" if row.equivalent_to_control else ""
        table.add_row(
            f"{row.label}{flag}",
            f"{row.auc:.3f}",
            f"{row.geo_mean:.2f}",
            f"{row.success_rate:.0%}",
            f"{row.parity:.0%}",
            f"{row.ge2x:.0%}",
            f"{row.ge4x:.0%}",
            f"{row.ge8x:.0%}",
        )
    console.print(table)
    if result.summary["equivalent_to_control"].any():
        console.print("[dim]* equivalent to no preconditioning[/dim]")
    console.print(f"[green]Report written to {result.output_dir}[/green]")


@app.command()
def fetch(
    list_file: Path = typer.Option(..., "--list", "-l", exists=True, dir_okay=False, help="JSON list of {id, url, sha256}"),
    cache: Optional[Path] = typer.Option(None, "--cache", help="Cache directory (default PRECOND_BENCH_CACHE)"),
    offline: Optional[bool] = typer.Option(None, "--offline/--online", help="Use the cache only"),
) -> None:
    """Download matrices into the local cache."""
    settings = get_settings()
    try:
        raw = json.loads(list_file.read_text(encoding="utf-8"))
        entries = raw["matrices"] if isinstance(raw, dict) else raw
        sources = TypeAdapter(list[MatrixSource]).validate_python(entries)
    except (json.JSONDecodeError, KeyError, ValidationError) as e:
        _fail(f"Invalid matrix list {list_file}: {e}")
        return

    failures = 0
    for source in sources:
        if source.url is None:
            continue
        try:
            result = fetch_matrix(
                source.id,
                source.url,
                cache or settings.cache,
                sha256=source.sha256,
                offline=settings.offline if offline is None else offline,
                timeout=settings.http_timeout_seconds,
            )
        except PrecondBenchError as e:
            failures += 1
            console.print(f"[red]✗[/red] {source.id}: {e}")
            continue
        state = "cached" if result.cached else "downloaded"
        console.print(f"[green]✓[/green] {source.id} ({state}) {result.path} sha256={result.sha256[:12]}")
    if failures:
        raise typer.Exit(code=1)


@app.command()
def gen(
    kind: str = typer.Option(..., "--kind", help="poisson2d, tridiag or random_sdd"),
    out: Path = typer.Option(..., "--out", "-o", help="Matrix Market file to write"),
    k: Optional[int] = typer.Option(None, "--k", help="Grid side for poisson2d"),
    n: Optional[int] = typer.Option(None, "--n", help="Order for tridiag and random_sdd"),
    density: float = typer.Option(0.05, "--density"),
    seed: int = typer.Option(0, "--seed"),
) -> None:
    """Write a generated test matrix."""
    try:
        A = generate_test_matrix(kind, k=k, n=n, density=density, seed=seed)
    except (KeyError, TypeError, ValueError) as e:
        _fail(f"Cannot generate {kind}: {e}")
        return
    path = write_matrix_market(A, out)
    console.print(f"[green]Wrote {path}[/green] n={A.n} nnz={A.nnz}")


def main() -> None:
    app()


if __name__ == "__main__":
    main()
