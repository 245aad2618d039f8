"""Command line front end for spectrum queries, table reproduction and verification."""

from __future__ import annotations

from collections.abc import Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Annotated, Any

import typer
from dotenv import load_dotenv
from rich.console import Console

from . import __application_binary__, __application_title__, __version__
from .config import DEFAULT_MAX_COLUMNS, configured
from .emit import OutputFormat, emit_dims, emit_spectrum, emit_table, emit_verification
from .errors import CpnSpectraError
from .logging_config import get_logger, setup_logging
from .oracle import CheckStatus, Grid, Suite, run_suite
from .spaces import (
    DimensionRoute,
    PrimitiveCase,
    SpaceQuery,
    closed_form_primitive_dim,
    dim_harmonic,
    dim_polynomial,
    dim_primitive,
    dim_traceless,
    harmonic_space,
    polynomial_space,
    primitive_dim_routes,
    primitive_space,
    traceless_space,
)
from .spectra import SpectrumQuery, compute_spectrum
from .tables import NamedTable, render_named_table
from .utils import validate_choice, validate_one_of, write_output

app = typer.Typer(
    name=__application_binary__,
    help=f"{__application_title__} - Exact Lichnerowicz Laplacian spectra on complex projective space",
    rich_markup_mode="rich",
    add_completion=False,
    no_args_is_help=True,
)
console = Console(stderr=True)
logger = get_logger(__name__)

# Load environment variables
load_dotenv()
load_dotenv(Path(f"~/.{__application_binary__}.env").expanduser())

DebugOption = Annotated[bool, typer.Option("--debug", "-d", help="Enable debug logging")]
LogFileOption = Annotated[Path | None, typer.Option("--log-file", help="Also write logs to this file")]
MaxColumnsOption = Annotated[
    int,
    typer.Option(
        "--max-columns",
        help="Largest ambient basis a space constructor may enumerate",
        min=1,
        envvar="CPN_SPECTRA_MAX_COLUMNS",
    ),
]
WorkersOption = Annotated[
    int,
    typer.Option(
        "--workers",
        "-w",
        help="Worker processes for piece evaluation and checks (never changes the output)",
        min=1,
        envvar="CPN_SPECTRA_WORKERS",
    ),
]
OutputOption = Annotated[
    Path | None,
    typer.Option("--output", "-o", help="Write the result to this file instead of standard output"),
]


def version_callback(value: bool) -> None:
    """Print version and exit.

    Raises:
        typer.Exit: Always raised when value is True.
    """
    if value:
        console.print(f"[bold blue]{__application_title__}[/bold blue] version [bold green]{__version__}[/bold green]")
        raise typer.Exit()


@app.callback()
def main(
    version: Annotated[
        bool | None,
        typer.Option("--version", "-v", callback=version_callback, is_eager=True),
    ] = None,
) -> None:
    """CPn Spectra - Exact Lichnerowicz Laplacian spectra on complex projective space."""


@contextmanager
def _command_errors(command: str, debug: bool) -> Iterator[None]:
    """Turn library errors into an error line and their exit code."""
    try:
        yield
    except typer.Exit:
        raise
    except KeyboardInterrupt:
        console.print("\n[yellow]Operation cancelled by user[/yellow]")
        raise typer.Exit(0)
    except CpnSpectraError as e:
        logger.error(f"{command} command failed: {e}")
        console.print(f"[bold red]Error:[/bold red] {str(e)}")
        if debug:
            console.print_exception()
        raise typer.Exit(code=e.exit_code)
    except Exception as e:
        logger.error(f"{command} command failed: {e}")
        console.print(f"[bold red]Error:[/bold red] {str(e)}")
        if debug:
            console.print_exception()
        raise typer.Exit(code=1)


def _deliver(text: str, output: Path | None, fmt: OutputFormat) -> None:
    if output is None:
        typer.echo(text, nl=False)
        return
    path = write_output(text, output, fmt.extension)
    console.print(f"[green]✓[/green] Wrote {path}")


@app.command("spectrum", help="Eigenvalues and multiplicities of one (p,q) tensor block up to a bound")
def spectrum_command(
    n: Annotated[int, typer.Option("--n", help="Complex dimension of CP^n", min=1)],
    p: Annotated[int, typer.Option("--p", help="Holomorphic tensor degree", min=0)],
    max_eig: Annotated[int, typer.Option("--max-eig", help="Largest eigenvalue to report", min=0)],
    q: Annotated[int | None, typer.Option("--q", help="Antiholomorphic tensor degree", min=0)] = None,
    l: Annotated[int | None, typer.Option("--l", help="Excess q - p (alternative to --q)", min=0)] = None,  # noqa: E741
    fmt: Annotated[OutputFormat, typer.Option("--format", "-f", help="Output format")] = OutputFormat.TABLE,
    output: OutputOption = None,
    workers: WorkersOption = 1,
    max_columns: MaxColumnsOption = DEFAULT_MAX_COLUMNS,
    debug: DebugOption = False,
    log_file: LogFileOption = None,
) -> None:
    with _command_errors("Spectrum", debug):
        setup_logging(debug=debug, log_file=log_file)
        validate_one_of("--q", q, "--l", l)
        antihol = q if q is not None else p + (l or 0)
        query = SpectrumQuery(n, p, antihol, max_eig)
        logger.debug(f"Spectrum query: {query}")
        with configured(max_columns=max_columns, workers=workers):
            report = compute_spectrum(query)
        if report.discrepancies:
            console.print(f"[yellow]{len(report.discrepancies)} virtual dimensions resolved on the quotient[/yellow]")
        _deliver(emit_spectrum(report, fmt), output, fmt)


@app.command("table", help="Reproduce a named eigenvalue table with computed and printed values")
def table_command(
    name: Annotated[str, typer.Option("--name", help=f"Table numeral or alias: {', '.join(NamedTable.choices())}")],
    n: Annotated[int, typer.Option("--n", help="Complex dimension (fixed to 2 by tables VI to VIII)", min=1)],
    index_max: Annotated[int, typer.Option("--index-max", help="Largest row index k or m", min=0)],
    fmt: Annotated[OutputFormat, typer.Option("--format", "-f", help="Output format")] = OutputFormat.TABLE,
    output: OutputOption = None,
    max_columns: MaxColumnsOption = DEFAULT_MAX_COLUMNS,
    debug: DebugOption = False,
    log_file: LogFileOption = None,
) -> None:
    with _command_errors("Table", debug):
        setup_logging(debug=debug, log_file=log_file)
        names = [t.value for t in NamedTable] + [t.alias for t in NamedTable]
        table = NamedTable.parse(validate_choice(name, names, "table name"))
        with configured(max_columns=max_columns):
            rendered = render_named_table(table, n, index_max)
        _deliver(emit_table(rendered, fmt), output, fmt)


def dimension_summary(query: SpaceQuery, case: PrimitiveCase | None, brute: bool) -> dict[str, Any]:
    """Closed-form dimensions of one index tuple, optionally with kernel dimensions beside them."""
    case = case or PrimitiveCase.for_query(query)
    summary: dict[str, Any] = {
        "query": query._asdict(),
        "case": case.value,
        "polynomial": dim_polynomial(query),
        "harmonic": dim_harmonic(query),
        "traceless": dim_traceless(query),
        "primitive": dim_primitive(query, case),
    }
    if not query.is_void:
        for route, value in primitive_dim_routes(query, case).items():
            summary[f"route {route.value}"] = value
        printed = closed_form_primitive_dim(case.reflect(query), printed=True)
        if printed is not None and printed.denominator != 1:
            summary[f"route {DimensionRoute.CLOSED_FORM.value} as printed"] = str(printed)
    if brute:
        summary["polynomial kernel"] = polynomial_space(query).dim
        summary["harmonic kernel"] = harmonic_space(query).dim
        summary["traceless kernel"] = traceless_space(query).dim
        summary["primitive kernel"] = primitive_space(query, case).dim
    return summary


@app.command("dims", help="Dimensions of the polynomial, harmonic, traceless and primitive spaces")
def dims_command(
    n: Annotated[int, typer.Option("--n", help="Complex dimension of CP^n", min=1)],
    p: Annotated[int, typer.Option("--p", help="Holomorphic tensor degree", min=0)],
    q: Annotated[int, typer.Option("--q", help="Antiholomorphic tensor degree", min=0)],
    k: Annotated[int, typer.Option("--k", help="Holomorphic coefficient degree", min=0)],
    l: Annotated[int, typer.Option("--l", help="Antiholomorphic coefficient degree", min=0)],  # noqa: E741
    case: Annotated[
        PrimitiveCase | None, typer.Option("--case", help="Primitive case (default from the degrees)")
    ] = None,
    brute: Annotated[bool, typer.Option("--brute", help="Also compute every space as an exact kernel")] = False,
    fmt: Annotated[OutputFormat, typer.Option("--format", "-f", help="Output format")] = OutputFormat.TABLE,
    output: OutputOption = None,
    max_columns: MaxColumnsOption = DEFAULT_MAX_COLUMNS,
    debug: DebugOption = False,
    log_file: LogFileOption = None,
) -> None:
    with _command_errors("Dims", debug):
        setup_logging(debug=debug, log_file=log_file)
        query = SpaceQuery(n, p, q, k, l)
        with configured(max_columns=max_columns):
            summary = dimension_summary(query, case, brute)
        _deliver(emit_dims(summary, fmt), output, fmt)


@app.command("verify", help="Run a verification suite; exits 1 when any check fails")
def verify_command(
    suite: Annotated[Suite, typer.Option("--suite", help="Which suite to run")] = Suite.ALL,
    grid: Annotated[Grid, typer.Option("--grid", help="Index grid")] = Grid.SMALL,
    fmt: Annotated[OutputFormat, typer.Option("--format", "-f", help="Output format")] = OutputFormat.TABLE,
    output: OutputOption = None,
    workers: WorkersOption = 1,
    max_columns: MaxColumnsOption = DEFAULT_MAX_COLUMNS,
    debug: DebugOption = False,
    log_file: LogFileOption = None,
) -> None:
    with _command_errors("Verify", debug):
        setup_logging(debug=debug, log_file=log_file)
        with configured(max_columns=max_columns, workers=workers):
            report = run_suite(suite, grid)
        _deliver(emit_verification(report, fmt), output, fmt)
        summary = ", ".join(f"{status.value} {report.count(status)}" for status in CheckStatus)
        if report.failed:
            console.print(f"[bold red]✗[/bold red] Suite {suite.value}: {summary}")
            raise typer.Exit(code=report.exit_code)
        console.print(f"[green]✓[/green] Suite {suite.value}: {summary}")


if __name__ == "__main__":
    app()
