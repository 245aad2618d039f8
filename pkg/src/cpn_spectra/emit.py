"""Text, CSV and JSON renderings of spectra, tables and verification reports.

Every emitter returns a string that depends only on its input, so outputs are byte stable across
runs and worker counts.
"""

from __future__ import annotations

import csv
import io
import json
from enum import Enum
from typing import Any

from rich.console import Console, RenderableType
from rich.table import Table

from .errors import UsageError
from .oracle import CheckStatus, VerificationReport
from .spectra import SpectralPiece, SpectrumReport
from .tables import RenderedTable


class OutputFormat(str, Enum):
    """Output formats.

    Attributes:
        TABLE: Human-readable rich table.
        CSV: Comma-separated values.
        JSON: JSON document; large integers are decimal strings.
    """

    TABLE = "table"
    CSV = "csv"
    JSON = "json"

    @property
    def extension(self) -> str:
        return {OutputFormat.TABLE: ".txt", OutputFormat.CSV: ".csv", OutputFormat.JSON: ".json"}[self]


def _as_text(renderable: RenderableType) -> str:
    buffer = io.StringIO()
    Console(file=buffer, width=120, color_system=None, force_terminal=False).print(renderable)
    return buffer.getvalue()


def _as_json(data: dict[str, Any]) -> str:
    return json.dumps(data, indent=2) + "\n"


def _as_csv(header: list[str], rows: list[list[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def spectrum_view(report: SpectrumReport) -> Table:
    n, p, q, max_eig = report.query
    title = f"Spectrum of ({p},{q}) tensors on CP^{n} up to {max_eig}"
    if report.conjugated:
        title += f" (conjugate of ({q},{p}))"
    table = Table(title=title)
    table.add_column("eigenvalue", justify="right")
    table.add_column("multiplicity", justify="right")
    table.add_column("pieces (m,k,r,s:case=dim)")
    for line in report.lines:
        pieces = ", ".join(_piece_text(piece) for piece in line.pieces)
        table.add_row(str(line.eigenvalue), str(line.multiplicity), pieces)
    return table


def _piece_text(piece: SpectralPiece) -> str:
    label = piece.label
    return f"{label.m},{label.k},{label.r},{label.s}:{label.family.value}={piece.multiplicity}"


def emit_spectrum(report: SpectrumReport, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return _as_json(report.to_dict())
    if fmt is OutputFormat.CSV:
        rows = [[line.eigenvalue, line.multiplicity, len(line.pieces)] for line in report.lines]
        return _as_csv(["eigenvalue", "multiplicity", "piece_count"], rows)
    if fmt is OutputFormat.TABLE:
        return _as_text(spectrum_view(report))
    raise UsageError(f"Unknown output format {fmt}")


def table_view(rendered: RenderedTable) -> Table:
    table = Table(title=f"Table {rendered.name.value} (n={rendered.n})")
    table.add_column("block")
    table.add_column(rendered.name.index_name, justify="right")
    table.add_column("eigenvalue expression")
    table.add_column("eigenvalue", justify="right")
    table.add_column("dimension", justify="right")
    table.add_column("note")
    for row in rendered.rows:
        notes = []
        if not row.eigenvalue_matches:
            notes.append(f"printed eigenvalue {row.printed_eigenvalue}")
        if not row.dimension_matches:
            notes.append(f"printed dimension {row.printed_dimension}")
        table.add_row(
            f"S^{{{row.block[0]},{row.block[1]}}}",
            "" if row.index is None else str(row.index),
            row.eigen_text,
            str(row.eigenvalue),
            str(row.dimension),
            "; ".join(notes),
        )
    return table


def emit_table(rendered: RenderedTable, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return _as_json(rendered.to_dict())
    if fmt is OutputFormat.CSV:
        header = ["block", "index", "eigenvalue", "dimension", "printed_eigenvalue", "printed_dimension"]
        rows = [
            [
                f"{row.block[0]}{row.block[1]}",
                "" if row.index is None else row.index,
                row.eigenvalue,
                row.dimension,
                row.printed_eigenvalue,
                row.printed_dimension,
            ]
            for row in rendered.rows
        ]
        return _as_csv(header, rows)
    return _as_text(table_view(rendered))


def verification_view(report: VerificationReport) -> Table:
    """Summary counts followed by every entry that is not a pass."""
    table = Table(title=f"Suite {report.suite.value} on the {report.grid.value} grid")
    table.add_column("check")
    table.add_column("status")
    table.add_column("expected", justify="right")
    table.add_column("computed", justify="right")
    table.add_column("detail")
    for entry in report.entries:
        if entry.status is CheckStatus.PASS:
            continue
        table.add_row(entry.check_id, entry.status.value, entry.expected or "", entry.computed or "", entry.detail)
    summary = ", ".join(f"{status.value}: {report.count(status)}" for status in CheckStatus)
    table.caption = summary
    return table


def emit_verification(report: VerificationReport, fmt: OutputFormat) -> str:
    if fmt is OutputFormat.JSON:
        return _as_json(report.to_dict())
    if fmt is OutputFormat.CSV:
        rows = [[e.check_id, e.status.value, e.expected or "", e.computed or ""] for e in report.entries]
        return _as_csv(["check", "status", "expected", "computed"], rows)
    return _as_text(verification_view(report))


def emit_dims(summary: dict[str, Any], fmt: OutputFormat) -> str:
    """Render a dimension summary: ``query`` plus flat name to value entries."""
    if fmt is OutputFormat.JSON:
        return _as_json(summary)
    values = [(name, value) for name, value in summary.items() if name != "query"]
    if fmt is OutputFormat.CSV:
        return _as_csv(["quantity", "value"], [[name, "" if value is None else value] for name, value in values])
    query = summary["query"]
    n, p, q, k, l = (query[key] for key in ("n", "p", "q", "k", "l"))  # noqa: E741
    table = Table(title=f"Dimensions for T(n={n}; p={p}, q={q}; k={k}, l={l})")
    table.add_column("quantity")
    table.add_column("value", justify="right")
    for name, value in values:
        table.add_row(name, "n/a" if value is None else str(value))
    return _as_text(table)
