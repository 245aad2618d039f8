from __future__ import annotations

import json

import pytest

from cpn_spectra.emit import OutputFormat, emit_dims, emit_spectrum, emit_table, emit_verification
from cpn_spectra.oracle import CheckEntry, CheckStatus, Grid, Suite, VerificationReport
from cpn_spectra.spectra import SpectrumQuery, SpectrumReport, build_spectrum, compute_spectrum
from cpn_spectra.tables import NamedTable, render_named_table


@pytest.fixture(scope="module")
def hermitian() -> SpectrumReport:
    return compute_spectrum(SpectrumQuery(2, 1, 1, 12))


def test_spectrum_csv(hermitian: SpectrumReport) -> None:
    assert emit_spectrum(hermitian, OutputFormat.CSV) == "eigenvalue,multiplicity,piece_count\n0,1,1\n12,16,2\n"


def test_spectrum_json(hermitian: SpectrumReport) -> None:
    data = json.loads(emit_spectrum(hermitian, OutputFormat.JSON))
    assert data["query"] == {"n": 2, "p": 1, "q": 1, "max_eig": 12}
    line = data["lines"][1]
    assert (line["eigenvalue"], line["multiplicity"]) == (12, "16")
    assert [(piece["case"], piece["dim"]) for piece in line["pieces"]] == [("S0", "8"), ("S2", "8")]


def test_empty_spectrum_json() -> None:
    report = build_spectrum([], SpectrumQuery(2, 0, 0, 3))
    assert json.loads(emit_spectrum(report, OutputFormat.JSON)) == {
        "query": {"n": 2, "p": 0, "q": 0, "max_eig": 3},
        "lines": [],
        "discrepancies": [],
    }


def test_spectrum_text_names_the_conjugate() -> None:
    text = " ".join(emit_spectrum(compute_spectrum(SpectrumQuery(2, 1, 0, 12)), OutputFormat.TABLE).split())
    assert "conjugate of (0,1)" in text
    assert "12" in text


def test_output_is_stable(hermitian: SpectrumReport) -> None:
    for fmt in OutputFormat:
        assert emit_spectrum(hermitian, fmt) == emit_spectrum(hermitian, fmt)
        assert "\r" not in emit_spectrum(hermitian, fmt)


def test_table_outputs() -> None:
    rendered = render_named_table(NamedTable.VIII, 2, 0)
    lines = emit_table(rendered, OutputFormat.CSV).splitlines()
    assert lines[0] == "block,index,eigenvalue,dimension,printed_eigenvalue,printed_dimension"
    assert lines[1] == "11,,12,8,12,8"
    assert lines[-1] == "11,0,24,20,24,15"
    assert "printed dimension 15" in " ".join(emit_table(rendered, OutputFormat.TABLE).split())
    assert json.loads(emit_table(rendered, OutputFormat.JSON))["table"] == "VIII"


def test_verification_outputs() -> None:
    entries = (
        CheckEntry("eigen a", CheckStatus.PASS, "value 12"),
        CheckEntry("table b", CheckStatus.DISCREPANCY, "eigenvalue", "16", "32"),
    )
    report = VerificationReport(Suite.TABLES, Grid.SMALL, entries)
    text = emit_verification(report, OutputFormat.TABLE)
    assert "table b" in text
    assert "eigen a" not in text
    assert emit_verification(report, OutputFormat.CSV).splitlines()[2] == "table b,discrepancy,16,32"
    assert json.loads(emit_verification(report, OutputFormat.JSON))["exit_code"] == 0


def test_dims_outputs() -> None:
    summary = {"query": {"n": 2, "p": 0, "q": 1, "k": 0, "l": 1}, "primitive": 3, "route closed-form": None}
    assert emit_dims(summary, OutputFormat.CSV) == "quantity,value\nprimitive,3\nroute closed-form,\n"
    text = " ".join(emit_dims(summary, OutputFormat.TABLE).split())
    assert "T(n=2; p=0, q=1; k=0, l=1)" in text
    assert "n/a" in text


def test_extensions() -> None:
    assert [fmt.extension for fmt in OutputFormat] == [".txt", ".csv", ".json"]
