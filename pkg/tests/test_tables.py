from __future__ import annotations

import logging
from fractions import Fraction

import pytest

from cpn_spectra.errors import UsageError
from cpn_spectra.tables import NamedTable, render_named_table, table_rows


def test_hermitian_plane_table() -> None:
    rendered = render_named_table(NamedTable.VIII, 2, 0)
    assert [(row.eigenvalue, row.dimension) for row in rendered.rows] == [(12, 8), (32, 27), (0, 1), (24, 20)]
    assert [row.printed_dimension for row in rendered.rows] == [8, 27, 1, 15]
    assert len(rendered.discrepancies) == 1
    (item,) = rendered.discrepancies
    assert item.kind == "dimension"
    assert (item.printed, item.computed) == ("15", "20")
    assert "m=0" in item.subject


def test_paired_row_names_both_pieces() -> None:
    rendered = render_named_table(NamedTable.VIII, 2, 1)
    paired = [row for row in rendered.rows if len(row.pieces) == 2]
    assert [row.index for row in paired] == [0, 1]
    assert all(row.eigenvalue_matches for row in paired)


def test_functions_and_forms() -> None:
    rendered = render_named_table(NamedTable.II, 2, 0)
    functions = rendered.rows[0]
    assert (functions.eigenvalue, functions.dimension) == (0, 1)
    assert functions.printed_dimension == Fraction(1)
    constants = [row for row in rendered.rows if row.index is None]
    assert [(row.block, row.eigenvalue, row.dimension) for row in constants] == [((0, 1), 12, 8), ((1, 0), 12, 8)]


def test_forms_row_with_shifted_index() -> None:
    rendered = render_named_table(NamedTable.II, 2, 0)
    eigen = [item for item in rendered.discrepancies if item.kind == "eigenvalue"]
    assert len(eigen) == 1
    assert (eigen[0].printed, eigen[0].computed) == ("16", "32")
    assert eigen[0].subject.startswith("II (0,1) k=0")
    second_rows = [row for row in rendered.rows if row.dim_text.startswith("n(n+2k+4)")]
    assert [row.dimension for row in second_rows] == [27, 27]


@pytest.mark.parametrize("name", list(NamedTable))
def test_every_table_renders(name: NamedTable) -> None:
    rendered = render_named_table(name, 3, 1)
    assert rendered.rows
    for row in rendered.rows:
        assert {label.eigenvalue for label in row.pieces} == {row.eigenvalue}
    assert rendered.to_dict()["table"] == name.value


def test_conjugate_tables_agree() -> None:
    direct = render_named_table(NamedTable.VI, 2, 2)
    conjugate = render_named_table(NamedTable.VII, 2, 2)
    assert [(row.eigenvalue, row.dimension) for row in direct.rows] == [
        (row.eigenvalue, row.dimension) for row in conjugate.rows
    ]


def test_plane_tables_fix_the_dimension(caplog: pytest.LogCaptureFixture) -> None:
    with caplog.at_level(logging.WARNING, logger="cpn_spectra.tables"):
        rendered = render_named_table(NamedTable.VIII, 5, 0)
    assert rendered.n == 2
    assert "ignoring n=5" in caplog.text


@pytest.mark.parametrize(("n", "index_max"), [(0, 1), (2, -1)])
def test_rejects_bad_arguments(n: int, index_max: int) -> None:
    with pytest.raises(UsageError):
        render_named_table(NamedTable.V, n, index_max)


def test_index_names() -> None:
    assert NamedTable.VIII.index_name == "m"
    assert NamedTable.V.index_name == "k"
    assert all(table_rows(name) for name in NamedTable)


@pytest.mark.parametrize(
    ("text", "expected"),
    [("VIII", NamedTable.VIII), ("viii", NamedTable.VIII), ("s11-cp2", NamedTable.VIII), (" II ", NamedTable.II)],
)
def test_parse_numerals_and_aliases(text: str, expected: NamedTable) -> None:
    assert NamedTable.parse(text) is expected


def test_numerals_are_canonical() -> None:
    assert [name.value for name in NamedTable] == ["II", "III", "IV", "V", "VI", "VII", "VIII"]
    assert [name.fixed_n for name in NamedTable] == [None, None, None, None, 2, 2, 2]
    assert NamedTable.III.alias == "s02"
    with pytest.raises(UsageError):
        NamedTable.parse("IX")


def test_hermitian_table_constant_row() -> None:
    rendered = render_named_table(NamedTable.V, 3, 0)
    constants = [row for row in rendered.rows if row.eigenvalue == 0]
    assert [(row.index, row.dimension) for row in constants] == [(0, 1)]
