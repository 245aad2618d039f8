"""Tabulated eigenvalues and multiplicities, reproduced next to the computed ones.

Each named table lists rows as they were published: an eigenvalue expression and a dimension
expression, indexed by k (or m on CP^2). Every row also names the pieces it stands for, so the
engine recomputes both values and flags any row where print and computation disagree.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from math import factorial as f
from typing import Any

from .errors import UsageError, VerificationError
from .logging_config import get_logger
from .spectra import Discrepancy, PieceLabel, family_bounds, piece_family, piece_multiplicity

logger = get_logger(__name__)

Expression = Callable[[int, int], int | Fraction]
PieceIndices = tuple[int, int, int, int]


class NamedTable(str, Enum):
    """Tables addressed by their published numerals.

    Attributes:
        II: Functions and (0,1)/(1,0) forms on CP^n.
        III: Symmetric (0,2) tensors on CP^n.
        IV: Symmetric (2,0) tensors on CP^n (conjugate of III).
        V: Hermitian (1,1) tensors on CP^n.
        VI: (0,2) tensors on CP^2.
        VII: (2,0) tensors on CP^2.
        VIII: (1,1) tensors on CP^2.
    """

    II = "II"
    III = "III"
    IV = "IV"
    V = "V"
    VI = "VI"
    VII = "VII"
    VIII = "VIII"

    @property
    def alias(self) -> str:
        """Content name accepted in place of the numeral."""
        return _TABLE_ALIASES[self]

    @property
    def fixed_n(self) -> int | None:
        return 2 if self in (NamedTable.VI, NamedTable.VII, NamedTable.VIII) else None

    @property
    def index_name(self) -> str:
        return "m" if self.fixed_n else "k"

    @classmethod
    def parse(cls, text: str) -> NamedTable:
        """Resolve a numeral (any case) or a content alias.

        Raises:
            UsageError: If the text names no table.
        """
        key = text.strip().lower()
        for table in cls:
            if key in (table.value.lower(), table.alias):
                return table
        raise UsageError(f"Unknown table '{text}'. Must be one of: {', '.join(cls.choices())}")

    @classmethod
    def choices(cls) -> list[str]:
        return [f"{table.value} ({table.alias})" for table in cls]


_TABLE_ALIASES: dict[NamedTable, str] = {
    NamedTable.II: "functions-1forms",
    NamedTable.III: "s02",
    NamedTable.IV: "s20",
    NamedTable.V: "s11",
    NamedTable.VI: "s02-cp2",
    NamedTable.VII: "s20-cp2",
    NamedTable.VIII: "s11-cp2",
}


@dataclass(frozen=True)
class RowSpec:
    """One published row.

    Attributes:
        block: Tensor type (p, q) the row belongs to.
        eigen_text: Eigenvalue expression as published.
        dim_text: Dimension expression as published.
        printed_eigen: The published eigenvalue as a function of (n, index).
        printed_dim: The published dimension as a function of (n, index).
        pieces: Piece indices (m, k, r, s) for a given table index.
        indexed: False for rows printed once, outside the index family.
    """

    block: tuple[int, int]
    eigen_text: str
    dim_text: str
    printed_eigen: Expression
    printed_dim: Expression
    pieces: Callable[[int], tuple[PieceIndices, ...]]
    indexed: bool = True


def _const(
    eigen_text: str,
    dim_text: str,
    eigen: Expression,
    dim: Expression,
    piece: PieceIndices,
    block: tuple[int, int],
) -> RowSpec:
    return RowSpec(block, eigen_text, dim_text, eigen, dim, lambda _: (piece,), indexed=False)


def _function_dim(n: int, k: int) -> Fraction:
    return Fraction(n * (n + 2 * k) * f(n + k - 1) ** 2, f(n) ** 2 * f(k) ** 2)


def _forms_block(block: tuple[int, int], printed_row2: str, row2: Expression) -> list[RowSpec]:
    return [
        _const("4(n+1)", "n(n+2)", lambda n, _: 4 * (n + 1), lambda n, _: n * (n + 2), (0, 0, 0, 0), block),
        RowSpec(
            block,
            printed_row2,
            "n(n+2k+4)((n+k+1)!)^2/((n!)^2((k+2)!)^2)",
            row2,
            lambda n, k: Fraction(n * (n + 2 * k + 4) * f(n + k + 1) ** 2, f(n) ** 2 * f(k + 2) ** 2),
            lambda k: ((0, k + 1, 0, 1),),
        ),
        RowSpec(
            block,
            "4(k+2)(n+k+1)",
            "(k+1)n(n-1)(n+k+2)(n+2k+3)((n+k)!)^2/((n!)^2((k+2)!)^2)",
            lambda n, k: 4 * (k + 2) * (n + k + 1),
            lambda n, k: Fraction(
                (k + 1) * n * (n - 1) * (n + k + 2) * (n + 2 * k + 3) * f(n + k) ** 2, f(n) ** 2 * f(k + 2) ** 2
            ),
            lambda k: ((0, k + 1, 0, 0),),
        ),
    ]


def _functions_1forms() -> list[RowSpec]:
    functions = RowSpec(
        (0, 0),
        "4k(n+k)",
        "n(n+2k)((n+k-1)!)^2/((n!)^2(k!)^2)",
        lambda n, k: 4 * k * (n + k),
        _function_dim,
        lambda k: ((0, k, 0, 0),),
    )
    # The (0,1) block prints its second eigenvalue with k+1 where the conjugate block has k+2
    return [
        functions,
        *_forms_block((0, 1), "4(k+1)(n+k+2)", lambda n, k: 4 * (k + 1) * (n + k + 2)),
        *_forms_block((1, 0), "4(k+2)(n+k+2)", lambda n, k: 4 * (k + 2) * (n + k + 2)),
    ]


def _s02(block: tuple[int, int]) -> list[RowSpec]:
    return [
        _const(
            "8(n+2)",
            "n(n+4)(n+1)^2/4",
            lambda n, _: 8 * (n + 2),
            lambda n, _: Fraction(n * (n + 4) * (n + 1) ** 2, 4),
            (0, 0, 0, 0),
            block,
        ),
        _const(
            "12(n+3)",
            "n(n+1)^2(n+2)^2(n+6)/36",
            lambda n, _: 12 * (n + 3),
            lambda n, _: Fraction(n * (n + 1) ** 2 * (n + 2) ** 2 * (n + 6), 36),
            (0, 1, 0, 1),
            block,
        ),
        RowSpec(
            block,
            "4(k+4)(n+k+4)",
            "((n+k+3)!)^2n(n+2k+8)/((n!)^2((k+4)!)^2)",
            lambda n, k: 4 * (k + 4) * (n + k + 4),
            lambda n, k: Fraction(f(n + k + 3) ** 2 * n * (n + 2 * k + 8), f(n) ** 2 * f(k + 4) ** 2),
            lambda k: ((0, k + 2, 0, 2),),
        ),
        _const(
            "12(n+2)",
            "n(n+1)^2(n-1)(n+2)(n+5)/9",
            lambda n, _: 12 * (n + 2),
            lambda n, _: Fraction(n * (n + 1) ** 2 * (n - 1) * (n + 2) * (n + 5), 9),
            (0, 1, 0, 0),
            block,
        ),
        RowSpec(
            block,
            "4(k+4)(n+k+3)",
            "((n+k+2)!)^2n(n-1)(k+3)(n+k+4)(n+2k+7)/((n!)^2((k+4)!)^2)",
            lambda n, k: 4 * (k + 4) * (n + k + 3),
            lambda n, k: Fraction(
                f(n + k + 2) ** 2 * n * (n - 1) * (k + 3) * (n + k + 4) * (n + 2 * k + 7), f(n) ** 2 * f(k + 4) ** 2
            ),
            lambda k: ((0, k + 2, 0, 1),),
        ),
        RowSpec(
            block,
            "4(k^2+(n+6)k+4n+10)",
            "(n+k+2)!(n+k+1)!n^2(n-1)(k+1)(n+k+5)(n+2k+6)/(2(n!)^2(k+4)!(k+3)!)",
            lambda n, k: 4 * (k * k + (n + 6) * k + 4 * n + 10),
            lambda n, k: Fraction(
                f(n + k + 2) * f(n + k + 1) * n * n * (n - 1) * (k + 1) * (n + k + 5) * (n + 2 * k + 6),
                2 * f(n) ** 2 * f(k + 4) * f(k + 3),
            ),
            lambda k: ((0, k + 2, 0, 0),),
        ),
    ]


def _s11() -> list[RowSpec]:
    block = (1, 1)
    return [
        _const("4(n+1)", "n(n+2)", lambda n, _: 4 * (n + 1), lambda n, _: n * (n + 2), (0, 0, 0, 0), block),
        RowSpec(
            block,
            "4(k+2)(n+k+2)",
            "((n+k+1)!)^2n(n+2k+4)/((n!)^2((k+2)!)^2)",
            lambda n, k: 4 * (k + 2) * (n + k + 2),
            lambda n, k: Fraction(f(n + k + 1) ** 2 * n * (n + 2 * k + 4), f(n) ** 2 * f(k + 2) ** 2),
            lambda k: ((0, k + 1, 1, 1),),
        ),
        RowSpec(
            block,
            "4k(n+k)",
            "n(n+2k)((n+k-1)!)^2/((n!)^2(k!)^2)",
            lambda n, k: 4 * k * (n + k),
            _function_dim,
            lambda k: ((1, k, 0, 0),),
        ),
        RowSpec(
            block,
            "4(k+2)(n+k+1)",
            "2((n+k)!)^2n(n-1)(k+1)(n+k+1)(n+2k+3)/((n!)^2((k+2)!)^2)",
            lambda n, k: 4 * (k + 2) * (n + k + 1),
            lambda n, k: Fraction(
                2 * f(n + k) ** 2 * n * (n - 1) * (k + 1) * (n + k + 1) * (n + 2 * k + 3), f(n) ** 2 * f(k + 2) ** 2
            ),
            lambda k: ((0, k + 1, 1, 0), (0, k + 1, 0, 1)),
        ),
        RowSpec(
            block,
            "4(k+2)(n+k)",
            "((n+k-1)!)^2n^2(n-2)(k+1)^2(n+k+1)^2(n+2k+2)/((n!)^2((k+2)!)^2)",
            lambda n, k: 4 * (k + 2) * (n + k),
            lambda n, k: Fraction(
                f(n + k - 1) ** 2 * n * n * (n - 2) * (k + 1) ** 2 * (n + k + 1) ** 2 * (n + 2 * k + 2),
                f(n) ** 2 * f(k + 2) ** 2,
            ),
            lambda k: ((0, k + 1, 0, 0),),
        ),
    ]


def _s02_cp2(block: tuple[int, int]) -> list[RowSpec]:
    return [
        _const("32", "27", lambda *_: 32, lambda *_: 27, (0, 0, 0, 0), block),
        _const("60", "64", lambda *_: 60, lambda *_: 64, (0, 1, 0, 1), block),
        RowSpec(
            block,
            "4(m+4)(m+6)",
            "(m+5)^3",
            lambda _, m: 4 * (m + 4) * (m + 6),
            lambda _, m: (m + 5) ** 3,
            lambda m: ((0, m + 2, 0, 2),),
        ),
        _const("48", "56", lambda *_: 48, lambda *_: 56, (0, 1, 0, 0), block),
        RowSpec(
            block,
            "4(m+4)(m+5)",
            "(m+3)(m+6)(2m+9)/2",
            lambda _, m: 4 * (m + 4) * (m + 5),
            lambda _, m: Fraction((m + 3) * (m + 6) * (2 * m + 9), 2),
            lambda m: ((0, m + 2, 0, 1),),
        ),
        RowSpec(
            block,
            "4(m^2+8m+18)",
            "(m+1)(m+7)(m+4)",
            lambda _, m: 4 * (m * m + 8 * m + 18),
            lambda _, m: (m + 1) * (m + 7) * (m + 4),
            lambda m: ((0, m + 2, 0, 0),),
        ),
    ]


def _s11_cp2() -> list[RowSpec]:
    block = (1, 1)
    return [
        _const("12", "8", lambda *_: 12, lambda *_: 8, (0, 0, 0, 0), block),
        RowSpec(
            block,
            "4(m+2)(m+4)",
            "(m+3)^3",
            lambda _, m: 4 * (m + 2) * (m + 4),
            lambda _, m: (m + 3) ** 3,
            lambda m: ((0, m + 1, 1, 1),),
        ),
        RowSpec(
            block,
            "4m(m+2)",
            "(m+1)^3",
            lambda _, m: 4 * m * (m + 2),
            lambda _, m: (m + 1) ** 3,
            lambda m: ((1, m, 0, 0),),
        ),
        RowSpec(
            block,
            "4(m+2)(m+3)",
            "(m+1)(m+3)(2m+5)",
            lambda _, m: 4 * (m + 2) * (m + 3),
            lambda _, m: (m + 1) * (m + 3) * (2 * m + 5),
            lambda m: ((0, m + 1, 1, 0), (0, m + 1, 0, 1)),
        ),
    ]


def table_rows(name: NamedTable) -> list[RowSpec]:
    builders: dict[NamedTable, Callable[[], list[RowSpec]]] = {
        NamedTable.II: _functions_1forms,
        NamedTable.III: lambda: _s02((0, 2)),
        NamedTable.IV: lambda: _s02((2, 0)),
        NamedTable.V: _s11,
        NamedTable.VI: lambda: _s02_cp2((0, 2)),
        NamedTable.VII: lambda: _s02_cp2((2, 0)),
        NamedTable.VIII: _s11_cp2,
    }
    return builders[name]()


@dataclass(frozen=True)
class TableRow:
    """A published row instantiated at one index, with the computed values.

    Attributes:
        block: Tensor type (p, q).
        index: Table index, or None for rows printed once.
        eigen_text: Published eigenvalue expression.
        dim_text: Published dimension expression.
        printed_eigenvalue: Published eigenvalue at this index.
        printed_dimension: Published dimension at this index.
        eigenvalue: Computed eigenvalue.
        dimension: Computed multiplicity.
        pieces: Labels of the pieces behind the row.
    """

    block: tuple[int, int]
    index: int | None
    eigen_text: str
    dim_text: str
    printed_eigenvalue: Fraction
    printed_dimension: Fraction
    eigenvalue: int
    dimension: int
    pieces: tuple[PieceLabel, ...]

    @property
    def eigenvalue_matches(self) -> bool:
        return self.printed_eigenvalue == self.eigenvalue

    @property
    def dimension_matches(self) -> bool:
        return self.printed_dimension == self.dimension

    def to_dict(self) -> dict[str, Any]:
        return {
            "block": list(self.block),
            "index": self.index,
            "eigenvalue_expression": self.eigen_text,
            "dimension_expression": self.dim_text,
            "printed_eigenvalue": str(self.printed_eigenvalue),
            "printed_dimension": str(self.printed_dimension),
            "eigenvalue": self.eigenvalue,
            "dimension": str(self.dimension),
        }


@dataclass(frozen=True)
class RenderedTable:
    name: NamedTable
    n: int
    index_max: int
    rows: tuple[TableRow, ...]
    discrepancies: tuple[Discrepancy, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "table": self.name.value,
            "n": self.n,
            "index_max": self.index_max,
            "rows": [row.to_dict() for row in self.rows],
            "discrepancies": [item.to_dict() for item in self.discrepancies],
        }


def _labels(n: int, block: tuple[int, int], pieces: tuple[PieceIndices, ...]) -> tuple[PieceLabel, ...]:
    p, l = min(block), abs(block[1] - block[0])  # noqa: E741
    labels = []
    for m, k, r, s in pieces:
        family = piece_family(p, l, m, k)
        r_max, s_max = family_bounds(family, p, l, m, k)
        if not (0 <= r <= r_max and 0 <= s <= s_max):
            raise UsageError(f"Row piece (m={m}, k={k}, r={r}, s={s}) is outside its index family")
        labels.append(PieceLabel(n, p, l, m, k, r, s, family))
    return tuple(labels)


def _instantiate(spec: RowSpec, n: int, index: int) -> TableRow:
    labels = _labels(n, spec.block, spec.pieces(index))
    eigenvalues = {label.eigenvalue for label in labels}
    if len(eigenvalues) != 1:
        raise VerificationError(f"Pieces of row {spec.eigen_text} have eigenvalues {sorted(eigenvalues)}")
    return TableRow(
        block=spec.block,
        index=index if spec.indexed else None,
        eigen_text=spec.eigen_text,
        dim_text=spec.dim_text,
        printed_eigenvalue=Fraction(spec.printed_eigen(n, index)),
        printed_dimension=Fraction(spec.printed_dim(n, index)),
        eigenvalue=eigenvalues.pop(),
        dimension=sum(piece_multiplicity(label) for label in labels),
        pieces=labels,
    )


def row_discrepancies(name: NamedTable, row: TableRow) -> list[Discrepancy]:
    where = f"{name.value} ({row.block[0]},{row.block[1]})"
    if row.index is not None:
        where += f" {name.index_name}={row.index}"
    found = []
    if not row.eigenvalue_matches:
        found.append(
            Discrepancy("eigenvalue", f"{where} {row.eigen_text}", str(row.printed_eigenvalue), str(row.eigenvalue))
        )
    if not row.dimension_matches:
        found.append(
            Discrepancy("dimension", f"{where} {row.dim_text}", str(row.printed_dimension), str(row.dimension))
        )
    return found


def render_named_table(name: NamedTable, n: int, index_max: int) -> RenderedTable:
    """Instantiate a named table for indices 0..index_max and audit every row.

    Args:
        name: Which table.
        n: Complex dimension; ignored (with a warning) by the CP^2 tables, which fix n = 2.
        index_max: Largest index k (or m).

    Raises:
        UsageError: If n < 1 or index_max < 0.
    """
    if name.fixed_n is not None and n != name.fixed_n:
        logger.warning(f"Table {name.value} is fixed to n={name.fixed_n}; ignoring n={n}")
        n = name.fixed_n
    if n < 1 or index_max < 0:
        raise UsageError(f"Tables need n >= 1 and a nonnegative index, got n={n}, index_max={index_max}")
    rows = []
    for spec in table_rows(name):
        indices = range(index_max + 1) if spec.indexed else range(1)
        rows.extend(_instantiate(spec, n, index) for index in indices)
    discrepancies = [item for row in rows for item in row_discrepancies(name, row)]
    for item in discrepancies:
        logger.warning(f"{item.subject}: printed {item.printed}, computed {item.computed}")
    return RenderedTable(name, n, index_max, tuple(rows), tuple(discrepancies))
