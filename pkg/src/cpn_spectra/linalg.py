"""Exact linear algebra over the rationals on monomial-indexed coordinate spaces.

Matrices keep sparse rows behind a dense-looking interface. Elimination is fraction free: rows are
scaled to primitive integer vectors and combined by cross multiplication, then divided by their
content, so intermediate growth stays bounded by the size of the true minors.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from functools import cached_property, reduce

from .config import get_config
from .errors import ResourceError, UsageError
from .logging_config import get_logger
from .polyring import BiPoly, Monomial, Multidegree, Scalar, monomial_basis
from .tensorops import TensorPoly

logger = get_logger(__name__)

SparseVector = dict[int, Fraction]
TensorMap = Callable[[TensorPoly], TensorPoly]


def _primitive(row: Mapping[int, Scalar]) -> dict[int, int]:
    """Scale a rational row to a primitive integer row with the same sign pattern."""
    entries = {col: Fraction(value) for col, value in row.items() if value}
    if not entries:
        return {}
    denominator = reduce(math.lcm, (value.denominator for value in entries.values()), 1)
    scaled = {col: int(value * denominator) for col, value in entries.items()}
    content = reduce(math.gcd, scaled.values(), 0)
    return {col: value // content for col, value in scaled.items()}


def _eliminate(target: dict[int, int], pivot_row: dict[int, int], col: int) -> dict[int, int]:
    """Cancel ``col`` in ``target`` by cross multiplication, then remove the content."""
    a = pivot_row[col]
    b = target[col]
    out: dict[int, int] = {}
    for key in target.keys() | pivot_row.keys():
        value = a * target.get(key, 0) - b * pivot_row.get(key, 0)
        if value:
            out[key] = value
    content = reduce(math.gcd, out.values(), 0)
    if content > 1:
        out = {key: value // content for key, value in out.items()}
    return out


class Echelon:
    """Incremental fraction-free Gauss-Jordan form of a set of rows.

    Every stored row is a primitive integer vector with a positive pivot, and no stored row has a
    nonzero entry in another row's pivot column.
    """

    def __init__(self) -> None:
        self.pivots: dict[int, dict[int, int]] = {}

    @property
    def rank(self) -> int:
        return len(self.pivots)

    def reduce(self, row: Mapping[int, Scalar]) -> dict[int, int]:
        current = _primitive(row)
        for col in [col for col in current if col in self.pivots]:
            if col in current:
                current = _eliminate(current, self.pivots[col], col)
        return current

    def add(self, row: Mapping[int, Scalar]) -> bool:
        """Insert a row; returns False when it was already in the span."""
        current = self.reduce(row)
        if not current:
            return False
        pivot = min(current)
        if current[pivot] < 0:
            current = {col: -value for col, value in current.items()}
        for col, other in list(self.pivots.items()):
            if pivot in other:
                self.pivots[col] = _eliminate(other, current, pivot)
        self.pivots[pivot] = current
        return True

    def reduced_rows(self) -> list[SparseVector]:
        """Rows divided by their pivots, ordered by pivot column."""
        rows = []
        for pivot in sorted(self.pivots):
            row = self.pivots[pivot]
            lead = row[pivot]
            rows.append({col: Fraction(row[col], lead) for col in sorted(row)})
        return rows

    def kernel_vectors(self, ncols: int) -> list[SparseVector]:
        """Basis of the solutions of ``row . x = 0`` for every stored row, one per free column."""
        vectors = []
        for free in range(ncols):
            if free in self.pivots:
                continue
            vector: SparseVector = {free: Fraction(1)}
            for pivot, row in self.pivots.items():
                if free in row:
                    vector[pivot] = Fraction(-row[free], row[pivot])
            vectors.append(vector)
        return vectors


class RatMatrix:
    """Rational matrix with sparse row storage.

    Entries are addressed densely with ``matrix[i, j]``; missing entries read as zero.
    """

    __slots__ = ("nrows", "ncols", "_rows")

    def __init__(self, nrows: int, ncols: int, rows: Sequence[Mapping[int, Scalar]] | None = None) -> None:
        if nrows < 0 or ncols < 0:
            raise UsageError(f"Matrix shape must be nonnegative, got {nrows}x{ncols}")
        rows = rows if rows is not None else [{} for _ in range(nrows)]
        if len(rows) != nrows:
            raise UsageError(f"Expected {nrows} rows, got {len(rows)}")
        clean: list[SparseVector] = []
        for row in rows:
            entries = {col: Fraction(value) for col, value in row.items() if value}
            if any(col < 0 or col >= ncols for col in entries):
                raise UsageError(f"Column index out of range for {ncols} columns")
            clean.append(entries)
        self.nrows = nrows
        self.ncols = ncols
        self._rows = tuple(clean)

    @classmethod
    def from_dense(cls, entries: Sequence[Sequence[Scalar]], ncols: int | None = None) -> RatMatrix:
        if ncols is None:
            ncols = len(entries[0]) if entries else 0
        return cls(len(entries), ncols, [dict(enumerate(row)) for row in entries])

    @classmethod
    def from_columns(cls, nrows: int, columns: Sequence[Mapping[int, Scalar]]) -> RatMatrix:
        rows: list[dict[int, Scalar]] = [{} for _ in range(nrows)]
        for j, column in enumerate(columns):
            for i, value in column.items():
                if i < 0 or i >= nrows:
                    raise UsageError(f"Row index {i} out of range for {nrows} rows")
                if value:
                    rows[i][j] = value
        return cls(nrows, len(columns), rows)

    @classmethod
    def identity(cls, size: int) -> RatMatrix:
        return cls(size, size, [{i: 1} for i in range(size)])

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> RatMatrix:
        return cls(nrows, ncols)

    @classmethod
    def vstack(cls, blocks: Sequence[RatMatrix]) -> RatMatrix:
        if not blocks:
            raise UsageError("vstack needs at least one block")
        ncols = blocks[0].ncols
        if any(block.ncols != ncols for block in blocks):
            raise UsageError("vstack blocks must share a column count")
        rows = [row for block in blocks for row in block._rows]
        return cls(len(rows), ncols, rows)

    @property
    def shape(self) -> tuple[int, int]:
        return self.nrows, self.ncols

    def __getitem__(self, index: tuple[int, int]) -> Fraction:
        i, j = index
        if not (0 <= i < self.nrows and 0 <= j < self.ncols):
            raise IndexError(f"Entry ({i}, {j}) outside a {self.nrows}x{self.ncols} matrix")
        return self._rows[i].get(j, Fraction(0))

    def row(self, i: int) -> Mapping[int, Fraction]:
        return self._rows[i]

    def columns(self) -> list[SparseVector]:
        cols: list[SparseVector] = [{} for _ in range(self.ncols)]
        for i, row in enumerate(self._rows):
            for j, value in row.items():
                cols[j][i] = value
        return cols

    def to_dense(self) -> list[list[Fraction]]:
        return [[row.get(j, Fraction(0)) for j in range(self.ncols)] for row in self._rows]

    def transpose(self) -> RatMatrix:
        return RatMatrix(self.ncols, self.nrows, self.columns())

    def is_zero(self) -> bool:
        return not any(self._rows)

    def __add__(self, other: RatMatrix) -> RatMatrix:
        return self._combine(other, 1)

    def __sub__(self, other: RatMatrix) -> RatMatrix:
        return self._combine(other, -1)

    def _combine(self, other: RatMatrix, sign: int) -> RatMatrix:
        if other.shape != self.shape:
            raise UsageError(f"Shape mismatch {self.shape} and {other.shape}")
        rows = []
        for mine, theirs in zip(self._rows, other._rows, strict=True):
            row = dict(mine)
            for j, value in theirs.items():
                row[j] = row.get(j, 0) + sign * value
            rows.append(row)
        return RatMatrix(self.nrows, self.ncols, rows)

    def scale(self, factor: Scalar) -> RatMatrix:
        return RatMatrix(self.nrows, self.ncols, [{j: v * factor for j, v in row.items()} for row in self._rows])

    def __matmul__(self, other: RatMatrix) -> RatMatrix:
        if self.ncols != other.nrows:
            raise UsageError(f"Cannot multiply {self.shape} by {other.shape}")
        rows = []
        for row in self._rows:
            out: dict[int, Fraction] = {}
            for k, value in row.items():
                for j, other_value in other._rows[k].items():
                    out[j] = out.get(j, 0) + value * other_value
            rows.append(out)
        return RatMatrix(self.nrows, other.ncols, rows)

    def apply(self, vector: Mapping[int, Scalar]) -> SparseVector:
        out: SparseVector = {}
        for i, row in enumerate(self._rows):
            total = sum((value * vector[j] for j, value in row.items() if j in vector), Fraction(0))
            if total:
                out[i] = total
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatMatrix):
            return NotImplemented
        return self.shape == other.shape and self._rows == other._rows

    __hash__ = None  # type: ignore[assignment]

    def echelon(self) -> Echelon:
        form = Echelon()
        for row in self._rows:
            form.add(row)
        logger.debug(f"Eliminated {self.nrows}x{self.ncols} matrix to rank {form.rank}")
        return form

    def rank(self) -> int:
        return self.echelon().rank

    def kernel_vectors(self) -> list[SparseVector]:
        return self.echelon().kernel_vectors(self.ncols)

    def __repr__(self) -> str:
        return f"RatMatrix({self.nrows}x{self.ncols}, nnz={sum(len(row) for row in self._rows)})"


@dataclass(frozen=True)
class Ambient:
    """Coordinate space of all tensors of one multidegree, indexed by monomials in canonical order.

    Attributes:
        n: Ambient parameter (the coordinates live in C^{n+1}).
        degree: Multidegree (k, l, p, q) of the monomials.
    """

    n: int
    degree: Multidegree

    def __post_init__(self) -> None:
        size = self.expected_dimension
        limit = get_config().max_columns
        if size > limit:
            raise ResourceError(
                f"{self.label} has dimension {size}, above the column cap {limit}", requested=size, limit=limit
            )

    @property
    def expected_dimension(self) -> int:
        if self.degree.is_void:
            return 0
        return math.prod(math.comb(self.n + d, d) for d in self.degree)

    @property
    def label(self) -> str:
        k, l, p, q = self.degree  # noqa: E741
        return f"SP(n={self.n}; p={p}, q={q}; k={k}, l={l})"

    @cached_property
    def monomials(self) -> tuple[Monomial, ...]:
        return monomial_basis(self.n, self.degree)

    @cached_property
    def index(self) -> dict[Monomial, int]:
        return {mono: position for position, mono in enumerate(self.monomials)}

    @property
    def dimension(self) -> int:
        return len(self.monomials)

    def coordinates(self, tensor: TensorPoly) -> SparseVector:
        """Coordinate vector of a tensor of this multidegree.

        Raises:
            UsageError: If the tensor has another multidegree or another n.
        """
        if tensor.n != self.n or (tensor.degree != self.degree and not tensor.is_zero):
            raise UsageError(f"Tensor of multidegree {tuple(tensor.degree)} does not live in {self.label}")
        index = self.index
        return {index[mono]: coeff for mono, coeff in tensor.body.terms.items()}

    def tensor(self, vector: Mapping[int, Scalar]) -> TensorPoly:
        monomials = self.monomials
        return TensorPoly(BiPoly(self.n, {monomials[col]: value for col, value in vector.items()}), self.degree)


Row = tuple[tuple[int, Fraction], ...]


@dataclass(frozen=True)
class Subspace:
    """A linear subspace of an :class:`Ambient`, stored in reduced row echelon form.

    Two subspaces of the same ambient are equal exactly when their canonical rows are equal.

    Attributes:
        ambient: The coordinate space.
        rows: Canonical basis; each row has pivot 1 and zeros in the other rows' pivot columns.
    """

    ambient: Ambient
    rows: tuple[Row, ...] = field(default=())

    @classmethod
    def span(cls, ambient: Ambient, vectors: Iterable[Mapping[int, Scalar]]) -> Subspace:
        form = Echelon()
        for vector in vectors:
            form.add(vector)
        return cls._from_echelon(ambient, form)

    @classmethod
    def _from_echelon(cls, ambient: Ambient, form: Echelon) -> Subspace:
        return cls(ambient, tuple(tuple(row.items()) for row in form.reduced_rows()))

    @classmethod
    def span_tensors(cls, ambient: Ambient, tensors: Iterable[TensorPoly]) -> Subspace:
        return cls.span(ambient, (ambient.coordinates(tensor) for tensor in tensors))

    @classmethod
    def full(cls, ambient: Ambient) -> Subspace:
        return cls(ambient, tuple(((col, Fraction(1)),) for col in range(ambient.dimension)))

    @classmethod
    def zero(cls, ambient: Ambient) -> Subspace:
        return cls(ambient, ())

    @property
    def dim(self) -> int:
        return len(self.rows)

    def vectors(self) -> list[SparseVector]:
        return [dict(row) for row in self.rows]

    def tensors(self) -> list[TensorPoly]:
        return [self.ambient.tensor(dict(row)) for row in self.rows]

    @property
    def basis(self) -> RatMatrix:
        """Basis vectors as the columns of a matrix."""
        return RatMatrix.from_columns(self.ambient.dimension, self.vectors())

    def echelon(self) -> Echelon:
        form = Echelon()
        for row in self.rows:
            form.add(dict(row))
        return form

    def contains_vector(self, vector: Mapping[int, Scalar]) -> bool:
        return not self.echelon().reduce(vector)

    def contains_tensor(self, tensor: TensorPoly) -> bool:
        return self.contains_vector(self.ambient.coordinates(tensor))

    def combine(self, coefficients: Mapping[int, Scalar]) -> SparseVector:
        """Ambient vector ``sum_j coefficients[j] * basis_j``."""
        out: SparseVector = {}
        for j, weight in coefficients.items():
            for col, value in self.rows[j]:
                out[col] = out.get(col, 0) + weight * value
        return {col: value for col, value in out.items() if value}


class SubspaceOp(str, Enum):
    """Operations accepted by :func:`subspace_ops`.

    Attributes:
        INTERSECT: Intersection of the two subspaces.
        SUM: Sum of the two subspaces.
        CONTAINS: Whether the first subspace contains the second.
        RANK: Dimension of the sum, i.e. the rank of both bases stacked.
    """

    INTERSECT = "intersect"
    SUM = "sum"
    CONTAINS = "contains"
    RANK = "rank"


def subspace_ops(a: Subspace, b: Subspace, op: SubspaceOp) -> Subspace | bool | int:
    """Exact set-theoretic operations on two subspaces of one ambient.

    Raises:
        UsageError: If the subspaces live in different ambients.
    """
    if a.ambient != b.ambient:
        raise UsageError(f"Subspaces of {a.ambient.label} and {b.ambient.label} cannot be combined")
    if op is SubspaceOp.SUM:
        return Subspace.span(a.ambient, a.vectors() + b.vectors())
    if op is SubspaceOp.RANK:
        return Subspace.span(a.ambient, a.vectors() + b.vectors()).dim
    if op is SubspaceOp.CONTAINS:
        form = a.echelon()
        return all(not form.reduce(vector) for vector in b.vectors())
    # Solve sum_i x_i a_i = sum_j y_j b_j and keep the a-side combination
    columns = a.vectors() + [{col: -value for col, value in vector.items()} for vector in b.vectors()]
    stacked = RatMatrix.from_columns(a.ambient.dimension, columns)
    combos = []
    for solution in stacked.kernel_vectors():
        combos.append(a.combine({j: value for j, value in solution.items() if j < a.dim}))
    return Subspace.span(a.ambient, combos)


def operator_matrix(op: TensorMap, domain: Subspace, codomain: Ambient) -> RatMatrix:
    """Matrix whose column j holds the coordinates of ``op(basis_j)`` in the codomain.

    Raises:
        UsageError: If an image does not have the codomain's multidegree.
    """
    columns = [codomain.coordinates(op(tensor)) for tensor in domain.tensors()]
    return RatMatrix.from_columns(codomain.dimension, columns)


def kernel_basis(matrix: RatMatrix, ambient: Ambient) -> Subspace:
    """Exact kernel of a matrix whose columns are indexed by the ambient's monomials."""
    if matrix.ncols != ambient.dimension:
        raise UsageError(f"Matrix has {matrix.ncols} columns but {ambient.label} has dimension {ambient.dimension}")
    form = matrix.echelon()
    return Subspace.span(ambient, form.kernel_vectors(matrix.ncols))


def restricted_kernel(domain: Subspace, maps: Sequence[tuple[TensorMap, Ambient]]) -> Subspace:
    """Common kernel of several linear maps restricted to a subspace.

    Args:
        domain: Subspace on which the maps are restricted.
        maps: ``(map, codomain)`` pairs.

    Returns:
        The vectors of ``domain`` annihilated by every map.
    """
    if not maps:
        return domain
    blocks = [operator_matrix(op, domain, codomain) for op, codomain in maps]
    stacked = RatMatrix.vstack(blocks)
    solutions = stacked.kernel_vectors()
    logger.debug(f"Restricted kernel in {domain.ambient.label}: {domain.dim} -> {len(solutions)}")
    return Subspace.span(domain.ambient, (domain.combine(solution) for solution in solutions))


def image(domain: Subspace, op: TensorMap, codomain: Ambient) -> Subspace:
    return Subspace.span(codomain, operator_matrix(op, domain, codomain).columns())
