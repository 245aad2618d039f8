"""Brute-force verification of the closed forms by operator application on polynomial models.

Every check is an exact equality. A check either passes, fails with a reproducible witness, or
records a discrepancy between a tabulated value and the computed one; discrepancies never fail a run.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from itertools import product
from typing import Any, NamedTuple

from .config import RuntimeConfig, configured, get_config
from .errors import CpnSpectraError, ResourceError
from .linalg import Ambient, Subspace, SubspaceOp, image, operator_matrix, restricted_kernel, subspace_ops
from .logging_config import get_logger
from .spaces import (
    PrimitiveCase,
    SpaceQuery,
    build_piece,
    closed_form_primitive_dim,
    decompose_traceless,
    dim_harmonic,
    dim_polynomial,
    dim_primitive,
    dim_traceless,
    harmonic_space,
    kernel_projector,
    polynomial_space,
    primitive_space,
    radial_complement,
    traceless_space,
)
from .spectra import PieceLabel, core_eigenvalue, family_bounds, piece_family
from .tables import NamedTable, render_named_table
from .tensorops import (
    LinearTensorMap,
    Side,
    TensorPoly,
    compose,
    contract,
    power,
    pushforward_laplacian,
    symgrad,
)

logger = get_logger(__name__)


class CheckStatus(str, Enum):
    """Outcome of one check.

    Attributes:
        PASS: The identity holds.
        FAIL: The identity is violated; the entry carries a witness.
        DISCREPANCY: A tabulated value differs from the computed one, or a dimension is virtual.
    """

    PASS = "pass"
    FAIL = "fail"
    DISCREPANCY = "discrepancy"


class Suite(str, Enum):
    EIGEN = "eigen"
    DIMS = "dims"
    COMMUTATORS = "commutators"
    DECOMPOSITION = "decomposition"
    TABLES = "tables"
    ALL = "all"


class Grid(str, Enum):
    """Index grids the suites sweep.

    Attributes:
        SMALL: Seconds-scale grid used by the test suite.
        FULL: The acceptance grid; minutes in pure Python.
    """

    SMALL = "small"
    FULL = "full"


@dataclass(frozen=True)
class CheckEntry:
    """One verification outcome.

    Attributes:
        check_id: Stable identifier, also the sort key of a report.
        status: Outcome.
        detail: Human-readable summary.
        expected: Tabulated or predicted value.
        computed: Value found by the check.
        witness: Indices and tensor reproducing a failure.
    """

    check_id: str
    status: CheckStatus
    detail: str = ""
    expected: str | None = None
    computed: str | None = None
    witness: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.check_id,
            "status": self.status.value,
            "detail": self.detail,
            "expected": self.expected,
            "computed": self.computed,
            "witness": self.witness,
        }


def _passed(check_id: str, detail: str = "") -> CheckEntry:
    return CheckEntry(check_id, CheckStatus.PASS, detail)


def _compare(
    check_id: str,
    expected: object,
    computed: object,
    *,
    virtual: bool = False,
    witness: str = "",
) -> CheckEntry:
    if expected == computed:
        return _passed(check_id, f"value {computed}")
    status = CheckStatus.DISCREPANCY if virtual else CheckStatus.FAIL
    detail = "virtual-dimension" if virtual else "mismatch"
    return CheckEntry(check_id, status, detail, str(expected), str(computed), witness or None)


@dataclass(frozen=True)
class VerificationReport:
    suite: Suite
    grid: Grid
    entries: tuple[CheckEntry, ...]

    def count(self, status: CheckStatus) -> int:
        return sum(entry.status is status for entry in self.entries)

    @property
    def failed(self) -> bool:
        return self.count(CheckStatus.FAIL) > 0

    @property
    def discrepancies(self) -> list[CheckEntry]:
        return [entry for entry in self.entries if entry.status is CheckStatus.DISCREPANCY]

    @property
    def exit_code(self) -> int:
        return 1 if self.failed else 0

    def to_dict(self) -> dict[str, Any]:
        return {
            "suite": self.suite.value,
            "grid": self.grid.value,
            "summary": {status.value: self.count(status) for status in CheckStatus},
            "exit_code": self.exit_code,
            "entries": [entry.to_dict() for entry in self.entries],
        }


def realized_eigenvalue(space: Subspace) -> tuple[Fraction | None, str | None]:
    """Common eigenvalue of the quotient Laplacian on a basis.

    Returns:
        ``(value, None)`` when every basis vector is an eigenvector for one value (``value`` is None for
        the zero space), otherwise ``(None, witness)`` with the first offending tensor.
    """
    value: Fraction | None = None
    for tensor in space.tensors():
        result = pushforward_laplacian(tensor)
        mono, coeff = tensor.body.leading_term()
        ratio = result.body.coefficient(mono) / coeff
        if result.body != tensor.body.scale(ratio) or (value is not None and ratio != value):
            return None, tensor.body.render()
        value = ratio
    return value, None


# Eigen suite


def verify_eigen_piece(n: int, p: int, l: int, k: int, r: int, s: int) -> CheckEntry:  # noqa: E741
    """Apply the quotient Laplacian to a traceless piece and compare with its closed-form eigenvalue."""
    check_id = f"eigen n={n} p={p} l={l} k={k} r={r} s={s}"
    family = piece_family(p, l, 0, k)
    label = PieceLabel(n, p, l, 0, k, r, s, family)
    expected = label.eigenvalue
    piece = build_piece(label.core, family.case, r, s)
    if piece.dim == 0:
        return _passed(check_id, "empty piece")
    value, witness = realized_eigenvalue(piece)
    if value is None:
        return CheckEntry(check_id, CheckStatus.FAIL, "not an eigenspace", str(expected), None, witness)
    if value != expected:
        return CheckEntry(check_id, CheckStatus.DISCREPANCY, "eigenvalue", str(expected), str(value))
    return _passed(check_id, f"dim {piece.dim}, eigenvalue {expected}")


# Dims suite


def verify_dims(query: SpaceQuery, brute: bool = True) -> list[CheckEntry]:
    """Cross-check every dimension formula at one index tuple with k <= p and l <= q.

    With ``brute`` the kernels are computed and compared; without it only the closed-form routes are
    compared with each other.
    """
    tag = f"n={query.n} p={query.p} q={query.q} k={query.k} l={query.l}"
    virtual = query.is_virtual
    entries = []
    try:
        primitive = dim_primitive(query, PrimitiveCase.SYMGRAD_SYMGRAD)
        entries.append(_passed(f"dims routes {tag}", f"primitive {primitive}"))
    except CpnSpectraError as exc:
        entries.append(CheckEntry(f"dims routes {tag}", CheckStatus.FAIL, str(exc), witness=tag))
        return entries
    printed = closed_form_primitive_dim(query, printed=True)
    corrected = closed_form_primitive_dim(query)
    if printed is not None and printed != corrected:
        entries.append(
            CheckEntry(f"dims closed-form {tag}", CheckStatus.DISCREPANCY, "factor 1/2", str(printed), str(corrected))
        )
    if not brute:
        return entries
    entries.append(_compare(f"dims SP {tag}", dim_polynomial(query), polynomial_space(query).dim))
    entries.append(_compare(f"dims SH {tag}", dim_harmonic(query), harmonic_space(query).dim, virtual=virtual))
    entries.append(_compare(f"dims T {tag}", dim_traceless(query), traceless_space(query).dim, virtual=virtual))
    brute_primitive = primitive_space(query, PrimitiveCase.SYMGRAD_SYMGRAD).dim
    entries.append(_compare(f"dims primitive {tag}", primitive, brute_primitive, virtual=virtual, witness=tag))
    entries.append(verify_harmonic_split(query))
    return entries


def verify_harmonic_split(query: SpaceQuery) -> CheckEntry:
    """``SP = SH ⊕ (W*·SP + W̄*·SP + r²·SP)`` as an exact direct sum."""
    check_id = f"dims split n={query.n} p={query.p} q={query.q} k={query.k} l={query.l}"
    harmonic = harmonic_space(query)
    complement = radial_complement(query)
    total = subspace_ops(harmonic, complement, SubspaceOp.RANK)
    full = dim_polynomial(query)
    if harmonic.dim + complement.dim == full == total:
        return _passed(check_id, f"{harmonic.dim} + {complement.dim} = {full}")
    return _compare(check_id, full, f"{harmonic.dim}+{complement.dim} (rank {total})", virtual=query.is_virtual)


def verify_primitive_cases(query: SpaceQuery) -> list[CheckEntry]:
    """Closed-form primitive dimension against the kernel for every case that applies to ``query``."""
    tag = f"n={query.n} p={query.p} q={query.q} k={query.k} l={query.l}"
    entries = []
    for case in PrimitiveCase:
        if not case.consistent_with(query):
            continue
        check_id = f"dims primitive {case.value} {tag}"
        try:
            closed = dim_primitive(query, case)
        except CpnSpectraError as exc:
            entries.append(CheckEntry(check_id, CheckStatus.FAIL, str(exc), witness=tag))
            continue
        brute = primitive_space(query, case).dim
        entries.append(_compare(check_id, closed, brute, virtual=query.is_virtual, witness=tag))
    return entries


# Commutator suite


def _identity(check_id: str, query: SpaceQuery, lhs: LinearTensorMap, rhs: LinearTensorMap) -> CheckEntry:
    domain = polynomial_space(query)
    target = Ambient(query.n, lhs(TensorPoly.zero(query.n, query.degree)).degree)
    left = operator_matrix(lhs, domain, target)
    right = operator_matrix(rhs, domain, target)
    if left == right:
        return _passed(check_id, f"{domain.dim} basis tensors")
    columns = zip(left.columns(), right.columns(), domain.tensors(), strict=True)
    witness = next(str(tensor) for mine, theirs, tensor in columns if mine != theirs)
    return CheckEntry(check_id, CheckStatus.FAIL, "operator identity violated", witness=f"{query}: {witness}")


def _difference(first: LinearTensorMap, second: LinearTensorMap) -> LinearTensorMap:
    return lambda tensor: first(tensor) - second(tensor)


def _scaled(factor: int, op: LinearTensorMap) -> LinearTensorMap:
    return lambda tensor: op(tensor).scale(factor)


def _unit(tensor: TensorPoly) -> TensorPoly:
    return tensor


def _contract(side: Side) -> LinearTensorMap:
    return lambda tensor: contract(tensor, side)


def _symgrad(side: Side) -> LinearTensorMap:
    return lambda tensor: symgrad(tensor, side)


def _commutator(first: LinearTensorMap, second: LinearTensorMap) -> LinearTensorMap:
    return _difference(compose(first, second), compose(second, first))


def verify_commutators(query: SpaceQuery, max_power: int = 2) -> list[CheckEntry]:
    """Commutation relations of contractions and symmetric gradients on a full polynomial space."""
    tag = f"n={query.n} p={query.p} q={query.q} k={query.k} l={query.l}"
    entries = []
    for side, (slots, degree) in ((Side.HOL, (query.p, query.k)), (Side.ANTIHOL, (query.q, query.l))):
        lower, raise_ = _contract(side), _symgrad(side)
        bracket = _commutator(lower, raise_)
        entries.append(_identity(f"commutator {side.value} {tag}", query, bracket, _scaled(degree - slots, _unit)))
        for exponent in range(1, max_power + 1):
            entries.append(
                _identity(
                    f"raise-power {side.value} j={exponent} {tag}",
                    query,
                    _commutator(power(raise_, exponent), lower),
                    _scaled(exponent * (slots - degree + exponent - 1), power(raise_, exponent - 1)),
                )
            )
            entries.append(
                _identity(
                    f"lower-power {side.value} j={exponent} {tag}",
                    query,
                    _commutator(power(lower, exponent), raise_),
                    _scaled(exponent * (degree - slots + exponent - 1), power(lower, exponent - 1)),
                )
            )
    mixed = {
        "contract-hol/symgrad-antihol": (_contract(Side.HOL), _symgrad(Side.ANTIHOL)),
        "contract-antihol/symgrad-hol": (_contract(Side.ANTIHOL), _symgrad(Side.HOL)),
        "contract-hol/contract-antihol": (_contract(Side.HOL), _contract(Side.ANTIHOL)),
        "symgrad-hol/symgrad-antihol": (_symgrad(Side.HOL), _symgrad(Side.ANTIHOL)),
    }
    for name, (first, second) in mixed.items():
        entries.append(_identity(f"mixed {name} {tag}", query, _commutator(first, second), _scaled(0, _unit)))
    return entries


# Decomposition suite


def verify_decomposition(query: SpaceQuery) -> list[CheckEntry]:
    """Completeness, independence and eigenvalues of the pieces of one T-space, plus projector identities."""
    tag = f"n={query.n} p={query.p} q={query.q} k={query.k} l={query.l}"
    traceless = traceless_space(query)
    pieces = decompose_traceless(query)
    entries = []
    total = sum(space.dim for _, space in pieces)
    entries.append(_compare(f"decomposition sum {tag}", traceless.dim, total))
    combined = Subspace.span(traceless.ambient, [vector for _, space in pieces for vector in space.vectors()])
    entries.append(_compare(f"decomposition independent {tag}", total, combined.dim))
    if query.is_circle_invariant:
        for label, space in pieces:
            if space.dim == 0:
                continue
            expected = core_eigenvalue(query.n, query.p, query.q, query.k, query.l, label.r, label.s)
            value, witness = realized_eigenvalue(space)
            entries.append(
                _compare(f"decomposition eigen r={label.r} s={label.s} {tag}", expected, value, witness=witness or "")
            )
    for side in Side:
        entries.extend(verify_projector(query, side))
    entries.extend(verify_operator_targets(query))
    return entries


def verify_projector(query: SpaceQuery, side: Side) -> list[CheckEntry]:
    """Idempotence, image and kernel of the kernel projector, and injectivity of the contraction."""
    slots, degree = (query.p, query.k) if side is Side.HOL else (query.q, query.l)
    tag = f"{side.value} n={query.n} p={query.p} q={query.q} k={query.k} l={query.l}"
    traceless = traceless_space(query)
    entries = []
    if degree < slots:
        lowered = Ambient(query.n, contract(TensorPoly.zero(query.n, query.degree), side).degree)
        injective = restricted_kernel(traceless, [(_contract(side), lowered)]).dim == 0
        entries.append(_compare(f"contraction injective {tag}", True, injective))
    if degree > slots:
        return entries
    projector = kernel_projector(query, side)
    images = [projector(tensor) for tensor in traceless.tensors()]
    idempotent = all(projector(result) == result for result in images)
    entries.append(_compare(f"projector idempotent {tag}", True, idempotent))
    raised = Ambient(query.n, symgrad(TensorPoly.zero(query.n, query.degree), side).degree)
    kernel_of_phi = restricted_kernel(traceless, [(_symgrad(side), raised)])
    projected = Subspace.span_tensors(traceless.ambient, images)
    entries.append(_same_space(f"projector image {tag}", kernel_of_phi, projected))
    neighbour = query.shifted(dp=1, dk=-1) if side is Side.HOL else query.shifted(dq=1, dl=-1)
    expected_kernel = image(traceless_space(neighbour), _contract(side), traceless.ambient)
    kernel = restricted_kernel(traceless, [(projector, traceless.ambient)])
    entries.append(_same_space(f"projector kernel {tag}", expected_kernel, kernel))
    return entries


def _same_space(check_id: str, expected: Subspace, computed: Subspace) -> CheckEntry:
    if expected == computed:
        return _passed(check_id, f"dim {computed.dim}")
    label = expected.ambient.label
    return CheckEntry(check_id, CheckStatus.FAIL, "subspaces differ", str(expected.dim), str(computed.dim), label)


def verify_operator_targets(query: SpaceQuery) -> list[CheckEntry]:
    """Contractions and symmetric gradients map T-spaces into T-spaces."""
    tag = f"n={query.n} p={query.p} q={query.q} k={query.k} l={query.l}"
    traceless = traceless_space(query)
    entries = []
    for side in Side:
        for name, op in (("contract", _contract(side)), ("symgrad", _symgrad(side))):
            degree = op(TensorPoly.zero(query.n, query.degree)).degree
            target = traceless_space(query.with_degree(degree))
            outside = next((t for t in traceless.tensors() if not target.contains_tensor(op(t))), None)
            check_id = f"maps {name}-{side.value} {tag}"
            if outside is None:
                entries.append(_passed(check_id))
            else:
                entries.append(CheckEntry(check_id, CheckStatus.FAIL, "image leaves T", witness=str(outside)))
    return entries


# Tables suite


def verify_table(name: NamedTable, n: int, index_max: int, realize: bool) -> list[CheckEntry]:
    """Render a table, turn its printed/computed disagreements into entries, and realize eigenvalues."""
    table = render_named_table(name, n, index_max)
    entries = [_passed(f"table {name.value} n={table.n}", f"{len(table.rows)} rows")]
    for item in table.discrepancies:
        check_id = f"table {item.subject} n={table.n}"
        entries.append(CheckEntry(check_id, CheckStatus.DISCREPANCY, item.kind, item.printed, item.computed))
    if not realize:
        return entries
    for row in table.rows:
        if row.index not in (None, 0) or any(label.m for label in row.pieces):
            continue
        for label in row.pieces:
            piece = build_piece(label.core, label.family.case, label.r, label.s)
            if piece.dim == 0:
                continue
            value, witness = realized_eigenvalue(piece)
            check_id = f"table {name.value} n={table.n} realize {row.eigen_text} r={label.r} s={label.s}"
            entries.append(_compare(check_id, row.eigenvalue, value, witness=witness or ""))
    return entries


# Suite assembly


class CheckTask(NamedTuple):
    kind: str
    args: tuple[Any, ...]


_CHECKS: dict[str, Callable[..., CheckEntry | list[CheckEntry]]] = {
    "eigen": verify_eigen_piece,
    "dims": verify_dims,
    "primitive": verify_primitive_cases,
    "commutators": verify_commutators,
    "decomposition": verify_decomposition,
    "tables": verify_table,
}


def _first_case_tuples(ns: Iterable[int], max_slots: int) -> list[SpaceQuery]:
    tuples = []
    for n in ns:
        for p, q in product(range(max_slots + 1), repeat=2):
            for k, l in product(range(p + 1), range(q + 1)):  # noqa: E741
                tuples.append(SpaceQuery(n, p, q, k, l))
    return tuples


def _has_contract_case(query: SpaceQuery) -> bool:
    return any(case.consistent_with(query) for case in PrimitiveCase if case is not PrimitiveCase.SYMGRAD_SYMGRAD)


def _bounded_tuples(ns: Iterable[int], max_slots: int, max_degree: int, circle: bool) -> list[SpaceQuery]:
    tuples = []
    slots = range(max_slots + 1)
    degrees = range(max_degree + 1)
    for n, p, q, k, l in product(ns, slots, slots, degrees, degrees):  # noqa: E741
        if p + q <= max_slots and k + l <= max_degree and (not circle or k + p == l + q):
            tuples.append(SpaceQuery(n, p, q, k, l))
    return tuples


def suite_tasks(suite: Suite, grid: Grid) -> list[CheckTask]:
    """Checks a suite runs on a grid, in report order."""
    small = grid is Grid.SMALL
    if suite is Suite.ALL:
        return [task for part in Suite if part is not Suite.ALL for task in suite_tasks(part, grid)]
    if suite is Suite.EIGEN:
        blocks = [(0, 0), (0, 1), (1, 0)] if small else [(p, l) for p in range(3) for l in range(2)]  # noqa: E741
        layers = [(n, blocks, 2 if small else 3) for n in (1, 2)]
        if not small:
            layers.append((3, [(0, 0), (0, 1), (1, 0), (1, 1)], 2))
        tasks = []
        for n, n_blocks, k_max in layers:
            for (p, l), k in product(n_blocks, range(k_max + 1)):  # noqa: E741
                r_max, s_max = family_bounds(piece_family(p, l, 0, k), p, l, 0, k)
                for r, s in product(range(r_max + 1), range(s_max + 1)):
                    tasks.append(CheckTask("eigen", (n, p, l, k, r, s)))
        return tasks
    if suite is Suite.DIMS:
        tasks = [CheckTask("dims", (query, True)) for query in _first_case_tuples((1, 2), 1 if small else 3)]
        if not small:
            tasks += [CheckTask("dims", (query, False)) for query in _first_case_tuples((3, 4), 3)]
        queries = _bounded_tuples((2,) if small else (1, 2, 3), 1 if small else 2, 2, circle=False)
        tasks += [CheckTask("primitive", (query,)) for query in queries if _has_contract_case(query)]
        return tasks
    if suite is Suite.COMMUTATORS:
        queries = _bounded_tuples((1, 2), 2 if small else 3, 2 if small else 4, circle=False)
        return [CheckTask("commutators", (query,)) for query in queries]
    if suite is Suite.DECOMPOSITION:
        queries = _bounded_tuples((2,) if small else (1, 2), 2, 2 if small else 6, circle=True)
        return [CheckTask("decomposition", (query,)) for query in queries]
    tasks = []
    for name in NamedTable:
        for n in (2,) if name.fixed_n else (2, 3):
            tasks.append(CheckTask("tables", (name, n, 1 if small else 2, small and n == 2)))
    return tasks


def run_task(task: CheckTask, config: RuntimeConfig | None = None) -> list[CheckEntry]:
    """Run one check under ``config`` (workers run it in a fresh process, so it is passed explicitly).

    Library errors become a FAIL entry, except ``ResourceError``, which aborts the suite.
    """
    config = config or get_config()
    with configured(max_columns=config.max_columns, workers=1, check_euler=config.check_euler):
        try:
            result = _CHECKS[task.kind](*task.args)
        except ResourceError:
            raise
        except CpnSpectraError as exc:
            logger.debug(f"{task.kind}{task.args} raised {exc!r}")
            return [CheckEntry(f"{task.kind} {task.args}", CheckStatus.FAIL, str(exc), witness=repr(task.args))]
    return result if isinstance(result, list) else [result]


def run_suite(suite: Suite, grid: Grid = Grid.SMALL, workers: int | None = None) -> VerificationReport:
    """Run every check of a suite and collect the entries in task order.

    Args:
        suite: Which suite (``ALL`` runs the other five).
        grid: Index grid.
        workers: Process count; defaults to the runtime configuration. Never changes the report.
    """
    tasks = suite_tasks(suite, grid)
    config = get_config()
    workers = workers or config.workers
    logger.debug(f"Suite {suite.value} on the {grid.value} grid: {len(tasks)} tasks, {workers} workers")
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as executor:
            results = list(executor.map(run_task, tasks, [config] * len(tasks)))
    else:
        results = [run_task(task, config) for task in tasks]
    entries = tuple(entry for batch in results for entry in batch)
    report = VerificationReport(suite, grid, entries)
    logger.debug(f"Suite {suite.value}: " + ", ".join(f"{s.value}={report.count(s)}" for s in CheckStatus))
    return report
