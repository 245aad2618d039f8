"""Closed-form eigenvalues, piece enumeration and spectrum assembly."""

from __future__ import annotations

import math
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from itertools import groupby
from typing import Any, NamedTuple

from .config import get_config
from .errors import UsageError, VerificationError
from .logging_config import get_logger
from .linalg import Ambient, Echelon
from .spaces import PrimitiveCase, SpaceQuery, build_piece, dim_primitive, piece_source
from .tensorops import SpecialTensor, TensorPoly, horizontal, metric_mult, power, special_tensor

logger = get_logger(__name__)


class PieceFamily(str, Enum):
    """Index families of eigenspaces, by how the traceless core compares with its slot counts.

    Attributes:
        CONTRACTED: Core with fewer coefficient degrees than slots; pieces are contractions.
        MIXED: Contraction on one side, symmetric gradient on the other.
        GRADIENT: Core with at least as many coefficient degrees as slots; pieces are gradients.
    """

    CONTRACTED = "S0"
    MIXED = "S1"
    GRADIENT = "S2"

    @property
    def case(self) -> PrimitiveCase:
        return {
            PieceFamily.CONTRACTED: PrimitiveCase.SYMGRAD_SYMGRAD,
            PieceFamily.MIXED: PrimitiveCase.CONTRACT_SYMGRAD,
            PieceFamily.GRADIENT: PrimitiveCase.CONTRACT_CONTRACT,
        }[self]


def piece_family(p: int, l: int, m: int, k: int) -> PieceFamily:  # noqa: E741
    if k < p - m - l:
        return PieceFamily.CONTRACTED
    if k < p - m + l:
        return PieceFamily.MIXED
    return PieceFamily.GRADIENT


def family_bounds(family: PieceFamily, p: int, l: int, m: int, k: int) -> tuple[int, int]:  # noqa: E741
    """Largest admissible (r, s) for a core in the given family."""
    if family is PieceFamily.CONTRACTED:
        return k + l, k
    if family is PieceFamily.MIXED:
        return p - m, k
    return p - m, p - m + l


def core_eigenvalue(n: int, p: int, q: int, k: int, l: int, r: int, s: int) -> int:  # noqa: E741
    """Eigenvalue of piece (r, s) of the traceless core ``T^{p,q}_{k,l}``.

    Raises:
        UsageError: If the core is not circle invariant (k + p != l + q).
    """
    if k + p != l + q:
        raise UsageError(f"Eigenvalues need k + p == l + q, got p={p}, q={q}, k={k}, l={l}")
    gap_hol = abs(p - k)
    gap_antihol = abs(q - l)
    doubled = gap_hol + gap_antihol + p - k + q - l
    if doubled % 2:
        raise VerificationError(f"Half term is not an integer for p={p}, q={q}, k={k}, l={l}", computed=str(doubled))
    inner = (
        (p + k) * (n - q + k)
        + p * (p - 1)
        + q * (q - 1)
        + r * (r + 1)
        + s * (s + 1)
        + r * gap_hol
        + s * gap_antihol
        + doubled // 2
    )
    return 4 * inner


def piece_eigenvalue(n: int, p: int, l: int, m: int, k: int, r: int, s: int) -> int:  # noqa: E741
    """Eigenvalue of the piece labelled (p, l, m, k, r, s) in the (p, p+l) tensor block."""
    a = p - m
    gap_hol = abs(a - k - l)
    gap_antihol = abs(a + l - k)
    doubled = gap_hol + gap_antihol + 2 * (a - k)
    inner = (
        (a + k + l) * (n - a + k)
        + a * (a - 1)
        + (a + l) * (a + l - 1)
        + r * (r + 1)
        + s * (s + 1)
        + r * gap_hol
        + s * gap_antihol
    )
    return 4 * inner + 2 * doubled


class PieceLabel(NamedTuple):
    """Indices of one eigenspace before its multiplicity is known."""

    n: int
    p: int
    l: int  # noqa: E741
    m: int
    k: int
    r: int
    s: int
    family: PieceFamily

    @property
    def core(self) -> SpaceQuery:
        """The traceless core, with the metric power stripped."""
        return SpaceQuery(self.n, self.p - self.m, self.p - self.m + self.l, self.k + self.l, self.k)

    @property
    def primitive(self) -> SpaceQuery:
        return piece_source(self.core, self.family.case, self.r, self.s)

    @property
    def eigenvalue(self) -> int:
        return piece_eigenvalue(self.n, self.p, self.l, self.m, self.k, self.r, self.s)


@dataclass(frozen=True)
class SpectralPiece:
    """An eigenspace with its eigenvalue and multiplicity.

    Attributes:
        label: Indices of the piece.
        eigenvalue: Eigenvalue, a multiple of 4.
        multiplicity: Dimension, never negative.
        signed: Virtual closed-form dimension at n = 1 when it differs from ``multiplicity``.
    """

    label: PieceLabel
    eigenvalue: int
    multiplicity: int
    signed: int | None = None

    def __post_init__(self) -> None:
        if self.multiplicity < 0:
            raise VerificationError(
                f"Negative multiplicity for {self.label}", computed=str(self.multiplicity), witness=str(self.label)
            )

    @property
    def is_virtual(self) -> bool:
        return self.signed is not None

    @property
    def signed_multiplicity(self) -> int:
        return self.multiplicity if self.signed is None else self.signed

    def to_dict(self) -> dict[str, Any]:
        label = self.label
        data: dict[str, Any] = {
            "m": label.m,
            "k": label.k,
            "r": label.r,
            "s": label.s,
            "case": label.family.value,
            "dim": str(self.multiplicity),
        }
        if self.signed is not None:
            data["virtual_dim"] = str(self.signed)
        return data


def piece_multiplicity(label: PieceLabel) -> int:
    """Closed-form dimension of a piece: the dimension of its primitive source space.

    At n = 1 the value may be virtual (negative, or counting tensors that vanish on the quotient).
    """
    return dim_primitive(label.primitive, label.family.case)


def _credit_order(label: PieceLabel) -> tuple[int, ...]:
    return -label.m, label.k, label.r, label.s


def quotient_dimensions(labels: Sequence[PieceLabel]) -> list[int]:
    """Dimensions that pieces of one eigenvalue add on the quotient, credited in turn.

    Each piece is built upstairs, multiplied by its metric power and projected horizontally. Images
    of different coefficient degree are compared on the unit sphere by lifting them with powers of
    r^2. Pieces with a higher metric power are credited first, so the credits never depend on the
    order of ``labels`` and always add up to the dimension of the eigenspace they span.

    Returns:
        One credit per label, in the order given.
    """
    if not labels:
        return []
    n = labels[0].n
    rsquared = special_tensor(SpecialTensor.RSQUARED, n).body
    images: dict[PieceLabel, list[TensorPoly]] = {}
    for label in labels:
        piece = build_piece(label.core, label.family.case, label.r, label.s)
        images[label] = [horizontal(power(metric_mult, label.m)(tensor)) for tensor in piece.tensors()]
    found = [tensor.degree for tensors in images.values() for tensor in tensors]
    if not found:
        return [0] * len(labels)
    top = max(found)
    ambient = Ambient(n, top)
    echelon = Echelon()
    credits: dict[PieceLabel, int] = {}
    for label in sorted(labels, key=_credit_order):
        added = 0
        for tensor in images[label]:
            lifted = tensor.body
            for _ in range(top.k - tensor.degree.k):
                lifted = lifted * rsquared
            if echelon.add(ambient.coordinates(TensorPoly(lifted, top))):
                added += 1
        credits[label] = added
    return [credits[label] for label in labels]


def scan_limit(n: int, p: int, max_eig: int) -> int:
    """Smallest k >= p with ``4k(k+n-p) > max_eig``.

    For k >= p every eigenvalue with core index k is at least ``4k(k+n-p)``, so no k at or past this
    limit contributes.
    """
    shift = n - p
    k = max(p, (math.isqrt(shift * shift + max_eig) - shift) // 2)
    while 4 * k * (k + shift) <= max_eig:
        k += 1
    while k > p and 4 * (k - 1) * (k - 1 + shift) > max_eig:
        k -= 1
    return k


def piece_labels(n: int, p: int, l: int, max_eig: int) -> list[PieceLabel]:  # noqa: E741
    """Every piece label of the (p, p+l) block with eigenvalue at most ``max_eig``, sorted."""
    if n < 1:
        raise UsageError(f"Spectra need n >= 1, got {n}")
    if min(p, l) < 0 or max_eig < 0:
        raise UsageError(f"Indices and the eigenvalue bound must be nonnegative, got p={p}, l={l}, max={max_eig}")
    limit = scan_limit(n, p, max_eig)
    logger.debug(f"k-scan for n={n}, p={p}, l={l} stops below k={limit}")
    labels = []
    for m in range(p + 1):
        for k in range(limit):
            family = piece_family(p, l, m, k)
            r_max, s_max = family_bounds(family, p, l, m, k)
            for r in range(r_max + 1):
                for s in range(s_max + 1):
                    label = PieceLabel(n, p, l, m, k, r, s, family)
                    if label.eigenvalue <= max_eig:
                        labels.append(label)
    labels.sort(key=lambda label: (label.eigenvalue, label.m, label.k, label.r, label.s))
    return labels


def _piece_key(piece: SpectralPiece) -> tuple[int, ...]:
    label = piece.label
    return piece.eigenvalue, label.m, label.k, label.r, label.s


def evaluate_pieces(
    n: int,
    p: int,
    l: int,  # noqa: E741
    max_eig: int,
    workers: int | None = None,
) -> list[SpectralPiece]:
    """Every piece of the (p, p+l) block up to ``max_eig`` with a nonzero real or virtual dimension.

    For n >= 2 the closed forms are the dimensions. At n = 1 they are virtual, so each eigenvalue is
    resolved by :func:`quotient_dimensions` and pieces keep their signed closed form alongside; pieces
    credited with nothing are kept so that merging can account for their signed values.

    Args:
        n: Complex dimension of the projective space.
        p: Holomorphic slot count (at most the antiholomorphic one).
        l: Excess of antiholomorphic slots.
        max_eig: Largest eigenvalue to report.
        workers: Process count for the closed forms; defaults to the runtime configuration.

    Returns:
        Pieces ordered by eigenvalue then indices. The order never depends on ``workers``.
    """
    labels = piece_labels(n, p, l, max_eig)
    workers = workers or get_config().workers
    if workers > 1 and len(labels) > 1:
        logger.debug(f"Evaluating {len(labels)} pieces on {workers} workers")
        with ProcessPoolExecutor(max_workers=workers) as executor:
            closed_forms = list(executor.map(piece_multiplicity, labels))
    else:
        closed_forms = [piece_multiplicity(label) for label in labels]
    evaluated = list(zip(labels, closed_forms, strict=True))
    if n > 1:
        return [SpectralPiece(label, label.eigenvalue, closed) for label, closed in evaluated if closed]
    pieces = []
    candidates = [(label, closed) for label, closed in evaluated if closed or label.primitive.is_virtual]
    for eigenvalue, group in groupby(candidates, key=lambda item: item[0].eigenvalue):
        members = list(group)
        credits = quotient_dimensions([label for label, _ in members])
        for (label, closed), credit in zip(members, credits, strict=True):
            if credit or closed:
                pieces.append(SpectralPiece(label, eigenvalue, credit, closed if closed != credit else None))
    for piece in pieces:
        if piece.is_virtual:
            logger.warning(f"Virtual dimension {piece.signed} for {piece.label}, quotient has {piece.multiplicity}")
    return pieces


def enumerate_pieces(
    n: int,
    p: int,
    l: int,  # noqa: E741
    max_eig: int,
    workers: int | None = None,
) -> list[SpectralPiece]:
    """Eigenspaces of the (p, p+l) block up to ``max_eig`` with positive multiplicity.

    Same arguments and order as :func:`evaluate_pieces`.
    """
    return [piece for piece in evaluate_pieces(n, p, l, max_eig, workers) if piece.multiplicity > 0]


@dataclass(frozen=True)
class Discrepancy:
    """A tabulated value that differs from the computed one, or a virtual dimension.

    Attributes:
        kind: Short category, e.g. ``eigenvalue``, ``dimension`` or ``virtual-dimension``.
        subject: What the values belong to.
        printed: Tabulated value, if any.
        computed: Value computed here.
        note: Free text.
    """

    kind: str
    subject: str
    printed: str | None
    computed: str
    note: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {
            "kind": self.kind,
            "subject": self.subject,
            "printed": self.printed,
            "computed": self.computed,
            "note": self.note,
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> Discrepancy:
        return cls(data["kind"], data["subject"], data["printed"], data["computed"], data.get("note", ""))


class SpectrumQuery(NamedTuple):
    """A spectrum request for (p, q) tensors on CP^n up to ``max_eig``."""

    n: int
    p: int
    q: int
    max_eig: int

    @property
    def conjugated(self) -> bool:
        """True when p > q; the block is then answered by its conjugate."""
        return self.p > self.q

    @property
    def block(self) -> tuple[int, int]:
        """``(min(p, q), |q - p|)``: the slot count and excess the engine enumerates."""
        return min(self.p, self.q), abs(self.q - self.p)


@dataclass(frozen=True)
class SpectrumLine:
    """One eigenvalue with its merged multiplicity."""

    eigenvalue: int
    multiplicity: int
    pieces: tuple[SpectralPiece, ...]

    def to_dict(self) -> dict[str, Any]:
        return {
            "eigenvalue": self.eigenvalue,
            "multiplicity": str(self.multiplicity),
            "pieces": [piece.to_dict() for piece in self.pieces],
        }


@dataclass(frozen=True)
class SpectrumReport:
    """Merged spectrum of one query.

    Attributes:
        query: The request as given (p > q allowed).
        lines: Lines with strictly increasing eigenvalues.
        discrepancies: Virtual dimensions met while merging.
    """

    query: SpectrumQuery
    lines: tuple[SpectrumLine, ...] = ()
    discrepancies: tuple[Discrepancy, ...] = field(default=())

    @property
    def conjugated(self) -> bool:
        return self.query.conjugated

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(line.eigenvalue, line.multiplicity) for line in self.lines]

    def to_dict(self) -> dict[str, Any]:
        n, p, q, max_eig = self.query
        return {
            "query": {"n": n, "p": p, "q": q, "max_eig": max_eig},
            "lines": [line.to_dict() for line in self.lines],
            "discrepancies": [item.to_dict() for item in self.discrepancies],
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> SpectrumReport:
        raw = data["query"]
        query = SpectrumQuery(raw["n"], raw["p"], raw["q"], raw["max_eig"])
        p, l = query.block  # noqa: E741
        lines = []
        for line in data["lines"]:
            pieces = tuple(
                SpectralPiece(
                    PieceLabel(query.n, p, l, item["m"], item["k"], item["r"], item["s"], PieceFamily(item["case"])),
                    line["eigenvalue"],
                    int(item["dim"]),
                    int(item["virtual_dim"]) if "virtual_dim" in item else None,
                )
                for item in line["pieces"]
            )
            lines.append(SpectrumLine(line["eigenvalue"], int(line["multiplicity"]), pieces))
        discrepancies = tuple(Discrepancy.from_dict(item) for item in data["discrepancies"])
        return cls(query, tuple(lines), discrepancies)


def build_spectrum(pieces: Iterable[SpectralPiece], query: SpectrumQuery) -> SpectrumReport:
    """Merge pieces into lines of equal eigenvalue.

    A line lists only pieces of positive multiplicity and is dropped when their total is zero. Every
    virtual piece becomes a ``virtual-dimension`` discrepancy, and a line whose signed closed forms
    do not add up to its multiplicity also gets a ``virtual-total`` one.

    Raises:
        VerificationError: If the signed closed forms of a line add up to a negative number.
    """
    ordered = sorted(pieces, key=_piece_key)
    lines = []
    discrepancies = []
    for eigenvalue, group in groupby(ordered, key=lambda piece: piece.eigenvalue):
        members = tuple(group)
        total = sum(piece.multiplicity for piece in members)
        signed_total = sum(piece.signed_multiplicity for piece in members)
        for piece in members:
            if piece.is_virtual:
                discrepancies.append(
                    Discrepancy(
                        kind="virtual-dimension",
                        subject=f"piece m={piece.label.m} k={piece.label.k} r={piece.label.r} s={piece.label.s}",
                        printed=str(piece.signed),
                        computed=str(piece.multiplicity),
                        note=f"eigenvalue {eigenvalue}",
                    )
                )
        if signed_total < 0:
            raise VerificationError(
                f"Negative multiplicity at eigenvalue {eigenvalue}", computed=str(signed_total), witness=str(query)
            )
        if signed_total != total:
            discrepancies.append(
                Discrepancy("virtual-total", f"eigenvalue {eigenvalue}", str(signed_total), str(total))
            )
        if total:
            lines.append(SpectrumLine(eigenvalue, total, tuple(piece for piece in members if piece.multiplicity)))
    return SpectrumReport(query, tuple(lines), tuple(discrepancies))


def compute_spectrum(query: SpectrumQuery, workers: int | None = None) -> SpectrumReport:
    """Full spectrum of one (p, q) block; p > q is answered through the conjugate block."""
    n, p, q, max_eig = query
    if min(p, q) < 0:
        raise UsageError(f"Tensor type must be nonnegative, got ({p}, {q})")
    slots, excess = query.block
    if query.conjugated:
        logger.debug(f"Answering ({p}, {q}) through the conjugate block ({q}, {p})")
    return build_spectrum(evaluate_pieces(n, slots, excess, max_eig, workers), query)
