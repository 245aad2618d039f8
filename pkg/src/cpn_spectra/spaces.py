"""Polynomial tensor spaces, their harmonic/traceless/primitive subspaces and dimension formulas.

All spaces live in ``SP^{p,q}_{k,l}``: symmetric (p, q)-tensors on C^{n+1} whose coefficients are
polynomials of bidegree (k, l). A negative index always denotes the zero space.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from functools import lru_cache, wraps
from typing import Concatenate, NamedTuple, ParamSpec

from .errors import UsageError, VerificationError
from .linalg import Ambient, Subspace, TensorMap, image, restricted_kernel
from .logging_config import get_logger
from .polyring import Multidegree
from .tensorops import (
    OperatorTag,
    Side,
    SpecialTensor,
    TensorPoly,
    coefficient_laplacian,
    compose,
    contract,
    divergence_parts,
    power,
    special_tensor,
    symgrad,
    trace_metric,
)

logger = get_logger(__name__)


class SpaceQuery(NamedTuple):
    """Index tuple of ``SP^{p,q}_{k,l}`` over C^{n+1}."""

    n: int
    p: int
    q: int
    k: int
    l: int  # noqa: E741

    @property
    def degree(self) -> Multidegree:
        return Multidegree(self.k, self.l, self.p, self.q)

    @property
    def is_void(self) -> bool:
        return min(self.p, self.q, self.k, self.l) < 0

    @property
    def is_virtual(self) -> bool:
        """Closed forms at n = 1 count virtual dimensions once every index is positive."""
        return self.n == 1 and self.p * self.q * self.k * self.l != 0

    @property
    def is_circle_invariant(self) -> bool:
        return self.k + self.p == self.l + self.q

    def shifted(self, dp: int = 0, dq: int = 0, dk: int = 0, dl: int = 0) -> SpaceQuery:
        return SpaceQuery(self.n, self.p + dp, self.q + dq, self.k + dk, self.l + dl)

    def with_degree(self, degree: Multidegree) -> SpaceQuery:
        return SpaceQuery(self.n, degree.p, degree.q, degree.k, degree.l)

    def __str__(self) -> str:
        return f"T(n={self.n}; p={self.p}, q={self.q}; k={self.k}, l={self.l})"


def _check_n(query: SpaceQuery) -> None:
    if query.n < 0:
        raise UsageError(f"Ambient parameter n must be nonnegative, got {query.n}")


class PrimitiveCase(str, Enum):
    """Which pair of kernels cuts a primitive subspace out of a T-space.

    The holomorphic kernel is that of the symmetric gradient when k <= p and of the contraction with W
    when k >= p; likewise on the antiholomorphic side with (l, q). On the boundary k = p (or l = q)
    both are allowed and :meth:`for_query` picks the symmetric gradient.

    Attributes:
        SYMGRAD_SYMGRAD: ``T ∩ ker δ*_h ∩ ker δ̄*_h``.
        SYMGRAD_CONTRACT: ``T ∩ ker δ*_h ∩ ker i_W̄``.
        CONTRACT_SYMGRAD: ``T ∩ ker i_W ∩ ker δ̄*_h``.
        CONTRACT_CONTRACT: ``T ∩ ker i_W ∩ ker i_W̄``.
    """

    SYMGRAD_SYMGRAD = "sym-sym"
    SYMGRAD_CONTRACT = "sym-con"
    CONTRACT_SYMGRAD = "con-sym"
    CONTRACT_CONTRACT = "con-con"

    @classmethod
    def from_sides(cls, hol_contract: bool, antihol_contract: bool) -> PrimitiveCase:
        return {
            (False, False): cls.SYMGRAD_SYMGRAD,
            (False, True): cls.SYMGRAD_CONTRACT,
            (True, False): cls.CONTRACT_SYMGRAD,
            (True, True): cls.CONTRACT_CONTRACT,
        }[(hol_contract, antihol_contract)]

    @classmethod
    def for_query(cls, query: SpaceQuery) -> PrimitiveCase:
        return cls.from_sides(query.k > query.p, query.l > query.q)

    def contracts(self, side: Side) -> bool:
        """True when this case uses the kernel of the contraction on ``side``."""
        if side is Side.HOL:
            return self in (PrimitiveCase.CONTRACT_SYMGRAD, PrimitiveCase.CONTRACT_CONTRACT)
        return self in (PrimitiveCase.SYMGRAD_CONTRACT, PrimitiveCase.CONTRACT_CONTRACT)

    def consistent_with(self, query: SpaceQuery) -> bool:
        hol_ok = query.k >= query.p if self.contracts(Side.HOL) else query.k <= query.p
        antihol_ok = query.l >= query.q if self.contracts(Side.ANTIHOL) else query.l <= query.q
        return hol_ok and antihol_ok

    def reflect(self, query: SpaceQuery) -> SpaceQuery:
        """Indices of the symgrad-symgrad primitive space with the same dimension.

        Exchanging z with dz (and zb with dzb) preserves every T-space constraint and trades the
        contraction for the symmetric gradient, so a contracting side swaps its (k, p) or (l, q).
        """
        n, p, q, k, l = query  # noqa: E741
        if self.contracts(Side.HOL):
            p, k = k, p
        if self.contracts(Side.ANTIHOL):
            q, l = l, q  # noqa: E741
        return SpaceQuery(n, p, q, k, l)


def _ambient(query: SpaceQuery, degree: Multidegree | None = None) -> Ambient:
    return Ambient(query.n, degree if degree is not None else query.degree)


def _constraint(tag: OperatorTag, query: SpaceQuery, op: TensorMap) -> tuple[TensorMap, Ambient]:
    return op, _ambient(query, tag.target(query.degree))


def _harmonic_constraints(query: SpaceQuery) -> list[tuple[TensorMap, Ambient]]:
    lower_z, lower_zbar = OperatorTag.DIVERGENCE.targets(query.degree)
    return [
        (coefficient_laplacian, _ambient(query, query.degree.shifted(-1, -1, 0, 0))),
        (lambda tensor: divergence_parts(tensor).from_z, _ambient(query, lower_z)),
        (lambda tensor: divergence_parts(tensor).from_zbar, _ambient(query, lower_zbar)),
    ]


def _side_map(side: Side, contracting: bool) -> tuple[OperatorTag, TensorMap]:
    if contracting:
        tag = OperatorTag.CONTRACT_HOL if side is Side.HOL else OperatorTag.CONTRACT_ANTIHOL
        return tag, lambda tensor: contract(tensor, side)
    tag = OperatorTag.SYMGRAD_HOL if side is Side.HOL else OperatorTag.SYMGRAD_ANTIHOL
    return tag, lambda tensor: symgrad(tensor, side)


P = ParamSpec("P")


def _capped_cache(
    build: Callable[Concatenate[SpaceQuery, P], Subspace],
) -> Callable[Concatenate[SpaceQuery, P], Subspace]:
    """Memoise a space builder while enforcing the current column cap on every call, cache hits included."""
    cached = lru_cache(maxsize=512)(build)

    @wraps(build)
    def checked(query: SpaceQuery, *args: P.args, **kwargs: P.kwargs) -> Subspace:
        _ambient(query)
        return cached(query, *args, **kwargs)

    return checked


@_capped_cache
def polynomial_space(query: SpaceQuery) -> Subspace:
    """The full space ``SP^{p,q}_{k,l}`` with its monomial basis.

    Raises:
        ResourceError: If the dimension exceeds the configured column cap.
    """
    _check_n(query)
    return Subspace.full(_ambient(query))


@_capped_cache
def harmonic_space(query: SpaceQuery) -> Subspace:
    """``SH``: divergence free tensors with harmonic coefficients."""
    _check_n(query)
    return restricted_kernel(polynomial_space(query), _harmonic_constraints(query))


@_capped_cache
def traceless_space(query: SpaceQuery) -> Subspace:
    """``T``: the traceless part of ``SH``, computed as one stacked kernel on ``SP``."""
    _check_n(query)
    constraints = _harmonic_constraints(query)
    constraints.append(_constraint(OperatorTag.TRACE, query, trace_metric))
    space = restricted_kernel(polynomial_space(query), constraints)
    logger.debug(f"{query}: dim {space.dim}")
    return space


@_capped_cache
def primitive_space(query: SpaceQuery, case: PrimitiveCase) -> Subspace:
    """The T-space cut down by the two kernels named by ``case``.

    Raises:
        UsageError: If ``case`` does not apply to the index region of ``query``.
    """
    if not case.consistent_with(query):
        raise UsageError(f"Primitive case {case.value} does not apply to {query}")
    maps = []
    for side in Side:
        tag, op = _side_map(side, case.contracts(side))
        maps.append(_constraint(tag, query, op))
    return restricted_kernel(traceless_space(query), maps)


def radial_complement(query: SpaceQuery) -> Subspace:
    """``W*·SP + W̄*·SP + r²·SP`` inside ``SP^{p,q}_{k,l}``, the complement of the harmonic part."""
    target = _ambient(query)
    factors = (
        (SpecialTensor.WSTAR, query.shifted(dp=-1, dl=-1)),
        (SpecialTensor.WBARSTAR, query.shifted(dq=-1, dk=-1)),
        (SpecialTensor.RSQUARED, query.shifted(dk=-1, dl=-1)),
    )
    products = []
    for kind, source in factors:
        if source.is_void:
            continue
        factor = special_tensor(kind, query.n)
        for tensor in polynomial_space(source).tensors():
            products.append(TensorPoly(factor.body * tensor.body, query.degree))
    return Subspace.span_tensors(target, products)


@dataclass(frozen=True)
class KernelProjector:
    """Projector ``P = sum_s alpha_s psi^s phi^s`` of a T-space onto the kernel of ``phi``.

    ``phi`` is the symmetric gradient and ``psi`` the contraction on one side. The kernel of ``P`` is
    the image of ``psi`` from the neighbouring space with one more tensor slot.

    Attributes:
        query: Index tuple the projector acts on.
        side: Holomorphic or antiholomorphic pair.
        coefficients: ``alpha_0 .. alpha_a``.
    """

    query: SpaceQuery
    side: Side
    coefficients: tuple[Fraction, ...]

    def __call__(self, tensor: TensorPoly) -> TensorPoly:
        if tensor.degree != self.query.degree:
            raise UsageError(f"Projector for {self.query} applied to multidegree {tuple(tensor.degree)}")
        total = tensor.scale(self.coefficients[0])
        lowered = tensor
        for exponent, alpha in enumerate(self.coefficients[1:], start=1):
            lowered = symgrad(lowered, self.side)
            raised = power(lambda t: contract(t, self.side), exponent)(lowered)
            total = total + raised.scale(alpha)
        return total


def kernel_projector(query: SpaceQuery, side: Side) -> KernelProjector:
    """Build the projector onto the symmetric-gradient kernel on one side.

    The coefficients solve ``alpha_{s+1} = -alpha_s / ((s+1)(b-a+s+2))`` with ``alpha_0 = 1``, where
    (a, b) is (k, p) on the holomorphic side and (l, q) on the antiholomorphic side.

    Raises:
        UsageError: If a > b, where the projector is not defined.
    """
    a, b = (query.k, query.p) if side is Side.HOL else (query.l, query.q)
    if query.is_void or a > b:
        raise UsageError(f"The {side.value} projector needs degree <= slot count, got {query}")
    coefficients = [Fraction(1)]
    for s in range(a):
        coefficients.append(-coefficients[-1] / ((s + 1) * (b - a + s + 2)))
    return KernelProjector(query, side, tuple(coefficients))


class DecompositionPiece(NamedTuple):
    """One summand of a T-space: an operator power applied to a primitive space.

    Attributes:
        r: Power of the holomorphic operator.
        s: Power of the antiholomorphic operator.
        case: Primitive case of the source space.
        source: Index tuple of the primitive source space.
    """

    r: int
    s: int
    case: PrimitiveCase
    source: SpaceQuery


def _side_range(case: PrimitiveCase, side: Side, query: SpaceQuery) -> int:
    slots, degree = (query.p, query.k) if side is Side.HOL else (query.q, query.l)
    return slots if case.contracts(side) else degree


def piece_source(query: SpaceQuery, case: PrimitiveCase, r: int, s: int) -> SpaceQuery:
    """Index tuple of the primitive space feeding piece (r, s) of ``query``."""
    if not 0 <= r <= _side_range(case, Side.HOL, query) or not 0 <= s <= _side_range(case, Side.ANTIHOL, query):
        raise UsageError(f"Piece ({r}, {s}) is outside the {case.value} range of {query}")
    dr = -r if case.contracts(Side.HOL) else r
    ds = -s if case.contracts(Side.ANTIHOL) else s
    return query.shifted(dp=dr, dq=ds, dk=-dr, dl=-ds)


def piece_map(case: PrimitiveCase, r: int, s: int) -> TensorMap:
    """Operator power carrying the primitive source of piece (r, s) into the T-space."""
    maps: list[Callable[[TensorPoly], TensorPoly]] = []
    for side, exponent in ((Side.HOL, r), (Side.ANTIHOL, s)):
        # The kernel is cut by one operator; pieces are built with the other
        _, op = _side_map(side, not case.contracts(side))
        maps.append(power(op, exponent))
    return compose(*maps)


def build_piece(query: SpaceQuery, case: PrimitiveCase, r: int, s: int) -> Subspace:
    if not case.consistent_with(query):
        raise UsageError(f"Primitive case {case.value} does not apply to {query}")
    source = piece_source(query, case, r, s)
    return image(primitive_space(source, case), piece_map(case, r, s), _ambient(query))


def decompose_traceless(
    query: SpaceQuery, case: PrimitiveCase | None = None
) -> list[tuple[DecompositionPiece, Subspace]]:
    """Split a T-space into operator images of primitive spaces.

    Args:
        query: The T-space to split.
        case: Branch to use; defaults to the first one that applies.

    Returns:
        Pieces in (r, s) order, including zero-dimensional ones.
    """
    case = case or PrimitiveCase.for_query(query)
    if query.is_void:
        return []
    pieces = []
    for r in range(_side_range(case, Side.HOL, query) + 1):
        for s in range(_side_range(case, Side.ANTIHOL, query) + 1):
            label = DecompositionPiece(r, s, case, piece_source(query, case, r, s))
            pieces.append((label, build_piece(query, case, r, s)))
    logger.debug(f"{query} splits into {len(pieces)} pieces via {case.value}")
    return pieces


# Closed form dimensions


def _sp(n: int, p: int, q: int, k: int, l: int) -> int:  # noqa: E741
    if min(p, q, k, l) < 0:
        return 0
    return math.comb(n + k, k) * math.comb(n + l, l) * math.comb(n + p, p) * math.comb(n + q, q)


def _sh(n: int, p: int, q: int, k: int, l: int) -> int:  # noqa: E741
    if min(p, q, k, l) < 0:
        return 0
    added = (
        _sp(n, p, q, k, l)
        + _sp(n, p - 1, q - 1, k - 1, l - 1)
        + _sp(n, p - 1, q, k - 1, l - 2)
        + _sp(n, p, q - 1, k - 2, l - 1)
    )
    removed = (
        _sp(n, p - 1, q, k, l - 1)
        + _sp(n, p, q - 1, k - 1, l)
        + _sp(n, p, q, k - 1, l - 1)
        + _sp(n, p - 1, q - 1, k - 2, l - 2)
    )
    return added - removed


def _t(n: int, p: int, q: int, k: int, l: int) -> int:  # noqa: E741
    if min(p, q, k, l) < 0:
        return 0
    return _sh(n, p, q, k, l) - _sh(n, p - 1, q - 1, k, l)


def dim_polynomial(query: SpaceQuery) -> int:
    return _sp(*query)


def dim_harmonic(query: SpaceQuery) -> int:
    """Inclusion-exclusion dimension of ``SH`` (virtual when n = 1)."""
    return _sh(*query)


def dim_traceless(query: SpaceQuery) -> int:
    return _t(*query)


class DimensionRoute(str, Enum):
    """Independent ways of computing a primitive dimension.

    Attributes:
        TRACELESS: Alternating sum of four T-space dimensions.
        EXPANDED: The same sum expanded into 24 polynomial-space dimensions.
        CLOSED_FORM: Tabulated factorial closed forms.
    """

    TRACELESS = "traceless"
    EXPANDED = "expanded"
    CLOSED_FORM = "closed-form"


# (dp, dq, dk, dl) offsets of the expanded route, added then removed
_EXPANDED_PLUS = (
    (0, 0, 0, 0), (-2, -1, 0, -1), (-1, -2, -1, 0), (-2, -2, -2, -2),
    (1, 1, -1, -1), (0, 1, -2, -3), (1, 0, -3, -2), (-1, -1, -3, -3),
    (1, -1, -2, 0), (0, -2, -3, -1), (-1, 1, 0, -2), (-2, 0, -1, -3),
)  # fmt: skip
_EXPANDED_MINUS = (
    (-1, -1, 0, 0), (-2, -2, -1, -1), (1, 1, -2, -2), (0, 0, -3, -3),
    (1, 0, -1, 0), (1, -1, -3, -1), (0, -2, -2, 0), (-1, -2, -3, -2),
    (0, 1, 0, -1), (-1, 1, -1, -3), (-2, 0, 0, -2), (-2, -1, -2, -3),
)  # fmt: skip


def _require_first_case(query: SpaceQuery) -> None:
    if query.k > query.p or query.l > query.q:
        raise UsageError(f"Dimension routes take indices with k <= p and l <= q, got {query}")


def traceless_route(query: SpaceQuery) -> int:
    _require_first_case(query)
    n, p, q, k, l = query  # noqa: E741
    added = _t(n, p, q, k, l) + _t(n, p + 1, q + 1, k - 1, l - 1)
    return added - _t(n, p + 1, q, k - 1, l) - _t(n, p, q + 1, k, l - 1)


def expanded_route(query: SpaceQuery) -> int:
    _require_first_case(query)
    n, p, q, k, l = query  # noqa: E741
    plus = sum(_sp(n, p + dp, q + dq, k + dk, l + dl) for dp, dq, dk, dl in _EXPANDED_PLUS)
    minus = sum(_sp(n, p + dp, q + dq, k + dk, l + dl) for dp, dq, dk, dl in _EXPANDED_MINUS)
    return plus - minus


def _fact(value: int) -> int | None:
    return math.factorial(value) if value >= 0 else None


def _ratio(numerator: list[int | None], extra: int, denominator: list[int | None]) -> Fraction | None:
    if any(value is None for value in numerator + denominator):
        return None
    top = math.prod(value for value in numerator if value is not None) * extra
    bottom = math.prod(value for value in denominator if value is not None)
    return Fraction(top, bottom)


def closed_form_primitive_dim(query: SpaceQuery, printed: bool = False) -> Fraction | None:
    """Tabulated closed form for ``dim T^{p,q}_{k,l} ∩ ker δ*_h ∩ ker δ̄*_h``.

    Args:
        query: Indices with k <= p and l <= q.
        printed: Reproduce the tabulated expression literally; the forms for p = 0 and q = 0 then
            carry a stray factor 1/2.

    Returns:
        The value, or None when a factorial argument is negative and the form does not apply.
    """
    _require_first_case(query)
    n, p, q, k, l = query  # noqa: E741
    f = _fact
    nf = math.factorial(n)
    if p == q == k == l == 0:
        return Fraction(1)
    half = Fraction(1, 2) if printed else Fraction(1)
    if p == 0:
        value = _ratio([f(n + q), f(n + l - 1)], n * (q - l + 1), [nf, nf, f(q + 1), f(l)])
        return None if value is None else value * half
    if q == 0:
        value = _ratio([f(n + p), f(n + k - 1)], n * (p - k + 1), [nf, nf, f(p + 1), f(k)])
        return None if value is None else value * half
    if k == l == 0:
        return _ratio([f(n + p - 1), f(n + q - 1)], n * (n + p + q), [nf, nf, f(p), f(q)])
    if k == 0:
        extra = n * n * (n - 1) * (q - l + 1) * (n + p + l - 1) * (n + p + q)
        return _ratio([f(n + p - 2), f(n + q - 1), f(n + l - 2)], extra, [nf, nf, nf, f(p), f(q + 1), f(l)])
    if l == 0:
        extra = n * n * (n - 1) * (p - k + 1) * (n + q + k - 1) * (n + p + q)
        return _ratio([f(n + p - 1), f(n + q - 2), f(n + k - 2)], extra, [nf, nf, nf, f(q), f(p + 1), f(k)])
    if k == l == 1:
        extra = n * n * (n - 2) * p * q * (n + q) * (n + p) * (n + p + q)
        return _ratio([f(n + p - 2), f(n + q - 2)], extra, [nf, nf, f(p + 1), f(q + 1)])
    extra = (
        n**3 * (n - 1) ** 2 * (n - 2) * (p - k + 1) * (q - l + 1)
        * (n + k + l - 2) * (n + q + k - 1) * (n + p + l - 1) * (n + p + q)
    )  # fmt: skip
    return _ratio(
        [f(n + p - 2), f(n + q - 2), f(n + k - 3), f(n + l - 3)],
        extra,
        [nf, nf, nf, nf, f(p + 1), f(q + 1), f(k), f(l)],
    )


def primitive_dim_routes(query: SpaceQuery, case: PrimitiveCase | None = None) -> dict[DimensionRoute, int | None]:
    """Every closed-form route for one primitive dimension, keyed by route."""
    case = case or PrimitiveCase.for_query(query)
    if not case.consistent_with(query):
        raise UsageError(f"Primitive case {case.value} does not apply to {query}")
    reflected = case.reflect(query)
    closed = closed_form_primitive_dim(reflected)
    if closed is not None and closed.denominator != 1:
        raise VerificationError(f"Closed form is not an integer at {reflected}", computed=str(closed))
    return {
        DimensionRoute.TRACELESS: traceless_route(reflected),
        DimensionRoute.EXPANDED: expanded_route(reflected),
        DimensionRoute.CLOSED_FORM: None if closed is None else int(closed),
    }


def dim_primitive(query: SpaceQuery, case: PrimitiveCase | None = None) -> int:
    """Closed-form primitive dimension, cross-checked across every route that applies.

    For n = 1 and p·q·k·l != 0 the value is virtual and may be negative.

    Raises:
        UsageError: If n < 1 or the case does not apply.
        VerificationError: If two routes disagree.
    """
    if query.n < 1:
        raise UsageError(f"Primitive dimensions need n >= 1, got {query.n}")
    if query.is_void:
        return 0
    routes = primitive_dim_routes(query, case)
    value = routes[DimensionRoute.TRACELESS]
    assert value is not None
    for route, other in routes.items():
        if other is not None and other != value:
            raise VerificationError(
                f"Dimension routes disagree at {query}",
                expected=str(value),
                computed=f"{route.value}={other}",
                witness=str(query),
            )
    if value < 0:
        logger.warning(f"Virtual dimension {value} at {query}")
    return value
