"""Exact multihomogeneous polynomials in z, z-bar and their fiber differentials.

The ring has 4(n+1) commuting variables: the coordinates ``z_i`` and ``zb_i`` of C^{n+1}, treated
as independent (Wirtinger style), and the fiber variables ``dz_i`` and ``dzb_i`` through which
symmetric tensors are modelled. Coefficients are :class:`fractions.Fraction` throughout.
"""

from __future__ import annotations

import itertools
import re
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass
from enum import Enum, IntEnum
from fractions import Fraction
from types import MappingProxyType
from typing import Final, NamedTuple

from .errors import UsageError
from .logging_config import get_logger

logger = get_logger(__name__)

Scalar = Fraction | int

INHOMOGENEOUS: Final = "inhomogeneous"


class VarKind(IntEnum):
    """The four families of ring variables, in canonical order.

    Attributes:
        Z: Holomorphic coordinates z_i.
        ZBAR: Antiholomorphic coordinates zb_i.
        DZ: Holomorphic fiber variables dz_i.
        DZBAR: Antiholomorphic fiber variables dzb_i.
    """

    Z = 0
    ZBAR = 1
    DZ = 2
    DZBAR = 3

    @property
    def symbol(self) -> str:
        """Prefix used by the canonical text rendering."""
        return _SYMBOLS[self]


_SYMBOLS: Final = {VarKind.Z: "z", VarKind.ZBAR: "zb", VarKind.DZ: "dz", VarKind.DZBAR: "dzb"}
_KIND_BY_SYMBOL: Final = {symbol: kind for kind, symbol in _SYMBOLS.items()}


class Var(NamedTuple):
    """A single ring variable such as ``zb1``."""

    kind: VarKind
    index: int

    def __str__(self) -> str:
        return f"{self.kind.symbol}{self.index}"


class Multidegree(NamedTuple):
    """Degrees of a monomial in z, zb, dz and dzb, in that order."""

    k: int
    l: int  # noqa: E741
    p: int
    q: int

    def shifted(self, dk: int = 0, dl: int = 0, dp: int = 0, dq: int = 0) -> Multidegree:
        return Multidegree(self.k + dk, self.l + dl, self.p + dp, self.q + dq)

    @property
    def is_void(self) -> bool:
        """True when a degree is negative, i.e. the graded piece is the zero space."""
        return min(self) < 0


class PolyOp(str, Enum):
    """Binary operations accepted by :func:`poly_arith`.

    Attributes:
        ADD: Sum of two polynomials.
        SUB: Difference of two polynomials.
        MUL: Product of two polynomials.
        SCALE: Product of a polynomial with a rational scalar.
    """

    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    SCALE = "scale"


@dataclass(frozen=True, slots=True)
class Monomial:
    """A product of variable powers with no zero exponent stored.

    Attributes:
        powers: ``(variable, exponent)`` pairs sorted by variable, every exponent positive.
    """

    powers: tuple[tuple[Var, int], ...] = ()

    @classmethod
    def from_exponents(cls, exponents: Mapping[Var, int] | Iterable[tuple[Var, int]]) -> Monomial:
        items = exponents.items() if isinstance(exponents, Mapping) else exponents
        merged: dict[Var, int] = {}
        for var, exp in items:
            if exp < 0:
                raise UsageError(f"Negative exponent {exp} for {var}")
            if exp:
                merged[var] = merged.get(var, 0) + exp
        return cls(tuple(sorted(merged.items())))

    @classmethod
    def of(cls, *variables: Var) -> Monomial:
        """Monomial that is the product of the given variables (repeats allowed)."""
        return cls.from_exponents((var, 1) for var in variables)

    def exponent(self, var: Var) -> int:
        for other, exp in self.powers:
            if other == var:
                return exp
        return 0

    def degrees(self) -> Multidegree:
        totals = [0, 0, 0, 0]
        for var, exp in self.powers:
            totals[var.kind] += exp
        return Multidegree(*totals)

    @property
    def max_index(self) -> int:
        return max((var.index for var, _ in self.powers), default=-1)

    def __mul__(self, other: Monomial) -> Monomial:
        if not self.powers:
            return other
        if not other.powers:
            return self
        return Monomial.from_exponents(itertools.chain(self.powers, other.powers))

    def times(self, var: Var) -> Monomial:
        return self._bump(var, 1)

    def derive(self, var: Var) -> tuple[int, Monomial] | None:
        """Formal derivative: ``(exponent, lowered monomial)`` or None when var is absent."""
        exp = self.exponent(var)
        if not exp:
            return None
        return exp, self._bump(var, -1)

    def _bump(self, var: Var, delta: int) -> Monomial:
        out: list[tuple[Var, int]] = []
        placed = False
        for other, exp in self.powers:
            if not placed and other >= var:
                placed = True
                if other == var:
                    if exp + delta:
                        out.append((var, exp + delta))
                    continue
                out.append((var, delta))
            out.append((other, exp))
        if not placed:
            out.append((var, delta))
        return Monomial(tuple(out))

    def divides(self, other: Monomial) -> bool:
        return all(other.exponent(var) >= exp for var, exp in self.powers)

    def quotient(self, divisor: Monomial) -> Monomial:
        exps = dict(self.powers)
        for var, exp in divisor.powers:
            exps[var] = exps.get(var, 0) - exp
        return Monomial.from_exponents(exps)

    def dense(self, n: int) -> tuple[int, ...]:
        """Exponent vector over z_0..z_n, zb_0..zb_n, dz_0..dz_n, dzb_0..dzb_n."""
        vector = [0] * (4 * (n + 1))
        for var, exp in self.powers:
            vector[var.kind * (n + 1) + var.index] = exp
        return tuple(vector)

    def grlex_key(self, n: int) -> tuple[int, tuple[int, ...]]:
        vector = self.dense(n)
        return sum(vector), vector

    def __str__(self) -> str:
        if not self.powers:
            return "1"
        return "*".join(str(var) if exp == 1 else f"{var}^{exp}" for var, exp in self.powers)


ONE: Final = Monomial()


class BiPoly:
    """Immutable sparse polynomial over the rationals in the 4(n+1) ring variables.

    Terms are kept in a dict keyed by :class:`Monomial`; iteration, rendering and equality use the
    canonical graded lexicographic order (largest term first).
    """

    __slots__ = ("n", "_terms", "_ordered")

    def __init__(self, n: int, terms: Mapping[Monomial, Scalar] | None = None) -> None:
        if n < 0:
            raise UsageError(f"Ambient parameter n must be nonnegative, got {n}")
        clean: dict[Monomial, Fraction] = {}
        for mono, coeff in (terms or {}).items():
            if mono.max_index > n:
                raise UsageError(f"Monomial {mono} uses an index above n={n}")
            value = Fraction(coeff)
            if value:
                clean[mono] = value
        self.n = n
        self._terms = clean
        self._ordered: tuple[tuple[Monomial, Fraction], ...] | None = None

    @classmethod
    def _wrap(cls, n: int, terms: dict[Monomial, Fraction]) -> BiPoly:
        # Caller guarantees no zero coefficients and indices within range
        poly = cls.__new__(cls)
        poly.n = n
        poly._terms = terms
        poly._ordered = None
        return poly

    @classmethod
    def zero(cls, n: int) -> BiPoly:
        return cls(n)

    @classmethod
    def constant(cls, n: int, value: Scalar) -> BiPoly:
        return cls(n, {ONE: value})

    @classmethod
    def variable(cls, var: Var, n: int) -> BiPoly:
        return cls(n, {Monomial.of(var): 1})

    @classmethod
    def from_monomial(cls, mono: Monomial, n: int, coeff: Scalar = 1) -> BiPoly:
        return cls(n, {mono: coeff})

    @property
    def terms(self) -> Mapping[Monomial, Fraction]:
        return MappingProxyType(self._terms)

    def items(self) -> tuple[tuple[Monomial, Fraction], ...]:
        """Terms in canonical order."""
        if self._ordered is None:
            self._ordered = tuple(sorted(self._terms.items(), key=lambda item: item[0].grlex_key(self.n), reverse=True))
        return self._ordered

    def __iter__(self) -> Iterator[tuple[Monomial, Fraction]]:
        return iter(self.items())

    def __len__(self) -> int:
        return len(self._terms)

    def __bool__(self) -> bool:
        return bool(self._terms)

    @property
    def is_zero(self) -> bool:
        return not self._terms

    def coefficient(self, mono: Monomial) -> Fraction:
        return self._terms.get(mono, Fraction(0))

    def leading_term(self) -> tuple[Monomial, Fraction]:
        if not self._terms:
            raise UsageError("The zero polynomial has no leading term")
        return self.items()[0]

    def _check_same_ring(self, other: BiPoly) -> None:
        if other.n != self.n:
            raise UsageError(f"Polynomials live in different rings (n={self.n} and n={other.n})")

    def _combine(self, other: BiPoly, sign: int) -> BiPoly:
        self._check_same_ring(other)
        out = dict(self._terms)
        for mono, coeff in other._terms.items():
            value = out.get(mono, 0) + sign * coeff
            if value:
                out[mono] = value
            else:
                out.pop(mono, None)
        return BiPoly._wrap(self.n, out)

    def __add__(self, other: BiPoly) -> BiPoly:
        return self._combine(other, 1)

    def __sub__(self, other: BiPoly) -> BiPoly:
        return self._combine(other, -1)

    def __neg__(self) -> BiPoly:
        return BiPoly._wrap(self.n, {mono: -coeff for mono, coeff in self._terms.items()})

    def scale(self, factor: Scalar) -> BiPoly:
        factor = Fraction(factor)
        if not factor:
            return BiPoly.zero(self.n)
        return BiPoly._wrap(self.n, {mono: coeff * factor for mono, coeff in self._terms.items()})

    def __mul__(self, other: BiPoly | Scalar) -> BiPoly:
        if not isinstance(other, BiPoly):
            return self.scale(other)
        self._check_same_ring(other)
        out: dict[Monomial, Fraction] = {}
        for mono_a, coeff_a in self._terms.items():
            for mono_b, coeff_b in other._terms.items():
                mono = mono_a * mono_b
                value = out.get(mono, 0) + coeff_a * coeff_b
                if value:
                    out[mono] = value
                else:
                    out.pop(mono, None)
        return BiPoly._wrap(self.n, out)

    def __rmul__(self, other: Scalar) -> BiPoly:
        return self.scale(other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __hash__(self) -> int:
        return hash((self.n, frozenset(self._terms.items())))

    def render(self) -> str:
        """Canonical text form, e.g. ``2*z0*zb1 - 1/3*dz0``."""
        if not self._terms:
            return "0"
        parts: list[str] = []
        for position, (mono, coeff) in enumerate(self.items()):
            sign = "-" if coeff < 0 else "+"
            magnitude = abs(coeff)
            if not mono.powers:
                body = str(magnitude)
            elif magnitude == 1:
                body = str(mono)
            else:
                body = f"{magnitude}*{mono}"
            if position == 0:
                parts.append(body if sign == "+" else f"-{body}")
            else:
                parts.append(f" {sign} {body}")
        return "".join(parts)

    __str__ = render

    def __repr__(self) -> str:
        return f"BiPoly(n={self.n}, {self.render()!r})"

    @classmethod
    def parse(cls, text: str, n: int) -> BiPoly:
        """Read the canonical rendering back; whitespace is ignored.

        Args:
            text: Polynomial text such as ``"z0^2*zb1 - 3/2*dz0*dzb1"``.
            n: Ambient parameter of the ring.

        Returns:
            The parsed polynomial.

        Raises:
            UsageError: On malformed text or indices above n.
        """
        compact = re.sub(r"\s+", "", text)
        if not compact:
            raise UsageError("Cannot parse an empty polynomial")
        terms: dict[Monomial, Fraction] = {}
        position = 0
        for match in _TERM_PATTERN.finditer(compact):
            if match.start() == len(compact):
                break
            if match.start() != position or not match.group(2):
                raise UsageError(f"Malformed polynomial text: {text!r}")
            position = match.end()
            coeff, mono = _parse_term(match.group(2), text)
            if match.group(1) == "-":
                coeff = -coeff
            terms[mono] = terms.get(mono, Fraction(0)) + coeff
        if position != len(compact):
            raise UsageError(f"Malformed polynomial text: {text!r}")
        return cls(n, terms)


_TERM_PATTERN: Final = re.compile(r"([+-]?)([^+-]*)")
_NUMBER_PATTERN: Final = re.compile(r"^\d+(/\d+)?$")
_FACTOR_PATTERN: Final = re.compile(r"^(dzb|dz|zb|z)(\d+)(?:\^(\d+))?$")


def _parse_term(body: str, text: str) -> tuple[Fraction, Monomial]:
    coeff = Fraction(1)
    exponents: list[tuple[Var, int]] = []
    for factor in body.split("*"):
        if _NUMBER_PATTERN.match(factor):
            coeff *= Fraction(factor)
            continue
        match = _FACTOR_PATTERN.match(factor)
        if match is None:
            raise UsageError(f"Unknown factor {factor!r} in {text!r}")
        var = Var(_KIND_BY_SYMBOL[match.group(1)], int(match.group(2)))
        exponents.append((var, int(match.group(3) or 1)))
    return coeff, Monomial.from_exponents(exponents)


def poly_arith(a: BiPoly, b: BiPoly | Scalar, op: PolyOp) -> BiPoly:
    """Apply one ring operation; ``scale`` takes a rational scalar as ``b``."""
    if op is PolyOp.SCALE:
        if isinstance(b, BiPoly):
            raise UsageError("scale expects a rational scalar")
        return a.scale(b)
    if not isinstance(b, BiPoly):
        raise UsageError(f"{op.value} expects two polynomials")
    if op is PolyOp.ADD:
        return a + b
    if op is PolyOp.SUB:
        return a - b
    return a * b


def exact_quotient(dividend: BiPoly, divisor: BiPoly) -> BiPoly:
    """Divide when the division is exact, by repeated leading-term cancellation.

    Raises:
        UsageError: If the divisor is zero or does not divide the dividend.
    """
    if divisor.is_zero:
        raise UsageError("Division by the zero polynomial")
    dividend._check_same_ring(divisor)
    lead_mono, lead_coeff = divisor.leading_term()
    quotient: dict[Monomial, Fraction] = {}
    remainder = dividend
    while remainder:
        mono, coeff = remainder.leading_term()
        if not lead_mono.divides(mono):
            raise UsageError(f"{divisor} does not divide {dividend}")
        step_mono = mono.quotient(lead_mono)
        step_coeff = coeff / lead_coeff
        quotient[step_mono] = quotient.get(step_mono, Fraction(0)) + step_coeff
        remainder = remainder - divisor * BiPoly._wrap(dividend.n, {step_mono: step_coeff})
    return BiPoly(dividend.n, quotient)


def wirtinger_partial(f: BiPoly, var: Var) -> BiPoly:
    """Formal partial derivative with respect to one ring variable."""
    out: dict[Monomial, Fraction] = {}
    for mono, coeff in f.terms.items():
        lowered = mono.derive(var)
        if lowered is not None:
            exp, mono_out = lowered
            out[mono_out] = out.get(mono_out, 0) + exp * coeff
    return BiPoly._wrap(f.n, {mono: coeff for mono, coeff in out.items() if coeff})


def transfer(f: BiPoly, source: VarKind, target: VarKind) -> BiPoly:
    """First-order operator ``sum_i target_i * d/d(source_i)``."""
    out: dict[Monomial, Fraction] = {}
    for mono, coeff in f.terms.items():
        for var, exp in mono.powers:
            if var.kind is not source:
                continue
            lowered = mono.derive(var)
            assert lowered is not None
            mono_out = lowered[1].times(Var(target, var.index))
            out[mono_out] = out.get(mono_out, 0) + exp * coeff
    return BiPoly._wrap(f.n, {mono: coeff for mono, coeff in out.items() if coeff})


def pair_contraction(f: BiPoly, first: VarKind, second: VarKind) -> BiPoly:
    """Second-order operator ``sum_i d/d(first_i) d/d(second_i)`` for two distinct kinds."""
    if first is second:
        raise UsageError("pair_contraction needs two distinct variable kinds")
    out: dict[Monomial, Fraction] = {}
    for mono, coeff in f.terms.items():
        for var, exp in mono.powers:
            if var.kind is not first:
                continue
            partner = Var(second, var.index)
            partner_exp = mono.exponent(partner)
            if not partner_exp:
                continue
            lowered = mono.derive(var)
            assert lowered is not None
            twice = lowered[1].derive(partner)
            assert twice is not None
            out[twice[1]] = out.get(twice[1], 0) + exp * partner_exp * coeff
    return BiPoly._wrap(f.n, {mono: coeff for mono, coeff in out.items() if coeff})


def mixed_laplacian(f: BiPoly) -> BiPoly:
    """``sum_i d/dz_i d/dzb_i f`` with fiber variables held constant."""
    return pair_contraction(f, VarKind.Z, VarKind.ZBAR)


def euler_operator(f: BiPoly) -> BiPoly:
    """Full Euler operator: every variable times its own partial derivative."""
    total = BiPoly.zero(f.n)
    for kind in VarKind:
        total = total + transfer(f, kind, kind)
    return total


def multidegree(f: BiPoly) -> Multidegree | str:
    """Common multidegree of all terms, ``(0,0,0,0)`` for zero, or :data:`INHOMOGENEOUS`."""
    degrees = {mono.degrees() for mono in f.terms}
    if not degrees:
        return Multidegree(0, 0, 0, 0)
    if len(degrees) > 1:
        return INHOMOGENEOUS
    return degrees.pop()


def _exponent_vectors(n: int, total: int) -> list[tuple[int, ...]]:
    vectors = []
    for picks in itertools.combinations_with_replacement(range(n + 1), total):
        counts = [0] * (n + 1)
        for index in picks:
            counts[index] += 1
        vectors.append(tuple(counts))
    return vectors


def monomial_basis(n: int, degree: Multidegree) -> tuple[Monomial, ...]:
    """All monomials of the given multidegree in canonical order; empty for a void degree."""
    if degree.is_void:
        return ()
    per_kind = [_exponent_vectors(n, total) for total in degree]
    monomials = []
    for combo in itertools.product(*per_kind):
        monomials.append(
            Monomial.from_exponents(
                (Var(kind, index), exp)
                for kind, vector in zip(VarKind, combo, strict=True)
                for index, exp in enumerate(vector)
            )
        )
    monomials.sort(key=lambda mono: mono.grlex_key(n), reverse=True)
    logger.debug(f"Enumerated {len(monomials)} monomials of degree {tuple(degree)} for n={n}")
    return tuple(monomials)
