"""Symmetric tensor fields on C^{n+1} and the operators acting on them.

A symmetric tensor T of type (p, q) with bidegree (k, l) coefficients is identified with the
polynomial ``T(X, ..., X)``: a polynomial of degree p in the ``dz`` variables and q in the ``dzb``
variables. In that model

- contraction with the radial fields is ``i_W = sum z_i d/d(dz_i)`` and ``i_Wb = sum zb_i d/d(dzb_i)``,
- the holomorphic symmetric gradients are ``sum dz_i d/dz_i`` and ``sum dzb_i d/dzb_i``,
- the metric trace is ``sum d/d(dz_i) d/d(dzb_i)``,

with no combinatorial normalisation factors. These satisfy the commutator identities used by the
spectral decomposition exactly, and the compositions entering the Laplacian correction are
independent of the slot convention.
"""

from __future__ import annotations

from collections.abc import Callable
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction
from typing import NamedTuple

from .config import get_config
from .errors import UsageError, VerificationError
from .logging_config import get_logger
from .polyring import (
    INHOMOGENEOUS,
    BiPoly,
    Monomial,
    Multidegree,
    Scalar,
    Var,
    VarKind,
    euler_operator,
    mixed_laplacian,
    multidegree,
    pair_contraction,
    transfer,
)

logger = get_logger(__name__)

# The real flat Laplacian is -4 times the mixed Wirtinger Laplacian
FLAT_LAPLACIAN_FACTOR = -4


class Side(str, Enum):
    """Holomorphic or antiholomorphic half of an operator pair.

    Attributes:
        HOL: Acts on the z / dz variables.
        ANTIHOL: Acts on the zb / dzb variables.
    """

    HOL = "hol"
    ANTIHOL = "antihol"

    @property
    def coordinate(self) -> VarKind:
        return VarKind.Z if self is Side.HOL else VarKind.ZBAR

    @property
    def fiber(self) -> VarKind:
        return VarKind.DZ if self is Side.HOL else VarKind.DZBAR


class SpecialTensor(str, Enum):
    """Distinguished tensors built from the flat Kaehler structure.

    Attributes:
        METRIC: ``g = sum dz_i dzb_i``.
        WSTAR: ``W* = sum zb_i dz_i``.
        WBARSTAR: ``Wb* = sum z_i dzb_i``.
        RSQUARED: ``r^2 = sum z_i zb_i`` as a function.
    """

    METRIC = "metric"
    WSTAR = "Wstar"
    WBARSTAR = "Wbarstar"
    RSQUARED = "rsquared"


class OperatorTag(str, Enum):
    """Operators of the tensor algebra and the multidegree each one lands in.

    Attributes:
        CONTRACT_HOL: Contraction with W.
        CONTRACT_ANTIHOL: Contraction with W-bar.
        SYMGRAD_HOL: Holomorphic symmetric gradient.
        SYMGRAD_ANTIHOL: Antiholomorphic symmetric gradient.
        TRACE: Metric trace.
        DIVERGENCE: Divergence; it has two homogeneous parts.
        EULER_RADIAL: Lie derivative along the radial field.
        METRIC_MULT: Symmetric product with the metric.
        PUSHFORWARD_LAPLACIAN: Laplacian of the quotient, computed upstairs.
    """

    CONTRACT_HOL = "contract_hol"
    CONTRACT_ANTIHOL = "contract_antihol"
    SYMGRAD_HOL = "symgrad_hol"
    SYMGRAD_ANTIHOL = "symgrad_antihol"
    TRACE = "trace"
    DIVERGENCE = "divergence"
    EULER_RADIAL = "euler_radial"
    METRIC_MULT = "metric_mult"
    PUSHFORWARD_LAPLACIAN = "pushforward_laplacian"

    def targets(self, degree: Multidegree) -> tuple[Multidegree, ...]:
        """Output multidegrees for an input of the given multidegree (two for the divergence)."""
        shifts: dict[OperatorTag, tuple[tuple[int, int, int, int], ...]] = {
            OperatorTag.CONTRACT_HOL: ((1, 0, -1, 0),),
            OperatorTag.CONTRACT_ANTIHOL: ((0, 1, 0, -1),),
            OperatorTag.SYMGRAD_HOL: ((-1, 0, 1, 0),),
            OperatorTag.SYMGRAD_ANTIHOL: ((0, -1, 0, 1),),
            OperatorTag.TRACE: ((0, 0, -1, -1),),
            OperatorTag.DIVERGENCE: ((-1, 0, 0, -1), (0, -1, -1, 0)),
            OperatorTag.EULER_RADIAL: ((0, 0, 0, 0),),
            OperatorTag.METRIC_MULT: ((0, 0, 1, 1),),
            OperatorTag.PUSHFORWARD_LAPLACIAN: ((0, 0, 0, 0),),
        }
        return tuple(degree.shifted(*shift) for shift in shifts[self])

    def target(self, degree: Multidegree) -> Multidegree:
        targets = self.targets(degree)
        if len(targets) != 1:
            raise UsageError(f"{self.value} has {len(targets)} homogeneous parts")
        return targets[0]


@dataclass(frozen=True)
class TensorPoly:
    """A symmetric tensor field with polynomial coefficients and a declared multidegree.

    Attributes:
        body: The polynomial ``T(X, ..., X)``.
        degree: Common multidegree (k, l, p, q) of every term of ``body``.
    """

    body: BiPoly
    degree: Multidegree

    def __post_init__(self) -> None:
        for mono in self.body.terms:
            if mono.degrees() != self.degree:
                raise UsageError(f"Term {mono} does not have multidegree {tuple(self.degree)}")

    @classmethod
    def from_body(cls, body: BiPoly, degree: Multidegree | None = None) -> TensorPoly:
        """Wrap a polynomial, inferring its multidegree when none is given.

        Raises:
            UsageError: If the polynomial is inhomogeneous or the zero polynomial has no declared degree.
        """
        if degree is None:
            if body.is_zero:
                raise UsageError("The zero tensor needs an explicit multidegree")
            found = multidegree(body)
            if found == INHOMOGENEOUS:
                raise UsageError(f"{body} is not multihomogeneous")
            assert isinstance(found, Multidegree)
            degree = found
        return cls(body, degree)

    @classmethod
    def parse(cls, text: str, n: int, degree: Multidegree | None = None) -> TensorPoly:
        return cls.from_body(BiPoly.parse(text, n), degree)

    @classmethod
    def zero(cls, n: int, degree: Multidegree) -> TensorPoly:
        return cls(BiPoly.zero(n), degree)

    @property
    def n(self) -> int:
        return self.body.n

    @property
    def is_zero(self) -> bool:
        return self.body.is_zero

    def __add__(self, other: TensorPoly) -> TensorPoly:
        self._check_compatible(other)
        return TensorPoly(self.body + other.body, self.degree)

    def __sub__(self, other: TensorPoly) -> TensorPoly:
        self._check_compatible(other)
        return TensorPoly(self.body - other.body, self.degree)

    def __neg__(self) -> TensorPoly:
        return TensorPoly(-self.body, self.degree)

    def scale(self, factor: Scalar) -> TensorPoly:
        return TensorPoly(self.body.scale(factor), self.degree)

    __mul__ = scale
    __rmul__ = scale

    def _check_compatible(self, other: TensorPoly) -> None:
        if other.degree != self.degree:
            raise UsageError(f"Cannot combine multidegrees {tuple(self.degree)} and {tuple(other.degree)}")

    def __str__(self) -> str:
        return self.body.render()


class DivergenceParts(NamedTuple):
    """The two homogeneous parts of the divergence."""

    from_z: TensorPoly
    from_zbar: TensorPoly


def special_tensor(kind: SpecialTensor, n: int) -> TensorPoly:
    """Build g, W*, Wb* or r^2 in C^{n+1}."""
    if n < 0:
        raise UsageError(f"Ambient parameter n must be nonnegative, got {n}")
    pairs = {
        SpecialTensor.METRIC: (VarKind.DZ, VarKind.DZBAR, Multidegree(0, 0, 1, 1)),
        SpecialTensor.WSTAR: (VarKind.ZBAR, VarKind.DZ, Multidegree(0, 1, 1, 0)),
        SpecialTensor.WBARSTAR: (VarKind.Z, VarKind.DZBAR, Multidegree(1, 0, 0, 1)),
        SpecialTensor.RSQUARED: (VarKind.Z, VarKind.ZBAR, Multidegree(1, 1, 0, 0)),
    }
    first, second, degree = pairs[kind]
    body = BiPoly(n, {Monomial.of(Var(first, i), Var(second, i)): 1 for i in range(n + 1)})
    return TensorPoly(body, degree)


def _landing(tag: OperatorTag, tensor: TensorPoly, body: BiPoly) -> TensorPoly:
    return TensorPoly(body, tag.target(tensor.degree))


def contract(tensor: TensorPoly, side: Side) -> TensorPoly:
    """Contraction with W (hol) or W-bar (antihol); zero when there is no slot of that type."""
    tag = OperatorTag.CONTRACT_HOL if side is Side.HOL else OperatorTag.CONTRACT_ANTIHOL
    return _landing(tag, tensor, transfer(tensor.body, side.fiber, side.coordinate))


def symgrad(tensor: TensorPoly, side: Side) -> TensorPoly:
    """Holomorphic (or antiholomorphic) half of the symmetrised covariant derivative."""
    tag = OperatorTag.SYMGRAD_HOL if side is Side.HOL else OperatorTag.SYMGRAD_ANTIHOL
    return _landing(tag, tensor, transfer(tensor.body, side.coordinate, side.fiber))


def real_symgrad(tensor: TensorPoly) -> BiPoly:
    """The classical symmetrised derivative, sum of both halves (two fiber types, so a BiPoly)."""
    return symgrad(tensor, Side.HOL).body + symgrad(tensor, Side.ANTIHOL).body


def twisted_symgrad(tensor: TensorPoly) -> BiPoly:
    """Difference of the halves; the complex-structure twist of the derivative is i times this."""
    return symgrad(tensor, Side.HOL).body - symgrad(tensor, Side.ANTIHOL).body


def trace_metric(tensor: TensorPoly) -> TensorPoly:
    """Metric trace with unit normalisation."""
    return _landing(OperatorTag.TRACE, tensor, pair_contraction(tensor.body, VarKind.DZ, VarKind.DZBAR))


def divergence_parts(tensor: TensorPoly) -> DivergenceParts:
    lower_z, lower_zbar = OperatorTag.DIVERGENCE.targets(tensor.degree)
    return DivergenceParts(
        from_z=TensorPoly(pair_contraction(tensor.body, VarKind.Z, VarKind.DZBAR), lower_z),
        from_zbar=TensorPoly(pair_contraction(tensor.body, VarKind.ZBAR, VarKind.DZ), lower_zbar),
    )


def divergence(tensor: TensorPoly) -> BiPoly:
    """Flat divergence ``sum (d/dz_i d/d(dzb_i) + d/dzb_i d/d(dz_i))``.

    The two parts land in different multidegrees, so the result is a plain polynomial; it vanishes
    exactly when both :func:`divergence_parts` vanish.
    """
    parts = divergence_parts(tensor)
    return parts.from_z.body + parts.from_zbar.body


def coefficient_laplacian(tensor: TensorPoly) -> TensorPoly:
    """Componentwise mixed Laplacian of the coefficients."""
    return TensorPoly(mixed_laplacian(tensor.body), tensor.degree.shifted(-1, -1, 0, 0))


def metric_mult(tensor: TensorPoly) -> TensorPoly:
    metric = special_tensor(SpecialTensor.METRIC, tensor.n)
    return _landing(OperatorTag.METRIC_MULT, tensor, metric.body * tensor.body)


def horizontal(tensor: TensorPoly) -> TensorPoly:
    """Horizontal part of a tensor, cleared of denominators.

    Every ``dz_i`` becomes ``r^2 dz_i - z_i W*`` and every ``dzb_i`` becomes ``r^2 dzb_i - zb_i Wb*``, so
    each slot raises both coefficient degrees by one. A multihomogeneous tensor descends to zero on the
    quotient exactly when this image is zero.
    """
    n = tensor.n
    rsquared = special_tensor(SpecialTensor.RSQUARED, n).body
    stars = {
        Side.HOL: special_tensor(SpecialTensor.WSTAR, n).body,
        Side.ANTIHOL: special_tensor(SpecialTensor.WBARSTAR, n).body,
    }
    images = {
        Var(side.fiber, i): rsquared * BiPoly.variable(Var(side.fiber, i), n)
        - BiPoly.variable(Var(side.coordinate, i), n) * stars[side]
        for side in Side
        for i in range(n + 1)
    }
    body = BiPoly.zero(n)
    for mono, coeff in tensor.body:
        coordinates = Monomial.from_exponents((var, exp) for var, exp in mono.powers if var not in images)
        term = BiPoly.from_monomial(coordinates, n, coeff)
        for var, exp in mono.powers:
            for _ in range(exp if var in images else 0):
                term = term * images[var]
        body = body + term
    slots = tensor.degree.p + tensor.degree.q
    return TensorPoly(body, tensor.degree.shifted(slots, slots, 0, 0))


def euler_radial(tensor: TensorPoly, check: bool | None = None) -> TensorPoly:
    """Radial Lie derivative, acting on a multihomogeneous tensor as its total degree.

    Args:
        tensor: Input tensor.
        check: Also apply the full Euler operator and compare; defaults to the runtime setting.

    Raises:
        VerificationError: If the checked Euler operator disagrees with the scalar action.
    """
    total = sum(tensor.degree)
    result = tensor.scale(total)
    if check if check is not None else get_config().check_euler:
        direct = euler_operator(tensor.body)
        if direct != result.body:
            raise VerificationError(
                "Euler operator disagrees with the degree scalar",
                expected=result.body.render(),
                computed=direct.render(),
                witness=tensor.body.render(),
            )
    return result


def twist_scalar(p: int, q: int) -> Fraction:
    """Scalar by which the complex-structure twist acts on pure type (p, q) symmetric tensors."""
    if p < 0 or q < 0:
        raise UsageError(f"Tensor type must be nonnegative, got ({p}, {q})")
    return Fraction((p + q) - (p - q) ** 2, 2)


def is_circle_invariant(tensor: TensorPoly) -> bool:
    """True when the tensor is invariant under the Hopf circle action, i.e. k + p = l + q."""
    k, l, p, q = tensor.degree  # noqa: E741
    return k + p == l + q


def laplacian_correction(tensor: TensorPoly) -> TensorPoly:
    """Correction term relating the flat Laplacian upstairs to the Laplacian of the quotient."""
    n = tensor.n
    _, _, p, q = tensor.degree
    slots = p + q
    euler = sum(tensor.degree)
    scalar = 2 * slots * (1 - slots) + 2 * (slots - n) * euler - euler * euler + 4 * twist_scalar(p, q)
    correction = tensor.scale(scalar)
    correction = correction - symgrad(contract(tensor, Side.ANTIHOL), Side.ANTIHOL).scale(4)
    correction = correction - symgrad(contract(tensor, Side.HOL), Side.HOL).scale(4)
    trace = trace_metric(tensor)
    if not trace.is_zero:
        correction = correction + metric_mult(trace).scale(2)
    return correction


def pushforward_laplacian(tensor: TensorPoly) -> TensorPoly:
    """Laplacian of the quotient tensor, computed upstairs as ``flat(T) - correction(T)``.

    The flat term lowers the coefficient bidegree by (1, 1); it is multiplied back by r^2, which is
    1 on the unit sphere, so the result keeps the multidegree of the input. On harmonic inputs the
    flat term vanishes.

    Raises:
        UsageError: If the tensor is not circle invariant.
    """
    if not is_circle_invariant(tensor):
        raise UsageError(f"Multidegree {tuple(tensor.degree)} is not circle invariant (k+p != l+q)")
    result = laplacian_correction(tensor).scale(-1)
    flat = coefficient_laplacian(tensor)
    if not flat.is_zero:
        radius = special_tensor(SpecialTensor.RSQUARED, tensor.n)
        result = result + TensorPoly(radius.body * flat.body, tensor.degree).scale(FLAT_LAPLACIAN_FACTOR)
    return result


LinearTensorMap = Callable[[TensorPoly], TensorPoly]


def compose(*maps: LinearTensorMap) -> LinearTensorMap:
    """Right-to-left composition, ``compose(f, g)(T) == f(g(T))``."""

    def composed(tensor: TensorPoly) -> TensorPoly:
        for linear_map in reversed(maps):
            tensor = linear_map(tensor)
        return tensor

    return composed


def power(linear_map: LinearTensorMap, exponent: int) -> LinearTensorMap:
    return compose(*([linear_map] * exponent))
