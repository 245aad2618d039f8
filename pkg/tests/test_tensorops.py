from __future__ import annotations

from fractions import Fraction

import pytest
from hypothesis import given, settings

from cpn_spectra.config import RuntimeConfig
from cpn_spectra.errors import UsageError
from cpn_spectra.polyring import BiPoly, Multidegree
from cpn_spectra.tensorops import (
    OperatorTag,
    Side,
    SpecialTensor,
    TensorPoly,
    compose,
    contract,
    divergence,
    divergence_parts,
    euler_radial,
    horizontal,
    is_circle_invariant,
    metric_mult,
    power,
    pushforward_laplacian,
    real_symgrad,
    special_tensor,
    symgrad,
    trace_metric,
    twist_scalar,
    twisted_symgrad,
)
from tests.strategies import tensors


def tensor(text: str, n: int = 1) -> TensorPoly:
    return TensorPoly.parse(text, n)


class TestQuotientLaplacian:
    def test_harmonic_function_on_the_line(self) -> None:
        t = tensor("z0*zb1")
        assert pushforward_laplacian(t) == t.scale(8)

    def test_constant_hermitian_tensor(self) -> None:
        t = tensor("dz0*dzb1", n=2)
        assert pushforward_laplacian(t) == t.scale(12)

    def test_traceless_diagonal_tensor(self) -> None:
        t = tensor("dz0*dzb0 - dz1*dzb1", n=2)
        assert trace_metric(t).is_zero
        assert pushforward_laplacian(t) == t.scale(12)

    def test_constant_function_is_harmonic(self) -> None:
        t = tensor("1", n=2)
        assert pushforward_laplacian(t).is_zero

    def test_rejects_non_invariant_tensor(self) -> None:
        with pytest.raises(UsageError):
            pushforward_laplacian(tensor("z0*dz1"))


def test_contract_symgrad_commutator_example() -> None:
    t = tensor("z0^2*dz1")
    lhs = contract(symgrad(t, Side.HOL), Side.HOL) - symgrad(contract(t, Side.HOL), Side.HOL)
    assert lhs == t


@settings(max_examples=40, deadline=None)
@given(tensors())
def test_contract_symgrad_commutator(t: TensorPoly) -> None:
    for side in Side:
        slots, degree = (t.degree.p, t.degree.k) if side is Side.HOL else (t.degree.q, t.degree.l)
        bracket = contract(symgrad(t, side), side) - symgrad(contract(t, side), side)
        assert bracket == t.scale(degree - slots)


@settings(max_examples=40, deadline=None)
@given(tensors())
def test_opposite_sides_commute(t: TensorPoly) -> None:
    assert contract(symgrad(t, Side.ANTIHOL), Side.HOL) == symgrad(contract(t, Side.HOL), Side.ANTIHOL)
    assert symgrad(symgrad(t, Side.HOL), Side.ANTIHOL) == symgrad(symgrad(t, Side.ANTIHOL), Side.HOL)


@settings(max_examples=40, deadline=None)
@given(tensors())
def test_euler_radial_matches_full_operator(t: TensorPoly) -> None:
    assert euler_radial(t, check=True) == t.scale(sum(t.degree))


def test_euler_radial_uses_configured_check(euler_checked: RuntimeConfig) -> None:
    assert euler_checked.check_euler
    t = tensor("z0*zb1*dz0*dzb1")
    assert euler_radial(t) == t.scale(4)


def test_special_tensors() -> None:
    metric = special_tensor(SpecialTensor.METRIC, 1)
    assert metric.body == BiPoly.parse("dz0*dzb0 + dz1*dzb1", 1)
    assert metric.degree == Multidegree(0, 0, 1, 1)
    assert special_tensor(SpecialTensor.WSTAR, 1).degree == Multidegree(0, 1, 1, 0)
    assert special_tensor(SpecialTensor.RSQUARED, 2).body == BiPoly.parse("z0*zb0 + z1*zb1 + z2*zb2", 2)


def test_metric_trace_and_product() -> None:
    metric = special_tensor(SpecialTensor.METRIC, 2)
    assert trace_metric(metric) == TensorPoly(BiPoly.constant(2, 3), Multidegree(0, 0, 0, 0))
    assert metric_mult(tensor("1", n=2)) == metric


def test_metric_is_divergence_free() -> None:
    parts = divergence_parts(special_tensor(SpecialTensor.METRIC, 1))
    assert parts.from_z.is_zero
    assert parts.from_zbar.is_zero


def test_divergence_parts_land_in_their_degrees() -> None:
    t = tensor("z0*zb1*dz1*dzb0")
    parts = divergence_parts(t)
    assert parts.from_z == tensor("zb1*dz1")
    assert parts.from_zbar == tensor("z0*dzb0")
    assert divergence(t) == BiPoly.parse("zb1*dz1 + z0*dzb0", 1)


def test_radial_contractions() -> None:
    w_star = special_tensor(SpecialTensor.WSTAR, 1)
    assert contract(w_star, Side.HOL) == special_tensor(SpecialTensor.RSQUARED, 1)
    assert contract(w_star, Side.ANTIHOL).is_zero


def test_horizontal_part_on_the_line() -> None:
    assert horizontal(special_tensor(SpecialTensor.WSTAR, 1)).is_zero
    assert horizontal(tensor("z0*zb1")) == tensor("z0*zb1")
    omega = BiPoly.parse("z1*dz0 - z0*dz1", 1) * BiPoly.parse("zb1*dzb0 - zb0*dzb1", 1)
    rsquared = special_tensor(SpecialTensor.RSQUARED, 1).body
    assert horizontal(special_tensor(SpecialTensor.METRIC, 1)).body == rsquared * omega
    assert horizontal(tensor("dz0*dzb1")).degree == Multidegree(2, 2, 1, 1)


@settings(max_examples=30, deadline=None)
@given(tensors())
def test_horizontal_part_is_killed_by_the_radial_fields(t: TensorPoly) -> None:
    image = horizontal(t)
    assert contract(image, Side.HOL).is_zero
    assert contract(image, Side.ANTIHOL).is_zero


def test_classical_symmetrized_derivative() -> None:
    f = tensor("z0*zb0")
    assert real_symgrad(f) == BiPoly.parse("zb0*dz0 + z0*dzb0", 1)
    assert twisted_symgrad(f) == BiPoly.parse("zb0*dz0 - z0*dzb0", 1)


def test_operator_targets() -> None:
    degree = Multidegree(1, 2, 3, 4)
    assert OperatorTag.CONTRACT_HOL.target(degree) == Multidegree(2, 2, 2, 4)
    assert OperatorTag.SYMGRAD_ANTIHOL.target(degree) == Multidegree(1, 1, 3, 5)
    assert OperatorTag.DIVERGENCE.targets(degree) == (Multidegree(0, 2, 3, 3), Multidegree(1, 1, 2, 4))
    with pytest.raises(UsageError):
        OperatorTag.DIVERGENCE.target(degree)


def test_contraction_without_slots_is_zero() -> None:
    f = tensor("z0*zb1")
    result = contract(f, Side.HOL)
    assert result.is_zero
    assert result.degree.is_void


@pytest.mark.parametrize(("p", "q", "expected"), [(0, 0, 0), (1, 1, 1), (2, 0, -1), (0, 1, Fraction(0))])
def test_twist_scalar(p: int, q: int, expected: Fraction) -> None:
    assert twist_scalar(p, q) == expected


def test_circle_invariance() -> None:
    assert is_circle_invariant(tensor("z0*dzb1"))
    assert not is_circle_invariant(tensor("z0*dz1"))


def test_tensor_construction_errors() -> None:
    with pytest.raises(UsageError):
        tensor("z0 + zb0")
    with pytest.raises(UsageError):
        TensorPoly.from_body(BiPoly.zero(1))
    with pytest.raises(UsageError):
        TensorPoly(BiPoly.parse("z0", 1), Multidegree(0, 1, 0, 0))
    with pytest.raises(UsageError):
        tensor("z0") + tensor("zb0")


def test_compose_runs_right_to_left() -> None:
    t = tensor("z0*dz1")
    hol_contract = lambda x: contract(x, Side.HOL)  # noqa: E731
    antihol_grad = lambda x: symgrad(x, Side.ANTIHOL)  # noqa: E731
    assert compose(antihol_grad, hol_contract)(t) == antihol_grad(hol_contract(t))
    assert power(hol_contract, 0)(t) == t
    assert power(hol_contract, 2)(t) == hol_contract(hol_contract(t))
