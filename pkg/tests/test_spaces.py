from __future__ import annotations

from fractions import Fraction
from math import comb

import pytest

from cpn_spectra.config import configured
from cpn_spectra.errors import ResourceError, UsageError
from cpn_spectra.linalg import SubspaceOp, subspace_ops
from cpn_spectra.spaces import (
    DimensionRoute,
    PrimitiveCase,
    SpaceQuery,
    closed_form_primitive_dim,
    decompose_traceless,
    dim_harmonic,
    dim_polynomial,
    dim_primitive,
    dim_traceless,
    expanded_route,
    harmonic_space,
    kernel_projector,
    piece_source,
    polynomial_space,
    primitive_dim_routes,
    primitive_space,
    radial_complement,
    traceless_route,
    traceless_space,
)
from cpn_spectra.tensorops import Side, TensorPoly


class TestClosedForms:
    def test_polynomial_dimension(self) -> None:
        assert dim_polynomial(SpaceQuery(2, 1, 1, 1, 1)) == 81
        assert dim_polynomial(SpaceQuery(2, -1, 1, 1, 1)) == 0

    @pytest.mark.parametrize(("n", "k"), [(1, 1), (1, 3), (2, 2), (3, 1)])
    def test_harmonic_functions(self, n: int, k: int) -> None:
        expected = comb(n + k, k) ** 2 - comb(n + k - 1, k - 1) ** 2
        assert dim_harmonic(SpaceQuery(n, 0, 0, k, k)) == expected

    def test_traceless_examples(self) -> None:
        assert dim_traceless(SpaceQuery(1, 0, 0, 1, 1)) == 3
        assert dim_traceless(SpaceQuery(2, 1, 1, 0, 0)) == 8

    @pytest.mark.parametrize(
        ("query", "expected"),
        [
            (SpaceQuery(2, 0, 0, 0, 0), 1),
            (SpaceQuery(2, 1, 1, 0, 0), 8),
            (SpaceQuery(2, 0, 1, 0, 1), 3),
            (SpaceQuery(1, 1, 0, 1, 0), 1),
            (SpaceQuery(3, 2, 1, 0, 0), 36),
        ],
    )
    def test_primitive_dimension(self, query: SpaceQuery, expected: int) -> None:
        assert dim_primitive(query) == expected

    def test_printed_form_carries_half(self) -> None:
        query = SpaceQuery(2, 0, 1, 0, 1)
        assert closed_form_primitive_dim(query) == 3
        assert closed_form_primitive_dim(query, printed=True) == Fraction(3, 2)

    def test_closed_form_outside_its_range(self) -> None:
        assert closed_form_primitive_dim(SpaceQuery(1, 2, 2, 1, 2)) is None

    @pytest.mark.parametrize("query", [SpaceQuery(n, p, q, k, l) for n in (2, 3) for p, q, k, l in [
        (2, 2, 1, 1), (3, 1, 2, 0), (2, 3, 0, 2), (3, 3, 2, 2), (1, 2, 1, 1),
    ]])  # fmt: skip
    def test_routes_agree(self, query: SpaceQuery) -> None:
        routes = primitive_dim_routes(query)
        assert routes[DimensionRoute.TRACELESS] == routes[DimensionRoute.EXPANDED]
        assert routes[DimensionRoute.CLOSED_FORM] in (None, routes[DimensionRoute.TRACELESS])
        assert traceless_route(query) == expanded_route(query)

    def test_reflected_cases_share_dimensions(self) -> None:
        query = SpaceQuery(2, 0, 1, 1, 0)
        case = PrimitiveCase.for_query(query)
        assert case is PrimitiveCase.CONTRACT_SYMGRAD
        assert case.reflect(query) == SpaceQuery(2, 1, 1, 0, 0)
        assert dim_primitive(query) == 8

    def test_errors(self) -> None:
        with pytest.raises(UsageError):
            dim_primitive(SpaceQuery(0, 0, 0, 0, 0))
        with pytest.raises(UsageError):
            dim_primitive(SpaceQuery(2, 0, 1, 1, 0), PrimitiveCase.SYMGRAD_SYMGRAD)
        with pytest.raises(UsageError):
            traceless_route(SpaceQuery(2, 0, 0, 1, 0))
        assert dim_primitive(SpaceQuery(2, -1, 0, 0, 0)) == 0


class TestPrimitiveCase:
    def test_boundary_allows_both(self) -> None:
        query = SpaceQuery(2, 1, 1, 1, 1)
        assert PrimitiveCase.for_query(query) is PrimitiveCase.SYMGRAD_SYMGRAD
        assert all(case.consistent_with(query) for case in PrimitiveCase)

    def test_contracting_sides(self) -> None:
        assert PrimitiveCase.SYMGRAD_CONTRACT.contracts(Side.ANTIHOL)
        assert not PrimitiveCase.SYMGRAD_CONTRACT.contracts(Side.HOL)
        assert PrimitiveCase.from_sides(True, True) is PrimitiveCase.CONTRACT_CONTRACT


class TestKernels:
    @pytest.mark.parametrize(
        "query",
        [SpaceQuery(1, 0, 0, 1, 1), SpaceQuery(2, 1, 1, 0, 0), SpaceQuery(2, 1, 0, 0, 1), SpaceQuery(2, 0, 1, 0, 1)],
    )
    def test_brute_force_matches_closed_forms(self, query: SpaceQuery) -> None:
        assert polynomial_space(query).dim == dim_polynomial(query)
        assert harmonic_space(query).dim == dim_harmonic(query)
        assert traceless_space(query).dim == dim_traceless(query)
        case = PrimitiveCase.for_query(query)
        assert primitive_space(query, case).dim == dim_primitive(query, case)

    @pytest.mark.parametrize(
        ("query", "case", "expected"),
        [
            (SpaceQuery(2, 0, 1, 1, 0), PrimitiveCase.CONTRACT_SYMGRAD, 8),
            (SpaceQuery(2, 0, 0, 1, 1), PrimitiveCase.CONTRACT_CONTRACT, 8),
            (SpaceQuery(2, 1, 0, 0, 1), PrimitiveCase.SYMGRAD_CONTRACT, 8),
            (SpaceQuery(3, 0, 1, 1, 0), PrimitiveCase.CONTRACT_SYMGRAD, 15),
        ],
    )
    def test_contraction_kernels_match_closed_forms(
        self, query: SpaceQuery, case: PrimitiveCase, expected: int
    ) -> None:
        assert dim_primitive(query, case) == expected
        assert primitive_space(query, case).dim == expected

    def test_traceless_constants(self) -> None:
        space = traceless_space(SpaceQuery(2, 1, 1, 0, 0))
        assert space.contains_tensor(TensorPoly.parse("dz0*dzb0 - dz2*dzb2", 2))
        assert not space.contains_tensor(TensorPoly.parse("dz0*dzb0", 2))

    def test_harmonic_split_fills_polynomials(self) -> None:
        query = SpaceQuery(2, 1, 0, 1, 1)
        harmonic, complement = harmonic_space(query), radial_complement(query)
        assert harmonic.dim + complement.dim == dim_polynomial(query)
        assert subspace_ops(harmonic, complement, SubspaceOp.RANK) == dim_polynomial(query)

    def test_inconsistent_case(self) -> None:
        with pytest.raises(UsageError):
            primitive_space(SpaceQuery(2, 0, 0, 1, 1), PrimitiveCase.SYMGRAD_SYMGRAD)

    def test_column_cap(self) -> None:
        with configured(max_columns=5), pytest.raises(ResourceError):
            polynomial_space(SpaceQuery(2, 2, 2, 2, 2))

    def test_column_cap_applies_to_cached_spaces(self) -> None:
        query = SpaceQuery(1, 1, 1, 1, 1)
        assert traceless_space(query).ambient.dimension == 16
        with configured(max_columns=10), pytest.raises(ResourceError):
            traceless_space(query)


class TestProjector:
    def test_coefficients(self) -> None:
        projector = kernel_projector(SpaceQuery(2, 2, 0, 1, 0), Side.HOL)
        assert projector.coefficients == (Fraction(1), Fraction(-1, 3))

    def test_is_idempotent_onto_the_gradient_kernel(self) -> None:
        query = SpaceQuery(2, 1, 1, 1, 0)
        projector = kernel_projector(query, Side.HOL)
        for tensor in traceless_space(query).tensors():
            image = projector(tensor)
            assert projector(image) == image

    def test_undefined_above_the_slot_count(self) -> None:
        with pytest.raises(UsageError):
            kernel_projector(SpaceQuery(2, 0, 0, 1, 1), Side.HOL)

    def test_rejects_other_degrees(self) -> None:
        projector = kernel_projector(SpaceQuery(2, 1, 1, 0, 0), Side.HOL)
        with pytest.raises(UsageError):
            projector(TensorPoly.parse("dz0", 2))


class TestDecomposition:
    @pytest.mark.parametrize("query", [SpaceQuery(2, 1, 1, 0, 0), SpaceQuery(2, 1, 1, 1, 1), SpaceQuery(2, 0, 1, 1, 0)])
    def test_pieces_fill_the_traceless_space(self, query: SpaceQuery) -> None:
        pieces = decompose_traceless(query)
        assert sum(space.dim for _, space in pieces) == traceless_space(query).dim

    def test_piece_labels(self) -> None:
        query = SpaceQuery(2, 1, 1, 1, 1)
        labels = [label for label, _ in decompose_traceless(query)]
        assert [(label.r, label.s) for label in labels] == [(0, 0), (0, 1), (1, 0), (1, 1)]
        assert labels[-1].source == SpaceQuery(2, 2, 2, 0, 0)

    def test_piece_source_range(self) -> None:
        with pytest.raises(UsageError):
            piece_source(SpaceQuery(2, 1, 1, 1, 1), PrimitiveCase.SYMGRAD_SYMGRAD, 2, 0)

    def test_void_query_has_no_pieces(self) -> None:
        assert decompose_traceless(SpaceQuery(2, -1, 0, 0, 0)) == []
