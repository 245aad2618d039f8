from __future__ import annotations

from math import comb

import pytest

from cpn_spectra.errors import UsageError, VerificationError
from cpn_spectra.spaces import SpaceQuery
from cpn_spectra.spectra import (
    PieceFamily,
    PieceLabel,
    SpectralPiece,
    SpectrumQuery,
    SpectrumReport,
    build_spectrum,
    compute_spectrum,
    core_eigenvalue,
    enumerate_pieces,
    family_bounds,
    piece_eigenvalue,
    piece_family,
    piece_labels,
    piece_multiplicity,
    quotient_dimensions,
    scan_limit,
)


class TestEigenvalues:
    @pytest.mark.parametrize("n", [1, 2, 5])
    def test_one_forms(self, n: int) -> None:
        assert core_eigenvalue(n, 0, 1, 1, 0, 0, 0) == 4 * (n + 1)

    @pytest.mark.parametrize(("n", "k"), [(1, 1), (2, 3), (4, 2)])
    def test_functions(self, n: int, k: int) -> None:
        assert core_eigenvalue(n, 0, 0, k, k, 0, 0) == 4 * k * (n + k)

    @pytest.mark.parametrize("m", [0, 1, 4])
    def test_symmetric_two_tensor_row(self, m: int) -> None:
        assert core_eigenvalue(2, 0, 2, m + 4, m + 2, 0, 0) == 4 * (m * m + 8 * m + 18)

    def test_constant_hermitian_tensors(self) -> None:
        assert piece_eigenvalue(2, 1, 0, 0, 0, 0, 0) == 12

    def test_rejects_non_invariant_core(self) -> None:
        with pytest.raises(UsageError):
            core_eigenvalue(2, 1, 0, 0, 0, 0, 0)

    @pytest.mark.parametrize("n", [1, 2, 3])
    @pytest.mark.parametrize(("p", "l"), [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0), (2, 2)])
    def test_piece_formula_matches_core_formula(self, n: int, p: int, l: int) -> None:  # noqa: E741
        for m in range(p + 1):
            for k in range(4):
                family = piece_family(p, l, m, k)
                r_max, s_max = family_bounds(family, p, l, m, k)
                for r in range(r_max + 1):
                    for s in range(s_max + 1):
                        core = PieceLabel(n, p, l, m, k, r, s, family).core
                        expected = core_eigenvalue(n, core.p, core.q, core.k, core.l, r, s)
                        assert piece_eigenvalue(n, p, l, m, k, r, s) == expected


class TestFamilies:
    def test_family_regions(self) -> None:
        assert piece_family(2, 0, 0, 1) is PieceFamily.CONTRACTED
        assert piece_family(2, 1, 0, 2) is PieceFamily.MIXED
        assert piece_family(1, 0, 0, 1) is PieceFamily.GRADIENT

    def test_bounds(self) -> None:
        assert family_bounds(PieceFamily.CONTRACTED, 2, 0, 0, 1) == (1, 1)
        assert family_bounds(PieceFamily.MIXED, 2, 1, 0, 2) == (2, 2)
        assert family_bounds(PieceFamily.GRADIENT, 1, 0, 0, 1) == (1, 1)

    def test_label_geometry(self) -> None:
        label = PieceLabel(2, 1, 0, 1, 1, 0, 0, PieceFamily.GRADIENT)
        assert label.core == SpaceQuery(2, 0, 0, 1, 1)
        assert label.primitive == SpaceQuery(2, 0, 0, 1, 1)
        assert label.eigenvalue == 12
        assert piece_multiplicity(label) == 8


class TestSpectrum:
    def test_line_spectrum(self) -> None:
        report = compute_spectrum(SpectrumQuery(1, 0, 0, 24))
        assert report.pairs == [(0, 1), (8, 3), (24, 5)]

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_scalar_spectrum_is_classical(self, n: int) -> None:
        k_max = 4
        report = compute_spectrum(SpectrumQuery(n, 0, 0, 4 * k_max * (n + k_max)))
        expected = [(0, 1)] + [
            (4 * k * (n + k), comb(n + k, k) ** 2 - comb(n + k - 1, k - 1) ** 2) for k in range(1, k_max + 1)
        ]
        assert report.pairs == expected

    def test_hermitian_block_merges_lines(self) -> None:
        report = compute_spectrum(SpectrumQuery(2, 1, 1, 12))
        assert report.pairs == [(0, 1), (12, 16)]
        merged = report.lines[-1]
        assert sorted(piece.multiplicity for piece in merged.pieces) == [8, 8]
        assert report.discrepancies == ()

    def test_conjugate_block(self) -> None:
        direct = compute_spectrum(SpectrumQuery(2, 0, 1, 40))
        conjugate = compute_spectrum(SpectrumQuery(2, 1, 0, 40))
        assert conjugate.conjugated and not direct.conjugated
        assert conjugate.pairs == direct.pairs
        assert direct.pairs[0] == (12, 8)

    def test_worker_count_does_not_change_the_report(self) -> None:
        query = SpectrumQuery(2, 1, 1, 60)
        assert compute_spectrum(query, workers=2) == compute_spectrum(query, workers=1)

    def test_json_round_trip(self) -> None:
        report = compute_spectrum(SpectrumQuery(2, 1, 1, 32))
        assert SpectrumReport.from_dict(report.to_dict()) == report

    def test_empty_report(self) -> None:
        report = build_spectrum([], SpectrumQuery(2, 0, 0, 10))
        assert report.to_dict() == {"query": {"n": 2, "p": 0, "q": 0, "max_eig": 10}, "lines": [], "discrepancies": []}

    def test_virtual_pieces_are_reported(self) -> None:
        constant = PieceLabel(1, 1, 0, 0, 0, 0, 0, PieceFamily.CONTRACTED)
        gradient = PieceLabel(1, 1, 0, 0, 1, 0, 0, PieceFamily.GRADIENT)
        functions = PieceLabel(1, 1, 0, 1, 1, 0, 0, PieceFamily.GRADIENT)
        pieces = [SpectralPiece(constant, 8, 0, 3), SpectralPiece(gradient, 8, 0, -3), SpectralPiece(functions, 8, 3)]
        report = build_spectrum(pieces, SpectrumQuery(1, 1, 1, 8))
        assert report.pairs == [(8, 3)]
        assert [piece.label for piece in report.lines[0].pieces] == [functions]
        assert [(item.kind, item.printed, item.computed) for item in report.discrepancies] == [
            ("virtual-dimension", "3", "0"),
            ("virtual-dimension", "-3", "0"),
        ]

    def test_cancelling_pieces_drop_the_line(self) -> None:
        label = PieceLabel(1, 1, 0, 0, 0, 0, 0, PieceFamily.CONTRACTED)
        other = PieceLabel(1, 1, 0, 1, 1, 0, 0, PieceFamily.GRADIENT)
        pieces = [SpectralPiece(label, 8, 0, -2), SpectralPiece(other, 8, 0, 2)]
        report = build_spectrum(pieces, SpectrumQuery(1, 1, 1, 8))
        assert report.lines == ()
        assert "virtual-total" not in {item.kind for item in report.discrepancies}

    def test_unbalanced_signed_total_is_reported(self) -> None:
        label = PieceLabel(1, 1, 0, 0, 0, 0, 0, PieceFamily.CONTRACTED)
        report = build_spectrum([SpectralPiece(label, 8, 2, 1)], SpectrumQuery(1, 1, 1, 8))
        assert report.pairs == [(8, 2)]
        assert [item.kind for item in report.discrepancies] == ["virtual-dimension", "virtual-total"]

    def test_negative_signed_total_fails(self) -> None:
        label = PieceLabel(1, 1, 0, 0, 0, 0, 0, PieceFamily.CONTRACTED)
        with pytest.raises(VerificationError):
            build_spectrum([SpectralPiece(label, 8, 0, -1)], SpectrumQuery(1, 1, 1, 8))

    def test_pieces_are_never_negative(self) -> None:
        label = PieceLabel(1, 1, 0, 0, 0, 0, 0, PieceFamily.CONTRACTED)
        with pytest.raises(VerificationError):
            SpectralPiece(label, 8, -1)

    def test_virtual_dimension_round_trips(self) -> None:
        report = compute_spectrum(SpectrumQuery(1, 1, 1, 24))
        assert SpectrumReport.from_dict(report.to_dict()) == report


class TestDegenerations:
    def test_curve_hermitian_block_is_the_scalar_spectrum(self) -> None:
        report = compute_spectrum(SpectrumQuery(1, 1, 1, 24))
        assert report.pairs == [(0, 1), (8, 3), (24, 5)]
        for line in report.lines:
            assert [(piece.label.m, piece.multiplicity) for piece in line.pieces] == [(1, line.multiplicity)]
        kinds = {item.kind for item in report.discrepancies}
        assert "virtual-dimension" in kinds
        assert "virtual-total" not in kinds

    @pytest.mark.parametrize(("p", "l"), [(0, 0), (0, 1), (1, 0), (1, 1), (2, 0)])
    def test_curve_pieces_are_real(self, p: int, l: int) -> None:  # noqa: E741
        pieces = enumerate_pieces(1, p, l, 40)
        assert all(piece.multiplicity > 0 for piece in pieces)
        report = compute_spectrum(SpectrumQuery(1, p, p + l, 40))
        for line in report.lines:
            assert sum(piece.multiplicity for piece in line.pieces) == line.multiplicity

    def test_coinciding_images_are_credited_once(self) -> None:
        constant = PieceLabel(1, 1, 0, 0, 0, 0, 0, PieceFamily.CONTRACTED)
        functions = PieceLabel(1, 1, 0, 1, 1, 0, 0, PieceFamily.GRADIENT)
        assert constant.eigenvalue == functions.eigenvalue == 8
        assert piece_multiplicity(constant) == 3
        assert quotient_dimensions([constant]) == [3]
        assert quotient_dimensions([constant, functions]) == [0, 3]

    def test_plane_images_are_independent(self) -> None:
        pieces = [piece for piece in enumerate_pieces(2, 1, 0, 12) if piece.eigenvalue == 12]
        assert quotient_dimensions([piece.label for piece in pieces]) == [piece.multiplicity for piece in pieces]

    @pytest.mark.parametrize(("p", "l"), [(p, l) for p in range(3) for l in range(2)])  # noqa: E741
    def test_plane_pieces_sit_on_the_family_boundary(self, p: int, l: int) -> None:  # noqa: E741
        pieces = enumerate_pieces(2, p, l, 80)
        assert pieces
        for piece in pieces:
            label = piece.label
            r_max, s_max = family_bounds(label.family, p, l, label.m, label.k)
            assert label.r == r_max or label.s == s_max
            assert not piece.is_virtual


class TestEnumeration:
    @pytest.mark.parametrize(("n", "p", "max_eig"), [(1, 0, 24), (2, 1, 12), (3, 2, 100), (2, 0, 0)])
    def test_scan_limit_is_tight(self, n: int, p: int, max_eig: int) -> None:
        limit = scan_limit(n, p, max_eig)
        assert limit >= p
        assert 4 * limit * (limit + n - p) > max_eig
        if limit > p:
            assert 4 * (limit - 1) * (limit - 1 + n - p) <= max_eig

    def test_labels_are_sorted_and_bounded(self) -> None:
        labels = piece_labels(2, 1, 1, 80)
        eigenvalues = [label.eigenvalue for label in labels]
        assert eigenvalues == sorted(eigenvalues)
        assert all(value <= 80 for value in eigenvalues)

    @pytest.mark.parametrize(("n", "p", "l", "max_eig"), [(0, 0, 0, 10), (2, -1, 0, 10), (2, 0, 0, -1)])
    def test_rejects_bad_arguments(self, n: int, p: int, l: int, max_eig: int) -> None:  # noqa: E741
        with pytest.raises(UsageError):
            piece_labels(n, p, l, max_eig)
