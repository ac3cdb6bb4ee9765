"""Tests for subspaces, chordal distances, principal angles and the orthoplex bound."""
from fractions import Fraction

import numpy as np
import pytest

from src.app.core.domain.exact import Dyadic, RationalMatrix, ScaledIntMatrix
from src.app.core.domain.grassmann import (
    Packing,
    bound_applicability,
    check_spectrum,
    coordinate_subspace,
    distance_table,
    float_cosines,
    frobenius_squared_distance,
    orthogonal_complement,
    principal_angles,
    rankin_bound,
    squared_distance,
)
from src.shared.exceptions import (
    DimensionMismatchError,
    DuplicateSubspaceError,
    HypothesisRejectedError,
    RankDeficientError,
)
from tests.factories import packing, subspace


class TestSubspace:
    """Tests for subspace construction and projectors."""

    def test_coordinate_subspace_projector(self):
        """Test that (I 0) in R^4 has projector diag(1, 1, 0, 0)."""
        p = coordinate_subspace(4, 2)

        assert p.projector == RationalMatrix(np.diag([1, 1, 0, 0]))
        assert (p.ambient_dim, p.dim) == (4, 2)

    def test_projector_of_diagonal_line(self):
        """Test that the line through (1, 1) has projector J/2."""
        p = subspace([[1, 1]])

        assert p.projector.to_fractions() == [[Fraction(1, 2)] * 2] * 2

    def test_projector_is_symmetric_idempotent_with_trace_n(self):
        """Test the projector identities on a non-coordinate plane."""
        p = subspace([[1, 0, 1, 0], [0, 1, 0, -1]])
        projector = p.projector

        assert projector.is_symmetric()
        assert projector @ projector == projector
        assert projector.trace() == 2

    def test_same_row_space_gives_equal_subspaces(self):
        """Test that equality goes through the projector, not the generator."""
        first = subspace([[1, 1, 0, 0], [0, 0, 1, 1]])
        second = subspace([[1, 1, 1, 1], [1, 1, -1, -1]])

        assert first == second
        assert hash(first) == hash(second)

    def test_sqrt2_scale_does_not_change_subspace(self):
        """Test that (1 1)/√2 and (1 1) span the same line."""
        assert subspace([[1, 1]], 1) == subspace([[1, 1]])

    def test_non_orthogonal_rows_use_general_projector(self):
        """Test that a non-orthogonal generator still gives the exact projector."""
        p = subspace([[1, 0, 0, 0], [1, 1, 0, 0]])

        assert p == coordinate_subspace(4, 2)

    def test_rank_deficient_generator(self):
        """Test that dependent rows raise RankDeficientError."""
        with pytest.raises(RankDeficientError):
            subspace([[1, 1, 0, 0], [2, 2, 0, 0]])

    def test_orthogonal_complement_projector_sums_to_identity(self):
        """Test that Π_P + Π_P⊥ = I and the complement generator is primitive."""
        # Arrange
        p = subspace([[1, 0, 0, 1], [0, 1, 1, 0]])

        # Act
        complement = orthogonal_complement(p)

        # Assert
        assert p.projector + complement.projector == RationalMatrix.identity(4)
        assert complement.dim == 2
        assert complement.generator.integer_rows() == [[0, 1, -1, 0], [1, 0, 0, -1]]


class TestDistances:
    """Tests for exact chordal distances."""

    def test_coordinate_halves_are_at_distance_n(self):
        """Test that (I 0) and (0 I) in R^4 have d² = 2."""
        first = coordinate_subspace(4, 2)
        second = subspace([[0, 0, 1, 0], [0, 0, 0, 1]])

        assert squared_distance(first, second) == 2

    def test_union_jack_distances(self):
        """Test that the 4 lines of C_1 have d² ∈ {1/2, 1}."""
        lines = packing([[1, 0]], [[0, 1]], [[1, 1]], [[1, -1]])

        histogram = lines.pair_stats

        assert histogram == {Dyadic(1, 1): 4, Dyadic(1): 2}

    def test_trace_and_frobenius_forms_agree(self):
        """Test the two exact distance formulas on a generic pair."""
        p = subspace([[1, 0, 1, 0], [0, 1, 0, 1]])
        q = subspace([[1, 1, 0, 0], [0, 0, 1, -1]])

        assert squared_distance(p, q) == frobenius_squared_distance(p, q)

    def test_distance_is_symmetric_and_zero_on_diagonal(self):
        """Test d²(P, Q) = d²(Q, P) and d²(P, P) = 0."""
        p = subspace([[1, 1, 0, 0], [0, 0, 1, 1]])
        q = coordinate_subspace(4, 2)

        assert squared_distance(p, q) == squared_distance(q, p)
        assert squared_distance(p, p) == 0

    def test_dimension_mismatch(self):
        """Test that subspaces of different dimensions raise DimensionMismatchError."""
        with pytest.raises(DimensionMismatchError):
            squared_distance(coordinate_subspace(4, 2), coordinate_subspace(4, 1))

    def test_float_agreement(self):
        """Test that Σ sin²θ from the SVD matches the exact distance."""
        p = subspace([[1, 0, 1, 0], [0, 1, 0, 1]])
        q = subspace([[1, 0, 0, 1], [0, 1, -1, 0]])

        cosines = float_cosines(p, q)

        assert abs(float(np.sum(1 - cosines**2)) - float(squared_distance(p, q))) < 1e-10

    def test_distance_table_matches_pairwise(self):
        """Test that the Gram-matrix sweep equals pairwise squared_distance for every pair."""
        # Arrange
        members = packing(
            [[1, 0, 0, 0], [0, 1, 0, 0]],
            [[1, 1, 0, 0], [0, 0, 1, -1]],
            [[1, 0, 1, 0], [0, 1, 0, -1]],
            [[1, 0, 0, 1], [0, 1, 1, 0]],
        )

        # Act
        table = distance_table(members.subspaces, chunk_rows=3)

        # Assert
        for i in range(len(members)):
            for j in range(len(members)):
                assert table.squared(i, j) == squared_distance(members[i], members[j])


class TestPrincipalAngles:
    """Tests for exact and floating principal angles."""

    def test_orthogonal_planes(self):
        """Test that (I 0) and (0 I) have all principal angles π/2."""
        result = principal_angles(coordinate_subspace(4, 2), subspace([[0, 0, 1, 0], [0, 0, 0, 1]]))

        assert result.cos_squared == (Dyadic(0), Dyadic(0))
        assert result.angles == pytest.approx((np.pi / 2, np.pi / 2))

    def test_quarter_turn_spectrum_is_snapped(self):
        """Test that (I 0) and (I I) meet at π/4 twice, found without a hypothesis."""
        result = principal_angles(coordinate_subspace(4, 2), subspace([[1, 0, 1, 0], [0, 1, 0, 1]]))

        assert result.cos_squared == (Dyadic(1, 1), Dyadic(1, 1))
        assert result.sin_squared_sum == 1

    def test_hypothesis_confirmed(self):
        """Test that a correct half-aligned hypothesis is accepted."""
        p = coordinate_subspace(4, 2)
        q = subspace([[1, 0, 0, 0], [0, 0, 1, 0]])

        result = principal_angles(p, q, hypothesis=[1, 0])

        assert result.cos_squared == (Dyadic(1), Dyadic(0))

    def test_hypothesis_rejected(self):
        """Test that a wrong hypothesis raises HypothesisRejectedError."""
        p = coordinate_subspace(4, 2)
        q = subspace([[1, 0, 0, 0], [0, 0, 1, 0]])

        with pytest.raises(HypothesisRejectedError) as exc_info:
            check_spectrum(p, q, [Dyadic(1, 1), Dyadic(1, 1)])

        assert exc_info.value.power == 2

    def test_rejection_stops_at_the_first_mismatch(self, monkeypatch):
        """Test that a hypothesis wrong in its sum costs a single trace."""
        # Arrange
        p = coordinate_subspace(8, 4)
        q = subspace(
            [[1, 0, 0, 0, 0, 0, 0, 0], [0, 1, 0, 0, 0, 0, 0, 0], [0, 0, 0, 0, 1, 0, 0, 0], [0, 0, 0, 0, 0, 1, 0, 0]]
        )
        traces = []
        original = RationalMatrix.trace
        monkeypatch.setattr(RationalMatrix, "trace", lambda self: traces.append(self) or original(self))

        # Act
        with pytest.raises(HypothesisRejectedError) as exc_info:
            check_spectrum(p, q, [Dyadic(0)] * 4)

        # Assert
        assert exc_info.value.power == 1
        assert len(traces) == 1

    def test_cos_squared_sum_matches_distance(self):
        """Test that n − Σ cos² equals the exact squared distance."""
        p = subspace([[1, 1, 0, 0], [0, 0, 1, 1]])
        q = subspace([[1, 0, 1, 0], [0, 1, 0, 1]])

        result = principal_angles(p, q)

        assert result.sin_squared_sum == squared_distance(p, q)


class TestBound:
    """Tests for the orthoplex bound and its applicability."""

    @pytest.mark.parametrize(
        "m, n, expected",
        [(2, 1, Fraction(1, 2)), (4, 2, Fraction(1)), (8, 4, Fraction(2)), (32, 16, Fraction(8))],
    )
    def test_rankin_bound_values(self, m, n, expected):
        """Test n(m−n)/m at the family parameters."""
        assert rankin_bound(m, n) == expected

    def test_rankin_bound_rejects_degenerate(self):
        """Test that n = m raises ValueError."""
        with pytest.raises(ValueError):
            rankin_bound(2, 2)

    def test_bound_applicability(self):
        """Test both conditions at the main family sizes."""
        assert bound_applicability(4, 2, 18) == bound_applicability(8, 4, 70)
        assert bound_applicability(4, 2, 18).applicable
        assert bound_applicability(4, 2, 18).equality_possible
        assert not bound_applicability(4, 2, 10).applicable
        assert not bound_applicability(4, 2, 19).equality_possible


class TestPacking:
    """Tests for the Packing container."""

    def test_duplicate_subspace_rejected(self):
        """Test that two generators of the same plane raise DuplicateSubspaceError."""
        with pytest.raises(DuplicateSubspaceError) as exc_info:
            Packing([subspace([[1, 1]]), subspace([[2, 2]])])

        assert (exc_info.value.first_index, exc_info.value.second_index) == (0, 1)

    def test_mixed_dimensions_rejected(self):
        """Test that members from different Grassmannians raise DimensionMismatchError."""
        with pytest.raises(DimensionMismatchError):
            Packing([coordinate_subspace(4, 2), coordinate_subspace(4, 1)])

    def test_membership_and_index(self):
        """Test lookup by projector."""
        members = packing([[1, 0]], [[1, 1]])

        assert subspace([[3, 3]]) in members
        assert members.index_of(subspace([[-1, -1]])) == 1
        assert ScaledIntMatrix([[1, 0]]) not in members
