"""Tests for the recursive construction C_i and the distance theorem."""
import itertools
import random
from fractions import Fraction

import numpy as np
import pytest

from src.app.config import SweepSettings
from src.app.core.domain.exact import Dyadic, RationalMatrix
from src.app.core.domain.grassmann import (
    coordinate_subspace,
    float_cosines,
    orthogonal_complement,
    rankin_bound,
    squared_distance,
)
from src.app.core.services.clifford import act, make_generators
from src.app.core.services.construction import (
    TheoremVerifier,
    VerificationMode,
    angle_cases,
    build_family,
    build_monomials,
    check_level,
    family_count,
    family_count_by_induction,
)
from src.shared.exceptions import InvalidLevelError
from tests.factories import LEVEL_TWO_GENERATORS, packing


class TestMonomials:
    """Tests for the monomial families Q_i."""

    def test_level_one(self):
        """Test that Q_1 = {(+), (−)}."""
        assert [q.integer_rows() for q in build_monomials(1).matrices] == [[[1]], [[-1]]]

    @pytest.mark.parametrize("level", [1, 2, 3, 4])
    def test_cardinality_and_shape(self, level):
        """Test |Q_i| = 2^(2i−1), all distinct signed permutation matrices."""
        matrices = build_monomials(level).matrices
        size = 1 << (level - 1)

        assert len(matrices) == 2 ** (2 * level - 1)
        assert len(set(matrices)) == len(matrices)
        for q in matrices:
            assert q.shape == (size, size)
            assert q.monomial_form() is not None

    def test_pattern_is_on_the_left(self):
        """Test that antidiag(+,−) ⊗ (−) comes out as [[0, −1], [1, 0]]."""
        matrices = [q.integer_rows() for q in build_monomials(2).matrices]

        assert matrices[:4] == [[[1, 0], [0, 1]], [[1, 0], [0, -1]], [[0, 1], [1, 0]], [[0, 1], [-1, 0]]]
        assert matrices[7] == [[0, -1], [1, 0]]


class TestBuildFamily:
    """Tests for the families C_i."""

    @pytest.mark.parametrize("level, count", [(1, 4), (2, 18), (3, 70), (4, 270), (5, 1054)])
    def test_counts(self, level, count):
        """Test |C_i| = 2^(2i) + 2^i − 2 against the induction."""
        family = build_family(level)

        assert len(family) == count == family_count(level) == family_count_by_induction(level)
        assert (family.ambient_dim, family.dim) == (1 << level, 1 << (level - 1))

    def test_level_one_is_union_jack(self):
        """Test C_1 = {(+0), (0+), (++), (+−)} in that order."""
        rows = [s.generator.integer_rows() for s in build_family(1).packing]

        assert rows == [[[1, 0]], [[0, 1]], [[1, 1]], [[1, -1]]]

    def test_level_two_equals_hand_written_matrices(self):
        """Test set equality of C_2 with the 18 hand-transcribed generator matrices."""
        expected = packing(*LEVEL_TWO_GENERATORS)

        assert build_family(2).packing.same_set(expected)

    def test_member_order(self):
        """Test the fixed order (I0), (0I), diag(P,P), diag(P,P⊥), (I Q)."""
        members = build_family(2).packing

        assert members[0].generator.integer_rows() == [[1, 0, 0, 0], [0, 1, 0, 0]]
        assert members[1].generator.integer_rows() == [[0, 0, 1, 0], [0, 0, 0, 1]]
        assert members[2].generator.integer_rows() == [[1, 0, 0, 0], [0, 0, 1, 0]]
        assert members[6].generator.integer_rows() == [[1, 0, 0, 0], [0, 0, 0, 1]]
        assert members[10].generator.integer_rows() == [[1, 0, 1, 0], [0, 1, 0, 1]]

    @pytest.mark.parametrize("level", [1, 2, 3, 4])
    def test_generators_are_signed_with_orthogonal_rows(self, level):
        """Test that every generator has entries in {−1, 0, 1}, full rank and orthogonal rows."""
        for member in build_family(level).packing:
            rows = np.array(member.generator.integer_rows(), dtype=int)
            gram = rows @ rows.T

            assert member.generator.sqrt2_exponent == 0
            assert np.isin(rows, (-1, 0, 1)).all()
            assert (np.diag(gram) > 0).all()
            assert np.count_nonzero(gram - np.diag(np.diag(gram))) == 0

    @pytest.mark.parametrize("level", [1, 2, 3])
    def test_projector_identities(self, level):
        """Test idempotence, symmetry, trace and Π_P + Π_P⊥ = I for every member."""
        m = 1 << level
        identity = RationalMatrix.identity(m)
        for member in build_family(level).packing:
            projector = member.projector

            assert projector.is_symmetric()
            assert projector @ projector == projector
            assert projector.trace() == m // 2
            assert projector + orthogonal_complement(member).projector == identity

    @pytest.mark.parametrize("level", [1, 2, 3, 4])
    def test_coordinate_halves_are_complements(self, level):
        """Test that (I 0) and (0 I) are orthogonal complements at distance √(m/2)."""
        members = build_family(level).packing
        m = 1 << level

        assert orthogonal_complement(members[0]) == members[1]
        assert squared_distance(members[0], members[1]) == Fraction(m, 2)

    def test_level_zero_rejected(self):
        """Test that i = 0 raises InvalidLevelError."""
        with pytest.raises(InvalidLevelError):
            build_family(0)

    def test_check_level_cap(self):
        """Test that the configured cap is enforced."""
        check_level(5, 5)
        with pytest.raises(InvalidLevelError):
            check_level(6, 5)


class TestAngleCases:
    """Tests for the three principal-angle spectra."""

    def test_cases_at_even_dimension(self):
        """Test all-orthogonal, half-aligned and quarter-turn spectra for n = 2."""
        cases = dict(angle_cases(2))

        assert cases["all_orthogonal"] == [Dyadic(0), Dyadic(0)]
        assert cases["half_aligned"] == [Dyadic(1), Dyadic(0)]
        assert cases["all_quarter_turn"] == [Dyadic(1, 1), Dyadic(1, 1)]

    def test_half_aligned_needs_even_dimension(self):
        """Test that n = 1 has no half-aligned case."""
        assert [name for name, _ in angle_cases(1)] == ["all_orthogonal", "all_quarter_turn"]


class TestVerifyTheorem:
    """Tests for TheoremVerifier.verify_theorem."""

    @pytest.mark.parametrize("level", [1, 2, 3, 4])
    def test_exhaustive_pass(self, theorem_verifier, level):
        """Test that every pair has d² ∈ {m/4, m/2} and the bound is met."""
        # Arrange
        m = 1 << level

        # Act
        report = theorem_verifier.verify_theorem(level, VerificationMode.EXHAUSTIVE)

        # Assert
        assert report.passed, [c for c in report.checks if not c.passed]
        assert report.count == (m - 1) * (m + 2)
        assert report.min_d_squared == Fraction(m, 4) == rankin_bound(m, m // 2)
        assert set(report.histogram_dict()) <= {Fraction(m, 4), Fraction(m, 2)}
        assert report.status == "proved"
        assert not report.offending_pairs

    def test_level_three_distances(self, theorem_verifier):
        """Test that C_3 has d² ∈ {2, 4} with every pair counted."""
        report = theorem_verifier.verify_theorem(3)
        histogram = report.histogram_dict()

        assert set(histogram) == {Fraction(2), Fraction(4)}
        assert sum(histogram.values()) == 70 * 69 // 2

    def test_angle_cases_cover_all_pairs_at_level_two(self, theorem_verifier):
        """Test that every pair of C_2 matches one of the three angle cases."""
        report = theorem_verifier.verify_theorem(2)

        assert report.details["angle_pairs_checked"] == 18 * 17 // 2
        assert sum(report.details["angle_cases"].values()) == 18 * 17 // 2

    def test_transitive_mode_matches_exhaustive(self, theorem_verifier):
        """Test that the seed-row reduction gives the same histogram at level 3."""
        exhaustive = theorem_verifier.verify_theorem(3, VerificationMode.EXHAUSTIVE)
        transitive = theorem_verifier.verify_theorem(3, VerificationMode.TRANSITIVE)

        assert transitive.passed
        assert transitive.histogram_dict() == exhaustive.histogram_dict()
        assert any(c.name == "transitivity_certificate" and c.passed for c in transitive.checks)

    def test_default_mode_switches_above_configured_level(self, packing_analyzer, transitivity_verifier):
        """Test that levels above exhaustive_max_level use the transitive strategy."""
        verifier = TheoremVerifier(packing_analyzer, transitivity_verifier, SweepSettings(exhaustive_max_level=2))

        assert verifier.default_mode(2) is VerificationMode.EXHAUSTIVE
        assert verifier.default_mode(3) is VerificationMode.TRANSITIVE

    @pytest.mark.slow
    def test_level_five_exhaustive(self, theorem_verifier):
        """Test the full exact sweep of the 1054 subspaces in G(32, 16)."""
        report = theorem_verifier.verify_theorem(5, VerificationMode.EXHAUSTIVE)

        assert report.passed
        assert report.count == 1054
        assert set(report.histogram_dict()) == {Fraction(8), Fraction(16)}


class TestGroupInvariance:
    """Tests that distances are invariant under the right action of G_i."""

    @pytest.mark.parametrize("level", [2, 3])
    def test_random_words(self, level):
        """Test d²(Pg, Qg) = d²(P, Q) for 100 random pairs and generator words."""
        # Arrange
        rng = random.Random(level)
        members = build_family(level).packing
        gens = make_generators(level, include_h_prime=True)

        for _ in range(100):
            p, q = rng.sample(list(members), 2)
            word = [rng.randrange(len(gens)) for _ in range(rng.randint(1, 6))]

            # Act
            p_image, q_image = p, q
            for index in word:
                p_image, q_image = act(p_image, gens[index]), act(q_image, gens[index])

            # Assert
            assert squared_distance(p_image, q_image) == squared_distance(p, q)
            assert p_image in members

    @pytest.mark.parametrize(
        "level", [1, 2, 3, 4, pytest.param(5, marks=pytest.mark.slow)]
    )
    def test_every_generator_preserves_distances(self, level):
        """Test d²(Pg, Qg) = d²(P, Q) for each generator of G_i and H′ over a fixed sample of pairs."""
        # Arrange
        rng = random.Random(100 + level)
        members = list(build_family(level).packing)
        gens = make_generators(level, include_h_prime=level >= 2)
        sample = sorted(set(rng.sample(range(len(members)), min(len(members), 12))) | {0})
        pairs = [(i, j) for i in sample for j in sample if i < j]

        for g in gens:
            # Act
            images = {k: act(members[k], g) for k in sample}

            # Assert
            for i, j in pairs:
                assert squared_distance(images[i], images[j]) == squared_distance(members[i], members[j])

    def test_seed_is_first_member(self):
        """Test that (I 0) is the first member of every family."""
        for level in (1, 2, 3):
            assert build_family(level).packing[0] == coordinate_subspace(1 << level, 1 << (level - 1))


class TestFloatAgreement:
    """Tests that the floating principal angles match the exact distances."""

    @pytest.mark.parametrize("level", [2, 3, 4, 5, 6])
    def test_sin_squared_sum_matches_exact_distance(self, level):
        """Test Σ sin²θ from the SVD against the exact d² for members of C_i up to m = 64."""
        # Arrange
        m = 1 << level
        rng = random.Random(level)
        gens = make_generators(level)
        seed = coordinate_subspace(m, m // 2)
        members = [seed]
        for _ in range(5):
            image = seed
            for _ in range(rng.randint(3, 12)):
                image = act(image, gens[rng.randrange(len(gens))])
            members.append(image)

        for p, q in itertools.combinations(members, 2):
            # Act
            cosines = float_cosines(p, q)

            # Assert
            assert abs(float(np.sum(1 - cosines**2)) - float(squared_distance(p, q))) < 1e-9
            assert squared_distance(p, q) in {Dyadic(0), Dyadic(m, 2), Dyadic(m, 1)}
