"""
Recursive construction of the optimal packings in G(2^i, 2^(i−1)).

Q_1 = {(+), (−)}; Q_i expands each member of Q_(i−1) by four signed 2×2
patterns placed on the left of the Kronecker product. C_i consists of (I 0),
(0 I), diag(P, P) and diag(P, P⊥) for P ∈ C_(i−1), and (I Q) for Q ∈ Q_i.
"""
import logging
import random
from dataclasses import dataclass
from enum import StrEnum
from functools import lru_cache
from typing import TYPE_CHECKING

import numpy as np

from src.app.config import SweepSettings
from src.app.core.domain.exact import Dyadic, ScaledIntMatrix
from src.app.core.domain.grassmann import (
    Packing,
    Subspace,
    bound_applicability,
    float_cosines,
    orthogonal_complement,
    principal_angles,
    rankin_bound,
    squared_distance,
    subspace_from_generator,
)
from src.app.core.domain.models import ClaimStatus, VerificationReport
from src.app.core.services.packing_analyzer import PackingAnalyzer, histogram_bins, offending_pair
from src.shared.exceptions import (
    DuplicateSubspaceError,
    HypothesisRejectedError,
    InvalidLevelError,
    InvariantViolationError,
)

if TYPE_CHECKING:
    from src.app.core.services.clifford import TransitivityVerifier

logger = logging.getLogger(__name__)

# diag(+,+), diag(+,−), antidiag(+,+), antidiag(+,−)
SIGNED_PATTERNS = (
    np.array([[1, 0], [0, 1]]),
    np.array([[1, 0], [0, -1]]),
    np.array([[0, 1], [1, 0]]),
    np.array([[0, 1], [-1, 0]]),
)

# Record at most this many offending pairs per report
MAX_OFFENDING_PAIRS = 20


def check_level(level: int, max_level: int | None = None) -> None:
    """
    Raises:
        InvalidLevelError: If level < 1 or level > max_level
    """
    if not isinstance(level, int) or level < 1:
        raise InvalidLevelError(level, "level must be an integer >= 1")
    if max_level is not None and level > max_level:
        raise InvalidLevelError(level, f"exceeds the configured maximum level {max_level}")


@dataclass(frozen=True)
class MonomialFamily:
    """Q_i: 2^(2i−1) signed permutation matrices of size 2^(i−1)."""

    level: int
    matrices: tuple[ScaledIntMatrix, ...]

    def __len__(self) -> int:
        return len(self.matrices)


@dataclass(frozen=True)
class ConstructionFamily:
    """C_i as a packing in G(2^i, 2^(i−1))."""

    level: int
    packing: Packing

    @property
    def ambient_dim(self) -> int:
        return 1 << self.level

    @property
    def dim(self) -> int:
        return 1 << (self.level - 1)

    def __len__(self) -> int:
        return len(self.packing)


def family_count(level: int) -> int:
    """2^(2i) + 2^i − 2."""
    return 4**level + 2**level - 2


def family_count_by_induction(level: int) -> int:
    """2 + 2·|C_(i−1)| + |Q_i| with |C_0| = 0."""
    if level == 0:
        return 0
    return 2 + 2 * family_count_by_induction(level - 1) + 2 ** (2 * level - 1)


@lru_cache(maxsize=None)
def build_monomials(level: int) -> MonomialFamily:
    """
    Q_i in construction order: members of Q_(i−1) outermost, patterns innermost.

    Raises:
        InvalidLevelError: If level < 1
    """
    check_level(level)
    if level == 1:
        return MonomialFamily(level=1, matrices=(ScaledIntMatrix([[1]]), ScaledIntMatrix([[-1]])))
    previous = build_monomials(level - 1)
    matrices = tuple(
        ScaledIntMatrix(np.kron(pattern, np.array(q.integer_rows(), dtype=int)))
        for q in previous.matrices
        for pattern in SIGNED_PATTERNS
    )
    if len(set(matrices)) != len(matrices):
        raise InvariantViolationError("monomial matrices distinct", f"level {level}")
    return MonomialFamily(level=level, matrices=matrices)


def _block_diagonal(upper: np.ndarray, lower: np.ndarray) -> np.ndarray:
    rows_u, cols_u = upper.shape
    rows_l, cols_l = lower.shape
    result = np.zeros((rows_u + rows_l, cols_u + cols_l), dtype=int)
    result[:rows_u, :cols_u] = upper
    result[rows_u:, cols_u:] = lower
    return result


def _integer_generator(subspace: Subspace) -> np.ndarray:
    return np.array(subspace.generator.integer_rows(), dtype=int)


def _check_generator_shape(subspace: Subspace, label: str) -> None:
    """{−1, 0, +1} entries, no zero rows, pairwise orthogonal rows."""
    generator = subspace.generator
    rows = np.array(generator.integer_rows(), dtype=int)
    if generator.sqrt2_exponent != 0 or not np.isin(rows, (-1, 0, 1)).all():
        raise InvariantViolationError("generator entries in {-1, 0, 1}", label)
    gram = rows @ rows.T
    if np.any(np.diag(gram) == 0) or np.count_nonzero(gram - np.diag(np.diag(gram))):
        raise InvariantViolationError("generator rows nonzero and pairwise orthogonal", label)


@lru_cache(maxsize=None)
def build_family(level: int) -> ConstructionFamily:
    """
    C_i with members in the fixed order (I0), (0I), diag(P,P), diag(P,P⊥), (I Q).

    Raises:
        InvalidLevelError: If level < 1
        InvariantViolationError: If two construction rows give the same subspace
            or the count disagrees with the closed form
    """
    check_level(level)
    m = 1 << level
    n = m // 2
    generators: list[np.ndarray] = []
    identity = np.identity(n, dtype=int)
    zero = np.zeros((n, n), dtype=int)
    generators.append(np.hstack([identity, zero]))
    generators.append(np.hstack([zero, identity]))

    if level > 1:
        previous = build_family(level - 1).packing
        blocks = [_integer_generator(p) for p in previous]
        complements = []
        for position, p in enumerate(previous):
            complement = orthogonal_complement(p)
            _check_generator_shape(complement, f"complement of C_{level - 1}[{position}]")
            complements.append(_integer_generator(complement))
        generators.extend(_block_diagonal(block, block) for block in blocks)
        generators.extend(_block_diagonal(block, comp) for block, comp in zip(blocks, complements))

    for q in build_monomials(level).matrices:
        generators.append(np.hstack([identity, np.array(q.integer_rows(), dtype=int)]))

    subspaces = [subspace_from_generator(ScaledIntMatrix(g)) for g in generators]
    for position, subspace in enumerate(subspaces):
        _check_generator_shape(subspace, f"C_{level}[{position}]")
    try:
        packing = Packing(subspaces)
    except DuplicateSubspaceError as e:
        raise InvariantViolationError("construction rows give distinct subspaces", str(e)) from e

    expected = family_count(level)
    if len(packing) != expected or family_count_by_induction(level) != expected:
        raise InvariantViolationError(
            "family count", f"built {len(packing)}, closed form {expected}, "
            f"induction {family_count_by_induction(level)}"
        )
    logger.info("Built C_%d: %d subspaces in G(%d,%d)", level, len(packing), m, n)
    return ConstructionFamily(level=level, packing=packing)


class VerificationMode(StrEnum):
    """How verify_theorem covers the pairs."""
    EXHAUSTIVE = "exhaustive"
    TRANSITIVE = "transitive"


def angle_cases(n: int) -> list[tuple[str, list[Dyadic]]]:
    """The three squared-cosine spectra allowed between members of C_i."""
    cases = [("all_orthogonal", [Dyadic(0)] * n)]
    if n % 2 == 0:
        cases.append(("half_aligned", [Dyadic(1)] * (n // 2) + [Dyadic(0)] * (n // 2)))
    cases.append(("all_quarter_turn", [Dyadic(1, 1)] * n))
    return cases


class TheoremVerifier:
    """
    Verifies that C_i is an optimal packing with a two-valued distance spectrum.

    Pair coverage is exhaustive up to the configured level and otherwise
    reduced to the distances from (I 0), which is licensed by the
    transitivity certificate computed in the Clifford module.
    """

    def __init__(
        self,
        analyzer: PackingAnalyzer,
        transitivity: "TransitivityVerifier",
        settings: SweepSettings,
    ):
        """
        Initialize the verifier.

        Args:
            analyzer: Exact pairwise sweep service
            transitivity: Source of the transitivity certificate
            settings: Sweep settings (mode switch level, angle sampling)
        """
        self.analyzer = analyzer
        self.transitivity = transitivity
        self.settings = settings

    def default_mode(self, level: int) -> VerificationMode:
        if level <= self.settings.exhaustive_max_level:
            return VerificationMode.EXHAUSTIVE
        return VerificationMode.TRANSITIVE

    def verify_theorem(
        self, level: int, mode: VerificationMode | None = None, allow_large: bool = False
    ) -> VerificationReport:
        """
        Check count, two-valued spectrum, optimality and principal-angle cases.

        Failed checks are recorded on the report (with offending pairs), not raised.
        allow_large lifts the transitivity level cap.
        """
        check_level(level)
        mode = mode or self.default_mode(level)
        family = build_family(level)
        packing = family.packing
        m, n, size = family.ambient_dim, family.dim, len(packing)
        quarter, half = Dyadic(m, 2), Dyadic(m, 1)
        allowed = {quarter, half}

        report = VerificationReport(subject="theorem", level=level, ambient_dim=m, dim=n, count=size)
        report.details["mode"] = mode.value
        report.add_check("count", size == (m - 1) * (m + 2), expected=(m - 1) * (m + 2), observed=size)

        if mode is VerificationMode.EXHAUSTIVE:
            table = self.analyzer.distance_table(packing.subspaces)
            histogram = table.histogram()
            for i, j in table.pairs_with(lambda d: d not in allowed):
                if len(report.offending_pairs) >= MAX_OFFENDING_PAIRS:
                    break
                report.offending_pairs.append(
                    offending_pair(packing, i, j, "squared distance outside {m/4, m/2}", table.squared(i, j))
                )
            if level <= 4:
                reference = table.row_histogram(0)
                irregular = [k for k in range(size) if table.row_histogram(k) != reference]
                report.add_check(
                    "distance_profile_regular",
                    not irregular,
                    detail=f"members with a different profile: {irregular[:10]}" if irregular else None,
                )
            pairs = self._angle_pairs(level, size, all_pairs=True)
        else:
            certificate = self.transitivity.verify_transitivity(level, allow_large=allow_large)
            report.add_check("transitivity_certificate", certificate.passed, observed=certificate.count)
            profile = self.analyzer.seed_profile(packing.subspaces, 0)
            histogram = self.analyzer.histogram_from_profile(profile, size)
            if not set(profile) <= allowed:
                for j in range(1, size):
                    if len(report.offending_pairs) >= MAX_OFFENDING_PAIRS:
                        break
                    d_squared = squared_distance(packing[0], packing[j])
                    if d_squared not in allowed:
                        report.offending_pairs.append(
                            offending_pair(packing, 0, j, "squared distance outside {m/4, m/2}", d_squared)
                        )
            pairs = self._angle_pairs(level, size, all_pairs=False)

        observed = set(histogram)
        min_d_squared = min(histogram)
        report.min_d_squared = min_d_squared.to_fraction()
        report.histogram = histogram_bins(histogram)
        report.add_check(
            "two_valued_spectrum",
            observed <= allowed,
            expected=sorted(str(d) for d in allowed),
            observed=sorted(str(d) for d in observed),
        )
        bound = rankin_bound(m, n)
        report.add_check("min_is_quarter_dimension", min_d_squared == quarter, expected=quarter, observed=min_d_squared)
        report.add_check("min_meets_bound", min_d_squared == bound, expected=bound, observed=min_d_squared)
        applicability = bound_applicability(m, n, size)
        report.add_check("bound_applicable", applicability.applicable)
        report.add_check("equality_possible", applicability.equality_possible)

        self._check_angles(report, packing, pairs)
        report.status = ClaimStatus.PROVED.value if report.passed else f"refuted at level {level}"
        logger.info("Theorem at level %d (%s): %s", level, mode.value, "pass" if report.passed else "FAIL")
        return report

    def _angle_pairs(self, level: int, size: int, all_pairs: bool) -> list[tuple[int, int]]:
        """All pairs at small levels, otherwise a seeded sample."""
        if level <= self.settings.angle_all_pairs_max_level:
            if all_pairs:
                return [(i, j) for i in range(size) for j in range(i + 1, size)]
            return [(0, j) for j in range(1, size)]
        rng = random.Random(self.settings.sample_seed + level)
        sample = []
        for _ in range(self.settings.angle_sample_size):
            i = rng.randrange(size) if all_pairs else 0
            j = rng.randrange(size - 1)
            sample.append((i, j if j < i else j + 1))
        return sample

    def _check_angles(self, report: VerificationReport, packing: Packing, pairs: list[tuple[int, int]]) -> None:
        n = packing.dim
        cases = angle_cases(n)
        counts = {name: 0 for name, _ in cases}
        unmatched = 0
        worst_float_error = 0.0

        for i, j in pairs:
            p, q = packing[i], packing[j]
            d_squared = squared_distance(p, q)
            cosines = float_cosines(p, q)
            worst_float_error = max(worst_float_error, abs(float(np.sum(1.0 - cosines**2)) - float(d_squared)))
            matched = None
            for name, spectrum in cases:
                if sum((Dyadic(1) - c for c in spectrum), Dyadic(0)) != d_squared:
                    continue
                try:
                    principal_angles(p, q, hypothesis=spectrum)
                except HypothesisRejectedError:
                    continue
                matched = name
                break
            if matched is None:
                unmatched += 1
                if len(report.offending_pairs) < MAX_OFFENDING_PAIRS:
                    report.offending_pairs.append(
                        offending_pair(packing, i, j, "principal angles match none of the three cases", d_squared)
                    )
            else:
                counts[matched] += 1

        report.details["angle_pairs_checked"] = len(pairs)
        report.details["angle_cases"] = counts
        report.add_check("principal_angle_cases", unmatched == 0, expected=0, observed=unmatched)
        report.add_check(
            "float_distance_agreement",
            worst_float_error <= self.settings.float_tolerance,
            expected=f"<= {self.settings.float_tolerance}",
            observed=f"{worst_float_error:.3e}",
        )