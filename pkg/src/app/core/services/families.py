"""Orbit families: lines, planes in G(m,2) and subspaces in G(m,m/4), plus the main family."""
import logging
from fractions import Fraction
from math import prod

from src.app.config import FamilySettings, OrbitSettings
from src.app.core.domain.grassmann import Packing, coordinate_subspace
from src.app.core.domain.models import (
    ClaimStatus,
    FamilyClaim,
    FamilyComparison,
    FamilyName,
    VerificationReport,
)
from src.app.core.services.clifford import make_generators, permutation_representation, subspace_orbit
from src.app.core.services.construction import build_family, check_level
from src.app.core.services.packing_analyzer import PackingAnalyzer
from src.shared.exceptions import InvalidLevelError, InvariantViolationError

logger = logging.getLogger(__name__)

# Size of the first level above each default cap
OPT_IN_COST = {
    FamilyName.LINES: "lines at i=5: 146880 lines",
    FamilyName.PLANES2: "planes2 at i=4: 16200 planes",
    FamilyName.QUARTER: "quarter at m=32: 94860 subspaces",
}


def _twelfth(value: int, name: FamilyName, level: int) -> int:
    result = Fraction(value, 12)
    if result.denominator != 1:
        raise InvariantViolationError("closed-form count is an integer", f"{name} at level {level}: {result}")
    return int(result)


def seed_dimension(name: FamilyName, level: int) -> int:
    """Number of leading coordinate vectors spanning the seed."""
    m = 1 << level
    return {
        FamilyName.MAIN: m // 2,
        FamilyName.LINES: 1,
        FamilyName.PLANES2: 2,
        FamilyName.QUARTER: m // 4,
    }[name]


def predict(name: FamilyName | str, level: int) -> FamilyClaim:
    """
    Closed-form count and minimum squared distance of a family.

    Raises:
        InvalidLevelError: If the family is undefined at this level
    """
    name = FamilyName(name)
    check_level(level)
    if name is FamilyName.QUARTER and level < 2:
        raise InvalidLevelError(level, "the quarter family needs m >= 4")
    m = 1 << level

    match name:
        case FamilyName.MAIN:
            count, min_d_squared, status = (m - 1) * (m + 2), Fraction(m, 4), ClaimStatus.PROVED
        case FamilyName.LINES:
            count = prod(2**r + 2 for r in range(1, level + 1))
            min_d_squared, status = Fraction(1, 2), ClaimStatus.PROVED
        case FamilyName.PLANES2:
            count = _twelfth((2**level - 1) * prod(2**r + 2 for r in range(level + 1)), name, level)
            min_d_squared, status = Fraction(1), ClaimStatus.CONJECTURED
        case FamilyName.QUARTER:
            count = _twelfth((m - 2) * (m - 1) * (m + 2) * (m + 4), name, level)
            min_d_squared, status = Fraction(m, 8), ClaimStatus.CONJECTURED

    return FamilyClaim(
        name=name,
        level=level,
        ambient_dim=m,
        dim=seed_dimension(name, level),
        predicted_count=count,
        predicted_min_d_squared=min_d_squared,
        claim_status=status,
        # A single plane filling R^2 is not a packing
        gated=not (name is FamilyName.PLANES2 and level == 1),
    )


class FamilyService:
    """Realizes the families as orbits and checks them against their closed forms."""

    def __init__(self, analyzer: PackingAnalyzer, settings: FamilySettings, orbit_settings: OrbitSettings):
        """
        Initialize the service.

        Args:
            analyzer: Exact distance statistics
            settings: Default verified levels and full-sweep threshold
            orbit_settings: Orbit size limit
        """
        self.analyzer = analyzer
        self.settings = settings
        self.orbit_settings = orbit_settings

    def max_level(self, name: FamilyName) -> int | None:
        return {
            FamilyName.LINES: self.settings.lines_max_level,
            FamilyName.PLANES2: self.settings.planes2_max_level,
            FamilyName.QUARTER: self.settings.quarter_max_level,
        }.get(name)

    def realize(self, name: FamilyName | str, level: int, limit: int | None = None) -> Packing:
        """
        The family at level i: the main family from the recursion, the others
        as orbits of the span of the first few coordinate vectors.

        Raises:
            InvalidLevelError: If the family is undefined at this level
            OrbitLimitExceededError: If the orbit grows beyond limit
        """
        claim = predict(name, level)
        if claim.name is FamilyName.MAIN:
            return build_family(level).packing
        seed = coordinate_subspace(claim.ambient_dim, claim.dim)
        orbit = subspace_orbit(seed, make_generators(level), limit or self.orbit_settings.default_limit)
        return orbit.members

    def check_family(
        self,
        name: FamilyName | str,
        level: int,
        allow_large: bool = False,
        limit: int | None = None,
    ) -> VerificationReport:
        """
        Compare the realized family with its prediction: count, minimum
        squared distance and full histogram. Conjectured families are labelled
        "computationally confirmed at level i" when every check passes.

        Raises:
            InvalidLevelError: Above the default verified level without allow_large
        """
        claim = predict(name, level)
        cap = self.max_level(claim.name)
        if cap is not None and level > cap:
            if not allow_large:
                raise InvalidLevelError(
                    level, f"{claim.name} is verified up to level {cap} by default ({OPT_IN_COST[claim.name]})"
                )
            logger.warning("Checking %s at level %d; this is an opt-in expensive run", claim.name, level)

        packing = self.realize(claim.name, level, limit)
        size = len(packing)
        if size < 2:
            report = VerificationReport(
                subject=str(claim.name), level=level, ambient_dim=claim.ambient_dim, dim=claim.dim, count=size
            )
            report.add_check("count", size == claim.predicted_count, expected=claim.predicted_count, observed=size)
        else:
            histogram = None
            if size > self.settings.full_sweep_max_members:
                profile = self.analyzer.seed_profile(packing.subspaces, 0)
                histogram = self.analyzer.histogram_from_profile(profile, size)
                logger.info("%s at level %d: histogram from the seed profile (N=%d)", claim.name, level, size)
            report = self.analyzer.packing_report(packing, subject=str(claim.name), level=level, histogram=histogram)
            report.details["histogram_source"] = "full sweep" if histogram is None else "seed profile"
            report.add_check("count", size == claim.predicted_count, expected=claim.predicted_count, observed=size)
            observed_min = report.min_d_squared
            report.add_check(
                "min_d_squared",
                observed_min == claim.predicted_min_d_squared,
                expected=claim.predicted_min_d_squared,
                observed=observed_min,
            )
            if claim.dim == 1:
                self._check_lines(report, level)
            if claim.name is FamilyName.PLANES2 and level == 2:
                report.add_check("planes2_equals_main_family", packing.same_set(build_family(2).packing))

        report.details["claim"] = claim.model_dump(mode="json")
        if not claim.gated:
            report.status = f"not gated at level {level}"
        elif not report.passed:
            report.status = f"refuted at level {level}"
        elif claim.claim_status is ClaimStatus.PROVED:
            report.status = ClaimStatus.PROVED.value
        else:
            report.status = f"computationally confirmed at level {level}"
        logger.info("%s at level %d: %s", claim.name, level, report.status)
        return report

    def _check_lines(self, report: VerificationReport, level: int) -> None:
        """Squared cosines from the histogram (cos² = 1 − d² for lines) and the signed-orbit count."""
        spectrum = sorted({Fraction(1) - bin_.d_squared for bin_ in report.histogram})
        report.details["cos_squared_spectrum"] = [str(c) for c in spectrum]
        report.add_check(
            "max_cos_squared_is_half",
            bool(spectrum) and spectrum[-1] == Fraction(1, 2),
            expected="1/2",
            observed=spectrum[-1] if spectrum else None,
        )
        report.add_check(
            "cos_squared_values",
            set(spectrum) <= {Fraction(0), Fraction(1, 4), Fraction(1, 2)},
            expected="subset of {0, 1/4, 1/2}",
            observed=", ".join(str(c) for c in spectrum),
        )
        signed = permutation_representation(make_generators(level)).degree
        report.add_check("signed_orbit_is_twice_lines", signed == 2 * report.count, expected=2 * report.count, observed=signed)

    def compare_families(
        self, first: FamilyName | str, first_level: int, second: FamilyName | str, second_level: int
    ) -> FamilyComparison:
        """Whether two realized families are the same set of subspaces."""
        a = self.realize(first, first_level)
        b = self.realize(second, second_level)
        shared = len(a.projector_keys() & b.projector_keys()) if a.ambient_dim == b.ambient_dim else 0
        comparison = FamilyComparison(
            first=f"{FamilyName(first)}@{first_level}",
            second=f"{FamilyName(second)}@{second_level}",
            first_count=len(a),
            second_count=len(b),
            shared_count=shared,
            same_set=shared == len(a) == len(b),
        )
        logger.info("%s vs %s: %d shared, same set: %s", comparison.first, comparison.second, shared, comparison.same_set)
        return comparison

