"""Exact pairwise distance sweeps and packing reports."""
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Sequence

import numpy as np

from src.app.config import SweepSettings
from src.app.core.domain.exact import Dyadic
from src.app.core.domain.grassmann import (
    DistanceTable,
    Packing,
    Subspace,
    assemble_table,
    bound_applicability,
    flatten_projectors,
    gram_block,
    rankin_bound,
)
from src.app.core.domain.models import (
    BoundComparison,
    HistogramBin,
    OffendingPair,
    VerificationReport,
)
from src.shared.exceptions import InvariantViolationError

logger = logging.getLogger(__name__)

# Per-process copy of the flattened projectors, set by the pool initializer
_worker_flat: np.ndarray | None = None


def _init_worker(flat: np.ndarray) -> None:
    global _worker_flat
    _worker_flat = flat


def _worker_block(bounds: tuple[int, int]) -> tuple[int, int, np.ndarray]:
    start, stop = bounds
    return start, stop, gram_block(_worker_flat, start, stop)


def histogram_bins(histogram: dict[Dyadic, int]) -> list[HistogramBin]:
    return [HistogramBin(d_squared=d, pairs=count) for d, count in sorted(histogram.items())]


def offending_pair(
    packing: Packing, first: int, second: int, reason: str, d_squared: Dyadic | None = None
) -> OffendingPair:
    a, b = packing[first].generator, packing[second].generator
    return OffendingPair(
        first_index=first,
        second_index=second,
        d_squared=d_squared,
        reason=reason,
        first_generator=a.integer_rows(),
        first_sqrt2_exponent=a.sqrt2_exponent,
        second_generator=b.integer_rows(),
        second_sqrt2_exponent=b.sqrt2_exponent,
    )


class PackingAnalyzer:
    """
    Computes exact squared-distance statistics of packings.

    The pair sweep stacks every projector as a row of integers over a common
    power-of-two denominator, so all traces tr(Π_i Π_j) come out of one Gram
    matrix. Row blocks of that matrix are the unit of parallel work; blocks
    are merged in order, so results do not depend on the worker count.
    """

    def __init__(self, settings: SweepSettings):
        """
        Initialize the analyzer.

        Args:
            settings: Worker count and block size for the sweep
        """
        self.settings = settings

    def distance_table(self, subspaces: Sequence[Subspace], workers: int | None = None) -> DistanceTable:
        """Exact squared distances between all pairs of subspaces."""
        workers = workers or self.settings.workers
        size = len(subspaces)
        flat, exponent = flatten_projectors(subspaces)
        chunk = self.settings.chunk_rows
        bounds = [(start, min(start + chunk, size)) for start in range(0, size, chunk)]

        if workers > 1 and len(bounds) > 1:
            logger.info("Sweeping %d subspaces in %d blocks on %d workers", size, len(bounds), workers)
            with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker, initargs=(flat,)) as pool:
                blocks = list(pool.map(_worker_block, bounds))
        else:
            logger.debug("Sweeping %d subspaces in %d blocks", size, len(bounds))
            blocks = [(start, stop, gram_block(flat, start, stop)) for start, stop in bounds]

        dim = subspaces[0].dim if subspaces else 0
        return assemble_table(dim, exponent, size, blocks)

    def seed_profile(self, subspaces: Sequence[Subspace], seed_index: int = 0) -> dict[Dyadic, int]:
        """Squared distances from one member to every other member."""
        flat, exponent = flatten_projectors(subspaces)
        row = np.dot(flat, flat[seed_index])
        dim = subspaces[seed_index].dim
        scale = 2 * exponent
        profile: dict[Dyadic, int] = {}
        for j, value in enumerate(row):
            if j == seed_index:
                continue
            d_squared = Dyadic((dim << scale) - int(value), scale)
            profile[d_squared] = profile.get(d_squared, 0) + 1
        return profile

    @staticmethod
    def histogram_from_profile(profile: dict[Dyadic, int], size: int) -> dict[Dyadic, int]:
        """
        Pair histogram of a packing on which a group acts transitively.

        Every member sees the same profile, so each distance class holds
        count · N / 2 unordered pairs.
        """
        histogram = {}
        for d_squared, count in profile.items():
            if (count * size) % 2:
                raise InvariantViolationError(
                    "profile pair count is integral", f"{count} * {size} is odd for d²={d_squared}"
                )
            histogram[d_squared] = count * size // 2
        return histogram

    def packing_report(
        self,
        packing: Packing,
        subject: str = "packing",
        level: int | None = None,
        histogram: dict[Dyadic, int] | None = None,
    ) -> VerificationReport:
        """
        Count, exact minimum squared distance, histogram and bound comparison.

        Args:
            packing: At least two subspaces in a common G(m, n)
            subject: Label recorded on the report
            level: Level i, when the packing belongs to a family
            histogram: Precomputed pair histogram (e.g. from a seed profile);
                computed by a full sweep when omitted

        Raises:
            ValueError: If the packing has fewer than two members
        """
        if len(packing) < 2:
            raise ValueError("packing_report needs at least two subspaces")
        if histogram is None:
            histogram = self.distance_table(packing.subspaces).histogram()

        m, n, size = packing.ambient_dim, packing.dim, len(packing)
        min_d_squared = min(histogram)
        report = VerificationReport(
            subject=subject,
            level=level,
            ambient_dim=m,
            dim=n,
            count=size,
            min_d_squared=min_d_squared,
            histogram=histogram_bins(histogram),
        )
        report.add_check(
            "pair_count",
            sum(histogram.values()) == size * (size - 1) // 2,
            expected=size * (size - 1) // 2,
            observed=sum(histogram.values()),
        )
        if 0 < n < m:
            bound = rankin_bound(m, n)
            applicability = bound_applicability(m, n, size)
            observed_min = min_d_squared.to_fraction()
            report.bound = BoundComparison(
                rankin_bound=bound,
                min_d_squared=observed_min,
                meets_bound=observed_min == bound,
                gap=bound - observed_min,
                applicable=applicability.applicable,
                equality_possible=applicability.equality_possible,
            )
            if applicability.applicable:
                report.add_check("min_within_bound", observed_min <= bound, expected=f"<= {bound}", observed=observed_min)
        logger.info("%s: N=%d in G(%d,%d), min d²=%s", subject, size, m, n, min_d_squared)
        return report

