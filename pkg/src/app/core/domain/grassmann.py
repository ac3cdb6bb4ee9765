"""
Geometry of the Grassmannian G(m, n).

A subspace is identified by its orthogonal projector; the generator matrix
that produced it is kept only as a representative for export. Distances are
exact (chordal distance squared = n − tr(Π_P Π_Q)); floating point is used
only for the principal-angle diagnostic.
"""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property, reduce
from typing import Iterator, Sequence

import numpy as np
import scipy.linalg

from src.app.core.domain.exact import (
    Dyadic,
    RationalMatrix,
    ScaledIntMatrix,
    fraction_inverse,
    integer_rank,
    kernel_basis,
    trace_product,
)
from src.app.core.domain.models import BoundApplicability
from src.shared.exceptions import (
    DimensionMismatchError,
    DuplicateSubspaceError,
    HypothesisRejectedError,
    InvariantViolationError,
    PrincipalAngleComputationError,
    RankDeficientError,
)

logger = logging.getLogger(__name__)

_consistency_checks = False


def set_consistency_checks(enabled: bool) -> None:
    """Enable the redundant Frobenius-norm cross-check inside squared_distance."""
    global _consistency_checks
    _consistency_checks = enabled


# =============================================================================
# Subspaces
# =============================================================================


class Subspace:
    """
    An n-dimensional subspace of R^m.

    Equality and hashing go through the canonical projector; two different
    generator matrices with the same row space give equal Subspace values.
    """

    __slots__ = ("_generator", "_projector")

    def __init__(self, generator: ScaledIntMatrix, projector: RationalMatrix):
        if projector.shape != (generator.cols, generator.cols):
            raise DimensionMismatchError("Subspace", generator.shape, projector.shape)
        self._generator = generator
        self._projector = projector

    @property
    def generator(self) -> ScaledIntMatrix:
        return self._generator

    @property
    def projector(self) -> RationalMatrix:
        return self._projector

    @property
    def ambient_dim(self) -> int:
        return self._generator.cols

    @property
    def dim(self) -> int:
        return self._generator.rows

    @property
    def key(self) -> tuple:
        return self._projector.key

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Subspace):
            return NotImplemented
        return self._projector == other._projector

    def __hash__(self) -> int:
        return hash(self._projector)

    def __repr__(self) -> str:
        return f"Subspace(m={self.ambient_dim}, n={self.dim}, generator={self._generator.integer_rows()})"


def _orthogonal_rows_projector(rows: list[list[int]], norms: list[int]) -> RationalMatrix:
    """Π = Σ_r r rᵀ / (r·r) for pairwise orthogonal integer rows."""
    m = len(rows[0])
    denominator = reduce(math.lcm, norms, 1)
    numerators = np.zeros((m, m), dtype=object)
    for row, norm in zip(rows, norms):
        vector = np.array(row, dtype=object)
        numerators = numerators + np.outer(vector, vector) * (denominator // norm)
    if denominator & (denominator - 1) == 0:
        return RationalMatrix(numerators, denominator.bit_length() - 1)
    return RationalMatrix.from_fractions(
        [[Fraction(int(x), denominator) for x in row] for row in numerators]
    )


def _general_projector(rows: list[list[int]]) -> RationalMatrix:
    """Π = Gᵀ (G Gᵀ)⁻¹ G over the rationals."""
    g = np.array(rows, dtype=object)
    gram_inverse = np.array(fraction_inverse(np.dot(g, g.T).tolist()), dtype=object)
    return RationalMatrix.from_fractions(np.dot(np.dot(g.T, gram_inverse), g).tolist())


def subspace_from_generator(g: ScaledIntMatrix) -> Subspace:
    """
    Build a Subspace from an n×m generator matrix.

    The √2 scale of g does not affect the row space, so the projector is
    computed from the integer entries. Pairwise orthogonal rows (every
    generator in this package) take the rank-one sum path.

    Raises:
        RankDeficientError: If g does not have full row rank
        NonDyadicError: If the projector has a non-dyadic entry
    """
    rows = g.integer_rows()
    if not rows:
        return Subspace(g, RationalMatrix(np.zeros((g.cols, g.cols), dtype=int)))
    ints = np.array(rows, dtype=object)
    gram = np.dot(ints, ints.T)
    diagonal = [int(gram[r, r]) for r in range(len(rows))]
    off_diagonal_zero = all(
        gram[r, c] == 0 for r in range(len(rows)) for c in range(len(rows)) if r != c
    )
    if off_diagonal_zero and all(d > 0 for d in diagonal):
        projector = _orthogonal_rows_projector(rows, diagonal)
    else:
        rank = integer_rank(rows)
        if rank != len(rows):
            raise RankDeficientError(len(rows), rank)
        projector = _general_projector(rows)
    return Subspace(g, projector)


def coordinate_subspace(m: int, k: int) -> Subspace:
    """The span of the first k coordinate vectors of R^m, i.e. (I 0)."""
    entries = np.zeros((k, m), dtype=int)
    entries[:, :k] = np.identity(k, dtype=int)
    return subspace_from_generator(ScaledIntMatrix(entries))


def orthogonal_complement(p: Subspace) -> Subspace:
    """
    P⊥ with a primitive integer generator from kernel_basis.

    Projector(P⊥) = I − Projector(P) exactly.
    """
    kernel = kernel_basis(RationalMatrix(p.generator.entries))
    complement = RationalMatrix.identity(p.ambient_dim) - p.projector
    return Subspace(ScaledIntMatrix(kernel.entries), complement)


def _check_same_grassmannian(operation: str, p: Subspace, q: Subspace) -> None:
    if (p.ambient_dim, p.dim) != (q.ambient_dim, q.dim):
        raise DimensionMismatchError(operation, (p.ambient_dim, p.dim), (q.ambient_dim, q.dim))


def frobenius_squared_distance(p: Subspace, q: Subspace) -> Dyadic:
    """½‖Π_P − Π_Q‖_F², the projector form of the chordal distance squared."""
    difference = p.projector - q.projector
    total = sum(int(x) * int(x) for x in difference.entries.flat)
    return Dyadic(total, 2 * difference.exponent + 1)


def squared_distance(p: Subspace, q: Subspace) -> Dyadic:
    """
    Exact chordal distance squared d² = n − tr(Π_P Π_Q).

    Raises:
        DimensionMismatchError: If p and q are not in the same G(m, n)
    """
    _check_same_grassmannian("squared_distance", p, q)
    d_squared = Dyadic(p.dim) - trace_product(p.projector, q.projector)
    if _consistency_checks:
        frobenius = frobenius_squared_distance(p, q)
        if frobenius != d_squared:
            raise InvariantViolationError(
                "trace and Frobenius distances agree", f"{d_squared} != {frobenius}"
            )
    return d_squared


# =============================================================================
# Principal angles
# =============================================================================


@dataclass(frozen=True)
class PrincipalAngles:
    """
    Principal angles of a pair of n-dimensional subspaces.

    cos_squared is the exact multiset sorted in decreasing order (so it lines
    up with increasing angles), or None when no exact spectrum could be
    confirmed. angles are the floating-point θ_1 ≤ … ≤ θ_n in radians.
    """

    cos_squared: tuple[Dyadic, ...] | None
    angles: tuple[float, ...]

    @property
    def sin_squared_sum(self) -> Dyadic | None:
        if self.cos_squared is None:
            return None
        return sum((Dyadic(1) - c for c in self.cos_squared), Dyadic(0))


def float_cosines(p: Subspace, q: Subspace) -> np.ndarray:
    """
    Cosines of the principal angles from the SVD of orthonormalized bases.

    Raises:
        PrincipalAngleComputationError: If orthonormalization or the SVD fails
    """
    try:
        basis_p = scipy.linalg.orth(p.generator.to_float().T)
        basis_q = scipy.linalg.orth(q.generator.to_float().T)
        if basis_p.shape[1] != p.dim or basis_q.shape[1] != q.dim:
            raise PrincipalAngleComputationError(
                f"orthonormal bases have ranks {basis_p.shape[1]}, {basis_q.shape[1]}; expected {p.dim}"
            )
        singular_values = scipy.linalg.svd(basis_p.T @ basis_q, compute_uv=False)
    except (np.linalg.LinAlgError, scipy.linalg.LinAlgError, ValueError) as e:
        raise PrincipalAngleComputationError(f"SVD failed: {e}") from e
    if not np.all(np.isfinite(singular_values)):
        raise PrincipalAngleComputationError("SVD produced non-finite values")
    return np.clip(np.sort(singular_values)[::-1], 0.0, 1.0)


def iter_power_sums(p: Subspace, q: Subspace) -> Iterator[Dyadic]:
    """Exact tr((Π_P Π_Q)^k) for k = 1…n, one power at a time."""
    product = p.projector @ q.projector
    power = product
    for k in range(1, p.dim + 1):
        yield power.trace()
        if k < p.dim:
            power = power @ product


def check_spectrum(p: Subspace, q: Subspace, hypothesis: Sequence[Dyadic]) -> None:
    """
    Confirm a claimed squared-cosine multiset by matching exact power sums.

    Raises:
        HypothesisRejectedError: At the first power k whose sums disagree
    """
    _check_same_grassmannian("check_spectrum", p, q)
    if len(hypothesis) != p.dim:
        raise DimensionMismatchError("check_spectrum", len(hypothesis), p.dim)
    claimed = [Dyadic.from_fraction(Fraction(c)) if not isinstance(c, Dyadic) else c for c in hypothesis]
    for power, observed in enumerate(iter_power_sums(p, q), start=1):
        expected = sum((c**power for c in claimed), Dyadic(0))
        if expected != observed:
            raise HypothesisRejectedError(
                [str(c) for c in claimed], power, str(expected), str(observed)
            )


def _snap_to_dyadic(value: float, max_denominator: int) -> Dyadic | None:
    candidate = Fraction(value).limit_denominator(max_denominator)
    if candidate.denominator & (candidate.denominator - 1):
        return None
    return Dyadic.from_fraction(candidate)


def principal_angles(
    p: Subspace,
    q: Subspace,
    hypothesis: Sequence[Dyadic | Fraction | int] | None = None,
) -> PrincipalAngles:
    """
    Principal angles between p and q.

    The floating path always runs. With a hypothesis, the exact spectrum is
    the hypothesis after power-sum confirmation. Without one, the floating
    cos² values are snapped to nearby dyadic rationals and confirmed the same
    way; cos_squared is None if that confirmation fails.

    Raises:
        DimensionMismatchError: If p and q are not in the same G(m, n)
        HypothesisRejectedError: If the given hypothesis is refuted
        PrincipalAngleComputationError: If the floating computation fails
    """
    _check_same_grassmannian("principal_angles", p, q)
    cosines = float_cosines(p, q)
    angles = tuple(float(a) for a in np.arccos(cosines))

    if hypothesis is not None:
        claimed = sorted(
            (c if isinstance(c, Dyadic) else Dyadic.from_fraction(Fraction(c)) for c in hypothesis),
            reverse=True,
        )
        check_spectrum(p, q, claimed)
        return PrincipalAngles(cos_squared=tuple(claimed), angles=angles)

    snapped = [_snap_to_dyadic(float(c) ** 2, 1 << (2 * p.ambient_dim.bit_length())) for c in cosines]
    if any(s is None for s in snapped):
        return PrincipalAngles(cos_squared=None, angles=angles)
    try:
        check_spectrum(p, q, snapped)
    except HypothesisRejectedError as e:
        logger.debug("Snapped spectrum not confirmed: %s", e)
        return PrincipalAngles(cos_squared=None, angles=angles)
    return PrincipalAngles(cos_squared=tuple(sorted(snapped, reverse=True)), angles=angles)


# =============================================================================
# Bounds
# =============================================================================


def rankin_bound(m: int, n: int) -> Fraction:
    """
    The orthoplex bound n(m−n)/m on the minimal squared chordal distance.

    Raises:
        ValueError: Unless 0 < n < m
    """
    if not 0 < n < m:
        raise ValueError(f"rankin_bound needs 0 < n < m, got m={m}, n={n}")
    return Fraction(n * (m - n), m)


def bound_applicability(m: int, n: int, N: int) -> BoundApplicability:
    """
    Whether the bound applies to N subspaces and whether equality is possible.

    applicable ⇔ N > m(m+1)/2; equality_possible ⇔ N ≤ (m−1)(m+2).
    """
    return BoundApplicability(
        applicable=2 * N > m * (m + 1),
        equality_possible=N <= (m - 1) * (m + 2),
    )


# =============================================================================
# Packings
# =============================================================================


class Packing:
    """
    An ordered set of subspaces sharing (m, n), without duplicate projectors.

    Raises:
        DimensionMismatchError: If members live in different Grassmannians
        DuplicateSubspaceError: If two members have the same projector
    """

    def __init__(self, subspaces: Sequence[Subspace]):
        self._subspaces = tuple(subspaces)
        self._index: dict[tuple, int] = {}
        if self._subspaces:
            first = self._subspaces[0]
            for position, subspace in enumerate(self._subspaces):
                _check_same_grassmannian("Packing", first, subspace)
                previous = self._index.setdefault(subspace.key, position)
                if previous != position:
                    raise DuplicateSubspaceError(previous, position)

    @property
    def subspaces(self) -> tuple[Subspace, ...]:
        return self._subspaces

    @property
    def ambient_dim(self) -> int:
        return self._subspaces[0].ambient_dim if self._subspaces else 0

    @property
    def dim(self) -> int:
        return self._subspaces[0].dim if self._subspaces else 0

    def __len__(self) -> int:
        return len(self._subspaces)

    def __iter__(self) -> Iterator[Subspace]:
        return iter(self._subspaces)

    def __getitem__(self, position: int) -> Subspace:
        return self._subspaces[position]

    def __contains__(self, subspace: object) -> bool:
        return isinstance(subspace, Subspace) and subspace.key in self._index

    def index_of(self, subspace: Subspace) -> int:
        return self._index[subspace.key]

    def projector_keys(self) -> frozenset[tuple]:
        return frozenset(self._index)

    def same_set(self, other: "Packing") -> bool:
        return self.projector_keys() == other.projector_keys()

    @cached_property
    def pair_stats(self) -> dict[Dyadic, int]:
        """Histogram of exact squared distances over unordered pairs."""
        return distance_table(self._subspaces).histogram()


# =============================================================================
# Pairwise distance tables
# =============================================================================


def flatten_projectors(subspaces: Sequence[Subspace]) -> tuple[np.ndarray, int]:
    """
    Stack projectors as rows of integers over a common denominator 2^E.

    For symmetric projectors tr(Π_i Π_j) = X_i · X_j / 4^E.
    """
    exponent = max((s.projector.exponent for s in subspaces), default=0)
    rows = [s.projector.numerators_at(exponent).reshape(-1) for s in subspaces]
    if not rows:
        return np.zeros((0, 0), dtype=object), exponent
    return np.vstack(rows).astype(object), exponent


def gram_block(flat: np.ndarray, start: int, stop: int) -> np.ndarray:
    """Exact inner products of rows start:stop against rows start: onward."""
    return np.dot(flat[start:stop], flat[start:].T)


@dataclass(frozen=True, eq=False)
class DistanceTable:
    """
    Exact pairwise squared distances of N subspaces in G(m, n).

    gram holds X_i · X_j for all ordered pairs; d²_ij = n − gram_ij / 4^E.
    """

    dim: int
    exponent: int
    gram: np.ndarray

    def __len__(self) -> int:
        return self.gram.shape[0]

    def squared(self, i: int, j: int) -> Dyadic:
        return self._from_gram(int(self.gram[i, j]))

    def row_histogram(self, i: int) -> dict[Dyadic, int]:
        """Distances from member i to every other member."""
        counts: dict[int, int] = {}
        for j, value in enumerate(self.gram[i]):
            if j != i:
                counts[int(value)] = counts.get(int(value), 0) + 1
        return {self._from_gram(value): count for value, count in counts.items()}

    def histogram(self) -> dict[Dyadic, int]:
        counts: dict[int, int] = {}
        size = len(self)
        for i in range(size):
            for value in self.gram[i, i + 1 :]:
                counts[int(value)] = counts.get(int(value), 0) + 1
        return {self._from_gram(value): count for value, count in counts.items()}

    def pairs_with(self, predicate) -> Iterator[tuple[int, int]]:
        """Unordered pairs (i < j) whose squared distance satisfies predicate."""
        size = len(self)
        for i in range(size):
            for j in range(i + 1, size):
                if predicate(self.squared(i, j)):
                    yield i, j

    def _from_gram(self, value: int) -> Dyadic:
        return Dyadic((self.dim << (2 * self.exponent)) - value, 2 * self.exponent)


def assemble_table(dim: int, exponent: int, size: int, blocks: Sequence[tuple[int, int, np.ndarray]]) -> DistanceTable:
    """Fill a symmetric gram matrix from upper-triangular row blocks."""
    gram = np.zeros((size, size), dtype=object)
    for start, stop, block in blocks:
        gram[start:stop, start:] = block
        gram[start:, start:stop] = block.T
    return DistanceTable(dim=dim, exponent=exponent, gram=gram)


def distance_table(subspaces: Sequence[Subspace], chunk_rows: int = 64) -> DistanceTable:
    """Sequential exact pairwise sweep."""
    flat, exponent = flatten_projectors(subspaces)
    size = len(subspaces)
    blocks = [
        (start, min(start + chunk_rows, size), gram_block(flat, start, min(start + chunk_rows, size)))
        for start in range(0, size, chunk_rows)
    ]
    dim = subspaces[0].dim if subspaces else 0
    return assemble_table(dim, exponent, size, blocks)
