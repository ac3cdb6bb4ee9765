"""Custom exceptions for grasspack."""
from typing import Any


class GrasspackError(Exception):
    """Base class for every error raised by grasspack."""


class DimensionMismatchError(GrasspackError):
    """Raised when two operands have incompatible shapes or dimensions."""

    def __init__(self, operation: str, left: Any, right: Any):
        """
        Initialize the exception.

        Args:
            operation: Name of the operation that was attempted
            left: Shape or dimensions of the left operand
            right: Shape or dimensions of the right operand
        """
        super().__init__(f"{operation}: incompatible dimensions {left} and {right}")
        self.operation = operation
        self.left = left
        self.right = right


class RankDeficientError(GrasspackError):
    """Raised when a matrix that must have full row rank does not."""

    def __init__(self, rows: int, rank: int):
        """
        Initialize the exception.

        Args:
            rows: Number of rows of the offending matrix
            rank: Rank that was actually found
        """
        super().__init__(f"matrix with {rows} rows has rank {rank}, expected full row rank")
        self.rows = rows
        self.rank = rank


class NonDyadicError(GrasspackError):
    """Raised when a rational value has a denominator that is not a power of two."""

    def __init__(self, value: Any):
        super().__init__(f"{value} is not a dyadic rational")
        self.value = value


class InvariantViolationError(GrasspackError):
    """Raised when an internal mathematical invariant does not hold."""

    def __init__(self, invariant: str, detail: str = ""):
        """
        Initialize the exception.

        Args:
            invariant: Short name of the violated invariant
            detail: Human-readable context (offending values, indices)
        """
        message = f"invariant violated: {invariant}"
        if detail:
            message = f"{message} ({detail})"
        super().__init__(message)
        self.invariant = invariant
        self.detail = detail


class DuplicateSubspaceError(GrasspackError):
    """Raised when a packing would contain the same subspace twice."""

    def __init__(self, first_index: int, second_index: int):
        super().__init__(
            f"subspaces at positions {first_index} and {second_index} have the same projector"
        )
        self.first_index = first_index
        self.second_index = second_index


class PrincipalAngleComputationError(GrasspackError):
    """Raised when the floating-point principal angle computation fails."""


class HypothesisRejectedError(GrasspackError):
    """Raised when a claimed squared-cosine spectrum is refuted by exact power sums."""

    def __init__(self, hypothesis: Any, power: int, expected: Any, observed: Any):
        """
        Initialize the exception.

        Args:
            hypothesis: The claimed multiset of squared cosines
            power: First power k at which tr((Π_P Π_Q)^k) disagreed
            expected: Power sum predicted by the hypothesis
            observed: Exact trace that was computed
        """
        super().__init__(
            f"spectrum {hypothesis} rejected at power {power}: "
            f"expected {expected}, observed {observed}"
        )
        self.hypothesis = hypothesis
        self.power = power
        self.expected = expected
        self.observed = observed


class OrbitLimitExceededError(GrasspackError):
    """Raised when an orbit or group closure grows beyond its configured limit."""

    def __init__(self, what: str, limit: int):
        super().__init__(f"{what} exceeded the limit of {limit} elements")
        self.what = what
        self.limit = limit


class InvalidLevelError(GrasspackError):
    """Raised when a level i (dimension m = 2^i) is outside the supported range."""

    def __init__(self, level: int, reason: str):
        super().__init__(f"invalid level {level}: {reason}")
        self.level = level
        self.reason = reason


class UnfaithfulRepresentationError(GrasspackError):
    """Raised when a permutation domain does not span the space it acts on."""

    def __init__(self, rank: int, dimension: int):
        super().__init__(
            f"permutation domain spans a space of dimension {rank}, expected {dimension}"
        )
        self.rank = rank
        self.dimension = dimension


class ExportFormatError(GrasspackError):
    """Raised when an export record cannot be read back."""

    def __init__(self, source: str, reason: str):
        super().__init__(f"{source}: {reason}")
        self.source = source
        self.reason = reason
