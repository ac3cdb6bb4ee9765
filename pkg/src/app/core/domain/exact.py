"""
Exact arithmetic substrate.

All geometry in grasspack is checked without floating point. Two matrix
types cover every object that arises:

- ScaledIntMatrix: an integer matrix times (√2)^(-k). Group elements
  (permutations, H, H') and generator matrices of subspaces live here.
- RationalMatrix: an integer matrix times 2^(-e), i.e. a matrix of dyadic
  rationals. Projection matrices live here.

Entries are arbitrary-precision Python integers held in numpy object arrays,
so numpy supplies the loops while Python supplies the integers.
"""
import math
from fractions import Fraction
from functools import reduce, total_ordering
from typing import Iterable, Sequence

import numpy as np
import sympy

from src.shared.exceptions import (
    DimensionMismatchError,
    InvariantViolationError,
    NonDyadicError,
    RankDeficientError,
)


def two_adic_valuation(value: int) -> int:
    """Largest v with 2^v dividing value (value must be nonzero)."""
    return (value & -value).bit_length() - 1


def _as_object_array(entries: Iterable | np.ndarray) -> np.ndarray:
    """
    Copy entries into a 2-D numpy object array of Python ints.

    Object-dtype arrays are taken to hold Python ints already (every internal
    operation produces them); anything else is converted and checked.
    """
    if isinstance(entries, np.ndarray):
        if entries.ndim != 2:
            raise ValueError(f"expected a 2-dimensional array, got shape {entries.shape}")
        if entries.dtype == object:
            return entries.copy()
        if entries.dtype.kind not in "iub":
            raise TypeError(f"matrix entries must be integers, got dtype {entries.dtype}")
        if entries.size == 0:
            return np.empty(entries.shape, dtype=object)
        return np.array(entries.tolist(), dtype=object)
    rows = [list(row) for row in entries]
    if not rows:
        return np.empty((0, 0), dtype=object)
    array = np.array(rows, dtype=object)
    if array.ndim != 2:
        raise ValueError("matrix rows must have equal lengths")
    for index, value in np.ndenumerate(array):
        if isinstance(value, np.integer):
            array[index] = int(value)
        elif not isinstance(value, int):
            raise TypeError(f"matrix entries must be integers, got {value!r}")
    return array


def _frozen(array: np.ndarray) -> np.ndarray:
    array.flags.writeable = False
    return array


def _common_gcd(array: np.ndarray) -> int:
    if array.size == 0:
        return 0
    return math.gcd(*(int(x) for x in array.flat))


def _is_power_of_two(value: int) -> bool:
    return value > 0 and value & (value - 1) == 0


# =============================================================================
# Dyadic rationals
# =============================================================================


@total_ordering
class Dyadic:
    """
    A rational number numerator / 2^exponent with exponent >= 0.

    Always held in canonical form: numerator odd, or numerator = 0 and
    exponent = 0. Equality is therefore structural; hashing agrees with
    Fraction and int so a Dyadic can key the same dict as its value.
    """

    __slots__ = ("_numerator", "_exponent")

    def __init__(self, numerator: int, exponent: int = 0):
        if exponent < 0:
            raise ValueError("Dyadic exponent must be non-negative")
        numerator = int(numerator)
        if numerator == 0:
            exponent = 0
        elif exponent:
            shift = min(two_adic_valuation(numerator), exponent)
            numerator >>= shift
            exponent -= shift
        self._numerator = numerator
        self._exponent = exponent

    @property
    def numerator(self) -> int:
        return self._numerator

    @property
    def exponent(self) -> int:
        return self._exponent

    @classmethod
    def from_fraction(cls, value: Fraction | int) -> "Dyadic":
        """
        Convert an exact rational to a Dyadic.

        Raises:
            NonDyadicError: If the reduced denominator is not a power of two
        """
        value = Fraction(value)
        if not _is_power_of_two(value.denominator):
            raise NonDyadicError(value)
        return cls(value.numerator, value.denominator.bit_length() - 1)

    def to_fraction(self) -> Fraction:
        return Fraction(self._numerator, 1 << self._exponent)

    def _coerce(self, other: object) -> "Dyadic | None":
        if isinstance(other, Dyadic):
            return other
        if isinstance(other, int):
            return Dyadic(other)
        if isinstance(other, Fraction) and _is_power_of_two(other.denominator):
            return Dyadic.from_fraction(other)
        return None

    def __add__(self, other: object) -> "Dyadic":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        exponent = max(self._exponent, rhs._exponent)
        total = (self._numerator << (exponent - self._exponent)) + (
            rhs._numerator << (exponent - rhs._exponent)
        )
        return Dyadic(total, exponent)

    __radd__ = __add__

    def __neg__(self) -> "Dyadic":
        return Dyadic(-self._numerator, self._exponent)

    def __sub__(self, other: object) -> "Dyadic":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return self + (-rhs)

    def __rsub__(self, other: object) -> "Dyadic":
        lhs = self._coerce(other)
        if lhs is None:
            return NotImplemented
        return lhs - self

    def __mul__(self, other: object) -> "Dyadic":
        rhs = self._coerce(other)
        if rhs is None:
            return NotImplemented
        return Dyadic(self._numerator * rhs._numerator, self._exponent + rhs._exponent)

    __rmul__ = __mul__

    def __pow__(self, power: int) -> "Dyadic":
        if power < 0:
            raise ValueError("negative powers leave the dyadic rationals")
        return Dyadic(self._numerator**power, self._exponent * power)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Dyadic):
            return self._numerator == other._numerator and self._exponent == other._exponent
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __lt__(self, other: object) -> bool:
        if isinstance(other, Dyadic):
            return self.to_fraction() < other.to_fraction()
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() < other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def __float__(self) -> float:
        return self._numerator / (1 << self._exponent)

    def __repr__(self) -> str:
        return f"Dyadic({self._numerator}, {self._exponent})"

    def __str__(self) -> str:
        if self._exponent == 0:
            return str(self._numerator)
        return f"{self._numerator}/{1 << self._exponent}"


# =============================================================================
# Integer matrices scaled by powers of sqrt(2)
# =============================================================================


class ScaledIntMatrix:
    """
    The matrix (√2)^(-k) · entries with integer entries and k >= 0.

    Canonical form: factors of 2 = (√2)^2 common to every entry are absorbed
    into k until either some entry is odd or k < 2. Two ScaledIntMatrix
    values are equal iff their canonical forms are.
    """

    __slots__ = ("_entries", "_sqrt2_exponent", "_key")

    def __init__(self, entries: Iterable | np.ndarray, sqrt2_exponent: int = 0):
        if sqrt2_exponent < 0:
            raise ValueError("sqrt2_exponent must be non-negative")
        array = _as_object_array(entries)
        gcd = _common_gcd(array)
        if gcd == 0:
            sqrt2_exponent = 0
        else:
            shift = min(two_adic_valuation(gcd), sqrt2_exponent // 2)
            if shift:
                array = array // (1 << shift)
                sqrt2_exponent -= 2 * shift
        self._entries = _frozen(array)
        self._sqrt2_exponent = sqrt2_exponent
        self._key: tuple | None = None

    @classmethod
    def identity(cls, size: int) -> "ScaledIntMatrix":
        return cls(np.identity(size, dtype=int))

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ScaledIntMatrix":
        return cls(np.zeros((rows, cols), dtype=int))

    @property
    def entries(self) -> np.ndarray:
        """Read-only integer entries (object dtype)."""
        return self._entries

    @property
    def sqrt2_exponent(self) -> int:
        return self._sqrt2_exponent

    @property
    def rows(self) -> int:
        return self._entries.shape[0]

    @property
    def cols(self) -> int:
        return self._entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def key(self) -> tuple:
        """Hashable canonical key."""
        if self._key is None:
            self._key = (
                self.rows,
                self.cols,
                self._sqrt2_exponent,
                tuple(int(x) for x in self._entries.flat),
            )
        return self._key

    def integer_rows(self) -> list[list[int]]:
        return [[int(x) for x in row] for row in self._entries]

    def transpose(self) -> "ScaledIntMatrix":
        return ScaledIntMatrix(self._entries.T, self._sqrt2_exponent)

    @property
    def T(self) -> "ScaledIntMatrix":
        return self.transpose()

    def row(self, index: int) -> "ScaledIntMatrix":
        return ScaledIntMatrix(self._entries[index : index + 1, :], self._sqrt2_exponent)

    def scale_by_sqrt2(self, power: int = 1) -> "ScaledIntMatrix":
        """Return (√2)^power times this matrix."""
        exponent = self._sqrt2_exponent - power
        entries = self._entries
        if exponent < 0:
            # (√2)^(2t) = 2^t; keep the exponent non-negative by lifting entries
            lift = (-exponent + 1) // 2
            entries = entries * (1 << lift)
            exponent += 2 * lift
        return ScaledIntMatrix(entries, exponent)

    def __matmul__(self, other: "ScaledIntMatrix") -> "ScaledIntMatrix":
        return mat_mul(self, other)

    def __neg__(self) -> "ScaledIntMatrix":
        return ScaledIntMatrix(-self._entries, self._sqrt2_exponent)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ScaledIntMatrix):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def to_rational(self) -> "RationalMatrix":
        """
        Convert to a RationalMatrix.

        Raises:
            NonDyadicError: If the √2 exponent is odd (the matrix is irrational)
        """
        if self._sqrt2_exponent % 2:
            raise NonDyadicError(f"(√2)^-{self._sqrt2_exponent} scaled matrix")
        return RationalMatrix(self._entries, self._sqrt2_exponent // 2)

    def to_float(self) -> np.ndarray:
        return self._entries.astype(float) / math.sqrt(2) ** self._sqrt2_exponent

    def monomial_form(self) -> tuple[np.ndarray, np.ndarray] | None:
        """
        Describe a signed permutation matrix (k = 0).

        Returns:
            (columns, signs) with entry [r, columns[r]] = signs[r] and all other
            entries zero, or None if the matrix is not a signed permutation.
        """
        if self._sqrt2_exponent != 0 or self.rows != self.cols:
            return None
        columns = np.empty(self.rows, dtype=np.int64)
        signs = np.empty(self.rows, dtype=object)
        for r, row in enumerate(self._entries):
            nonzero = [c for c, value in enumerate(row) if value != 0]
            if len(nonzero) != 1 or row[nonzero[0]] not in (1, -1):
                return None
            columns[r] = nonzero[0]
            signs[r] = int(row[nonzero[0]])
        if len(set(columns.tolist())) != self.rows:
            return None
        return columns, signs

    def __repr__(self) -> str:
        return f"ScaledIntMatrix({self.integer_rows()}, sqrt2_exponent={self._sqrt2_exponent})"


def mat_mul(a: ScaledIntMatrix, b: ScaledIntMatrix) -> ScaledIntMatrix:
    """
    Exact product of two ScaledIntMatrix values, in canonical form.

    Raises:
        DimensionMismatchError: If a.cols != b.rows
    """
    if a.cols != b.rows:
        raise DimensionMismatchError("mat_mul", a.shape, b.shape)
    product = np.dot(a.entries, b.entries) if a.rows and b.cols else np.zeros((a.rows, b.cols), dtype=object)
    return ScaledIntMatrix(product, a.sqrt2_exponent + b.sqrt2_exponent)


# =============================================================================
# Dyadic rational matrices
# =============================================================================


class RationalMatrix:
    """
    The matrix 2^(-e) · entries with integer entries: a matrix of Dyadic values.

    Canonical form: some entry odd, or e = 0.
    """

    __slots__ = ("_entries", "_exponent", "_key")

    def __init__(self, entries: Iterable | np.ndarray, exponent: int = 0):
        if exponent < 0:
            raise ValueError("exponent must be non-negative")
        array = _as_object_array(entries)
        gcd = _common_gcd(array)
        if gcd == 0:
            exponent = 0
        else:
            shift = min(two_adic_valuation(gcd), exponent)
            if shift:
                array = array // (1 << shift)
                exponent -= shift
        self._entries = _frozen(array)
        self._exponent = exponent
        self._key: tuple | None = None

    @classmethod
    def identity(cls, size: int) -> "RationalMatrix":
        return cls(np.identity(size, dtype=int))

    @classmethod
    def from_fractions(cls, rows: Sequence[Sequence[Fraction | int]]) -> "RationalMatrix":
        """
        Build from exact rationals.

        Raises:
            NonDyadicError: If some entry is not a dyadic rational
        """
        values = [[Fraction(x) for x in row] for row in rows]
        denominator = 1
        for row in values:
            for value in row:
                if not _is_power_of_two(value.denominator):
                    raise NonDyadicError(value)
                denominator = max(denominator, value.denominator)
        exponent = denominator.bit_length() - 1
        scaled = [[int(value * denominator) for value in row] for row in values]
        if not values:
            return cls(np.zeros((0, 0), dtype=int), 0)
        return cls(scaled, exponent)

    @property
    def entries(self) -> np.ndarray:
        """Read-only integer numerators over the common denominator 2^exponent."""
        return self._entries

    @property
    def exponent(self) -> int:
        return self._exponent

    @property
    def rows(self) -> int:
        return self._entries.shape[0]

    @property
    def cols(self) -> int:
        return self._entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    @property
    def key(self) -> tuple:
        if self._key is None:
            self._key = (
                self.rows,
                self.cols,
                self._exponent,
                tuple(int(x) for x in self._entries.flat),
            )
        return self._key

    def entry(self, row: int, col: int) -> Dyadic:
        return Dyadic(int(self._entries[row, col]), self._exponent)

    def to_fractions(self) -> list[list[Fraction]]:
        denominator = 1 << self._exponent
        return [[Fraction(int(x), denominator) for x in row] for row in self._entries]

    def numerators_at(self, exponent: int) -> np.ndarray:
        """Entries over the denominator 2^exponent (exponent >= self.exponent)."""
        if exponent < self._exponent:
            raise ValueError("cannot express entries over a smaller denominator")
        return self._entries * (1 << (exponent - self._exponent))

    def transpose(self) -> "RationalMatrix":
        return RationalMatrix(self._entries.T, self._exponent)

    @property
    def T(self) -> "RationalMatrix":
        return self.transpose()

    def trace(self) -> Dyadic:
        if self.rows != self.cols:
            raise DimensionMismatchError("trace", self.shape, self.shape)
        return Dyadic(sum(int(x) for x in self._entries.diagonal()), self._exponent)

    def is_symmetric(self) -> bool:
        return self.rows == self.cols and bool(np.all(self._entries == self._entries.T))

    def __matmul__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.cols != other.rows:
            raise DimensionMismatchError("matmul", self.shape, other.shape)
        return RationalMatrix(np.dot(self._entries, other._entries), self._exponent + other._exponent)

    def __add__(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.shape != other.shape:
            raise DimensionMismatchError("add", self.shape, other.shape)
        exponent = max(self._exponent, other._exponent)
        return RationalMatrix(self.numerators_at(exponent) + other.numerators_at(exponent), exponent)

    def __neg__(self) -> "RationalMatrix":
        return RationalMatrix(-self._entries, self._exponent)

    def __sub__(self, other: "RationalMatrix") -> "RationalMatrix":
        return self + (-other)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RationalMatrix):
            return NotImplemented
        return self.key == other.key

    def __hash__(self) -> int:
        return hash(self.key)

    def to_scaled_int(self) -> ScaledIntMatrix:
        """Lossless conversion: 2^(-e) = (√2)^(-2e)."""
        return ScaledIntMatrix(self._entries, 2 * self._exponent)

    def to_float(self) -> np.ndarray:
        return self._entries.astype(float) / float(1 << self._exponent)

    def __repr__(self) -> str:
        return f"RationalMatrix({[[int(x) for x in row] for row in self._entries]}, exponent={self._exponent})"


def trace_product(a: RationalMatrix, b: RationalMatrix) -> Dyadic:
    """
    Exact tr(a · b) without forming the product: Σ_ij a_ij · b_ji.

    Raises:
        DimensionMismatchError: If a and b are not square matrices of the same size
    """
    if a.rows != a.cols or a.shape != b.shape:
        raise DimensionMismatchError("trace_product", a.shape, b.shape)
    total = int(np.sum(a.entries * b.entries.T)) if a.rows else 0
    return Dyadic(total, a.exponent + b.exponent)


# =============================================================================
# Fraction-free elimination
# =============================================================================


def _primitive(row: list[int]) -> list[int]:
    divisor = math.gcd(*row) if row else 0
    if divisor > 1:
        return [x // divisor for x in row]
    return row


def _sign_normalized(row: list[int]) -> list[int]:
    leading = next((x for x in row if x != 0), 0)
    return [-x for x in row] if leading < 0 else row


def row_reduce(rows: Sequence[Sequence[int]]) -> tuple[list[list[int]], list[int]]:
    """
    Fraction-free Gauss-Jordan elimination over the integers.

    Pivoting rule: scan columns left to right; the pivot is the nonzero entry
    of smallest row index at or below the current pivot row. Each eliminated
    row is divided by the gcd of its entries, keeping numbers small.

    Returns:
        (reduced_rows, pivot_columns): one reduced row per pivot; every pivot
        column is zero outside its pivot row.
    """
    matrix = [list(map(int, row)) for row in rows]
    n_rows = len(matrix)
    n_cols = len(matrix[0]) if matrix else 0
    pivots: list[int] = []
    pivot_row = 0
    for col in range(n_cols):
        if pivot_row == n_rows:
            break
        candidate = next((r for r in range(pivot_row, n_rows) if matrix[r][col] != 0), None)
        if candidate is None:
            continue
        matrix[pivot_row], matrix[candidate] = matrix[candidate], matrix[pivot_row]
        pivot = matrix[pivot_row][col]
        for r in range(n_rows):
            factor = matrix[r][col]
            if r == pivot_row or factor == 0:
                continue
            matrix[r] = _primitive(
                [pivot * x - factor * y for x, y in zip(matrix[r], matrix[pivot_row])]
            )
        pivots.append(col)
        pivot_row += 1
    return matrix[:pivot_row], pivots


def integer_rank(rows: Sequence[Sequence[int]]) -> int:
    return len(row_reduce(rows)[1])


def integer_kernel(rows: Sequence[Sequence[int]], n_cols: int) -> list[list[int]]:
    """
    Primitive integer basis of {x : rows · x = 0}, one vector per free column.

    Vectors are ordered by free column and sign-normalized (first nonzero
    entry positive), so the output is a deterministic function of the input.
    """
    reduced, pivots = row_reduce(rows) if rows else ([], [])
    pivot_set = set(pivots)
    lcm = reduce(math.lcm, (abs(row[p]) for row, p in zip(reduced, pivots)), 1)
    basis = []
    for free in range(n_cols):
        if free in pivot_set:
            continue
        vector = [0] * n_cols
        vector[free] = lcm
        for row, p in zip(reduced, pivots):
            vector[p] = -row[free] * lcm // row[p]
        basis.append(_sign_normalized(_primitive(vector)))
    return basis


def kernel_basis(g: RationalMatrix) -> RationalMatrix:
    """
    Integer basis of the orthogonal complement of the row space of g.

    Returns an (m−n)×m matrix of full row rank whose rows are exactly
    orthogonal to every row of g.

    Raises:
        RankDeficientError: If g does not have full row rank
    """
    rows = [[int(x) for x in row] for row in g.entries]
    rank = integer_rank(rows) if rows else 0
    if rank != g.rows:
        raise RankDeficientError(g.rows, rank)
    basis = integer_kernel(rows, g.cols)
    if not basis:
        return RationalMatrix(np.zeros((0, g.cols), dtype=int))
    kernel = RationalMatrix(basis)
    if np.any(np.dot(g.entries, kernel.entries.T) != 0):
        raise InvariantViolationError("kernel orthogonality", "g · kernelᵀ != 0")
    return kernel


def fraction_inverse(matrix: Sequence[Sequence[int | Fraction]]) -> list[list[Fraction]]:
    """
    Exact inverse of a square rational matrix, computed by sympy.

    Raises:
        RankDeficientError: If the matrix is singular
    """
    exact = sympy.Matrix([[sympy.Rational(str(Fraction(x))) for x in row] for row in matrix])
    rank = exact.rank()
    if rank < exact.rows:
        raise RankDeficientError(exact.rows, rank)
    return [[Fraction(int(x.p), int(x.q)) for x in row] for row in exact.inv().tolist()]
