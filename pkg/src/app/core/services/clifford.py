"""
The real Clifford group G_i acting on R^m, m = 2^i.

Coordinates are indexed by binary i-tuples x = (x_1, …, x_i) in lexicographic
order, x_1 most significant: index(x) = Σ_j x_j 2^(i−j). Group elements act
on the right: a subspace with generator matrix G goes to G·g, its projector
to gᵀ Π g, and a row vector v to v·g.
"""
import itertools
import logging
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterator, Sequence

import numpy as np

from src.app.config import OrbitSettings
from src.app.core.domain.exact import (
    RationalMatrix,
    ScaledIntMatrix,
    integer_rank,
    mat_mul,
)
from src.app.core.domain.grassmann import Packing, Subspace, coordinate_subspace
from src.app.core.domain.models import VerificationReport
from src.app.core.services.construction import build_family, check_level
from src.shared.exceptions import (
    InvariantViolationError,
    OrbitLimitExceededError,
)

logger = logging.getLogger(__name__)


# =============================================================================
# Group elements
# =============================================================================


class GroupElement:
    """
    An orthogonal matrix over Z[1/√2], optionally carrying the generator word
    that produced it. Equality and hashing ignore the word.
    """

    __slots__ = ("_matrix", "_word", "_monomial")

    def __init__(self, matrix: ScaledIntMatrix, word: tuple[int, ...] = (), check: bool = True):
        if check and not is_orthogonal(matrix):
            raise InvariantViolationError("group element is orthogonal", repr(matrix))
        self._matrix = matrix
        self._word = word
        self._monomial = matrix.monomial_form()

    @property
    def matrix(self) -> ScaledIntMatrix:
        return self._matrix

    @property
    def word(self) -> tuple[int, ...]:
        return self._word

    @property
    def size(self) -> int:
        return self._matrix.rows

    @property
    def monomial(self) -> tuple[np.ndarray, np.ndarray] | None:
        """(columns, signs) when the element is a signed permutation matrix."""
        return self._monomial

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(mat_mul(self._matrix, other._matrix), self._word + other._word, check=False)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupElement):
            return NotImplemented
        return self._matrix == other._matrix

    def __hash__(self) -> int:
        return hash(self._matrix)

    def __repr__(self) -> str:
        return f"GroupElement({self._matrix!r}, word={self._word})"


def is_orthogonal(matrix: ScaledIntMatrix) -> bool:
    """Exact test of g · gᵀ = I."""
    if matrix.rows != matrix.cols:
        return False
    return mat_mul(matrix, matrix.transpose()) == ScaledIntMatrix.identity(matrix.rows)


@dataclass(frozen=True)
class GeneratorSet:
    """Named generators of a subgroup of the orthogonal group of R^(2^i)."""

    level: int
    names: tuple[str, ...]
    elements: tuple[GroupElement, ...]

    def __len__(self) -> int:
        return len(self.elements)

    def __iter__(self) -> Iterator[GroupElement]:
        return iter(self.elements)

    def __getitem__(self, index: int) -> GroupElement:
        return self.elements[index]

    def by_name(self, name: str) -> GroupElement:
        return self.elements[self.names.index(name)]

    @property
    def dimension(self) -> int:
        return 1 << self.level


# =============================================================================
# Generators
# =============================================================================


def coordinate_bits(index: int, level: int) -> tuple[int, ...]:
    """Binary tuple (x_1, …, x_i) of a coordinate index, x_1 most significant."""
    return tuple((index >> (level - j)) & 1 for j in range(1, level + 1))


def coordinate_index(bits: Sequence[int]) -> int:
    index = 0
    for bit in bits:
        index = (index << 1) | (bit & 1)
    return index


def gf2_rank(rows: Sequence[Sequence[int]]) -> int:
    """Rank over the field with two elements."""
    vectors = [coordinate_index(row) for row in rows]
    rank = 0
    width = len(rows[0]) if rows else 0
    for bit in reversed(range(width)):
        pivot = next((v for v in vectors if (v >> bit) & 1), None)
        if pivot is None:
            continue
        vectors.remove(pivot)
        vectors = [v ^ pivot if (v >> bit) & 1 else v for v in vectors]
        rank += 1
    return rank


def affine_permutation(level: int, linear: Sequence[Sequence[int]], shift: Sequence[int]) -> GroupElement:
    """
    The permutation matrix π_{A,b} with π[x, Ax + b] = 1.

    Raises:
        ValueError: If A is not invertible over F₂
    """
    if gf2_rank(linear) != level:
        raise ValueError(f"linear part {linear} is not invertible over F2")
    m = 1 << level
    entries = np.zeros((m, m), dtype=int)
    for index in range(m):
        x = coordinate_bits(index, level)
        image = [(sum(a * xj for a, xj in zip(row, x)) + b) % 2 for row, b in zip(linear, shift)]
        entries[index, coordinate_index(image)] = 1
    return GroupElement(ScaledIntMatrix(entries))


def _identity_bits(level: int) -> list[list[int]]:
    return [[int(r == c) for c in range(level)] for r in range(level)]


def hadamard_block(level: int) -> GroupElement:
    """H = diag(H₂, …, H₂) with H₂ = (1/√2)[[1, 1], [1, −1]]."""
    m = 1 << level
    entries = np.zeros((m, m), dtype=int)
    for start in range(0, m, 2):
        entries[start : start + 2, start : start + 2] = [[1, 1], [1, -1]]
    return GroupElement(ScaledIntMatrix(entries, sqrt2_exponent=1))


H4_ENTRIES = [
    [1, 1, 1, 1],
    [1, -1, 1, -1],
    [1, 1, -1, -1],
    [1, -1, -1, 1],
]


def hadamard_prime_block(level: int) -> GroupElement:
    """H′ = diag(H₄, …, H₄) with H₄ = ½ · H4_ENTRIES (level ≥ 2)."""
    if level < 2:
        raise ValueError("H' needs level >= 2")
    m = 1 << level
    entries = np.zeros((m, m), dtype=int)
    for start in range(0, m, 4):
        entries[start : start + 4, start : start + 4] = H4_ENTRIES
    return GroupElement(ScaledIntMatrix(entries, sqrt2_exponent=2))


def make_generators(level: int, include_h: bool = True, include_h_prime: bool = False) -> GeneratorSet:
    """
    Small generating set of G_i (or of H_i with include_h=False, include_h_prime=True).

    The affine group is generated by the translation x ↦ x + e₁ together with
    the cyclic coordinate shift and the transvection e₂ ↦ e₁ + e₂ of GL(i, 2);
    at level 1 the linear part is trivial and an identity stands in for it.

    Raises:
        InvalidLevelError: If level < 1
    """
    check_level(level)
    names: list[str] = []
    elements: list[GroupElement] = []

    translation = [int(j == 0) for j in range(level)]
    names.append("translate_e1")
    elements.append(affine_permutation(level, _identity_bits(level), translation))

    zero = [0] * level
    if level == 1:
        names.append("gl_identity")
        elements.append(affine_permutation(level, [[1]], zero))
    else:
        # A e_j = e_(j+1), A e_i = e_1
        cycle = [[int(r == (c + 1) % level) for c in range(level)] for r in range(level)]
        transvection = _identity_bits(level)
        transvection[0][1] = 1
        names += ["gl_cycle", "gl_transvection"]
        elements += [
            affine_permutation(level, cycle, zero),
            affine_permutation(level, transvection, zero),
        ]

    if include_h:
        names.append("H")
        elements.append(hadamard_block(level))
    if include_h_prime:
        names.append("H_prime")
        elements.append(hadamard_prime_block(level))

    generators = tuple(GroupElement(e.matrix, word=(position,)) for position, e in enumerate(elements))
    return GeneratorSet(level=level, names=tuple(names), elements=generators)


def all_affine_permutations(level: int) -> list[GroupElement]:
    """Every π_{A,b} with A ∈ GL(i, 2) and b ∈ F₂^i."""
    result = []
    for flat in itertools.product((0, 1), repeat=level * level):
        linear = [list(flat[r * level : (r + 1) * level]) for r in range(level)]
        if gf2_rank(linear) != level:
            continue
        for shift in itertools.product((0, 1), repeat=level):
            result.append(affine_permutation(level, linear, list(shift)))
    return result


# =============================================================================
# Right action
# =============================================================================


def act_on_matrix(matrix: ScaledIntMatrix, g: GroupElement) -> ScaledIntMatrix:
    """matrix · g, with a permutation fast path."""
    if g.monomial is None:
        return mat_mul(matrix, g.matrix)
    columns, signs = g.monomial
    entries = np.zeros(matrix.shape, dtype=object)
    entries[:, columns] = matrix.entries * signs
    return ScaledIntMatrix(entries, matrix.sqrt2_exponent)


def act_on_projector(projector: RationalMatrix, g: GroupElement) -> RationalMatrix:
    """gᵀ Π g = 2^(−k) g_intᵀ Π g_int."""
    if g.monomial is None:
        g_int = g.matrix.entries
        conjugated = np.dot(np.dot(g_int.T, projector.entries), g_int)
        return RationalMatrix(conjugated, projector.exponent + g.matrix.sqrt2_exponent)
    columns, signs = g.monomial
    entries = np.zeros(projector.shape, dtype=object)
    entries[np.ix_(columns, columns)] = projector.entries * np.outer(signs, signs)
    return RationalMatrix(entries, projector.exponent)


def act(subspace: Subspace, g: GroupElement) -> Subspace:
    """The image of a subspace under the right action of g."""
    return Subspace(act_on_matrix(subspace.generator, g), act_on_projector(subspace.projector, g))


# =============================================================================
# Orbits
# =============================================================================


@dataclass(frozen=True)
class OrbitResult:
    """
    Orbit of a seed subspace, in breadth-first discovery order.

    words[k] lists generator indices whose product (applied left to right)
    maps the seed to members[k].
    """

    seed: Subspace
    members: Packing
    words: tuple[tuple[int, ...], ...]

    def word_for(self, subspace: Subspace) -> tuple[int, ...]:
        return self.words[self.members.index_of(subspace)]


def subspace_orbit(seed: Subspace, gens: GeneratorSet, limit: int) -> OrbitResult:
    """
    Breadth-first closure of the seed under the generators, deduplicated by projector.

    Raises:
        InvariantViolationError: If the seed does not live in R^(2^level)
        OrbitLimitExceededError: If more than limit members are found
    """
    if seed.ambient_dim != gens.dimension:
        raise InvariantViolationError(
            "seed ambient dimension", f"{seed.ambient_dim} != {gens.dimension}"
        )
    members = [seed]
    words: list[tuple[int, ...]] = [()]
    seen = {seed.key}
    cursor = 0
    while cursor < len(members):
        current = members[cursor]
        for index, g in enumerate(gens):
            image = act(current, g)
            if image.key in seen:
                continue
            if len(members) >= limit:
                raise OrbitLimitExceededError("subspace orbit", limit)
            seen.add(image.key)
            members.append(image)
            words.append(words[cursor] + (index,))
        cursor += 1
    logger.info(
        "Orbit closed: %d subspaces of dimension %d in R^%d", len(members), seed.dim, seed.ambient_dim
    )
    return OrbitResult(seed=seed, members=Packing(members), words=tuple(words))


def is_generator_closed(orbit: OrbitResult, gens: GeneratorSet) -> bool:
    """Whether every generator maps every member back into the orbit."""
    return all(act(member, g) in orbit.members for member in orbit.members for g in gens)


def apply_word(seed: Subspace, gens: GeneratorSet, word: Sequence[int]) -> Subspace:
    image = seed
    for index in word:
        image = act(image, gens[index])
    return image


class TransitivityVerifier:
    """Certifies that G_i permutes the main family transitively."""

    def __init__(self, settings: OrbitSettings):
        self.settings = settings

    def verify_transitivity(
        self, level: int, limit: int | None = None, allow_large: bool = False
    ) -> VerificationReport:
        """
        Compare the orbit of (I 0) with build_family(level) as sets of projectors.

        On success the report's certificate holds, for each family member in
        family order, a generator word mapping (I 0) to it. On failure the
        symmetric difference is reported.

        Raises:
            InvalidLevelError: Above transitivity_max_level without allow_large
        """
        check_level(level, None if allow_large else self.settings.transitivity_max_level)
        m = 1 << level
        family = build_family(level).packing
        gens = make_generators(level)
        orbit = subspace_orbit(coordinate_subspace(m, m // 2), gens, limit or self.settings.default_limit)

        report = VerificationReport(
            subject="transitivity", level=level, ambient_dim=m, dim=m // 2, count=len(orbit.members)
        )
        orbit_keys = orbit.members.projector_keys()
        family_keys = family.projector_keys()
        missing = [k for k, s in enumerate(family) if s.key not in orbit_keys]
        extra = [k for k, s in enumerate(orbit.members) if s.key not in family_keys]
        report.add_check(
            "orbit_equals_family",
            not missing and not extra,
            expected=len(family),
            observed=len(orbit.members),
            detail=None if not (missing or extra) else (
                f"{len(missing)} family members not in orbit, {len(extra)} orbit members not in family"
            ),
        )
        report.add_check(
            "orbit_size_divides_group_order",
            (2 * order_formula(level)) % len(orbit.members) == 0,
            expected=f"divisor of {2 * order_formula(level)}",
            observed=len(orbit.members),
        )
        report.details["generators"] = list(gens.names)
        if missing or extra:
            report.details["family_indices_missing_from_orbit"] = missing
            report.details["orbit_indices_missing_from_family"] = extra
        else:
            report.certificate = [list(orbit.word_for(s)) for s in family]
        logger.info("Transitivity at level %d: %s", level, "certified" if report.passed else "FAILED")
        return report


# =============================================================================
# Permutation representation on signed minimal vectors
# =============================================================================


def act_on_vector(vector: ScaledIntMatrix, g: GroupElement) -> ScaledIntMatrix:
    return act_on_matrix(vector, g)


def _vector_sort_key(vector: ScaledIntMatrix) -> tuple:
    # e_0, e_1, … come first, then the other integral vectors, then scaled ones
    return (vector.sqrt2_exponent, tuple(-int(x) for x in vector.entries.flat))


@dataclass(frozen=True)
class PermutationRep:
    """
    Action of a generating set on a finite set of row vectors.

    images[g][p] is the domain index of domain[p] · g, so the composition
    "p then q" of two permutations is q[p].
    """

    generators: GeneratorSet
    domain: tuple[ScaledIntMatrix, ...]
    images: tuple[np.ndarray, ...]
    rank: int = field(default=0)

    @property
    def degree(self) -> int:
        return len(self.domain)

    @property
    def spans(self) -> bool:
        return self.rank == self.generators.dimension

    @cached_property
    def positions(self) -> dict[tuple, int]:
        return {vector.key: index for index, vector in enumerate(self.domain)}

    def permutation_of(self, g: GroupElement) -> np.ndarray | None:
        """Domain permutation induced by g, or None if g does not map the domain to itself."""
        images = []
        for vector in self.domain:
            index = self.positions.get(act_on_vector(vector, g).key)
            if index is None:
                return None
            images.append(index)
        return np.array(images, dtype=np.int64)


def permutation_representation(
    gens: GeneratorSet, seed_vector: ScaledIntMatrix | None = None, limit: int = 1_000_000
) -> PermutationRep:
    """
    Close the seed vector (default e₁) under the generators and record one
    permutation of the resulting domain per generator.

    Raises:
        OrbitLimitExceededError: If the domain grows beyond limit vectors
    """
    m = gens.dimension
    if seed_vector is None:
        entries = np.zeros((1, m), dtype=int)
        entries[0, 0] = 1
        seed_vector = ScaledIntMatrix(entries)

    found = {seed_vector.key: seed_vector}
    frontier = [seed_vector]
    while frontier:
        next_frontier = []
        for vector in frontier:
            for g in gens:
                image = act_on_vector(vector, g)
                if image.key not in found:
                    if len(found) >= limit:
                        raise OrbitLimitExceededError("vector orbit", limit)
                    found[image.key] = image
                    next_frontier.append(image)
        frontier = next_frontier

    domain = tuple(sorted(found.values(), key=_vector_sort_key))
    position = {vector.key: index for index, vector in enumerate(domain)}
    images = []
    for g in gens:
        perm = np.fromiter(
            (position[act_on_vector(vector, g).key] for vector in domain), dtype=np.int64, count=len(domain)
        )
        images.append(perm)

    rank = integer_rank([[int(x) for x in v.entries.flat] for v in domain])
    if rank < m:
        logger.warning("Vector domain of size %d spans only dimension %d of %d", len(domain), rank, m)
    logger.info("Permutation representation of degree %d at level %d", len(domain), gens.level)
    return PermutationRep(generators=gens, domain=domain, images=tuple(images), rank=rank)


# =============================================================================
# Closed forms and exact identities
# =============================================================================


def order_formula(level: int) -> int:
    """|H_i| = 2^(2i+1) · 2^(i(i−1)) · (2^i − 1) · ∏_{j=1}^{i−1} (4^j − 1); |G_i| is twice this."""
    check_level(level)
    product = 1
    for j in range(1, level):
        product *= 4**j - 1
    return 2 ** (2 * level + 1) * 2 ** (level * (level - 1)) * (2**level - 1) * product


def barnes_wall_endomorphism_report(level: int) -> VerificationReport:
    """
    Exact identities of the Hadamard generator: H² = I, √2·H is an integer
    matrix (so it maps Z^m into itself) and (√2·H)² = 2·I; plus orthogonality
    of every generator.
    """
    gens = make_generators(level, include_h_prime=level >= 2)
    m = gens.dimension
    h = gens.by_name("H").matrix
    scaled = h.scale_by_sqrt2(1)
    identity = ScaledIntMatrix.identity(m)
    report = VerificationReport(subject="clifford_endomorphisms", level=level, ambient_dim=m)
    report.add_check("h_squared_is_identity", mat_mul(h, h) == identity)
    report.add_check(
        "sqrt2_h_is_integral", scaled.sqrt2_exponent == 0, expected=0, observed=scaled.sqrt2_exponent
    )
    report.add_check(
        "sqrt2_h_squared_is_2i",
        mat_mul(scaled, scaled) == ScaledIntMatrix(np.identity(m, dtype=int) * 2),
    )
    for name, g in zip(gens.names, gens):
        report.add_check(f"{name}_orthogonal", is_orthogonal(g.matrix))
    return report
