"""
Group orders and membership through sympy's deterministic Schreier-Sims.

Each generator becomes a sympy Permutation of the signed-vector domain of a
PermutationRep. The domain spans R^m, and an orthogonal map fixing a spanning
set is the identity, so the permutation group is isomorphic to the matrix group.
"""
import logging

from sympy.combinatorics import Permutation, PermutationGroup

from src.app.config import OrderSettings
from src.app.core.domain.exact import ScaledIntMatrix
from src.app.core.domain.models import OrderReport
from src.app.core.services.clifford import (
    GeneratorSet,
    GroupElement,
    PermutationRep,
    all_affine_permutations,
    hadamard_prime_block,
    make_generators,
    order_formula,
    permutation_representation,
)
from src.app.core.services.construction import check_level
from src.shared.exceptions import (
    InvalidLevelError,
    OrbitLimitExceededError,
    UnfaithfulRepresentationError,
)

logger = logging.getLogger(__name__)


def permutation_group(rep: PermutationRep) -> PermutationGroup:
    """
    The sympy group generated by rep's permutations, with its base and strong
    generating set already computed.

    Raises:
        UnfaithfulRepresentationError: If the domain does not span R^m
    """
    if not rep.spans:
        raise UnfaithfulRepresentationError(rep.rank, rep.generators.dimension)
    group = PermutationGroup([Permutation(perm.tolist()) for perm in rep.images])
    group.schreier_sims()
    logger.info(
        "Stabilizer chain of degree %d: basic orbit sizes %s",
        rep.degree,
        [len(orbit) for orbit in group.basic_orbits],
    )
    return group


def group_order(rep: PermutationRep) -> int:
    """Exact order of the group generated by rep."""
    return int(permutation_group(rep).order())


def contains_element(group: PermutationGroup, rep: PermutationRep, g: GroupElement) -> bool:
    """Whether the matrix g lies in the group, judged by its action on rep's domain."""
    perm = rep.permutation_of(g)
    if perm is None:
        return False
    return bool(group.contains(Permutation(perm.tolist())))


# =============================================================================
# Brute-force matrix closure
# =============================================================================


def matrix_group_closure(gens: GeneratorSet, limit: int) -> set[GroupElement]:
    """
    Every element of the generated matrix group, by breadth-first closure.

    Raises:
        OrbitLimitExceededError: If more than limit elements are found
    """
    identity = GroupElement(ScaledIntMatrix.identity(gens.dimension), check=False)
    elements = {identity}
    frontier = [identity]
    while frontier:
        next_frontier = []
        for element in frontier:
            for g in gens:
                product = element @ g
                if product not in elements:
                    if len(elements) >= limit:
                        raise OrbitLimitExceededError("matrix group closure", limit)
                    elements.add(product)
                    next_frontier.append(product)
        frontier = next_frontier
    logger.info("Brute-force closure at level %d: %d elements", gens.level, len(elements))
    return elements


class GroupOrderService:
    """Cross-checks the closed-form group orders against independent computations."""

    def __init__(self, settings: OrderSettings):
        self.settings = settings

    def order_report(self, level: int, allow_large: bool = False) -> OrderReport:
        """
        Closed form against the stabilizer-chain orders of G_i and H_i, chain
        membership of H′ and every π_{A,b}, and for small levels the
        brute-force closure.

        Raises:
            InvalidLevelError: If the level is beyond the configured range
        """
        check_level(level)
        allowed = level <= self.settings.max_level or (
            level == 5 and (allow_large or self.settings.allow_level_5)
        )
        if not allowed:
            raise InvalidLevelError(level, f"order computations stop at level {self.settings.max_level}")
        if level > self.settings.max_level:
            logger.warning("Computing the group order at level %d; this is an opt-in expensive run", level)

        formula_h = order_formula(level)
        report = OrderReport(level=level, formula_h_order=formula_h, formula_g_order=2 * formula_h)

        gens = make_generators(level)
        rep = permutation_representation(gens)
        group = permutation_group(rep)
        report.degree = rep.degree
        report.chain_g_order = int(group.order())
        report.add_check("g_order_matches_formula", report.chain_g_order == 2 * formula_h,
                         expected=2 * formula_h, observed=report.chain_g_order)

        if level >= 2:
            h_rep = permutation_representation(make_generators(level, include_h=False, include_h_prime=True))
            report.chain_h_order = group_order(h_rep)
            report.add_check("h_order_matches_formula", report.chain_h_order == formula_h,
                             expected=formula_h, observed=report.chain_h_order)
            report.add_check("h_index_is_2", report.chain_g_order == 2 * report.chain_h_order,
                             expected=2, observed=report.index)
            report.add_check("contains_h_prime", contains_element(group, rep, hadamard_prime_block(level)))

        if level <= self.settings.affine_membership_max_level:
            affine = all_affine_permutations(level)
            found = sum(contains_element(group, rep, a) for a in affine)
            report.add_check("contains_all_affine_permutations", found == len(affine),
                             expected=len(affine), observed=found)

        if level <= self.settings.brute_force_max_level:
            elements = matrix_group_closure(gens, self.settings.brute_force_limit)
            report.brute_force_g_order = len(elements)
            report.add_check("brute_force_matches_chain", len(elements) == report.chain_g_order,
                             expected=report.chain_g_order, observed=len(elements))
        return report
