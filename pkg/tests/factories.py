"""Helpers to build test subspaces and packings."""
from src.app.core.domain.exact import ScaledIntMatrix
from src.app.core.domain.grassmann import Packing, Subspace, subspace_from_generator


def subspace(rows: list[list[int]], sqrt2_exponent: int = 0) -> Subspace:
    """Helper to build a subspace from integer generator rows."""
    return subspace_from_generator(ScaledIntMatrix(rows, sqrt2_exponent))


def packing(*generators: list[list[int]]) -> Packing:
    return Packing([subspace(rows) for rows in generators])


# C_2 written out by hand: (I0), (0I), diag(P, P) and diag(P, P⊥) for P in C_1, then (I Q)
LEVEL_TWO_GENERATORS = [
    [[1, 0, 0, 0], [0, 1, 0, 0]],
    [[0, 0, 1, 0], [0, 0, 0, 1]],
    [[1, 0, 0, 0], [0, 0, 1, 0]],
    [[1, 0, 0, 0], [0, 0, 0, 1]],
    [[0, 1, 0, 0], [0, 0, 0, 1]],
    [[0, 1, 0, 0], [0, 0, 1, 0]],
    [[1, 1, 0, 0], [0, 0, 1, 1]],
    [[1, 1, 0, 0], [0, 0, 1, -1]],
    [[1, -1, 0, 0], [0, 0, 1, -1]],
    [[1, -1, 0, 0], [0, 0, 1, 1]],
    [[1, 0, 1, 0], [0, 1, 0, 1]],
    [[1, 0, 1, 0], [0, 1, 0, -1]],
    [[1, 0, -1, 0], [0, 1, 0, 1]],
    [[1, 0, -1, 0], [0, 1, 0, -1]],
    [[1, 0, 0, 1], [0, 1, 1, 0]],
    [[1, 0, 0, 1], [0, 1, -1, 0]],
    [[1, 0, 0, -1], [0, 1, 1, 0]],
    [[1, 0, 0, -1], [0, 1, -1, 0]],
]
