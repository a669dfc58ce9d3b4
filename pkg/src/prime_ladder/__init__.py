"""Prime labelings of ladder graphs P_n x P_2."""

from .core import Column, LadderLabeling, SquareView, Stage, squares
from .construct import construct_cross_labeling, find_fixups
from .transform import flip_alternate
from .verify import check_cross, check_permutation, check_prime, verify


def prime_labeling(n: int) -> LadderLabeling:
    """A prime labeling of the n-ladder."""
    return flip_alternate(construct_cross_labeling(n))


__all__ = [
    "Column",
    "LadderLabeling",
    "SquareView",
    "Stage",
    "squares",
    "construct_cross_labeling",
    "find_fixups",
    "flip_alternate",
    "prime_labeling",
    "check_cross",
    "check_permutation",
    "check_prime",
    "verify",
]
