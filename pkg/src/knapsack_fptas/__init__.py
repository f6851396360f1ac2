"""(1+eps)-approximate 0-1 knapsack via step-function merging."""

from .instance import Instance, Item, parse_instance, preprocess, random_instance
from .solver import K_STAGE, SolveResult, solve, solve_small_n
from .stepfn import StepFunction, exact_maxplus, merge_dnc

__all__ = [
    "Instance",
    "Item",
    "K_STAGE",
    "SolveResult",
    "StepFunction",
    "exact_maxplus",
    "merge_dnc",
    "parse_instance",
    "preprocess",
    "random_instance",
    "solve",
    "solve_small_n",
]
