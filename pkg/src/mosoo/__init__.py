"""Deterministic optimistic optimization for multi-objective black-box problems.

The optimizer builds a K-ary partition of the decision box and, sweeping
depth by depth, expands every leaf whose objective vector is non-dominated
among the leaves of that depth and the nodes kept from shallower depths.
"""

from .indicators import (EpsilonTracker, ReferenceFront, additive_epsilon, conflict_dimension,
                         hypervolume_2d, indicator_curve, sample_reference_front, unary_epsilon)
from .optimizer import HMaxPolicy, RunTrace, deepest_j_optimal_depth, loss_vector, mosoo_run, soo_run
from .pareto import (Archive, DimensionMismatchError, dominates, empirical_ideal, nadir, nd_filter,
                     nd_min, strictly_dominates, weakly_dominates)
from .partition import Box, BudgetExhausted, Node, Tree, expand_node
from .problems import (REGISTRY, BudgetedEvaluator, NonFiniteObjectiveError, Problem,
                       holder_family, make_problem, worked_example)
from .theory import (AssumptionViolation, BoundModel, HolderDelta, delta_from_holder, h_of_t,
                     indicator_bound, loss_bound, near_optimality_dimension)

__all__ = [
    "Archive", "AssumptionViolation", "BoundModel", "Box", "BudgetExhausted", "BudgetedEvaluator",
    "DimensionMismatchError", "EpsilonTracker", "HMaxPolicy", "HolderDelta", "Node",
    "NonFiniteObjectiveError", "Problem", "REGISTRY", "ReferenceFront", "RunTrace", "Tree",
    "additive_epsilon", "conflict_dimension", "deepest_j_optimal_depth", "delta_from_holder",
    "dominates", "empirical_ideal", "expand_node", "h_of_t", "holder_family", "hypervolume_2d",
    "indicator_bound", "indicator_curve", "loss_bound", "loss_vector", "make_problem", "mosoo_run",
    "nadir", "nd_filter", "nd_min", "near_optimality_dimension", "sample_reference_front",
    "soo_run", "strictly_dominates", "unary_epsilon", "weakly_dominates", "worked_example",
]
