"""Subset sum matching: find disjoint pairs of subsets of two amount lists
whose sums agree within a tolerance."""

from ._kernels import BACKEND as KERNEL_BACKEND
from .core import (Instance, InstanceError, Match, Solution, find_violation, is_feasible_solution,
                   is_valid_match, load_instance, load_solution, objective)
from .deadline import Deadline, DeadlineExceeded
from .dp import DpConfig, DpSolver
from .greedy import GreedyResult, Status, greedy_solve
from .search import SearchConfig, SearchSolver

__version__ = "0.1.0"

__all__ = [
    "KERNEL_BACKEND", "Instance", "InstanceError", "Match", "Solution", "find_violation",
    "is_feasible_solution", "is_valid_match", "load_instance", "load_solution", "objective",
    "Deadline", "DeadlineExceeded", "DpConfig", "DpSolver", "GreedyResult", "Status",
    "greedy_solve", "SearchConfig", "SearchSolver",
]
