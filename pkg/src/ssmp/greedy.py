"""Greedy driver: solve the decision problem repeatedly on what is left."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Protocol

from .core import Instance, Match, Solution, is_valid_match, lift_mask, remove_matched
from .deadline import Deadline, DeadlineExceeded, as_deadline


class DecisionSolver(Protocol):
    def solve(self, inst: Instance, deadline: Deadline) -> Match | None: ...


class Status(str, enum.Enum):
    COMPLETED = "Completed"
    TIMED_OUT = "TimedOut"
    FAILED = "Failed"


@dataclass
class GreedyResult:
    solution: Solution
    status: Status
    iterations: int


def greedy_solve(inst: Instance, solver: DecisionSolver,
                 deadline: Deadline | float | None = None) -> GreedyResult:
    """Accumulate matches until the decision solver reports none.

    On deadline expiry the matches found so far are kept and the status is
    ``TIMED_OUT``.
    """
    deadline = as_deadline(deadline)
    residual = inst
    a_map = list(range(inst.M))
    b_map = list(range(inst.N))
    found: list[Match] = []
    iterations = 0
    while True:
        iterations += 1
        if residual.M == 0 or residual.N == 0:
            break
        try:
            deadline.check()
            m = solver.solve(residual, deadline)
        except DeadlineExceeded:
            return GreedyResult(Solution(tuple(found)), Status.TIMED_OUT, iterations)
        if m is None:
            break
        if not is_valid_match(residual, m):
            raise AssertionError(f"{type(solver).__name__} returned an invalid match")
        found.append(Match(lift_mask(m.w, a_map), lift_mask(m.v, b_map)))
        residual, ra, rb = remove_matched(residual, m)
        a_map = [a_map[i] for i in ra]
        b_map = [b_map[j] for j in rb]
    return GreedyResult(Solution(tuple(found)), Status.COMPLETED, iterations)
