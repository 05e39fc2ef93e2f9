"""Exact solving with K = min(M, N) match slots."""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field

from ..core import Instance, InstanceError, Solution, find_violation, objective
from ..deadline import Deadline, as_deadline
from .backend import BackendError, ExternalBackend, InternalBackend, default_backend, reports_optimal
from .bnb import ProgressFn, branch_and_bound
from .lpformat import parse_solution, write_lp, write_mst
from .model import build_model, decode, encode_warm_start


class ExactStatus(str, enum.Enum):
    OPTIMAL = "Optimal"
    FEASIBLE = "FeasibleIncumbent"
    NO_INCUMBENT = "TimedOutNoIncumbent"


@dataclass
class ExactResult:
    status: ExactStatus
    solution: Solution
    bound: int | None
    trace: list[tuple[float, int]] = field(default_factory=list)

    @property
    def optimal(self) -> bool:
        return self.status is ExactStatus.OPTIMAL


def solve_exact(inst: Instance, backend=None, deadline: Deadline | float | None = None,
                warm_start: Solution | None = None, *, symmetry_breaking: bool = True,
                on_progress: ProgressFn | None = None) -> ExactResult:
    """Maximize the objective over all feasible solutions.

    Without a deadline the internal backend always proves optimality. With
    one, the best solution found so far is returned as ``FeasibleIncumbent``.
    """
    deadline = as_deadline(deadline)
    backend = default_backend() if backend is None else backend
    if warm_start is not None:
        problem = find_violation(inst, warm_start)
        if problem is not None:
            raise InstanceError(f"warm start is infeasible: {problem}")
    if inst.M == 0 or inst.N == 0:
        return ExactResult(ExactStatus.OPTIMAL, Solution(), 0, [(0.0, 0)])
    if isinstance(backend, InternalBackend):
        out = branch_and_bound(inst, deadline, incumbent=warm_start,
                               symmetry_breaking=symmetry_breaking, on_progress=on_progress)
        status = ExactStatus.OPTIMAL if out.proved else ExactStatus.FEASIBLE
        return ExactResult(status, out.solution, out.bound, out.trace)
    if isinstance(backend, ExternalBackend):
        return _solve_external(inst, backend, deadline, warm_start, symmetry_breaking, on_progress)
    raise TypeError(f"unsupported backend {backend!r}")


_BOUND = re.compile(r"^#\s*bound\s+([-+0-9.eE]+)", re.M)


def _solve_external(inst, backend, deadline, warm_start, symmetry_breaking, on_progress):
    model = build_model(inst, symmetry_breaking)
    base = warm_start if warm_start is not None else Solution()
    base_score = objective(inst, base)
    trace = [(deadline.elapsed(), base_score)]
    if on_progress:
        on_progress(deadline.elapsed(), base_score, model.num_vars)
    mst = None
    if warm_start is not None and warm_start.matches:
        mst = write_mst(model, encode_warm_start(model, warm_start))
    sol_text, output = backend.run(write_lp(model), mst, deadline.remaining())
    values = parse_solution(sol_text, model.names)
    if not values:
        if warm_start is not None:
            return ExactResult(ExactStatus.FEASIBLE, base, None, trace)
        return ExactResult(ExactStatus.NO_INCUMBENT, Solution(), None, trace)
    x = [values.get(nm, 0.0) for nm in model.names]
    sol = decode(model, x)
    problem = find_violation(inst, sol)
    if problem is not None:
        raise BackendError(f"solver returned an infeasible point: {problem}")
    score = objective(inst, sol)
    if score < base_score:
        sol, score = base, base_score
    trace.append((deadline.elapsed(), score))
    if on_progress:
        on_progress(deadline.elapsed(), score, model.num_vars)
    m = _BOUND.search(sol_text)
    bound = int(float(m.group(1)) + 1e-6) if m else None
    if reports_optimal(sol_text + "\n" + output):
        return ExactResult(ExactStatus.OPTIMAL, sol, score, trace)
    return ExactResult(ExactStatus.FEASIBLE, sol, bound, trace)
