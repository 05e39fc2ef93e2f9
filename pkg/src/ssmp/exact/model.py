"""Binary model with ``K = min(M, N)`` match slots.

Variables (0-based): ``w_i_k`` (a_i in slot k), ``v_j_k`` (b_j in slot k)
and ``m_k`` (slot k used). Amounts enter in fixed-point units, so the
tolerance rows are exact integer inequalities.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..core import Instance, InstanceError, Match, Solution, find_violation, indices


@dataclass
class Constraint:
    name: str
    coeffs: dict[int, int]
    sense: str  # "<=" or ">="
    rhs: int

    def holds(self, x) -> bool:
        lhs = sum(c * x[i] for i, c in self.coeffs.items())
        return lhs <= self.rhs if self.sense == "<=" else lhs >= self.rhs


@dataclass
class MilpModel:
    instance: Instance
    K: int
    symmetry_breaking: bool
    names: list[str] = field(default_factory=list)
    objective: dict[int, int] = field(default_factory=dict)
    constraints: list[Constraint] = field(default_factory=list)

    @property
    def num_vars(self) -> int:
        return len(self.names)

    def w(self, i: int, k: int) -> int:
        return i * self.K + k

    def v(self, j: int, k: int) -> int:
        return self.instance.M * self.K + j * self.K + k

    def m(self, k: int) -> int:
        return (self.instance.M + self.instance.N) * self.K + k


def build_model(inst: Instance, symmetry_breaking: bool = True) -> MilpModel:
    if inst.M < 1 or inst.N < 1:
        raise InstanceError("the model needs at least one element per side")
    M, N = inst.M, inst.N
    K = min(M, N)
    mdl = MilpModel(inst, K, symmetry_breaking)
    mdl.names = (
        [f"w_{i}_{k}" for i in range(M) for k in range(K)]
        + [f"v_{j}_{k}" for j in range(N) for k in range(K)]
        + [f"m_{k}" for k in range(K)]
    )
    mdl.objective = {t: 1 for t in range(mdl.num_vars)}
    cons = mdl.constraints
    eps = inst.epsilon
    for k in range(K):
        diff = {mdl.w(i, k): inst.a[i] for i in range(M)}
        diff.update({mdl.v(j, k): -inst.b[j] for j in range(N)})
        cons.append(Constraint(f"tol_hi_{k}", dict(diff), "<=", eps))
        cons.append(Constraint(f"tol_lo_{k}", dict(diff), ">=", -eps))
    for i in range(M):
        cons.append(Constraint(f"once_a_{i}", {mdl.w(i, k): 1 for k in range(K)}, "<=", 1))
    for j in range(N):
        cons.append(Constraint(f"once_b_{j}", {mdl.v(j, k): 1 for k in range(K)}, "<=", 1))
    for k in range(K):
        for i in range(M):
            cons.append(Constraint(f"link_a_{i}_{k}", {mdl.w(i, k): 1, mdl.m(k): -1}, "<=", 0))
        for j in range(N):
            cons.append(Constraint(f"link_b_{j}_{k}", {mdl.v(j, k): 1, mdl.m(k): -1}, "<=", 0))
    for k in range(K):
        ca = {mdl.w(i, k): 1 for i in range(M)}
        ca[mdl.m(k)] = -1
        cons.append(Constraint(f"nonempty_a_{k}", ca, ">=", 0))
        cb = {mdl.v(j, k): 1 for j in range(N)}
        cb[mdl.m(k)] = -1
        cons.append(Constraint(f"nonempty_b_{k}", cb, ">=", 0))
    if symmetry_breaking:
        for k in range(K - 1):
            cons.append(Constraint(f"order_{k}", {mdl.m(k): 1, mdl.m(k + 1): -1}, ">=", 0))
    return mdl


def violated(model: MilpModel, x) -> list[str]:
    """Names of the constraints ``x`` breaks (binary domain included)."""
    bad = [model.names[t] for t, val in enumerate(x) if val not in (0, 1)]
    bad += [c.name for c in model.constraints if not c.holds(x)]
    return bad


def objective_value(model: MilpModel, x) -> int:
    return sum(c * x[t] for t, c in model.objective.items())


def encode_warm_start(model: MilpModel, s: Solution) -> list[int]:
    """Complete 0/1 assignment for ``s``; slots filled largest match first."""
    problem = find_violation(model.instance, s)
    if problem is not None:
        raise InstanceError(f"warm start is infeasible: {problem}")
    x = [0] * model.num_vars
    ordered = sorted(s.matches, key=lambda m: -m.size)
    for k, m in enumerate(ordered):
        x[model.m(k)] = 1
        for i in indices(m.w):
            x[model.w(i, k)] = 1
        for j in indices(m.v):
            x[model.v(j, k)] = 1
    return x


def decode(model: MilpModel, x) -> Solution:
    """Solution from an assignment; empty slots are dropped."""
    M, N = model.instance.M, model.instance.N
    out = []
    for k in range(model.K):
        w = sum(1 << i for i in range(M) if round(x[model.w(i, k)]) == 1)
        v = sum(1 << j for j in range(N) if round(x[model.v(j, k)]) == 1)
        if w and v:
            out.append(Match(w, v))
    return Solution(tuple(out))
