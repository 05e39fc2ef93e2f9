"""Brute-force ground truth for tiny instances."""

from __future__ import annotations

import numpy as np

from .core import Instance, InstanceError, Match, Solution, objective

DECISION_LIMIT = 24
OPTIMAL_LIMIT = 10


def _all_sums(values) -> np.ndarray:
    out = np.zeros(1 << len(values), dtype=object if _big(values) else np.int64)
    for j, x in enumerate(values):
        half = 1 << j
        out[half : 2 * half] = out[:half] + x
    return out


def _big(values) -> bool:
    return sum(abs(x) for x in values) >= 1 << 62


def decision_oracle(inst: Instance) -> Match | None:
    """Enumerate every pair of non-empty subsets; return the first valid one."""
    if inst.M + inst.N > DECISION_LIMIT:
        raise InstanceError(f"decision oracle limited to M + N <= {DECISION_LIMIT}")
    if inst.M == 0 or inst.N == 0:
        return None
    swap = inst.M > inst.N
    outer, inner = (inst.b, inst.a) if swap else (inst.a, inst.b)
    inner_sums = _all_sums(inner)[1:]
    outer_sums = _all_sums(outer)
    for w in range(1, 1 << len(outer)):
        hit = np.flatnonzero(abs(outer_sums[w] - inner_sums) <= inst.epsilon)
        if len(hit):
            v = int(hit[0]) + 1
            return Match(v, w) if swap else Match(w, v)
    return None


def optimal_oracle(inst: Instance) -> tuple[int, Solution]:
    """Exhaustive maximum of the objective over all feasible solutions.

    Every element gets a label in ``{0 (unmatched), 1..min(M, N)}``; labels
    are introduced in first-use order so permuted labelings are skipped.
    """
    M, N = inst.M, inst.N
    if M + N > OPTIMAL_LIMIT:
        raise InstanceError(f"optimal oracle limited to M + N <= {OPTIMAL_LIMIT}")
    K = min(M, N)
    n = M + N
    vals = list(inst.a) + [-x for x in inst.b]
    labels = [0] * n
    best = [0, Solution()]

    def leaf(used):
        diff = [0] * (used + 1)
        has_a = [False] * (used + 1)
        has_b = [False] * (used + 1)
        for e in range(n):
            k = labels[e]
            if k:
                diff[k] += vals[e]
                if e < M:
                    has_a[k] = True
                else:
                    has_b[k] = True
        for k in range(1, used + 1):
            if not (has_a[k] and has_b[k]) or abs(diff[k]) > inst.epsilon:
                return
        score = sum(1 for x in labels if x) + used
        if score > best[0]:
            w = [0] * (used + 1)
            v = [0] * (used + 1)
            for e in range(n):
                k = labels[e]
                if k:
                    if e < M:
                        w[k] |= 1 << e
                    else:
                        v[k] |= 1 << (e - M)
            best[0] = score
            best[1] = Solution(tuple(Match(w[k], v[k]) for k in range(1, used + 1)))

    def rec(e, used):
        if e == n:
            leaf(used)
            return
        for k in range(0, min(used + 1, K) + 1):
            labels[e] = k
            rec(e + 1, max(used, k))
        labels[e] = 0

    rec(0, 0)
    score, sol = best
    assert objective(inst, sol) == score
    return score, sol
