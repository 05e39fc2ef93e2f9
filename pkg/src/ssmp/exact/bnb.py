"""Depth-first branch-and-bound over element-to-slot assignments.

Each element of ``a`` and ``b`` goes to one of ``unmatched`` or a slot
``0 .. K-1``. Elements are visited by decreasing magnitude so the
reachability prune bites early. With symmetry breaking a new slot is
always the lowest unused one.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from ..core import Instance, Match, Solution, objective
from ..deadline import Deadline, DeadlineExceeded, as_deadline

CHECK_EVERY = 4096
# reachability bitsets are coarsened until they fit in this many bits
REACH_MAX_BITS = 1 << 20

ProgressFn = Callable[[float, int, int], None]


@dataclass
class BnbOutcome:
    solution: Solution
    score: int
    proved: bool
    bound: int
    nodes: int
    trace: list[tuple[float, int]] = field(default_factory=list)


def branch_and_bound(inst: Instance, deadline: Deadline | float | None = None, *,
                     incumbent: Solution | None = None, symmetry_breaking: bool = True,
                     on_progress: ProgressFn | None = None) -> BnbOutcome:
    deadline = as_deadline(deadline)
    M, N = inst.M, inst.N
    K = min(M, N)
    eps = inst.epsilon
    # (signed value, side, original index); a counts positive, b negative
    elems = [(x, 0, i) for i, x in enumerate(inst.a)] + [(-x, 1, j) for j, x in enumerate(inst.b)]
    elems.sort(key=lambda t: (-abs(t[0]), t[1], t[2]))
    n = len(elems)
    vals = [e[0] for e in elems]
    side = [e[1] for e in elems]

    # suffix capacities: how far the remaining elements can push a slot up or down
    up = [0] * (n + 1)
    down = [0] * (n + 1)
    rem_a = [0] * (n + 1)
    rem_b = [0] * (n + 1)
    for t in range(n - 1, -1, -1):
        v = vals[t]
        up[t] = up[t + 1] + (v if v > 0 else 0)
        down[t] = down[t + 1] + (-v if v < 0 else 0)
        rem_a[t] = rem_a[t + 1] + (side[t] == 0)
        rem_b[t] = rem_b[t + 1] + (side[t] == 1)

    # reach[t] bit (q - qlo) set iff some subset of elements t.. has scaled
    # sum q, values scaled by floor division with g; a subset of c elements
    # with true sum S has scaled sum in (S/g - c, S/g]
    span = up[0] + down[0] + 1
    g = max(1, -(-span // REACH_MAX_BITS))
    q = [v // g for v in vals]
    qlo = sum(x for x in q if x < 0)
    reach = [0] * (n + 1)
    reach[n] = 1 << -qlo
    for t in range(n - 1, -1, -1):
        r = reach[t + 1]
        reach[t] = r | (r << q[t] if q[t] > 0 else r >> -q[t])

    def reachable(t: int, low: int, high: int) -> bool:
        """Can a subset of elements t.. sum into [low, high]? (may say yes falsely)"""
        qa = low // g - (n - t if g > 1 else 0) - qlo
        qb = high // g - qlo
        if qb < 0:
            return False
        qa = max(qa, 0)
        return bool((reach[t] >> qa) & ((1 << (qb - qa + 1)) - 1))

    diff = [0] * K
    cnt_a = [0] * K
    cnt_b = [0] * K
    label = [-1] * n

    best_score = 0
    best_labels: list[int] | None = None
    if incumbent is not None and incumbent.matches:
        best_score = objective(inst, incumbent)
    trace: list[tuple[float, int]] = [(deadline.elapsed(), best_score)]
    root_bound = M + N + K if K else 0
    if on_progress:
        on_progress(deadline.elapsed(), best_score, root_bound)

    state = {"used": 0, "matched": 0, "bad": 0, "nodes": 0}

    def slot_ok(k: int) -> bool:
        return cnt_a[k] > 0 and cnt_b[k] > 0 and -eps <= diff[k] <= eps

    def put(t: int, k: int) -> None:
        was_ok = slot_ok(k) if (cnt_a[k] or cnt_b[k]) else True
        if not (cnt_a[k] or cnt_b[k]):
            state["used"] += 1
        diff[k] += vals[t]
        if side[t] == 0:
            cnt_a[k] += 1
        else:
            cnt_b[k] += 1
        now_ok = slot_ok(k)
        state["bad"] += (was_ok and not now_ok) - (now_ok and not was_ok)
        state["matched"] += 1
        label[t] = k

    def take(t: int, k: int) -> None:
        was_ok = slot_ok(k)
        diff[k] -= vals[t]
        if side[t] == 0:
            cnt_a[k] -= 1
        else:
            cnt_b[k] -= 1
        empty = not (cnt_a[k] or cnt_b[k])
        if empty:
            state["used"] -= 1
        now_ok = True if empty else slot_ok(k)
        state["bad"] += (was_ok and not now_ok) - (now_ok and not was_ok)
        state["matched"] -= 1
        label[t] = -1

    def viable(t: int) -> int:
        """Upper bound on the final score from this node, or -1 if hopeless."""
        need_a = need_b = 0
        u, d = up[t], down[t]
        for k in range(K):
            if cnt_a[k] or cnt_b[k]:
                if not cnt_a[k]:
                    need_a += 1
                if not cnt_b[k]:
                    need_b += 1
                dk = diff[k]
                if dk + u < -eps or dk - d > eps:
                    return -1
                if not -eps <= dk <= eps and not reachable(t, -dk - eps, -dk + eps):
                    return -1
        ra, rb = rem_a[t], rem_b[t]
        if ra < need_a or rb < need_b:
            return -1
        used = state["used"]
        fresh = min(ra - need_a, rb - need_b, K - used)
        return state["matched"] + ra + rb + used + max(fresh, 0)

    def record() -> None:
        nonlocal best_score, best_labels
        score = state["matched"] + state["used"]
        if score > best_score:
            best_score = score
            best_labels = list(label)
            trace.append((deadline.elapsed(), score))
            if on_progress:
                on_progress(deadline.elapsed(), score, root_bound)

    def rec(t: int) -> None:
        state["nodes"] += 1
        if state["nodes"] % CHECK_EVERY == 0:
            deadline.check()
        if state["bad"] == 0:
            record()
        if t == n:
            return
        if viable(t) <= best_score:
            return
        v = vals[t]
        opts = [k for k in range(K) if cnt_a[k] or cnt_b[k]]
        opts.sort(key=lambda k: abs(diff[k] + v))
        if state["used"] < K:
            if symmetry_breaking:
                opts.append(next(k for k in range(K) if not (cnt_a[k] or cnt_b[k])))
            else:
                opts += [k for k in range(K) if not (cnt_a[k] or cnt_b[k])]
        for k in opts:
            put(t, k)
            rec(t + 1)
            take(t, k)
        # leave element t unmatched
        rec(t + 1)

    proved = True
    try:
        if K:
            rec(0)
    except DeadlineExceeded:
        proved = False

    if best_labels is not None:
        w = [0] * K
        vm = [0] * K
        for t, k in enumerate(best_labels):
            if k >= 0:
                _, s, idx = elems[t]
                if s == 0:
                    w[k] |= 1 << idx
                else:
                    vm[k] |= 1 << idx
        sol = Solution(tuple(Match(w[k], vm[k]) for k in range(K) if w[k] and vm[k]))
    else:
        sol = incumbent if incumbent is not None else Solution()
    assert objective(inst, sol) == best_score
    bound = best_score if proved else root_bound
    return BnbOutcome(sol, best_score, proved, bound, state["nodes"], trace)
