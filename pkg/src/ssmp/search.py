"""Meet-in-the-middle decision solver.

The longer side ``b`` is split at ``r``: sums over the first ``r`` elements
go into the list ``C``; sums over the remaining ``N - r`` elements go into
an associative array ``h`` keyed by the sum itself (``epsilon == 0``) or by
``round(d / epsilon)``. Subsets of the shorter side are then scanned against
``C`` and probed in ``h``.

Rounding is half toward +inf, i.e. ``floor(x + 1/2)``. The bucket argument
needs ``round(x + 1) == round(x) + 1``; ties away from zero break it at 0.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass
from typing import Literal

import numpy as np

from . import _kernels
from .core import Instance, Match, is_valid_match
from .deadline import Deadline, as_deadline

INT64_SAFE = 1 << 62
DEFAULT_MAX_ENTRIES = 1 << 26


class BudgetExceeded(RuntimeError):
    """A cache or table would exceed its configured memory budget."""


def round_half_up_div(n: int, d: int) -> int:
    """``floor(n / d + 1/2)`` for integers, ``d > 0``."""
    return (2 * n + d) // (2 * d)


def bucket_key(d: int, epsilon: int) -> int:
    return d if epsilon == 0 else round_half_up_div(d, epsilon)


def default_split(M: int, N: int) -> int:
    """``round((N - M) / 2)`` with ``N >= M``."""
    return (N - M + 1) // 2


def subset_sums(values, deadline: Deadline | None = None) -> np.ndarray:
    """All ``2**n`` subset sums; entry ``k`` is the sum selected by mask ``k``."""
    sums = np.zeros(1, dtype=np.int64)
    for v in values:
        if deadline is not None:
            deadline.check()
        sums = np.concatenate([sums, sums + np.int64(v)])
    return sums


@dataclass
class SearchConfig:
    r: int | None = None
    subset_order: Literal["popcount", "lex"] = "popcount"
    max_entries: int = DEFAULT_MAX_ENTRIES
    kernels: str | None = None


class _Buckets(Mapping):
    """Read-only view of ``h``: key -> list of ``(d, v'')``."""

    def __init__(self, cache: SplitCache):
        self._c = cache
        self._index = {int(k): t for t, k in enumerate(cache.bucket_keys)}

    def __getitem__(self, key):
        t = self._index[key]
        lo, hi = int(self._c.bucket_starts[t]), int(self._c.bucket_starts[t + 1])
        return [(int(self._c.d_sums[e]), int(self._c.d_masks[e])) for e in range(lo, hi)]

    def __iter__(self):
        return iter(self._index)

    def __len__(self):
        return len(self._index)


@dataclass
class SplitCache:
    r: int
    epsilon: int
    c_sums: np.ndarray
    d_sums: np.ndarray
    d_masks: np.ndarray
    bucket_keys: np.ndarray
    bucket_starts: np.ndarray

    @property
    def C(self) -> list[tuple[int, int]]:
        """``(c, v')`` pairs; ``v'`` is the list position."""
        return [(int(c), k) for k, c in enumerate(self.c_sums)]

    @property
    def h(self) -> Mapping:
        return _Buckets(self)

    @property
    def total_entries(self) -> int:
        return len(self.d_sums)


def build_cache(b, r: int, epsilon: int, *, max_entries: int = DEFAULT_MAX_ENTRIES,
                deadline: Deadline | None = None) -> SplitCache:
    N = len(b)
    if not 0 <= r <= N:
        raise ValueError(f"split point r={r} outside [0, {N}]")
    if max(r, N - r) > 62 or 2 ** max(r, N - r) > max_entries:
        raise BudgetExceeded(f"split cache 2^{r} + 2^{N - r} exceeds {max_entries} entries")
    c_sums = subset_sums(b[:r], deadline)
    d_all = subset_sums(b[r:], deadline)
    masks = np.arange(len(d_all), dtype=np.uint64)
    if epsilon == 0:
        keys = d_all
    else:
        keys = (2 * d_all + epsilon) // (2 * epsilon)
    order = np.lexsort((masks, d_all, keys))
    keys = keys[order]
    uniq, starts = np.unique(keys, return_index=True)
    return SplitCache(
        r=r,
        epsilon=epsilon,
        c_sums=c_sums,
        d_sums=d_all[order],
        d_masks=masks[order],
        bucket_keys=uniq.astype(np.int64),
        bucket_starts=np.append(starts, len(keys)).astype(np.int64),
    )


def _check_magnitude(inst: Instance):
    total = sum(abs(x) for x in inst.a) + sum(abs(x) for x in inst.b) + inst.epsilon
    if total >= INT64_SAFE:
        raise ValueError("amounts too large for the 64-bit solver kernels")


def solve_decision(inst: Instance, cfg: SearchConfig | None = None,
                   deadline: Deadline | float | None = None) -> Match | None:
    """Find one valid match or return ``None``.

    Raises :class:`~ssmp.deadline.DeadlineExceeded` when the deadline passes.
    """
    cfg = cfg or SearchConfig()
    deadline = as_deadline(deadline)
    if inst.M == 0 or inst.N == 0:
        return None
    _check_magnitude(inst)
    swapped = inst.M > inst.N
    work = inst.swapped() if swapped else inst
    M, N = work.M, work.N
    r = default_split(M, N) if cfg.r is None else cfg.r
    cache = build_cache(work.b, r, work.epsilon, max_entries=cfg.max_entries, deadline=deadline)
    kern = _kernels.get(cfg.kernels)
    if M > 62:
        kern = _kernels.get("python")
    hit = kern.search_scan(
        np.asarray(work.a, dtype=np.int64), cache.c_sums, cache.bucket_keys,
        cache.bucket_starts, cache.d_sums, cache.d_masks, work.epsilon,
        cfg.subset_order == "popcount", deadline.check,
    )
    if hit is None:
        return None
    w, ci, ent = hit
    v = int(ci) | (int(cache.d_masks[ent]) << r)
    m = Match(v, w) if swapped else Match(w, v)
    if not is_valid_match(inst, m):
        raise AssertionError("search kernel produced an invalid match")
    return m


class SearchSolver:
    """Decision solver adapter for the greedy driver."""

    name = "search"

    def __init__(self, config: SearchConfig | None = None):
        self.config = config or SearchConfig()

    def solve(self, inst: Instance, deadline: Deadline) -> Match | None:
        return solve_decision(inst, self.config, deadline)
