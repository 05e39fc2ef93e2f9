"""Pseudo-polynomial decision solver.

Amounts are scaled by ``rho`` and rounded, then regrouped into two lists of
positive integers: ``eta`` holds positive ``a`` and negated negative ``b``
elements, ``lam`` holds negated negative ``a`` and positive ``b`` elements.
A subset pair of ``(eta, lam)`` maps back to a subset pair of ``(a, b)``
whose exact difference is ``sum |x| over the eta part - sum |x| over the
lam part``. Boolean subset-sum tables over both lists locate candidate sum
pairs ``(i, j)`` with ``|i - j| <= bar_eps``; back-tracking the tables
enumerates the subsets behind each pair and every candidate is checked
against the original amounts before it is returned.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction

import numpy as np

from . import _kernels
from .core import Instance, Match, is_valid_match
from .deadline import Deadline, as_deadline
from .search import INT64_SAFE, BudgetExceeded

DEFAULT_MAX_CELLS = 1 << 31
BLOCK = 4096


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        return Fraction(Decimal(repr(x)))
    return Fraction(str(x)) if isinstance(x, (str, Decimal)) else Fraction(x)


def round_half_away(q: Fraction) -> int:
    n = (2 * abs(q.numerator) + q.denominator) // (2 * q.denominator)
    return n if q >= 0 else -n


def default_rho(inst: Instance) -> Fraction:
    """1 for integer data or ``epsilon >= 1``, 10 for small positive
    ``epsilon`` and 10000 for ``epsilon == 0``."""
    if inst.is_integral():
        return Fraction(1)
    eps = Fraction(inst.epsilon, 10**inst.digits)
    if eps >= 1:
        return Fraction(1)
    if eps > 0:
        return Fraction(10)
    return Fraction(10000)


@dataclass(frozen=True)
class Origin:
    side: str  # "a" or "b"
    index: int
    sign: int  # +1 kept, -1 negated when moved into eta/lam


@dataclass
class ReorgProblem:
    eta: list[int]
    lam: list[int]
    rho: Fraction
    bar_eps: int
    eta_origin: list[Origin]
    lam_origin: list[Origin]
    exact: bool
    dropped: list[Origin] = field(default_factory=list)

    def inverse(self) -> dict[tuple[str, int], tuple[str, int]]:
        """(side, original index) -> ("eta" | "lam", position)."""
        inv = {}
        for p, o in enumerate(self.eta_origin):
            inv[(o.side, o.index)] = ("eta", p)
        for q, o in enumerate(self.lam_origin):
            inv[(o.side, o.index)] = ("lam", q)
        return inv

    def to_match(self, p_positions, q_positions) -> Match:
        w = v = 0
        for o in [self.eta_origin[p] for p in p_positions] + [self.lam_origin[q] for q in q_positions]:
            if o.side == "a":
                w |= 1 << o.index
            else:
                v |= 1 << o.index
        return Match(w, v)


def discretize_reorganize(inst: Instance, rho=1) -> ReorgProblem:
    rho = as_fraction(rho)
    if rho <= 0:
        raise ValueError("rho must be positive")
    scale = Fraction(1, 10**inst.digits)
    eta, lam, eta_o, lam_o, dropped = [], [], [], [], []
    exact = True
    for side, values in (("a", inst.a), ("b", inst.b)):
        for idx, x in enumerate(values):
            scaled = rho * x * scale
            bar = round_half_away(scaled)
            if bar != scaled:
                exact = False
            if bar == 0:
                dropped.append(Origin(side, idx, 1))
                continue
            to_eta = (bar > 0) == (side == "a")
            origin = Origin(side, idx, 1 if bar > 0 else -1)
            if to_eta:
                eta.append(abs(bar))
                eta_o.append(origin)
            else:
                lam.append(abs(bar))
                lam_o.append(origin)
    # eta: positives of a then negatives of b; lam: negatives of a then positives of b
    rho_eps = rho * inst.epsilon * scale
    if exact:
        bar_eps = math.floor(rho_eps)
    else:
        bar_eps = math.ceil(rho_eps + Fraction(inst.M + inst.N, 2))
    return ReorgProblem(eta, lam, rho, bar_eps, eta_o, lam_o, exact, dropped)


@dataclass
class DpTable:
    """Packed reachability rows; row ``m`` covers the first ``m`` values."""

    values: list[int]
    X: int
    packed: np.ndarray  # shape (len(values) + 1, ceil((X + 1) / 8)), uint8

    def cell(self, m: int, i: int) -> bool:
        if not 0 <= i <= self.X:
            return False
        return bool((self.packed[m, i >> 3] >> (i & 7)) & 1)

    def row(self, m: int) -> np.ndarray:
        bits = np.unpackbits(self.packed[m], bitorder="little")
        return bits[: self.X + 1].astype(bool)

    def last_row(self) -> np.ndarray:
        return self.row(len(self.values))


def tabulate(values, X: int, *, max_cells: int = DEFAULT_MAX_CELLS) -> DpTable:
    """Subset-sum reachability over columns ``0..X`` for every prefix."""
    values = [int(v) for v in values]
    if any(v <= 0 for v in values):
        raise ValueError("tabulation needs strictly positive values")
    if X < 0:
        raise ValueError("X must be non-negative")
    if (len(values) + 1) * (X + 1) > max_cells:
        raise BudgetExceeded(f"DP table {len(values) + 1} x {X + 1} exceeds {max_cells} cells")
    nbytes = (X + 1 + 7) // 8
    keep = (1 << (X + 1)) - 1
    row = 1
    chunks = [row.to_bytes(nbytes, "little")]
    for v in values:
        row = (row | (row << v)) & keep
        chunks.append(row.to_bytes(nbytes, "little"))
    packed = np.frombuffer(b"".join(chunks), dtype=np.uint8).reshape(len(values) + 1, nbytes)
    return DpTable(values, X, packed)


class MatchedSums:
    """Sum pairs ``(i, j)`` reachable in both last rows with ``|i - j| == e``.

    Pairs for each ``e`` are computed on demand, sorted by ``i`` then ``j``.
    """

    def __init__(self, t_eta: DpTable, t_lam: DpTable, bar_eps: int):
        self.bar_eps = bar_eps
        self._le = t_eta.last_row()
        self._ll = t_lam.last_row()
        self._memo: dict[int, tuple[np.ndarray, np.ndarray]] = {}

    def pairs(self, e: int) -> tuple[np.ndarray, np.ndarray]:
        if e not in self._memo:
            self._memo = {e: self._compute(e)}
        return self._memo[e]

    def _compute(self, e: int):
        le, ll = self._le, self._ll
        if e == 0:
            n = min(len(le), len(ll))
            i = np.flatnonzero(le[:n] & ll[:n])
            return i, i.copy()
        parts_i, parts_j = [], []
        # j = i - e
        n = min(len(le) - e, len(ll))
        if n > 0:
            k = np.flatnonzero(le[e : e + n] & ll[:n])
            parts_i.append(k + e)
            parts_j.append(k)
        # j = i + e
        n = min(len(le), len(ll) - e)
        if n > 0:
            k = np.flatnonzero(le[:n] & ll[e : e + n])
            parts_i.append(k)
            parts_j.append(k + e)
        if not parts_i:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty
        i = np.concatenate(parts_i)
        j = np.concatenate(parts_j)
        order = np.lexsort((j, i))
        return i[order], j[order]

    def __contains__(self, pair) -> bool:
        i, j = pair
        e = abs(i - j)
        if e > self.bar_eps or i < 0 or j < 0:
            return False
        return i < len(self._le) and j < len(self._ll) and bool(self._le[i] and self._ll[j])

    def all_pairs(self):
        for e in range(self.bar_eps + 1):
            ii, jj = self.pairs(e)
            yield e, list(zip(ii.tolist(), jj.tolist()))


def matched_sums(t_eta: DpTable, t_lam: DpTable, bar_eps: int) -> MatchedSums:
    return MatchedSums(t_eta, t_lam, bar_eps)


def backtrack_subsets(table: DpTable, target: int, *, kernels: str | None = None) -> list[int]:
    """Every subset (as a position mask) of ``table.values`` summing to ``target``."""
    if not table.cell(len(table.values), target):
        return []
    n = len(table.values)
    en = _kernels.get(kernels).SubsetEnumerator(
        table.packed, table.values, [0] * n, [0] * n, target
    )
    out = []
    while not en.exhausted:
        subsets, *_ = en.next_block(BLOCK)
        out.extend(sum(1 << p for p in s) for s in subsets)
    return out


@dataclass
class DpConfig:
    rho: object = None  # None -> default_rho(instance)
    fast_path: bool = True
    max_cells: int = DEFAULT_MAX_CELLS
    kernels: str | None = None


class _Side:
    """Enumerator factory plus a cache of fully enumerated small targets."""

    def __init__(self, kern, table: DpTable, mags, from_a, deadline: Deadline):
        self.kern = kern
        self.table = table
        self.values = np.asarray(table.values, dtype=np.int64)
        self.mags = np.asarray(mags, dtype=np.int64)
        self.from_a = np.asarray(from_a, dtype=np.uint8)
        self.deadline = deadline
        self._cache: dict[int, tuple] = {}

    def blocks(self, target: int):
        """Yield blocks ``(subsets, sums, has_a, has_b)``, each sorted smallest-first."""
        hit = self._cache.get(target)
        if hit is not None:
            yield hit
            return
        en = self.kern.SubsetEnumerator(self.table.packed, self.values, self.mags, self.from_a, target)
        first = True
        while not en.exhausted:
            self.deadline.check()
            subsets, sums, ha, hb = en.next_block(BLOCK)
            if not subsets:
                break
            sizes = np.fromiter((len(s) for s in subsets), dtype=np.int64, count=len(subsets))
            order = np.argsort(sizes, kind="stable")
            blk = ([subsets[k] for k in order], sums[order], ha[order], hb[order])
            if first and en.exhausted:
                if len(self._cache) > 4096:
                    self._cache.clear()
                self._cache[target] = blk
            first = False
            yield blk


def _check_magnitude(inst: Instance):
    total = sum(abs(x) for x in inst.a) + sum(abs(x) for x in inst.b) + inst.epsilon
    if total >= INT64_SAFE:
        raise ValueError("amounts too large for the 64-bit solver kernels")


def solve_decision(inst: Instance, cfg: DpConfig | None = None,
                   deadline: Deadline | float | None = None) -> Match | None:
    """Find one valid match or return ``None``.

    Raises :class:`~ssmp.deadline.DeadlineExceeded` when the deadline passes.
    """
    cfg = cfg or DpConfig()
    deadline = as_deadline(deadline)
    if inst.M == 0 or inst.N == 0:
        return None
    _check_magnitude(inst)
    rho = default_rho(inst) if cfg.rho is None else as_fraction(cfg.rho)
    reorg = discretize_reorganize(inst, rho)
    eb = reorg.bar_eps
    s_eta, s_lam = sum(reorg.eta), sum(reorg.lam)
    t_eta = tabulate(reorg.eta, min(s_eta, s_lam + eb), max_cells=cfg.max_cells)
    t_lam = tabulate(reorg.lam, min(s_lam, s_eta + eb), max_cells=cfg.max_cells)
    deadline.check()
    sums = MatchedSums(t_eta, t_lam, eb)
    kern = _kernels.get(cfg.kernels)

    positive = reorg.exact and all(o.side == "a" for o in reorg.eta_origin) and all(
        o.side == "b" for o in reorg.lam_origin
    )
    if positive and cfg.fast_path:
        # every (i, j) with i, j > 0 is realised by a valid match
        for e in range(eb + 1):
            ii, jj = sums.pairs(e)
            ok = np.flatnonzero((ii > 0) & (jj > 0))
            if len(ok):
                i, j = int(ii[ok[0]]), int(jj[ok[0]])
                p = backtrack_first(kern, t_eta, i)
                q = backtrack_first(kern, t_lam, j)
                m = reorg.to_match(p, q)
                if not is_valid_match(inst, m):
                    raise AssertionError("positive-integer fast path produced an invalid match")
                return m
        return None

    side_eta = _Side(kern, t_eta, [abs(_orig(inst, o)) for o in reorg.eta_origin],
                     [o.side == "a" for o in reorg.eta_origin], deadline)
    side_lam = _Side(kern, t_lam, [abs(_orig(inst, o)) for o in reorg.lam_origin],
                     [o.side == "a" for o in reorg.lam_origin], deadline)
    for e in range(eb + 1):
        ii, jj = sums.pairs(e)
        for i, j in zip(ii.tolist(), jj.tolist()):
            if i == 0 and j == 0:
                continue
            deadline.check()
            for pj, sj, aj, bj in side_eta.blocks(i):
                for ql, sl, al, bl in side_lam.blocks(j):
                    hit = kern.first_valid_pair(sj, aj, bj, sl, al, bl, inst.epsilon)
                    if hit is not None:
                        m = reorg.to_match(pj[hit[0]], ql[hit[1]])
                        if not is_valid_match(inst, m):
                            raise AssertionError("DP produced an invalid match")
                        return m
    return None


def _orig(inst: Instance, o: Origin) -> int:
    return inst.a[o.index] if o.side == "a" else inst.b[o.index]


def backtrack_first(kern, table: DpTable, target: int):
    n = len(table.values)
    en = kern.SubsetEnumerator(table.packed, np.asarray(table.values, dtype=np.int64),
                               np.zeros(n, dtype=np.int64), np.zeros(n, dtype=np.uint8), target)
    subsets, *_ = en.next_block(1)
    return subsets[0]


class DpSolver:
    """Decision solver adapter for the greedy driver."""

    name = "dp"

    def __init__(self, config: DpConfig | None = None):
        self.config = config or DpConfig()

    def solve(self, inst: Instance, deadline: Deadline) -> Match | None:
        return solve_decision(inst, self.config, deadline)
