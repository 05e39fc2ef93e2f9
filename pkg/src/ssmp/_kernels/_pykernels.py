"""Reference (pure Python) implementations of the hot loops.

The compiled module ``_ckernels`` exposes the same three callables with
identical semantics and scan order; tests run both and compare.
"""

from itertools import islice

import numpy as np

_CHECK_EVERY = 1 << 14


def _w_order(M, popcount_order):
    """Non-empty masks over ``M`` bits; popcount-ascending order is numeric
    within each popcount class (Gosper's hack)."""
    if not popcount_order:
        yield from range(1, 1 << M)
        return
    limit = 1 << M
    for k in range(1, M + 1):
        w = (1 << k) - 1
        while w < limit:
            yield w
            c = w & -w
            r = w + c
            w = (((r ^ w) >> 2) // c) | r


def search_scan(a, c_sums, bucket_keys, bucket_starts, d_sums, d_masks, eps, popcount_order, check):
    """Scan subsets of ``a`` against the split cache.

    Returns ``(w, c_index, entry_index)`` of the first hit or ``None``.
    ``c_index`` doubles as the ``v'`` mask. Entries of bucket ``k`` occupy
    ``d_sums[bucket_starts[t]:bucket_starts[t + 1]]`` where
    ``bucket_keys[t] == k``.
    """
    a = [int(x) for x in a]
    cs = [int(x) for x in c_sums]
    ds = [int(x) for x in d_sums]
    dm = [int(x) for x in d_masks]
    starts = [int(x) for x in bucket_starts]
    buckets = {int(k): (starts[t], starts[t + 1]) for t, k in enumerate(bucket_keys)}
    eps = int(eps)
    two_eps = 2 * eps
    M = len(a)
    probes = 0
    for w in _w_order(M, popcount_order):
        s = 0
        x, i = w, 0
        while x:
            if x & 1:
                s += a[i]
            x >>= 1
            i += 1
        for ci, c in enumerate(cs):
            probes += 1
            if probes % _CHECK_EVERY == 0:
                check()
            dhat = s - c
            if eps == 0:
                keys = (dhat,)
            else:
                # round half toward +inf: floor((2 dhat + eps) / (2 eps))
                kr = (2 * dhat + eps) // two_eps
                keys = (kr - 1, kr, kr + 1)
            for key in keys:
                span = buckets.get(key)
                if span is None:
                    continue
                for e in range(span[0], span[1]):
                    if abs(ds[e] - dhat) <= eps and (ci or dm[e]):
                        return w, ci, e
    return None


def _bit(row, x):
    return (row[x >> 3] >> (x & 7)) & 1


def _dfs(rows, values, target):
    m0 = len(rows) - 1
    if not _bit(rows[m0], target):
        return
    if target == 0:
        yield ()
        return
    chosen = []
    # frame: [m, x, state, included]
    stack = [[m0, target, 0, False]]
    while stack:
        fr = stack[-1]
        m, x = fr[0], fr[1]
        if x == 0:
            yield tuple(chosen)
            stack.pop()
            if fr[3]:
                chosen.pop()
            continue
        st = fr[2]
        if st == 0:
            fr[2] = 1
            v = values[m - 1]
            if x >= v and _bit(rows[m - 1], x - v):
                chosen.append(m - 1)
                stack.append([m - 1, x - v, 0, True])
            continue
        if st == 1:
            fr[2] = 2
            if _bit(rows[m - 1], x):
                stack.append([m - 1, x, 0, False])
            continue
        stack.pop()
        if fr[3]:
            chosen.pop()


class SubsetEnumerator:
    """Back-track every subset of ``values`` reaching ``target``.

    ``rows`` is a 2-D ``uint8`` array; ``rows[m]`` is the packed
    (little-endian bit order) reachability row over the first ``m`` values,
    so ``rows[0]`` holds only sum 0. Subsets come out as tuples of positions
    in descending order, in depth-first order (include branch first).
    """

    def __init__(self, rows, values, mags, from_a, target):
        self._values = [int(v) for v in values]
        self._mags = [int(v) for v in mags]
        self._from_a = [bool(f) for f in from_a]
        packed = [bytes(r) for r in np.asarray(rows, dtype=np.uint8)]
        self._it = _dfs(packed, self._values, int(target))
        self.exhausted = False

    def next_block(self, n):
        """Return ``(subsets, sums, has_a, has_b)`` for up to ``n`` subsets."""
        subsets = list(islice(self._it, n))
        if len(subsets) < n:
            self.exhausted = True
        mags, fa = self._mags, self._from_a
        sums = np.array([sum(mags[p] for p in s) for s in subsets], dtype=np.int64)
        has_a = np.array([any(fa[p] for p in s) for s in subsets], dtype=bool)
        has_b = np.array([not all(fa[p] for p in s) for s in subsets], dtype=bool)
        return subsets, sums, has_a, has_b


def first_valid_pair(sj, aj, bj, sl, al, bl, eps):
    """First ``(p, q)`` in row-major order with ``|sj[p] - sl[q]| <= eps``
    and both an ``a`` and a ``b`` element present across the pair."""
    nl = len(sl)
    if len(sj) == 0 or nl == 0:
        return None
    aj, bj, al, bl = (np.asarray(x, dtype=bool) for x in (aj, bj, al, bl))
    rows = max(1, (1 << 18) // nl)
    for lo in range(0, len(sj), rows):
        hi = min(lo + rows, len(sj))
        ok = np.abs(sj[lo:hi, None] - sl[None, :]) <= eps
        ok &= aj[lo:hi, None] | al[None, :]
        ok &= bj[lo:hi, None] | bl[None, :]
        flat = int(np.argmax(ok))
        if ok.flat[flat]:
            return lo + flat // nl, flat % nl
    return None
