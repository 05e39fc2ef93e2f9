# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops; semantics mirror ``_pykernels`` exactly."""

import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t, uint64_t, uint8_t
from libcpp.vector cimport vector

cnp.import_array()

cdef int64_t CHECK_EVERY = 1 << 16


cdef inline int64_t floordiv(int64_t n, int64_t d) nogil:
    cdef int64_t q = n // d
    if (n % d != 0) and ((n < 0) != (d < 0)):
        q -= 1
    return q


cdef inline Py_ssize_t find_key(const int64_t[:] keys, int64_t key) nogil:
    cdef Py_ssize_t lo = 0, hi = keys.shape[0], mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if keys[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    if lo < keys.shape[0] and keys[lo] == key:
        return lo
    return -1


def search_scan(a, c_sums, bucket_keys, bucket_starts, d_sums, d_masks,
                eps, popcount_order, check):
    cdef const int64_t[:] av = np.ascontiguousarray(a, dtype=np.int64)
    cdef const int64_t[:] cs = np.ascontiguousarray(c_sums, dtype=np.int64)
    cdef const int64_t[:] keys = np.ascontiguousarray(bucket_keys, dtype=np.int64)
    cdef const int64_t[:] starts = np.ascontiguousarray(bucket_starts, dtype=np.int64)
    cdef const int64_t[:] ds = np.ascontiguousarray(d_sums, dtype=np.int64)
    cdef const uint64_t[:] dm = np.ascontiguousarray(d_masks, dtype=np.uint64)
    cdef int64_t e = eps
    cdef int M = av.shape[0]
    cdef Py_ssize_t nc = cs.shape[0]
    cdef bint pc = popcount_order
    cdef uint64_t w, x, c, r, limit
    cdef int k, i
    cdef int64_t s, dhat, kr, key, diff
    cdef Py_ssize_t ci, t, ent
    cdef int64_t probes = 0
    if M == 0:
        return None
    if M > 62:
        raise ValueError("compiled search kernel supports at most 62 elements on the scanned side")
    limit = (<uint64_t>1) << M
    k = 1
    w = 1
    while True:
        # w is the current candidate
        s = 0
        x = w
        i = 0
        while x:
            if x & 1:
                s += av[i]
            x >>= 1
            i += 1
        for ci in range(nc):
            probes += 1
            if probes % CHECK_EVERY == 0:
                check()
            dhat = s - cs[ci]
            if e == 0:
                t = find_key(keys, dhat)
                if t >= 0:
                    for ent in range(starts[t], starts[t + 1]):
                        if ds[ent] == dhat and (ci != 0 or dm[ent] != 0):
                            return int(w), int(ci), int(ent)
            else:
                kr = floordiv(2 * dhat + e, 2 * e)
                for key in range(kr - 1, kr + 2):
                    t = find_key(keys, key)
                    if t < 0:
                        continue
                    for ent in range(starts[t], starts[t + 1]):
                        diff = ds[ent] - dhat
                        if diff < 0:
                            diff = -diff
                        if diff <= e and (ci != 0 or dm[ent] != 0):
                            return int(w), int(ci), int(ent)
        # advance
        if pc:
            c = w & (~w + 1)
            r = w + c
            w = (((r ^ w) >> 2) // c) | r
            if w >= limit:
                k += 1
                if k > M:
                    break
                w = (((<uint64_t>1) << k) - 1)
        else:
            w += 1
            if w >= limit:
                break
    return None


cdef inline bint getbit(const uint8_t[:, :] T, Py_ssize_t m, int64_t x) nogil:
    return (T[m, x >> 3] >> (x & 7)) & 1


cdef class SubsetEnumerator:
    cdef const uint8_t[:, :] _T
    cdef int64_t[:] _values
    cdef int64_t[:] _mags
    cdef uint8_t[:] _from_a
    cdef vector[int64_t] st_m
    cdef vector[int64_t] st_x
    cdef vector[int] st_state
    cdef vector[bint] st_inc
    cdef vector[int64_t] chosen
    cdef public bint exhausted
    cdef bint started
    cdef int64_t target

    def __init__(self, rows, values, mags, from_a, target):
        self._T = np.ascontiguousarray(rows, dtype=np.uint8)
        self._values = np.array(values, dtype=np.int64)
        self._mags = np.array(mags, dtype=np.int64)
        self._from_a = np.array(from_a, dtype=np.uint8)
        self.target = target
        self.exhausted = False
        self.started = False

    def next_block(self, Py_ssize_t n):
        cdef list subsets = []
        cdef list sums = []
        cdef list has_a = []
        cdef list has_b = []
        cdef Py_ssize_t top, j, m0
        cdef int64_t m, x, v, tot
        cdef int state
        cdef bint ha, hb
        if self.exhausted:
            return subsets, np.array(sums, dtype=np.int64), np.array(has_a, dtype=bool), np.array(has_b, dtype=bool)
        if not self.started:
            self.started = True
            m0 = self._T.shape[0] - 1
            if not getbit(self._T, m0, self.target):
                self.exhausted = True
                return subsets, np.array(sums, dtype=np.int64), np.array(has_a, dtype=bool), np.array(has_b, dtype=bool)
            if self.target == 0:
                self.exhausted = True
                subsets.append(())
                return subsets, np.zeros(1, dtype=np.int64), np.zeros(1, dtype=bool), np.zeros(1, dtype=bool)
            self.st_m.push_back(m0)
            self.st_x.push_back(self.target)
            self.st_state.push_back(0)
            self.st_inc.push_back(False)
        while self.st_m.size() > 0 and len(subsets) < n:
            top = self.st_m.size() - 1
            m = self.st_m[top]
            x = self.st_x[top]
            if x == 0:
                tot = 0
                ha = False
                hb = False
                tup = []
                for j in range(<Py_ssize_t>self.chosen.size()):
                    tup.append(self.chosen[j])
                    tot += self._mags[self.chosen[j]]
                    if self._from_a[self.chosen[j]]:
                        ha = True
                    else:
                        hb = True
                subsets.append(tuple(tup))
                sums.append(tot)
                has_a.append(ha)
                has_b.append(hb)
                self._pop()
                continue
            state = self.st_state[top]
            if state == 0:
                self.st_state[top] = 1
                v = self._values[m - 1]
                if x >= v and getbit(self._T, m - 1, x - v):
                    self.chosen.push_back(m - 1)
                    self.st_m.push_back(m - 1)
                    self.st_x.push_back(x - v)
                    self.st_state.push_back(0)
                    self.st_inc.push_back(True)
                continue
            if state == 1:
                self.st_state[top] = 2
                if getbit(self._T, m - 1, x):
                    self.st_m.push_back(m - 1)
                    self.st_x.push_back(x)
                    self.st_state.push_back(0)
                    self.st_inc.push_back(False)
                continue
            self._pop()
        if self.st_m.size() == 0:
            self.exhausted = True
        return subsets, np.array(sums, dtype=np.int64), np.array(has_a, dtype=bool), np.array(has_b, dtype=bool)

    cdef void _pop(self):
        cdef Py_ssize_t top = self.st_m.size() - 1
        if self.st_inc[top]:
            self.chosen.pop_back()
        self.st_m.pop_back()
        self.st_x.pop_back()
        self.st_state.pop_back()
        self.st_inc.pop_back()


def first_valid_pair(sj, aj, bj, sl, al, bl, eps):
    cdef const int64_t[:] SJ = np.ascontiguousarray(sj, dtype=np.int64)
    cdef const int64_t[:] SL = np.ascontiguousarray(sl, dtype=np.int64)
    cdef const uint8_t[:] AJ = np.ascontiguousarray(aj, dtype=np.uint8)
    cdef const uint8_t[:] BJ = np.ascontiguousarray(bj, dtype=np.uint8)
    cdef const uint8_t[:] AL = np.ascontiguousarray(al, dtype=np.uint8)
    cdef const uint8_t[:] BL = np.ascontiguousarray(bl, dtype=np.uint8)
    cdef int64_t e = eps, diff
    cdef Py_ssize_t p, q
    for p in range(SJ.shape[0]):
        for q in range(SL.shape[0]):
            diff = SJ[p] - SL[q]
            if diff < 0:
                diff = -diff
            if diff <= e and (AJ[p] | AL[q]) and (BJ[p] | BL[q]):
                return int(p), int(q)
    return None
