import os
import random
import subprocess
import sys

import numpy as np
import pytest

from ssmp import _kernels
from ssmp.search import build_cache

needs_both = pytest.mark.skipif("cython" not in _kernels.available(), reason="compiled kernels not built")


def test_selection():
    assert _kernels.get("python") is _kernels._pykernels
    assert _kernels.get() is _kernels.active
    with pytest.raises(ValueError):
        _kernels.get("fortran")


def test_pure_python_env():
    env = dict(os.environ, SSMP_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import ssmp; print(ssmp.KERNEL_BACKEND)"],
                         capture_output=True, text=True, env=env)
    assert out.stdout.strip() == "python"


@needs_both
def test_search_scan_equivalent():
    rng = random.Random(0)
    py, cy = _kernels.get("python"), _kernels.get("cython")
    for _ in range(300):
        M, N = rng.randint(1, 6), rng.randint(1, 9)
        a = np.array([rng.choice([-7, -3, -1, 2, 5, 9, 11]) for _ in range(M)], dtype=np.int64)
        b = [rng.choice([-8, -2, 1, 3, 4, 10]) for _ in range(N)]
        eps = rng.choice([0, 1, 2, 5])
        c = build_cache(b, rng.randint(0, N), eps)
        for pc in (True, False):
            args = (a, c.c_sums, c.bucket_keys, c.bucket_starts, c.d_sums, c.d_masks, eps, pc, lambda: None)
            r1, r2 = py.search_scan(*args), cy.search_scan(*args)
            assert (r1 is None) == (r2 is None)
            if r1 is not None:
                assert tuple(map(int, r1)) == tuple(map(int, r2))


@needs_both
def test_first_valid_pair_equivalent():
    rng = np.random.default_rng(1)
    py, cy = _kernels.get("python"), _kernels.get("cython")
    for _ in range(300):
        n, m = rng.integers(1, 40, size=2)
        sj, sl = rng.integers(-50, 50, n), rng.integers(-50, 50, m)
        aj, bj = rng.integers(0, 2, n).astype(np.uint8), rng.integers(0, 2, n).astype(np.uint8)
        al, bl = rng.integers(0, 2, m).astype(np.uint8), rng.integers(0, 2, m).astype(np.uint8)
        eps = int(rng.integers(0, 3))
        assert py.first_valid_pair(sj, aj, bj, sl, al, bl, eps) == cy.first_valid_pair(sj, aj, bj, sl, al, bl, eps)


def test_first_valid_pair_semantics(kernel):
    k = _kernels.get(kernel)
    sj = np.array([5, 3], dtype=np.int64)
    sl = np.array([-5, -3], dtype=np.int64)
    one, zero = np.array([1, 1], dtype=np.uint8), np.array([0, 0], dtype=np.uint8)
    # differences: sj[p] - sl[q]; needs an a and a b element overall
    assert k.first_valid_pair(sj, one, zero, sl, zero, one, 0) is None
    s2 = np.array([5, 3], dtype=np.int64)
    assert k.first_valid_pair(sj, one, zero, s2, zero, one, 0) == (0, 0)
    assert k.first_valid_pair(sj, one, zero, s2, zero, zero, 10) is None
