"""Time the compiled and pure-Python kernels on the same instances.

    python3 benchmarks/bench_kernels.py [--repeat 3] [--count 5]

Each row is a greedy run with one kernel backend; the speedup column is
python time over cython time. Both backends must return the same measure.
"""

import argparse
import statistics
import sys
import time

from ssmp import _kernels
from ssmp.benchgen import GenConfig, IntegerFamily, RealFamily, generate
from ssmp.core import objective
from ssmp.dp import DpConfig, DpSolver
from ssmp.greedy import greedy_solve
from ssmp.search import SearchConfig, SearchSolver

CASES = [
    ("search", GenConfig(10, 20, IntegerFamily(10**4), "0"), {}),
    ("search", GenConfig(10, 30, IntegerFamily(10**4), "0"), {}),
    ("dp", GenConfig(10, 30, IntegerFamily(10**4), "0"), {}),
    ("dp", GenConfig(50, 50, RealFamily(), "0.0001"), {"rho": 10}),
    ("dp", GenConfig(100, 100, RealFamily(), "1"), {"rho": 1}),
]


def make_solver(kind, kernel, opts):
    if kind == "search":
        return SearchSolver(SearchConfig(kernels=kernel))
    return DpSolver(DpConfig(kernels=kernel, **opts))


def time_case(kind, insts, kernel, opts, repeat):
    best = float("inf")
    measures = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        got = [objective(inst, greedy_solve(inst, make_solver(kind, kernel, opts)).solution) for inst in insts]
        best = min(best, time.perf_counter() - t0)
        measures = got
    return best, measures


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=3)
    ap.add_argument("--count", type=int, default=5, help="instances per case")
    args = ap.parse_args(argv)
    if "cython" not in _kernels.available():
        print("compiled kernels are not built; nothing to compare", file=sys.stderr)
        return 1
    print(f"{'solver':<7} {'M':>4} {'N':>4} {'eps':>7} {'cython_s':>9} {'python_s':>9} {'speedup':>8}")
    ratios = []
    for kind, cfg, opts in CASES:
        insts = generate(GenConfig(cfg.M, cfg.N, cfg.family, cfg.epsilon, seed=0, count=args.count))
        tc, mc = time_case(kind, insts, "cython", opts, args.repeat)
        tp, mp = time_case(kind, insts, "python", opts, args.repeat)
        if mc != mp:
            print(f"measure mismatch on {kind} {cfg}: {mc} vs {mp}", file=sys.stderr)
            return 2
        ratios.append(tp / tc)
        print(f"{kind:<7} {cfg.M:>4} {cfg.N:>4} {cfg.epsilon:>7} {tc:>9.3f} {tp:>9.3f} {tp / tc:>7.1f}x")
    print(f"geometric mean speedup: {statistics.geometric_mean(ratios):.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
