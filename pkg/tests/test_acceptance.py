"""Acceptance suite: one test per criterion, each printing a PASS/FAIL line.

Tolerances are pinned here; nothing is loosened to make a run pass.
"""

import itertools
import random
import statistics

from ssmp import harness
from ssmp.benchgen import GenConfig, IntegerFamily, RealFamily, generate
from ssmp.core import Instance, Match, indices, is_valid_match, objective
from ssmp.dp import DpConfig, DpSolver, backtrack_subsets, discretize_reorganize, tabulate
from ssmp.dp import solve_decision as dp_decide
from ssmp.exact import ExactStatus, InternalBackend, solve_exact
from ssmp.greedy import Status, greedy_solve
from ssmp.oracle import decision_oracle, optimal_oracle
from ssmp.search import SearchConfig, SearchSolver, build_cache, solve_decision as search_decide

TIME_LIMIT = 90.0

# criterion 3: mean measures must sit within +-40% of these
TABLE1 = {("search", 10): 7.9, ("search", 20): 21.2, ("search", 30): 31.0,
          ("dp", 10): 9.2, ("dp", 20): 23.4, ("dp", 30): 31.3}
TABLE1_REL_TOL = 0.40
RATIO_FACTOR = 4.0

# criteria 4 and 5: bands for the mean greedy-dp measure
BAND_EPS_SMALL = (185.0, 235.0)
BAND_EPS_ONE = (210.0, 256.0)


def run_timed(inst, solver, **opts):
    return harness.enforce_deadline(harness.solver_call(inst, solver, **opts), TIME_LIMIT)


def test_c1_oracle_optimality(acceptance):
    rng = random.Random(1)
    bad = []
    for seed in range(50):
        M, N = rng.choice([2, 3, 4]), rng.choice([2, 3, 4])
        inst = generate(GenConfig(M, N, IntegerFamily(10), "0", seed=seed, count=1))[0]
        best = optimal_oracle(inst)[0]
        res = solve_exact(inst, InternalBackend())
        if res.status is not ExactStatus.OPTIMAL or objective(inst, res.solution) != best:
            bad.append((seed, "exact"))
        for s in (SearchSolver(), DpSolver()):
            if objective(inst, greedy_solve(inst, s).solution) > best:
                bad.append((seed, s.name))
    ok = acceptance(1, not bad, f"50 instances, mismatches={bad}")
    assert ok


def test_c2_decision_agreement(acceptance):
    M, N = 4, 6
    splits = sorted({0, 1, (N - M) // 2, N})
    disagreements = 0
    total = 0
    for eps in ("0", "1", "3"):
        for inst in generate(GenConfig(M, N, IntegerFamily(20), eps, seed=202, count=200)):
            truth = decision_oracle(inst) is not None
            for r in splits:
                m = search_decide(inst, SearchConfig(r=r))
                total += 1
                disagreements += (m is not None) != truth or (m is not None and not is_valid_match(inst, m))
            m = dp_decide(inst, DpConfig(rho=1))
            total += 1
            disagreements += (m is not None) != truth or (m is not None and not is_valid_match(inst, m))
    ok = acceptance(2, disagreements == 0, f"{total} solver calls over 600 instances, r in {splits}, "
                                           f"disagreements={disagreements}")
    assert ok


def test_c3_integer_trend(acceptance):
    stats = {}
    slow = []
    for N in (10, 20, 30):
        insts = generate(GenConfig(10, N, IntegerFamily(10**4), "0", seed=0, count=10))
        for solver, key in (("greedy-search", "search"), ("greedy-dp", "dp")):
            outs = [run_timed(inst, solver) for inst in insts]
            slow += [(key, N) for o in outs if o.status is not Status.COMPLETED]
            done = [o for o in outs if o.measure is not None]
            stats[(key, N)] = (statistics.fmean(o.measure for o in done) if done else float("nan"),
                               statistics.fmean(o.runtime_s for o in outs))
    growth_search = stats[("search", 30)][1] / stats[("search", 10)][1]
    growth_dp = stats[("dp", 30)][1] / stats[("dp", 10)][1]
    off = {k: (round(stats[k][0], 2), v) for k, v in TABLE1.items()
           if not abs(stats[k][0] - v) <= TABLE1_REL_TOL * v}
    ok = not slow and not off and growth_search >= RATIO_FACTOR * growth_dp
    detail = (f"search growth {growth_search:.1f}x vs dp growth {growth_dp:.1f}x (need >= {RATIO_FACTOR}x); "
              + ", ".join(f"{k}@N={n}: {stats[(k, n)][0]:.1f}" for k, n in TABLE1)
              + f"; out of band={off}; incomplete={slow}")
    assert acceptance(3, ok, detail), detail


def _dp_band(number, eps, rho, band, acceptance):
    insts = generate(GenConfig(100, 100, RealFamily("-100", "100", 4), eps, seed=0, count=10))
    outs = [run_timed(inst, "greedy-dp", rho=rho) for inst in insts]
    incomplete = sum(o.status is not Status.COMPLETED for o in outs)
    measures = [o.measure for o in outs if o.measure is not None]
    mean = statistics.fmean(measures) if measures else float("nan")
    ok = incomplete == 0 and band[0] <= mean <= band[1]
    detail = (f"M=N=100 eps={eps} rho={rho}: mean measure {mean:.1f} (band {band[0]:g}..{band[1]:g}), "
              f"max runtime {max(o.runtime_s for o in outs):.2f}s, incomplete={incomplete}")
    assert acceptance(number, ok, detail), detail


def test_c4_dp_small_tolerance(acceptance):
    _dp_band(4, "0.0001", 10, BAND_EPS_SMALL, acceptance)


def test_c5_dp_unit_tolerance(acceptance):
    _dp_band(5, "1", 1, BAND_EPS_ONE, acceptance)


def test_c6_warm_start_contract(acceptance):
    limit = 5.0
    violations = []
    checkpoints = 0
    for k, inst in enumerate(generate(GenConfig(20, 20, RealFamily(), "0.0001", seed=0, count=10))):
        start = greedy_solve(inst, DpSolver(DpConfig(rho=10)), TIME_LIMIT)
        assert start.status is Status.COMPLETED
        base = objective(inst, start.solution)
        seen = []
        res = solve_exact(inst, InternalBackend(), limit, warm_start=start.solution,
                          on_progress=lambda t, inc, bd: seen.append(inc))
        reported = seen + [s for _, s in res.trace] + [objective(inst, res.solution)]
        checkpoints += len(reported)
        if min(reported) < base:
            violations.append(k)
    ok = acceptance(6, not violations, f"10 instances, {checkpoints} checkpoints, "
                                       f"below warm start: {violations}")
    assert ok


def test_c7_cache_accounting(acceptance):
    rng = random.Random(7)
    wrong = []
    for r in (0, 4, 8, 12, 16):
        for _ in range(3):
            b = [rng.choice([x for x in range(-10**4, 10**4 + 1) if x]) for _ in range(16)]
            cache = build_cache(b, r, rng.choice([0, 1, 50]))
            n_h = sum(len(e) for e in cache.h.values())
            if len(cache.C) != 2**r or n_h != 2 ** (16 - r):
                wrong.append((r, len(cache.C), n_h))
    ok = acceptance(7, not wrong, f"N=16, r in {{0,4,8,12,16}}, wrong sizes={wrong}")
    assert ok


def _lists():
    # every ordered list of length <= 4, plus every sorted list of length 5 and 6
    for n in range(1, 5):
        yield from itertools.product(range(1, 11), repeat=n)
    for n in (5, 6):
        yield from itertools.combinations_with_replacement(range(1, 11), n)


def test_c8_backtrack_completeness(acceptance):
    checked = 0
    bad = []
    for vals in _lists():
        n = len(vals)
        by_sum = {}
        for mask in range(1 << n):
            by_sum.setdefault(sum(vals[k] for k in range(n) if mask >> k & 1), []).append(mask)
        t = tabulate(vals, sum(vals))
        for target, masks in by_sum.items():
            checked += 1
            if sorted(backtrack_subsets(t, target)) != masks:
                bad.append((vals, target))
    ok = acceptance(8, not bad, f"{checked} (list, target) pairs, mismatches={bad[:5]}")
    assert ok


def _cells(reorg, m: Match):
    inv = reorg.inverse()
    i = j = 0
    for side, mask in (("a", m.w), ("b", m.v)):
        for k in indices(mask):
            where, pos = inv[(side, k)]
            if where == "eta":
                i += reorg.eta[pos]
            else:
                j += reorg.lam[pos]
    return i, j


def _check_prop(inst, rho, matches):
    reorg = discretize_reorganize(inst, rho)
    te = tabulate(reorg.eta, sum(reorg.eta))
    tl = tabulate(reorg.lam, sum(reorg.lam))
    bad = []
    for m in matches:
        i, j = _cells(reorg, m)
        if abs(i - j) > reorg.bar_eps or not te.cell(len(reorg.eta), i) or not tl.cell(len(reorg.lam), j):
            bad.append(m)
    return reorg, bad


def test_c9_match_preservation(acceptance):
    rho = 10
    total = 0
    bad = []
    seeded = generate(GenConfig(6, 6, RealFamily("-100", "100", 4), "0.0001", seed=9, count=100))
    for k, inst in enumerate(seeded):
        found = decision_oracle(inst)
        everything = [Match(w, v) for w in range(1, 64) for v in range(1, 64) if is_valid_match(inst, Match(w, v))]
        matches = everything + ([found] if found is not None else [])
        _, b = _check_prop(inst, rho, matches)
        total += len(matches)
        bad += [(k, m) for m in b]
    seeded_matches = total
    # the seeded draws rarely contain a match, so also plant one per instance
    rng = random.Random(99)
    for k, inst in enumerate(seeded):
        w = rng.randrange(1, 64)
        v = rng.randrange(1, 32)
        target = sum(inst.a[i] for i in indices(w)) - sum(inst.b[j] for j in indices(v)) + rng.randint(-1, 1)
        if target == 0 or abs(target) > 10**6:
            continue
        b = list(inst.b)
        b[5] = target
        planted = Instance(inst.a, tuple(b), inst.epsilon, inst.digits)
        everything = [Match(w2, v2) for w2 in range(1, 64) for v2 in range(1, 64)
                      if is_valid_match(planted, Match(w2, v2))]
        _, bb = _check_prop(planted, rho, everything)
        total += len(everything)
        bad += [("planted", k, m) for m in bb]
    ok = acceptance(9, not bad, f"{seeded_matches} matches in seeded instances, {total} incl. planted; "
                                f"violations={bad[:5]}")
    assert ok
