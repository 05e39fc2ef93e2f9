"""``ssmp`` command line: gen, solve, bench, verify.

Exit codes: 0 success, 1 verification failure, 2 bad input,
3 timeout without a result.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .benchgen import write_instances
from .core import InstanceError, find_violation, load_instance, load_solution, objective
from .greedy import Status

EXIT_OK, EXIT_VERIFY, EXIT_INPUT, EXIT_TIMEOUT = 0, 1, 2, 3


def _fail(msg: str, code: int = EXIT_INPUT) -> int:
    print(f"ssmp: {msg}", file=sys.stderr)
    return code


def cmd_gen(args) -> int:
    suite = harness.parse_suite(harness.load_config_file(args.config))
    n = 0
    for cfg in suite.configs:
        n += len(write_instances(cfg, args.out))
    print(f"wrote {n} instances to {args.out}")
    return EXIT_OK


def cmd_solve(args) -> int:
    inst = load_instance(args.instance)
    opts = {"r": args.r, "rho": args.rho, "subset_order": args.subset_order,
            "warm_start": args.warm_start, "backend": args.backend}
    out = harness.enforce_deadline(harness.solver_call(inst, args.solver, **opts), args.time_limit)
    rec = {
        "instance": Path(args.instance).stem, "solver": args.solver,
        "M": inst.M, "N": inst.N, "measure": out.measure, "runtime_s": out.runtime_s,
        "status": out.status.value, "config": {"time_limit": args.time_limit, **opts},
        "payload": out.detail,
    }
    print(json.dumps(rec, sort_keys=True))
    if args.out and out.solution is not None:
        Path(args.out).write_text(json.dumps(out.solution.to_json()) + "\n")
    if out.status is Status.FAILED:
        return _fail(out.detail.get("error", "solver failed"))
    if out.measure is None:
        return EXIT_TIMEOUT
    return EXIT_OK


def cmd_bench(args) -> int:
    if args.from_runs:
        records = harness.read_runs(args.from_runs)
    else:
        suite = harness.parse_suite(harness.load_config_file(args.suite))
        if args.time_limit is not None:
            suite.time_limit = args.time_limit

        def show(rec):
            if not args.quiet:
                print(f"{rec.instance} {rec.solver} {rec.status} measure={rec.measure} "
                      f"{rec.runtime_s:.3f}s", file=sys.stderr)

        records = harness.run_suite(suite, parallel=args.parallel, workers=args.workers, progress=show)
    rows = harness.write_outputs(records, args.out, parallel=args.parallel)
    print(harness.render_table(rows))
    return EXIT_OK


def cmd_verify(args) -> int:
    inst = load_instance(args.instance)
    sol = load_solution(args.solution)
    problem = find_violation(inst, sol)
    if problem is not None:
        print(json.dumps({"feasible": False, "violation": problem}))
        return EXIT_VERIFY
    print(json.dumps({"feasible": True, "matches": len(sol.matches),
                      "measure": objective(inst, sol, args.k_weight)}))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="ssmp", description="Subset sum matching solvers and benchmarks.")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="write instance files from a config file")
    g.add_argument("config", help="JSON or TOML: one generator config or a suite with 'configs'")
    g.add_argument("--out", required=True)
    g.set_defaults(func=cmd_gen)

    s = sub.add_parser("solve", help="solve one instance and print a run record")
    s.add_argument("instance")
    s.add_argument("--solver", required=True, choices=harness.SOLVERS)
    s.add_argument("--time-limit", type=float, default=harness.DEFAULT_TIME_LIMIT)
    s.add_argument("--r", type=int, default=None, help="split point for greedy-search")
    s.add_argument("--rho", default=None, help="discretization scale for greedy-dp")
    s.add_argument("--subset-order", choices=("popcount", "lex"), default="popcount")
    s.add_argument("--warm-start", choices=("none", "dp"), default="none")
    s.add_argument("--backend", default=None,
                   help="exact backend: internal, a preset name or a command template "
                        "(default: $SSMP_MILP_BACKEND, else internal)")
    s.add_argument("--out", default=None, help="write the solution JSON here")
    s.set_defaults(func=cmd_solve)

    b = sub.add_parser("bench", help="run a suite; write runs.jsonl, runs.csv and table.csv")
    src = b.add_mutually_exclusive_group(required=True)
    src.add_argument("suite", nargs="?", help="JSON or TOML suite file")
    src.add_argument("--from-runs", default=None, help="re-aggregate an existing runs.jsonl")
    b.add_argument("--out", required=True)
    b.add_argument("--time-limit", type=float, default=None)
    b.add_argument("--parallel", action="store_true", help="run in worker processes (skews runtimes)")
    b.add_argument("--workers", type=int, default=None)
    b.add_argument("--quiet", action="store_true")
    b.set_defaults(func=cmd_bench)

    v = sub.add_parser("verify", help="check a solution against an instance")
    v.add_argument("instance")
    v.add_argument("solution")
    v.add_argument("--k-weight", type=int, default=1)
    v.set_defaults(func=cmd_verify)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (InstanceError, ValueError, OSError, KeyError) as exc:
        return _fail(str(exc))


if __name__ == "__main__":
    sys.exit(main())
