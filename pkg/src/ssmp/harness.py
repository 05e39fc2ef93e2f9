"""Benchmark runner: run solvers under a wall-clock limit, record results,
aggregate them into ``mean (std)`` tables."""

from __future__ import annotations

import csv
import io
import json
import statistics
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable

from .benchgen import GenConfig, generate_one, instance_filename
from .core import Instance, InstanceError, Solution, objective
from .deadline import Deadline, DeadlineExceeded
from .dp import DpConfig, DpSolver
from .exact import BackendError, ExactStatus, ExternalBackend, InternalBackend, solve_exact
from .greedy import Status, greedy_solve
from .oracle import optimal_oracle
from .search import BudgetExceeded, SearchConfig, SearchSolver

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

SOLVERS = ("exact", "greedy-search", "greedy-dp", "oracle")
DEFAULT_TIME_LIMIT = 90.0
CSV_COLUMNS = ["family", "M", "N", "param", "epsilon", "solver", "seed", "measure", "runtime_s", "status"]
PARALLEL_CAVEAT = "runs executed concurrently; runtimes may be inflated by contention"


@dataclass
class RunRecord:
    instance: str
    solver: str
    family: str
    M: int
    N: int
    param: str
    epsilon: str
    seed: int
    index: int
    measure: int | None
    runtime_s: float
    status: str
    config: dict = field(default_factory=dict)
    payload: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json(cls, obj: dict) -> RunRecord:
        return cls(**obj)

    def csv_row(self) -> list:
        return [self.family, self.M, self.N, self.param, self.epsilon, self.solver, self.seed,
                "" if self.measure is None else self.measure, f"{self.runtime_s:.6f}", self.status]


@dataclass
class Outcome:
    status: Status
    measure: int | None
    solution: Solution | None
    runtime_s: float
    detail: dict = field(default_factory=dict)


def enforce_deadline(call: Callable[[Deadline], Outcome], limit: float) -> Outcome:
    """Run ``call`` against a fresh deadline of ``limit`` seconds.

    A ``DeadlineExceeded`` escaping the call becomes ``TimedOut`` with no
    measure; solver errors become ``Failed``. The wall-clock runtime is
    filled in either way.
    """
    if not limit > 0:
        raise ValueError("time limit must be positive")
    deadline = Deadline(limit)
    t0 = time.perf_counter()
    try:
        out = call(deadline)
    except DeadlineExceeded:
        out = Outcome(Status.TIMED_OUT, None, None, 0.0)
    except (InstanceError, BudgetExceeded, BackendError, MemoryError) as exc:
        out = Outcome(Status.FAILED, None, None, 0.0, {"error": f"{type(exc).__name__}: {exc}"})
    out.runtime_s = time.perf_counter() - t0
    return out


def _greedy(inst: Instance, solver, deadline: Deadline) -> Outcome:
    res = greedy_solve(inst, solver, deadline)
    detail = {"solution": res.solution.to_json(), "iterations": res.iterations}
    if res.status is Status.COMPLETED:
        return Outcome(Status.COMPLETED, objective(inst, res.solution), res.solution, 0.0, detail)
    # partial greedy solutions are kept for inspection but carry no measure
    return Outcome(res.status, None, res.solution, 0.0, detail)


def solver_call(inst: Instance, solver: str, *, r: int | None = None, rho=None,
                subset_order: str = "popcount", warm_start: str = "none",
                backend=None, warm_limit: float | None = None) -> Callable[[Deadline], Outcome]:
    """Deadline-taking closure for one named solver."""
    if solver == "greedy-search":
        s = SearchSolver(SearchConfig(r=r, subset_order=subset_order))
        return lambda dl: _greedy(inst, s, dl)
    if solver == "greedy-dp":
        s = DpSolver(DpConfig(rho=rho))
        return lambda dl: _greedy(inst, s, dl)
    if solver == "oracle":
        def run_oracle(dl):
            score, sol = optimal_oracle(inst)
            return Outcome(Status.COMPLETED, score, sol, 0.0, {"solution": sol.to_json()})
        return run_oracle
    if solver == "exact":
        if warm_start not in ("none", "dp"):
            raise ValueError(f"unknown warm start {warm_start!r}")
        if isinstance(backend, str):
            backend = InternalBackend() if backend in ("", "internal") else ExternalBackend.from_spec(backend)

        def run_exact(dl):
            detail: dict = {}
            start = None
            if warm_start == "dp":
                # the warm-start heuristic runs on its own clock, then the exact
                # solver gets the full allowance
                limit = dl.remaining()
                t0 = time.perf_counter()
                res = greedy_solve(inst, DpSolver(DpConfig(rho=rho)), Deadline(warm_limit or limit))
                start = res.solution
                detail["warm_start_measure"] = objective(inst, start)
                detail["warm_start_status"] = res.status.value
                detail["warm_start_runtime_s"] = time.perf_counter() - t0
                dl = Deadline(limit)
            out = solve_exact(inst, backend, dl, warm_start=start)
            score = objective(inst, out.solution)
            detail.update({"solution": out.solution.to_json(), "exact_status": out.status.value,
                           "bound": out.bound, "trace": out.trace})
            if out.status is ExactStatus.OPTIMAL:
                return Outcome(Status.COMPLETED, score, out.solution, 0.0, detail)
            if out.status is ExactStatus.FEASIBLE:
                # the exact solver contributes its incumbent even on timeout
                return Outcome(Status.TIMED_OUT, score, out.solution, 0.0, detail)
            return Outcome(Status.TIMED_OUT, None, None, 0.0, detail)
        return run_exact
    raise ValueError(f"unknown solver {solver!r}; expected one of {SOLVERS}")


# -- suites ---------------------------------------------------------------

@dataclass
class Suite:
    configs: list[GenConfig]
    solvers: list[list[str]]
    options: list[dict[str, dict]]
    time_limit: float = DEFAULT_TIME_LIMIT


def load_config_file(path) -> dict:
    path = Path(path)
    text = path.read_text()
    try:
        if path.suffix.lower() == ".toml":
            return tomllib.loads(text)
        return json.loads(text)
    except (json.JSONDecodeError, tomllib.TOMLDecodeError) as exc:
        raise InstanceError(f"{path}: cannot parse config ({exc})") from exc


def parse_suite(obj: dict) -> Suite:
    if "configs" not in obj:
        obj = {"configs": [obj]}
    solvers = obj.get("solvers", ["greedy-search", "greedy-dp"])
    global_opts = obj.get("solver_options", {})
    cfgs, solver_lists, opts = [], [], []
    for d in obj["configs"]:
        try:
            cfgs.append(GenConfig.from_dict(d))
        except (KeyError, TypeError, ValueError) as exc:
            raise InstanceError(f"bad config entry {d!r}: {exc}") from exc
        names = list(d.get("solvers", solvers))
        for n in names:
            if n not in SOLVERS:
                raise InstanceError(f"unknown solver {n!r}")
        solver_lists.append(names)
        merged = {n: {**global_opts.get(n, {}), **d.get("solver_options", {}).get(n, {})} for n in names}
        opts.append(merged)
    return Suite(cfgs, solver_lists, opts, float(obj.get("time_limit", DEFAULT_TIME_LIMIT)))


def _run_task(task) -> dict:
    cfg, i, solver, opts, limit = task
    inst = generate_one(cfg, i)
    out = enforce_deadline(solver_call(inst, solver, **opts), limit)
    rec = RunRecord(
        instance=Path(instance_filename(cfg, i)).stem, solver=solver, family=cfg.family.name,
        M=cfg.M, N=cfg.N, param=cfg.param(), epsilon=cfg.epsilon, seed=cfg.seed, index=i,
        measure=out.measure, runtime_s=out.runtime_s, status=out.status.value,
        config={"time_limit": limit, **opts}, payload=out.detail,
    )
    return rec.to_json()


def run_suite(suite: Suite, *, parallel: bool = False, workers: int | None = None,
              progress: Callable[[RunRecord], None] | None = None) -> list[RunRecord]:
    tasks = [(cfg, i, s, suite.options[c][s], suite.time_limit)
             for c, cfg in enumerate(suite.configs)
             for i in range(cfg.count)
             for s in suite.solvers[c]]
    records = []
    if parallel:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for obj in pool.map(_run_task, tasks):
                rec = RunRecord.from_json(obj)
                records.append(rec)
                if progress:
                    progress(rec)
    else:
        for t in tasks:
            rec = RunRecord.from_json(_run_task(t))
            records.append(rec)
            if progress:
                progress(rec)
    return records


# -- aggregation ----------------------------------------------------------

@dataclass
class AggregateRow:
    family: str
    M: int
    N: int
    param: str
    epsilon: str
    # solver -> (measure mean, measure std, runtime mean, runtime std, runs, timeouts)
    stats: dict[str, tuple]

    def key(self):
        return (self.family, self.M, self.N, self.param, self.epsilon)


def _mean_std(xs):
    if not xs:
        return None, None
    mean = statistics.fmean(xs)
    std = statistics.stdev(xs) if len(xs) > 1 else 0.0
    return mean, std


def aggregate(records: list[RunRecord]) -> list[AggregateRow]:
    """One row per configuration. Measures average over runs that have one
    (completed runs, plus exact-solver incumbents on timeout); runtimes
    average over every run."""
    groups: dict[tuple, dict[str, list[RunRecord]]] = {}
    for r in records:
        key = (r.family, r.M, r.N, r.param, r.epsilon)
        groups.setdefault(key, {}).setdefault(r.solver, []).append(r)
    rows = []
    for key, by_solver in groups.items():
        stats = {}
        for s, rs in by_solver.items():
            mm, ms = _mean_std([r.measure for r in rs if r.measure is not None])
            rm, rsd = _mean_std([r.runtime_s for r in rs])
            stats[s] = (mm, ms, rm, rsd, len(rs), sum(r.status == Status.TIMED_OUT.value for r in rs))
        rows.append(AggregateRow(*key, stats))
    return rows


def _solver_order(rows):
    seen = []
    for row in rows:
        for s in row.stats:
            if s not in seen:
                seen.append(s)
    return sorted(seen, key=lambda s: SOLVERS.index(s) if s in SOLVERS else len(SOLVERS))


def _fmt(x):
    return "" if x is None else f"{x:.6f}"


def table_csv(rows: list[AggregateRow]) -> str:
    solvers = _solver_order(rows)
    head = ["family", "M", "N", "param", "epsilon"]
    for s in solvers:
        head += [f"{s}_measure_mean", f"{s}_measure_std", f"{s}_runtime_mean",
                 f"{s}_runtime_std", f"{s}_runs", f"{s}_timeouts"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(head)
    for row in rows:
        line = list(row.key())
        for s in solvers:
            st = row.stats.get(s)
            if st is None:
                line += [""] * 6
            else:
                line += [_fmt(st[0]), _fmt(st[1]), _fmt(st[2]), _fmt(st[3]), st[4], st[5]]
        w.writerow(line)
    return buf.getvalue()


def runs_csv(records: list[RunRecord]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in records:
        w.writerow(r.csv_row())
    return buf.getvalue()


def render_table(rows: list[AggregateRow]) -> str:
    """Human-readable ``mean (std)`` table; ``*`` marks a timeout in the row."""
    solvers = _solver_order(rows)
    head = ["config"] + [f"{s} measure" for s in solvers] + [f"{s} time" for s in solvers]
    lines = []
    for row in rows:
        cells = [f"{row.family} M={row.M} N={row.N} {row.param}"]
        tcells = []
        for s in solvers:
            st = row.stats.get(s)
            if st is None:
                cells.append("-")
                tcells.append("-")
                continue
            mark = "*" if st[5] else ""
            cells.append("-" if st[0] is None else f"{st[0]:.1f} ({st[1]:.1f}){mark}")
            tcells.append(f"{st[2]:.3f} ({st[3]:.3f})")
        lines.append(cells + tcells)
    widths = [max(len(str(x)) for x in col) for col in zip(head, *lines)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    return "\n".join(fmt.format(*r) for r in [head] + lines)


def read_runs(path) -> list[RunRecord]:
    out = []
    with open(path) as fh:
        for line in fh:
            if line.strip():
                out.append(RunRecord.from_json(json.loads(line)))
    return out


def write_outputs(records: list[RunRecord], outdir, *, parallel: bool = False) -> list[AggregateRow]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    with open(outdir / "runs.jsonl", "w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_json(), sort_keys=True) + "\n")
    (outdir / "runs.csv").write_text(runs_csv(records))
    rows = aggregate(records)
    (outdir / "table.csv").write_text(table_csv(rows))
    meta = {"records": len(records), "rows": len(rows), "parallel": parallel}
    if parallel:
        meta["caveat"] = PARALLEL_CAVEAT
    (outdir / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    return rows

