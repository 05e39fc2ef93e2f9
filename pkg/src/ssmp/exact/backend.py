"""Solver backends: the built-in branch-and-bound or an LP-file solver process."""

from __future__ import annotations

import os
import re
import shlex
import subprocess
import sys
import tempfile
from dataclasses import dataclass
from pathlib import Path

ENV_BACKEND = "SSMP_MILP_BACKEND"
# time limit handed to the process when the caller has no deadline
NO_LIMIT_SECONDS = 10**6
# extra wall time the process gets beyond its own limit before it is killed
GRACE_SECONDS = 10.0

PRESETS = {
    "scipy": f"{shlex.quote(sys.executable)} -m ssmp.exact.scipy_runner {{lp}} {{sol}} --time-limit {{time_limit}}",
    "highs": "highs --model_file {lp} --time_limit {time_limit} --solution_file {sol}",
    "cbc": "cbc {lp} sec {time_limit} solve solu {sol}",
    "scip": 'scip -c "read {lp} set limits time {time_limit} optimize write solution {sol} quit"',
    "cplex": 'cplex -c "read {lp}" "read {mst}" "set timelimit {time_limit}" "optimize" "write {sol} sol" "quit"',
    "gurobi": "gurobi_cl TimeLimit={time_limit} ResultFile={sol} InputFile={mst} {lp}",
}


class BackendError(RuntimeError):
    """The solver process failed or produced nothing usable."""


@dataclass(frozen=True)
class InternalBackend:
    name = "internal"


@dataclass(frozen=True)
class ExternalBackend:
    """Runs ``command`` after substituting ``{lp}``, ``{sol}``, ``{mst}`` and
    ``{time_limit}``. Arguments mentioning ``{mst}`` are dropped when there is
    no warm start."""

    command: str
    name: str = "external"

    @classmethod
    def from_spec(cls, spec: str) -> ExternalBackend:
        if spec in PRESETS:
            return cls(PRESETS[spec], spec)
        if "{lp}" not in spec:
            raise ValueError(f"unknown backend {spec!r}: expected one of {sorted(PRESETS)} or a template with {{lp}}")
        return cls(spec)

    def argv(self, lp: Path, sol: Path, mst: Path | None, time_limit: float) -> list[str]:
        out = []
        for tok in shlex.split(self.command):
            if "{mst}" in tok and mst is None:
                continue
            out.append(tok.format(lp=lp, sol=sol, mst=mst, time_limit=f"{time_limit:g}"))
        return out

    def run(self, lp_text: str, mst_text: str | None, time_limit: float | None) -> tuple[str, str]:
        """Returns (solution file text, process output)."""
        limit = NO_LIMIT_SECONDS if time_limit is None else max(time_limit, 1.0)
        with tempfile.TemporaryDirectory(prefix="ssmp-milp-") as tmp:
            lp = Path(tmp) / "model.lp"
            sol = Path(tmp) / "model.sol"
            lp.write_text(lp_text)
            mst = None
            if mst_text is not None:
                mst = Path(tmp) / "start.mst"
                mst.write_text(mst_text)
            argv = self.argv(lp, sol, mst, limit)
            try:
                proc = subprocess.run(argv, capture_output=True, text=True, timeout=limit + GRACE_SECONDS, cwd=tmp)
            except FileNotFoundError as exc:
                raise BackendError(f"solver executable not found: {argv[0]}") from exc
            except subprocess.TimeoutExpired as exc:
                out = (exc.stdout or b"").decode() if isinstance(exc.stdout, bytes) else (exc.stdout or "")
                if sol.exists():
                    return sol.read_text(), out + "\ntime limit"
                raise BackendError("solver process exceeded its time limit without writing a solution") from exc
            output = proc.stdout + proc.stderr
            if not sol.exists():
                raise BackendError(f"solver exited with code {proc.returncode} and wrote no solution:\n{output[-2000:]}")
            return sol.read_text(), output


_NOT_PROVED = re.compile(r"time.?limit|not optimal|stopped|interrupted|feasible solution", re.I)
_PROVED = re.compile(r"optimal", re.I)


def reports_optimal(text: str) -> bool:
    return bool(_PROVED.search(text)) and not _NOT_PROVED.search(text)


def default_backend():
    spec = os.environ.get(ENV_BACKEND, "").strip()
    if not spec or spec == "internal":
        return InternalBackend()
    return ExternalBackend.from_spec(spec)
