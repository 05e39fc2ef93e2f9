"""LP-file solver process backed by scipy's HiGHS MILP interface.

    python -m ssmp.exact.scipy_runner MODEL.lp OUT.sol [--time-limit S]

Writes ``# status``/``# bound`` header lines followed by ``name value``
pairs. scipy exposes no MIP start, so a warm-start file is accepted and
ignored.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np
from scipy.optimize import Bounds, LinearConstraint, milp
from scipy.sparse import lil_matrix

from .lpformat import read_lp


def solve_file(lp_path: Path, sol_path: Path, time_limit: float | None) -> int:
    prob = read_lp(lp_path.read_text())
    col = {n: t for t, n in enumerate(prob.names)}
    nv = len(prob.names)
    c = np.zeros(nv)
    for n, coef in prob.objective.items():
        c[col[n]] = coef
    if prob.sense == "max":
        c = -c
    A = lil_matrix((len(prob.rows), nv))
    lo = np.full(len(prob.rows), -np.inf)
    hi = np.full(len(prob.rows), np.inf)
    for r, (_, coeffs, sense, rhs) in enumerate(prob.rows):
        for n, coef in coeffs.items():
            A[r, col[n]] = coef
        if sense in ("<=", "="):
            hi[r] = rhs
        if sense in (">=", "="):
            lo[r] = rhs
    integrality = np.array([1 if n in prob.binaries else 0 for n in prob.names])
    ub = np.array([1.0 if n in prob.binaries else np.inf for n in prob.names])
    options = {"disp": False}
    if time_limit is not None:
        options["time_limit"] = float(time_limit)
    res = milp(c, constraints=[LinearConstraint(A.tocsr(), lo, hi)], integrality=integrality,
               bounds=Bounds(np.zeros(nv), ub), options=options)
    if res.x is None:
        print(f"no solution: {res.message}", file=sys.stderr)
        return 1
    sign = -1.0 if prob.sense == "max" else 1.0
    status = "optimal" if res.status == 0 else "time_limit"
    lines = [f"# status {status}"]
    bound = getattr(res, "mip_dual_bound", None)
    if bound is not None and np.isfinite(bound):
        lines.append(f"# bound {sign * bound:.6f}")
    lines += [f"{n} {round(v):d}" for n, v in zip(prob.names, res.x)]
    sol_path.write_text("\n".join(lines) + "\n")
    return 0


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(prog="python -m ssmp.exact.scipy_runner")
    ap.add_argument("lp", type=Path)
    ap.add_argument("sol", type=Path)
    ap.add_argument("--time-limit", type=float, default=None)
    ap.add_argument("--mst", type=Path, default=None, help="accepted for compatibility; unused")
    args = ap.parse_args(argv)
    return solve_file(args.lp, args.sol, args.time_limit)


if __name__ == "__main__":
    sys.exit(main())
