"""CPLEX LP dialect writer/reader and solution-file parsing."""

from __future__ import annotations

import re
from dataclasses import dataclass

from .model import MilpModel

_LINE_WIDTH = 200


def _terms(coeffs: dict[int, int], names) -> str:
    parts = []
    for t, c in coeffs.items():
        if c == 0:
            continue
        sign = "-" if c < 0 else "+"
        mag = abs(c)
        parts.append(f"{sign} {names[t]}" if mag == 1 else f"{sign} {mag} {names[t]}")
    if not parts:
        return "0 " + names[0]
    text = " ".join(parts)
    if text.startswith("+ "):
        text = text[2:]
    return text


def _wrap(text: str, indent: str = "   ") -> str:
    out, line = [], ""
    for tok in text.split(" "):
        if len(line) + len(tok) + 1 > _LINE_WIDTH and line:
            out.append(line)
            line = indent
        line = f"{line} {tok}" if line.strip() else f"{line}{tok}"
    out.append(line)
    return "\n".join(out)


def write_lp(model: MilpModel) -> str:
    names = model.names
    lines = ["\\ subset sum matching model", "Maximize", _wrap(" obj: " + _terms(model.objective, names)), "Subject To"]
    for c in model.constraints:
        lines.append(_wrap(f" {c.name}: {_terms(c.coeffs, names)} {c.sense} {c.rhs}"))
    lines.append("Binary")
    for k in range(0, len(names), 10):
        lines.append(" " + " ".join(names[k : k + 10]))
    lines.append("End")
    return "\n".join(lines) + "\n"


def write_mst(model: MilpModel, x) -> str:
    """MST-style listing: one ``name value`` pair per line."""
    lines = ["# MIP start"]
    lines += [f"{n} {int(v)}" for n, v in zip(model.names, x)]
    return "\n".join(lines) + "\n"


@dataclass
class LpProblem:
    names: list[str]
    sense: str  # "max" or "min"
    objective: dict[str, float]
    rows: list[tuple[str, dict[str, float], str, float]]
    binaries: set[str]


_TERM = re.compile(r"([+-]?)\s*(\d+(?:\.\d*)?(?:[eE][+-]?\d+)?)?\s*([A-Za-z_][\w.]*)")


def _parse_expr(expr: str) -> dict[str, float]:
    out: dict[str, float] = {}
    expr = expr.strip()
    pos = 0
    while pos < len(expr):
        m = _TERM.match(expr, pos)
        if m is None:
            if expr[pos].isspace():
                pos += 1
                continue
            raise ValueError(f"cannot parse LP expression near {expr[pos:pos + 20]!r}")
        sign = -1.0 if m.group(1) == "-" else 1.0
        coef = float(m.group(2)) if m.group(2) else 1.0
        out[m.group(3)] = out.get(m.group(3), 0.0) + sign * coef
        pos = m.end()
    return out


def read_lp(text: str) -> LpProblem:
    """Parse the subset of the LP format written by :func:`write_lp`."""
    section = None
    sense = "max"
    buf: list[str] = []
    objective: dict[str, float] = {}
    rows = []
    binaries: set[str] = set()
    order: list[str] = []

    def flush():
        nonlocal objective
        if not buf:
            return
        stmt = " ".join(buf)
        buf.clear()
        if ":" in stmt:
            name, body = stmt.split(":", 1)
        else:
            name, body = "", stmt
        if section == "obj":
            objective = _parse_expr(body)
            for n in objective:
                if n not in order:
                    order.append(n)
        elif section == "st":
            m = re.match(r"(.*?)(<=|>=|=)\s*([+-]?\d+(?:\.\d*)?)\s*$", body)
            if m is None:
                raise ValueError(f"bad constraint {stmt!r}")
            rows.append((name.strip(), _parse_expr(m.group(1)), m.group(2), float(m.group(3))))

    for raw in text.splitlines():
        line = raw.split("\\", 1)[0].rstrip()
        key = line.strip().lower()
        if key in ("maximize", "maximise", "max", "minimize", "minimise", "min"):
            flush()
            section, sense = "obj", ("max" if key.startswith("max") else "min")
            continue
        if key in ("subject to", "such that", "st", "s.t."):
            flush()
            section = "st"
            continue
        if key in ("binary", "binaries", "bin"):
            flush()
            section = "bin"
            continue
        if key == "end":
            flush()
            break
        if not key:
            continue
        if section == "bin":
            binaries.update(line.split())
            continue
        # a new statement starts with "name:"
        if re.match(r"^\s*[A-Za-z_][\w.]*\s*:", line):
            flush()
        buf.append(line.strip())
    flush()
    for n in sorted(binaries):
        if n not in order:
            order.append(n)
    return LpProblem(order, sense, objective, rows, binaries)


_XML_VAR = re.compile(r'<variable[^>]*\bname="([^"]+)"[^>]*\bvalue="([^"]+)"')
_NUM = re.compile(r"^[+-]?(\d+(\.\d*)?|\.\d+)([eE][+-]?\d+)?$")


def parse_solution(text: str, names) -> dict[str, float]:
    """Variable values from a solver's solution file.

    Understands CPLEX XML ``<variable name= value=>`` records and any
    line-oriented format where a known variable name is followed by its
    value (Gurobi/SCIP/HiGHS ``name value``, CBC ``idx name value cost``).
    """
    known = set(names)
    values: dict[str, float] = {}
    for name, val in _XML_VAR.findall(text):
        if name in known:
            values[name] = float(val)
    if values:
        return values
    for line in text.splitlines():
        toks = line.replace("=", " ").split()
        for k, tok in enumerate(toks[:-1]):
            if tok in known and _NUM.match(toks[k + 1]):
                values[tok] = float(toks[k + 1])
                break
    return values
