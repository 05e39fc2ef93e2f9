"""Problem model: fixed-point amounts, instances, matches and solutions.

Amounts are stored as integer counts of ``10**-digits`` units, so every
subset sum and every tolerance comparison is exact. Inclusion vectors are
plain ``int`` bitmasks (bit ``i`` selects element ``i`` of its side).
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

MAX_SIDE = 128

_NUMERAL = re.compile(r"^([+-]?)(\d+)(?:\.(\d*))?$|^([+-]?)\.(\d+)$")


class InstanceError(ValueError):
    """Raised for malformed instances, matches or solution files."""


def parse_amount(text: str, digits: int) -> int:
    """Parse a decimal numeral into fixed-point units at scale ``10**digits``.

    >>> parse_amount("5.4", 1)
    54
    >>> parse_amount("-100.0001", 4)
    -1000001
    """
    if digits < 0:
        raise InstanceError("digits must be non-negative")
    s = str(text).strip()
    m = _NUMERAL.match(s)
    if m is None:
        raise InstanceError(f"not a decimal numeral: {text!r}")
    if m.group(2) is not None:
        sign, whole, frac = m.group(1), m.group(2), m.group(3) or ""
    else:
        sign, whole, frac = m.group(4), "0", m.group(5)
    stripped = frac.rstrip("0")
    if len(stripped) > digits:
        raise InstanceError(
            f"{text!r} has more than {digits} fractional digits"
        )
    units = int(whole) * 10**digits + (int(stripped.ljust(digits, "0")) if digits else 0)
    return -units if sign == "-" else units


def format_amount(units: int, digits: int) -> str:
    """Inverse of :func:`parse_amount`, canonical form (no trailing zeros)."""
    sign = "-" if units < 0 else ""
    q, r = divmod(abs(units), 10**digits)
    if digits == 0 or r == 0:
        return f"{sign}{q}"
    frac = str(r).rjust(digits, "0").rstrip("0")
    return f"{sign}{q}.{frac}"


def popcount(mask: int) -> int:
    return bin(mask).count("1")


def indices(mask: int) -> list[int]:
    """Positions of the set bits of ``mask`` in ascending order."""
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return out


def mask_of(idx: Iterable[int]) -> int:
    m = 0
    for i in idx:
        m |= 1 << i
    return m


def subset_sum(values: Sequence[int], mask: int) -> int:
    return sum(values[i] for i in indices(mask))


@dataclass(frozen=True)
class Instance:
    """Two amount lists and a tolerance, all in units of ``10**-digits``."""

    a: tuple[int, ...]
    b: tuple[int, ...]
    epsilon: int = 0
    digits: int = 0

    def __post_init__(self):
        object.__setattr__(self, "a", tuple(int(x) for x in self.a))
        object.__setattr__(self, "b", tuple(int(x) for x in self.b))
        if self.epsilon < 0:
            raise InstanceError("epsilon must be non-negative")
        if self.digits < 0:
            raise InstanceError("digits must be non-negative")
        if 0 in self.a or 0 in self.b:
            raise InstanceError("instance amounts must be non-zero")
        if len(self.a) > MAX_SIDE or len(self.b) > MAX_SIDE:
            raise InstanceError(f"at most {MAX_SIDE} elements per side are supported")

    @property
    def M(self) -> int:
        return len(self.a)

    @property
    def N(self) -> int:
        return len(self.b)

    @classmethod
    def from_strings(cls, a: Iterable[str], b: Iterable[str], epsilon: str, digits: int) -> Instance:
        return cls(
            tuple(parse_amount(x, digits) for x in a),
            tuple(parse_amount(x, digits) for x in b),
            parse_amount(epsilon, digits),
            digits,
        )

    def swapped(self) -> Instance:
        return Instance(self.b, self.a, self.epsilon, self.digits)

    def is_integral(self) -> bool:
        """True when every element is a whole number."""
        s = 10**self.digits
        return all(x % s == 0 for x in self.a) and all(x % s == 0 for x in self.b)

    def to_json(self) -> dict:
        d = self.digits
        return {
            "a": [format_amount(x, d) for x in self.a],
            "b": [format_amount(x, d) for x in self.b],
            "epsilon": format_amount(self.epsilon, d),
            "digits": d,
        }

    @classmethod
    def from_json(cls, obj: dict) -> Instance:
        try:
            digits = int(obj.get("digits", 0))
            a, b, eps = obj["a"], obj["b"], obj.get("epsilon", "0")
        except (KeyError, AttributeError, TypeError, ValueError) as exc:
            raise InstanceError(f"malformed instance JSON: {exc}") from exc
        for x in [*a, *b, eps]:
            if isinstance(x, float):
                raise InstanceError("amounts must be decimal strings, not binary floats")
        return cls.from_strings([str(x) for x in a], [str(x) for x in b], str(eps), digits)

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)


@dataclass(frozen=True)
class Match:
    """A pair of inclusion vectors ``w`` (over ``a``) and ``v`` (over ``b``)."""

    w: int
    v: int

    @classmethod
    def from_indices(cls, w: Iterable[int], v: Iterable[int]) -> Match:
        return cls(mask_of(w), mask_of(v))

    @property
    def size(self) -> int:
        return popcount(self.w) + popcount(self.v)

    def to_json(self) -> dict:
        return {"w": indices(self.w), "v": indices(self.v)}


@dataclass(frozen=True)
class Solution:
    matches: tuple[Match, ...] = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "matches", tuple(self.matches))

    def __len__(self):
        return len(self.matches)

    def __iter__(self):
        return iter(self.matches)

    def to_json(self) -> dict:
        return {"matches": [m.to_json() for m in self.matches]}

    @classmethod
    def from_json(cls, obj: dict) -> Solution:
        try:
            return cls(tuple(Match.from_indices(m["w"], m["v"]) for m in obj["matches"]))
        except (KeyError, TypeError) as exc:
            raise InstanceError(f"malformed solution JSON: {exc}") from exc


def _check_lengths(inst: Instance, m: Match):
    if m.w < 0 or m.v < 0 or m.w >> inst.M or m.v >> inst.N:
        raise InstanceError("inclusion vector longer than its side")


def match_difference(inst: Instance, m: Match) -> int:
    """``w.a - v.b`` in units."""
    _check_lengths(inst, m)
    return subset_sum(inst.a, m.w) - subset_sum(inst.b, m.v)


def is_valid_match(inst: Instance, m: Match) -> bool:
    """Both sides non-empty and ``|w.a - v.b| <= epsilon``."""
    _check_lengths(inst, m)
    if m.w == 0 or m.v == 0:
        return False
    return abs(match_difference(inst, m)) <= inst.epsilon


def find_violation(inst: Instance, s: Solution) -> str | None:
    """Describe the first problem that makes ``s`` infeasible, or ``None``."""
    for k, m in enumerate(s.matches):
        try:
            ok = is_valid_match(inst, m)
        except InstanceError as exc:
            return f"match {k}: {exc}"
        if not ok:
            return f"match {k} is not a valid match"
    used_w = used_v = 0
    owner_w: dict[int, int] = {}
    owner_v: dict[int, int] = {}
    for k, m in enumerate(s.matches):
        if used_w & m.w or used_v & m.v:
            clash_a = indices(used_w & m.w)
            clash_b = indices(used_v & m.v)
            other = owner_w[clash_a[0]] if clash_a else owner_v[clash_b[0]]
            side, el = ("a", clash_a[0]) if clash_a else ("b", clash_b[0])
            return f"matches {other} and {k} overlap on {side}[{el}]"
        for i in indices(m.w):
            owner_w[i] = k
        for j in indices(m.v):
            owner_v[j] = k
        used_w |= m.w
        used_v |= m.v
    return None


def is_feasible_solution(inst: Instance, s: Solution) -> bool:
    return find_violation(inst, s) is None


def objective(inst: Instance, s: Solution, k_weight: int = 1) -> int:
    """Matched element count plus ``k_weight`` times the number of matches."""
    problem = find_violation(inst, s)
    if problem is not None:
        raise InstanceError(f"infeasible solution: {problem}")
    return sum(m.size for m in s.matches) + k_weight * len(s.matches)


def remove_matched(inst: Instance, m: Match) -> tuple[Instance, list[int], list[int]]:
    """Delete the matched elements.

    Returns the reduced instance and two index maps with
    ``a_map[reduced_index] == original_index`` (likewise for ``b``).
    """
    _check_lengths(inst, m)
    a_map = [i for i in range(inst.M) if not (m.w >> i) & 1]
    b_map = [j for j in range(inst.N) if not (m.v >> j) & 1]
    reduced = Instance(
        tuple(inst.a[i] for i in a_map),
        tuple(inst.b[j] for j in b_map),
        inst.epsilon,
        inst.digits,
    )
    return reduced, a_map, b_map


def lift_mask(mask: int, index_map: Sequence[int]) -> int:
    """Translate a mask over a reduced side into original coordinates."""
    return mask_of(index_map[i] for i in indices(mask))


def load_instance(path) -> Instance:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}: invalid JSON ({exc})") from exc
    return Instance.from_json(obj)


def load_solution(path) -> Solution:
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise InstanceError(f"{path}: invalid JSON ({exc})") from exc
    return Solution.from_json(obj)
