"""Seeded benchmark instances: uniform integers in ``[-gamma, gamma]`` or
uniform fixed-point reals in ``[low, high]``, zero excluded."""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import Instance, parse_amount


@dataclass(frozen=True)
class IntegerFamily:
    gamma: int

    name = "int"


@dataclass(frozen=True)
class RealFamily:
    low: str = "-100"
    high: str = "100"
    digits: int = 4

    name = "real"


@dataclass(frozen=True)
class GenConfig:
    M: int
    N: int
    family: IntegerFamily | RealFamily
    epsilon: str = "0"
    seed: int = 0
    count: int = 10

    def __post_init__(self):
        if self.M < 0 or self.N < 0:
            raise ValueError("M and N must be non-negative")
        if self.count < 1:
            raise ValueError("count must be at least 1")
        if isinstance(self.family, IntegerFamily) and self.family.gamma < 1:
            raise ValueError("gamma must be at least 1")
        if isinstance(self.family, RealFamily):
            d = self.family.digits
            if parse_amount(self.family.low, d) >= parse_amount(self.family.high, d):
                raise ValueError("low must be below high")

    @property
    def digits(self) -> int:
        return self.family.digits if isinstance(self.family, RealFamily) else 0

    def param(self) -> str:
        """Family parameter tag: ``g<gamma>`` (plus ``e<eps>`` if non-zero) or ``e<eps>``."""
        if isinstance(self.family, IntegerFamily):
            tag = f"g{self.family.gamma}"
            return tag if parse_amount(self.epsilon, 0) == 0 else f"{tag}e{self.epsilon}"
        return f"e{self.epsilon}"

    @classmethod
    def from_dict(cls, d: dict) -> GenConfig:
        fam = d.get("family", "int")
        if fam in ("int", "integer"):
            family = IntegerFamily(int(d["gamma"]))
        elif fam == "real":
            family = RealFamily(str(d.get("low", "-100")), str(d.get("high", "100")), int(d.get("digits", 4)))
        else:
            raise ValueError(f"unknown family {fam!r}")
        return cls(int(d["M"]), int(d["N"]), family, str(d.get("epsilon", "0")),
                   int(d.get("seed", 0)), int(d.get("count", 10)))


def _draw_nonzero(rng: np.random.Generator, lo: int, hi: int, n: int) -> list[int]:
    out = rng.integers(lo, hi, size=n, endpoint=True)
    while True:
        zeros = np.flatnonzero(out == 0)
        if not len(zeros):
            return [int(x) for x in out]
        out[zeros] = rng.integers(lo, hi, size=len(zeros), endpoint=True)


def generate_one(cfg: GenConfig, i: int) -> Instance:
    # stream depends only on (seed, i); M and N select how much of it is used
    rng = np.random.default_rng([cfg.seed, i])
    if isinstance(cfg.family, IntegerFamily):
        lo, hi = -cfg.family.gamma, cfg.family.gamma
    else:
        lo = parse_amount(cfg.family.low, cfg.digits)
        hi = parse_amount(cfg.family.high, cfg.digits)
    a = _draw_nonzero(rng, lo, hi, cfg.M)
    b = _draw_nonzero(rng, lo, hi, cfg.N)
    return Instance(tuple(a), tuple(b), parse_amount(cfg.epsilon, cfg.digits), cfg.digits)


def generate(cfg: GenConfig) -> list[Instance]:
    return [generate_one(cfg, i) for i in range(cfg.count)]


def instance_filename(cfg: GenConfig, i: int) -> str:
    return f"{cfg.family.name}_M{cfg.M}_N{cfg.N}_{cfg.param()}_s{cfg.seed}_{i}.json"


def write_instances(cfg: GenConfig, outdir) -> list[Path]:
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    paths = []
    for i, inst in enumerate(generate(cfg)):
        p = outdir / instance_filename(cfg, i)
        p.write_text(json.dumps(inst.to_json(), sort_keys=True) + "\n")
        paths.append(p)
    return paths
