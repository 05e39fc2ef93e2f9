import math

import pytest

from ssmp.benchgen import GenConfig, IntegerFamily, RealFamily, generate, generate_one, instance_filename, write_instances


def test_deterministic_files(tmp_path):
    cfg = GenConfig(5, 7, IntegerFamily(100), seed=3, count=4)
    p1 = write_instances(cfg, tmp_path / "x")
    p2 = write_instances(cfg, tmp_path / "y")
    assert [p.name for p in p1] == [p.name for p in p2]
    assert all(a.read_bytes() == b.read_bytes() for a, b in zip(p1, p2))


def test_filename():
    cfg = GenConfig(10, 20, IntegerFamily(10000), seed=7)
    assert instance_filename(cfg, 3) == "int_M10_N20_g10000_s7_3.json"
    real = GenConfig(100, 100, RealFamily(), "0.0001", seed=0)
    assert instance_filename(real, 0) == "real_M100_N100_e0.0001_s0_0.json"


def test_integer_law():
    # 10^6 draws spread over many instances (sides are capped at 128)
    cfg = GenConfig(125, 125, IntegerFamily(10**4), count=4000)
    b = [x for inst in generate(cfg) for x in inst.a + inst.b]
    assert min(b) >= -10**4 and max(b) <= 10**4 and 0 not in b
    # |X| for X uniform on [-g, g] \ {0}: mean (g + 1) / 2, variance (g^2 - 1) / 12
    g = 10**4
    mean = sum(abs(x) for x in b) / len(b)
    sigma = math.sqrt((g * g - 1) / 12 / len(b))
    assert abs(mean - (g + 1) / 2) < 3 * sigma


def test_real_digits():
    inst = generate(GenConfig(50, 50, RealFamily("-100", "100", 4), "0.0001", count=1))[0]
    assert inst.digits == 4 and inst.epsilon == 1
    for s in inst.to_json()["a"] + inst.to_json()["b"]:
        frac = s.split(".")[1] if "." in s else ""
        assert len(frac) <= 4
    assert all(-10**6 <= x <= 10**6 for x in inst.a + inst.b)


def test_seed_isolation():
    big = GenConfig(4, 4, IntegerFamily(50), seed=9, count=6)
    assert generate_one(big, 5) == generate(big)[5]
    assert generate_one(GenConfig(4, 4, IntegerFamily(50), seed=9, count=1), 0) == generate(big)[0]
    assert generate_one(big, 0) != generate_one(GenConfig(4, 4, IntegerFamily(50), seed=10), 0)


def test_zero_resampled():
    # gamma = 1 means half the raw draws would be zero without rejection
    inst = generate(GenConfig(100, 100, IntegerFamily(1), count=1))[0]
    assert set(inst.a) | set(inst.b) <= {-1, 1}


@pytest.mark.parametrize("bad", [
    dict(M=1, N=1, family=IntegerFamily(0)),
    dict(M=1, N=1, family=RealFamily("5", "5")),
    dict(M=1, N=1, family=IntegerFamily(3), count=0),
])
def test_invalid(bad):
    with pytest.raises(ValueError):
        GenConfig(**bad)


def test_from_dict():
    cfg = GenConfig.from_dict({"family": "real", "M": 3, "N": 4, "epsilon": "1", "seed": 2, "count": 1})
    assert cfg.family == RealFamily() and cfg.param() == "e1"
    assert GenConfig.from_dict({"M": 1, "N": 2, "gamma": 5, "epsilon": "2"}).param() == "g5e2"
