import csv
import json
import subprocess
import sys
import time

import pytest

from ssmp import harness
from ssmp.cli import main
from ssmp.core import Instance, Match, Solution
from ssmp.deadline import DeadlineExceeded
from ssmp.greedy import Status


@pytest.fixture
def fig1_files(tmp_path, fig1, fig1_s2):
    inst = tmp_path / "fig1.json"
    inst.write_text(fig1.dumps())
    sol = tmp_path / "s2.json"
    sol.write_text(json.dumps(fig1_s2.to_json()))
    return inst, sol


def run_cli(capsys, *argv):
    code = main(list(map(str, argv)))
    out = capsys.readouterr()
    return code, out.out, out.err


class TestVerify:
    def test_feasible(self, capsys, fig1_files):
        code, out, _ = run_cli(capsys, "verify", *fig1_files)
        assert code == 0
        assert json.loads(out) == {"feasible": True, "matches": 2, "measure": 8}

    def test_overlap(self, capsys, tmp_path, fig1_files):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"matches": [{"w": [0], "v": [0, 1, 2]}, {"w": [0], "v": [0, 1, 2]}]}))
        code, out, _ = run_cli(capsys, "verify", fig1_files[0], bad)
        assert code == 1
        assert "matches 0 and 1 overlap on a[0]" in json.loads(out)["violation"]

    def test_bad_input(self, capsys, tmp_path, fig1_files):
        junk = tmp_path / "junk.json"
        junk.write_text("[1, 2")
        assert run_cli(capsys, "verify", junk, fig1_files[1])[0] == 2
        assert run_cli(capsys, "verify", tmp_path / "missing.json", fig1_files[1])[0] == 2
        assert run_cli(capsys, "frobnicate")[0] == 2


class TestSolve:
    @pytest.mark.parametrize("solver", harness.SOLVERS)
    def test_each_solver(self, capsys, fig1_files, solver):
        code, out, _ = run_cli(capsys, "solve", fig1_files[0], "--solver", solver, "--time-limit", 30)
        rec = json.loads(out)
        assert code == 0 and rec["status"] == "Completed"
        assert rec["measure"] == 8

    def test_options_and_output(self, capsys, tmp_path, fig1_files):
        out_sol = tmp_path / "got.json"
        code, out, _ = run_cli(capsys, "solve", fig1_files[0], "--solver", "greedy-search", "--r", 1,
                               "--subset-order", "lex", "--out", out_sol)
        assert code == 0 and json.loads(out)["config"]["r"] == 1
        assert run_cli(capsys, "verify", fig1_files[0], out_sol)[0] == 0
        code, out, _ = run_cli(capsys, "solve", fig1_files[0], "--solver", "exact", "--warm-start", "dp")
        assert json.loads(out)["payload"]["warm_start_measure"] == 8

    def test_timeout_without_result(self, capsys, tmp_path):
        from ssmp.benchgen import GenConfig, RealFamily, generate
        inst = generate(GenConfig(100, 100, RealFamily(), "0.0001", count=1))[0]
        p = tmp_path / "big.json"
        p.write_text(inst.dumps())
        code, out, _ = run_cli(capsys, "solve", p, "--solver", "greedy-dp", "--time-limit", "0.05")
        assert code == 3 and json.loads(out)["measure"] is None
        assert json.loads(out)["status"] == "TimedOut"

    def test_failure_exit(self, capsys, tmp_path):
        p = tmp_path / "i.json"
        p.write_text(Instance(tuple(range(1, 8)), tuple(range(1, 8))).dumps())
        code, _, err = run_cli(capsys, "solve", p, "--solver", "oracle")
        assert code == 2 and "oracle" in err

    def test_module_entry_point(self, fig1_files):
        proc = subprocess.run([sys.executable, "-m", "ssmp", "verify", *map(str, fig1_files)],
                              capture_output=True, text=True)
        assert proc.returncode == 0 and '"measure": 8' in proc.stdout


class TestDeadline:
    def test_exact_incumbent_kept(self):
        from ssmp.benchgen import GenConfig, RealFamily, generate
        inst = generate(GenConfig(20, 20, RealFamily(), "0.0001", seed=0, count=1))[0]
        out = harness.enforce_deadline(harness.solver_call(inst, "exact", warm_start="dp"), 0.5)
        assert out.status is Status.TIMED_OUT
        assert out.measure is not None and out.measure >= out.detail["warm_start_measure"]

    def test_greedy_completed(self):
        inst = Instance((1, 2), (3,))
        out = harness.enforce_deadline(harness.solver_call(inst, "greedy-dp"), 5)
        assert out.status is Status.COMPLETED and out.measure == 4

    def test_greedy_timeout_keeps_payload(self):
        calls = []

        def call(dl):
            calls.append(1)
            raise DeadlineExceeded()

        out = harness.enforce_deadline(call, 1)
        assert out.status is Status.TIMED_OUT and out.measure is None

    def test_overshoot_bounded(self):
        from ssmp.benchgen import GenConfig, RealFamily, generate
        inst = generate(GenConfig(100, 100, RealFamily(), "0.0001", count=1))[0]
        t0 = time.perf_counter()
        out = harness.enforce_deadline(harness.solver_call(inst, "greedy-dp"), 0.3)
        assert time.perf_counter() - t0 < 0.3 + 2.0
        assert out.runtime_s >= 0.3 or out.status is Status.COMPLETED

    def test_limit_positive(self):
        with pytest.raises(ValueError):
            harness.enforce_deadline(lambda dl: None, 0)


SUITE = {
    "time_limit": 30,
    "solvers": ["greedy-search", "greedy-dp"],
    "configs": [{"family": "int", "gamma": 50, "M": 4, "N": 5, "seed": 1, "count": 2}],
}


class TestBench:
    def test_counts_and_files(self, capsys, tmp_path):
        suite = tmp_path / "suite.json"
        suite.write_text(json.dumps(SUITE))
        code, out, _ = run_cli(capsys, "bench", suite, "--out", tmp_path / "res", "--quiet")
        assert code == 0
        runs = (tmp_path / "res" / "runs.jsonl").read_text().splitlines()
        assert len(runs) == 4
        rows = list(csv.reader((tmp_path / "res" / "runs.csv").open()))
        assert rows[0] == harness.CSV_COLUMNS and len(rows) == 5
        table = list(csv.DictReader((tmp_path / "res" / "table.csv").open()))
        assert len(table) == 1 and table[0]["greedy-dp_runs"] == "2"
        assert "greedy-search measure" in out

    def test_aggregation_idempotent(self, capsys, tmp_path):
        suite = tmp_path / "suite.json"
        suite.write_text(json.dumps(SUITE))
        run_cli(capsys, "bench", suite, "--out", tmp_path / "a", "--quiet")
        run_cli(capsys, "bench", "--from-runs", tmp_path / "a" / "runs.jsonl", "--out", tmp_path / "b")
        for name in ("table.csv", "runs.csv", "runs.jsonl"):
            assert (tmp_path / "a" / name).read_text() == (tmp_path / "b" / name).read_text()

    def test_toml_suite(self, capsys, tmp_path):
        suite = tmp_path / "suite.toml"
        suite.write_text(
            'time_limit = 10\nsolvers = ["greedy-dp", "exact"]\n'
            '[solver_options.exact]\nwarm_start = "dp"\n'
            '[[configs]]\nfamily = "real"\nM = 3\nN = 3\nepsilon = "1"\ncount = 1\n'
        )
        code, _, _ = run_cli(capsys, "bench", suite, "--out", tmp_path / "t", "--quiet")
        assert code == 0
        recs = harness.read_runs(tmp_path / "t" / "runs.jsonl")
        assert [r.solver for r in recs] == ["greedy-dp", "exact"]
        assert recs[1].config["warm_start"] == "dp"

    def test_parallel_meta(self, tmp_path):
        suite = harness.parse_suite(SUITE)
        recs = harness.run_suite(suite, parallel=True, workers=2)
        harness.write_outputs(recs, tmp_path, parallel=True)
        meta = json.loads((tmp_path / "meta.json").read_text())
        assert meta["parallel"] and "caveat" in meta
        seq = harness.run_suite(suite)
        assert [r.measure for r in recs] == [r.measure for r in seq]

    def test_timeout_marker_and_std(self):
        recs = [
            harness.RunRecord("i0", "exact", "int", 2, 2, "g5", "0", 0, 0, 4, 90.1, "TimedOut"),
            harness.RunRecord("i1", "exact", "int", 2, 2, "g5", "0", 0, 1, 6, 1.0, "Completed"),
            harness.RunRecord("i0", "greedy-dp", "int", 2, 2, "g5", "0", 0, 0, None, 90.0, "TimedOut"),
            harness.RunRecord("i1", "greedy-dp", "int", 2, 2, "g5", "0", 0, 1, 3, 0.5, "Completed"),
        ]
        (row,) = harness.aggregate(recs)
        mean, std, rmean, _, runs, timeouts = row.stats["exact"]
        assert (mean, runs, timeouts) == (5.0, 2, 1) and std == pytest.approx(2 ** 0.5)
        mean, std, *_ = row.stats["greedy-dp"]
        assert mean == 3.0 and std == 0.0
        assert "*" in harness.render_table([row])

    def test_gen(self, capsys, tmp_path):
        cfg = tmp_path / "gen.json"
        cfg.write_text(json.dumps({"family": "int", "gamma": 9, "M": 2, "N": 3, "count": 3}))
        code, out, _ = run_cli(capsys, "gen", cfg, "--out", tmp_path / "inst")
        assert code == 0 and len(list((tmp_path / "inst").glob("int_M2_N3_g9_s0_*.json"))) == 3

    def test_bad_suite(self, capsys, tmp_path):
        suite = tmp_path / "s.json"
        suite.write_text(json.dumps({"configs": [{"M": 1, "N": 1, "gamma": 2}], "solvers": ["magic"]}))
        assert run_cli(capsys, "bench", suite, "--out", tmp_path / "x")[0] == 2


def test_record_round_trip():
    r = harness.RunRecord("x", "exact", "int", 1, 1, "g1", "0", 0, 0, None, 0.1, "TimedOut",
                          {"a": 1}, {"solution": Solution((Match(1, 1),)).to_json()})
    assert harness.RunRecord.from_json(json.loads(json.dumps(r.to_json()))) == r


@pytest.mark.parametrize("name", ["integer", "real", "warm_start"])
def test_shipped_suites_parse(name):
    from pathlib import Path
    path = Path(__file__).parent.parent / "benchmarks" / "suites" / f"{name}.toml"
    suite = harness.parse_suite(harness.load_config_file(path))
    assert suite.configs and suite.time_limit == 90
