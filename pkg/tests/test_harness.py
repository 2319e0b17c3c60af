import csv
import json
import statistics
import subprocess
import sys

import numpy as np
import pytest

from pitsched.algorithms import EAConfig
from pitsched.block_model import write_minelib
from pitsched.cli import main
from pitsched.evaluation import CCParams, Evaluator
from pitsched.harness import (
    EmptyResultError,
    ExperimentConfig,
    RunRecord,
    aggregate,
    emit_reports,
    prepare,
    read_schedule,
    run_experiment,
    split_budget,
    write_schedule,
)
from pitsched.operators import greedy_randomized_init
from pitsched.synthetic import make_pit_model
from pitsched.uncertainty import ConfigError


@pytest.fixture(scope="module")
def small():
    return make_pit_model(8, 6, 3, num_periods=3, capacity_fraction=0.3, seed=2, name="small")


@pytest.fixture(scope="module")
def descriptor(tmp_path_factory, small):
    return write_minelib(small, tmp_path_factory.mktemp("inst"), "small")


def _rec(values, algo="moead", alpha=0.6):
    return [RunRecord(i, i, algo, "x", cc_npv={alpha: v}) for i, v in enumerate(values)]


class TestAggregate:
    def test_single_record(self):
        (row,) = aggregate(_rec([7.5]))
        assert (row["mean"], row["std"], row["min"], row["max"]) == (7.5, 0.0, 7.5, 7.5)

    def test_two_points(self):
        (row,) = aggregate(_rec([10.0, 14.0]))
        assert row["mean"] == 12.0
        assert row["std"] == pytest.approx(2.8284271247461903)
        (row,) = aggregate(_rec([10.0, 14.0]), ddof=0)
        assert row["std"] == 2.0

    def test_matches_statistics_module(self):
        vals = np.random.default_rng(0).normal(23.7e6, 7e4, size=30).tolist()
        (row,) = aggregate(_rec(vals))
        assert row["mean"] == pytest.approx(statistics.fmean(vals), rel=1e-12)
        assert row["std"] == pytest.approx(statistics.stdev(vals), rel=1e-9)
        assert (row["min"], row["max"]) == (min(vals), max(vals))

    def test_failed_runs_excluded_and_counted(self):
        recs = _rec([1.0, 3.0]) + [RunRecord(2, 2, "moead", "x", status="failed", error="boom")]
        (row,) = aggregate(recs)
        assert row["runs"] == 2 and row["failed"] == 1 and row["mean"] == 2.0

    def test_nothing_usable(self):
        with pytest.raises(EmptyResultError):
            aggregate([])
        with pytest.raises(EmptyResultError):
            aggregate(_rec([None, None]))


class TestConfig:
    def test_split_budget(self):
        assert split_budget(10_000, 3) == [3334, 3333, 3333]
        assert sum(split_budget(7, 3)) == 7

    @pytest.mark.parametrize("kwargs", [
        {"alphas": (), "f_alphas": ()},
        {"alphas": (0.9, 0.6), "f_alphas": (0.25, 1.28)},
        {"alphas": (0.6,), "f_alphas": (0.25, 1.28)},
        {"algorithms": ("simplex",)},
        {"budget": 0},
    ])
    def test_rejected_before_any_run(self, small, kwargs):
        with pytest.raises(ConfigError):
            run_experiment(ExperimentConfig("unused", **kwargs), small)

    def test_defaults(self):
        cfg = ExperimentConfig("x")
        assert (cfg.budget, cfg.pop_size, cfg.mutation_prob, cfg.num_runs) == (10_000, 20, 0.1, 30)
        assert (cfg.num_ensembles, cfg.relative_std) == (50, 0.20)
        ea = cfg.ea_config()
        assert (ea.neighborhood_size, ea.neighborhood_prob, ea.max_replacements) == (8, 0.9, 12)
        assert ea.mutation.max_attempts == 3

    def test_missing_instance(self, tmp_path):
        with pytest.raises(ConfigError):
            prepare(ExperimentConfig(tmp_path / "nope.ini"))


class TestRuns:
    def test_budget_one_records_initial_fitness(self, small):
        cfg = ExperimentConfig("x", algorithms=("one_plus_one",), alphas=(0.9,), f_alphas=(1.28,),
                               budget=1, num_runs=1, num_ensembles=10)
        (rec,) = run_experiment(cfg, small)
        model, ens, stats = prepare(cfg, small)
        x0 = greedy_randomized_init(model, None, np.random.default_rng(0), values=stats.expected_value_all)
        assert rec.evaluations == 1
        assert rec.cc_npv[0.9] == Evaluator(model, stats, ens).single_objective(x0, CCParams(0.9, 1.28))

    def test_single_objective_budget_split(self, small):
        cfg = ExperimentConfig("x", algorithms=("one_plus_one",), budget=100, num_runs=2, num_ensembles=10)
        for rec in run_experiment(cfg, small):
            assert rec.evaluations == 100

    def test_bi_objective_records_monotone(self, small):
        cfg = ExperimentConfig("x", algorithms=("gsemo", "nsga2", "moead"), budget=200, pop_size=10,
                               num_runs=3, num_ensembles=10)
        recs = run_experiment(cfg, small)
        assert len(recs) == 9 and all(r.status == "ok" for r in recs)
        for r in recs:
            vals = [r.cc_npv[a] for a in cfg.alphas]
            assert vals[0] >= vals[1] >= vals[2]
            assert r.evaluations == 200

    def test_crashed_run_is_recorded(self, small, monkeypatch):
        import pitsched.harness as h

        calls = {"n": 0}
        real = h.run_gsemo

        def flaky(*args, **kwargs):
            calls["n"] += 1
            if calls["n"] == 2:
                raise RuntimeError("simulated crash")
            return real(*args, **kwargs)

        monkeypatch.setattr(h, "run_gsemo", flaky)
        cfg = ExperimentConfig("x", algorithms=("gsemo",), budget=50, num_runs=3, num_ensembles=10)
        recs = run_experiment(cfg, small)
        assert [r.status for r in recs] == ["ok", "failed", "ok"]
        assert "simulated crash" in recs[1].error


@pytest.fixture(scope="module")
def report(small, tmp_path_factory):
    out = tmp_path_factory.mktemp("out")
    cfg = ExperimentConfig("x", algorithms=("moead", "one_plus_one"), budget=120, pop_size=10,
                           num_runs=2, num_ensembles=10, output_dir=out)
    return run_experiment(cfg, small), out, cfg


class TestReports:
    def test_files_written(self, report):
        _, out, _ = report
        for name in ("summary.csv", "summary.json", "yearly_profile.csv", "tonnage.csv", "runs.jsonl"):
            assert (out / name).stat().st_size > 0
        assert not (out / "timing.csv").exists()

    def test_tonnage_rows_and_limits(self, report, small):
        recs, out, cfg = report
        with open(out / "tonnage.csv") as fh:
            rows = list(csv.DictReader(fh))
        for algo in cfg.algorithms:
            for alpha in cfg.alphas:
                mine = [r for r in rows if r["algorithm"] == algo and float(r["alpha"]) == alpha]
                feasible_runs = sum(1 for r in recs if r.algorithm == algo and r.cc_npv[alpha] is not None)
                assert len(mine) == small.num_periods * small.num_resources * feasible_runs
        assert rows and all(float(r["usage"]) <= float(r["limit"]) for r in rows)

    def test_summary_matches_aggregate(self, report):
        recs, out, _ = report
        assert json.loads((out / "summary.json").read_text()) == json.loads(json.dumps(aggregate(recs)))

    def test_schedules_reload(self, report, small):
        recs, out, _ = report
        r = recs[0]
        alpha = next(iter(r.schedules))
        x = read_schedule(out / "schedules" / f"{r.algorithm}_run000_alpha{alpha}.txt", small)
        assert np.array_equal(x, r.schedules[alpha])

    def test_timing_is_opt_in(self, report, tmp_path, small):
        recs, _, _ = report
        emit_reports(recs, tmp_path, small, include_timing=True)
        assert (tmp_path / "timing.csv").exists()


def test_rerun_is_byte_identical(small, tmp_path):
    outs = []
    for k in range(2):
        out = tmp_path / f"o{k}"
        cfg = ExperimentConfig("x", algorithms=("one_plus_one", "gsemo"), budget=60, pop_size=10,
                               num_runs=2, num_ensembles=10, output_dir=out)
        run_experiment(cfg, small)
        outs.append({p.relative_to(out): p.read_bytes() for p in sorted(out.rglob("*")) if p.is_file()})
    assert outs[0] == outs[1]


def test_schedule_file_roundtrip(tmp_path, small):
    x = np.full(small.num_blocks, -1)
    x[:5] = [0, 0, 1, 2, 1]
    write_schedule(tmp_path / "s.txt", x)
    assert np.array_equal(read_schedule(tmp_path / "s.txt", small), x)


class TestCli:
    def test_validate(self, descriptor, capsys):
        assert main(["validate", "--instance", str(descriptor)]) == 0
        info = json.loads(capsys.readouterr().out)
        assert (info["blocks"], info["periods"], info["resources"]) == (144, 3, 2)

    def test_run_and_evaluate(self, descriptor, tmp_path, capsys):
        out = tmp_path / "res"
        code = main(["run", "--instance", str(descriptor), "--algo", "moead", "--budget", "60",
                     "--pop", "10", "--runs", "1", "--ensembles", "10", "--out", str(out)])
        assert code == 0
        sched = next((out / "schedules").glob("*.txt"))
        capsys.readouterr()
        assert main(["evaluate", "--instance", str(descriptor), "--schedule", str(sched),
                     "--ensembles", "10"]) == 0
        res = json.loads(capsys.readouterr().out)
        assert res["feasible"] and res["precedence_feasible"]

    def test_config_error_exit(self, descriptor, tmp_path):
        assert main(["run", "--instance", str(descriptor), "--alphas", "", "--f-alphas", "",
                     "--out", str(tmp_path)]) == 1
        assert main(["validate", "--instance", str(tmp_path / "missing.ini")]) == 1

    def test_io_error_exit(self, descriptor, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        code = main(["run", "--instance", str(descriptor), "--budget", "25", "--pop", "5", "--runs", "1",
                     "--ensembles", "5", "--out", str(blocker / "sub")])
        assert code == 2

    def test_infeasible_schedule_exit(self, descriptor, tmp_path, small):
        path = tmp_path / "all0.txt"
        write_schedule(path, np.zeros(small.num_blocks, dtype=int))
        assert main(["evaluate", "--instance", str(descriptor), "--schedule", str(path),
                     "--ensembles", "5"]) == 3

    def test_module_entry_point(self, descriptor):
        proc = subprocess.run([sys.executable, "-m", "pitsched", "validate", "--instance", str(descriptor)],
                              capture_output=True, text=True, check=False)
        assert proc.returncode == 0 and json.loads(proc.stdout)["name"] == "small"


def test_ea_config_used_by_harness():
    cfg = ExperimentConfig("x", relaxed_mutation=True, pop_size=7, penalty_M=5.0)
    assert cfg.ea_config() == EAConfig(
        mutation=cfg.ea_config().mutation, pop_size=7, penalty_M=5.0)
    assert cfg.ea_config().mutation.allow_unmined_successors
