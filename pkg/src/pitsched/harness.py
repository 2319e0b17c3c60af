"""Experiment orchestration: seeded multi-run execution, aggregation and reports."""

from __future__ import annotations

import csv
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .algorithms import (
    Budget,
    EAConfig,
    extract_best_for_alpha,
    run_gsemo,
    run_moead,
    run_nsga2,
    run_one_plus_one_ea,
)
from .block_model import UNASSIGNED, BlockModel, load_instance
from .evaluation import DEFAULT_PENALTY_M, CCParams, Evaluator, PeriodProfile, as_schedule
from .operators import MutationConfig
from .uncertainty import ConfigError, block_stats, generate_ensembles, read_ensemble

log = logging.getLogger(__name__)

ALGORITHMS = ("one_plus_one", "gsemo", "nsga2", "moead")
BI_OBJECTIVE = ("gsemo", "nsga2", "moead")


class EmptyResultError(RuntimeError):
    """No successful run produced a feasible solution."""


@dataclass
class ExperimentConfig:
    instance: Path | str
    algorithms: tuple[str, ...] = ("moead",)
    alphas: tuple[float, ...] = (0.6, 0.9, 0.99)
    f_alphas: tuple[float, ...] = (0.25, 1.28, 2.32)
    budget: int = 10_000
    pop_size: int = 20
    mutation_prob: float = 0.1
    num_runs: int = 30
    base_seed: int = 0
    num_ensembles: int = 50
    relative_std: float = 0.20
    ensemble_seed: int = 2024
    ensemble_file: Path | str | None = None
    penalty_M: float = DEFAULT_PENALTY_M
    relaxed_mutation: bool = False
    output_dir: Path | str | None = None
    ddof: int = 1  # cross-run std convention

    def validate(self) -> None:
        if not self.alphas:
            raise ConfigError("alpha list is empty")
        if len(self.alphas) != len(self.f_alphas):
            raise ConfigError("alphas and f_alphas must have the same length")
        if list(self.alphas) != sorted(self.alphas):
            raise ConfigError("alphas must be sorted ascending")
        if any(b < a for a, b in zip(self.f_alphas, self.f_alphas[1:])):
            raise ConfigError("f_alphas must be nondecreasing in alpha")
        for a, f in zip(self.alphas, self.f_alphas):
            CCParams(a, f)
        unknown = set(self.algorithms) - set(ALGORITHMS)
        if unknown or not self.algorithms:
            raise ConfigError(f"unknown algorithm(s) {sorted(unknown)}; choose from {ALGORITHMS}")
        if self.budget < 1 or self.num_runs < 1 or self.pop_size < 1:
            raise ConfigError("budget, num_runs and pop_size must be positive")

    def ea_config(self) -> EAConfig:
        return EAConfig(
            mutation=MutationConfig(self.mutation_prob, 3, self.relaxed_mutation),
            pop_size=self.pop_size,
            penalty_M=self.penalty_M,
        )

    @property
    def cc_params(self) -> list[CCParams]:
        return [CCParams(a, f) for a, f in zip(self.alphas, self.f_alphas)]


@dataclass
class RunRecord:
    run_id: int
    seed: int
    algorithm: str
    instance: str
    status: str = "ok"
    error: str | None = None
    cc_npv: dict[float, float | None] = field(default_factory=dict)
    archive: list[tuple[float, float, float]] = field(default_factory=list)
    profiles: dict[float, PeriodProfile] = field(default_factory=dict)
    schedules: dict[float, np.ndarray] = field(default_factory=dict)
    evaluations: int = 0
    wall_time: float = 0.0

    def to_json(self) -> dict:
        return {
            "run_id": self.run_id,
            "seed": self.seed,
            "algorithm": self.algorithm,
            "instance": self.instance,
            "status": self.status,
            "error": self.error,
            "evaluations": self.evaluations,
            "cc_npv": {repr(a): v for a, v in self.cc_npv.items()},
            "archive": [list(t) for t in self.archive],
            "profiles": {
                repr(a): {
                    "expected": p.expected.tolist(),
                    "std": p.std.tolist(),
                    "usage": p.usage.tolist(),
                }
                for a, p in self.profiles.items()
            },
        }


def split_budget(budget: int, k: int) -> list[int]:
    """Equal integer shares; the remainder goes to the first (lowest) alpha."""
    share, rem = divmod(budget, k)
    return [share + rem] + [share] * (k - 1)


def _single_run(algo, run_id, seed, model, stats, ens, config: ExperimentConfig) -> RunRecord:
    rec = RunRecord(run_id, seed, algo, model.name)
    cfg = config.ea_config()
    rng = np.random.default_rng(seed)
    ev = Evaluator(model, stats, ens, config.penalty_M)
    start = time.perf_counter()
    if algo == "one_plus_one":
        for cc, share in zip(config.cc_params, split_budget(config.budget, len(config.alphas))):
            budget = Budget(share)
            x, fx = run_one_plus_one_ea(model, stats, ens, cc, cfg, budget, rng)
            rec.evaluations += budget.used
            prof = ev.profile(x)
            feasible = ev.penalty(x, prof.usage) == 0
            rec.cc_npv[cc.alpha] = float(fx) if feasible else None
            if feasible:
                rec.profiles[cc.alpha] = prof
                rec.schedules[cc.alpha] = x
            rec.archive.append((prof.expected_npv, math.sqrt(prof.variance), ev.penalty(x, prof.usage)))
    else:
        budget = Budget(config.budget)
        if algo == "gsemo":
            archive = run_gsemo(model, stats, ens, cfg, budget, rng)
        elif algo == "nsga2":
            archive = run_nsga2(model, stats, ens, cfg, budget, rng)
        else:
            archive = run_moead(model, stats, ens, cfg, budget, rng)
        rec.evaluations = budget.used
        rec.archive = [(f.f1, f.f2, f.penalty) for f in archive.fitnesses()]
        for cc in config.cc_params:
            best = extract_best_for_alpha(archive, cc)
            if best is None:
                rec.cc_npv[cc.alpha] = None
                continue
            x, val = best
            rec.cc_npv[cc.alpha] = float(val)
            rec.profiles[cc.alpha] = ev.profile(x)
            rec.schedules[cc.alpha] = x
    rec.wall_time = time.perf_counter() - start
    return rec


def prepare(config: ExperimentConfig, model: BlockModel | None = None):
    """Load the instance and build the shared ensemble statistics."""
    config.validate()
    if model is None:
        try:
            model = load_instance(config.instance)
        except FileNotFoundError as exc:
            raise ConfigError(f"cannot read instance: {exc}") from None
    if config.ensemble_file:
        ens = read_ensemble(model, config.ensemble_file)
    else:
        ens = generate_ensembles(model, config.num_ensembles, config.relative_std, config.ensemble_seed)
    return model, ens, block_stats(ens, model)


def run_experiment(config: ExperimentConfig, model: BlockModel | None = None) -> list[RunRecord]:
    """Run ``num_runs`` seeded runs (seed = base_seed + i) of every configured algorithm."""
    model, ens, stats = prepare(config, model)
    records = []
    for algo in config.algorithms:
        for i in range(config.num_runs):
            seed = config.base_seed + i
            try:
                rec = _single_run(algo, i, seed, model, stats, ens, config)
            except Exception as exc:  # a crashed run must not sink the batch
                log.exception("run %d of %s failed", i, algo)
                rec = RunRecord(i, seed, algo, model.name, status="failed", error=repr(exc))
            log.info("%s run %d: %s (%.2fs)", algo, i, rec.cc_npv, rec.wall_time)
            records.append(rec)
    if config.output_dir is not None:
        emit_reports(records, config.output_dir, model, ddof=config.ddof)
    return records


def aggregate(records: list[RunRecord], ddof: int = 1) -> list[dict]:
    """Mean/std/min/max of cc-NPV per (algorithm, instance, alpha) over successful runs."""
    ok = [r for r in records if r.status == "ok"]
    if not ok:
        raise EmptyResultError("no successful run records")
    keys: dict[tuple[str, str, float], list[float]] = {}
    failed: dict[tuple[str, str], int] = {}
    for r in records:
        if r.status != "ok":
            failed[(r.algorithm, r.instance)] = failed.get((r.algorithm, r.instance), 0) + 1
            continue
        for alpha, val in r.cc_npv.items():
            keys.setdefault((r.algorithm, r.instance, alpha), [])
            if val is not None:
                keys[(r.algorithm, r.instance, alpha)].append(val)
    rows = []
    for (algo, inst, alpha), vals in keys.items():
        arr = np.array(vals, dtype=float)
        n = arr.size
        if n == 0:
            mean = std = lo = hi = math.nan
        else:
            mean = float(arr.mean())
            std = float(arr.std(ddof=ddof)) if n > ddof else 0.0
            lo, hi = float(arr.min()), float(arr.max())
        rows.append({
            "algorithm": algo, "instance": inst, "alpha": alpha, "runs": n,
            "failed": failed.get((algo, inst), 0), "mean": mean, "std": std, "min": lo, "max": hi,
        })
    if all(row["runs"] == 0 for row in rows):
        raise EmptyResultError("no run produced a feasible solution")
    return rows


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(float(v)) if isinstance(v, float) else v for v in row])


def emit_reports(
    records: list[RunRecord],
    outdir: Path | str,
    model: BlockModel,
    ddof: int = 1,
    include_timing: bool = False,
) -> list[Path]:
    """Write summary, yearly profile, tonnage, raw-run and schedule files.

    Output is a pure function of the records, so identical configurations
    yield byte-identical files.  Wall times go to ``timing.csv`` only when
    ``include_timing`` is set.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    written = []
    summary = aggregate(records, ddof)
    cols = ["algorithm", "instance", "alpha", "runs", "failed", "mean", "std", "min", "max"]
    p = outdir / "summary.csv"
    _write_csv(p, cols, ([row[c] for c in cols] for row in summary))
    written.append(p)
    p = outdir / "summary.json"
    p.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    written.append(p)

    ok = [r for r in records if r.status == "ok"]
    prof_rows, ton_rows = [], []
    for r in ok:
        for alpha, prof in r.profiles.items():
            for t in range(model.num_periods):
                prof_rows.append([r.algorithm, r.instance, alpha, r.run_id, t,
                                  float(prof.expected[t]), float(prof.std[t])])
                for k, name in enumerate(model.resource_names):
                    ton_rows.append([r.algorithm, r.instance, alpha, r.run_id, t, name,
                                     float(prof.usage[k, t]), float(model.resource_limits[k, t])])
    p = outdir / "yearly_profile.csv"
    _write_csv(p, ["algorithm", "instance", "alpha", "run", "period", "mu", "sigma"], prof_rows)
    written.append(p)
    p = outdir / "tonnage.csv"
    _write_csv(p, ["algorithm", "instance", "alpha", "run", "period", "resource", "usage", "limit"],
               ton_rows)
    written.append(p)

    p = outdir / "runs.jsonl"
    with open(p, "w") as fh:
        for r in records:
            fh.write(json.dumps(r.to_json(), sort_keys=True) + "\n")
    written.append(p)

    sched_dir = outdir / "schedules"
    sched_dir.mkdir(exist_ok=True)
    for r in ok:
        for alpha, x in r.schedules.items():
            sp = sched_dir / f"{r.algorithm}_run{r.run_id:03d}_alpha{alpha}.txt"
            write_schedule(sp, x)
            written.append(sp)

    if include_timing:
        p = outdir / "timing.csv"
        _write_csv(p, ["algorithm", "run", "seed", "wall_time_s"],
                   ([r.algorithm, r.run_id, r.seed, r.wall_time] for r in records))
        written.append(p)
    return written


def write_schedule(path: Path | str, x) -> None:
    with open(path, "w") as fh:
        for b, t in enumerate(np.asarray(x).tolist()):
            fh.write(f"{b} {t}\n")


def read_schedule(path: Path | str, model: BlockModel) -> np.ndarray:
    """Read ``block_id period`` lines; blocks not listed stay unassigned."""
    x = np.full(model.num_blocks, UNASSIGNED, dtype=np.int64)
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line[0] in "#%":
                continue
            parts = line.split()
            try:
                b, t = int(parts[0]), int(parts[1])
            except (IndexError, ValueError):
                raise ConfigError(f"{path}:{lineno}: expected 'block_id period'") from None
            if not 0 <= b < model.num_blocks:
                raise ConfigError(f"{path}:{lineno}: unknown block {b}")
            x[b] = t
    try:
        return as_schedule(x, model)
    except ValueError as exc:
        raise ConfigError(f"{path}: {exc}") from None
