"""Command line entry point: ``pitsched {run,validate,evaluate,synth}``.

Exit codes: 0 success, 1 configuration/model error, 2 I/O error,
3 no feasible result.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path

from .block_model import ModelError, ParseError, load_instance, write_minelib
from .evaluation import CCParams, Evaluator, deterministic_npv, precedence_feasible
from .harness import (
    ALGORITHMS,
    EmptyResultError,
    ExperimentConfig,
    aggregate,
    emit_reports,
    prepare,
    read_schedule,
    run_experiment,
)
from .synthetic import make_pit_model
from .uncertainty import ConfigError

EXIT_OK, EXIT_CONFIG, EXIT_IO, EXIT_INFEASIBLE = 0, 1, 2, 3


def _floats(text: str) -> tuple[float, ...]:
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _algos(text: str) -> tuple[str, ...]:
    names = tuple(v.strip() for v in text.split(",") if v.strip())
    if text.strip() == "all":
        return ALGORITHMS
    for n in names:
        if n not in ALGORITHMS:
            raise argparse.ArgumentTypeError(f"unknown algorithm {n!r}; choose from {ALGORITHMS}")
    return names


def _add_ensemble_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--ensembles", type=int, default=50, help="number of grade realizations")
    p.add_argument("--rel-std", type=float, default=0.20, help="grade std as a fraction of grade")
    p.add_argument("--ensemble-seed", type=int, default=2024)
    p.add_argument("--ensemble-file", type=Path, help="external 'block_id realization grade' file")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="pitsched", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run seeded experiments and write reports")
    run.add_argument("--instance", required=True, type=Path, help="instance descriptor (.ini)")
    run.add_argument("--algo", type=_algos, default=("moead",),
                     help="algorithm name, comma list, or 'all'")
    run.add_argument("--alphas", type=_floats, default=(0.6, 0.9, 0.99))
    run.add_argument("--f-alphas", type=_floats, default=(0.25, 1.28, 2.32))
    run.add_argument("--budget", type=int, default=10_000)
    run.add_argument("--pop", type=int, default=20)
    run.add_argument("--pm", type=float, default=0.1)
    run.add_argument("--runs", type=int, default=30)
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--penalty-m", type=float, default=1e9)
    run.add_argument("--relaxed-mutation", action="store_true",
                     help="let blocks move above unmined successors")
    run.add_argument("--timing", action="store_true", help="also write timing.csv")
    run.add_argument("--out", required=True, type=Path)
    _add_ensemble_args(run)

    val = sub.add_parser("validate", help="parse an instance and check its invariants")
    val.add_argument("--instance", required=True, type=Path)

    ev = sub.add_parser("evaluate", help="score a saved schedule")
    ev.add_argument("--instance", required=True, type=Path)
    ev.add_argument("--schedule", required=True, type=Path)
    ev.add_argument("--alphas", type=_floats, default=(0.6, 0.9, 0.99))
    ev.add_argument("--f-alphas", type=_floats, default=(0.25, 1.28, 2.32))
    _add_ensemble_args(ev)

    syn = sub.add_parser("synth", help="write a synthetic instance in MineLib format")
    syn.add_argument("--out", required=True, type=Path)
    syn.add_argument("--name", default="synthetic")
    syn.add_argument("--shape", default="22x12x4", help="NXxNYxNZ grid")
    syn.add_argument("--periods", type=int, default=6)
    syn.add_argument("--discount", type=float, default=0.08)
    syn.add_argument("--capacity", type=float, default=0.12,
                     help="per-period limit as a fraction of total tonnage")
    syn.add_argument("--seed", type=int, default=0)
    return ap


def _cmd_run(args) -> int:
    cfg = ExperimentConfig(
        instance=args.instance, algorithms=args.algo, alphas=args.alphas, f_alphas=args.f_alphas,
        budget=args.budget, pop_size=args.pop, mutation_prob=args.pm, num_runs=args.runs,
        base_seed=args.seed, num_ensembles=args.ensembles, relative_std=args.rel_std,
        ensemble_seed=args.ensemble_seed, ensemble_file=args.ensemble_file,
        penalty_M=args.penalty_m, relaxed_mutation=args.relaxed_mutation,
    )
    model, _, _ = prepare(cfg)
    start = time.perf_counter()
    records = run_experiment(cfg, model)
    elapsed = time.perf_counter() - start
    emit_reports(records, args.out, model, include_timing=args.timing)
    for row in aggregate(records):
        print(f"{row['algorithm']:<13} alpha={row['alpha']:<5} runs={row['runs']:<3} "
              f"mean={row['mean']:.6g} std={row['std']:.4g}")
    failed = sum(r.status != "ok" for r in records)
    print(f"{len(records)} runs ({failed} failed) in {elapsed:.1f}s; reports in {args.out}")
    return EXIT_OK


def _cmd_validate(args) -> int:
    start = time.perf_counter()
    try:
        model = load_instance(args.instance)
    except FileNotFoundError as exc:
        raise ConfigError(f"cannot read instance: {exc}") from None
    elapsed = time.perf_counter() - start
    info = {
        "name": model.name,
        "periods": model.num_periods,
        "blocks": model.num_blocks,
        "precedence_arcs": model.num_arcs,
        "resources": model.num_resources,
        "discount_rate": model.discount_rate,
        "ore_blocks": int(model.ore_mask.sum()),
        "parse_seconds": round(elapsed, 3),
    }
    print(json.dumps(info, indent=2))
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    cfg = ExperimentConfig(
        instance=args.instance, alphas=args.alphas, f_alphas=args.f_alphas,
        num_ensembles=args.ensembles, relative_std=args.rel_std,
        ensemble_seed=args.ensemble_seed, ensemble_file=args.ensemble_file,
    )
    model, ens, stats = prepare(cfg)
    try:
        x = read_schedule(args.schedule, model)
    except FileNotFoundError as exc:
        raise ConfigError(f"cannot read schedule: {exc}") from None
    ev = Evaluator(model, stats, ens)
    prof = ev.profile(x)
    pen = ev.penalty(x, prof.usage)
    out = {
        "expected_npv": prof.expected_npv,
        "npv_std": math.sqrt(prof.variance),
        "deterministic_npv": deterministic_npv(x, model),
        "penalty": pen,
        "feasible": pen == 0,
        "precedence_feasible": precedence_feasible(x, model),
        "cc_npv": {repr(a): ev.single_objective(x, CCParams(a, f))
                   for a, f in zip(cfg.alphas, cfg.f_alphas)},
        "mu_t": prof.expected.tolist(),
        "sigma_t": prof.std.tolist(),
    }
    print(json.dumps(out, indent=2))
    return EXIT_OK if pen == 0 and out["precedence_feasible"] else EXIT_INFEASIBLE


def _cmd_synth(args) -> int:
    try:
        nx, ny, nz = (int(v) for v in args.shape.lower().split("x"))
    except ValueError:
        raise ConfigError(f"bad --shape {args.shape!r}; expected NXxNYxNZ") from None
    model = make_pit_model(nx, ny, nz, args.periods, args.discount, args.capacity, args.seed,
                           name=args.name)
    desc = write_minelib(model, args.out, args.name)
    print(desc)
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    handler = {"run": _cmd_run, "validate": _cmd_validate, "evaluate": _cmd_evaluate,
               "synth": _cmd_synth}[args.command]
    try:
        return handler(args)
    except EmptyResultError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except (ConfigError, ModelError, ParseError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
