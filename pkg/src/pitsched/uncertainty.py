"""Grade-uncertainty ensembles and the profit statistics derived from them."""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable

import numpy as np

from .block_model import BlockModel, ModelError


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class EnsembleSet:
    """Sampled ore grades and the resulting block profits.

    Rows follow ``ore_ids`` (ascending block id); columns are realizations.
    """

    ore_ids: np.ndarray
    grades: np.ndarray
    profits: np.ndarray
    seed: int | None = None

    @property
    def num_realizations(self) -> int:
        return self.grades.shape[1]

    def row_of(self, block_ids: Iterable[int]) -> np.ndarray:
        ids = np.asarray(list(block_ids), dtype=np.int64)
        rows = np.searchsorted(self.ore_ids, ids)
        ok = (rows < len(self.ore_ids)) & (self.ore_ids[np.minimum(rows, len(self.ore_ids) - 1)] == ids)
        if ids.size and (len(self.ore_ids) == 0 or not ok.all()):
            bad = ids[~ok] if len(self.ore_ids) else ids
            raise ModelError(f"block {int(bad[0])} is not an ore block of this ensemble")
        return rows


@dataclass(frozen=True)
class BlockProfitStats:
    mean: np.ndarray  # per ore block, aligned with EnsembleSet.ore_ids
    variance: np.ndarray
    expected_value_all: np.ndarray  # per block, every block in the model
    centered: np.ndarray  # profits minus row mean, (ore blocks x realizations)


def _freeze(*arrays: np.ndarray) -> None:
    for a in arrays:
        a.setflags(write=False)


def profits_for_grades(model: BlockModel, ore_ids: np.ndarray, grades: np.ndarray) -> np.ndarray:
    """Vectorised block value with per-realization grades (ore path)."""
    blocks = [model.blocks[i] for i in ore_ids]
    col = lambda attr: np.array([getattr(b, attr) for b in blocks], dtype=float)[:, None]
    m, r, n = col("mass"), col("recovery"), col("mining_cost")
    q, price, s = col("processing_cost"), col("price"), col("selling_cost")
    metal = m * grades * r
    v = metal * (price - s) - m * q
    return v - m * n


def ensemble_from_grades(model: BlockModel, grades: np.ndarray, seed: int | None = None) -> EnsembleSet:
    """Wrap an externally simulated grade matrix (ore blocks x realizations)."""
    ore_ids = np.flatnonzero(model.ore_mask)
    grades = np.array(grades, dtype=float, copy=True)
    if grades.ndim != 2 or grades.shape[0] != ore_ids.size:
        raise ConfigError(f"grade matrix must have {ore_ids.size} rows (one per ore block)")
    if grades.shape[1] < 2:
        raise ConfigError("at least two realizations are needed for a variance")
    if np.any(grades < 0):
        raise ConfigError("grades must be nonnegative")
    profits = profits_for_grades(model, ore_ids, grades)
    _freeze(ore_ids, grades, profits)
    return EnsembleSet(ore_ids, grades, profits, seed)


def generate_ensembles(
    model: BlockModel, num_realizations: int = 50, relative_std: float = 0.20, seed: int = 0
) -> EnsembleSet:
    """Independent Normal grade perturbation of every ore block, clamped at zero."""
    if num_realizations < 2:
        raise ConfigError("num_realizations must be at least 2")
    if relative_std < 0:
        raise ConfigError("relative_std must be nonnegative")
    ore_ids = np.flatnonzero(model.ore_mask)
    g = np.array([model.blocks[i].grade for i in ore_ids], dtype=float)[:, None]
    rng = np.random.default_rng(seed)
    grades = rng.normal(g, relative_std * g, size=(ore_ids.size, num_realizations))
    np.maximum(grades, 0.0, out=grades)
    return ensemble_from_grades(model, grades, seed)


def block_stats(ensemble: EnsembleSet, model: BlockModel) -> BlockProfitStats:
    """Population mean/variance of each ore block's profit over realizations."""
    p = ensemble.profits
    if p.shape[0]:
        # shifted mean: exact when all realizations agree
        ref = p[:, :1]
        mean = ref[:, 0] + (p - ref).mean(axis=1)
    else:
        mean = np.zeros(0)
    centered = p - mean[:, None]
    variance = (centered**2).mean(axis=1)
    expected = np.array(model.values, dtype=float)
    expected[ensemble.ore_ids] = mean
    _freeze(mean, variance, expected, centered)
    return BlockProfitStats(mean, variance, expected, centered)


def period_variance(
    ensemble: EnsembleSet, stats: BlockProfitStats, ore_blocks_in_period: Iterable[int]
) -> float:
    """Variance of a period's ore profit with the aggregate covariance clamped at zero.

    The covariance sum is recovered as ``Var(sum of profits) - sum of block
    variances``, which costs O(|X| |E|) rather than O(|X|^2 |E|).
    """
    rows = ensemble.row_of(ore_blocks_in_period)
    if rows.size == 0:
        return 0.0
    own = float(stats.variance[rows].sum())
    total = stats.centered[rows].sum(axis=0)
    cov = float(total.var()) - own
    return own + max(0.0, cov)


def aggregate_covariance(ensemble: EnsembleSet, stats: BlockProfitStats, blocks: Iterable[int]) -> float:
    """Pre-clamp sum of pairwise covariances (fast identity)."""
    rows = ensemble.row_of(blocks)
    if rows.size == 0:
        return 0.0
    return float(stats.centered[rows].sum(axis=0).var()) - float(stats.variance[rows].sum())


def write_ensemble(ensemble: EnsembleSet, path: str | Path) -> None:
    """Columnar text: ``block_id realization grade`` per line."""
    with open(path, "w") as fh:
        fh.write("# block_id realization grade\n")
        for row, b in enumerate(ensemble.ore_ids):
            for e in range(ensemble.num_realizations):
                fh.write(f"{int(b)} {e} {float(ensemble.grades[row, e])!r}\n")


def read_ensemble(model: BlockModel, path: str | Path) -> EnsembleSet:
    ore_ids = np.flatnonzero(model.ore_mask)
    pos = {int(b): i for i, b in enumerate(ore_ids)}
    entries = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line[0] in "#%":
                continue
            parts = line.split()
            try:
                b, e, g = int(parts[0]), int(parts[1]), float(parts[2])
            except (IndexError, ValueError):
                raise ConfigError(f"{path}:{lineno}: expected 'block_id realization grade'") from None
            if b not in pos:
                raise ConfigError(f"{path}:{lineno}: block {b} is not an ore block")
            entries.append((pos[b], e, g))
    if not entries:
        raise ConfigError(f"{path}: no ensemble entries")
    num_e = max(e for _, e, _ in entries) + 1
    grades = np.full((ore_ids.size, num_e), np.nan)
    for row, e, g in entries:
        grades[row, e] = g
    if np.isnan(grades).any():
        raise ConfigError(f"{path}: ensemble is missing (block, realization) entries")
    return ensemble_from_grades(model, grades)
