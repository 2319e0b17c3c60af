"""Schedule evaluation: discounted NPV statistics, penalty and fitness functions.

A schedule is an integer numpy vector with one entry per block: the
0-based extraction period, or -1 when the block is left in the ground.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .block_model import UNASSIGNED, BlockModel
from .uncertainty import BlockProfitStats, EnsembleSet

DEFAULT_PENALTY_M = 1e9


class ScheduleError(ValueError):
    pass


@dataclass(frozen=True)
class PeriodProfile:
    expected: np.ndarray  # discounted expected profit per period
    std: np.ndarray  # discounted profit std per period
    usage: np.ndarray  # (num_resources, num_periods)

    @property
    def expected_npv(self) -> float:
        return float(sum(self.expected.tolist()))

    @property
    def variance(self) -> float:
        return float(sum((s * s for s in self.std.tolist())))


@dataclass(frozen=True)
class CCParams:
    alpha: float
    f_alpha: float

    def __post_init__(self) -> None:
        if not 0.5 <= self.alpha < 1:
            raise ValueError(f"alpha must lie in [0.5, 1), got {self.alpha}")
        if self.f_alpha < 0:
            raise ValueError("f_alpha must be nonnegative")


@dataclass(frozen=True, slots=True)
class BiFitness:
    f1: float
    f2: float
    penalty: float = 0.0

    @property
    def feasible(self) -> bool:
        return self.penalty == 0


def dominates(a: BiFitness, b: BiFitness) -> bool:
    """Weak dominance: ``a`` is no worse in either objective (max f1, min f2)."""
    return a.f1 >= b.f1 and a.f2 <= b.f2


def strictly_dominates(a: BiFitness, b: BiFitness) -> bool:
    return a.f1 >= b.f1 and a.f2 <= b.f2 and (a.f1 > b.f1 or a.f2 < b.f2)


def as_schedule(x, model: BlockModel) -> np.ndarray:
    arr = np.asarray(x, dtype=np.int64)
    if arr.shape != (model.num_blocks,):
        raise ScheduleError(f"schedule must have length {model.num_blocks}, got shape {arr.shape}")
    if arr.size and (arr.min() < UNASSIGNED or arr.max() >= model.num_periods):
        raise ScheduleError(f"schedule values must lie in -1..{model.num_periods - 1}")
    return arr


def empty_schedule(model: BlockModel) -> np.ndarray:
    return np.full(model.num_blocks, UNASSIGNED, dtype=np.int64)


def resource_usage(x: np.ndarray, model: BlockModel) -> np.ndarray:
    """Per-resource, per-period usage y[r, t]."""
    T = model.num_periods
    slot = x + 1
    use = model.resource_use
    return np.array(
        [np.bincount(slot, weights=use[:, r], minlength=T + 1)[1:] for r in range(model.num_resources)]
    ).reshape(model.num_resources, T)


def penalty(x, model: BlockModel) -> float:
    """Sum over periods of the worst resource excess."""
    x = as_schedule(x, model)
    return _penalty_from_usage(resource_usage(x, model), model.resource_limits)


def _penalty_from_usage(usage: np.ndarray, limits: np.ndarray) -> float:
    if usage.size == 0:
        return 0.0
    excess = np.maximum(0.0, usage - limits)
    return float(sum(excess.max(axis=0).tolist()))


def precedence_feasible(x, model: BlockModel) -> bool:
    """Every mined block has all predecessors mined no later (debug check)."""
    x = np.asarray(x)
    for b, preds in enumerate(model.predecessors):
        tb = x[b]
        if tb == UNASSIGNED:
            continue
        for p in preds:
            if x[p] == UNASSIGNED or x[p] > tb:
                return False
    return True


def precedence_violations(x, model: BlockModel) -> int:
    x = np.asarray(x)
    count = 0
    for b, preds in enumerate(model.predecessors):
        if x[b] == UNASSIGNED:
            continue
        for p in preds:
            if x[p] == UNASSIGNED or x[p] > x[b]:
                count += 1
    return count


def _discounted_sums(values: np.ndarray, x: np.ndarray, model: BlockModel) -> np.ndarray:
    T = model.num_periods
    sums = np.bincount(x + 1, weights=values, minlength=T + 1)[1:]
    return np.array([sums[t] / (1.0 + model.discount_rate) ** t for t in range(T)])


def deterministic_npv(x, model: BlockModel) -> float:
    """Discounted NPV with each block at its estimated-grade value."""
    x = as_schedule(x, model)
    return float(sum(_discounted_sums(np.asarray(model.values), x, model).tolist()))


class Evaluator:
    """Precomputed arrays for fast repeated evaluation on one model/ensemble."""

    def __init__(
        self,
        model: BlockModel,
        stats: BlockProfitStats,
        ensemble: EnsembleSet,
        penalty_M: float = DEFAULT_PENALTY_M,
    ):
        self.model = model
        self.stats = stats
        self.ensemble = ensemble
        self.penalty_M = penalty_M
        self.T = model.num_periods
        self.expected = np.asarray(stats.expected_value_all, dtype=float)
        self.ore_ids = np.asarray(ensemble.ore_ids)
        self.centered = stats.centered
        self.block_var = stats.variance
        self.discount = np.array([(1.0 + model.discount_rate) ** t for t in range(self.T)])

    def profile(self, x: np.ndarray) -> PeriodProfile:
        model, T = self.model, self.T
        mu = _discounted_sums(self.expected, x, model)
        ore_slot = x[self.ore_ids] + 1
        var = np.zeros(T)
        if self.ore_ids.size:
            own = np.bincount(ore_slot, weights=self.block_var, minlength=T + 1)[1:]
            onehot = np.zeros((T + 1, self.ore_ids.size))
            onehot[ore_slot, np.arange(self.ore_ids.size)] = 1.0
            totals = onehot[1:] @ self.centered
            cov = totals.var(axis=1) - own
            var = own + np.maximum(0.0, cov)
        sigma = np.sqrt(var) / self.discount
        return PeriodProfile(mu, sigma, resource_usage(x, model))

    def penalty(self, x: np.ndarray, usage: np.ndarray | None = None) -> float:
        if usage is None:
            usage = resource_usage(x, self.model)
        return _penalty_from_usage(usage, self.model.resource_limits)

    def bi_objective(self, x: np.ndarray) -> BiFitness:
        prof = self.profile(x)
        v = _penalty_from_usage(prof.usage, self.model.resource_limits)
        var = prof.variance
        if v == 0:
            return BiFitness(prof.expected_npv, math.sqrt(var), 0.0)
        return BiFitness(-v, var + self.penalty_M * v, v)

    def single_objective(self, x: np.ndarray, cc: CCParams) -> float:
        prof = self.profile(x)
        v = _penalty_from_usage(prof.usage, self.model.resource_limits)
        if v == 0:
            return cc_fitness(prof, cc)
        return -v


def period_profile(x, model: BlockModel, stats: BlockProfitStats, ensemble: EnsembleSet) -> PeriodProfile:
    return Evaluator(model, stats, ensemble).profile(as_schedule(x, model))


def cc_fitness(profile: PeriodProfile, cc: CCParams) -> float:
    """Expected NPV minus ``F_alpha`` standard deviations."""
    return profile.expected_npv - cc.f_alpha * math.sqrt(profile.variance)


def single_objective_fitness(
    x, model: BlockModel, stats: BlockProfitStats, ensemble: EnsembleSet, cc: CCParams
) -> float:
    return Evaluator(model, stats, ensemble).single_objective(as_schedule(x, model), cc)


def bi_objective_fitness(
    x,
    model: BlockModel,
    stats: BlockProfitStats,
    ensemble: EnsembleSet,
    penalty_M: float = DEFAULT_PENALTY_M,
) -> BiFitness:
    return Evaluator(model, stats, ensemble, penalty_M).bi_objective(as_schedule(x, model))
