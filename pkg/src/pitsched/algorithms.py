"""The four schedulers: (1+1) EA, GSEMO, mutation-only NSGA-II and MOEA/D.

Bi-objective runs maximise expected NPV (f1) and minimise its standard
deviation (f2).  Internally NSGA-II and MOEA/D work on the minimisation
vector ``(-f1, f2)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .block_model import BlockModel
from .evaluation import (
    DEFAULT_PENALTY_M,
    BiFitness,
    CCParams,
    Evaluator,
    strictly_dominates,
)
from .operators import MutationConfig, greedy_randomized_init, period_swap_mutation
from .uncertainty import BlockProfitStats, EnsembleSet


class BudgetExhausted(RuntimeError):
    pass


@dataclass
class Budget:
    max_evaluations: int
    used: int = 0

    @property
    def remaining(self) -> int:
        return self.max_evaluations - self.used

    @property
    def exhausted(self) -> bool:
        return self.used >= self.max_evaluations

    def spend(self) -> None:
        if self.used >= self.max_evaluations:
            raise BudgetExhausted(f"budget of {self.max_evaluations} evaluations exhausted")
        self.used += 1


@dataclass(frozen=True)
class EAConfig:
    mutation: MutationConfig = field(default_factory=MutationConfig)
    pop_size: int = 20
    neighborhood_size: int = 8
    neighborhood_prob: float = 0.9
    max_replacements: int = 12
    penalty_M: float = DEFAULT_PENALTY_M
    init_select_prob: float = 0.5


class ParetoArchive:
    """Mutually non-dominated (schedule, fitness) pairs in insertion order."""

    def __init__(self) -> None:
        self.members: list[tuple[np.ndarray, BiFitness]] = []

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self):
        return iter(self.members)

    def offer(self, schedule: np.ndarray, fit: BiFitness) -> bool:
        """Insert unless strictly dominated; drop members the newcomer weakly dominates."""
        for _, f in self.members:
            if strictly_dominates(f, fit):
                return False
        self.members = [
            (s, f) for s, f in self.members if not (fit.f1 >= f.f1 and fit.f2 <= f.f2)
        ]
        self.members.append((schedule, fit))
        return True

    def fitnesses(self) -> list[BiFitness]:
        return [f for _, f in self.members]

    def is_mutually_nondominated(self) -> bool:
        fits = self.fitnesses()
        return not any(
            strictly_dominates(a, b) for i, a in enumerate(fits) for j, b in enumerate(fits) if i != j
        )


# ---------------------------------------------------------------------------
# Pareto utilities
# ---------------------------------------------------------------------------


def _as_min(fits: list[BiFitness]) -> np.ndarray:
    return np.array([(-f.f1, f.f2) for f in fits], dtype=float).reshape(len(fits), 2)


def fast_non_dominated_sort(objs: np.ndarray) -> tuple[list[list[int]], np.ndarray]:
    """Deb's front peeling for minimisation objectives ``objs`` (n x m)."""
    objs = np.asarray(objs, dtype=float)
    n = len(objs)
    if n == 0:
        return [], np.zeros(0, dtype=np.int64)
    le = (objs[:, None, :] <= objs[None, :, :]).all(axis=2)
    lt = (objs[:, None, :] < objs[None, :, :]).any(axis=2)
    dom = le & lt  # dom[p, q]: p dominates q
    count = dom.sum(axis=0)
    rank = np.zeros(n, dtype=np.int64)
    fronts = [np.flatnonzero(count == 0).tolist()]
    while fronts[-1]:
        nxt = []
        for p in fronts[-1]:
            for q in np.flatnonzero(dom[p]).tolist():
                count[q] -= 1
                if count[q] == 0:
                    rank[q] = len(fronts)
                    nxt.append(q)
        fronts.append(sorted(nxt))
    fronts.pop()
    return fronts, rank


def crowding_distance(objs: np.ndarray, front: list[int]) -> np.ndarray:
    """Crowding distance of each member of ``front``; extremes get infinity."""
    objs = np.asarray(objs, dtype=float)
    k = len(front)
    dist = np.zeros(k)
    if k <= 2:
        dist[:] = np.inf
        return dist
    sub = objs[front]
    for m in range(sub.shape[1]):
        order = np.argsort(sub[:, m], kind="stable")
        lo, hi = sub[order[0], m], sub[order[-1], m]
        dist[order[0]] = dist[order[-1]] = np.inf
        span = hi - lo
        if span == 0 or not np.isfinite(span):
            continue
        dist[order[1:-1]] += (sub[order[2:], m] - sub[order[:-2], m]) / span
    return dist


def weight_vectors(n: int) -> np.ndarray:
    """``n`` evenly spaced two-objective weights, endpoints included."""
    if n == 1:
        return np.array([[0.5, 0.5]])
    a = np.arange(n) / (n - 1)
    return np.column_stack([a, 1.0 - a])


def neighborhoods(weights: np.ndarray, size: int) -> np.ndarray:
    """Indices of the ``size`` nearest weights (self first, ties by index)."""
    d = np.linalg.norm(weights[:, None, :] - weights[None, :, :], axis=2)
    order = np.argsort(d, axis=1, kind="stable")
    return order[:, : min(size, len(weights))]


def tchebycheff(f: np.ndarray, lam: np.ndarray, z: np.ndarray) -> float:
    return float(np.max(lam * np.abs(np.asarray(f) - z)))


def extract_best_for_alpha(archive: ParetoArchive, cc: CCParams):
    """Feasible member maximising ``f1 - F_alpha * f2``; None if none is feasible.

    Ties prefer the smaller f2, then the earlier member.
    """
    best = None
    best_key = None
    for sched, fit in archive:
        if not fit.feasible:
            continue
        val = fit.f1 - cc.f_alpha * fit.f2
        key = (val, -fit.f2)
        if best_key is None or key > best_key:
            best, best_key = (sched, val), key
    return best


# ---------------------------------------------------------------------------
# Algorithms
# ---------------------------------------------------------------------------


class _Run:
    def __init__(self, model, stats, ensemble, cfg: EAConfig, budget: Budget, rng):
        self.model = model
        self.cfg = cfg
        self.budget = budget
        self.rng = rng
        self.ev = Evaluator(model, stats, ensemble, cfg.penalty_M)
        self.cones = model.cones

    def init(self) -> np.ndarray:
        return greedy_randomized_init(
            self.model, self.cones, self.rng, values=self.ev.expected,
            select_prob=self.cfg.init_select_prob,
        )

    def mutate(self, x: np.ndarray) -> np.ndarray:
        return period_swap_mutation(x, self.model, self.cfg.mutation, self.rng)

    def bi(self, x: np.ndarray) -> BiFitness:
        self.budget.spend()
        return self.ev.bi_objective(x)

    def single(self, x: np.ndarray, cc: CCParams) -> float:
        self.budget.spend()
        return self.ev.single_objective(x, cc)


def _budget(budget) -> Budget:
    return budget if isinstance(budget, Budget) else Budget(int(budget))


def run_one_plus_one_ea(
    model: BlockModel,
    stats: BlockProfitStats,
    ensemble: EnsembleSet,
    cc: CCParams,
    cfg: EAConfig,
    budget,
    rng: np.random.Generator,
    history: list[float] | None = None,
) -> tuple[np.ndarray, float]:
    """Elitist (1+1) EA on the penalised chance-constrained fitness."""
    budget = _budget(budget)
    if budget.remaining < 1:
        raise ValueError("(1+1) EA needs a budget of at least one evaluation")
    run = _Run(model, stats, ensemble, cfg, budget, rng)
    x = run.init()
    fx = run.single(x, cc)
    if history is not None:
        history.append(fx)
    while not budget.exhausted:
        y = run.mutate(x)
        fy = run.single(y, cc)
        if fy >= fx:
            x, fx = y, fy
        if history is not None:
            history.append(fx)
    return x, fx


def run_gsemo(
    model: BlockModel,
    stats: BlockProfitStats,
    ensemble: EnsembleSet,
    cfg: EAConfig,
    budget,
    rng: np.random.Generator,
    on_step: Callable[[ParetoArchive], None] | None = None,
) -> ParetoArchive:
    budget = _budget(budget)
    if budget.remaining < 1:
        raise ValueError("GSEMO needs a budget of at least one evaluation")
    run = _Run(model, stats, ensemble, cfg, budget, rng)
    archive = ParetoArchive()
    x = run.init()
    archive.offer(x, run.bi(x))
    if on_step is not None:
        on_step(archive)
    while not budget.exhausted:
        parent = archive.members[int(rng.integers(len(archive)))][0]
        y = run.mutate(parent)
        archive.offer(y, run.bi(y))
        if on_step is not None:
            on_step(archive)
    return archive


def _tournament(rank: np.ndarray, crowd: np.ndarray, rng: np.random.Generator) -> int:
    a, b = (int(v) for v in rng.integers(len(rank), size=2))
    if rank[a] != rank[b]:
        return a if rank[a] < rank[b] else b
    if crowd[a] != crowd[b]:
        return a if crowd[a] > crowd[b] else b
    return a if rng.random() < 0.5 else b


def _rank_and_crowd(objs: np.ndarray):
    fronts, rank = fast_non_dominated_sort(objs)
    crowd = np.zeros(len(objs))
    for front in fronts:
        crowd[front] = crowding_distance(objs, front)
    return fronts, rank, crowd


def environmental_selection(objs: np.ndarray, n: int) -> list[int]:
    """Indices of the best ``n`` by (front, descending crowding distance)."""
    fronts, _, crowd = _rank_and_crowd(objs)
    chosen: list[int] = []
    for front in fronts:
        if len(chosen) + len(front) <= n:
            chosen.extend(front)
            continue
        order = sorted(front, key=lambda i: -crowd[i])
        chosen.extend(order[: n - len(chosen)])
        break
    return chosen


def run_nsga2(
    model: BlockModel,
    stats: BlockProfitStats,
    ensemble: EnsembleSet,
    cfg: EAConfig,
    budget,
    rng: np.random.Generator,
    external_archive: ParetoArchive | None = None,
) -> ParetoArchive:
    """Mutation-only NSGA-II; returns the first front of the final population."""
    budget = _budget(budget)
    N = cfg.pop_size
    if budget.remaining < 2 * N:
        raise ValueError(f"NSGA-II needs a budget of at least {2 * N} evaluations")
    run = _Run(model, stats, ensemble, cfg, budget, rng)
    pop = [run.init() for _ in range(N)]
    fits = [run.bi(x) for x in pop]
    if external_archive is not None:
        for x, f in zip(pop, fits):
            external_archive.offer(x, f)
    _, rank, crowd = _rank_and_crowd(_as_min(fits))
    while not budget.exhausted:
        kids, kid_fits = [], []
        for _ in range(min(N, budget.remaining)):
            parent = pop[_tournament(rank, crowd, rng)]
            y = run.mutate(parent)
            fy = run.bi(y)
            kids.append(y)
            kid_fits.append(fy)
            if external_archive is not None:
                external_archive.offer(y, fy)
        merged, merged_fits = pop + kids, fits + kid_fits
        objs = _as_min(merged_fits)
        keep = environmental_selection(objs, N)
        pop = [merged[i] for i in keep]
        fits = [merged_fits[i] for i in keep]
        _, rank, crowd = _rank_and_crowd(_as_min(fits))
    fronts, _ = fast_non_dominated_sort(_as_min(fits))
    result = ParetoArchive()
    for i in fronts[0]:
        result.offer(pop[i], fits[i])
    return result


def run_moead(
    model: BlockModel,
    stats: BlockProfitStats,
    ensemble: EnsembleSet,
    cfg: EAConfig,
    budget,
    rng: np.random.Generator,
    on_replace: Callable[[int], None] | None = None,
) -> ParetoArchive:
    """Mutation-only MOEA/D with Tchebycheff scalarisation.

    Returns the external archive of every non-dominated point evaluated.
    ``on_replace`` receives the number of population slots each offspring took.
    """
    budget = _budget(budget)
    N = cfg.pop_size
    if budget.remaining < N:
        raise ValueError(f"MOEA/D needs a budget of at least {N} evaluations")
    run = _Run(model, stats, ensemble, cfg, budget, rng)
    lam = weight_vectors(N)
    hood = neighborhoods(lam, cfg.neighborhood_size)
    everyone = np.arange(N)
    archive = ParetoArchive()
    pop = [run.init() for _ in range(N)]
    fits = [run.bi(x) for x in pop]
    objs = _as_min(fits)
    for x, f in zip(pop, fits):
        archive.offer(x, f)
    z = objs.min(axis=0)
    while not budget.exhausted:
        for i in rng.permutation(N).tolist():
            if budget.exhausted:
                break
            pool = hood[i] if rng.random() < cfg.neighborhood_prob else everyone
            parent = pop[int(pool[rng.integers(len(pool))])]
            y = run.mutate(parent)
            fy = run.bi(y)
            archive.offer(y, fy)
            fo = np.array([-fy.f1, fy.f2])
            z = np.minimum(z, fo)
            replaced = 0
            for j in rng.permutation(pool).tolist():
                if replaced >= cfg.max_replacements:
                    break
                if tchebycheff(fo, lam[j], z) <= tchebycheff(objs[j], lam[j], z):
                    pop[j], fits[j] = y, fy
                    objs[j] = fo
                    replaced += 1
            if on_replace is not None:
                on_replace(replaced)
    return archive
