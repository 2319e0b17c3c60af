"""Problem-specific variation: greedy-randomized initialization and period-swap mutation."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .block_model import UNASSIGNED, BlockModel


@dataclass(frozen=True)
class MutationConfig:
    prob: float = 0.1
    max_attempts: int = 3
    # False: a move to period t' needs every successor mined at t' or later,
    # exactly as in the published operator.  True: unmined successors are
    # also accepted, which still preserves precedence.
    allow_unmined_successors: bool = False

    def __post_init__(self) -> None:
        if not 0 <= self.prob <= 1:
            raise ValueError("mutation prob must lie in [0, 1]")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be at least 1")


def greedy_randomized_init(
    model: BlockModel,
    cones: np.ndarray | None,
    rng: np.random.Generator,
    values: np.ndarray | None = None,
    select_prob: float = 0.5,
) -> np.ndarray:
    """Build a precedence- and capacity-feasible schedule period by period.

    For each period, blocks are visited by descending cone value (ties by id)
    and each is picked with probability ``select_prob``.  A picked block's
    unmined ancestor closure is assigned to the period as a whole, or not at
    all when it would exceed any remaining capacity.  Trailing periods with
    negative value (``values``, default the deterministic block values) are
    then emptied.
    """
    cones = model.cones if cones is None else np.asarray(cones)
    n, T, R = model.num_blocks, model.num_periods, model.num_resources
    x = [UNASSIGNED] * n
    order = np.lexsort((np.arange(n), -cones)).tolist()
    use = model.resource_use.tolist()
    preds = model.predecessors
    limits = model.resource_limits
    for t in range(T):
        remaining = limits[:, t].tolist()
        picks = (rng.random(n) < select_prob).tolist()
        for i, picked in zip(order, picks):
            if not picked or x[i] != UNASSIGNED:
                continue
            closure = _unmined_closure(i, x, preds, use, remaining, R)
            if closure is None:
                continue
            for b in closure:
                x[b] = t
                ub = use[b]
                for r in range(R):
                    remaining[r] -= ub[r]
    sched = np.array(x, dtype=np.int64)
    vals = model.values if values is None else values
    return truncate_trailing_periods(sched, model, vals)


def _unmined_closure(i, x, preds, use, remaining, R):
    """Unmined ancestors of ``i`` (with ``i``), or None once they cannot fit.

    Mined blocks are never expanded: whole closures are always assigned
    together, so a mined block's ancestors are mined as well.
    """
    need = [0.0] * R
    seen = {i}
    stack = [i]
    while stack:
        b = stack.pop()
        ub = use[b]
        for r in range(R):
            need[r] += ub[r]
            if need[r] > remaining[r]:
                return None
        for p in preds[b]:
            if p not in seen and x[p] == UNASSIGNED:
                seen.add(p)
                stack.append(p)
    return seen


def truncate_trailing_periods(x: np.ndarray, model: BlockModel, values) -> np.ndarray:
    """Unassign trailing periods whose total value is negative.

    Empty periods are stepped over; the scan stops at the first nonempty
    period with nonnegative value.
    """
    x = x.copy()
    vals = np.asarray(values, dtype=float)
    for t in range(model.num_periods - 1, -1, -1):
        mask = x == t
        if not mask.any():
            continue
        if float(vals[mask].sum()) < 0:
            x[mask] = UNASSIGNED
        else:
            break
    return x


def period_swap_mutation(
    parent: np.ndarray,
    model: BlockModel,
    cfg: MutationConfig,
    rng: np.random.Generator,
) -> np.ndarray:
    """Move blocks to other periods without breaking precedence.

    Each block is chosen with probability ``cfg.prob``.  Ore blocks may move
    earlier or out of the schedule, waste blocks later or out; an unmined
    block may enter any period.  Up to ``cfg.max_attempts`` uniform draws are
    tried and the first admissible one is kept.
    """
    n, T = model.num_blocks, model.num_periods
    chosen = np.flatnonzero(rng.random(n) < cfg.prob)
    if chosen.size == 0:
        return parent.copy()
    draws = rng.random((chosen.size, cfg.max_attempts)).tolist()
    y = parent.tolist()
    preds, succs = model.predecessors, model.successors
    ore = model.ore_mask.tolist()
    relaxed = cfg.allow_unmined_successors
    all_periods = list(range(T))
    for b, us in zip(chosen.tolist(), draws):
        tb = y[b]
        if tb == UNASSIGNED:
            cands = all_periods
        elif ore[b]:
            cands = [UNASSIGNED, *range(tb)]
        else:
            cands = [UNASSIGNED, *range(tb + 1, T)]
        k = len(cands)
        for u in us:
            t_new = cands[int(u * k)]
            if t_new == UNASSIGNED:
                if all(y[s] == UNASSIGNED for s in succs[b]):
                    y[b] = UNASSIGNED
                    break
            elif all(y[p] != UNASSIGNED and y[p] <= t_new for p in preds[b]) and (
                all((y[s] == UNASSIGNED or y[s] >= t_new) for s in succs[b])
                if relaxed
                else all(y[s] >= t_new for s in succs[b])
            ):
                y[b] = t_new
                break
    return np.array(y, dtype=np.int64)
