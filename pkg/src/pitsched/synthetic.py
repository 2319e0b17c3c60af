"""Synthetic block models for tests, demos and benchmarking."""

from __future__ import annotations

import numpy as np

from .block_model import BlockModel, make_block


def make_pit_model(
    nx: int = 10,
    ny: int = 10,
    nz: int = 5,
    num_periods: int = 4,
    discount_rate: float = 0.08,
    capacity_fraction: float = 0.35,
    seed: int = 0,
    pattern: str = "plus",
    name: str = "synthetic",
) -> BlockModel:
    """Layered grid orebody with slope precedences.

    Block ``(x, y, z)`` (``z`` = 0 at surface) needs the block above it and,
    for ``pattern="plus"``, its four lateral neighbours above.  Grades follow
    a smooth lognormal field that is richer at depth near the centre.
    Resources: 0 = mining tonnage (all blocks), 1 = processing tonnage (ore).
    Per-period limits are ``capacity_fraction`` of the respective totals.
    """
    rng = np.random.default_rng(seed)
    idx = {}
    coords = []
    for z in range(nz):
        for y in range(ny):
            for x in range(nx):
                idx[(x, y, z)] = len(coords)
                coords.append((x, y, z))
    n = len(coords)
    cx, cy = (nx - 1) / 2, (ny - 1) / 2
    offsets = [(0, 0)]
    if pattern == "plus":
        offsets += [(1, 0), (-1, 0), (0, 1), (0, -1)]
    elif pattern != "vertical":
        raise ValueError(f"unknown pattern {pattern!r}")
    preds = []
    for x, y, z in coords:
        ps = []
        if z > 0:
            for dx, dy in offsets:
                key = (x + dx, y + dy, z - 1)
                if key in idx:
                    ps.append(idx[key])
        preds.append(tuple(sorted(ps)))
    mass = 1000.0
    blocks = []
    for b, (x, y, z) in enumerate(coords):
        r2 = ((x - cx) / max(nx, 1)) ** 2 + ((y - cy) / max(ny, 1)) ** 2
        mu = -4.6 - 6.0 * r2 + 0.15 * z
        grade = float(np.exp(mu + 0.6 * rng.standard_normal()))
        blocks.append((b, grade))
    provisional = [
        make_block(b, mass, g, recovery=0.9, mining_cost=1.0, processing_cost=5.0,
                   price=900.0, selling_cost=100.0, resource_use=(mass, 0.0))
        for b, g in blocks
    ]
    final = [
        make_block(
            pb.id, pb.mass, pb.grade, recovery=pb.recovery, mining_cost=pb.mining_cost,
            processing_cost=pb.processing_cost, price=pb.price, selling_cost=pb.selling_cost,
            resource_use=(pb.mass, pb.mass if pb.is_ore else 0.0),
        )
        for pb in provisional
    ]
    total = np.array([sum(b.resource_use[r] for b in final) for r in range(2)])
    limits = np.repeat((capacity_fraction * total)[:, None], num_periods, axis=1)
    return BlockModel(
        blocks=tuple(final),
        predecessors=tuple(preds),
        num_periods=num_periods,
        discount_rate=discount_rate,
        resource_limits=limits,
        name=name,
        resource_names=("mining", "processing"),
    )


def make_random_dag_model(
    num_blocks: int,
    num_periods: int = 3,
    arc_prob: float = 0.1,
    num_resources: int = 2,
    capacity_fraction: float = 0.4,
    discount_rate: float = 0.1,
    seed: int = 0,
) -> BlockModel:
    """Random DAG (arcs only from lower to higher id) with random economics."""
    rng = np.random.default_rng(seed)
    preds = []
    for b in range(num_blocks):
        if b == 0:
            preds.append(())
            continue
        mask = rng.random(b) < arc_prob
        preds.append(tuple(int(p) for p in np.flatnonzero(mask)))
    blocks = []
    for b in range(num_blocks):
        mass = float(rng.uniform(50, 150))
        grade = float(rng.uniform(0.0, 0.03))
        use = rng.uniform(0.0, 1.0, num_resources) * mass
        blocks.append(make_block(
            b, mass, grade, recovery=float(rng.uniform(0.7, 1.0)), mining_cost=1.0,
            processing_cost=4.0, price=600.0, selling_cost=50.0, resource_use=use,
        ))
    total = np.array([sum(bl.resource_use[r] for bl in blocks) for r in range(num_resources)])
    limits = np.repeat((capacity_fraction * total)[:, None], num_periods, axis=1)
    return BlockModel(
        blocks=tuple(blocks),
        predecessors=tuple(preds),
        num_periods=num_periods,
        discount_rate=discount_rate,
        resource_limits=limits,
        name=f"dag{num_blocks}",
    )
