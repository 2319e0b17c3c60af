"""Orebody block model: blocks, precedence DAG, economics and resource limits.

Instances are read from the MineLib text formats (``.blocks``, ``.prec`` and a
CPIT parameter file).  An INI descriptor tells the loader which block columns
hold mass, grade and the economic coefficients; see README for the key set.
"""

from __future__ import annotations

import configparser
import math
from collections import deque
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

UNASSIGNED = -1


class ModelError(ValueError):
    """Raised when a block model violates a structural invariant."""


class ParseError(ValueError):
    """Raised for malformed instance files; carries the offending line number."""

    def __init__(self, path: str | Path, lineno: int, message: str):
        self.path = str(path)
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


@dataclass(frozen=True, slots=True)
class Block:
    id: int
    mass: float
    grade: float
    recovery: float
    mining_cost: float
    processing_cost: float
    price: float
    selling_cost: float
    resource_use: tuple[float, ...]
    is_ore: bool

    def processing_value(self, grade: float | None = None) -> float:
        """Value of sending the block to the mill, before mining cost."""
        g = self.grade if grade is None else grade
        metal = self.mass * g * self.recovery
        return metal * (self.price - self.selling_cost) - self.mass * self.processing_cost


def make_block(
    id: int,
    mass: float,
    grade: float,
    recovery: float = 1.0,
    mining_cost: float = 0.0,
    processing_cost: float = 0.0,
    price: float = 0.0,
    selling_cost: float = 0.0,
    resource_use: Iterable[float] = (),
    is_ore: bool | None = None,
) -> Block:
    """Build a block, classifying it as ore when processing beats dumping."""
    if not mass > 0:
        raise ModelError(f"block {id}: mass must be positive, got {mass}")
    if not 0.0 <= recovery <= 1.0:
        raise ModelError(f"block {id}: recovery must lie in [0, 1], got {recovery}")
    use = tuple(float(u) for u in resource_use)
    if any(u < 0 for u in use):
        raise ModelError(f"block {id}: negative resource coefficient")
    block = Block(
        id, float(mass), float(grade), float(recovery), float(mining_cost),
        float(processing_cost), float(price), float(selling_cost), use, False,
    )
    if is_ore is None:
        is_ore = block.processing_value() > 0
    return Block(
        block.id, block.mass, block.grade, block.recovery, block.mining_cost,
        block.processing_cost, block.price, block.selling_cost, use, bool(is_ore),
    )


def block_value(b: Block, grade_override: float | None = None) -> float:
    """Profit of mining ``b``: processed if ore, dumped otherwise."""
    if not b.is_ore:
        return -b.mass * b.mining_cost
    return b.processing_value(grade_override) - b.mass * b.mining_cost


@dataclass(frozen=True)
class BlockModel:
    blocks: tuple[Block, ...]
    predecessors: tuple[tuple[int, ...], ...]
    num_periods: int
    discount_rate: float
    resource_limits: np.ndarray  # (num_resources, num_periods)
    name: str = "instance"
    resource_names: tuple[str, ...] = ()
    # per-block profits as read from the parameter file, kept for re-serialization
    source_profits: np.ndarray | None = field(default=None, compare=False, repr=False)

    def __post_init__(self) -> None:
        n = len(self.blocks)
        for i, b in enumerate(self.blocks):
            if b.id != i:
                raise ModelError(f"block ids must be 0..{n - 1} in order; found {b.id} at {i}")
        if len(self.predecessors) != n:
            raise ModelError("predecessor table length differs from block count")
        for b, preds in enumerate(self.predecessors):
            for p in preds:
                if not 0 <= p < n:
                    raise ModelError(f"block {b}: dangling predecessor reference {p}")
                if p == b:
                    raise ModelError(f"block {b} lists itself as predecessor")
        if self.num_periods < 1:
            raise ModelError("num_periods must be at least 1")
        limits = np.array(self.resource_limits, dtype=float, copy=True)
        if limits.ndim != 2 or limits.shape[1] != self.num_periods:
            raise ModelError(
                f"resource_limits must have shape (R, {self.num_periods}), got {limits.shape}"
            )
        if np.any(limits < 0):
            raise ModelError("resource limits must be nonnegative")
        nres = limits.shape[0]
        for b in self.blocks:
            if len(b.resource_use) != nres:
                raise ModelError(f"block {b.id}: expected {nres} resource coefficients")
        limits.setflags(write=False)
        object.__setattr__(self, "resource_limits", limits)
        names = self.resource_names or tuple(f"r{r}" for r in range(nres))
        if len(names) != nres:
            raise ModelError("resource_names length differs from resource count")
        object.__setattr__(self, "resource_names", tuple(names))
        # raises on cycles
        _ = self.topological_order

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def num_resources(self) -> int:
        return self.resource_limits.shape[0]

    @property
    def num_arcs(self) -> int:
        return sum(len(p) for p in self.predecessors)

    @cached_property
    def successors(self) -> tuple[tuple[int, ...], ...]:
        succ: list[list[int]] = [[] for _ in self.blocks]
        for b, preds in enumerate(self.predecessors):
            for p in preds:
                succ[p].append(b)
        return tuple(tuple(s) for s in succ)

    @cached_property
    def topological_order(self) -> tuple[int, ...]:
        return tuple(topological_order(self))

    @cached_property
    def resource_use(self) -> np.ndarray:
        arr = np.array([b.resource_use for b in self.blocks], dtype=float).reshape(
            self.num_blocks, self.num_resources
        )
        arr.setflags(write=False)
        return arr

    @cached_property
    def ore_mask(self) -> np.ndarray:
        arr = np.array([b.is_ore for b in self.blocks], dtype=bool)
        arr.setflags(write=False)
        return arr

    @cached_property
    def values(self) -> np.ndarray:
        """Deterministic block values at the estimated grades."""
        arr = np.array([block_value(b) for b in self.blocks], dtype=float)
        arr.setflags(write=False)
        return arr

    @cached_property
    def cones(self) -> np.ndarray:
        return cone_values(self)

    def discount_factor(self, t: int) -> float:
        return 1.0 / (1.0 + self.discount_rate) ** t


def topological_order(model: BlockModel) -> list[int]:
    """Kahn's algorithm with a min-heap so ties resolve to the lowest id."""
    import heapq

    n = len(model.blocks)
    indeg = [len(p) for p in model.predecessors]
    succ: list[list[int]] = [[] for _ in range(n)]
    for b, preds in enumerate(model.predecessors):
        for p in preds:
            succ[p].append(b)
    heap = [b for b in range(n) if indeg[b] == 0]
    heapq.heapify(heap)
    order: list[int] = []
    while heap:
        b = heapq.heappop(heap)
        order.append(b)
        for s in succ[b]:
            indeg[s] -= 1
            if indeg[s] == 0:
                heapq.heappush(heap, s)
    if len(order) != n:
        stuck = min(b for b in range(n) if indeg[b] > 0)
        raise ModelError(f"precedence graph contains a cycle (through block {stuck})")
    return order


def _levels(model: BlockModel) -> np.ndarray:
    level = np.zeros(model.num_blocks, dtype=np.int64)
    for b in model.topological_order:
        preds = model.predecessors[b]
        if preds:
            level[b] = 1 + max(level[p] for p in preds)
    return level


def cone_values(model: BlockModel, values: np.ndarray | None = None) -> np.ndarray:
    """Sum of ``values`` over each block's ancestor closure (block included).

    Ancestor sets are propagated as 64-bit masks, 64 target blocks at a time,
    from the deepest precedence level upward; each ancestor is counted once.
    """
    vals = model.values if values is None else np.asarray(values, dtype=float)
    n = model.num_blocks
    out = np.zeros(n, dtype=float)
    if n == 0:
        return out
    level = _levels(model)
    pred_idx = np.fromiter(
        (p for preds in model.predecessors for p in preds), dtype=np.int64, count=model.num_arcs
    )
    succ_idx = np.repeat(
        np.arange(n, dtype=np.int64), [len(p) for p in model.predecessors]
    )
    # group arcs by the level of their successor, deepest first; within a
    # group sort by predecessor so OR-reductions can use reduceat
    groups = []
    if pred_idx.size:
        arc_level = level[succ_idx]
        for lvl in range(int(level.max()), 0, -1):
            sel = np.flatnonzero(arc_level == lvl)
            if sel.size == 0:
                continue
            sel = sel[np.argsort(pred_idx[sel], kind="stable")]
            p = pred_idx[sel]
            starts = np.flatnonzero(np.r_[True, p[1:] != p[:-1]])
            groups.append((succ_idx[sel], p[starts], starts))
    bits = np.left_shift(np.uint64(1), np.arange(64, dtype=np.uint64))
    for lo in range(0, n, 64):
        targets = np.arange(lo, min(lo + 64, n))
        mask = np.zeros(n, dtype=np.uint64)
        mask[targets] = bits[: targets.size]
        for succ_sorted, uniq_pred, starts in groups:
            red = np.bitwise_or.reduceat(mask[succ_sorted], starts)
            mask[uniq_pred] |= red
        member = np.unpackbits(mask.view(np.uint8).reshape(n, 8), axis=1, bitorder="little")
        out[targets] = vals @ member[:, : targets.size]
    out.setflags(write=False)
    return out


def ancestor_closure(model: BlockModel, b: int) -> set[int]:
    seen = {b}
    stack = [b]
    while stack:
        for p in model.predecessors[stack.pop()]:
            if p not in seen:
                seen.add(p)
                stack.append(p)
    return seen


# --------------------------------------------------------------------------
# MineLib text formats
# --------------------------------------------------------------------------


def _data_lines(path: Path):
    with open(path, "r") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line[0] in "%#":
                continue
            yield lineno, line


def read_blocks_file(path: str | Path) -> list[list[float]]:
    """Rows of a ``.blocks`` file indexed by block id (column 0)."""
    path = Path(path)
    rows: dict[int, list[float]] = {}
    width = None
    for lineno, line in _data_lines(path):
        parts = line.replace(":", " ").split()
        if len(parts) < 4:
            raise ParseError(path, lineno, "expected at least id, x, y, z columns")
        try:
            bid = int(parts[0])
            vals = [float(v) for v in parts]
        except ValueError as exc:
            raise ParseError(path, lineno, f"non-numeric field ({exc})") from None
        if width is None:
            width = len(parts)
        elif len(parts) != width:
            raise ParseError(path, lineno, f"expected {width} columns, found {len(parts)}")
        if bid in rows:
            raise ParseError(path, lineno, f"duplicate block id {bid}")
        rows[bid] = vals
    n = len(rows)
    if sorted(rows) != list(range(n)):
        raise ModelError(f"{path}: block ids must be contiguous from 0")
    return [rows[i] for i in range(n)]


def read_prec_file(path: str | Path, num_blocks: int) -> list[tuple[int, ...]]:
    """Predecessor lists from a ``.prec`` file (``id count p1 .. pcount``)."""
    path = Path(path)
    preds: list[tuple[int, ...]] = [()] * num_blocks
    seen = set()
    for lineno, line in _data_lines(path):
        try:
            nums = [int(v) for v in line.split()]
        except ValueError as exc:
            raise ParseError(path, lineno, f"non-integer field ({exc})") from None
        if len(nums) < 2:
            raise ParseError(path, lineno, "expected block id and predecessor count")
        b, k = nums[0], nums[1]
        if len(nums) != k + 2:
            raise ParseError(path, lineno, f"declared {k} predecessors, found {len(nums) - 2}")
        if not 0 <= b < num_blocks:
            raise ModelError(f"{path}:{lineno}: dangling block reference {b}")
        if b in seen:
            raise ParseError(path, lineno, f"duplicate entry for block {b}")
        seen.add(b)
        for p in nums[2:]:
            if not 0 <= p < num_blocks:
                raise ModelError(f"{path}:{lineno}: dangling predecessor reference {p}")
        preds[b] = tuple(nums[2:])
    return preds


@dataclass
class CpitParams:
    name: str
    num_blocks: int
    num_periods: int
    num_resources: int
    discount_rate: float
    profits: np.ndarray
    limits: np.ndarray
    coefficients: np.ndarray  # (num_blocks, num_resources)


_CPIT_HEADER = {
    "NAME", "TYPE", "NBLOCKS", "NPERIODS", "NRESOURCE_SIDE_CONSTRAINTS", "DISCOUNT_RATE",
}


def read_cpit_file(path: str | Path) -> CpitParams:
    """Parse a MineLib CPIT optimisation-model file.

    Only upper bounds matter for scheduling: ``L`` limits are taken as-is, ``I``
    (interval) limits contribute their upper value and ``G`` (lower bound)
    limits leave the resource unbounded in that period.
    """
    path = Path(path)
    header: dict[str, str] = {}
    section = None
    profits = limits = coeffs = None
    lines = _data_lines(path)
    for lineno, line in lines:
        if line.upper() == "EOF":
            break
        if line.endswith(":") or (":" in line and line.split(":", 1)[0].strip().isupper()):
            key, _, rest = line.partition(":")
            key = key.strip().upper()
            if key in _CPIT_HEADER:
                header[key] = rest.strip()
                continue
            if key in ("OBJECTIVE_FUNCTION", "RESOURCE_CONSTRAINT_LIMITS",
                       "RESOURCE_CONSTRAINT_COEFFICIENTS"):
                section = key
                if profits is None:
                    try:
                        n = int(header["NBLOCKS"])
                        T = int(header["NPERIODS"])
                        R = int(header.get("NRESOURCE_SIDE_CONSTRAINTS", "0"))
                    except (KeyError, ValueError):
                        raise ParseError(path, lineno, "header must define NBLOCKS and NPERIODS") from None
                    profits = np.full(n, np.nan)
                    limits = np.full((R, T), np.inf)
                    coeffs = np.zeros((n, R))
                continue
            raise ParseError(path, lineno, f"unknown keyword {key!r}")
        parts = line.split()
        try:
            if section == "OBJECTIVE_FUNCTION":
                b, v = int(parts[0]), float(parts[1])
                profits[b] = v
            elif section == "RESOURCE_CONSTRAINT_LIMITS":
                r, t, kind = int(parts[0]), int(parts[1]), parts[2].upper()
                if kind == "L":
                    limits[r, t] = float(parts[3])
                elif kind == "I":
                    limits[r, t] = float(parts[4])
                elif kind == "G":
                    limits[r, t] = np.inf
                else:
                    raise ParseError(path, lineno, f"unknown constraint type {kind!r}")
            elif section == "RESOURCE_CONSTRAINT_COEFFICIENTS":
                b, r, v = int(parts[0]), int(parts[1]), float(parts[2])
                coeffs[b, r] = v
            else:
                raise ParseError(path, lineno, "data line outside any section")
        except (IndexError, ValueError) as exc:
            raise ParseError(path, lineno, f"malformed line ({exc})") from None
    if profits is None:
        raise ParseError(path, 0, "no OBJECTIVE_FUNCTION section")
    if np.isnan(profits).any():
        missing = int(np.flatnonzero(np.isnan(profits))[0])
        raise ModelError(f"{path}: no objective coefficient for block {missing}")
    return CpitParams(
        name=header.get("NAME", path.stem),
        num_blocks=len(profits),
        num_periods=limits.shape[1],
        num_resources=limits.shape[0],
        discount_rate=float(header.get("DISCOUNT_RATE", "0")),
        profits=profits,
        limits=limits,
        coefficients=coeffs,
    )


# Descriptor field syntax: "col:<k>" (column k of the .blocks row, id = column 0),
# "res:<r>" (resource coefficient r from the parameter file), or a number.
_FIELD_DEFAULTS = {
    "mass": "res:0",
    "grade": "1.0",
    "recovery": "1.0",
    "mining_cost": "0.0",
    "processing_cost": "0.0",
    "price": "0.0",
    "selling_cost": "0.0",
}


@dataclass
class ColumnMapping:
    """How block rows and parameter-file data map onto :class:`Block` fields.

    ``economics="objective"`` reads each block's profit from the parameter
    file and rebuilds processing economics from it (see :func:`parse_minelib`);
    ``economics="raw"`` takes every coefficient from the mapping.
    """

    economics: str = "objective"
    fields: dict[str, str] = field(default_factory=lambda: dict(_FIELD_DEFAULTS))
    resource_names: tuple[str, ...] = ()

    def column(self, name: str, rows: list[list[float]], coeffs: np.ndarray) -> np.ndarray:
        spec = str(self.fields.get(name, _FIELD_DEFAULTS[name])).strip()
        n = len(rows)
        if spec.startswith("col:"):
            k = int(spec[4:])
            if rows and k >= len(rows[0]):
                raise ModelError(f"mapping {name}={spec}: blocks file has {len(rows[0])} columns")
            return np.array([r[k] for r in rows], dtype=float)
        if spec.startswith("res:"):
            r = int(spec[4:])
            if r >= coeffs.shape[1]:
                raise ModelError(f"mapping {name}={spec}: only {coeffs.shape[1]} resources")
            return coeffs[:, r].astype(float)
        try:
            return np.full(n, float(spec))
        except ValueError:
            raise ModelError(f"mapping {name}: cannot interpret {spec!r}") from None


def parse_minelib(
    blocks_file: str | Path,
    prec_file: str | Path,
    params_file: str | Path,
    mapping: ColumnMapping | None = None,
    name: str | None = None,
) -> BlockModel:
    """Load a MineLib CPIT instance.

    In ``objective`` mode the file profit ``p`` is authoritative.  With mass
    ``m`` and mining cost ``n`` the processing value is ``v = p + m*n``; the
    block is ore iff ``v > 0`` and its grade is positive, in which case the
    price is set so that ``v`` is linear in grade (recovery 1, no processing
    or selling cost).  Waste blocks get ``n = -p/m`` so their value stays ``p``.
    """
    mapping = mapping or ColumnMapping()
    params = read_cpit_file(params_file)
    rows = read_blocks_file(blocks_file)
    if len(rows) != params.num_blocks:
        raise ModelError(
            f"{blocks_file} has {len(rows)} blocks but parameter file declares {params.num_blocks}"
        )
    preds = read_prec_file(prec_file, len(rows))
    coeffs = params.coefficients
    mass = mapping.column("mass", rows, coeffs)
    grade = mapping.column("grade", rows, coeffs)
    mining = mapping.column("mining_cost", rows, coeffs)
    blocks = []
    if mapping.economics == "objective":
        for b in range(len(rows)):
            m, g, p = mass[b], grade[b], params.profits[b]
            if not m > 0:
                raise ModelError(f"block {b}: mass must be positive, got {m}")
            v = p + m * mining[b]
            if v > 0 and g > 0:
                blocks.append(make_block(
                    b, m, g, recovery=1.0, mining_cost=mining[b], price=v / (m * g),
                    resource_use=coeffs[b], is_ore=True,
                ))
            else:
                blocks.append(make_block(
                    b, m, g, mining_cost=-p / m, resource_use=coeffs[b], is_ore=False,
                ))
    elif mapping.economics == "raw":
        cols = {k: mapping.column(k, rows, coeffs) for k in
                ("recovery", "processing_cost", "price", "selling_cost")}
        for b in range(len(rows)):
            blocks.append(make_block(
                b, mass[b], grade[b], recovery=cols["recovery"][b], mining_cost=mining[b],
                processing_cost=cols["processing_cost"][b], price=cols["price"][b],
                selling_cost=cols["selling_cost"][b], resource_use=coeffs[b],
            ))
    else:
        raise ModelError(f"unknown economics mode {mapping.economics!r}")
    return BlockModel(
        blocks=tuple(blocks),
        predecessors=tuple(preds),
        num_periods=params.num_periods,
        discount_rate=params.discount_rate,
        resource_limits=params.limits,
        name=name or params.name,
        resource_names=mapping.resource_names,
        source_profits=params.profits.copy(),
    )


@dataclass
class InstanceDescriptor:
    name: str
    blocks: Path
    prec: Path
    params: Path
    mapping: ColumnMapping


def read_descriptor(path: str | Path) -> InstanceDescriptor:
    path = Path(path)
    cp = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cp.read_file(fh)
    except configparser.Error as exc:
        raise ModelError(f"{path}: {exc}") from None
    if "instance" not in cp:
        raise ModelError(f"{path}: missing [instance] section")
    inst = cp["instance"]
    base = path.parent

    def _file(key: str) -> Path:
        if key not in inst:
            raise ModelError(f"{path}: [instance] lacks '{key}'")
        p = Path(inst[key])
        return p if p.is_absolute() else base / p

    fields = dict(_FIELD_DEFAULTS)
    names: tuple[str, ...] = ()
    if "columns" in cp:
        for key, val in cp["columns"].items():
            if key == "resource_names":
                names = tuple(s.strip() for s in val.split(",") if s.strip())
            elif key in _FIELD_DEFAULTS:
                fields[key] = val
            else:
                raise ModelError(f"{path}: unknown column key {key!r}")
    mapping = ColumnMapping(inst.get("economics", "objective"), fields, names)
    return InstanceDescriptor(
        inst.get("name", path.stem), _file("blocks"), _file("prec"), _file("params"), mapping
    )


def load_instance(descriptor: str | Path) -> BlockModel:
    d = read_descriptor(descriptor)
    return parse_minelib(d.blocks, d.prec, d.params, d.mapping, name=d.name)


def _fmt(v: float) -> str:
    if math.isinf(v):
        raise ValueError("cannot serialise an infinite value")
    return repr(float(v))


def write_minelib(model: BlockModel, outdir: str | Path, name: str | None = None) -> Path:
    """Write ``model`` as MineLib files plus a raw-economics descriptor.

    Returns the descriptor path.  Block rows carry every economic field so the
    model round-trips exactly; coordinates are zero.
    """
    outdir = Path(outdir)
    outdir.mkdir(parents=True, exist_ok=True)
    name = name or model.name
    with open(outdir / f"{name}.blocks", "w") as fh:
        for b in model.blocks:
            cols = [b.mass, b.grade, b.recovery, b.mining_cost, b.processing_cost,
                    b.price, b.selling_cost]
            fh.write(f"{b.id} 0 0 0 " + " ".join(_fmt(c) for c in cols) + "\n")
    with open(outdir / f"{name}.prec", "w") as fh:
        for b, preds in enumerate(model.predecessors):
            fh.write(" ".join(str(v) for v in (b, len(preds), *preds)) + "\n")
    profits = model.values if model.source_profits is None else model.source_profits
    with open(outdir / f"{name}.cpit", "w") as fh:
        fh.write(f"NAME: {name}\nTYPE: CPIT\nNBLOCKS: {model.num_blocks}\n")
        fh.write(f"NPERIODS: {model.num_periods}\n")
        fh.write(f"NRESOURCE_SIDE_CONSTRAINTS: {model.num_resources}\n")
        fh.write(f"DISCOUNT_RATE: {_fmt(model.discount_rate)}\n")
        fh.write("OBJECTIVE_FUNCTION:\n")
        for b in range(model.num_blocks):
            fh.write(f"{b} {_fmt(profits[b])}\n")
        fh.write("RESOURCE_CONSTRAINT_LIMITS:\n")
        for r in range(model.num_resources):
            for t in range(model.num_periods):
                lim = model.resource_limits[r, t]
                if math.isinf(lim):
                    fh.write(f"{r} {t} G 0.0\n")
                else:
                    fh.write(f"{r} {t} L {_fmt(lim)}\n")
        fh.write("RESOURCE_CONSTRAINT_COEFFICIENTS:\n")
        use = model.resource_use
        for b in range(model.num_blocks):
            for r in range(model.num_resources):
                if use[b, r] != 0:
                    fh.write(f"{b} {r} {_fmt(use[b, r])}\n")
        fh.write("EOF\n")
    desc = outdir / f"{name}.ini"
    cols = ["mass", "grade", "recovery", "mining_cost", "processing_cost", "price", "selling_cost"]
    with open(desc, "w") as fh:
        fh.write(f"[instance]\nname = {name}\nblocks = {name}.blocks\nprec = {name}.prec\n")
        fh.write(f"params = {name}.cpit\neconomics = raw\n\n[columns]\n")
        for k, c in enumerate(cols, start=4):
            fh.write(f"{c} = col:{k}\n")
        fh.write("resource_names = " + ", ".join(model.resource_names) + "\n")
    return desc


def with_blocks(model: BlockModel, blocks: Sequence[Block]) -> BlockModel:
    """Copy of ``model`` with a replaced block list (same DAG and limits)."""
    return BlockModel(
        blocks=tuple(blocks),
        predecessors=model.predecessors,
        num_periods=model.num_periods,
        discount_rate=model.discount_rate,
        resource_limits=model.resource_limits,
        name=model.name,
        resource_names=model.resource_names,
    )


def validate_acyclic(num_blocks: int, arcs: Iterable[tuple[int, int]]) -> bool:
    """True when the directed graph ``a -> b`` over ``num_blocks`` nodes is a DAG."""
    succ: list[list[int]] = [[] for _ in range(num_blocks)]
    indeg = [0] * num_blocks
    for a, b in arcs:
        succ[a].append(b)
        indeg[b] += 1
    queue = deque(i for i in range(num_blocks) if indeg[i] == 0)
    seen = 0
    while queue:
        a = queue.popleft()
        seen += 1
        for b in succ[a]:
            indeg[b] -= 1
            if indeg[b] == 0:
                queue.append(b)
    return seen == num_blocks
