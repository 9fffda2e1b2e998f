"""Budget-matched selection baselines: random, connected-component, resize.

All masks are reproducible: randomness comes from a PCG64 generator seeded by
the caller, consumed through an explicit Fisher-Yates shuffle, so a given
(input, budget, seed) triple always yields the same mask.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from PIL import Image

from .codec import RetainMask
from .errors import BudgetOutOfRange, BudgetTooSmall
from .grid import BlockGrid
from .image import PixelImage

GRAY = 128  # not used here; see visualize


@dataclass(frozen=True)
class Budget:
    """Per-image retention budget, usually copied from a codec mask."""

    target_retained: int

    def __post_init__(self) -> None:
        if self.target_retained < 1:
            raise BudgetOutOfRange(f"budget must be >= 1, got {self.target_retained}")


def _budget_value(budget) -> int:
    if isinstance(budget, Budget):
        return budget.target_retained
    return int(budget)


def _shuffled(items: list, rng: np.random.Generator) -> list:
    """Fisher-Yates shuffle driven by rng.integers; deterministic per seed."""
    out = list(items)
    for i in range(len(out) - 1, 0, -1):
        j = int(rng.integers(0, i + 1))
        out[i], out[j] = out[j], out[i]
    return out


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def random_mask(rows: int, cols: int, budget, seed: int) -> RetainMask:
    """Uniform sample of exactly ``budget`` blocks, without replacement.

    The anchor is deliberately not forced: this is the pure chance baseline.
    """
    target = _budget_value(budget)
    total = rows * cols
    if not 1 <= target <= total:
        raise BudgetOutOfRange(f"budget {target} outside [1, {total}]")
    picks = _shuffled(list(range(total)), _rng(seed))[:target]
    kept = np.zeros(total, dtype=bool)
    kept[picks] = True
    return RetainMask(kept.reshape(rows, cols))


def connected_components(grid: BlockGrid) -> tuple[np.ndarray, int]:
    """4-connected components over blocks with identical sample content.

    Returns (labels, count) with labels numbered by first row-major
    occurrence. Union-find with path compression; two passes.
    """
    rows, cols = grid.rows, grid.cols
    keys = [[grid.blocks[r, c].tobytes() for c in range(cols)] for r in range(rows)]
    parent = list(range(rows * cols))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(x: int, y: int) -> None:
        rx, ry = find(x), find(y)
        if rx != ry:
            parent[max(rx, ry)] = min(rx, ry)

    for r in range(rows):
        for c in range(cols):
            idx = r * cols + c
            if c > 0 and keys[r][c] == keys[r][c - 1]:
                union(idx, idx - 1)
            if r > 0 and keys[r][c] == keys[r - 1][c]:
                union(idx, idx - cols)

    labels = np.empty((rows, cols), dtype=np.int64)
    relabel: dict[int, int] = {}
    for r in range(rows):
        for c in range(cols):
            root = find(r * cols + c)
            if root not in relabel:
                relabel[root] = len(relabel)
            labels[r, c] = relabel[root]
    return labels, len(relabel)


def _largest_remainder(sizes: list[int], budget: int) -> list[int]:
    """Proportional integer split of ``budget`` across component sizes.

    Guarantees a minimum of one per component (budget >= len(sizes) assumed)
    and never allocates more than a component holds. Ties break toward larger
    components, then lower ids.
    """
    total = sum(sizes)
    base = [budget * s // total for s in sizes]
    remainders = [(budget * s % total, s, -i) for i, s in enumerate(sizes)]
    leftover = budget - sum(base)
    for _, _, neg_i in sorted(remainders, reverse=True)[:leftover]:
        base[-neg_i] += 1
    # repair: every component keeps at least one block
    zeros = [i for i, q in enumerate(base) if q == 0]
    for i in zeros:
        donor = max(range(len(base)), key=lambda j: (base[j], sizes[j], -j))
        base[donor] -= 1
        base[i] += 1
    return base


@dataclass(frozen=True)
class ConnCompAllocation:
    mask: RetainMask
    component_count: int
    budget_below_components: bool


def conncomp_allocate(grid: BlockGrid, budget, seed: int) -> ConnCompAllocation:
    """Budget split across pixel-identical components, random subset within.

    When the budget is smaller than the component count, the largest
    components get one block each until the budget runs out and the result is
    flagged; retained_count still equals the budget exactly.
    """
    target = _budget_value(budget)
    if not 1 <= target <= grid.total_blocks:
        raise BudgetOutOfRange(f"budget {target} outside [1, {grid.total_blocks}]")

    labels, n_comp = connected_components(grid)
    members: list[list[tuple[int, int]]] = [[] for _ in range(n_comp)]
    for r in range(grid.rows):
        for c in range(grid.cols):
            members[labels[r, c]].append((r, c))
    sizes = [len(m) for m in members]

    below = target < n_comp
    if below:
        quotas = [0] * n_comp
        by_size = sorted(range(n_comp), key=lambda i: (-sizes[i], i))
        for i in by_size[:target]:
            quotas[i] = 1
    else:
        quotas = _largest_remainder(sizes, target)

    rng = _rng(seed)
    kept = np.zeros((grid.rows, grid.cols), dtype=bool)
    for comp, quota in enumerate(quotas):
        if quota == 0:
            continue
        for pos in _shuffled(members[comp], rng)[:quota]:
            kept[pos] = True
    return ConnCompAllocation(
        mask=RetainMask(kept), component_count=n_comp, budget_below_components=below
    )


def conncomp_mask(grid: BlockGrid, budget, seed: int) -> RetainMask:
    return conncomp_allocate(grid, budget, seed).mask


def resize_target_dims(width: int, height: int, budget, block_size: int) -> tuple[int, int]:
    """Largest block-multiple dimensions fitting the budget at original aspect.

    Candidates keep the aspect ratio within one block on at least one axis;
    among those with at most ``budget`` blocks, the largest block area wins,
    then the smaller aspect error.
    """
    target = _budget_value(budget)
    if target < 1:
        raise BudgetTooSmall("resize budget cannot fit a single block")
    if width < 1 or height < 1:
        raise ValueError("image dims must be >= 1")
    max_bw = -(-width // block_size)
    max_bh = -(-height // block_size)
    best = None
    for bh in range(1, max_bh + 1):
        for bw in range(1, max_bw + 1):
            if bw * bh > target:
                break
            ideal_bw = bh * width / height
            ideal_bh = bw * height / width
            if abs(bw - ideal_bw) > 1 and abs(bh - ideal_bh) > 1:
                continue
            key = (bw * bh, -abs(bw - ideal_bw))
            if best is None or key > best[0]:
                best = (key, (bw * block_size, bh * block_size))
    if best is None:
        raise BudgetTooSmall(f"no {block_size}-multiple dims fit budget {target}")
    return best[1]


def resize_image(image: PixelImage, width: int, height: int) -> PixelImage:
    """Bilinear resample to the given dimensions."""
    arr = image.pixels[:, :, 0] if image.channels == 1 else image.pixels
    resized = Image.fromarray(arr).resize((width, height), Image.BILINEAR)
    out = np.asarray(resized, dtype=np.uint8)
    if out.ndim == 2:
        out = out[:, :, None]
    return PixelImage(out.copy())
