"""Block-level predictive coding: scan orders, predictors, omission, decode.

Each block is predicted from causal neighbors (already visited in scan order)
and omitted when the prediction is close enough. The encoder keeps a working
state in which omitted positions hold their *predicted* content, so encoder
and decoder always compute identical predictions and per-block error never
compounds. With tau == 0 omission requires exact samplewise equality and the
reconstruction is bit-identical to the input.

Acceptance decisions are made in exact integer arithmetic: a block of n
samples with absolute-difference sum S and maximum D is omitted iff

    MAE:  S * TAU_SCALE <= tau_fixed * 255 * n
    MAX:  D * TAU_SCALE <= tau_fixed * 255

which is the integer form of mean|a-b|/255 <= tau resp. max|a-b|/255 <= tau.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .config import TAU_SCALE, CodecConfig, Metric, PadMode, Predictor
from .errors import ConfigMismatch, MalformedStream, NoNeighborAvailable, ShapeMismatch
from .grid import BlockGrid, partition
from .image import PixelImage


def scan_order(predictor: Predictor, rows: int, cols: int) -> list[tuple[int, int]]:
    """Visit order over the grid; a permutation starting at (0, 0).

    Raster and the 2D predictor scan row-major; serpentine alternates
    direction per row (left-to-right on even rows) so consecutive elements
    stay spatially adjacent across row transitions.
    """
    if rows < 1 or cols < 1:
        raise ValueError(f"grid dims must be >= 1, got {rows}x{cols}")
    if predictor is not Predictor.SERPENTINE:
        return [(r, c) for r in range(rows) for c in range(cols)]
    order = []
    for r in range(rows):
        cs = range(cols) if r % 2 == 0 else range(cols - 1, -1, -1)
        order.extend((r, c) for c in cs)
    return order


@dataclass(frozen=True)
class PredictionContext:
    """Causal neighbors available to a predictor, taken from the working state."""

    left: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    upper_left: Optional[np.ndarray] = None
    predecessor: Optional[np.ndarray] = None


def predict(predictor: Predictor, ctx: PredictionContext) -> np.ndarray:
    """Predicted block content for the current position.

    1D scans copy the immediate predecessor. The 2D rule selects among
    left (A), upper (B), upper-left (C): agreement of B with C suggests the
    row continues (take A); agreement of A with C suggests the column
    continues (take B); otherwise default to A. Grid edges fall back to
    whichever of A/B exists. Neighbor agreement is exact samplewise equality
    regardless of tau; only the acceptance test is threshold-relaxed.
    """
    if predictor in (Predictor.RASTER, Predictor.SERPENTINE):
        if ctx.predecessor is None:
            raise NoNeighborAvailable("1D prediction requires a predecessor")
        return ctx.predecessor
    a, b, c = ctx.left, ctx.upper, ctx.upper_left
    if a is None and b is None:
        raise NoNeighborAvailable("2D prediction requires a left or upper neighbor")
    if a is None:
        return b
    if b is None:
        return a
    if c is not None:
        if np.array_equal(c, b) and not np.array_equal(b, a):
            return a
        if np.array_equal(c, a) and not np.array_equal(a, b):
            return b
    return a


def block_distance(a: np.ndarray, b: np.ndarray, metric: Metric) -> float:
    """Normalized distance in [0, 1] between two blocks of equal shape."""
    if a.shape != b.shape:
        raise ShapeMismatch(f"block shapes differ: {a.shape} vs {b.shape}")
    diff = np.abs(a.astype(np.int16) - b.astype(np.int16))
    if metric is Metric.MAX:
        return int(diff.max()) / 255.0
    return int(diff.sum(dtype=np.int64)) / (255.0 * diff.size)


def _accepts(original: np.ndarray, predicted: np.ndarray, config: CodecConfig) -> bool:
    """Integer-exact omission test; tau == 0 degenerates to equality."""
    if config.tau_fixed == 0:
        return np.array_equal(original, predicted)
    diff = np.abs(original.astype(np.int16) - predicted.astype(np.int16))
    if config.metric is Metric.MAX:
        return int(diff.max()) * TAU_SCALE <= config.tau_fixed * 255
    return int(diff.sum(dtype=np.int64)) * TAU_SCALE <= config.tau_fixed * 255 * diff.size


@dataclass(frozen=True)
class RetainMask:
    """Per-block keep/omit decisions on the (R, C) grid."""

    kept: np.ndarray  # (R, C) bool

    def __post_init__(self) -> None:
        k = self.kept
        if k.ndim != 2 or k.dtype != np.bool_:
            raise ValueError(f"kept must be a 2D bool array, got {k.shape} {k.dtype}")
        k = np.ascontiguousarray(k)
        k.flags.writeable = False
        object.__setattr__(self, "kept", k)

    @property
    def rows(self) -> int:
        return self.kept.shape[0]

    @property
    def cols(self) -> int:
        return self.kept.shape[1]

    @property
    def total_blocks(self) -> int:
        return self.kept.size

    @property
    def retained_count(self) -> int:
        return int(self.kept.sum())

    @property
    def retain_ratio(self) -> float:
        return self.retained_count / self.total_blocks


def retained_positions(mask: RetainMask, predictor: Predictor) -> list[tuple[int, int]]:
    """Grid coordinates of retained blocks, in scan order."""
    return [pos for pos in scan_order(predictor, mask.rows, mask.cols) if mask.kept[pos]]


@dataclass(frozen=True)
class CompressedImage:
    """Retained blocks with their original grid coordinates plus codec metadata.

    ``width``/``height`` are the pre-padding image dimensions; the grid covers
    the padded image. Entries appear in scan order, anchor first.
    """

    config: CodecConfig
    rows: int
    cols: int
    block_size: int
    channels: int
    width: int
    height: int
    entries: tuple[tuple[int, int, np.ndarray], ...]

    @property
    def retained_count(self) -> int:
        return len(self.entries)

    @property
    def total_blocks(self) -> int:
        return self.rows * self.cols


def _context(
    state: np.ndarray, order: list[tuple[int, int]], index: int, predictor: Predictor
) -> PredictionContext:
    r, c = order[index]
    if predictor is Predictor.PRED2D:
        return PredictionContext(
            left=state[r, c - 1] if c > 0 else None,
            upper=state[r - 1, c] if r > 0 else None,
            upper_left=state[r - 1, c - 1] if r > 0 and c > 0 else None,
        )
    pr, pc = order[index - 1]
    return PredictionContext(predecessor=state[pr, pc])


def _scan_encode(
    grid: BlockGrid, config: CodecConfig
) -> tuple[list[tuple[int, int, np.ndarray]], np.ndarray, np.ndarray]:
    """Run the encoding scan; returns (entries, kept, working state)."""
    order = scan_order(config.predictor, grid.rows, grid.cols)
    state = grid.blocks.copy()
    kept = np.zeros((grid.rows, grid.cols), dtype=bool)
    entries: list[tuple[int, int, np.ndarray]] = []
    for i, (r, c) in enumerate(order):
        original = grid.blocks[r, c]
        if i > 0:
            predicted = predict(config.predictor, _context(state, order, i, config.predictor))
            if _accepts(original, predicted, config):
                state[r, c] = predicted
                continue
        kept[r, c] = True
        stored = original.copy()
        stored.flags.writeable = False
        entries.append((r, c, stored))
    return entries, kept, state


def compress(grid: BlockGrid, config: CodecConfig) -> tuple[CompressedImage, RetainMask]:
    """Encode a grid: anchor always retained, later blocks omitted when the
    prediction is accepted. Deterministic; the anchor entry comes first."""
    if config.block_size != grid.block_size:
        raise ValueError(
            f"config block_size {config.block_size} != grid block_size {grid.block_size}"
        )
    entries, kept, _ = _scan_encode(grid, config)
    comp = CompressedImage(
        config=config,
        rows=grid.rows,
        cols=grid.cols,
        block_size=grid.block_size,
        channels=grid.channels,
        width=grid.source_width,
        height=grid.source_height,
        entries=tuple(entries),
    )
    return comp, RetainMask(kept)


def encoder_state(grid: BlockGrid, config: CodecConfig) -> BlockGrid:
    """The encoder's final working grid; equals the decoder's output exactly."""
    _, _, state = _scan_encode(grid, config)
    return BlockGrid(state, source_width=grid.source_width, source_height=grid.source_height)


def _validate_compressed(comp: CompressedImage, order: list[tuple[int, int]]) -> None:
    if comp.rows < 1 or comp.cols < 1:
        raise MalformedStream(f"grid dims must be >= 1, got {comp.rows}x{comp.cols}")
    if not comp.entries:
        raise MalformedStream("stream has no entries (anchor block missing)")
    if comp.entries[0][0] != 0 or comp.entries[0][1] != 0:
        raise MalformedStream("first entry must be the (0, 0) anchor")
    index_of = {pos: i for i, pos in enumerate(order)}
    shape = (comp.block_size, comp.block_size, comp.channels)
    last = -1
    for r, c, block in comp.entries:
        if not (0 <= r < comp.rows and 0 <= c < comp.cols):
            raise MalformedStream(f"entry coordinate ({r}, {c}) outside {comp.rows}x{comp.cols} grid")
        idx = index_of[(r, c)]
        if idx <= last:
            raise MalformedStream(f"entry ({r}, {c}) out of scan order or duplicated")
        last = idx
        if block.shape != shape:
            raise ConfigMismatch(f"entry block shape {block.shape} != declared {shape}")


def decompress(comp: CompressedImage) -> BlockGrid:
    """Rebuild the full grid: stored blocks verbatim, omitted blocks from the
    replayed prediction rule. Validates stream structure first."""
    order = scan_order(comp.config.predictor, comp.rows, comp.cols)
    _validate_compressed(comp, order)
    stored = {(r, c): block for r, c, block in comp.entries}
    state = np.zeros(
        (comp.rows, comp.cols, comp.block_size, comp.block_size, comp.channels), dtype=np.uint8
    )
    for i, (r, c) in enumerate(order):
        block = stored.get((r, c))
        if block is not None:
            state[r, c] = block
        else:
            state[r, c] = predict(comp.config.predictor, _context(state, order, i, comp.config.predictor))
    return BlockGrid(state, source_width=comp.width, source_height=comp.height)


def compute_retain_mask(image: PixelImage, config: CodecConfig) -> RetainMask:
    """Partition + compress, returning only the keep/omit mask.

    This is the integration surface for encoder-side preprocessing: the mask
    plus original grid coordinates of kept blocks is all a downstream token
    pipeline needs.
    """
    grid = partition(image, config.block_size, config.pad_mode)
    _, mask = compress(grid, config)
    return mask
