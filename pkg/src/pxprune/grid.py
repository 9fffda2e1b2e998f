"""Partitioning images into non-overlapping square sample blocks.

A grid is an (R, C) arrangement of block_size x block_size x channels blocks.
Grid dimensions always cover the (possibly padded) image exactly; the
pre-padding image size rides along so reconstruction can crop back.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .config import PadMode
from .errors import DimensionNotDivisible, EmptyImage
from .image import PixelImage


@dataclass(frozen=True)
class BlockGrid:
    blocks: np.ndarray  # (R, C, block_size, block_size, channels) uint8
    source_width: int = field(default=0)
    source_height: int = field(default=0)

    def __post_init__(self) -> None:
        b = self.blocks
        if b.dtype != np.uint8 or b.ndim != 5 or b.shape[2] != b.shape[3]:
            raise ValueError(f"blocks must be (R, C, s, s, ch) uint8, got {b.shape} {b.dtype}")
        if b.shape[4] not in (1, 3):
            raise ValueError(f"channels must be 1 or 3, got {b.shape[4]}")
        if 0 in b.shape:
            raise EmptyImage("grid has no blocks")
        b = np.ascontiguousarray(b)
        b.flags.writeable = False
        object.__setattr__(self, "blocks", b)
        if self.source_width == 0:
            object.__setattr__(self, "source_width", self.cols * self.block_size)
        if self.source_height == 0:
            object.__setattr__(self, "source_height", self.rows * self.block_size)

    @property
    def rows(self) -> int:
        return self.blocks.shape[0]

    @property
    def cols(self) -> int:
        return self.blocks.shape[1]

    @property
    def block_size(self) -> int:
        return self.blocks.shape[2]

    @property
    def channels(self) -> int:
        return self.blocks.shape[4]

    @property
    def total_blocks(self) -> int:
        return self.rows * self.cols

    def block(self, row: int, col: int) -> np.ndarray:
        return self.blocks[row, col]


def partition(image: PixelImage, block_size: int, pad_mode: PadMode = PadMode.REJECT) -> BlockGrid:
    """Split an image into a grid of block_size-square blocks.

    REJECT requires exact divisibility; EDGE_REPLICATE extends the image by
    repeating the nearest edge samples. The split is lossless and
    order-preserving either way.
    """
    if image.width == 0 or image.height == 0:
        raise EmptyImage("cannot partition an empty image")
    if block_size < 1:
        raise ValueError(f"block_size must be >= 1, got {block_size}")

    h, w = image.height, image.width
    pad_h = (-h) % block_size
    pad_w = (-w) % block_size
    pixels = image.pixels
    if pad_h or pad_w:
        if pad_mode is PadMode.REJECT:
            raise DimensionNotDivisible(
                f"{w}x{h} image is not a multiple of block_size {block_size}"
            )
        pixels = np.pad(pixels, ((0, pad_h), (0, pad_w), (0, 0)), mode="edge")

    rows = (h + pad_h) // block_size
    cols = (w + pad_w) // block_size
    ch = image.channels
    blocks = (
        pixels.reshape(rows, block_size, cols, block_size, ch)
        .transpose(0, 2, 1, 3, 4)
        .copy()
    )
    return BlockGrid(blocks, source_width=w, source_height=h)


def assemble(grid: BlockGrid, crop: bool = True) -> PixelImage:
    """Reassemble a grid into pixels, cropping padding back off by default."""
    r, c, s, _, ch = grid.blocks.shape
    pixels = grid.blocks.transpose(0, 2, 1, 3, 4).reshape(r * s, c * s, ch)
    if crop:
        pixels = pixels[: grid.source_height, : grid.source_width]
    return PixelImage(pixels.copy())


def grid_from_blocks(rows_of_blocks: list[list[np.ndarray]]) -> BlockGrid:
    """Convenience constructor from a nested [row][col] list of block arrays."""
    return BlockGrid(np.array(rows_of_blocks, dtype=np.uint8))
