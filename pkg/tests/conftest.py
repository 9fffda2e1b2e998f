"""Shared grid/image builders for the test suite."""

import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

from pxprune import BlockGrid, PixelImage


def const_block(value, block_size=2, channels=1):
    return np.full((block_size, block_size, channels), value, dtype=np.uint8)


def grid_from_labels(labels, block_size=2, channels=1, palette=None):
    """Build a grid where equal labels mean identical constant blocks."""
    labels = np.asarray(labels)
    rows, cols = labels.shape
    blocks = np.zeros((rows, cols, block_size, block_size, channels), dtype=np.uint8)
    for r in range(rows):
        for c in range(cols):
            value = palette[labels[r, c]] if palette else int(labels[r, c])
            blocks[r, c] = const_block(value, block_size, channels)
    return BlockGrid(blocks)


def random_grid(rng, rows, cols, block_size, channels, style="mixed"):
    """Randomized grid content: uniform, striped, noise, or a mix."""
    shape = (rows, cols, block_size, block_size, channels)
    if style == "uniform":
        blocks = np.full(shape, int(rng.integers(0, 256)), dtype=np.uint8)
    elif style == "striped":
        # constant per row or per column, from a small palette
        axis_vals = rng.integers(0, 256, size=(rows if rng.integers(2) else cols,))
        blocks = np.zeros(shape, dtype=np.uint8)
        for r in range(rows):
            for c in range(cols):
                v = axis_vals[r % len(axis_vals)] if len(axis_vals) == rows else axis_vals[c % len(axis_vals)]
                blocks[r, c] = v
    elif style == "noise":
        blocks = rng.integers(0, 256, size=shape, dtype=np.uint8)
    else:  # mixed: a few shared contents plus occasional noise blocks
        palette = [
            rng.integers(0, 256, size=(block_size, block_size, channels), dtype=np.uint8)
            for _ in range(int(rng.integers(1, 4)))
        ]
        blocks = np.zeros(shape, dtype=np.uint8)
        for r in range(rows):
            for c in range(cols):
                if rng.random() < 0.25:
                    blocks[r, c] = rng.integers(0, 256, size=(block_size, block_size, channels), dtype=np.uint8)
                else:
                    blocks[r, c] = palette[int(rng.integers(len(palette)))]
    return BlockGrid(blocks)


def near_uniform_grid(rng, rows, cols, block_size, channels, spread):
    """Blocks that differ from a base level by small random offsets."""
    base = int(rng.integers(40, 216))
    offsets = rng.integers(-spread, spread + 1, size=(rows, cols))
    blocks = np.zeros((rows, cols, block_size, block_size, channels), dtype=np.uint8)
    for r in range(rows):
        for c in range(cols):
            jitter = rng.integers(-2, 3, size=(block_size, block_size, channels))
            blocks[r, c] = np.clip(base + int(offsets[r, c]) + jitter, 0, 255).astype(np.uint8)
    return BlockGrid(blocks)


def grid_as_tuples(grid):
    """Flatten grid blocks into the oracle's {(r, c): tuple} form."""
    return {
        (r, c): tuple(int(v) for v in grid.blocks[r, c].reshape(-1))
        for r in range(grid.rows)
        for c in range(grid.cols)
    }


def image_from_array(arr):
    return PixelImage(np.asarray(arr, dtype=np.uint8))


@pytest.fixture
def rng():
    return np.random.default_rng(20260810)
