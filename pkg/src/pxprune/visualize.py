"""Mask overlay rendering: kept blocks in original color, omitted grayed out.

Omitted pixels are blended 60% mid-gray (128) and 40% original, rounded half
up; the constant is fixed so golden images stay stable.
"""

from __future__ import annotations

import numpy as np

from .codec import RetainMask
from .errors import ConfigMismatch
from .image import PixelImage

GRAY_LEVEL = 128
GRAY_WEIGHT = 6  # tenths; original gets the remaining 4


def render_overlay(image: PixelImage, mask: RetainMask, block_size: int) -> PixelImage:
    """Apply the keep/omit mask to an image at block granularity."""
    pad_h = mask.rows * block_size - image.height
    pad_w = mask.cols * block_size - image.width
    if pad_h < 0 or pad_w < 0 or pad_h >= block_size or pad_w >= block_size:
        raise ConfigMismatch(
            f"mask {mask.rows}x{mask.cols} at block {block_size} does not cover "
            f"a {image.width}x{image.height} image"
        )
    pixels = image.pixels
    if pad_h or pad_w:
        pixels = np.pad(pixels, ((0, pad_h), (0, pad_w), (0, 0)), mode="edge")

    keep_px = np.repeat(np.repeat(mask.kept, block_size, axis=0), block_size, axis=1)
    blended = (
        GRAY_WEIGHT * GRAY_LEVEL + (10 - GRAY_WEIGHT) * pixels.astype(np.uint16) + 5
    ) // 10
    out = np.where(keep_px[:, :, None], pixels, blended.astype(np.uint8))
    return PixelImage(out[: image.height, : image.width].copy())
