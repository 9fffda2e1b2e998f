"""8-bit image container and PNG/PPM loading.

Images are stored as (height, width, channels) uint8 arrays with channels
interleaved, channels in {1, 3}. Lossless sources only: PNG and PPM/PGM.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import EmptyImage


@dataclass(frozen=True)
class PixelImage:
    pixels: np.ndarray  # (H, W, C) uint8

    def __post_init__(self) -> None:
        px = self.pixels
        if px.dtype != np.uint8:
            raise ValueError(f"pixels must be uint8, got {px.dtype}")
        if px.ndim == 2:
            px = px[:, :, None]
        if px.ndim != 3 or px.shape[2] not in (1, 3):
            raise ValueError(f"pixels must be (H, W, 1|3), got shape {px.shape}")
        px = np.ascontiguousarray(px)
        px.flags.writeable = False
        object.__setattr__(self, "pixels", px)

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def channels(self) -> int:
        return self.pixels.shape[2]

    @classmethod
    def from_bytes(cls, data: bytes, width: int, height: int, channels: int) -> "PixelImage":
        """Build from a contiguous row-major, channel-interleaved sample buffer."""
        expected = width * height * channels
        if len(data) != expected:
            raise ValueError(
                f"buffer holds {len(data)} samples, expected {expected} "
                f"({width}x{height}x{channels})"
            )
        arr = np.frombuffer(data, dtype=np.uint8).reshape(height, width, channels)
        return cls(arr.copy())

    def to_bytes(self) -> bytes:
        return self.pixels.tobytes()


def _from_pil(img: Image.Image) -> PixelImage:
    if img.mode != "L":
        img = img.convert("RGB")
    arr = np.asarray(img, dtype=np.uint8)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.shape[0] == 0 or arr.shape[1] == 0:
        raise EmptyImage("image has zero width or height")
    return PixelImage(arr)


def load_image(source: str | Path | bytes) -> PixelImage:
    """Load a PNG or PPM/PGM image from a path or raw file bytes.

    Grayscale stays single-channel; everything else is converted to RGB.
    """
    if isinstance(source, bytes):
        return _from_pil(Image.open(io.BytesIO(source)))
    return _from_pil(Image.open(source))


def save_image(image: PixelImage, path: str | Path) -> None:
    """Write as PNG or PPM/PGM depending on the file extension."""
    arr = image.pixels[:, :, 0] if image.channels == 1 else image.pixels
    Image.fromarray(arr).save(path)
