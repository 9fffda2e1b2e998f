"""Bit-exact binary container for compressed images.

Layout (all multi-byte fields little-endian):

    magic            4s   "PXPR"
    version          u8   currently 1; unknown versions are rejected
    predictor        u8   0=raster, 1=serpentine, 2=pred2d
    metric           u8   0=mae, 1=max
    tau              u16  threshold in 1/10000 units
    block_size       u16
    channels         u8
    width, height    u32  pre-padding image dimensions
    rows, cols       u16  grid dimensions
    retained_count   u32
    entries          retained_count x (row u16, col u16, raw block samples)
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

from .codec import CompressedImage
from .config import TAU_SCALE, CodecConfig, Metric, PadMode, Predictor
from .errors import MalformedStream, UnsupportedVersion

MAGIC = b"PXPR"
VERSION = 1

_HEADER_FMT = "<4sBBBHHBIIHHI"
_HEADER_SIZE = struct.calcsize(_HEADER_FMT)  # 28 bytes
_ENTRY_HEAD_FMT = "<HH"
_ENTRY_HEAD_SIZE = struct.calcsize(_ENTRY_HEAD_FMT)


def write_container(comp: CompressedImage) -> bytes:
    if comp.rows > 0xFFFF or comp.cols > 0xFFFF:
        raise ValueError(f"grid {comp.rows}x{comp.cols} exceeds container limits")
    header = struct.pack(
        _HEADER_FMT,
        MAGIC,
        VERSION,
        int(comp.config.predictor),
        int(comp.config.metric),
        comp.config.tau_fixed,
        comp.block_size,
        comp.channels,
        comp.width,
        comp.height,
        comp.rows,
        comp.cols,
        comp.retained_count,
    )
    parts = [header]
    for r, c, block in comp.entries:
        parts.append(struct.pack(_ENTRY_HEAD_FMT, r, c))
        parts.append(block.tobytes())
    return b"".join(parts)


def read_container(data: bytes, pad_mode: PadMode = PadMode.REJECT) -> CompressedImage:
    """Parse container bytes back into a CompressedImage.

    ``pad_mode`` is not serialized (it only matters before partitioning) and
    is restored from the argument.
    """
    if len(data) < _HEADER_SIZE:
        raise MalformedStream(f"container truncated: {len(data)} bytes < {_HEADER_SIZE}-byte header")
    (
        magic,
        version,
        predictor,
        metric,
        tau_fixed,
        block_size,
        channels,
        width,
        height,
        rows,
        cols,
        retained_count,
    ) = struct.unpack_from(_HEADER_FMT, data, 0)
    if magic != MAGIC:
        raise MalformedStream(f"bad magic {magic!r}, expected {MAGIC!r}")
    if version != VERSION:
        raise UnsupportedVersion(f"container version {version} not supported (expected {VERSION})")
    try:
        config = CodecConfig(
            predictor=Predictor(predictor),
            metric=Metric(metric),
            tau=tau_fixed / TAU_SCALE,
            block_size=block_size,
            pad_mode=pad_mode,
        )
    except ValueError as exc:
        raise MalformedStream(f"invalid header field: {exc}") from None
    if channels not in (1, 3):
        raise MalformedStream(f"invalid channel count {channels}")

    block_bytes = block_size * block_size * channels
    entry_size = _ENTRY_HEAD_SIZE + block_bytes
    expected = _HEADER_SIZE + retained_count * entry_size
    if len(data) != expected:
        raise MalformedStream(
            f"container payload is {len(data)} bytes, expected {expected} "
            f"for {retained_count} entries"
        )

    entries = []
    offset = _HEADER_SIZE
    for _ in range(retained_count):
        r, c = struct.unpack_from(_ENTRY_HEAD_FMT, data, offset)
        offset += _ENTRY_HEAD_SIZE
        block = np.frombuffer(data, dtype=np.uint8, count=block_bytes, offset=offset).reshape(
            block_size, block_size, channels
        )
        offset += block_bytes
        block = block.copy()
        block.flags.writeable = False
        entries.append((r, c, block))

    return CompressedImage(
        config=config,
        rows=rows,
        cols=cols,
        block_size=block_size,
        channels=channels,
        width=width,
        height=height,
        entries=tuple(entries),
    )


def save_container(comp: CompressedImage, path: str | Path) -> None:
    Path(path).write_bytes(write_container(comp))


def load_container(path: str | Path, pad_mode: PadMode = PadMode.REJECT) -> CompressedImage:
    return read_container(Path(path).read_bytes(), pad_mode=pad_mode)
