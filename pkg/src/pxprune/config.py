"""Codec configuration: predictor choice, scan metric, threshold, block size."""

from __future__ import annotations

import enum
from dataclasses import dataclass

# Thresholds live on a fixed-point grid so that acceptance decisions can be
# made in exact integer arithmetic and survive container round-trips bit-exact.
TAU_SCALE = 10000


class Predictor(enum.IntEnum):
    """Scan/prediction strategy. Values double as container wire codes."""

    RASTER = 0
    SERPENTINE = 1
    PRED2D = 2


class Metric(enum.IntEnum):
    """Block distance metric, normalized to [0, 1]. Values are wire codes."""

    MAE = 0
    MAX = 1


class PadMode(enum.Enum):
    """Policy for images whose dimensions are not block multiples."""

    REJECT = "reject"
    EDGE_REPLICATE = "edge"


@dataclass(frozen=True)
class CodecConfig:
    """Compression parameters.

    ``tau`` is quantized to multiples of 1/TAU_SCALE on construction; the
    container stores it as a u16 in those units, so quantizing up front keeps
    in-memory and serialized configs identical. ``tau == 0`` means strict
    samplewise equality and makes the metric irrelevant.
    """

    predictor: Predictor = Predictor.PRED2D
    metric: Metric = Metric.MAX
    tau: float = 0.0
    block_size: int = 32
    pad_mode: PadMode = PadMode.REJECT

    def __post_init__(self) -> None:
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must be in [0, 1], got {self.tau}")
        if self.block_size < 1:
            raise ValueError(f"block_size must be >= 1, got {self.block_size}")
        object.__setattr__(self, "tau", round(self.tau * TAU_SCALE) / TAU_SCALE)

    @property
    def tau_fixed(self) -> int:
        """Threshold in 1/TAU_SCALE units (exact integer)."""
        return round(self.tau * TAU_SCALE)


def parse_predictor(name: str) -> Predictor:
    try:
        return Predictor[name.replace("-", "").upper()]
    except KeyError:
        raise ValueError(f"unknown predictor {name!r}") from None


def parse_metric(name: str) -> Metric:
    try:
        return Metric[name.upper()]
    except KeyError:
        raise ValueError(f"unknown metric {name!r}") from None


def parse_pad_mode(name: str) -> PadMode:
    for mode in PadMode:
        if mode.value == name.lower():
            return mode
    raise ValueError(f"unknown pad mode {name!r}")
