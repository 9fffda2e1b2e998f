"""Corpus-level redundancy statistics and retention reporting.

Two statistics matter here and they are not the same thing:

* retain ratio  -- what the causal scan actually keeps, summed over the
  corpus: sum(retained_i) / sum(total_i). Sum-based on purpose; a mean of
  per-image ratios would overweight low-resolution images.
* duplicate ratio -- 1 - sum(unique_i) / sum(total_i), where a block counts
  as unique when its exact content appears only once in its image. This is a
  global, order-free dedup statistic and upper-bounds what any scan-order
  method could hope to drop.
"""

from __future__ import annotations

import csv
import io
import json
from collections import Counter
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

from .codec import compress
from .config import CodecConfig, PadMode
from .errors import AllImagesFailed, EmptyCorpus
from .grid import BlockGrid, partition
from .image import load_image


def unique_block_count(grid: BlockGrid) -> int:
    """Number of blocks whose exact samplewise content occurs once in the grid.

    Keys are the full block bytes, so equal hashes cannot conflate distinct
    contents.
    """
    counts = Counter(
        grid.blocks[r, c].tobytes() for r in range(grid.rows) for c in range(grid.cols)
    )
    return sum(1 for n in counts.values() if n == 1)


@dataclass(frozen=True)
class ImageStats:
    image_id: str
    width: int
    height: int
    total_blocks: int
    unique_blocks: int
    retained_blocks: int

    def __post_init__(self) -> None:
        # A fully uniform image has zero unique blocks, so the lower bound is 0.
        if not 0 <= self.unique_blocks <= self.total_blocks:
            raise ValueError("unique_blocks out of range")
        if not 1 <= self.retained_blocks <= self.total_blocks:
            raise ValueError("retained_blocks out of range")

    @property
    def retain_ratio(self) -> float:
        return self.retained_blocks / self.total_blocks

    @property
    def duplicate_ratio(self) -> float:
        return 1.0 - self.unique_blocks / self.total_blocks


def dataset_retain_ratio(stats: Sequence[ImageStats]) -> float:
    """Sum-based corpus retention: sum(retained) / sum(total)."""
    if not stats:
        raise EmptyCorpus("retain ratio over zero images")
    return sum(s.retained_blocks for s in stats) / sum(s.total_blocks for s in stats)


def corpus_duplicate_ratio(stats: Sequence[ImageStats]) -> float:
    """Corpus fraction of non-unique blocks: 1 - sum(unique) / sum(total)."""
    if not stats:
        raise EmptyCorpus("duplicate ratio over zero images")
    return 1.0 - sum(s.unique_blocks for s in stats) / sum(s.total_blocks for s in stats)


@dataclass(frozen=True)
class CorpusReport:
    config: CodecConfig
    images: tuple[ImageStats, ...]
    failures: tuple[tuple[str, str], ...]  # (image_id, error message)

    @property
    def dataset_retain_ratio(self) -> float:
        return dataset_retain_ratio(self.images)

    @property
    def duplicate_ratio(self) -> float:
        return corpus_duplicate_ratio(self.images)

    @property
    def mean_width(self) -> float:
        return sum(s.width for s in self.images) / len(self.images)

    @property
    def mean_height(self) -> float:
        return sum(s.height for s in self.images) / len(self.images)


def analyze_image(image_id: str, image, config: CodecConfig, pad_mode: PadMode) -> ImageStats:
    grid = partition(image, config.block_size, pad_mode)
    _, mask = compress(grid, config)
    return ImageStats(
        image_id=image_id,
        width=image.width,
        height=image.height,
        total_blocks=grid.total_blocks,
        unique_blocks=unique_block_count(grid),
        retained_blocks=mask.retained_count,
    )


def _iter_sources(source) -> list[tuple[str, Path]]:
    path = Path(source)
    if path.is_dir():
        files = sorted(
            p for p in path.rglob("*") if p.suffix.lower() in (".png", ".ppm", ".pgm")
        )
        return [(str(p.relative_to(path)), p) for p in files]
    raise NotADirectoryError(f"{source} is not a directory")


def analyze_corpus(
    source,
    config: CodecConfig,
    pad_mode: PadMode = PadMode.EDGE_REPLICATE,
) -> CorpusReport:
    """Run partition, compress, and block dedup over every image in a corpus.

    ``source`` is a directory (scanned recursively, lexicographic order) or an
    iterable of (image_id, path) pairs. Undecodable images are recorded as
    failures and skipped; padding defaults to edge replication because corpus
    images rarely arrive as exact block multiples.
    """
    if isinstance(source, (str, Path)):
        pairs = _iter_sources(source)
    else:
        pairs = [(str(i), Path(p)) for i, p in source]

    images: list[ImageStats] = []
    failures: list[tuple[str, str]] = []
    for image_id, path in pairs:
        try:
            image = load_image(path)
            images.append(analyze_image(image_id, image, config, pad_mode))
        except Exception as exc:  # record and keep going
            failures.append((image_id, str(exc)))
    if not images:
        raise AllImagesFailed(
            f"no decodable images among {len(pairs)} candidates" if pairs else "corpus is empty"
        )
    return CorpusReport(config=config, images=tuple(images), failures=tuple(failures))


def report_to_dict(report: CorpusReport) -> dict:
    return {
        "config": {
            "predictor": report.config.predictor.name.lower(),
            "metric": report.config.metric.name.lower(),
            "tau": report.config.tau,
            "block_size": report.config.block_size,
        },
        "corpus": {
            "n_images": len(report.images),
            "n_failed": len(report.failures),
            "dataset_retain_ratio": report.dataset_retain_ratio,
            "duplicate_ratio": report.duplicate_ratio,
            "mean_width": report.mean_width,
            "mean_height": report.mean_height,
        },
        "images": [
            {
                "id": s.image_id,
                "width": s.width,
                "height": s.height,
                "N": s.total_blocks,
                "U": s.unique_blocks,
                "S": s.retained_blocks,
            }
            for s in report.images
        ],
    }


def report_json(report: CorpusReport) -> str:
    return json.dumps(report_to_dict(report), indent=2) + "\n"


def report_csv(report: CorpusReport) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["id", "width", "height", "N", "U", "S", "retain_ratio", "duplicate_ratio"])
    for s in report.images:
        writer.writerow(
            [s.image_id, s.width, s.height, s.total_blocks, s.unique_blocks, s.retained_blocks,
             f"{s.retain_ratio:.6f}", f"{s.duplicate_ratio:.6f}"]
        )
    return buf.getvalue()
