"""Patch-level predictive-coding compression for vision-encoder pipelines.

Blocks that a causal spatial predictor reproduces (exactly, or within a
distance threshold) are dropped before any encoder computation; retained
blocks keep their grid coordinates so position-aware models downstream are
unaffected. Includes a redundancy analyzer, budget-matched selection
baselines, and an analytic FLOPs model for the resulting savings.
"""

__version__ = "0.1.0"

from .analysis import (
    CorpusReport,
    ImageStats,
    analyze_corpus,
    corpus_duplicate_ratio,
    dataset_retain_ratio,
    unique_block_count,
)
from .baselines import (
    Budget,
    ConnCompAllocation,
    conncomp_allocate,
    conncomp_mask,
    connected_components,
    random_mask,
    resize_image,
    resize_target_dims,
)
from .codec import (
    CompressedImage,
    PredictionContext,
    RetainMask,
    block_distance,
    compress,
    compute_retain_mask,
    decompress,
    encoder_state,
    predict,
    retained_positions,
    scan_order,
)
from .config import CodecConfig, Metric, PadMode, Predictor
from .container import load_container, read_container, save_container, write_container
from .errors import (
    AllImagesFailed,
    BudgetOutOfRange,
    BudgetTooSmall,
    ConfigMismatch,
    DimensionNotDivisible,
    EmptyCorpus,
    EmptyImage,
    MalformedStream,
    NoNeighborAvailable,
    NotMergeDivisible,
    PxpruneError,
    ShapeMismatch,
    UnsupportedVersion,
)
from .flops import (
    PRESETS,
    QWEN3_VL_2B,
    FlopsArch,
    FlopsReport,
    SavingsReport,
    flops_total,
    load_arch,
    patch_count,
    pipeline_flops,
    pipeline_savings,
    savings_report,
    tflops,
)
from .grid import BlockGrid, assemble, grid_from_blocks, partition
from .image import PixelImage, load_image, save_image
from .visualize import render_overlay

__all__ = [name for name in dir() if not name.startswith("_")]
