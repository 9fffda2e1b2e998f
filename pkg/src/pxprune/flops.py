"""Analytic FLOPs estimator for a three-stage vision-language pipeline.

Stages, for an image of N vision patches and T text tokens:

  vision encoder   L_v * [ N * (8*Dv^2 + 4*Dv*Dfv) + 4*N^2*Dv ]
  patch merger     L_m * (N/M^2) * (2*Din^2 + 2*Din*Dl),   Din = M^2*Dv,
                   L_m = 1 + deepstack taps
  language model   L_l * [ N_l*C_l + 4*N_l^2*Dl ],         N_l = N/M^2 + T
                   C_l = 2*Dl*(2*n_q + 2*n_kv)*d_h + 6*Dl*Dfl  (grouped-query
                   attention projections plus a gated MLP)

All arithmetic is exact Python integers, so golden values are reproducible
bit-for-bit and overflow cannot occur. The attention-map term 4*N_l^2*Dl uses
n_q*d_h = Dl and is therefore independent of the key-value head count.

The vision encoder attends within a single image, while the language model
consumes the concatenation of all images in a sample plus the text prompt.
``pipeline_flops`` models that: per-image vision/merger cost, one shared
language-model sequence. Multi-page documents make this distinction huge.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .errors import NotMergeDivisible


@dataclass(frozen=True)
class FlopsArch:
    """Architecture parameters of the three-stage pipeline."""

    vit_layers: int
    vit_hidden: int
    vit_ffn: int
    merge_factor: int          # spatial merge M; M*M patches -> one token
    deepstack_taps: int        # extra mergers fed from intermediate layers
    llm_layers: int
    llm_hidden: int
    llm_ffn: int
    query_heads: int
    kv_heads: int

    def __post_init__(self) -> None:
        for name in ("vit_layers", "vit_hidden", "merge_factor", "llm_layers",
                     "llm_hidden", "query_heads", "kv_heads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.vit_ffn < 0 or self.llm_ffn < 0 or self.deepstack_taps < 0:
            raise ValueError("ffn dims and deepstack taps must be >= 0")
        if self.llm_hidden % self.query_heads != 0:
            raise ValueError("llm_hidden must divide evenly into query heads")

    @property
    def merger_count(self) -> int:
        return 1 + self.deepstack_taps

    @property
    def merger_input_dim(self) -> int:
        return self.merge_factor ** 2 * self.vit_hidden

    @property
    def head_dim(self) -> int:
        return self.llm_hidden // self.query_heads

    @property
    def merge_group(self) -> int:
        return self.merge_factor ** 2

    @property
    def llm_per_token(self) -> int:
        """Per-token linear cost of one decoder layer (projections + MLP)."""
        attn = 2 * self.llm_hidden * (2 * self.query_heads + 2 * self.kv_heads) * self.head_dim
        mlp = 6 * self.llm_hidden * self.llm_ffn
        return attn + mlp


# 2B-scale preset used throughout the golden tests.
QWEN3_VL_2B = FlopsArch(
    vit_layers=24,
    vit_hidden=1024,
    vit_ffn=4096,
    merge_factor=2,
    deepstack_taps=3,
    llm_layers=28,
    llm_hidden=2048,
    llm_ffn=6144,
    query_heads=16,
    kv_heads=8,
)

PRESETS = {"qwen3-vl-2b": QWEN3_VL_2B}


@dataclass(frozen=True)
class FlopsReport:
    vit_flops: int
    merger_flops: int
    llm_flops: int
    llm_seq_len: int
    n_patches: int
    n_text: int

    @property
    def total_flops(self) -> int:
        return self.vit_flops + self.merger_flops + self.llm_flops


def tflops(n: int) -> float:
    return n / 1e12


def _vit_flops(arch: FlopsArch, n: int) -> int:
    linear = n * (8 * arch.vit_hidden ** 2 + 4 * arch.vit_hidden * arch.vit_ffn)
    attention = 4 * n * n * arch.vit_hidden
    return arch.vit_layers * (linear + attention)


def _merger_flops(arch: FlopsArch, n: int) -> int:
    tokens = n // arch.merge_group
    d_in = arch.merger_input_dim
    return arch.merger_count * tokens * (2 * d_in ** 2 + 2 * d_in * arch.llm_hidden)


def _llm_flops(arch: FlopsArch, seq_len: int) -> int:
    linear = seq_len * arch.llm_per_token
    attention = 4 * seq_len * seq_len * arch.llm_hidden
    return arch.llm_layers * (linear + attention)


def _check_patches(arch: FlopsArch, n: int) -> None:
    if n < 1:
        raise ValueError(f"patch count must be >= 1, got {n}")
    if n % arch.merge_group != 0:
        raise NotMergeDivisible(
            f"{n} patches do not split into {arch.merge_factor}x{arch.merge_factor} merge groups"
        )


def flops_total(arch: FlopsArch, n_patches: int, n_text: int = 0) -> FlopsReport:
    """Stage-wise FLOPs for a single image of ``n_patches`` vision patches."""
    _check_patches(arch, n_patches)
    if n_text < 0:
        raise ValueError("text token count must be >= 0")
    seq_len = n_patches // arch.merge_group + n_text
    return FlopsReport(
        vit_flops=_vit_flops(arch, n_patches),
        merger_flops=_merger_flops(arch, n_patches),
        llm_flops=_llm_flops(arch, seq_len),
        llm_seq_len=seq_len,
        n_patches=n_patches,
        n_text=n_text,
    )


def pipeline_flops(arch: FlopsArch, page_patches: Sequence[int], n_text: int = 0) -> FlopsReport:
    """Stage-wise FLOPs for a multi-image sample.

    Vision encoding and merging run per image; the language model runs once
    over all merged vision tokens plus the text prompt.
    """
    if not page_patches:
        raise ValueError("sample must contain at least one image")
    if n_text < 0:
        raise ValueError("text token count must be >= 0")
    for n in page_patches:
        _check_patches(arch, n)
    total_patches = sum(page_patches)
    seq_len = total_patches // arch.merge_group + n_text
    return FlopsReport(
        vit_flops=sum(_vit_flops(arch, n) for n in page_patches),
        merger_flops=sum(_merger_flops(arch, n) for n in page_patches),
        llm_flops=_llm_flops(arch, seq_len),
        llm_seq_len=seq_len,
        n_patches=total_patches,
        n_text=n_text,
    )


@dataclass(frozen=True)
class SavingsReport:
    full: FlopsReport
    pruned: FlopsReport

    @property
    def speedup(self) -> float:
        return self.full.total_flops / self.pruned.total_flops


def savings_report(arch: FlopsArch, n_patches: int, n_retained: int, n_text: int = 0) -> SavingsReport:
    """Full-vs-pruned cost when only ``n_retained`` of ``n_patches`` survive."""
    if n_retained > n_patches:
        raise ValueError(f"retained count {n_retained} exceeds total {n_patches}")
    return SavingsReport(
        full=flops_total(arch, n_patches, n_text),
        pruned=flops_total(arch, n_retained, n_text),
    )


def pipeline_savings(
    arch: FlopsArch,
    page_patches: Sequence[int],
    page_retained: Sequence[int],
    n_text: int = 0,
) -> SavingsReport:
    if len(page_patches) != len(page_retained):
        raise ValueError("page lists must have equal length")
    for full, kept in zip(page_patches, page_retained):
        if kept > full:
            raise ValueError(f"retained count {kept} exceeds page total {full}")
    return SavingsReport(
        full=pipeline_flops(arch, page_patches, n_text),
        pruned=pipeline_flops(arch, page_retained, n_text),
    )


def patch_count(width: int, height: int, block_size: int, merge_factor: int) -> int:
    """Vision-patch count of an image, padding dims up to block multiples.

    One block covers merge_factor^2 patches, so the patch edge is
    block_size / merge_factor.
    """
    if block_size % merge_factor != 0:
        raise ValueError(f"block_size {block_size} must be a multiple of merge factor {merge_factor}")
    if width < 1 or height < 1:
        raise ValueError("image dims must be >= 1")
    p = block_size // merge_factor
    padded_w = -(-width // block_size) * block_size
    padded_h = -(-height // block_size) * block_size
    return (padded_h // p) * (padded_w // p)


_ARCH_KEYS = (
    "vit_layers", "vit_hidden", "vit_ffn", "merge_factor", "deepstack_taps",
    "llm_layers", "llm_hidden", "llm_ffn", "query_heads", "kv_heads",
)


def load_arch(path: str | Path) -> FlopsArch:
    """Read architecture parameters from a JSON file naming every field."""
    raw = json.loads(Path(path).read_text())
    missing = [k for k in _ARCH_KEYS if k not in raw]
    if missing:
        raise ValueError(f"architecture file missing fields: {', '.join(missing)}")
    return FlopsArch(**{k: int(raw[k]) for k in _ARCH_KEYS})


def resolve_arch(name_or_path: str) -> FlopsArch:
    if name_or_path.lower() in PRESETS:
        return PRESETS[name_or_path.lower()]
    return load_arch(name_or_path)
