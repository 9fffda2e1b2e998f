"""Command-line frontend.

Subcommands: compress, decompress, mask, visualize, analyze, flops, baseline.
Codec flags are shared; a JSON config file can supply any of them, with
explicit flags winning. Reports are written atomically (temp file + rename).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from . import __version__
from .analysis import analyze_corpus, report_csv, report_json
from .baselines import (
    conncomp_allocate,
    random_mask,
    resize_image,
    resize_target_dims,
)
from .codec import (
    RetainMask,
    compress,
    compute_retain_mask,
    decompress,
    retained_positions,
)
from .config import (
    CodecConfig,
    Metric,
    PadMode,
    Predictor,
    parse_metric,
    parse_pad_mode,
    parse_predictor,
)
from .container import load_container, save_container
from .errors import PxpruneError
from .flops import (
    PRESETS,
    SavingsReport,
    patch_count,
    pipeline_savings,
    resolve_arch,
    tflops,
)
from .grid import assemble, partition
from .image import PixelImage, load_image, save_image
from .visualize import render_overlay

_DEFAULTS = {
    "predictor": "pred2d",
    "metric": "max",
    "tau": 0.0,
    "block_size": 32,
    "pad": "reject",
    "seed": 0,
    "format": "json",
}


def _add_codec_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--predictor", choices=["raster", "serpentine", "pred2d"])
    parser.add_argument("--metric", choices=["mae", "max"])
    parser.add_argument("--tau", type=float)
    parser.add_argument("--block-size", type=int, dest="block_size")
    parser.add_argument("--pad", choices=["reject", "edge"])
    parser.add_argument("--seed", type=int)
    parser.add_argument("--format", choices=["json", "csv"])
    parser.add_argument("--strict", action="store_true", default=None)
    parser.add_argument("--config", help="JSON file with flag defaults; flags win")


def _effective(args: argparse.Namespace) -> dict:
    """Merge defaults, config file, and explicit flags (flags win)."""
    merged = dict(_DEFAULTS, strict=False)
    if getattr(args, "config", None):
        merged.update(json.loads(Path(args.config).read_text()))
    for key in list(merged):
        value = getattr(args, key, None)
        if value is not None:
            merged[key] = value
    return merged


def _codec_config(opts: dict) -> CodecConfig:
    return CodecConfig(
        predictor=parse_predictor(str(opts["predictor"])),
        metric=parse_metric(str(opts["metric"])),
        tau=float(opts["tau"]),
        block_size=int(opts["block_size"]),
        pad_mode=parse_pad_mode(str(opts["pad"])),
    )


def _atomic_write(path: Path, text: str) -> None:
    fd, tmp = tempfile.mkstemp(dir=path.parent or Path("."), prefix=f".{path.name}.")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def _load_input_image(path: str) -> PixelImage:
    if path == "-":
        return load_image(sys.stdin.buffer.read())
    return load_image(path)


def mask_payload(mask: RetainMask, config: CodecConfig, image: PixelImage) -> dict:
    """Wire format consumed by external bindings; keep stable."""
    positions = retained_positions(mask, config.predictor)
    return {
        "version": __version__,
        "image": {"width": image.width, "height": image.height, "channels": image.channels},
        "grid": {"rows": mask.rows, "cols": mask.cols, "block_size": config.block_size},
        "config": {
            "predictor": config.predictor.name.lower(),
            "metric": config.metric.name.lower(),
            "tau": config.tau,
            "block_size": config.block_size,
            "pad": config.pad_mode.value,
        },
        "kept": mask.kept.tolist(),
        "positions": [[r, c] for r, c in positions],
        "retained_count": mask.retained_count,
        "total_blocks": mask.total_blocks,
        "retain_ratio": mask.retain_ratio,
    }


def _emit(text: str, output: str | None) -> None:
    if output:
        _atomic_write(Path(output), text)
    else:
        sys.stdout.write(text)


def _mask_from_file(path: str) -> RetainMask:
    import numpy as np

    payload = json.loads(Path(path).read_text())
    return RetainMask(np.array(payload["kept"], dtype=bool))


def cmd_compress(args: argparse.Namespace) -> int:
    opts = _effective(args)
    config = _codec_config(opts)
    image = _load_input_image(args.input)
    grid = partition(image, config.block_size, config.pad_mode)
    comp, mask = compress(grid, config)
    save_container(comp, args.output)
    pct = 100.0 * mask.retain_ratio
    print(f"retained {mask.retained_count}/{mask.total_blocks} ({pct:.1f}%)")
    return 0


def cmd_decompress(args: argparse.Namespace) -> int:
    comp = load_container(args.input)
    save_image(assemble(decompress(comp)), args.output)
    print(f"wrote {comp.width}x{comp.height} image to {args.output}")
    return 0


def cmd_mask(args: argparse.Namespace) -> int:
    opts = _effective(args)
    config = _codec_config(opts)
    image = _load_input_image(args.input)
    mask = compute_retain_mask(image, config)
    payload = mask_payload(mask, config, image)
    if opts["format"] == "csv":
        lines = ["row,col"] + [f"{r},{c}" for r, c in payload["positions"]]
        _emit("\n".join(lines) + "\n", args.output)
    else:
        _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return 0


def cmd_visualize(args: argparse.Namespace) -> int:
    opts = _effective(args)
    config = _codec_config(opts)
    image = _load_input_image(args.input)
    if args.mask_file:
        mask = _mask_from_file(args.mask_file)
    else:
        mask = compute_retain_mask(image, config)
    save_image(render_overlay(image, mask, config.block_size), args.output)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    opts = _effective(args)
    config = _codec_config(opts)
    report = analyze_corpus(args.corpus, config)
    text = report_csv(report) if opts["format"] == "csv" else report_json(report)
    _emit(text, args.output)
    if report.failures:
        print(f"warning: {len(report.failures)} image(s) failed to decode", file=sys.stderr)
        if opts["strict"]:
            return 1
    return 0


def _parse_dims(text: str) -> tuple[int, int]:
    w, _, h = text.lower().partition("x")
    return int(w), int(h)


def _print_savings(report: SavingsReport) -> None:
    rows = [
        ("vision encoder", report.full.vit_flops, report.pruned.vit_flops),
        ("patch merger", report.full.merger_flops, report.pruned.merger_flops),
        ("language model", report.full.llm_flops, report.pruned.llm_flops),
        ("total", report.full.total_flops, report.pruned.total_flops),
    ]
    print(f"{'stage':<16}{'full TFLOPs':>14}{'pruned TFLOPs':>16}{'speedup':>10}")
    for name, full, pruned in rows:
        print(f"{name:<16}{tflops(full):>14.3f}{tflops(pruned):>16.3f}{full / pruned:>9.2f}x")
    print(
        f"tokens: {report.full.n_patches} -> {report.pruned.n_patches} patches, "
        f"llm seq {report.full.llm_seq_len} -> {report.pruned.llm_seq_len}"
    )


def cmd_flops(args: argparse.Namespace) -> int:
    arch = resolve_arch(args.arch)
    if args.n_patches is not None:
        n = args.n_patches
    elif args.dims is not None:
        w, h = _parse_dims(args.dims)
        n = patch_count(w, h, args.flops_block_size, arch.merge_factor)
    else:
        print("error: one of --n-patches or --dims is required", file=sys.stderr)
        return 2
    if args.n_retained is not None:
        n_s = args.n_retained
    else:
        group = arch.merge_group
        n_s = max(group, round(args.retain * n / group) * group)
    pages = [n] * args.pages
    pages_kept = [n_s] * args.pages
    report = pipeline_savings(arch, pages, pages_kept, args.text_tokens)
    _print_savings(report)
    return 0


def cmd_baseline(args: argparse.Namespace) -> int:
    opts = _effective(args)
    config = _codec_config(opts)
    image = _load_input_image(args.input)
    grid = partition(image, config.block_size, config.pad_mode)

    if args.budget_from is None:
        budget = compute_retain_mask(image, config).retained_count
    else:
        try:
            budget = int(args.budget_from)
        except ValueError:
            payload = json.loads(Path(args.budget_from).read_text())
            budget = int(payload["retained_count"])

    seed = int(opts["seed"])
    if args.method == "random":
        mask = random_mask(grid.rows, grid.cols, budget, seed)
    elif args.method == "conncomp":
        alloc = conncomp_allocate(grid, budget, seed)
        if alloc.budget_below_components:
            print(
                f"warning: budget {budget} below component count {alloc.component_count}",
                file=sys.stderr,
            )
        mask = alloc.mask
    else:  # resize
        new_w, new_h = resize_target_dims(image.width, image.height, budget, config.block_size)
        print(f"resize target: {new_w}x{new_h}")
        if args.output:
            save_image(resize_image(image, new_w, new_h), args.output)
        return 0

    payload = mask_payload(mask, config, image)
    _emit(json.dumps(payload, indent=2) + "\n", args.output)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pxprune",
        description="Patch-level predictive-coding compression for vision pipelines",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compress", help="encode an image into a .pxpr container")
    p.add_argument("input", help="PNG/PPM path, or - for stdin")
    p.add_argument("output")
    _add_codec_flags(p)
    p.set_defaults(func=cmd_compress)

    p = sub.add_parser("decompress", help="decode a .pxpr container to an image")
    p.add_argument("input")
    p.add_argument("output")
    p.set_defaults(func=cmd_decompress)

    p = sub.add_parser("mask", help="compute the keep/omit mask for an image")
    p.add_argument("input", help="PNG/PPM path, or - for stdin")
    p.add_argument("-o", "--output")
    _add_codec_flags(p)
    p.set_defaults(func=cmd_mask)

    p = sub.add_parser("visualize", help="gray out omitted blocks")
    p.add_argument("input", help="PNG/PPM path, or - for stdin")
    p.add_argument("output")
    p.add_argument("--mask-file", help="use an externally computed mask JSON")
    _add_codec_flags(p)
    p.set_defaults(func=cmd_visualize)

    p = sub.add_parser("analyze", help="redundancy/retention report over a corpus directory")
    p.add_argument("corpus")
    p.add_argument("-o", "--output")
    _add_codec_flags(p)
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("flops", help="stage-wise FLOPs and pruning savings")
    p.add_argument("--arch", default="qwen3-vl-2b",
                   help=f"preset ({', '.join(PRESETS)}) or JSON file")
    p.add_argument("--n-patches", type=int, dest="n_patches")
    p.add_argument("--dims", help="image dims WxH (patch count derived)")
    p.add_argument("--block-size", type=int, default=32, dest="flops_block_size")
    p.add_argument("--retain", type=float, default=1.0, help="retained fraction")
    p.add_argument("--n-retained", type=int, dest="n_retained")
    p.add_argument("--text-tokens", type=int, default=0, dest="text_tokens")
    p.add_argument("--pages", type=int, default=1,
                   help="replicate the image this many times in one sample")
    p.set_defaults(func=cmd_flops)

    p = sub.add_parser("baseline", help="budget-matched baseline masks")
    p.add_argument("input", help="PNG/PPM path, or - for stdin")
    p.add_argument("--method", choices=["random", "conncomp", "resize"], required=True)
    p.add_argument("--budget-from", dest="budget_from",
                   help="mask JSON path or integer; default: codec mask of the input")
    p.add_argument("-o", "--output")
    _add_codec_flags(p)
    p.set_defaults(func=cmd_baseline)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PxpruneError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
