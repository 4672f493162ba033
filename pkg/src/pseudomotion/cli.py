"""Command line interface: generate, analyze, inspect, export-frames, mask."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import formats
from .errors import PseudoMotionError
from .masking import make_patch_grid, sample_tube_mask
from .pipeline import (
    PipelineConfig,
    SourceSpec,
    load_dataset,
    run_analyze,
    run_export_frames,
    run_generate,
)


def _add_generate(sub) -> None:
    p = sub.add_parser("generate", help="generate a pseudo-motion dataset")
    p.add_argument("--config", help="JSON config file; explicit flags override it")
    p.add_argument("--out", help="output directory")
    p.add_argument("--clips", type=int, help="number of clips (default 100)")
    p.add_argument("--frames", type=int, help="frames per clip (default 16)")
    p.add_argument("--size", type=int, help="square frame side in pixels (default 224)")
    p.add_argument("--transforms", help="comma list, e.g. zoom,affine (default)")
    p.add_argument("--weights", help="comma list of selection weights matching --transforms")
    p.add_argument("--mixup", action=argparse.BooleanOptionalAction, default=None,
                   help="frame-wise mixup of two generated clips (default on)")
    p.add_argument("--mixup-alpha", type=float, help="Beta concentration for lambda (default 1.0)")
    p.add_argument("--videomix", action=argparse.BooleanOptionalAction, default=None,
                   help="spatial cut-and-paste mixing instead of mixup (default off)")
    p.add_argument("--mask-ratio", type=float, help="tube mask ratio (default 0.75)")
    p.add_argument("--tubelet", type=int, help="frames per token (default 2)")
    p.add_argument("--patch", type=int, help="pixels per token side (default 16)")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--workers", type=int, help="parallel worker processes (default 1)")
    p.add_argument("--dtype", choices=["u8", "f32"], help="clip storage dtype (default u8)")
    p.add_argument("--source", help="procedural|blobs|perlin|fractal|checker|radial|dir")
    p.add_argument("--source-path", help="image directory for --source dir")
    p.add_argument("--source-count", type=int, help="source pool size (default 64)")
    p.add_argument("--emit-samples", action=argparse.BooleanOptionalAction, default=None,
                   help="also write visible/target token files")
    p.add_argument("--track-stats", action=argparse.BooleanOptionalAction, default=None,
                   help="include trackability in manifest stats (slower)")


def _build_config(args) -> PipelineConfig:
    blob: dict = {}
    if args.config:
        blob = json.loads(Path(args.config).read_text(encoding="utf-8"))
    overrides = {
        "out_dir": args.out,
        "clips": args.clips,
        "frames": args.frames,
        "size": args.size,
        "mixup": args.mixup,
        "mixup_alpha": args.mixup_alpha,
        "videomix": args.videomix,
        "mask_ratio": args.mask_ratio,
        "tubelet": args.tubelet,
        "patch": args.patch,
        "seed": args.seed,
        "workers": args.workers,
        "dtype": args.dtype,
        "emit_samples": args.emit_samples,
        "track_stats": args.track_stats,
    }
    if args.transforms is not None:
        overrides["transforms"] = tuple(t for t in args.transforms.split(",") if t)
    if args.weights is not None:
        overrides["weights"] = tuple(float(w) for w in args.weights.split(","))
    source = dict(blob.get("source", {}))
    if args.source is not None:
        source["mode"] = args.source
    if args.source_path is not None:
        source["path"] = args.source_path
    if args.source_count is not None:
        source["count"] = args.source_count
    if source:
        blob["source"] = source
    for key, value in overrides.items():
        if value is not None:
            blob[key] = value
    if "out_dir" not in blob:
        raise PseudoMotionError("--out (or out_dir in the config file) is required")
    if "source" in blob and isinstance(blob["source"], dict):
        blob["source"] = SourceSpec.from_dict(blob["source"])
    return PipelineConfig.from_dict(blob, out_dir=blob["out_dir"], workers=blob.get("workers", 1))


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="pseudomotion",
        description="Deterministic pseudo-motion video dataset generator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    _add_generate(sub)

    p = sub.add_parser("analyze", help="recompute stats and frame-difference partitions")
    p.add_argument("--data", required=True, help="dataset directory")
    p.add_argument("--track", action="store_true", help="also compute trackability per clip")

    p = sub.add_parser("inspect", help="print dataset config or one clip row")
    p.add_argument("--data", required=True)
    p.add_argument("--clip", type=int, default=None, help="clip id to show")

    p = sub.add_parser("export-frames", help="write one clip's frames as PNG files")
    p.add_argument("--data", required=True)
    p.add_argument("--clip", type=int, required=True)
    p.add_argument("--out", required=True)

    p = sub.add_parser("mask", help="sample a tube mask and write a .pmm file")
    p.add_argument("--out", required=True)
    p.add_argument("--frames", type=int, default=16)
    p.add_argument("--size", type=int, default=224)
    p.add_argument("--tubelet", type=int, default=2)
    p.add_argument("--patch", type=int, default=16)
    p.add_argument("--mask-ratio", type=float, default=0.75)
    p.add_argument("--seed", type=int, default=0)

    args = parser.parse_args(argv)
    try:
        return _dispatch(args)
    except PseudoMotionError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def _dispatch(args) -> int:
    if args.command == "generate":
        config = _build_config(args)
        manifest = run_generate(config)
        print(f"wrote {len(manifest.rows)} clips to {manifest.out_dir}")
        return 0
    if args.command == "analyze":
        report = run_analyze(args.data, with_trackability=args.track)
        summary = report["frame_difference"]
        print(f"clips: {report['clips']}")
        print(f"mean frame difference: {summary['mean']:.6f} "
              f"(p25 {summary['p25']:.6f}, p50 {summary['p50']:.6f}, p75 {summary['p75']:.6f})")
        print(f"report written to {Path(args.data) / 'report.json'}")
        return 0
    if args.command == "inspect":
        config, rows = load_dataset(args.data)
        if args.clip is None:
            print(json.dumps({"config": config, "clips": len(rows)}, indent=2))
        else:
            match = [r for r in rows if r["clip_id"] == args.clip]
            if not match:
                raise PseudoMotionError(f"no clip with id {args.clip}")
            print(json.dumps(match[0], indent=2))
        return 0
    if args.command == "export-frames":
        written = run_export_frames(args.data, args.clip, args.out)
        print(f"wrote {len(written)} frames to {args.out}")
        return 0
    if args.command == "mask":
        grid = make_patch_grid(args.frames, args.size, args.size, 3, args.tubelet, args.patch)
        mask = sample_tube_mask(grid, args.mask_ratio, np.random.default_rng(args.seed))
        formats.write_mask(args.out, mask)
        print(f"masked {mask.masked_cells}/{grid.spatial_cells} spatial cells "
              f"({mask.masked_tokens}/{grid.token_count} tokens) -> {args.out}")
        return 0
    raise PseudoMotionError(f"unknown command {args.command!r}")


if __name__ == "__main__":
    sys.exit(main())
