"""End-to-end dataset generation: seeding, parallel execution, serialization.

Every random choice in a run is derived from the master seed through
`derive_clip_seed`, a published SplitMix64 recipe, so a dataset is a pure
function of its config: re-running with any worker count reproduces the
same bytes.  Per-clip work is independent, which makes parallel generation
embarrassingly simple.

Seed allocation for master seed m:

    clip i         derive_clip_seed(m, 2*i)
    mask i         derive_clip_seed(m, 2*i + 1)
    source j       derive_clip_seed(m ^ SOURCE_SALT, j)
"""

from __future__ import annotations

import io
import json
import os
import shutil
import struct
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

import numpy as np
from PIL import Image as PILImage

from . import formats
from .analysis import clip_stats, frame_difference, partition_by_difference
from .augment import mixup_clips, sample_mixup_lambda, sample_videomix_box, videomix_clips, VideoMixBox
from .clips import (
    ClipRecipe,
    TransformSet,
    make_transform_set,
    ranges_from_dict,
    ranges_to_dict,
    replay,
    sample_clip,
)
from .errors import PseudoMotionError
from .masking import apply_mask, make_patch_grid, patchify, sample_tube_mask
from .sources import (
    PerlinSpec,
    gen_fractal_ifs,
    gen_pattern,
    gen_perlin,
    load_image_dir,
    random_ifs,
)
from .transforms import ParamRanges, TransformKind

MASK64 = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15
SOURCE_SALT = 0x736F75726365A5C3

TRANSFORM_ALIASES = {
    "identity": TransformKind.IDENTITY,
    "slide": TransformKind.SLIDING_WINDOW,
    "sliding": TransformKind.SLIDING_WINDOW,
    "sliding_window": TransformKind.SLIDING_WINDOW,
    "zoom": TransformKind.ZOOM_IN_OUT,
    "zoom_in_out": TransformKind.ZOOM_IN_OUT,
    "fade": TransformKind.FADE_IN_OUT,
    "fade_in_out": TransformKind.FADE_IN_OUT,
    "affine": TransformKind.AFFINE,
    "perspective": TransformKind.PERSPECTIVE,
    "jitter": TransformKind.COLOR_JITTER,
    "color_jitter": TransformKind.COLOR_JITTER,
    "cutmix": TransformKind.CUTMIX,
}

SOURCE_MODES = ("procedural", "blobs", "perlin", "fractal", "checker", "radial", "dir")


def derive_clip_seed(master_seed: int, clip_index: int) -> int:
    """One SplitMix64 step over (master_seed XOR clip_index * golden ratio).

    Published recipe, fixed forever: derive_clip_seed(0, 0) ==
    0xE220A8397B1DCDAF == 16294208416658607535.
    """
    x = (master_seed ^ ((clip_index * _GOLDEN) & MASK64)) & MASK64
    x = (x + _GOLDEN) & MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & MASK64
    return x ^ (x >> 31)


def resolve_transform(name: str) -> TransformKind:
    key = name.strip().lower()
    if key not in TRANSFORM_ALIASES:
        raise ValueError(f"unknown transform {name!r}; known: {sorted(TRANSFORM_ALIASES)}")
    return TRANSFORM_ALIASES[key]


@dataclass(frozen=True)
class SourceSpec:
    """Where source images come from: a directory or a procedural pool."""

    mode: str = "procedural"
    path: Optional[str] = None
    count: int = 64

    def __post_init__(self):
        if self.mode not in SOURCE_MODES:
            raise ValueError(f"source mode must be one of {SOURCE_MODES}")
        if self.mode == "dir" and not self.path:
            raise ValueError("source mode 'dir' requires a path")
        if self.count < 1:
            raise ValueError("source count must be >= 1")

    def to_dict(self) -> dict:
        return {"mode": self.mode, "path": self.path, "count": self.count}

    @classmethod
    def from_dict(cls, blob: dict) -> "SourceSpec":
        return cls(
            mode=blob.get("mode", "procedural"),
            path=blob.get("path"),
            count=int(blob.get("count", 64)),
        )


@dataclass
class PipelineConfig:
    out_dir: str = "dataset"
    clips: int = 100
    frames: int = 16
    size: int = 224
    transforms: tuple[str, ...] = ("zoom_in_out", "affine")
    weights: Optional[tuple[float, ...]] = None
    ranges: ParamRanges = field(default_factory=ParamRanges)
    source: SourceSpec = field(default_factory=SourceSpec)
    mixup: bool = True
    mixup_alpha: float = 1.0
    videomix: bool = False
    mask_ratio: float = 0.75
    tubelet: int = 2
    patch: int = 16
    seed: int = 0
    workers: int = 1
    dtype: str = "u8"
    emit_samples: bool = False
    track_stats: bool = False

    def __post_init__(self):
        if self.clips < 1:
            raise ValueError("clips must be >= 1")
        if self.frames < 2:
            raise ValueError("frames must be >= 2")
        if self.mixup and self.videomix:
            raise ValueError("choose at most one of mixup / videomix")
        if self.dtype not in ("u8", "f32"):
            raise ValueError("dtype must be 'u8' or 'f32'")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        self.transforms = tuple(resolve_transform(t).value for t in self.transforms)

    def transform_set(self) -> TransformSet:
        kinds = tuple(TransformKind(t) for t in self.transforms)
        return make_transform_set(kinds, self.weights)

    def snapshot(self) -> dict:
        """Dataset-identity config: excludes execution details (out_dir, workers)."""
        return {
            "clips": self.clips,
            "frames": self.frames,
            "size": self.size,
            "transforms": list(self.transforms),
            "weights": None if self.weights is None else list(self.weights),
            "ranges": ranges_to_dict(self.ranges),
            "source": self.source.to_dict(),
            "mixup": self.mixup,
            "mixup_alpha": self.mixup_alpha,
            "videomix": self.videomix,
            "mask_ratio": self.mask_ratio,
            "tubelet": self.tubelet,
            "patch": self.patch,
            "seed": self.seed,
            "dtype": self.dtype,
            "emit_samples": self.emit_samples,
            "track_stats": self.track_stats,
            "frame_difference": "mean absolute pixel difference between consecutive frames",
        }

    @classmethod
    def from_dict(cls, blob: dict, out_dir: Optional[str] = None, workers: int = 1) -> "PipelineConfig":
        kwargs = dict(blob)
        kwargs.pop("frame_difference", None)
        if "ranges" in kwargs and isinstance(kwargs["ranges"], dict):
            kwargs["ranges"] = ranges_from_dict(kwargs["ranges"])
        if "source" in kwargs and isinstance(kwargs["source"], dict):
            kwargs["source"] = SourceSpec.from_dict(kwargs["source"])
        if "transforms" in kwargs:
            kwargs["transforms"] = tuple(kwargs["transforms"])
        if kwargs.get("weights") is not None:
            kwargs["weights"] = tuple(kwargs["weights"])
        if out_dir is not None:
            kwargs["out_dir"] = out_dir
        kwargs.setdefault("workers", workers)
        return cls(**kwargs)


# ---------------------------------------------------------------------------
# Source pools
# ---------------------------------------------------------------------------

def build_sources(config: PipelineConfig) -> list[np.ndarray]:
    """Materialize the source image pool for a run, deterministically."""
    spec = config.source
    if spec.mode == "dir":
        seed = derive_clip_seed(config.seed ^ SOURCE_SALT, 0)
        return load_image_dir(spec.path, spec.count, config.size, seed)
    images = []
    cycle = ("blobs", "perlin", "fractal")
    for j in range(spec.count):
        seed = derive_clip_seed(config.seed ^ SOURCE_SALT, j)
        mode = cycle[j % len(cycle)] if spec.mode == "procedural" else spec.mode
        images.append(_procedural_image(mode, config.size, seed))
    return images


def _procedural_image(mode: str, size: int, seed: int) -> np.ndarray:
    if mode == "blobs":
        return gen_pattern("random-blobs", size, seed)
    if mode == "checker":
        return gen_pattern("checker", size, seed)
    if mode == "radial":
        return gen_pattern("radial-gradient", size, seed)
    if mode == "perlin":
        cell = max(size / 7.0, 2.0)
        return gen_perlin(PerlinSpec(cell_size=cell, octaves=4, persistence=0.5, seed=seed), size)
    if mode == "fractal":
        system = random_ifs(np.random.default_rng(seed))
        return gen_fractal_ifs(system, iterations=60_000, size=size, seed=seed)
    raise ValueError(f"unknown procedural mode {mode!r}")


# ---------------------------------------------------------------------------
# Per-clip generation (runs in worker processes)
# ---------------------------------------------------------------------------

_WORKER: dict = {}


def _worker_init(config: PipelineConfig, sources: list[np.ndarray]) -> None:
    _WORKER["config"] = config
    _WORKER["sources"] = sources
    _WORKER["tset"] = config.transform_set()
    _WORKER["grid"] = make_patch_grid(
        config.frames, config.size, config.size, 3, config.tubelet, config.patch
    )


def _build_one(index: int) -> tuple[int, bytes, bytes, Optional[bytes], dict]:
    config: PipelineConfig = _WORKER["config"]
    sources = _WORKER["sources"]
    tset: TransformSet = _WORKER["tset"]
    grid = _WORKER["grid"]

    clip_seed = derive_clip_seed(config.seed, 2 * index)
    mask_seed = derive_clip_seed(config.seed, 2 * index + 1)
    rng = np.random.default_rng(clip_seed)

    clip, recipe = sample_clip(sources, tset, config.frames, config.ranges, rng)
    mix = None
    if config.mixup:
        partner, partner_recipe = sample_clip(sources, tset, config.frames, config.ranges, rng)
        lam = sample_mixup_lambda(config.mixup_alpha, rng)
        clip = mixup_clips(clip, partner, lam)
        mix = {
            "mode": "mixup",
            "lam": lam,
            "alpha": config.mixup_alpha,
            "partner": partner_recipe.to_dict(),
        }
    elif config.videomix:
        partner, partner_recipe = sample_clip(sources, tset, config.frames, config.ranges, rng)
        box = sample_videomix_box(config.size, config.size, rng)
        clip = videomix_clips(clip, partner, box)
        mix = {
            "mode": "videomix",
            "box": [box.x0, box.y0, box.width, box.height],
            "partner": partner_recipe.to_dict(),
        }

    clip_bytes = formats.encode_clip(clip, config.dtype)
    stored = formats.decode_clip(clip_bytes)
    stats = clip_stats(stored, with_trackability=config.track_stats, patch=config.patch)
    mask = sample_tube_mask(grid, config.mask_ratio, np.random.default_rng(mask_seed))
    mask_bytes = formats.encode_mask(mask)

    sample_bytes = None
    if config.emit_samples:
        tokens = patchify(stored, grid)
        sample = apply_mask(tokens, mask, grid, normalize=True)
        sample_bytes = _encode_sample(sample.visible, sample.targets)

    row = formats.clip_row(
        clip_id=index,
        file=f"clip_{index:05d}.pmv",
        mask_file=f"mask_{index:05d}.pmm",
        recipe=recipe.to_dict(),
        mix=mix,
        stats={
            "mean_frame_diff": stats.mean_frame_diff,
            "gap_diffs": list(stats.gap_diffs),
            "trackability": stats.trackability,
        },
    )
    return index, clip_bytes, mask_bytes, sample_bytes, row


def _encode_sample(visible: np.ndarray, targets: np.ndarray) -> bytes:
    """Two float32 token matrices as concatenated npy blobs behind a tiny index."""
    buf_v = io.BytesIO()
    np.save(buf_v, visible.astype(np.float32))
    buf_t = io.BytesIO()
    np.save(buf_t, targets.astype(np.float32))
    head = struct.pack("<4sII", b"PMS1", len(buf_v.getvalue()), len(buf_t.getvalue()))
    return head + buf_v.getvalue() + buf_t.getvalue()


def decode_sample(blob: bytes) -> tuple[np.ndarray, np.ndarray]:
    magic, la, lb = struct.unpack_from("<4sII", blob)
    if magic != b"PMS1":
        raise PseudoMotionError(f"bad sample magic {magic!r}")
    off = struct.calcsize("<4sII")
    visible = np.load(io.BytesIO(blob[off : off + la]))
    targets = np.load(io.BytesIO(blob[off + la : off + la + lb]))
    return visible, targets


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

@dataclass
class Manifest:
    config: dict
    rows: list[dict]
    out_dir: Path


def run_generate(config: PipelineConfig) -> Manifest:
    """Generate the full dataset described by `config`, all-or-nothing.

    Files are produced in a temporary sibling directory and moved into place
    only when every clip succeeded, so a failed run leaves no partial
    dataset behind.
    """
    out = Path(config.out_dir)
    if out.exists() and any(out.iterdir()):
        raise PseudoMotionError(f"output directory {out} is not empty")
    sources = build_sources(config)
    tmp = out.parent / (out.name + ".building")
    if tmp.exists():
        shutil.rmtree(tmp)
    tmp.mkdir(parents=True)
    if config.emit_samples:
        (tmp / "samples").mkdir()

    rows: dict[int, dict] = {}
    try:
        if config.workers == 1:
            _worker_init(config, sources)
            for i in range(config.clips):
                _write_one(tmp, config, _build_one(i), rows)
        else:
            with ProcessPoolExecutor(
                max_workers=config.workers,
                initializer=_worker_init,
                initargs=(config, sources),
            ) as pool:
                futures = [pool.submit(_build_one, i) for i in range(config.clips)]
                for fut in as_completed(futures):
                    _write_one(tmp, config, fut.result(), rows)
        ordered = [rows[i] for i in range(config.clips)]
        formats.write_manifest(tmp / "manifest.jsonl", config.snapshot(), ordered)
    except Exception:
        shutil.rmtree(tmp, ignore_errors=True)
        raise
    if out.exists():
        out.rmdir()
    os.replace(tmp, out)
    return Manifest(config=config.snapshot(), rows=[rows[i] for i in range(config.clips)], out_dir=out)


def _write_one(tmp: Path, config: PipelineConfig, result, rows: dict) -> None:
    index, clip_bytes, mask_bytes, sample_bytes, row = result
    (tmp / row["file"]).write_bytes(clip_bytes)
    (tmp / row["mask_file"]).write_bytes(mask_bytes)
    if sample_bytes is not None:
        (tmp / "samples" / f"sample_{index:05d}.pms").write_bytes(sample_bytes)
        row["sample_file"] = f"samples/sample_{index:05d}.pms"
    rows[index] = row


def load_dataset(dataset_dir) -> tuple[dict, list[dict]]:
    root = Path(dataset_dir)
    manifest = root / "manifest.jsonl"
    if not manifest.is_file():
        raise PseudoMotionError(f"no manifest.jsonl under {root}")
    return formats.read_manifest(manifest)


def rebuild_sources_from_config(config_blob: dict) -> list[np.ndarray]:
    config = PipelineConfig.from_dict(dict(config_blob), out_dir="unused")
    return build_sources(config)


def replay_row(row: dict, sources: list[np.ndarray]) -> np.ndarray:
    """Regenerate the final (possibly mixed) clip for one manifest row."""
    base = replay(ClipRecipe.from_dict(row["recipe"]), sources)
    mix = row.get("mix")
    if not mix:
        return base
    partner = replay(ClipRecipe.from_dict(mix["partner"]), sources)
    if mix["mode"] == "mixup":
        return mixup_clips(base, partner, float(mix["lam"]))
    if mix["mode"] == "videomix":
        x0, y0, bw, bh = mix["box"]
        return videomix_clips(base, partner, VideoMixBox(x0=x0, y0=y0, width=bw, height=bh))
    raise PseudoMotionError(f"unknown mix mode {mix['mode']!r}")


def run_analyze(dataset_dir, with_trackability: bool = False) -> dict:
    """Recompute per-clip stats from the stored files and build a report.

    The report is written to report.json in the dataset directory with a
    fixed key order, so repeated runs produce identical bytes.
    """
    root = Path(dataset_dir)
    config, rows = load_dataset(root)
    per_clip = []
    diffs = []
    for row in rows:
        path = root / row["file"]
        try:
            clip = formats.read_clip(path)
            stats = clip_stats(clip, with_trackability=with_trackability, patch=config.get("patch", 16))
        except Exception as exc:
            raise PseudoMotionError(f"clip {row['clip_id']} ({row['file']}) unreadable: {exc}") from exc
        diffs.append(stats.mean_frame_diff)
        entry = {"clip_id": row["clip_id"], "mean_frame_diff": stats.mean_frame_diff}
        if with_trackability:
            entry["trackability"] = stats.trackability
        per_clip.append(entry)

    arr = np.asarray(diffs, dtype=np.float64)
    ids = [row["clip_id"] for row in rows]
    if len(diffs) >= 4:
        top, mid, bottom = partition_by_difference(diffs)
        partitions = {
            "top50": [ids[i] for i in top],
            "mid50": [ids[i] for i in mid],
            "bottom50": [ids[i] for i in bottom],
        }
    else:
        partitions = None
    report = {
        "clips": len(rows),
        "frame_difference": {
            "definition": "mean absolute pixel difference between consecutive frames",
            "mean": float(arr.mean()),
            "min": float(arr.min()),
            "p25": float(np.percentile(arr, 25)),
            "p50": float(np.percentile(arr, 50)),
            "p75": float(np.percentile(arr, 75)),
            "max": float(arr.max()),
        },
        "partitions": partitions,
        "per_clip": per_clip,
    }
    (root / "report.json").write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
    return report


def run_export_frames(dataset_dir, clip_id: int, out_dir) -> list[Path]:
    """Write each frame of one stored clip as a numbered PNG."""
    root = Path(dataset_dir)
    _, rows = load_dataset(root)
    match = [row for row in rows if row["clip_id"] == clip_id]
    if not match:
        raise PseudoMotionError(f"no clip with id {clip_id} in {root}")
    clip = formats.read_clip(root / match[0]["file"])
    dest = Path(out_dir)
    dest.mkdir(parents=True, exist_ok=True)
    written = []
    for i, frame in enumerate(clip):
        raw = formats.quantize_u8(frame)
        if raw.shape[2] == 1:
            raw = raw[:, :, 0]
        path = dest / f"frame_{i:03d}.png"
        PILImage.fromarray(raw).save(path)
        written.append(path)
    return written
