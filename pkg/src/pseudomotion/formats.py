"""Binary clip/mask files and the JSONL dataset manifest.

Clip file (`.pmv`), all integers little-endian:

    magic   4 bytes  b"PMV1"
    u8      format version, always 1
    u8      dtype: 0 = uint8, 1 = float32 (little-endian)
    u16     channels
    u16     frame count T
    u32     height H
    u32     width W
    payload T*H*W*C values, frame-major, row-major, channel-last

uint8 payloads store round(value * 255) with round-half-up; readers return
float32 in [0, 1] either way.

Mask file (`.pmm`):

    magic   4 bytes  b"PMM1"
    u8      format version, always 1
    u16     temporal cells t'
    u16     spatial rows h'
    u16     spatial cols w'
    f32     mask ratio (little-endian)
    payload h'*w' bytes, row-major, 1 = masked

Manifest (`manifest.jsonl`): UTF-8, one JSON object per line.  The first
line is {"config": {...}}; each following line is a clip row with the fixed
key order clip_id, file, mask_file, recipe, mix, stats.
"""

from __future__ import annotations

import json
import struct
from pathlib import Path

import numpy as np

from .errors import PseudoMotionError
from .masking import TubeMask

PMV_MAGIC = b"PMV1"
PMM_MAGIC = b"PMM1"

_PMV_HEADER = struct.Struct("<4sBBHHII")
_PMM_HEADER = struct.Struct("<4sBHHHf")


def quantize_u8(clip: np.ndarray) -> np.ndarray:
    """round(x * 255) with round-half-up."""
    return np.floor(clip.astype(np.float64) * 255.0 + 0.5).astype(np.uint8)


def dequantize_u8(raw: np.ndarray) -> np.ndarray:
    return (raw.astype(np.float32) / np.float32(255.0)).astype(np.float32)


def encode_clip(clip: np.ndarray, dtype: str = "u8") -> bytes:
    """Serialize a (T, H, W, C) float clip to `.pmv` bytes."""
    t, h, w, c = clip.shape
    if dtype == "u8":
        code = 0
        payload = quantize_u8(clip).tobytes()
    elif dtype == "f32":
        code = 1
        payload = np.ascontiguousarray(clip, dtype="<f4").tobytes()
    else:
        raise ValueError(f"dtype must be 'u8' or 'f32', got {dtype!r}")
    return _PMV_HEADER.pack(PMV_MAGIC, 1, code, c, t, h, w) + payload


def decode_clip(blob: bytes) -> np.ndarray:
    """Parse `.pmv` bytes into a float32 clip in [0, 1]."""
    if len(blob) < _PMV_HEADER.size:
        raise PseudoMotionError("clip blob shorter than header")
    magic, version, code, c, t, h, w = _PMV_HEADER.unpack_from(blob)
    if magic != PMV_MAGIC:
        raise PseudoMotionError(f"bad clip magic {magic!r}")
    if version != 1:
        raise PseudoMotionError(f"unsupported clip format version {version}")
    count = t * h * w * c
    payload = blob[_PMV_HEADER.size :]
    if code == 0:
        if len(payload) != count:
            raise PseudoMotionError("clip payload size mismatch")
        raw = np.frombuffer(payload, dtype=np.uint8).reshape(t, h, w, c)
        return dequantize_u8(raw)
    if code == 1:
        if len(payload) != 4 * count:
            raise PseudoMotionError("clip payload size mismatch")
        return np.frombuffer(payload, dtype="<f4").reshape(t, h, w, c).astype(np.float32)
    raise PseudoMotionError(f"unknown clip dtype code {code}")


def write_clip(path, clip: np.ndarray, dtype: str = "u8") -> None:
    Path(path).write_bytes(encode_clip(clip, dtype))


def read_clip(path) -> np.ndarray:
    return decode_clip(Path(path).read_bytes())


def encode_mask(mask: TubeMask) -> bytes:
    h, w = mask.spatial.shape
    payload = mask.spatial.astype(np.uint8).tobytes()
    return _PMM_HEADER.pack(PMM_MAGIC, 1, mask.t_cells, h, w, float(mask.ratio)) + payload


def decode_mask(blob: bytes) -> TubeMask:
    if len(blob) < _PMM_HEADER.size:
        raise PseudoMotionError("mask blob shorter than header")
    magic, version, t_cells, h, w, ratio = _PMM_HEADER.unpack_from(blob)
    if magic != PMM_MAGIC:
        raise PseudoMotionError(f"bad mask magic {magic!r}")
    if version != 1:
        raise PseudoMotionError(f"unsupported mask format version {version}")
    payload = blob[_PMM_HEADER.size :]
    if len(payload) != h * w:
        raise PseudoMotionError("mask payload size mismatch")
    spatial = np.frombuffer(payload, dtype=np.uint8).reshape(h, w).astype(bool)
    return TubeMask(spatial=spatial, ratio=float(ratio), t_cells=t_cells)


def write_mask(path, mask: TubeMask) -> None:
    Path(path).write_bytes(encode_mask(mask))


def read_mask(path) -> TubeMask:
    return decode_mask(Path(path).read_bytes())


def clip_row(clip_id: int, file: str, mask_file: str, recipe: dict, mix, stats: dict) -> dict:
    """Manifest row with the documented fixed key order."""
    return {
        "clip_id": clip_id,
        "file": file,
        "mask_file": mask_file,
        "recipe": recipe,
        "mix": mix,
        "stats": stats,
    }


def write_manifest(path, config: dict, rows) -> None:
    lines = [json.dumps({"config": config})]
    lines.extend(json.dumps(row) for row in rows)
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_manifest(path) -> tuple[dict, list[dict]]:
    text = Path(path).read_text(encoding="utf-8")
    records = [json.loads(line) for line in text.splitlines() if line.strip()]
    if not records or "config" not in records[0]:
        raise PseudoMotionError("manifest must start with a config line")
    return records[0]["config"], records[1:]
