"""Clip diagnostics: frame-difference statistics and patch trackability.

Frame difference quantifies motion magnitude as the mean absolute pixel
change between consecutive frames.  Trackability scores how well
fixed-grid patches in one frame can be matched by a small integer
displacement in the next frame, which is the property that makes a clip
useful for masked video modeling.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class ClipStats:
    mean_frame_diff: float
    gap_diffs: tuple[float, ...]
    trackability: Optional[float] = None

    def __post_init__(self):
        if self.mean_frame_diff < 0.0:
            raise ValueError("mean_frame_diff must be nonnegative")
        if self.trackability is not None and not (0.0 <= self.trackability <= 1.0):
            raise ValueError("trackability must be in [0, 1]")


def gap_differences(clip: np.ndarray) -> np.ndarray:
    """Mean absolute pixel difference for each consecutive frame pair."""
    if clip.shape[0] < 2:
        raise ValueError("clip needs at least 2 frames")
    diffs = np.abs(clip[1:].astype(np.float32) - clip[:-1].astype(np.float32))
    return diffs.mean(axis=(1, 2, 3), dtype=np.float64)


def frame_difference(clip: np.ndarray) -> float:
    """Mean over gaps of the mean absolute pixel difference."""
    return float(gap_differences(clip).mean())


def partition_by_difference(scores) -> tuple[list[int], list[int], list[int]]:
    """Split clip indices into (top 50%, middle 25th-75th, bottom 50%) by score.

    Ranks are assigned by ascending (score, original index), so ties break
    toward the earlier index.  The bottom half takes the floor(n/2) lowest
    ranks, the top half the remaining ceil(n/2), and the middle band spans
    ranks [floor(n/4), floor(3n/4)).  Each returned list is sorted by
    original index.
    """
    values = [float(s) for s in scores]
    n = len(values)
    if n < 4:
        raise ValueError("need at least 4 scores to partition")
    order = sorted(range(n), key=lambda i: (values[i], i))
    bottom = sorted(order[: n // 2])
    top = sorted(order[n // 2 :])
    middle = sorted(order[n // 4 : (3 * n) // 4])
    return top, middle, bottom


def trackability(
    clip: np.ndarray,
    patch: int = 16,
    radius: int = 8,
    tau: float = 0.005,
) -> float:
    """Fraction of (patch, gap) pairs matchable within `radius` at MSD <= tau.

    For every non-overlapping patch of frame i, the minimum mean squared
    difference is searched over all integer displacements within the radius
    whose target patch stays inside frame i+1 (the zero displacement is
    always available).  Sums run in float64.
    """
    t, h, w = clip.shape[:3]
    if h % patch != 0 or w % patch != 0:
        raise ValueError(f"patch {patch} must divide frame sides {h}x{w}")
    if radius < 0:
        raise ValueError("radius must be >= 0")
    if t < 2:
        raise ValueError("clip needs at least 2 frames")

    min_msd = min_patch_msd(clip, patch, radius)
    return float((min_msd <= tau).mean())


def min_patch_msd(clip: np.ndarray, patch: int, radius: int) -> np.ndarray:
    """Minimum per-patch MSD against the next frame, for every gap.

    Returns an array of shape (T-1, h_cells, w_cells) in float64.
    """
    t, h, w, c = clip.shape
    hc = h // patch
    wc = w // patch
    frames = clip.astype(np.float64)
    area = float(patch * patch * c)
    out = np.full((t - 1, hc, wc), np.inf, dtype=np.float64)

    for g in range(t - 1):
        cur = frames[g]
        nxt = frames[g + 1]
        best = out[g]
        for dy in range(-radius, radius + 1):
            for dx in range(-radius, radius + 1):
                ys = max(0, -dy)
                ye = min(h, h - dy)
                xs = max(0, -dx)
                xe = min(w, w - dx)
                # restrict to whole patches whose displaced copy stays in frame
                row0 = (ys + patch - 1) // patch
                row1 = ye // patch
                col0 = (xs + patch - 1) // patch
                col1 = xe // patch
                if row0 >= row1 or col0 >= col1:
                    continue
                a = cur[row0 * patch : row1 * patch, col0 * patch : col1 * patch]
                b = nxt[
                    row0 * patch + dy : row1 * patch + dy,
                    col0 * patch + dx : col1 * patch + dx,
                ]
                diff = a - b
                sq = (diff * diff).reshape(row1 - row0, patch, col1 - col0, patch, c)
                msd = sq.sum(axis=(1, 3, 4)) / area
                region = best[row0:row1, col0:col1]
                np.minimum(region, msd, out=region)
    return out


def clip_stats(clip: np.ndarray, with_trackability: bool = False, **track_kwargs) -> ClipStats:
    gaps = gap_differences(clip)
    track = trackability(clip, **track_kwargs) if with_trackability else None
    return ClipStats(
        mean_frame_diff=float(gaps.mean()),
        gap_diffs=tuple(float(v) for v in gaps),
        trackability=track,
    )
