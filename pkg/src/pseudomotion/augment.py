"""Video-level augmentation: frame-wise mixup and spatially cut videomix."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ShapeMismatchError


@dataclass(frozen=True)
class MixupParams:
    lam: float
    alpha: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.lam <= 1.0):
            raise ValueError("lambda must be in [0, 1]")
        if self.alpha <= 0.0:
            raise ValueError("alpha must be > 0")


@dataclass(frozen=True)
class VideoMixBox:
    """Pixel rectangle (x0, y0, w, h) shared by every frame."""

    x0: int
    y0: int
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("box must have positive area")
        if self.x0 < 0 or self.y0 < 0:
            raise ValueError("box origin must be nonnegative")


def sample_mixup_lambda(alpha: float, rng: np.random.Generator) -> float:
    """Draw the mixing weight from Beta(alpha, alpha); alpha=1 is uniform."""
    if alpha <= 0.0:
        raise ValueError("alpha must be > 0")
    return float(rng.beta(alpha, alpha))


def sample_videomix_box(height: int, width: int, rng: np.random.Generator) -> VideoMixBox:
    """Uniform box between a quarter and half of each side, fully in bounds."""
    bw = int(rng.integers(max(width // 4, 1), max(width // 2, 2)))
    bh = int(rng.integers(max(height // 4, 1), max(height // 2, 2)))
    x0 = int(rng.integers(0, width - bw + 1))
    y0 = int(rng.integers(0, height - bh + 1))
    return VideoMixBox(x0=x0, y0=y0, width=bw, height=bh)


def _check_same_shape(a: np.ndarray, b: np.ndarray) -> None:
    if a.shape != b.shape:
        raise ShapeMismatchError(f"clip shapes differ: {a.shape} vs {b.shape}")


def mixup_clips(a: np.ndarray, b: np.ndarray, lam: float) -> np.ndarray:
    """Frame-wise convex combination lam * a + (1 - lam) * b."""
    _check_same_shape(a, b)
    if not (0.0 <= lam <= 1.0):
        raise ValueError("lambda must be in [0, 1]")
    if lam == 1.0:
        return a.copy()
    if lam == 0.0:
        return b.copy()
    out = np.float32(lam) * a + np.float32(1.0 - lam) * b
    # the float32 weights can overshoot 1 by one ulp, so re-clamp
    return np.clip(out, 0.0, 1.0).astype(np.float32)


def videomix_clips(a: np.ndarray, b: np.ndarray, box: VideoMixBox) -> np.ndarray:
    """Replace the box region of every frame of `a` with pixels from `b`."""
    _check_same_shape(a, b)
    h, w = a.shape[1:3]
    if box.x0 + box.width > w or box.y0 + box.height > h:
        raise ValueError(f"box {box} escapes {w}x{h} frames")
    out = a.copy()
    out[:, box.y0 : box.y0 + box.height, box.x0 : box.x0 + box.width] = b[
        :, box.y0 : box.y0 + box.height, box.x0 : box.x0 + box.width
    ]
    return out
