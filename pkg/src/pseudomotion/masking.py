"""Token geometry, tube masks, and reconstruction targets for masked video modeling.

Clips are tokenized into (tubelet x patch x patch) pixel cubes.  A tube mask
picks spatial cells once and hides them at every temporal index, so masked
content can never be copied from another frame at the same location.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DegenerateRatioError, GeometryError, ShapeMismatchError

NORMALIZE_EPS = 1e-6


@dataclass(frozen=True)
class PatchGrid:
    """Token geometry for clips of shape (T, H, W, C)."""

    num_frames: int
    height: int
    width: int
    channels: int
    tubelet: int = 2
    patch: int = 16

    def __post_init__(self):
        if self.num_frames % self.tubelet != 0:
            raise GeometryError(f"frames {self.num_frames} not divisible by tubelet {self.tubelet}")
        if self.height % self.patch != 0 or self.width % self.patch != 0:
            raise GeometryError(
                f"frame {self.height}x{self.width} not divisible by patch {self.patch}"
            )

    @property
    def t_cells(self) -> int:
        return self.num_frames // self.tubelet

    @property
    def h_cells(self) -> int:
        return self.height // self.patch

    @property
    def w_cells(self) -> int:
        return self.width // self.patch

    @property
    def spatial_cells(self) -> int:
        return self.h_cells * self.w_cells

    @property
    def token_count(self) -> int:
        return self.t_cells * self.spatial_cells

    @property
    def token_dim(self) -> int:
        return self.tubelet * self.patch * self.patch * self.channels


def make_patch_grid(
    num_frames: int,
    height: int,
    width: int,
    channels: int,
    tubelet: int = 2,
    patch: int = 16,
) -> PatchGrid:
    return PatchGrid(
        num_frames=num_frames,
        height=height,
        width=width,
        channels=channels,
        tubelet=tubelet,
        patch=patch,
    )


@dataclass(frozen=True)
class TubeMask:
    """Spatial boolean grid (True = masked) replicated across all t_cells."""

    spatial: np.ndarray
    ratio: float
    t_cells: int

    @property
    def masked_cells(self) -> int:
        return int(self.spatial.sum())

    def token_mask(self) -> np.ndarray:
        """Flat boolean mask over tokens in (t, h, w) lexicographic order."""
        return np.tile(self.spatial.reshape(-1), self.t_cells)

    @property
    def masked_tokens(self) -> int:
        return self.masked_cells * self.t_cells


def sample_tube_mask(grid: PatchGrid, ratio: float, rng: np.random.Generator) -> TubeMask:
    """Mask exactly round(ratio * spatial_cells) uniformly chosen spatial cells.

    The count uses round-half-up.  Ratios that would mask zero cells or
    leave zero visible are rejected.
    """
    if not (0.0 < ratio < 1.0):
        raise DegenerateRatioError("ratio must be strictly between 0 and 1")
    n = grid.spatial_cells
    k = int(np.floor(ratio * n + 0.5))
    if k <= 0 or k >= n:
        raise DegenerateRatioError(f"ratio {ratio} masks {k} of {n} cells")
    chosen = rng.choice(n, size=k, replace=False)
    spatial = np.zeros(n, dtype=bool)
    spatial[chosen] = True
    return TubeMask(spatial=spatial.reshape(grid.h_cells, grid.w_cells), ratio=float(ratio), t_cells=grid.t_cells)


def patchify(clip: np.ndarray, grid: PatchGrid) -> np.ndarray:
    """Flatten a clip into (token_count, token_dim) float32 tokens.

    Tokens are ordered lexicographically over (t, h, w) cells; within a
    token, values follow (frame, row, col, channel) order.
    """
    expected = (grid.num_frames, grid.height, grid.width, grid.channels)
    if tuple(clip.shape) != expected:
        raise ShapeMismatchError(f"clip shape {clip.shape} does not match grid {expected}")
    t, hc, wc = grid.t_cells, grid.h_cells, grid.w_cells
    cube = clip.reshape(t, grid.tubelet, hc, grid.patch, wc, grid.patch, grid.channels)
    cube = cube.transpose(0, 2, 4, 1, 3, 5, 6)
    return np.ascontiguousarray(cube.reshape(grid.token_count, grid.token_dim), dtype=np.float32)


def unpatchify(tokens: np.ndarray, grid: PatchGrid) -> np.ndarray:
    """Inverse of `patchify`."""
    if tokens.shape != (grid.token_count, grid.token_dim):
        raise ShapeMismatchError(
            f"tokens shape {tokens.shape} does not match grid "
            f"({grid.token_count}, {grid.token_dim})"
        )
    t, hc, wc = grid.t_cells, grid.h_cells, grid.w_cells
    cube = tokens.reshape(t, hc, wc, grid.tubelet, grid.patch, grid.patch, grid.channels)
    cube = cube.transpose(0, 3, 1, 4, 2, 5, 6)
    return np.ascontiguousarray(
        cube.reshape(grid.num_frames, grid.height, grid.width, grid.channels)
    )


def make_targets(tokens: np.ndarray, normalize: bool = True) -> np.ndarray:
    """Reconstruction targets: per-token standardization when `normalize`.

    Each token is centered by its own mean and divided by its own population
    standard deviation plus a small epsilon, which sends constant tokens to
    exact zeros.  With `normalize` off the tokens pass through unchanged.
    """
    if tokens.size == 0:
        raise ValueError("tokens must be nonempty")
    if not normalize:
        return tokens.copy()
    t = tokens.astype(np.float32)
    mean = t.mean(axis=1, keepdims=True)
    std = t.std(axis=1, keepdims=True)
    return (t - mean) / (std + np.float32(NORMALIZE_EPS))


@dataclass(frozen=True)
class MaskedSample:
    """One training sample: visible tokens plus (normalized) masked targets."""

    visible: np.ndarray
    targets: np.ndarray
    mask: TubeMask
    recipe_ref: Optional[str] = None


def apply_mask(
    tokens: np.ndarray,
    mask: TubeMask,
    grid: PatchGrid,
    normalize: bool = True,
    recipe_ref: Optional[str] = None,
) -> MaskedSample:
    """Split tokens into visible and masked-target sets, preserving order."""
    if tokens.shape[0] != grid.token_count:
        raise ShapeMismatchError(
            f"{tokens.shape[0]} tokens but grid expects {grid.token_count}"
        )
    if mask.t_cells != grid.t_cells or mask.spatial.shape != (grid.h_cells, grid.w_cells):
        raise ShapeMismatchError("mask geometry does not match grid")
    flat = mask.token_mask()
    visible = tokens[~flat]
    targets = make_targets(tokens[flat], normalize=normalize)
    return MaskedSample(visible=visible, targets=targets, mask=mask, recipe_ref=recipe_ref)
