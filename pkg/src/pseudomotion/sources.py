"""Static source images: directory loading plus procedural generators.

Images are float32 arrays of shape (H, W, C) with C in {1, 3}, channel-last,
every value in [0, 1].  Each generator is a pure function of its spec and
seed, so repeated calls are bit-identical and safe to run concurrently.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
from PIL import Image as PILImage

from .errors import InvalidSystemError, SourceEmptyError

RASTER_SUFFIXES = (".png", ".jpg", ".jpeg", ".bmp", ".gif", ".tif", ".tiff", ".webp")

PATTERN_KINDS = ("checker", "radial-gradient", "random-blobs")


def validate_image(image: np.ndarray) -> np.ndarray:
    """Check (H, W, C) layout, C in {1, 3}, and the [0, 1] value range."""
    arr = np.asarray(image)
    if arr.ndim != 3 or arr.shape[2] not in (1, 3):
        raise ValueError(f"expected (H, W, C) with C in {{1, 3}}, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError("image must have positive height and width")
    if not np.all(np.isfinite(arr)):
        raise ValueError("image contains non-finite values")
    if float(arr.min()) < 0.0 or float(arr.max()) > 1.0:
        raise ValueError("image values must lie in [0, 1]")
    return arr


def _gray_to_rgb(gray: np.ndarray) -> np.ndarray:
    return np.repeat(gray.astype(np.float32)[:, :, None], 3, axis=2)


def _minmax_normalize(field: np.ndarray) -> np.ndarray:
    lo = float(field.min())
    hi = float(field.max())
    if hi <= lo:
        return np.zeros_like(field)
    return (field - lo) / (hi - lo)


# ---------------------------------------------------------------------------
# Directory loading
# ---------------------------------------------------------------------------

def load_image_dir(path, count: int, target_size: int, seed: int) -> list[np.ndarray]:
    """Load `count` images from a directory, center-cropped square and resized.

    Files are listed in lexicographic filename order, undecodable files are
    skipped with a warning, and the selection is sampled uniformly without
    replacement when enough files exist (with replacement otherwise).  The
    result is deterministic given the directory contents and the seed.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    root = Path(path)
    files = sorted(
        (f for f in root.iterdir() if f.is_file() and f.suffix.lower() in RASTER_SUFFIXES),
        key=lambda f: f.name,
    ) if root.is_dir() else []
    usable = []
    for f in files:
        try:
            with PILImage.open(f) as im:
                im.verify()
            usable.append(f)
        except Exception:
            warnings.warn(f"skipping undecodable image file: {f.name}")
    if not usable:
        raise SourceEmptyError(f"no decodable image files in {root}")

    rng = np.random.default_rng(seed)
    n = len(usable)
    replace = count > n
    picked = rng.choice(n, size=count, replace=replace)
    return [_load_one(usable[i], target_size) for i in picked]


def _load_one(path: Path, target_size: int) -> np.ndarray:
    with PILImage.open(path) as im:
        rgb = im.convert("RGB")
        w, h = rgb.size
        side = min(w, h)
        left = (w - side) // 2
        top = (h - side) // 2
        rgb = rgb.crop((left, top, left + side, top + side))
        rgb = rgb.resize((target_size, target_size), PILImage.BILINEAR)
        return np.asarray(rgb, dtype=np.float32) / 255.0


# ---------------------------------------------------------------------------
# Iterated function systems (chaos game)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IfsSystem:
    """A set of contractive 2D affine maps with selection probabilities.

    `maps` holds (linear, offset) pairs where `linear` is 2x2 and `offset`
    has length 2.  Every linear part must have spectral norm < 1 and the
    weights must be nonnegative and sum to 1 (within 1e-9).
    """

    maps: tuple
    weights: tuple

    def __post_init__(self):
        if not self.maps:
            raise InvalidSystemError("system needs at least one map")
        if len(self.weights) != len(self.maps):
            raise InvalidSystemError("weights and maps must have equal length")
        w = np.asarray(self.weights, dtype=float)
        if np.any(w < 0.0) or abs(float(w.sum()) - 1.0) > 1e-9:
            raise InvalidSystemError("weights must be nonnegative and sum to 1")
        for linear, offset in self.maps:
            lin = np.asarray(linear, dtype=float)
            off = np.asarray(offset, dtype=float)
            if lin.shape != (2, 2) or off.shape != (2,):
                raise InvalidSystemError("each map needs a 2x2 linear part and a length-2 offset")
            if float(np.linalg.norm(lin, 2)) >= 1.0:
                raise InvalidSystemError("map is not contractive (spectral norm >= 1)")


def ifs_bounding_radius(system: IfsSystem) -> float:
    """Radius of an origin-centered ball the chaos-game orbit never leaves.

    For each map with contraction factor s and offset t, any ball of radius
    r >= |t| / (1 - s) maps into itself, so the orbit started at the origin
    stays inside the largest such radius over all maps.
    """
    radius = 0.0
    for linear, offset in system.maps:
        s = float(np.linalg.norm(np.asarray(linear, dtype=float), 2))
        t = float(np.linalg.norm(np.asarray(offset, dtype=float)))
        radius = max(radius, t / (1.0 - s))
    return radius


def chaos_game_points(system: IfsSystem, iterations: int, seed: int, discard: int = 100) -> np.ndarray:
    """Run the chaos game from the origin and return the retained points.

    The first `discard` points are dropped so the remainder lies on the
    attractor (up to float precision).  Returns an (iterations - discard, 2)
    array of (x, y) points.
    """
    rng = np.random.default_rng(seed)
    w = np.asarray(system.weights, dtype=float)
    idx = rng.choice(len(system.maps), size=iterations, p=w / w.sum())
    coeffs = [
        (float(l[0][0]), float(l[0][1]), float(l[1][0]), float(l[1][1]), float(t[0]), float(t[1]))
        for l, t in ((np.asarray(l, float), np.asarray(t, float)) for l, t in system.maps)
    ]
    keep = max(iterations - discard, 0)
    pts = np.empty((keep, 2), dtype=np.float64)
    x = 0.0
    y = 0.0
    k = 0
    for step in range(iterations):
        a, b, c, d, tx, ty = coeffs[idx[step]]
        x, y = a * x + b * y + tx, c * x + d * y + ty
        if step >= discard:
            pts[k, 0] = x
            pts[k, 1] = y
            k += 1
    return pts


def gen_fractal_ifs(system: IfsSystem, iterations: int, size: int, seed: int) -> np.ndarray:
    """Render an IFS attractor by density accumulation on a size x size grid.

    The render window is the square [-r, r]^2 where r is the bounding radius
    (or 1 when the system is centered at the origin), so every retained point
    lands inside the grid.  Hit counts are normalized by the maximum to give
    a grayscale density in [0, 1], replicated to 3 channels.
    """
    if iterations < 1000:
        raise ValueError("iterations must be >= 1000")
    if size < 1:
        raise ValueError("size must be >= 1")
    pts = chaos_game_points(system, iterations, seed)
    radius = ifs_bounding_radius(system)
    if radius <= 0.0:
        radius = 1.0
    cols = np.clip(((pts[:, 0] + radius) / (2.0 * radius) * size).astype(np.int64), 0, size - 1)
    rows = np.clip(((pts[:, 1] + radius) / (2.0 * radius) * size).astype(np.int64), 0, size - 1)
    counts = np.bincount(rows * size + cols, minlength=size * size).reshape(size, size)
    peak = counts.max()
    density = counts / peak if peak > 0 else counts.astype(np.float64)
    return _gray_to_rgb(density)


def random_ifs(rng: np.random.Generator, num_maps: Optional[int] = None) -> IfsSystem:
    """Draw a random contractive system (for procedural source pools).

    Linear parts are built as rotation * diag(s1, s2) * rotation with singular
    values in [0.3, 0.8], which guarantees contractivity.  Selection weights
    are proportional to |det|, floored so every map stays reachable.
    """
    n = int(num_maps) if num_maps is not None else int(rng.integers(2, 5))
    maps = []
    dets = []
    for _ in range(n):
        theta, phi = rng.uniform(0.0, 2.0 * np.pi, size=2)
        s1, s2 = rng.uniform(0.3, 0.8, size=2)
        rot1 = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        rot2 = np.array([[np.cos(phi), -np.sin(phi)], [np.sin(phi), np.cos(phi)]])
        linear = rot1 @ np.diag([s1, s2]) @ rot2
        offset = rng.uniform(-1.0, 1.0, size=2)
        maps.append((linear, offset))
        dets.append(max(abs(s1 * s2), 0.05))
    weights = np.asarray(dets) / np.sum(dets)
    return IfsSystem(maps=tuple(maps), weights=tuple(float(v) for v in weights))


# ---------------------------------------------------------------------------
# Gradient (Perlin-style) noise
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PerlinSpec:
    """Parameters for multi-octave gradient noise."""

    cell_size: float = 32.0
    octaves: int = 4
    persistence: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.cell_size < 2:
            raise ValueError("cell_size must be >= 2")
        if self.octaves < 1:
            raise ValueError("octaves must be >= 1")
        if not (0.0 < self.persistence <= 1.0):
            raise ValueError("persistence must be in (0, 1]")


def _fade(t: np.ndarray) -> np.ndarray:
    return t * t * t * (t * (t * 6.0 - 15.0) + 10.0)


def perlin_octave(size: int, cell: float, rng: np.random.Generator) -> np.ndarray:
    """One octave of classic gradient noise on a size x size pixel grid.

    Pixel p sits at lattice coordinate p / cell, so pixels at multiples of
    the cell size fall exactly on lattice nodes where the noise is zero.
    Returns raw (unnormalized) float64 values.
    """
    coords = np.arange(size, dtype=np.float64) / float(cell)
    i0 = np.floor(coords).astype(np.int64)
    frac = coords - i0
    nodes = int(i0.max()) + 2
    angles = rng.uniform(0.0, 2.0 * np.pi, size=(nodes, nodes))
    gx = np.cos(angles)
    gy = np.sin(angles)

    ix0 = i0[None, :]
    iy0 = i0[:, None]
    fx = frac[None, :]
    fy = frac[:, None]

    n00 = gx[iy0, ix0] * fx + gy[iy0, ix0] * fy
    n10 = gx[iy0, ix0 + 1] * (fx - 1.0) + gy[iy0, ix0 + 1] * fy
    n01 = gx[iy0 + 1, ix0] * fx + gy[iy0 + 1, ix0] * (fy - 1.0)
    n11 = gx[iy0 + 1, ix0 + 1] * (fx - 1.0) + gy[iy0 + 1, ix0 + 1] * (fy - 1.0)

    u = _fade(fx)
    v = _fade(fy)
    top = n00 + u * (n10 - n00)
    bottom = n01 + u * (n11 - n01)
    return top + v * (bottom - top)


def gen_perlin(spec: PerlinSpec, size: int) -> np.ndarray:
    """Multi-octave gradient noise, min-max normalized to [0, 1], 3-channel.

    Octave o doubles the base frequency o times and weights the contribution
    by persistence**o.  Octaves whose cell size would drop below one pixel
    contribute exactly zero and are skipped.
    """
    if size < 1:
        raise ValueError("size must be >= 1")
    rng = np.random.default_rng(spec.seed)
    field = np.zeros((size, size), dtype=np.float64)
    amp = 1.0
    for octave in range(spec.octaves):
        cell = spec.cell_size / (2.0 ** octave)
        if cell < 1.0:
            break
        field += amp * perlin_octave(size, cell, rng)
        amp *= spec.persistence
    return _gray_to_rgb(_minmax_normalize(field))


# ---------------------------------------------------------------------------
# Simple procedural patterns
# ---------------------------------------------------------------------------

def gen_pattern(kind: str, size: int, seed: int = 0) -> np.ndarray:
    """Deterministic procedural test image: checker, radial-gradient, or random-blobs."""
    if kind not in PATTERN_KINDS:
        raise ValueError(f"unknown pattern kind {kind!r}, expected one of {PATTERN_KINDS}")
    if size < 16:
        raise ValueError("size must be >= 16")
    if kind == "checker":
        yy, xx = np.mgrid[0:size, 0:size]
        field = (((xx // 16) + (yy // 16)) % 2 == 0).astype(np.float64)
    elif kind == "radial-gradient":
        cy = cx = size // 2
        yy, xx = np.mgrid[0:size, 0:size]
        r = np.sqrt((xx - cx) ** 2.0 + (yy - cy) ** 2.0)
        corners = [(0, 0), (0, size - 1), (size - 1, 0), (size - 1, size - 1)]
        rmax = max(np.hypot(x - cx, y - cy) for y, x in corners)
        field = np.clip(1.0 - r / rmax, 0.0, 1.0)
    else:
        rng = np.random.default_rng(seed)
        yy, xx = np.mgrid[0:size, 0:size]
        field = np.zeros((size, size), dtype=np.float64)
        for _ in range(12):
            cx, cy = rng.uniform(0, size, size=2)
            sigma = rng.uniform(size / 16.0, size / 6.0)
            amp = rng.uniform(0.3, 1.0)
            field += amp * np.exp(-((xx - cx) ** 2 + (yy - cy) ** 2) / (2.0 * sigma * sigma))
        field = _minmax_normalize(field)
    return _gray_to_rgb(field)
