"""The eight frame transformations and the resampling kernels behind them.

Each transformation has a parameter record sampled once per clip from
configurable ranges (`ParamRanges` carries the defaults), and a kernel that
maps one frame to the next or cuts a window out of a static frame.  All
kernels preserve the input dimensions, clamp to [0, 1], use bilinear
sampling, and read zeros outside the source frame.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional, Union

import numpy as np

from .errors import (
    DegenerateHomographyError,
    InvalidRectError,
    InvalidSourceError,
)


class TransformKind(Enum):
    IDENTITY = "identity"
    SLIDING_WINDOW = "sliding_window"
    ZOOM_IN_OUT = "zoom_in_out"
    FADE_IN_OUT = "fade_in_out"
    AFFINE = "affine"
    PERSPECTIVE = "perspective"
    COLOR_JITTER = "color_jitter"
    CUTMIX = "cutmix"


# ---------------------------------------------------------------------------
# Parameter records (one clip keeps one record fixed for all of its frames)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IdentityParams:
    pass


@dataclass(frozen=True)
class SlidingWindowParams:
    """Square window side in pixels, start position, and per-step displacement."""

    window: int
    start: tuple[float, float]
    step: tuple[float, float]


@dataclass(frozen=True)
class ZoomParams:
    """Window side fractions sampled for the zoom-out schedule.

    `start_frac` < `end_frac` always; direction "in" plays the window
    schedule backwards (large to small), which is the reverse process of a
    zoom-out clip.
    """

    direction: str
    start_frac: float
    end_frac: float


@dataclass(frozen=True)
class FadeParams:
    direction: str


@dataclass(frozen=True)
class AffineParams:
    angle: float
    translate: tuple[float, float]
    scale: float
    shear: float


@dataclass(frozen=True)
class PerspectiveParams:
    """Distortion scale plus four signed corner offsets (fractions of size).

    Offsets are ordered top-left, top-right, bottom-right, bottom-left and
    push each corner inward, so the perturbed quadrilateral stays convex.
    """

    distortion: float
    offsets: tuple[tuple[float, float], ...]


@dataclass(frozen=True)
class ColorJitterParams:
    """Deltas: additive brightness, multiplicative contrast/saturation about 1,
    and hue rotation as a fraction of the hue circle."""

    brightness: float
    contrast: float
    saturation: float
    hue: float


@dataclass(frozen=True)
class CutMixParams:
    """Sliding paste window: content from a partner image replaces the window."""

    window: int
    partner: Optional[int]
    start: tuple[float, float]
    step: tuple[float, float]


TransformParams = Union[
    IdentityParams,
    SlidingWindowParams,
    ZoomParams,
    FadeParams,
    AffineParams,
    PerspectiveParams,
    ColorJitterParams,
    CutMixParams,
]

_PARAM_TYPES = {
    TransformKind.IDENTITY: IdentityParams,
    TransformKind.SLIDING_WINDOW: SlidingWindowParams,
    TransformKind.ZOOM_IN_OUT: ZoomParams,
    TransformKind.FADE_IN_OUT: FadeParams,
    TransformKind.AFFINE: AffineParams,
    TransformKind.PERSPECTIVE: PerspectiveParams,
    TransformKind.COLOR_JITTER: ColorJitterParams,
    TransformKind.CUTMIX: CutMixParams,
}


def expected_param_type(kind: TransformKind):
    return _PARAM_TYPES[kind]


@dataclass(frozen=True)
class ParamRanges:
    """Sampling bounds per transformation, defaulting to the published values.

    Angles are degrees, translations are fractions of width/height, zoom and
    window values are fractions of the source side, and the jitter deltas are
    unitless (hue as a fraction of the hue circle).
    """

    affine_angle: tuple[float, float] = (-15.0, 15.0)
    affine_translate: tuple[float, float] = (-0.01, 0.01)
    affine_scale: tuple[float, float] = (0.9999, 1.0001)
    affine_shear: tuple[float, float] = (-1.0, 1.0)
    perspective_distortion: float = 0.05
    zoom_start: tuple[float, float] = (0.2, 0.45)
    zoom_end: tuple[float, float] = (0.55, 0.95)
    jitter_brightness: tuple[float, float] = (0.0, 0.2)
    jitter_contrast: tuple[float, float] = (0.0, 0.3)
    jitter_saturation: tuple[float, float] = (0.0, 0.2)
    jitter_hue: tuple[float, float] = (0.0, 0.1)
    window_frac: float = 0.5
    slide_step_frac: float = 1.0 / 15.0

    def __post_init__(self):
        for name in (
            "affine_angle",
            "affine_translate",
            "affine_scale",
            "affine_shear",
            "zoom_start",
            "zoom_end",
            "jitter_brightness",
            "jitter_contrast",
            "jitter_saturation",
            "jitter_hue",
        ):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name}: min {lo} exceeds max {hi}")
        if not (0.0 < self.window_frac <= 1.0):
            raise ValueError("window_frac must be in (0, 1]")


def _uniform(rng: np.random.Generator, bounds: tuple[float, float]) -> float:
    lo, hi = bounds
    return float(rng.uniform(lo, hi)) if hi > lo else float(lo)


def sample_params(
    kind: TransformKind,
    ranges: ParamRanges,
    source_size: int,
    rng: np.random.Generator,
) -> TransformParams:
    """Draw one parameter record for `kind`, uniform within `ranges`.

    The record is meant to stay fixed for a whole clip.  Windowed kinds size
    their square window as round(window_frac * source_size); the per-step
    displacement is uniform within +/- slide_step_frac of the free room so
    typical trajectories stay inside the source.
    """
    if kind is TransformKind.IDENTITY:
        return IdentityParams()
    if kind is TransformKind.AFFINE:
        return AffineParams(
            angle=_uniform(rng, ranges.affine_angle),
            translate=(_uniform(rng, ranges.affine_translate), _uniform(rng, ranges.affine_translate)),
            scale=_uniform(rng, ranges.affine_scale),
            shear=_uniform(rng, ranges.affine_shear),
        )
    if kind is TransformKind.PERSPECTIVE:
        d = ranges.perspective_distortion
        signs = ((1.0, 1.0), (-1.0, 1.0), (-1.0, -1.0), (1.0, -1.0))
        offsets = tuple(
            (sx * float(rng.uniform(0.0, d)), sy * float(rng.uniform(0.0, d))) for sx, sy in signs
        )
        return PerspectiveParams(distortion=d, offsets=offsets)
    if kind is TransformKind.ZOOM_IN_OUT:
        start = _uniform(rng, ranges.zoom_start)
        end = _uniform(rng, ranges.zoom_end)
        direction = "out" if rng.random() < 0.5 else "in"
        return ZoomParams(direction=direction, start_frac=start, end_frac=end)
    if kind is TransformKind.FADE_IN_OUT:
        return FadeParams(direction="out" if rng.random() < 0.5 else "in")
    if kind is TransformKind.COLOR_JITTER:
        return ColorJitterParams(
            brightness=_uniform(rng, ranges.jitter_brightness),
            contrast=_uniform(rng, ranges.jitter_contrast),
            saturation=_uniform(rng, ranges.jitter_saturation),
            hue=_uniform(rng, ranges.jitter_hue),
        )
    if kind in (TransformKind.SLIDING_WINDOW, TransformKind.CUTMIX):
        window = int(round(ranges.window_frac * source_size))
        if window < 1 or window > source_size:
            raise InvalidSourceError(
                f"source side {source_size} cannot host a window of side {window}"
            )
        free = float(source_size - window)
        start = (float(rng.uniform(0.0, free)), float(rng.uniform(0.0, free)))
        m = ranges.slide_step_frac * free
        step = (float(rng.uniform(-m, m)), float(rng.uniform(-m, m)))
        if kind is TransformKind.SLIDING_WINDOW:
            return SlidingWindowParams(window=window, start=start, step=step)
        return CutMixParams(window=window, partner=None, start=start, step=step)
    raise ValueError(f"unhandled kind {kind}")


# ---------------------------------------------------------------------------
# Parameter (de)serialization for recipes and manifests
# ---------------------------------------------------------------------------

def params_to_dict(params: TransformParams) -> dict:
    if isinstance(params, IdentityParams):
        return {}
    if isinstance(params, SlidingWindowParams):
        return {"window": params.window, "start": list(params.start), "step": list(params.step)}
    if isinstance(params, ZoomParams):
        return {
            "direction": params.direction,
            "start_frac": params.start_frac,
            "end_frac": params.end_frac,
        }
    if isinstance(params, FadeParams):
        return {"direction": params.direction}
    if isinstance(params, AffineParams):
        return {
            "angle": params.angle,
            "translate": list(params.translate),
            "scale": params.scale,
            "shear": params.shear,
        }
    if isinstance(params, PerspectiveParams):
        return {"distortion": params.distortion, "offsets": [list(o) for o in params.offsets]}
    if isinstance(params, ColorJitterParams):
        return {
            "brightness": params.brightness,
            "contrast": params.contrast,
            "saturation": params.saturation,
            "hue": params.hue,
        }
    if isinstance(params, CutMixParams):
        return {
            "window": params.window,
            "partner": params.partner,
            "start": list(params.start),
            "step": list(params.step),
        }
    raise TypeError(f"unknown params type {type(params)!r}")


def params_from_dict(kind: TransformKind, blob: dict) -> TransformParams:
    if kind is TransformKind.IDENTITY:
        return IdentityParams()
    if kind is TransformKind.SLIDING_WINDOW:
        return SlidingWindowParams(
            window=int(blob["window"]),
            start=tuple(blob["start"]),
            step=tuple(blob["step"]),
        )
    if kind is TransformKind.ZOOM_IN_OUT:
        return ZoomParams(
            direction=blob["direction"],
            start_frac=float(blob["start_frac"]),
            end_frac=float(blob["end_frac"]),
        )
    if kind is TransformKind.FADE_IN_OUT:
        return FadeParams(direction=blob["direction"])
    if kind is TransformKind.AFFINE:
        return AffineParams(
            angle=float(blob["angle"]),
            translate=tuple(blob["translate"]),
            scale=float(blob["scale"]),
            shear=float(blob["shear"]),
        )
    if kind is TransformKind.PERSPECTIVE:
        return PerspectiveParams(
            distortion=float(blob["distortion"]),
            offsets=tuple(tuple(o) for o in blob["offsets"]),
        )
    if kind is TransformKind.COLOR_JITTER:
        return ColorJitterParams(
            brightness=float(blob["brightness"]),
            contrast=float(blob["contrast"]),
            saturation=float(blob["saturation"]),
            hue=float(blob["hue"]),
        )
    if kind is TransformKind.CUTMIX:
        partner = blob.get("partner")
        return CutMixParams(
            window=int(blob["window"]),
            partner=None if partner is None else int(partner),
            start=tuple(blob["start"]),
            step=tuple(blob["step"]),
        )
    raise ValueError(f"unhandled kind {kind}")


def with_partner(params: CutMixParams, partner: int) -> CutMixParams:
    return replace(params, partner=partner)


# ---------------------------------------------------------------------------
# Sampling kernel
# ---------------------------------------------------------------------------

def bilinear_sample(image: np.ndarray, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Sample `image` at float positions (xs, ys); reads outside return 0.

    Positions are in pixel-center coordinates (pixel (i, j) sits at x=j,
    y=i).  The image is framed by a one-pixel zero border and positions are
    clamped to that frame, which realizes zero fill without per-corner
    bounds checks.  Positions are float64; blending runs in float32.
    """
    h, w, c = image.shape
    padded = np.zeros((h + 2, w + 2, c), dtype=np.float32)
    padded[1 : h + 1, 1 : w + 1] = image
    # anything at least one pixel outside reads pure border zeros
    px = np.clip(xs, -1.0, float(w)) + 1.0
    py = np.clip(ys, -1.0, float(h)) + 1.0
    x0 = np.minimum(np.floor(px), float(w)).astype(np.int64)
    y0 = np.minimum(np.floor(py), float(h)).astype(np.int64)
    fx = (px - x0).astype(np.float32)[..., None]
    fy = (py - y0).astype(np.float32)[..., None]

    flat = padded.reshape(-1, c)
    base = y0 * (w + 2) + x0
    v00 = flat[base]
    v10 = flat[base + 1]
    v01 = flat[base + (w + 2)]
    v11 = flat[base + (w + 3)]
    top = v00 + fx * (v10 - v00)
    bottom = v01 + fx * (v11 - v01)
    return top + fy * (bottom - top)


def _pixel_grid(h: int, w: int) -> tuple[np.ndarray, np.ndarray]:
    ys, xs = np.mgrid[0:h, 0:w]
    return xs.astype(np.float64), ys.astype(np.float64)


# ---------------------------------------------------------------------------
# Warps
# ---------------------------------------------------------------------------

def affine_matrix(
    angle: float,
    translate: tuple[float, float],
    scale: float,
    shear: float,
    width: int,
    height: int,
) -> np.ndarray:
    """Forward 3x3 matrix moving content: scale, x-shear, rotate about the
    image center ((w-1)/2, (h-1)/2), then translate by fractions of (w, h).

    Positive angles rotate content counter-clockwise in (x right, y down)
    coordinates, i.e. clockwise as displayed.
    """
    a = math.radians(angle)
    sh = math.tan(math.radians(shear))
    cx = (width - 1) / 2.0
    cy = (height - 1) / 2.0
    cos_a = math.cos(a)
    sin_a = math.sin(a)
    lin = np.array([[cos_a, -sin_a], [sin_a, cos_a]]) @ np.array([[1.0, sh], [0.0, 1.0]]) * scale
    tx = translate[0] * width
    ty = translate[1] * height
    m = np.eye(3)
    m[:2, :2] = lin
    m[0, 2] = cx + tx - lin[0, 0] * cx - lin[0, 1] * cy
    m[1, 2] = cy + ty - lin[1, 0] * cx - lin[1, 1] * cy
    return m


def warp_affine(
    image: np.ndarray,
    angle: float,
    translate: tuple[float, float] = (0.0, 0.0),
    scale: float = 1.0,
    shear: float = 0.0,
) -> np.ndarray:
    """Affine warp about the image center with bilinear sampling and zero fill."""
    if scale <= 0.0:
        raise ValueError("scale must be > 0")
    h, w = image.shape[:2]
    inv = np.linalg.inv(affine_matrix(angle, translate, scale, shear, w, h))
    xs, ys = _pixel_grid(h, w)
    src_x = inv[0, 0] * xs + inv[0, 1] * ys + inv[0, 2]
    src_y = inv[1, 0] * xs + inv[1, 1] * ys + inv[1, 2]
    out = bilinear_sample(image, src_x, src_y)
    return np.clip(out, 0.0, 1.0).astype(np.float32)


def solve_homography(src: np.ndarray, dst: np.ndarray) -> np.ndarray:
    """3x3 homography H with H @ [x, y, 1]^T ~ dst_i for the four point pairs."""
    src = np.asarray(src, dtype=np.float64)
    dst = np.asarray(dst, dtype=np.float64)
    a = np.zeros((8, 8), dtype=np.float64)
    b = np.zeros(8, dtype=np.float64)
    for i in range(4):
        x, y = src[i]
        u, v = dst[i]
        a[2 * i] = [x, y, 1.0, 0.0, 0.0, 0.0, -u * x, -u * y]
        a[2 * i + 1] = [0.0, 0.0, 0.0, x, y, 1.0, -v * x, -v * y]
        b[2 * i] = u
        b[2 * i + 1] = v
    try:
        coeffs = np.linalg.solve(a, b)
    except np.linalg.LinAlgError as exc:
        raise DegenerateHomographyError("four-point solve is singular") from exc
    return np.array(
        [
            [coeffs[0], coeffs[1], coeffs[2]],
            [coeffs[3], coeffs[4], coeffs[5]],
            [coeffs[6], coeffs[7], 1.0],
        ]
    )


def _is_convex(quad: np.ndarray) -> bool:
    signs = []
    for i in range(4):
        a = quad[(i + 1) % 4] - quad[i]
        b = quad[(i + 2) % 4] - quad[(i + 1) % 4]
        cross = a[0] * b[1] - a[1] * b[0]
        if cross != 0.0:
            signs.append(cross > 0.0)
    return len(set(signs)) <= 1 and len(signs) == 4


def warp_perspective(image: np.ndarray, corner_offsets) -> np.ndarray:
    """Perspective warp defined by four signed corner offsets (fractions of size).

    Corner i at pixel position c_i moves to q_i = c_i + offset_i * (w, h); the
    rendered homography maps the perturbed quadrilateral onto the full frame,
    so output pixels sample the source at the inverse (corner -> perturbed)
    map.  Corners are ordered top-left, top-right, bottom-right, bottom-left.
    """
    h, w = image.shape[:2]
    corners = np.array(
        [[0.0, 0.0], [w - 1.0, 0.0], [w - 1.0, h - 1.0], [0.0, h - 1.0]], dtype=np.float64
    )
    offs = np.asarray(corner_offsets, dtype=np.float64)
    if offs.shape != (4, 2):
        raise ValueError("corner_offsets must be four (dx, dy) pairs")
    perturbed = corners + offs * np.array([w, h], dtype=np.float64)
    if not _is_convex(perturbed):
        raise DegenerateHomographyError("perturbed corners are not a convex quadrilateral")
    sampler = solve_homography(corners, perturbed)
    xs, ys = _pixel_grid(h, w)
    denom = sampler[2, 0] * xs + sampler[2, 1] * ys + sampler[2, 2]
    if np.any(np.abs(denom) < 1e-12):
        raise DegenerateHomographyError("homography denominator vanishes inside the frame")
    src_x = (sampler[0, 0] * xs + sampler[0, 1] * ys + sampler[0, 2]) / denom
    src_y = (sampler[1, 0] * xs + sampler[1, 1] * ys + sampler[1, 2]) / denom
    out = bilinear_sample(image, src_x, src_y)
    return np.clip(out, 0.0, 1.0).astype(np.float32)


def crop_resize(image: np.ndarray, rect: tuple[float, float, float, float], out_size: int) -> np.ndarray:
    """Bilinear resize of the rectangle (x0, y0, w, h) to out_size x out_size.

    The rectangle may have float coordinates; its pixel-center span
    [x0, x0 + w - 1] must stay inside the image.  Sample positions are spaced
    evenly across that span, so the full-image rectangle reproduces the input
    exactly.
    """
    if out_size < 1:
        raise ValueError("out_size must be >= 1")
    h, w = image.shape[:2]
    x0, y0, rw, rh = (float(v) for v in rect)
    eps = 1e-6
    if rw < 1.0 or rh < 1.0:
        raise InvalidRectError("rect must be at least 1x1 pixels")
    if x0 < -eps or y0 < -eps or x0 + rw > w + eps or y0 + rh > h + eps:
        raise InvalidRectError(f"rect {rect} escapes image bounds ({w}x{h})")
    if out_size == 1 or h < 2 or w < 2:
        if out_size == 1:
            xs = np.array([[x0 + (rw - 1.0) / 2.0]])
            ys = np.array([[y0 + (rh - 1.0) / 2.0]])
        else:
            t = np.arange(out_size, dtype=np.float64) / (out_size - 1.0)
            xs = (x0 + t * (rw - 1.0))[None, :].repeat(out_size, axis=0)
            ys = (y0 + t * (rh - 1.0))[:, None].repeat(out_size, axis=1)
        out = bilinear_sample(image, xs, ys)
        return np.clip(out, 0.0, 1.0).astype(np.float32)

    # separable two-pass interpolation (the rect never leaves the image)
    t = np.arange(out_size, dtype=np.float64) / (out_size - 1.0)
    xs = np.clip(x0 + t * (rw - 1.0), 0.0, w - 1.0)
    ys = np.clip(y0 + t * (rh - 1.0), 0.0, h - 1.0)
    ix = np.minimum(np.floor(xs), w - 2.0).astype(np.int64)
    iy = np.minimum(np.floor(ys), h - 2.0).astype(np.int64)
    fx = (xs - ix).astype(np.float32)[None, :, None]
    fy = (ys - iy).astype(np.float32)[:, None, None]
    img = np.asarray(image, dtype=np.float32)
    rows = img[iy] * (1.0 - fy).astype(np.float32) + img[iy + 1] * fy
    out = rows[:, ix] * (np.float32(1.0) - fx) + rows[:, ix + 1] * fx
    return np.clip(out, 0.0, 1.0).astype(np.float32)


# ---------------------------------------------------------------------------
# Photometric ops
# ---------------------------------------------------------------------------

_LUMA = np.array([0.299, 0.587, 0.114], dtype=np.float64)


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """Vectorized RGB -> HSV on [0, 1] values (hue in [0, 1))."""
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = np.max(rgb, axis=-1)
    minc = np.min(rgb, axis=-1)
    v = maxc
    c = maxc - minc
    s = np.where(maxc > 0.0, c / np.where(maxc > 0.0, maxc, 1.0), 0.0)
    safe_c = np.where(c > 0.0, c, 1.0)
    hr = np.mod((g - b) / safe_c, 6.0)
    hg = (b - r) / safe_c + 2.0
    hb = (r - g) / safe_c + 4.0
    hue = np.where(maxc == r, hr, np.where(maxc == g, hg, hb))
    hue = np.where(c > 0.0, hue / 6.0, 0.0)
    return np.stack([hue, s, v], axis=-1)


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    i = np.floor(h * 6.0)
    f = h * 6.0 - i
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    i = i.astype(np.int64) % 6
    r = np.choose(i, [v, q, p, p, t, v])
    g = np.choose(i, [t, v, v, q, p, p])
    b = np.choose(i, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def color_jitter(
    image: np.ndarray,
    brightness: float = 0.0,
    contrast: float = 0.0,
    saturation: float = 0.0,
    hue: float = 0.0,
) -> np.ndarray:
    """Photometric jitter in the fixed order brightness, contrast, saturation, hue.

    Brightness adds its delta; contrast and saturation scale by (1 + delta)
    about the grand mean and the per-pixel Rec.601 luma respectively; hue
    rotates by `hue` of a full turn in HSV space.  Zero deltas leave the
    image untouched bit-for-bit.  Saturation and hue are no-ops on
    single-channel images.  The result is clamped to [0, 1].
    """
    out = image.astype(np.float64)
    touched = False
    if brightness != 0.0:
        out = out + brightness
        touched = True
    if contrast != 0.0:
        mean = out.mean()
        out = mean + (1.0 + contrast) * (out - mean)
        touched = True
    if image.shape[2] == 3:
        if saturation != 0.0:
            luma = (out[..., 0] * _LUMA[0] + out[..., 1] * _LUMA[1] + out[..., 2] * _LUMA[2])[..., None]
            out = luma + (1.0 + saturation) * (out - luma)
            touched = True
        if hue != 0.0:
            hsv = rgb_to_hsv(np.clip(out, 0.0, 1.0))
            hsv[..., 0] = np.mod(hsv[..., 0] + hue, 1.0)
            out = hsv_to_rgb(hsv)
            touched = True
    if not touched:
        return image.astype(np.float32)
    return np.clip(out, 0.0, 1.0).astype(np.float32)


def fade_step(image: np.ndarray, step: int, total_steps: int, direction: str = "out") -> np.ndarray:
    """Blend toward black on a linear schedule over `total_steps` frames.

    Fade-out keeps the full image at step 0 and reaches all black at the
    final step; fade-in runs the schedule in reverse.
    """
    if total_steps < 2:
        raise ValueError("total_steps must be >= 2")
    if not (0 <= step < total_steps):
        raise ValueError(f"step {step} outside [0, {total_steps})")
    if direction not in ("in", "out"):
        raise ValueError("direction must be 'in' or 'out'")
    frac = step / (total_steps - 1.0)
    alpha = 1.0 - frac if direction == "out" else frac
    return (image.astype(np.float64) * alpha).astype(np.float32)
