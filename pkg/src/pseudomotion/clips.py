"""Pseudo-motion clip synthesis from a single source image.

A clip is a float32 array of shape (T, H, W, C) in [0, 1].  One transform
kind and one parameter record are fixed per clip.  Recursive kinds evolve
each frame from the previous one; windowed kinds (sliding window, zoom,
cutmix) evolve a window state over the untransformed source, which is the
only way a window can grow back out of a shrunken crop.

`sample_clip` draws every choice (source, kind, parameters, partner) from a
single sub-seed recorded in the returned recipe, so `replay` can regenerate
the clip bit-exactly from the recipe and the same source pool.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidTrajectoryError, MissingSourceError
from .transforms import (
    AffineParams,
    ColorJitterParams,
    CutMixParams,
    FadeParams,
    IdentityParams,
    ParamRanges,
    PerspectiveParams,
    SlidingWindowParams,
    TransformKind,
    TransformParams,
    ZoomParams,
    color_jitter,
    crop_resize,
    expected_param_type,
    fade_step,
    params_from_dict,
    params_to_dict,
    sample_params,
    warp_affine,
    warp_perspective,
    with_partner,
)

RECURSIVE_KINDS = (
    TransformKind.IDENTITY,
    TransformKind.FADE_IN_OUT,
    TransformKind.AFFINE,
    TransformKind.PERSPECTIVE,
    TransformKind.COLOR_JITTER,
)

WINDOWED_KINDS = (
    TransformKind.SLIDING_WINDOW,
    TransformKind.ZOOM_IN_OUT,
    TransformKind.CUTMIX,
)


def validate_clip(clip: np.ndarray) -> np.ndarray:
    arr = np.asarray(clip)
    if arr.ndim != 4 or arr.shape[0] < 2 or arr.shape[3] not in (1, 3):
        raise ValueError(f"expected (T>=2, H, W, C in {{1,3}}), got shape {arr.shape}")
    if not np.all(np.isfinite(arr)) or float(arr.min()) < 0.0 or float(arr.max()) > 1.0:
        raise ValueError("clip values must be finite and in [0, 1]")
    return arr


@dataclass(frozen=True)
class TransformSet:
    """Nonempty set of transform kinds with normalized selection weights."""

    kinds: tuple[TransformKind, ...]
    weights: tuple[float, ...]

    def __post_init__(self):
        if not self.kinds:
            raise ValueError("transform set must be nonempty")
        if len(self.weights) != len(self.kinds):
            raise ValueError("weights and kinds must have equal length")
        total = float(sum(self.weights))
        if total <= 0.0 or any(w < 0.0 for w in self.weights):
            raise ValueError("weights must be nonnegative with positive sum")
        if abs(total - 1.0) > 1e-9:
            raise ValueError("weights must sum to 1")


def make_transform_set(kinds: Sequence[TransformKind], weights=None) -> TransformSet:
    kinds = tuple(kinds)
    if weights is None:
        weights = tuple(1.0 / len(kinds) for _ in kinds)
    else:
        total = float(sum(weights))
        weights = tuple(float(w) / total for w in weights)
    return TransformSet(kinds=kinds, weights=weights)


def default_transform_set() -> TransformSet:
    """Zoom plus affine, the combination that works best for pre-training."""
    return make_transform_set((TransformKind.ZOOM_IN_OUT, TransformKind.AFFINE))


@dataclass(frozen=True)
class ClipRecipe:
    """Everything needed to regenerate one clip bit-exactly.

    `seed` drives the full sampling flow (source pick, kind pick, parameter
    draw, cutmix partner) against the recorded transform-set and ranges
    snapshot, so replaying with the original source pool reproduces the clip
    and tampering with the seed yields a different one.  The resolved
    choices are recorded alongside for inspection.
    """

    seed: int
    num_frames: int
    kinds: tuple[str, ...]
    weights: tuple[float, ...]
    ranges: dict
    source_id: int
    partner_id: Optional[int]
    kind: str
    params: dict

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "num_frames": self.num_frames,
            "kinds": list(self.kinds),
            "weights": list(self.weights),
            "ranges": dict(self.ranges),
            "source_id": self.source_id,
            "partner_id": self.partner_id,
            "kind": self.kind,
            "params": dict(self.params),
        }

    @classmethod
    def from_dict(cls, blob: dict) -> "ClipRecipe":
        return cls(
            seed=int(blob["seed"]),
            num_frames=int(blob["num_frames"]),
            kinds=tuple(blob["kinds"]),
            weights=tuple(float(w) for w in blob["weights"]),
            ranges=dict(blob["ranges"]),
            source_id=int(blob["source_id"]),
            partner_id=None if blob["partner_id"] is None else int(blob["partner_id"]),
            kind=blob["kind"],
            params=dict(blob["params"]),
        )


def ranges_to_dict(ranges: ParamRanges) -> dict:
    blob = asdict(ranges)
    return {k: list(v) if isinstance(v, tuple) else v for k, v in blob.items()}


def ranges_from_dict(blob: dict) -> ParamRanges:
    kwargs = {k: tuple(v) if isinstance(v, list) else v for k, v in blob.items()}
    return ParamRanges(**kwargs)


# ---------------------------------------------------------------------------
# Frame evolution
# ---------------------------------------------------------------------------

def recursive_step(
    kind: TransformKind,
    params: TransformParams,
    frame: np.ndarray,
    step_index: int,
    num_frames: int,
) -> np.ndarray:
    """Produce frame `step_index` from frame `step_index - 1`.

    Only valid for recursive kinds.  Fade steps consume one step of the
    remaining linear schedule, which lands on exact black at the last frame;
    fade-in clips are assembled as the reversed fade-out sequence.
    """
    if kind is TransformKind.IDENTITY:
        return frame.copy()
    if kind is TransformKind.AFFINE:
        return warp_affine(frame, params.angle, params.translate, params.scale, params.shear)
    if kind is TransformKind.PERSPECTIVE:
        return warp_perspective(frame, params.offsets)
    if kind is TransformKind.COLOR_JITTER:
        return color_jitter(frame, params.brightness, params.contrast, params.saturation, params.hue)
    if kind is TransformKind.FADE_IN_OUT:
        return fade_step(frame, 1, num_frames - step_index + 1, "out")
    raise ValueError(f"{kind} is not a recursive kind")


def window_rect(
    params: TransformParams,
    step_index: int,
    num_frames: int,
    size: int,
) -> tuple[float, float, float, float]:
    """Window rectangle (x0, y0, w, h) for a windowed kind at one step.

    Sliding and cutmix windows move from their start by step_index times the
    per-step displacement, clamped so the window never leaves the frame.
    Zoom windows stay centered while their side interpolates linearly
    between the resolved start and end fractions.
    """
    if isinstance(params, (SlidingWindowParams, CutMixParams)):
        w = float(params.window)
        if w < 1.0 or w > size:
            raise InvalidTrajectoryError(f"window side {w} does not fit a {size}px frame")
        free = size - w
        if not (0.0 <= params.start[0] <= free and 0.0 <= params.start[1] <= free):
            raise InvalidTrajectoryError(f"window start {params.start} outside [0, {free}]")
        x = min(max(params.start[0] + step_index * params.step[0], 0.0), free)
        y = min(max(params.start[1] + step_index * params.step[1], 0.0), free)
        return (x, y, w, w)
    if isinstance(params, ZoomParams):
        if not (0.0 < params.start_frac < params.end_frac <= 1.0):
            raise InvalidTrajectoryError("zoom fractions must satisfy 0 < start < end <= 1")
        if params.direction == "out":
            s0, s1 = params.start_frac, params.end_frac
        elif params.direction == "in":
            s0, s1 = params.end_frac, params.start_frac
        else:
            raise ValueError("zoom direction must be 'in' or 'out'")
        frac = s0 + (s1 - s0) * (step_index / (num_frames - 1.0))
        side = min(max(frac * size, 1.0), float(size))
        origin = (size - side) / 2.0
        return (origin, origin, side, side)
    raise ValueError(f"{type(params).__name__} is not a windowed parameter record")


def generate_clip(
    source: np.ndarray,
    kind: TransformKind,
    params: TransformParams,
    num_frames: int,
    partner: Optional[np.ndarray] = None,
) -> np.ndarray:
    """Synthesize a T-frame clip from one source image and one fixed transform.

    Frame 0 of recursive kinds is the source itself; every later frame
    applies the per-step function to its predecessor.  Windowed kinds cut
    their step-i window out of the original source instead (resized back to
    the source side), and cutmix composites the partner image through the
    moving window.  Windowed kinds require square sources.
    """
    if num_frames < 2:
        raise ValueError("num_frames must be >= 2")
    expected = expected_param_type(kind)
    if not isinstance(params, expected):
        raise TypeError(f"{kind} expects {expected.__name__}, got {type(params).__name__}")
    src = np.ascontiguousarray(source, dtype=np.float32)
    h, w = src.shape[:2]

    if kind in RECURSIVE_KINDS:
        frames = [src.copy()]
        for i in range(1, num_frames):
            frames.append(recursive_step(kind, params, frames[-1], i, num_frames))
        if kind is TransformKind.FADE_IN_OUT and params.direction == "in":
            frames.reverse()
        return np.stack(frames)

    if h != w:
        raise InvalidTrajectoryError("windowed kinds require square sources")
    size = h
    if kind is TransformKind.CUTMIX:
        mate = src if partner is None else np.ascontiguousarray(partner, dtype=np.float32)
        if mate.shape != src.shape:
            raise InvalidTrajectoryError("cutmix partner must match the source shape")
        frames = []
        for i in range(num_frames):
            x0, y0, side, _ = window_rect(params, i, num_frames, size)
            xi = int(round(x0))
            yi = int(round(y0))
            wi = int(side)
            frame = src.copy()
            frame[yi : yi + wi, xi : xi + wi] = mate[yi : yi + wi, xi : xi + wi]
            frames.append(frame)
        return np.stack(frames)

    frames = []
    for i in range(num_frames):
        rect = window_rect(params, i, num_frames, size)
        frames.append(crop_resize(src, rect, size))
    return np.stack(frames)


# ---------------------------------------------------------------------------
# Seeded sampling and replay
# ---------------------------------------------------------------------------

def _generate_from_seed(
    sources: Sequence[np.ndarray],
    tset: TransformSet,
    num_frames: int,
    ranges: ParamRanges,
    seed: int,
) -> tuple[np.ndarray, ClipRecipe]:
    rng = np.random.default_rng(seed)
    source_id = int(rng.integers(0, len(sources)))
    source = sources[source_id]
    kind = tset.kinds[int(rng.choice(len(tset.kinds), p=np.asarray(tset.weights) / sum(tset.weights)))]
    size = min(source.shape[0], source.shape[1])
    params = sample_params(kind, ranges, size, rng)

    partner_id = None
    partner = None
    if kind is TransformKind.CUTMIX:
        n = len(sources)
        if n > 1:
            partner_id = int(rng.integers(0, n - 1))
            if partner_id >= source_id:
                partner_id += 1
        else:
            partner_id = source_id
        params = with_partner(params, partner_id)
        partner = sources[partner_id]

    clip = generate_clip(source, kind, params, num_frames, partner=partner)
    recipe = ClipRecipe(
        seed=int(seed),
        num_frames=num_frames,
        kinds=tuple(k.value for k in tset.kinds),
        weights=tuple(tset.weights),
        ranges=ranges_to_dict(ranges),
        source_id=source_id,
        partner_id=partner_id,
        kind=kind.value,
        params=params_to_dict(params),
    )
    return clip, recipe


def sample_clip(
    sources: Sequence[np.ndarray],
    tset: TransformSet,
    num_frames: int,
    ranges: ParamRanges,
    rng: np.random.Generator,
) -> tuple[np.ndarray, ClipRecipe]:
    """Draw one clip: uniform source, weighted kind, one parameter record.

    A fresh sub-seed is drawn from `rng` and recorded in the recipe; all
    further choices derive from it, which keeps the recipe self-contained.
    """
    if not sources:
        raise MissingSourceError("source pool is empty")
    sub_seed = int(rng.integers(0, 2**63 - 1))
    return _generate_from_seed(sources, tset, num_frames, ranges, sub_seed)


def replay(recipe: ClipRecipe, sources: Sequence[np.ndarray]) -> np.ndarray:
    """Regenerate a clip from its recipe against the original source pool."""
    if recipe.source_id >= len(sources):
        raise MissingSourceError(
            f"recipe references source {recipe.source_id} but pool has {len(sources)}"
        )
    if recipe.partner_id is not None and recipe.partner_id >= len(sources):
        raise MissingSourceError(
            f"recipe references partner {recipe.partner_id} but pool has {len(sources)}"
        )
    tset = TransformSet(
        kinds=tuple(TransformKind(k) for k in recipe.kinds),
        weights=tuple(recipe.weights),
    )
    clip, _ = _generate_from_seed(
        sources, tset, recipe.num_frames, ranges_from_dict(recipe.ranges), recipe.seed
    )
    return clip
