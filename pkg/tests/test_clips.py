import numpy as np
import pytest

from pseudomotion import (
    AffineParams,
    CutMixParams,
    FadeParams,
    IdentityParams,
    InvalidTrajectoryError,
    MissingSourceError,
    ParamRanges,
    SlidingWindowParams,
    TransformKind,
    ZoomParams,
    crop_resize,
    default_transform_set,
    frame_difference,
    generate_clip,
    make_transform_set,
    recursive_step,
    replay,
    sample_clip,
    validate_clip,
    warp_affine,
    window_rect,
)


def test_identity_clip_is_constant(blobs32):
    clip = generate_clip(blobs32, TransformKind.IDENTITY, IdentityParams(), 16)
    assert clip.shape == (16, 32, 32, 3)
    for frame in clip[1:]:
        assert np.array_equal(frame, clip[0])
    assert frame_difference(clip) == 0.0


def test_affine_recursion_composes_warps(blobs32):
    params = AffineParams(angle=10.0, translate=(0.0, 0.0), scale=1.0, shear=0.0)
    clip = generate_clip(blobs32, TransformKind.AFFINE, params, 3)
    once = warp_affine(blobs32, 10.0, (0.0, 0.0), 1.0, 0.0)
    twice = warp_affine(once, 10.0, (0.0, 0.0), 1.0, 0.0)
    assert np.array_equal(clip[1], once)
    assert np.array_equal(clip[2], twice)


def test_zoom_out_window_schedule_is_linear(blobs64):
    params = ZoomParams(direction="out", start_frac=0.3, end_frac=0.8)
    clip = generate_clip(blobs64, TransformKind.ZOOM_IN_OUT, params, 16)
    size = 64
    for i in range(16):
        frac = 0.3 + 0.5 * i / 15.0
        side = frac * size
        origin = (size - side) / 2.0
        expected = crop_resize(blobs64, (origin, origin, side, side), size)
        assert np.array_equal(clip[i], expected)


def test_zoom_in_reverses_zoom_out(blobs64):
    out_params = ZoomParams(direction="out", start_frac=0.3, end_frac=0.8)
    in_params = ZoomParams(direction="in", start_frac=0.3, end_frac=0.8)
    zoom_out = generate_clip(blobs64, TransformKind.ZOOM_IN_OUT, out_params, 8)
    zoom_in = generate_clip(blobs64, TransformKind.ZOOM_IN_OUT, in_params, 8)
    assert np.array_equal(zoom_in, zoom_out[::-1])


def test_fade_out_recursion_and_endpoints(blobs32):
    clip = generate_clip(blobs32, TransformKind.FADE_IN_OUT, FadeParams("out"), 16)
    assert np.array_equal(clip[0], blobs32)
    assert np.array_equal(clip[-1], np.zeros_like(blobs32))
    for i in range(1, 16):
        step = recursive_step(TransformKind.FADE_IN_OUT, FadeParams("out"), clip[i - 1], i, 16)
        assert np.array_equal(clip[i], step)


def test_fade_in_is_reversed_fade_out(blobs32):
    fade_out = generate_clip(blobs32, TransformKind.FADE_IN_OUT, FadeParams("out"), 16)
    fade_in = generate_clip(blobs32, TransformKind.FADE_IN_OUT, FadeParams("in"), 16)
    assert np.array_equal(fade_in, fade_out[::-1])
    assert np.array_equal(fade_in[0], np.zeros_like(blobs32))


def test_recursive_kinds_satisfy_stepwise_recursion(blobs32):
    rng = np.random.default_rng(21)
    ranges = ParamRanges()
    from pseudomotion import sample_params

    for kind in (
        TransformKind.AFFINE,
        TransformKind.PERSPECTIVE,
        TransformKind.COLOR_JITTER,
    ):
        params = sample_params(kind, ranges, 32, rng)
        clip = generate_clip(blobs32, kind, params, 8)
        for i in range(1, 8):
            assert np.array_equal(clip[i], recursive_step(kind, params, clip[i - 1], i, 8))


def test_recursive_suffix_regenerates(blobs32):
    params = AffineParams(angle=5.0, translate=(0.005, 0.0), scale=1.0, shear=0.5)
    clip = generate_clip(blobs32, TransformKind.AFFINE, params, 10)
    suffix = generate_clip(clip[4], TransformKind.AFFINE, params, 6)
    assert np.array_equal(suffix, clip[4:])


def test_sliding_window_frames_reproducible_from_rects(blobs64):
    params = SlidingWindowParams(window=32, start=(5.0, 9.0), step=(2.0, -1.0))
    clip = generate_clip(blobs64, TransformKind.SLIDING_WINDOW, params, 8)
    for i in range(8):
        rect = window_rect(params, i, 8, 64)
        assert np.array_equal(clip[i], crop_resize(blobs64, rect, 64))


def test_sliding_window_clamps_at_bounds(blobs64):
    params = SlidingWindowParams(window=32, start=(30.0, 0.0), step=(5.0, 0.0))
    rect = window_rect(params, 7, 8, 64)
    assert rect[0] == 32.0  # free room is 64 - 32


def test_sliding_window_invalid_start_rejected(blobs64):
    params = SlidingWindowParams(window=32, start=(40.0, 0.0), step=(0.0, 0.0))
    with pytest.raises(InvalidTrajectoryError):
        generate_clip(blobs64, TransformKind.SLIDING_WINDOW, params, 4)


def test_cutmix_pixels_come_from_exactly_one_image(blobs64):
    partner = np.zeros_like(blobs64)
    params = CutMixParams(window=32, partner=1, start=(8.0, 8.0), step=(1.0, 0.0))
    clip = generate_clip(blobs64, TransformKind.CUTMIX, params, 6, partner=partner)
    for i in range(6):
        x0, y0, side, _ = window_rect(params, i, 6, 64)
        xi, yi, wi = int(round(x0)), int(round(y0)), int(side)
        frame = clip[i]
        assert np.array_equal(frame[yi : yi + wi, xi : xi + wi], partner[yi : yi + wi, xi : xi + wi])
        outside = frame.copy()
        outside[yi : yi + wi, xi : xi + wi] = blobs64[yi : yi + wi, xi : xi + wi]
        assert np.array_equal(outside, blobs64)


def test_cutmix_defaults_to_source_partner(blobs64):
    params = CutMixParams(window=32, partner=None, start=(0.0, 0.0), step=(0.0, 0.0))
    clip = generate_clip(blobs64, TransformKind.CUTMIX, params, 4)
    for frame in clip:
        assert np.array_equal(frame, blobs64)


def test_windowed_kinds_require_square():
    src = np.zeros((32, 48, 3), dtype=np.float32)
    params = ZoomParams(direction="out", start_frac=0.3, end_frac=0.8)
    with pytest.raises(InvalidTrajectoryError):
        generate_clip(src, TransformKind.ZOOM_IN_OUT, params, 4)


def test_param_type_checked(blobs32):
    with pytest.raises(TypeError):
        generate_clip(blobs32, TransformKind.AFFINE, IdentityParams(), 4)


# ---------------------------------------------------------------------------
# Seeded sampling and replay
# ---------------------------------------------------------------------------

def _pool():
    from pseudomotion import gen_pattern

    return [gen_pattern("random-blobs", 32, seed=s) for s in range(4)]


def test_identity_only_set_yields_constant_clips():
    pool = _pool()
    tset = make_transform_set((TransformKind.IDENTITY,))
    clip, recipe = sample_clip(pool, tset, 8, ParamRanges(), np.random.default_rng(3))
    assert frame_difference(clip) == 0.0
    assert recipe.kind == "identity"


def test_degenerate_weights_always_pick_affine():
    pool = _pool()
    tset = make_transform_set(
        (TransformKind.AFFINE, TransformKind.ZOOM_IN_OUT), weights=(1.0, 0.0)
    )
    rng = np.random.default_rng(4)
    for _ in range(200):
        _, recipe = sample_clip(pool, tset, 2, ParamRanges(), rng)
        assert recipe.kind == "affine"


def test_sample_clip_deterministic_given_seed():
    pool = _pool()
    tset = default_transform_set()
    a_clip, a_rec = sample_clip(pool, tset, 8, ParamRanges(), np.random.default_rng(42))
    b_clip, b_rec = sample_clip(pool, tset, 8, ParamRanges(), np.random.default_rng(42))
    assert np.array_equal(a_clip, b_clip)
    assert a_rec == b_rec


def test_replay_reproduces_clip_bitwise():
    pool = _pool()
    tset = make_transform_set(tuple(TransformKind))
    rng = np.random.default_rng(5)
    for _ in range(12):
        clip, recipe = sample_clip(pool, tset, 6, ParamRanges(), rng)
        assert np.array_equal(replay(recipe, pool), clip)


def test_replay_identity_two_frames():
    pool = _pool()
    tset = make_transform_set((TransformKind.IDENTITY,))
    clip, recipe = sample_clip(pool, tset, 2, ParamRanges(), np.random.default_rng(6))
    assert clip.shape[0] == 2
    assert np.array_equal(clip[0], clip[1])
    assert np.array_equal(replay(recipe, pool), clip)


def test_tampered_seed_changes_clip():
    import dataclasses

    pool = _pool()
    tset = default_transform_set()
    clip, recipe = sample_clip(pool, tset, 8, ParamRanges(), np.random.default_rng(7))
    tampered = dataclasses.replace(recipe, seed=recipe.seed ^ 1)
    assert not np.array_equal(replay(tampered, pool), clip)


def test_replay_missing_source_rejected():
    pool = _pool()
    tset = default_transform_set()
    _, recipe = sample_clip(pool, tset, 4, ParamRanges(), np.random.default_rng(8))
    with pytest.raises(MissingSourceError):
        replay(recipe, pool[: recipe.source_id])


def test_recipe_roundtrips_through_dict():
    from pseudomotion import ClipRecipe

    pool = _pool()
    tset = make_transform_set(tuple(TransformKind))
    rng = np.random.default_rng(9)
    for _ in range(8):
        clip, recipe = sample_clip(pool, tset, 4, ParamRanges(), rng)
        rebuilt = ClipRecipe.from_dict(recipe.to_dict())
        assert rebuilt == recipe
        assert np.array_equal(replay(rebuilt, pool), clip)


def test_cutmix_partner_distinct_when_possible():
    pool = _pool()
    tset = make_transform_set((TransformKind.CUTMIX,))
    rng = np.random.default_rng(10)
    for _ in range(50):
        _, recipe = sample_clip(pool, tset, 2, ParamRanges(), rng)
        assert recipe.partner_id is not None
        assert recipe.partner_id != recipe.source_id


def test_cutmix_single_source_degenerates():
    pool = _pool()[:1]
    tset = make_transform_set((TransformKind.CUTMIX,))
    clip, recipe = sample_clip(pool, tset, 4, ParamRanges(), np.random.default_rng(11))
    assert recipe.partner_id == recipe.source_id == 0
    validate_clip(clip)


def test_all_kinds_produce_valid_clips():
    pool = _pool()
    tset = make_transform_set(tuple(TransformKind))
    rng = np.random.default_rng(12)
    seen = set()
    for _ in range(120):
        clip, recipe = sample_clip(pool, tset, 4, ParamRanges(), rng)
        validate_clip(clip)
        seen.add(recipe.kind)
    assert seen == {k.value for k in TransformKind}
