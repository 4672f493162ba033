import numpy as np
import pytest

from oracles import partition_oracle, trackability_oracle
from pseudomotion import (
    FadeParams,
    IdentityParams,
    SlidingWindowParams,
    TransformKind,
    frame_difference,
    gen_pattern,
    generate_clip,
    min_patch_msd,
    partition_by_difference,
    trackability,
)


def test_identity_clip_difference_zero(blobs32):
    clip = generate_clip(blobs32, TransformKind.IDENTITY, IdentityParams(), 8)
    assert frame_difference(clip) == 0.0


def test_two_constant_frames_difference_one():
    clip = np.stack(
        [np.zeros((8, 8, 3), dtype=np.float32), np.ones((8, 8, 3), dtype=np.float32)]
    )
    assert frame_difference(clip) == 1.0


def test_fade_out_constant_image_mean_gap():
    c = 0.75
    img = np.full((16, 16, 3), c, dtype=np.float32)
    clip = generate_clip(img, TransformKind.FADE_IN_OUT, FadeParams("out"), 16)
    assert frame_difference(clip) == pytest.approx(c / 15.0, abs=1e-6)


def test_difference_invariant_under_reversal():
    rng = np.random.default_rng(0)
    clip = rng.random((6, 12, 12, 3)).astype(np.float32)
    assert frame_difference(clip) == pytest.approx(frame_difference(clip[::-1]), abs=0)


# ---------------------------------------------------------------------------
# Partitions
# ---------------------------------------------------------------------------

def test_partition_small_case():
    top, mid, bottom = partition_by_difference([1.0, 2.0, 3.0, 4.0])
    assert top == [2, 3]
    assert bottom == [0, 1]
    assert mid == [1, 2]


def test_partition_ties_stable_by_index():
    top, mid, bottom = partition_by_difference([5.0, 5.0, 5.0, 5.0])
    assert bottom == [0, 1]
    assert top == [2, 3]
    assert mid == [1, 2]


def test_partition_disjoint_halves():
    rng = np.random.default_rng(1)
    scores = rng.permutation(100).astype(float).tolist()
    top, mid, bottom = partition_by_difference(scores)
    assert set(top).isdisjoint(bottom)
    assert len(top) + len(bottom) == 100
    assert len(mid) == 50


def test_partition_matches_brute_force_oracle():
    rng = np.random.default_rng(2)
    for n in (4, 5, 7, 100, 101):
        scores = rng.random(n).tolist()
        assert partition_by_difference(scores) == partition_oracle(scores)


def test_partition_needs_four_scores():
    with pytest.raises(ValueError):
        partition_by_difference([1.0, 2.0, 3.0])


# ---------------------------------------------------------------------------
# Trackability
# ---------------------------------------------------------------------------

def test_identity_clip_fully_trackable(blobs32):
    clip = generate_clip(blobs32, TransformKind.IDENTITY, IdentityParams(), 4)
    assert trackability(clip, patch=8, radius=2, tau=1e-9) == 1.0


def test_noise_clip_matches_brute_force_oracle():
    rng = np.random.default_rng(3)
    clip = rng.random((3, 16, 16, 3)).astype(np.float32)
    score = trackability(clip, patch=8, radius=4, tau=0.01)
    ref_score, ref_msd = trackability_oracle(clip, patch=8, radius=4, tau=0.01)
    assert score == ref_score
    assert np.allclose(min_patch_msd(clip, 8, 4), ref_msd, atol=1e-12)


def test_textured_clip_matches_brute_force_oracle():
    src = gen_pattern("random-blobs", 32, seed=13)
    params = SlidingWindowParams(window=16, start=(4.0, 4.0), step=(1.5, -0.5))
    clip = generate_clip(src, TransformKind.SLIDING_WINDOW, params, 4)
    score = trackability(clip, patch=8, radius=3, tau=0.003)
    ref_score, ref_msd = trackability_oracle(clip, patch=8, radius=3, tau=0.003)
    assert score == ref_score
    assert np.allclose(min_patch_msd(clip, 8, 3), ref_msd, atol=1e-12)


def test_integer_sliding_window_interior_patches_track_exactly():
    # window 22 upscaled to 64 gives an exact 3x output/source step ratio, so
    # a 1px source step shifts output content by exactly 3px; every interior
    # patch then has a bit-near match at the known displacement
    src = gen_pattern("random-blobs", 64, seed=14)
    params = SlidingWindowParams(window=22, start=(8.0, 8.0), step=(1.0, 1.0))
    clip = generate_clip(src, TransformKind.SLIDING_WINDOW, params, 6)
    msd = min_patch_msd(clip, patch=8, radius=4)
    interior = msd[:, 1:-1, 1:-1]
    assert np.all(interior <= 1e-10)
    # ground truth: frame i+1 equals frame i shifted by (-3, -3) on the overlap
    for g in range(5):
        shifted = clip[g, 3:, 3:]
        assert np.allclose(clip[g + 1, :-3, :-3], shifted, atol=1e-6)


def test_trackability_monotone_in_tau_and_radius():
    rng = np.random.default_rng(4)
    for _ in range(20):
        size = 16
        clip = rng.random((3, size, size, 3)).astype(np.float32)
        taus = (1e-4, 1e-3, 1e-2, 1e-1)
        scores = [trackability(clip, patch=8, radius=2, tau=t) for t in taus]
        assert all(a <= b for a, b in zip(scores, scores[1:]))
        radii = (0, 1, 2, 4)
        scores_r = [trackability(clip, patch=8, radius=r, tau=1e-2) for r in radii]
        assert all(a <= b for a, b in zip(scores_r, scores_r[1:]))


def test_trackability_validates_geometry():
    clip = np.zeros((2, 16, 16, 3), dtype=np.float32)
    with pytest.raises(ValueError):
        trackability(clip, patch=5)
    with pytest.raises(ValueError):
        trackability(clip, patch=8, radius=-1)
