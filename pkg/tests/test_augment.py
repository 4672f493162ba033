import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudomotion import (
    ShapeMismatchError,
    VideoMixBox,
    mixup_clips,
    sample_mixup_lambda,
    sample_videomix_box,
    videomix_clips,
)


def _clip(value, t=4, size=8):
    return np.full((t, size, size, 3), value, dtype=np.float32)


def _random_clip(seed, t=4, size=8):
    return np.random.default_rng(seed).random((t, size, size, 3)).astype(np.float32)


def test_mixup_endpoints_exact():
    a = _random_clip(0)
    b = _random_clip(1)
    assert np.array_equal(mixup_clips(a, b, 1.0), a)
    assert np.array_equal(mixup_clips(a, b, 0.0), b)


def test_mixup_midpoint_of_constants():
    out = mixup_clips(_clip(0.2), _clip(0.6), 0.5)
    assert np.allclose(out, 0.4, atol=1e-6)


@given(num=st.integers(0, 1024))
@settings(max_examples=60, deadline=None)
def test_mixup_symmetry_exact_for_dyadic_lambda(num):
    # dyadic lambdas make 1 - (1 - lam) == lam exact, so both calls see the
    # same float weights and IEEE commutativity gives bitwise equality
    lam = num / 1024.0
    a = _random_clip(2)
    b = _random_clip(3)
    assert np.array_equal(mixup_clips(a, b, lam), mixup_clips(b, a, 1.0 - lam))


def test_mixup_shape_mismatch():
    with pytest.raises(ShapeMismatchError):
        mixup_clips(_clip(0.1), _clip(0.1, size=16), 0.5)


def test_mixup_preserves_range():
    rng = np.random.default_rng(4)
    for _ in range(50):
        a = _random_clip(int(rng.integers(1 << 30)))
        b = _random_clip(int(rng.integers(1 << 30)))
        lam = float(rng.random())
        out = mixup_clips(a, b, lam)
        assert 0.0 <= float(out.min()) and float(out.max()) <= 1.0
        assert out.shape == a.shape


def test_lambda_sampler_in_unit_interval():
    rng = np.random.default_rng(5)
    draws = [sample_mixup_lambda(1.0, rng) for _ in range(500)]
    assert all(0.0 <= v <= 1.0 for v in draws)
    with pytest.raises(ValueError):
        sample_mixup_lambda(0.0, rng)


def test_videomix_full_box_is_partner():
    a = _clip(0.0)
    b = _random_clip(6)
    out = videomix_clips(a, b, VideoMixBox(0, 0, 8, 8))
    assert np.array_equal(out, b)


def test_videomix_single_pixel_box():
    a = _clip(0.0)
    b = _clip(1.0)
    out = videomix_clips(a, b, VideoMixBox(3, 5, 1, 1))
    for frame in out:
        assert frame.sum() == 3.0  # one pixel, three channels
        assert frame[5, 3, 0] == 1.0


def test_videomix_left_half_mean():
    a = _clip(0.0)
    b = _clip(1.0)
    out = videomix_clips(a, b, VideoMixBox(0, 0, 4, 8))
    assert out.mean() == pytest.approx(0.5)


def test_videomix_pixels_bitwise_from_exactly_one_clip():
    a = _random_clip(7)
    b = _random_clip(8)
    box = VideoMixBox(2, 1, 3, 4)
    out = videomix_clips(a, b, box)
    from_a = out == a
    from_b = out == b
    assert np.all(from_a | from_b)
    inside = np.zeros(a.shape, dtype=bool)
    inside[:, box.y0 : box.y0 + box.height, box.x0 : box.x0 + box.width] = True
    assert np.all(from_b[inside])
    assert np.all(from_a[~inside])


def test_videomix_out_of_bounds_box():
    with pytest.raises(ValueError):
        videomix_clips(_clip(0.0), _clip(1.0), VideoMixBox(6, 6, 4, 4))
    with pytest.raises(ValueError):
        VideoMixBox(0, 0, 0, 4)


def test_videomix_box_sampler_in_bounds():
    rng = np.random.default_rng(9)
    for _ in range(200):
        box = sample_videomix_box(32, 48, rng)
        assert box.x0 + box.width <= 48
        assert box.y0 + box.height <= 32


def test_videomix_temporally_constant_cut():
    a = _random_clip(10)
    b = _random_clip(11)
    box = VideoMixBox(1, 2, 4, 3)
    out = videomix_clips(a, b, box)
    # the same spatial rectangle is replaced in every frame
    for t in range(a.shape[0]):
        region = out[t, box.y0 : box.y0 + box.height, box.x0 : box.x0 + box.width]
        assert np.array_equal(region, b[t, box.y0 : box.y0 + box.height, box.x0 : box.x0 + box.width])
