import numpy as np
import pytest
from PIL import Image as PILImage

from oracles import chaos_game_oracle
from pseudomotion import (
    IfsSystem,
    InvalidSystemError,
    PerlinSpec,
    SourceEmptyError,
    chaos_game_points,
    gen_fractal_ifs,
    gen_pattern,
    gen_perlin,
    ifs_bounding_radius,
    load_image_dir,
    perlin_octave,
    random_ifs,
    validate_image,
)

SIERPINSKI_VERTICES = [(0.0, 0.0), (1.0, 0.0), (0.5, 1.0)]


def sierpinski():
    maps = tuple(
        (np.array([[0.5, 0.0], [0.0, 0.5]]), np.array([vx / 2.0, vy / 2.0]))
        for vx, vy in SIERPINSKI_VERTICES
    )
    return IfsSystem(maps=maps, weights=(1 / 3, 1 / 3, 1 / 3))


# ---------------------------------------------------------------------------
# Directory loading
# ---------------------------------------------------------------------------

def _write_png(path, value, size=24):
    arr = np.full((size, size, 3), value, dtype=np.uint8)
    PILImage.fromarray(arr).save(path)


def test_load_dir_exhaustive_without_replacement(tmp_path):
    for i, v in enumerate((10, 120, 240)):
        _write_png(tmp_path / f"img_{i}.png", v)
    images = load_image_dir(tmp_path, count=3, target_size=8, seed=5)
    means = sorted(round(float(im.mean()) * 255) for im in images)
    assert means == [10, 120, 240]


def test_load_dir_single_file_forces_replacement(tmp_path):
    _write_png(tmp_path / "only.png", 77)
    images = load_image_dir(tmp_path, count=2, target_size=8, seed=0)
    assert len(images) == 2
    assert np.array_equal(images[0], images[1])


def test_load_dir_deterministic(tmp_path):
    for i in range(5):
        _write_png(tmp_path / f"f{i}.png", 40 * i)
    a = load_image_dir(tmp_path, count=3, target_size=8, seed=9)
    b = load_image_dir(tmp_path, count=3, target_size=8, seed=9)
    for x, y in zip(a, b):
        assert np.array_equal(x, y)


def test_load_dir_empty_raises(tmp_path):
    with pytest.raises(SourceEmptyError):
        load_image_dir(tmp_path, count=1, target_size=8, seed=0)


def test_load_dir_skips_undecodable(tmp_path):
    (tmp_path / "broken.png").write_bytes(b"not a png at all")
    _write_png(tmp_path / "good.png", 128)
    with pytest.warns(UserWarning):
        images = load_image_dir(tmp_path, count=1, target_size=8, seed=0)
    assert len(images) == 1


def test_load_dir_only_undecodable_raises(tmp_path):
    (tmp_path / "broken.png").write_bytes(b"nope")
    with pytest.warns(UserWarning):
        with pytest.raises(SourceEmptyError):
            load_image_dir(tmp_path, count=1, target_size=8, seed=0)


# ---------------------------------------------------------------------------
# IFS fractals
# ---------------------------------------------------------------------------

def test_single_contraction_collapses_to_fixed_point():
    system = IfsSystem(
        maps=((np.array([[0.5, 0.0], [0.0, 0.5]]), np.array([0.0, 0.0])),),
        weights=(1.0,),
    )
    image = gen_fractal_ifs(system, iterations=5000, size=33, seed=4)
    # all retained points sit at the attractor's unique fixed point
    assert int(np.count_nonzero(image[:, :, 0])) == 1


def test_sierpinski_nonzero_pixels_inside_triangle_bbox():
    system = sierpinski()
    size = 64
    image = gen_fractal_ifs(system, iterations=100_100, size=size, seed=12)
    radius = ifs_bounding_radius(system)
    ys, xs = np.nonzero(image[:, :, 0])
    # map pixel centers back to the plane
    px = -radius + (xs + 0.5) * (2 * radius / size)
    py = -radius + (ys + 0.5) * (2 * radius / size)
    pixel = 2 * radius / size
    assert px.min() >= 0.0 - pixel and px.max() <= 1.0 + pixel
    assert py.min() >= 0.0 - pixel and py.max() <= 1.0 + pixel

    # independent brute-force orbit stays inside the triangle (barycentric check)
    pts = chaos_game_oracle([(m, t) for m, t in system.maps], system.weights, 100_100, seed=12)
    (ax, ay), (bx, by), (cx, cy) = SIERPINSKI_VERTICES
    den = (by - cy) * (ax - cx) + (cx - bx) * (ay - cy)
    l1 = ((by - cy) * (pts[:, 0] - cx) + (cx - bx) * (pts[:, 1] - cy)) / den
    l2 = ((cy - ay) * (pts[:, 0] - cx) + (ax - cx) * (pts[:, 1] - cy)) / den
    l3 = 1.0 - l1 - l2
    tol = 1e-9
    assert np.all(l1 >= -tol) and np.all(l2 >= -tol) and np.all(l3 >= -tol)


def test_fractal_deterministic():
    system = sierpinski()
    a = gen_fractal_ifs(system, iterations=20_000, size=48, seed=3)
    b = gen_fractal_ifs(system, iterations=20_000, size=48, seed=3)
    assert np.array_equal(a, b)


def test_noncontractive_map_rejected():
    with pytest.raises(InvalidSystemError):
        IfsSystem(maps=((np.eye(2), np.zeros(2)),), weights=(1.0,))


def test_bad_weights_rejected():
    m = ((np.eye(2) * 0.5, np.zeros(2)),)
    with pytest.raises(InvalidSystemError):
        IfsSystem(maps=m, weights=(0.5,))


def test_chaos_game_orbit_stays_in_bounding_ball():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        system = random_ifs(rng)
        pts = chaos_game_points(system, iterations=5000, seed=seed)
        radius = ifs_bounding_radius(system)
        assert np.all(np.hypot(pts[:, 0], pts[:, 1]) <= radius + 1e-9)


# ---------------------------------------------------------------------------
# Gradient noise
# ---------------------------------------------------------------------------

def test_perlin_zero_at_lattice_points():
    rng = np.random.default_rng(0)
    raw = perlin_octave(64, 16.0, rng)
    lattice = raw[::16, ::16]
    assert np.allclose(lattice, 0.0, atol=1e-15)


def test_perlin_minmax_normalized():
    image = gen_perlin(PerlinSpec(cell_size=8, octaves=3, persistence=0.5, seed=2), 64)
    assert image.min() == 0.0
    assert image.max() == 1.0


def test_perlin_deterministic():
    spec = PerlinSpec(cell_size=16, octaves=4, persistence=0.6, seed=42)
    assert np.array_equal(gen_perlin(spec, 48), gen_perlin(spec, 48))


def test_perlin_spec_validation():
    with pytest.raises(ValueError):
        PerlinSpec(cell_size=1)
    with pytest.raises(ValueError):
        PerlinSpec(octaves=0)


# ---------------------------------------------------------------------------
# Patterns
# ---------------------------------------------------------------------------

def test_checker_cells():
    image = gen_pattern("checker", 64)
    assert image[0, 0, 0] == 1.0
    assert image[0, 16, 0] == 0.0
    assert image[16, 0, 0] == 0.0
    assert image[16, 16, 0] == 1.0


def test_radial_center_is_one():
    image = gen_pattern("radial-gradient", 63)
    assert image[31, 31, 0] == 1.0
    image = gen_pattern("radial-gradient", 64)
    assert image[32, 32, 0] == 1.0


def test_blobs_deterministic():
    assert np.array_equal(
        gen_pattern("random-blobs", 32, seed=5), gen_pattern("random-blobs", 32, seed=5)
    )


def test_pattern_validation():
    with pytest.raises(ValueError):
        gen_pattern("spiral", 64)
    with pytest.raises(ValueError):
        gen_pattern("checker", 8)


# ---------------------------------------------------------------------------
# Generator invariants
# ---------------------------------------------------------------------------

def test_all_generators_satisfy_image_invariants():
    rng = np.random.default_rng(99)
    count = 0
    for i in range(340):
        validate_image(gen_pattern("random-blobs", 16 + int(rng.integers(0, 17)), seed=i))
        spec = PerlinSpec(
            cell_size=float(rng.uniform(2, 12)),
            octaves=int(rng.integers(1, 5)),
            persistence=float(rng.uniform(0.2, 1.0)),
            seed=i,
        )
        validate_image(gen_perlin(spec, 16 + int(rng.integers(0, 17))))
        system = random_ifs(rng)
        validate_image(gen_fractal_ifs(system, 1500, 16 + int(rng.integers(0, 17)), seed=i))
        count += 3
    assert count >= 1000
