#!/usr/bin/env python3
"""Tour of the source-image generators.

Renders a gallery of procedural images (IFS fractals, gradient noise,
patterns) into demos/output/sources.png.  Every panel is a pure function of
its seed, so re-running this script reproduces the same gallery.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pseudomotion import (
    IfsSystem,
    PerlinSpec,
    gen_fractal_ifs,
    gen_pattern,
    gen_perlin,
    ifs_bounding_radius,
    random_ifs,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

SIZE = 224

sierpinski = IfsSystem(
    maps=tuple(
        (np.array([[0.5, 0.0], [0.0, 0.5]]), np.array([v[0] / 2, v[1] / 2]))
        for v in ((0.0, 0.0), (1.0, 0.0), (0.5, 1.0))
    ),
    weights=(1 / 3, 1 / 3, 1 / 3),
)

panels = [
    ("sierpinski IFS", gen_fractal_ifs(sierpinski, 200_000, SIZE, seed=0)),
    ("random IFS #1", gen_fractal_ifs(random_ifs(np.random.default_rng(1)), 200_000, SIZE, seed=1)),
    ("random IFS #2", gen_fractal_ifs(random_ifs(np.random.default_rng(5)), 200_000, SIZE, seed=5)),
    ("perlin, 4 octaves", gen_perlin(PerlinSpec(cell_size=32, octaves=4, persistence=0.5, seed=2), SIZE)),
    ("perlin, 1 octave", gen_perlin(PerlinSpec(cell_size=32, octaves=1, seed=2), SIZE)),
    ("checker", gen_pattern("checker", SIZE)),
    ("radial gradient", gen_pattern("radial-gradient", SIZE)),
    ("random blobs", gen_pattern("random-blobs", SIZE, seed=3)),
]

fig, axes = plt.subplots(2, 4, figsize=(14, 7))
for ax, (title, img) in zip(axes.ravel(), panels):
    ax.imshow(img)
    ax.set_title(title, fontsize=9)
    ax.axis("off")
fig.suptitle("procedural source images (deterministic per seed)")
fig.tight_layout()
fig.savefig(OUT / "sources.png", dpi=110)
print(f"wrote {OUT / 'sources.png'}")

print(f"sierpinski orbit bounding radius: {ifs_bounding_radius(sierpinski):.4f}")
