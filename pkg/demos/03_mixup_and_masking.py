#!/usr/bin/env python3
"""Clip mixing and tube masking.

Shows a mixup of two generated clips, a videomix cut, and the tube-mask
geometry (same spatial cells hidden in every frame), plus the normalized
reconstruction targets.  Output: demos/output/mixing_masking.png.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pseudomotion import (
    ParamRanges,
    TransformKind,
    apply_mask,
    default_transform_set,
    gen_pattern,
    gen_perlin,
    PerlinSpec,
    make_patch_grid,
    make_transform_set,
    mixup_clips,
    patchify,
    sample_clip,
    sample_tube_mask,
    sample_videomix_box,
    unpatchify,
    videomix_clips,
)

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

SIZE, FRAMES = 224, 16
pool = [
    gen_pattern("random-blobs", SIZE, seed=1),
    gen_perlin(PerlinSpec(cell_size=28, octaves=4, seed=2), SIZE),
    gen_pattern("radial-gradient", SIZE),
]
rng = np.random.default_rng(8)
tset = default_transform_set()
ranges = ParamRanges()

clip_a, _ = sample_clip(pool, tset, FRAMES, ranges, rng)
clip_b, _ = sample_clip(pool, tset, FRAMES, ranges, rng)
mixed = mixup_clips(clip_a, clip_b, 0.6)
box = sample_videomix_box(SIZE, SIZE, rng)
cut = videomix_clips(clip_a, clip_b, box)

grid = make_patch_grid(FRAMES, SIZE, SIZE, 3)
mask = sample_tube_mask(grid, 0.75, rng)
tokens = patchify(mixed, grid)
sample = apply_mask(tokens, mask, grid)
print(f"tokens: {grid.token_count}, visible: {sample.visible.shape[0]}, "
      f"masked targets: {sample.targets.shape[0]}")

# paint masked tubes gray for display
display = tokens.copy()
display[mask.token_mask()] = 0.5
masked_view = unpatchify(display, grid)

rows = [
    ("clip A (t=0/8/15)", clip_a),
    ("clip B", clip_b),
    ("mixup 0.6A + 0.4B", mixed),
    (f"videomix box {box.width}x{box.height}", cut),
    ("tube mask at 0.75 (gray = hidden)", masked_view),
]
fig, axes = plt.subplots(len(rows), 3, figsize=(9, 3 * len(rows)))
for r, (title, clip) in enumerate(rows):
    for c, t in enumerate((0, 8, 15)):
        axes[r, c].imshow(np.clip(clip[t], 0, 1))
        axes[r, c].axis("off")
    axes[r, 0].set_title(title, loc="left", fontsize=10)
fig.tight_layout()
fig.savefig(OUT / "mixing_masking.png", dpi=100)
print(f"wrote {OUT / 'mixing_masking.png'}")

targets = sample.targets
print(f"normalized target stats: mean {targets.mean():+.2e}, std {targets.std():.4f}")
