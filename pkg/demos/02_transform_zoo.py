#!/usr/bin/env python3
"""Every clip transformation applied to the same source image.

Writes a strip of frames per transform kind to demos/output/transforms.png,
showing how one sampled parameter record evolves a static image into
pseudo motion.
"""

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np

from pseudomotion import (
    ParamRanges,
    TransformKind,
    gen_pattern,
    generate_clip,
    sample_params,
)
from pseudomotion.transforms import with_partner

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)

SIZE = 224
FRAMES = 16
SHOW = (0, 5, 10, 15)

source = gen_pattern("random-blobs", SIZE, seed=21)
partner = gen_pattern("checker", SIZE)
rng = np.random.default_rng(4)
ranges = ParamRanges()

kinds = list(TransformKind)
fig, axes = plt.subplots(len(kinds), len(SHOW), figsize=(3 * len(SHOW), 2.3 * len(kinds)))
for row, kind in enumerate(kinds):
    params = sample_params(kind, ranges, SIZE, rng)
    mate = None
    if kind is TransformKind.CUTMIX:
        params = with_partner(params, 1)
        mate = partner
    clip = generate_clip(source, kind, params, FRAMES, partner=mate)
    for col, t in enumerate(SHOW):
        ax = axes[row, col]
        ax.imshow(clip[t])
        ax.axis("off")
        if col == 0:
            ax.set_title(kind.value, loc="left", fontsize=10)
        else:
            ax.set_title(f"t={t}", fontsize=8)

fig.suptitle("one sampled parameter record per clip, frames 0/5/10/15")
fig.tight_layout()
fig.savefig(OUT / "transforms.png", dpi=100)
print(f"wrote {OUT / 'transforms.png'}")
