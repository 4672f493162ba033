"""Deterministic pseudo-motion video synthesis from static images.

The library turns single images (loaded from disk or procedurally
generated) into short videos by recursively applying one sampled image
transformation per clip, mixes clips for diversity, tokenizes them with
tube masks for masked video modeling, and scores clips by frame difference
and patch trackability.  Everything is a pure function of explicit seeds.
"""

from .analysis import ClipStats, clip_stats, frame_difference, gap_differences, min_patch_msd, partition_by_difference, trackability
from .augment import MixupParams, VideoMixBox, mixup_clips, sample_mixup_lambda, sample_videomix_box, videomix_clips
from .clips import (
    ClipRecipe,
    TransformSet,
    default_transform_set,
    generate_clip,
    make_transform_set,
    recursive_step,
    replay,
    sample_clip,
    validate_clip,
    window_rect,
)
from .errors import (
    DegenerateHomographyError,
    DegenerateRatioError,
    GeometryError,
    InvalidRectError,
    InvalidSourceError,
    InvalidSystemError,
    InvalidTrajectoryError,
    MissingSourceError,
    PseudoMotionError,
    ShapeMismatchError,
    SourceEmptyError,
)
from .masking import (
    MaskedSample,
    PatchGrid,
    TubeMask,
    apply_mask,
    make_patch_grid,
    make_targets,
    patchify,
    sample_tube_mask,
    unpatchify,
)
from .pipeline import (
    Manifest,
    PipelineConfig,
    SourceSpec,
    build_sources,
    derive_clip_seed,
    load_dataset,
    replay_row,
    run_analyze,
    run_export_frames,
    run_generate,
)
from .sources import (
    IfsSystem,
    PerlinSpec,
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
    ZoomParams,
    bilinear_sample,
    color_jitter,
    crop_resize,
    fade_step,
    sample_params,
    solve_homography,
    warp_affine,
    warp_perspective,
)

__version__ = "0.1.0"
