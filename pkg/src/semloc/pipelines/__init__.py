"""End-to-end estimators: relocalization and pairwise relative pose."""

from .modes import SemanticMode, derive_rng_seed
from .frames import (
    FrameFeatures,
    QueryFrame,
    extract_frame_features,
    map_frame_from_synthetic,
)
from .relocalize import (
    LocalizationResult,
    PooledMatch,
    RelocalizationParams,
    candidate_matches,
    dedup_matches,
    relocalize,
)
from .relative import (
    RelativePoseParams,
    RelativePoseResult,
    match_frames,
    normalized_coordinates,
    relative_pose,
)
from .pairing import most_similar, pair_selection

__all__ = [
    "FrameFeatures",
    "LocalizationResult",
    "PooledMatch",
    "QueryFrame",
    "RelativePoseParams",
    "RelativePoseResult",
    "RelocalizationParams",
    "SemanticMode",
    "candidate_matches",
    "dedup_matches",
    "derive_rng_seed",
    "extract_frame_features",
    "map_frame_from_synthetic",
    "match_frames",
    "most_similar",
    "normalized_coordinates",
    "pair_selection",
    "relative_pose",
    "relocalize",
]
