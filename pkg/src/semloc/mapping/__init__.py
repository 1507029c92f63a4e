"""Sparse semantic map: building, retrieval vocabulary, and serialization."""

from .build import (
    FeatureObservation,
    MapBuildConfig,
    MapFrameInput,
    build_map,
)
from .sparse_map import (
    MAP_FORMAT_VERSION,
    Keyframe,
    Landmark,
    SparseMap,
    load_map,
    query_candidates,
    save_map,
)
from .vocabulary import (
    DEFAULT_VOCABULARY_K,
    Vocabulary,
    bow_vector,
    build_vocabulary,
    cosine_similarity,
)

__all__ = [
    "DEFAULT_VOCABULARY_K",
    "MAP_FORMAT_VERSION",
    "FeatureObservation",
    "Keyframe",
    "Landmark",
    "MapBuildConfig",
    "MapFrameInput",
    "SparseMap",
    "Vocabulary",
    "bow_vector",
    "build_map",
    "build_vocabulary",
    "cosine_similarity",
    "load_map",
    "query_candidates",
    "save_map",
]
