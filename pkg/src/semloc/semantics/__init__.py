"""Semantic classes, detections, masking, labelling, and class-aware matching."""

from .boxes import (
    DEFAULT_MIN_CONFIDENCE,
    BoundingBox,
    DetectionSet,
    load_detections,
    save_detections,
)
from .classes import DEFAULT_CLASS_NAMES, REGISTRY_SIZE, ClassRegistry, SemanticClass
from .filtering import filter_matches_by_class, match_per_class
from .labeling import label_keypoints
from .masking import build_mask

__all__ = [
    "DEFAULT_CLASS_NAMES",
    "DEFAULT_MIN_CONFIDENCE",
    "REGISTRY_SIZE",
    "BoundingBox",
    "ClassRegistry",
    "DetectionSet",
    "SemanticClass",
    "build_mask",
    "filter_matches_by_class",
    "label_keypoints",
    "load_detections",
    "match_per_class",
    "save_detections",
]
