"""Rasterize detection boxes into boolean masks for detector gating."""

from __future__ import annotations

import math

import numpy as np

from .boxes import DetectionSet
from .classes import SemanticClass


def build_mask(
    detections: DetectionSet,
    image_shape: tuple[int, int],
    class_filter: SemanticClass | set[SemanticClass] | None = None,
) -> np.ndarray:
    """Boolean (H, W) array, True inside any (optionally class-filtered) box.

    Box edges are inclusive: a pixel centre exactly on x_max or y_max is
    inside.  image_shape is (height, width) to match array indexing.
    class_filter restricts the union to one class or a set of classes.
    """
    height, width = image_shape
    if isinstance(class_filter, SemanticClass):
        class_filter = {class_filter}
    mask = np.zeros((height, width), dtype=bool)
    for box in detections.boxes:
        if class_filter is not None and box.semantic_class not in class_filter:
            continue
        x0 = max(0, math.ceil(box.x_min))
        y0 = max(0, math.ceil(box.y_min))
        x1 = min(width - 1, math.floor(box.x_max))
        y1 = min(height - 1, math.floor(box.y_max))
        if x1 < x0 or y1 < y0:
            continue
        mask[y0 : y1 + 1, x0 : x1 + 1] = True
    return mask
