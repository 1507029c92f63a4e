"""Assign class labels to keypoints from detection boxes."""

from __future__ import annotations

import numpy as np

from .boxes import BoundingBox, DetectionSet


def label_keypoints(coordinates: np.ndarray, detections: DetectionSet) -> list[int | None]:
    """Label each (x, y) point with the class id of the box that owns it.

    coordinates: (N, 2) array of pixel positions.  Containment is inclusive
    of box edges.  When boxes overlap, the smallest-area box wins; area ties
    go to the higher-confidence box, and exact ties after that to the lower
    class id, so labelling is deterministic.  Points in no box get None.
    """
    coordinates = np.asarray(coordinates, dtype=float)
    if coordinates.ndim != 2 or coordinates.shape[1] != 2:
        raise ValueError("coordinates must be an (N, 2) array")

    def order_key(box: BoundingBox) -> tuple[float, float, int]:
        return (box.area(), -box.confidence, box.semantic_class.id)

    ranked = sorted(detections.boxes, key=order_key)
    labels: list[int | None] = []
    for x, y in coordinates:
        label: int | None = None
        for box in ranked:
            if box.contains(x, y):
                label = box.semantic_class.id
                break
        labels.append(label)
    return labels
