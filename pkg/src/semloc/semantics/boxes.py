"""Detection bounding boxes and their annotation-file representation.

Annotation files are JSON of the form::

    {"frame": 12, "boxes": [
        {"class": "vent", "box": [x_min, y_min, x_max, y_max], "confidence": 0.9},
        ...
    ]}
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field

from ..errors import AnnotationError
from .classes import ClassRegistry, SemanticClass

logger = logging.getLogger(__name__)

DEFAULT_MIN_CONFIDENCE = 0.5


@dataclass
class BoundingBox:
    semantic_class: SemanticClass
    x_min: float
    y_min: float
    x_max: float
    y_max: float
    confidence: float

    def __post_init__(self):
        if self.x_max < self.x_min or self.y_max < self.y_min:
            raise AnnotationError("box extents are inverted")
        if not (0.0 <= self.confidence <= 1.0):
            raise AnnotationError(f"confidence {self.confidence} outside [0, 1]")

    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max


@dataclass
class DetectionSet:
    frame_id: int
    boxes: list[BoundingBox] = field(default_factory=list)


def load_detections(
    path: str,
    registry: ClassRegistry,
    image_size: tuple[int, int],
    min_confidence: float = DEFAULT_MIN_CONFIDENCE,
) -> DetectionSet:
    """Parse one annotation file; boxes are clamped to the image bounds.

    image_size: (width, height).  Boxes below min_confidence or with zero
    area after clamping are dropped (the latter logged).  Malformed entries
    and unknown class names raise AnnotationError naming the offending field.
    """
    width, height = image_size
    with open(path) as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise AnnotationError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc

    if not isinstance(raw, dict) or "frame" not in raw:
        raise AnnotationError(f"{path}: missing 'frame' field")
    try:
        frame_id = int(raw["frame"])
    except (TypeError, ValueError) as exc:
        raise AnnotationError(f"{path}: 'frame' is not an integer") from exc

    boxes: list[BoundingBox] = []
    dropped = 0
    for i, entry in enumerate(raw.get("boxes", [])):
        where = f"{path}: boxes[{i}]"
        if not isinstance(entry, dict):
            raise AnnotationError(f"{where}: not an object")
        for key in ("class", "box", "confidence"):
            if key not in entry:
                raise AnnotationError(f"{where}: missing field '{key}'")
        name = entry["class"]
        if name not in registry:
            raise AnnotationError(f"{where}: unknown class name '{name}'")
        try:
            x0, y0, x1, y1 = (float(v) for v in entry["box"])
            conf = float(entry["confidence"])
        except (TypeError, ValueError) as exc:
            raise AnnotationError(f"{where}: field 'box' or 'confidence' malformed") from exc
        if x1 < x0 or y1 < y0:
            raise AnnotationError(f"{where}: field 'box' has inverted extents")
        if conf < min_confidence:
            continue
        x0c, x1c = max(0.0, x0), min(float(width - 1), x1)
        y0c, y1c = max(0.0, y0), min(float(height - 1), y1)
        if x1c <= x0c or y1c <= y0c:
            dropped += 1
            continue
        boxes.append(BoundingBox(registry.by_name(name), x0c, y0c, x1c, y1c, conf))
    if dropped:
        logger.warning("%s: dropped %d zero-area boxes after clamping", path, dropped)
    return DetectionSet(frame_id=frame_id, boxes=boxes)


def save_detections(path: str, detections: DetectionSet) -> None:
    payload = {
        "frame": detections.frame_id,
        "boxes": [
            {
                "class": b.semantic_class.name,
                "box": [b.x_min, b.y_min, b.x_max, b.y_max],
                "confidence": b.confidence,
            }
            for b in detections.boxes
        ],
    }
    with open(path, "w") as fh:
        json.dump(payload, fh, indent=1)
        fh.write("\n")
