"""Scene-change perturbations: move, rotate, remove, or swap movable objects."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from ..errors import WorldGenerationError
from .world import World, WorldLandmark, WorldObject


@dataclass
class Perturbation:
    kind: str  # rotate_object | translate_object | remove_object | swap_objects
    target_ids: list[int]
    magnitude_deg: float = 0.0
    magnitude_m: float = 0.0
    direction_uv: tuple = (1.0, 0.0)

    _KINDS = ("rotate_object", "translate_object", "remove_object", "swap_objects")

    def __post_init__(self):
        if self.kind not in self._KINDS:
            raise WorldGenerationError(f"unknown perturbation kind '{self.kind}'")
        needed = 2 if self.kind == "swap_objects" else 1
        if len(self.target_ids) != needed:
            raise WorldGenerationError(
                f"{self.kind} needs exactly {needed} target(s), got {len(self.target_ids)}"
            )


def _require_movable(world: World, object_id: int) -> WorldObject:
    obj = world.object_by_id(object_id)
    if not obj.movable:
        raise WorldGenerationError(f"object {object_id} is not movable")
    return obj


def _in_plane_rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _transform_landmarks(
    world: World,
    targets: dict[int, tuple[np.ndarray, float]],  # object id -> (new center, angle delta)
) -> list[WorldLandmark]:
    """Rigidly transform landmarks of targeted objects in their wall plane;
    every other landmark object is reused untouched (bitwise identical)."""
    walls = world.walls()
    moved: list[WorldLandmark] = []
    by_object = {obj.id: obj for obj in world.objects}
    for lm in world.landmarks:
        if lm.object_id not in targets:
            moved.append(lm)
            continue
        obj = by_object[lm.object_id]
        wall = walls[obj.wall_index]
        new_center, angle = targets[lm.object_id]
        uv = np.array(
            [
                np.dot(lm.position - wall.origin, wall.u_axis),
                np.dot(lm.position - wall.origin, wall.v_axis),
            ]
        )
        uv = new_center + _in_plane_rotation(angle) @ (uv - obj.center_uv)
        moved.append(replace(lm, position=wall.to_world(uv), descriptor=lm.descriptor))
    return moved


def perturb_world(world: World, perturbation: Perturbation) -> World:
    """A new world with the perturbation applied; the input is unmodified and
    untargeted landmarks are bitwise identical.  Descriptors never change —
    moved objects look the same, they are merely elsewhere."""
    kind = perturbation.kind

    if kind == "remove_object":
        target = _require_movable(world, perturbation.target_ids[0])
        objects = [replace(o, landmark_ids=list(o.landmark_ids))
                   for o in world.objects if o.id != target.id]
        landmarks = [lm for lm in world.landmarks if lm.object_id != target.id]
        return World(
            dimensions=world.dimensions,
            objects=objects,
            landmarks=landmarks,
            seed=world.seed,
            registry=world.registry,
        )

    if kind == "rotate_object":
        target = _require_movable(world, perturbation.target_ids[0])
        angle = math.radians(perturbation.magnitude_deg)
        targets = {target.id: (target.center_uv.copy(), angle)}
        objects = [
            replace(o, rotation=o.rotation + angle, landmark_ids=list(o.landmark_ids))
            if o.id == target.id
            else o
            for o in world.objects
        ]
    elif kind == "translate_object":
        target = _require_movable(world, perturbation.target_ids[0])
        direction = np.asarray(perturbation.direction_uv, dtype=float)
        norm = np.linalg.norm(direction)
        if norm < 1e-12:
            raise WorldGenerationError("translate_object needs a nonzero direction")
        shift = direction / norm * perturbation.magnitude_m
        targets = {target.id: (target.center_uv + shift, 0.0)}
        objects = [
            replace(o, center_uv=o.center_uv + shift, landmark_ids=list(o.landmark_ids))
            if o.id == target.id
            else o
            for o in world.objects
        ]
    else:  # swap_objects
        first = _require_movable(world, perturbation.target_ids[0])
        second = _require_movable(world, perturbation.target_ids[1])
        if first.wall_index != second.wall_index:
            raise WorldGenerationError(
                "swap_objects currently requires both objects on the same wall"
            )
        targets = {
            first.id: (second.center_uv.copy(), 0.0),
            second.id: (first.center_uv.copy(), 0.0),
        }
        objects = []
        for o in world.objects:
            if o.id == first.id:
                objects.append(replace(o, center_uv=second.center_uv.copy(),
                                       landmark_ids=list(o.landmark_ids)))
            elif o.id == second.id:
                objects.append(replace(o, center_uv=first.center_uv.copy(),
                                       landmark_ids=list(o.landmark_ids)))
            else:
                objects.append(o)

    return World(
        dimensions=world.dimensions,
        objects=objects,
        landmarks=_transform_landmarks(world, targets),
        seed=world.seed,
        registry=world.registry,
    )
