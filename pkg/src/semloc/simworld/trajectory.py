"""Camera trajectory generators: in-place rotations and straight translations.

The robot body frame has x forward, y left, z up; the camera looks along
body x with image y pointing down (optical axis forward).  A "yaw" sweep
therefore spins the view across the walls, matching a robot rotating about
its vertical axis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..geometry.pose import Pose, rotation_from_axis_angle

# body -> camera axis permutation: cam x = -body y, cam y = -body z, cam z = body x
BODY_TO_CAMERA = np.array(
    [
        [0.0, -1.0, 0.0],
        [0.0, 0.0, -1.0],
        [1.0, 0.0, 0.0],
    ]
)

TRAJECTORY_KINDS = ("roll", "pitch", "yaw", "translate_forward", "translate_lateral")

_BODY_AXES = {
    "roll": np.array([1.0, 0.0, 0.0]),
    "pitch": np.array([0.0, 1.0, 0.0]),
    "yaw": np.array([0.0, 0.0, 1.0]),
}


@dataclass
class TrajectoryParams:
    center: tuple = (4.0, 2.0, 1.5)
    steps: int = 36
    sweep_deg: float = 360.0  # total rotation sweep (rotation kinds)
    step_m: float = 0.1  # per-step displacement (translation kinds)
    radius: float = 0.0  # yaw only: circle radius for a nonzero baseline
    heading_deg: float = 0.0  # initial yaw heading
    dt: float = 0.1  # seconds between frames
    t0: float = 0.0


def _camera_pose(body_rotation: np.ndarray, body_position: np.ndarray) -> Pose:
    rotation = BODY_TO_CAMERA @ body_rotation.T
    return Pose(rotation, -rotation @ body_position)


def generate_trajectory(kind: str, params: TrajectoryParams) -> list[tuple[float, Pose]]:
    """(timestamp, world->camera Pose) samples for the requested motion.

    Rotation kinds sweep sweep_deg over `steps` poses (endpoint excluded, so
    consecutive poses differ by exactly sweep/steps about the body axis);
    translation kinds advance step_m per pose with fixed orientation.
    """
    if kind not in TRAJECTORY_KINDS:
        raise ValueError(f"unknown trajectory kind '{kind}' (use one of {TRAJECTORY_KINDS})")
    center = np.asarray(params.center, dtype=float)
    heading = math.radians(params.heading_deg)
    base = rotation_from_axis_angle(np.array([0.0, 0.0, heading]))

    samples: list[tuple[float, Pose]] = []
    for i in range(params.steps):
        t = params.t0 + i * params.dt
        if kind in _BODY_AXES:
            angle = math.radians(params.sweep_deg) * i / params.steps
            if kind == "yaw":
                body_rot = rotation_from_axis_angle(np.array([0.0, 0.0, heading + angle]))
                direction = np.array([math.cos(heading + angle), math.sin(heading + angle), 0.0])
                position = center + params.radius * direction
            else:
                spin = rotation_from_axis_angle(_BODY_AXES[kind] * angle)
                body_rot = base @ spin
                position = center
        else:
            axis = {"translate_forward": np.array([1.0, 0.0, 0.0]),
                    "translate_lateral": np.array([0.0, 1.0, 0.0])}[kind]
            body_rot = base
            position = center + i * params.step_m * (base @ axis)
        samples.append((t, _camera_pose(body_rot, position)))
    return samples
