"""Shared fixtures and synthetic-instance generators for the test suite."""

import numpy as np
import pytest

from semloc.geometry import CameraIntrinsics, Pose, rotation_from_axis_angle


@pytest.fixture
def intrinsics():
    return CameraIntrinsics(fx=400.0, fy=400.0, cx=320.0, cy=240.0, width=640, height=480)


def random_rotation(rng: np.random.Generator) -> np.ndarray:
    axis = rng.normal(size=3)
    axis /= np.linalg.norm(axis)
    angle = rng.uniform(0.0, np.pi)
    return rotation_from_axis_angle(axis * angle)


def random_pose(rng: np.random.Generator, t_scale: float = 1.0) -> Pose:
    return Pose(random_rotation(rng), rng.uniform(-t_scale, t_scale, size=3))


def points_in_front(rng: np.random.Generator, pose: Pose, n: int,
                    depth=(1.0, 4.0), spread: float = 1.0) -> np.ndarray:
    """World points that sit in front of the camera at the given pose."""
    cam = np.column_stack(
        [
            rng.uniform(-spread, spread, size=n),
            rng.uniform(-spread, spread, size=n),
            rng.uniform(depth[0], depth[1], size=n),
        ]
    )
    inv = pose.inverse()
    return inv.transform(cam)
