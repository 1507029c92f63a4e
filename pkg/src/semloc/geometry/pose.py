"""Rigid camera poses, pinhole intrinsics and projection.

Conventions used throughout the package:

* a ``Pose`` maps world coordinates into the camera frame,
  ``x_cam = R @ x_world + t``;
* the camera looks along +z of its own frame, image x right, image y down;
* pixel coordinates follow ``u = fx * x/z + cx``, ``v = fy * y/z + cy``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateGeometryError

_ORTHONORMAL_TOL = 1e-9
_MIN_DEPTH = 1e-9


def skew(v: np.ndarray) -> np.ndarray:
    """Cross-product matrix such that skew(a) @ b == cross(a, b)."""
    return np.array(
        [
            [0.0, -v[2], v[1]],
            [v[2], 0.0, -v[0]],
            [-v[1], v[0], 0.0],
        ]
    )


def rotation_from_axis_angle(axis_angle: np.ndarray) -> np.ndarray:
    """Rodrigues' formula; the vector's norm is the rotation angle in radians."""
    axis_angle = np.asarray(axis_angle, dtype=float)
    angle = float(np.linalg.norm(axis_angle))
    if angle < 1e-15:
        # second-order series keeps derivatives smooth near zero
        k = skew(axis_angle)
        return np.eye(3) + k + 0.5 * (k @ k)
    axis = axis_angle / angle
    k = skew(axis)
    return np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)


def quaternion_from_rotation(r: np.ndarray) -> np.ndarray:
    """Unit quaternion (qw, qx, qy, qz) with qw >= 0 for a rotation matrix.

    Uses Shepperd's branch selection for numerical stability.
    """
    r = np.asarray(r, dtype=float)
    t = np.trace(r)
    if t > 0.0:
        s = np.sqrt(t + 1.0) * 2.0
        q = np.array(
            [0.25 * s, (r[2, 1] - r[1, 2]) / s, (r[0, 2] - r[2, 0]) / s, (r[1, 0] - r[0, 1]) / s]
        )
    elif r[0, 0] >= r[1, 1] and r[0, 0] >= r[2, 2]:
        s = np.sqrt(1.0 + r[0, 0] - r[1, 1] - r[2, 2]) * 2.0
        q = np.array(
            [(r[2, 1] - r[1, 2]) / s, 0.25 * s, (r[0, 1] + r[1, 0]) / s, (r[0, 2] + r[2, 0]) / s]
        )
    elif r[1, 1] >= r[2, 2]:
        s = np.sqrt(1.0 - r[0, 0] + r[1, 1] - r[2, 2]) * 2.0
        q = np.array(
            [(r[0, 2] - r[2, 0]) / s, (r[0, 1] + r[1, 0]) / s, 0.25 * s, (r[1, 2] + r[2, 1]) / s]
        )
    else:
        s = np.sqrt(1.0 - r[0, 0] - r[1, 1] + r[2, 2]) * 2.0
        q = np.array(
            [(r[1, 0] - r[0, 1]) / s, (r[0, 2] + r[2, 0]) / s, (r[1, 2] + r[2, 1]) / s, 0.25 * s]
        )
    q = q / np.linalg.norm(q)
    if q[0] < 0.0:
        q = -q
    return q


def rotation_from_quaternion(q: np.ndarray) -> np.ndarray:
    """Rotation matrix for a (qw, qx, qy, qz) quaternion; normalizes its input."""
    q = np.asarray(q, dtype=float)
    q = q / np.linalg.norm(q)
    w, x, y, z = q
    return np.array(
        [
            [1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y)],
            [2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x)],
            [2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y)],
        ]
    )


@dataclass
class Pose:
    """World-to-camera rigid transform: x_cam = rotation @ x_world + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        self.rotation = np.asarray(self.rotation, dtype=float)
        self.translation = np.asarray(self.translation, dtype=float).reshape(3)
        err = np.abs(self.rotation @ self.rotation.T - np.eye(3)).max()
        if err > _ORTHONORMAL_TOL or np.linalg.det(self.rotation) < 0.0:
            raise DegenerateGeometryError(
                f"rotation is not orthonormal (max deviation {err:.3e})"
            )

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_quaternion(cls, q: np.ndarray, t: np.ndarray) -> "Pose":
        return cls(rotation_from_quaternion(q), np.asarray(t, dtype=float))

    def quaternion(self) -> np.ndarray:
        return quaternion_from_rotation(self.rotation)

    def transform(self, points: np.ndarray) -> np.ndarray:
        """Map world points (3,) or (n, 3) into the camera frame."""
        pts = np.asarray(points, dtype=float)
        return pts @ self.rotation.T + self.translation

    def compose(self, other: "Pose") -> "Pose":
        """self after other: (self.compose(other)).transform(x) == self.transform(other.transform(x))."""
        return Pose(self.rotation @ other.rotation, self.rotation @ other.translation + self.translation)

    def inverse(self) -> "Pose":
        return Pose(self.rotation.T, -self.rotation.T @ self.translation)

    def camera_center(self) -> np.ndarray:
        """Camera position expressed in world coordinates."""
        return -self.rotation.T @ self.translation


@dataclass
class CameraIntrinsics:
    """Pinhole intrinsics; focal lengths must be positive, principal point in-frame."""

    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0.0 or self.fy <= 0.0:
            raise DegenerateGeometryError("focal lengths must be positive")
        if not (0.0 <= self.cx < self.width and 0.0 <= self.cy < self.height):
            raise DegenerateGeometryError("principal point lies outside the image")

    def matrix(self) -> np.ndarray:
        return np.array(
            [[self.fx, 0.0, self.cx], [0.0, self.fy, self.cy], [0.0, 0.0, 1.0]]
        )

    def normalize(self, pixels: np.ndarray) -> np.ndarray:
        """Pixel coordinates -> normalized image-plane coordinates (K^-1 applied)."""
        px = np.asarray(pixels, dtype=float)
        out = np.empty_like(px)
        out[..., 0] = (px[..., 0] - self.cx) / self.fx
        out[..., 1] = (px[..., 1] - self.cy) / self.fy
        return out

    def denormalize(self, normalized: np.ndarray) -> np.ndarray:
        xy = np.asarray(normalized, dtype=float)
        out = np.empty_like(xy)
        out[..., 0] = xy[..., 0] * self.fx + self.cx
        out[..., 1] = xy[..., 1] * self.fy + self.cy
        return out


def project(pose: Pose, intrinsics: CameraIntrinsics, point: np.ndarray) -> np.ndarray:
    """Project one world point to pixel coordinates.

    Raises DegenerateGeometryError when the point does not lie strictly in
    front of the camera (depth <= 1e-9).
    """
    cam = pose.transform(np.asarray(point, dtype=float))
    if cam[2] <= _MIN_DEPTH:
        raise DegenerateGeometryError("point is behind the camera")
    return np.array(
        [
            intrinsics.fx * cam[0] / cam[2] + intrinsics.cx,
            intrinsics.fy * cam[1] / cam[2] + intrinsics.cy,
        ]
    )


def project_points(
    pose: Pose, intrinsics: CameraIntrinsics, points: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized projection of (n, 3) world points.

    Returns (pixels (n, 2), valid (n,) bool); rows with depth <= 1e-9 are
    flagged invalid and contain NaN.
    """
    cam = pose.transform(np.asarray(points, dtype=float).reshape(-1, 3))
    valid = cam[:, 2] > _MIN_DEPTH
    pixels = np.full((cam.shape[0], 2), np.nan)
    z = cam[valid, 2]
    pixels[valid, 0] = intrinsics.fx * cam[valid, 0] / z + intrinsics.cx
    pixels[valid, 1] = intrinsics.fy * cam[valid, 1] / z + intrinsics.cy
    return pixels, valid
