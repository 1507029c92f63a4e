"""Two-view triangulation of pixel correspondences with known poses."""

from __future__ import annotations

import numpy as np

from ..errors import DegenerateGeometryError
from .pose import CameraIntrinsics, Pose, project

_MIN_BASELINE = 1e-6


def triangulate_two_view(
    pose_a: Pose,
    pose_b: Pose,
    pixel_a: np.ndarray,
    pixel_b: np.ndarray,
    intrinsics: CameraIntrinsics,
) -> tuple[np.ndarray, float]:
    """Linear (DLT) triangulation of one correspondence.

    Returns (world point (3,), reprojection residual in px), where the
    residual is the larger of the two view reprojection errors.

    Raises DegenerateGeometryError for a baseline below 1e-6 m or when the
    triangulated point fails the positive-depth (cheirality) test in either
    view.
    """
    baseline = np.linalg.norm(pose_a.camera_center() - pose_b.camera_center())
    if baseline < _MIN_BASELINE:
        raise DegenerateGeometryError(f"degenerate baseline ({baseline:.3e} m)")

    k = intrinsics.matrix()
    p_a = k @ np.hstack([pose_a.rotation, pose_a.translation[:, None]])
    p_b = k @ np.hstack([pose_b.rotation, pose_b.translation[:, None]])

    ua, va = float(pixel_a[0]), float(pixel_a[1])
    ub, vb = float(pixel_b[0]), float(pixel_b[1])
    a = np.vstack(
        [
            ua * p_a[2] - p_a[0],
            va * p_a[2] - p_a[1],
            ub * p_b[2] - p_b[0],
            vb * p_b[2] - p_b[1],
        ]
    )
    _, _, vt = np.linalg.svd(a)
    hom = vt[-1]
    if abs(hom[3]) < 1e-15:
        raise DegenerateGeometryError("cheirality failure (point at infinity)")
    point = hom[:3] / hom[3]

    if pose_a.transform(point)[2] <= 1e-9 or pose_b.transform(point)[2] <= 1e-9:
        raise DegenerateGeometryError("cheirality failure")

    res_a = np.linalg.norm(project(pose_a, intrinsics, point) - np.asarray(pixel_a, dtype=float))
    res_b = np.linalg.norm(project(pose_b, intrinsics, point) - np.asarray(pixel_b, dtype=float))
    return point, float(max(res_a, res_b))
