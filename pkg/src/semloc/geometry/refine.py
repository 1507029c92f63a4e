"""Gauss-Newton pose refinement over reprojection residuals.

The local parameterization is a 6-vector (rotation axis-angle, translation)
composed on the left of the current pose: x_cam' = exp(dtheta) x_cam + dt.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pose import CameraIntrinsics, Pose, rotation_from_axis_angle, skew

_SINGULAR_COND = 1e12


@dataclass
class RefineResult:
    pose: Pose
    failed: bool
    iterations: int
    initial_cost: float
    final_cost: float


def apply_increment(pose: Pose, delta: np.ndarray) -> Pose:
    """Left-compose a (dtheta, dt) 6-vector increment onto a pose."""
    delta = np.asarray(delta, dtype=float).reshape(6)
    rot = rotation_from_axis_angle(delta[:3])
    return Pose(rot @ pose.rotation, rot @ pose.translation + delta[3:])


def reprojection_residuals(
    pose: Pose, intrinsics: CameraIntrinsics, points: np.ndarray, pixels: np.ndarray
) -> np.ndarray:
    """Stacked (2n,) pixel residuals; points behind the camera contribute huge values."""
    cam = pose.transform(points)
    res = np.empty(2 * points.shape[0])
    for i, c in enumerate(cam):
        if c[2] <= 1e-9:
            res[2 * i : 2 * i + 2] = 1e6
            continue
        res[2 * i] = intrinsics.fx * c[0] / c[2] + intrinsics.cx - pixels[i, 0]
        res[2 * i + 1] = intrinsics.fy * c[1] / c[2] + intrinsics.cy - pixels[i, 1]
    return res


def _jacobian(pose: Pose, intrinsics: CameraIntrinsics, points: np.ndarray) -> np.ndarray:
    cam = pose.transform(points)
    jac = np.zeros((2 * points.shape[0], 6))
    for i, c in enumerate(cam):
        if c[2] <= 1e-9:
            continue
        x, y, z = c
        d_proj = np.array(
            [
                [intrinsics.fx / z, 0.0, -intrinsics.fx * x / (z * z)],
                [0.0, intrinsics.fy / z, -intrinsics.fy * y / (z * z)],
            ]
        )
        d_cam = np.hstack([-skew(c), np.eye(3)])
        jac[2 * i : 2 * i + 2] = d_proj @ d_cam
    return jac


def refine_pose(
    pose0: Pose,
    pixels: np.ndarray,
    points: np.ndarray,
    intrinsics: CameraIntrinsics,
    max_iterations: int = 20,
    tol: float = 1e-10,
) -> RefineResult:
    """Minimize total squared reprojection error starting from pose0.

    The accepted-step cost sequence is non-increasing (rejected steps are
    halved up to 8 times, then iteration stops).  A singular normal-equation
    system returns pose0 with failed=True.
    """
    pixels = np.asarray(pixels, dtype=float).reshape(-1, 2)
    points = np.asarray(points, dtype=float).reshape(-1, 3)

    pose = pose0
    residual = reprojection_residuals(pose, intrinsics, points, pixels)
    cost = float(residual @ residual)
    initial_cost = cost

    for iteration in range(max_iterations):
        jac = _jacobian(pose, intrinsics, points)
        normal = jac.T @ jac
        rhs = -jac.T @ residual
        if not np.all(np.isfinite(normal)) or np.linalg.cond(normal) > _SINGULAR_COND:
            return RefineResult(pose0, True, iteration, initial_cost, initial_cost)
        delta = np.linalg.solve(normal, rhs)

        step = delta
        accepted = False
        for _ in range(9):
            trial = apply_increment(pose, step)
            trial_res = reprojection_residuals(trial, intrinsics, points, pixels)
            trial_cost = float(trial_res @ trial_res)
            if trial_cost <= cost:
                pose, residual, cost = trial, trial_res, trial_cost
                accepted = True
                break
            step = step / 2.0
        if not accepted:
            return RefineResult(pose, False, iteration + 1, initial_cost, cost)
        if np.linalg.norm(delta) < tol:
            return RefineResult(pose, False, iteration + 1, initial_cost, cost)

    return RefineResult(pose, False, max_iterations, initial_cost, cost)
