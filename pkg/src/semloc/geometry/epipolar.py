"""Essential-matrix utilities: construction, Sampson distance, decomposition.

All image coordinates entering these functions are normalized (K^-1 applied);
the epipolar constraint used is ``x_b^T E x_a = 0`` with ``E = [t]x R`` for the
relative motion ``x_b = R x_a + t``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import DegenerateGeometryError
from .pose import Pose, skew

_DEGENERATE_DENOM = 1e-30


@dataclass
class RelativePose:
    """Relative motion up to scale: rotation plus a unit translation direction."""

    rotation: np.ndarray
    translation_direction: np.ndarray

    def __post_init__(self):
        self.rotation = np.asarray(self.rotation, dtype=float)
        self.translation_direction = np.asarray(self.translation_direction, dtype=float).reshape(3)
        n = np.linalg.norm(self.translation_direction)
        if n > 0:
            self.translation_direction = self.translation_direction / n


def relative_motion(pose_a: Pose, pose_b: Pose) -> tuple[np.ndarray, np.ndarray]:
    """(R, t) with x_b = R x_a + t between two world-to-camera poses."""
    r = pose_b.rotation @ pose_a.rotation.T
    t = pose_b.translation - r @ pose_a.translation
    return r, t


def essential_from_pose(pose_a: Pose, pose_b: Pose) -> np.ndarray:
    """Ground-truth essential matrix [t]x R of the motion from view a to view b."""
    r, t = relative_motion(pose_a, pose_b)
    return skew(t) @ r


def essential_from_motion(rotation: np.ndarray, translation: np.ndarray) -> np.ndarray:
    return skew(np.asarray(translation, dtype=float)) @ np.asarray(rotation, dtype=float)


def _homogeneous(x: np.ndarray) -> np.ndarray:
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        return np.array([x[0], x[1], 1.0])
    return np.hstack([x, np.ones((x.shape[0], 1))])


def sampson_error(e: np.ndarray, x_a: np.ndarray, x_b: np.ndarray) -> np.ndarray | float:
    """First-order geometric (Sampson) distance in normalized coordinates.

    Accepts single points (2,) or stacked points (n, 2) and returns a float
    or an (n,) array accordingly.  Where the epipolar-line gradients vanish
    (points at the epipoles) the algebraic residual is returned instead; use
    sampson_error_flagged to observe that fallback.
    """
    value, _ = sampson_error_flagged(e, x_a, x_b)
    return value


def sampson_error_flagged(
    e: np.ndarray, x_a: np.ndarray, x_b: np.ndarray
) -> tuple[np.ndarray | float, np.ndarray | bool]:
    """Sampson distance plus a flag marking degenerate (zero-gradient) inputs."""
    e = np.asarray(e, dtype=float)
    scalar = np.asarray(x_a).ndim == 1
    ha = np.atleast_2d(_homogeneous(x_a))
    hb = np.atleast_2d(_homogeneous(x_b))

    line_b = ha @ e.T        # E @ x_a, rows
    line_a = hb @ e          # E^T @ x_b, rows
    algebraic = np.einsum("ij,ij->i", hb, line_b)
    denom = line_b[:, 0] ** 2 + line_b[:, 1] ** 2 + line_a[:, 0] ** 2 + line_a[:, 1] ** 2

    degenerate = denom < _DEGENERATE_DENOM
    safe = np.where(degenerate, 1.0, denom)
    value = np.where(degenerate, np.abs(algebraic), np.abs(algebraic) / np.sqrt(safe))
    if scalar:
        return float(value[0]), bool(degenerate[0])
    return value, degenerate


def _triangulate_normalized(rotation: np.ndarray, translation: np.ndarray,
                            xa: np.ndarray, xb: np.ndarray) -> np.ndarray:
    """DLT triangulation with cameras [I|0] and [R|t]; returns (n, 3) points in frame a."""
    p_b = np.hstack([rotation, translation[:, None]])
    points = np.empty((xa.shape[0], 3))
    for i in range(xa.shape[0]):
        a = np.array(
            [
                [-1.0, 0.0, xa[i, 0], 0.0],
                [0.0, -1.0, xa[i, 1], 0.0],
                xb[i, 0] * p_b[2] - p_b[0],
                xb[i, 1] * p_b[2] - p_b[1],
            ]
        )
        _, _, vt = np.linalg.svd(a)
        hom = vt[-1]
        w = hom[3] if abs(hom[3]) > 1e-15 else 1e-15
        points[i] = hom[:3] / w
    return points


def _best_fit_rotation(bearings_a: np.ndarray, bearings_b: np.ndarray) -> np.ndarray:
    """Kabsch fit of b ~ R a over unit bearing vectors."""
    h = bearings_b.T @ bearings_a
    u, _, vt = np.linalg.svd(h)
    d = np.sign(np.linalg.det(u @ vt))
    return u @ np.diag([1.0, 1.0, d]) @ vt


def decompose_essential(
    e: np.ndarray,
    x_a: np.ndarray,
    x_b: np.ndarray,
    pure_rotation_tol: float = 1e-8,
) -> RelativePose:
    """Recover (R, unit t) from an essential matrix by cheirality voting.

    x_a, x_b: (n, 2) normalized correspondences used for the vote.

    Raises DegenerateGeometryError with "pure rotation suspected" when a
    rotation alone already explains the correspondences (median angular
    residual below pure_rotation_tol), and with "ambiguous decomposition"
    when two factorizations tie on cheirality votes.
    """
    xa = np.atleast_2d(np.asarray(x_a, dtype=float))
    xb = np.atleast_2d(np.asarray(x_b, dtype=float))
    if xa.shape[0] == 0:
        raise DegenerateGeometryError("no correspondences to vote with")

    ha = _homogeneous(xa)
    hb = _homogeneous(xb)
    ba = ha / np.linalg.norm(ha, axis=1, keepdims=True)
    bb = hb / np.linalg.norm(hb, axis=1, keepdims=True)
    # a rotation can align any one or two bearing pairs exactly, so the
    # pure-rotation test is only meaningful from three correspondences up
    if xa.shape[0] >= 3:
        r_fit = _best_fit_rotation(ba, bb)
        # angle via the chord length: stable where arccos loses precision near 0
        chord = np.linalg.norm(bb - ba @ r_fit.T, axis=1)
        residual = 2.0 * np.arcsin(np.clip(chord / 2.0, -1.0, 1.0))
        if float(np.median(residual)) < pure_rotation_tol:
            raise DegenerateGeometryError("pure rotation suspected")

    u, _, vt = np.linalg.svd(np.asarray(e, dtype=float))
    w = np.array([[0.0, -1.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 1.0]])
    r1 = u @ w @ vt
    r1 = r1 * np.sign(np.linalg.det(r1))
    r2 = u @ w.T @ vt
    r2 = r2 * np.sign(np.linalg.det(r2))
    t = u[:, 2]

    votes = []
    candidates = [(r1, t), (r1, -t), (r2, t), (r2, -t)]
    for rot, trans in candidates:
        pts = _triangulate_normalized(rot, trans, xa, xb)
        depth_a = pts[:, 2]
        depth_b = (pts @ rot.T + trans)[:, 2]
        votes.append(int(np.sum((depth_a > 0) & (depth_b > 0))))

    order = np.argsort(votes)
    if votes[order[-1]] == votes[order[-2]]:
        raise DegenerateGeometryError("ambiguous decomposition")
    rot, trans = candidates[int(order[-1])]
    return RelativePose(rotation=rot, translation_direction=trans)
