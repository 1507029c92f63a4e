"""Camera geometry: poses, projection, minimal solvers, robust estimation."""

from .pose import (
    CameraIntrinsics,
    Pose,
    project,
    project_points,
    quaternion_from_rotation,
    rotation_from_axis_angle,
    rotation_from_quaternion,
    skew,
)
from .metrics import rotation_error_deg, translation_heading_error_deg
from .triangulate import triangulate_two_view
from .p3p import p3p_solve
from .five_point import five_point_essential
from .epipolar import (
    RelativePose,
    decompose_essential,
    essential_from_motion,
    essential_from_pose,
    relative_motion,
    sampson_error,
    sampson_error_flagged,
)
from .ransac import RansacParams, ransac_essential, ransac_pnp
from .refine import RefineResult, apply_increment, refine_pose, reprojection_residuals

__all__ = [
    "CameraIntrinsics",
    "Pose",
    "RansacParams",
    "RefineResult",
    "RelativePose",
    "apply_increment",
    "decompose_essential",
    "essential_from_motion",
    "essential_from_pose",
    "five_point_essential",
    "p3p_solve",
    "project",
    "project_points",
    "quaternion_from_rotation",
    "ransac_essential",
    "ransac_pnp",
    "refine_pose",
    "relative_motion",
    "reprojection_residuals",
    "rotation_error_deg",
    "rotation_from_axis_angle",
    "rotation_from_quaternion",
    "sampson_error",
    "sampson_error_flagged",
    "skew",
    "triangulate_two_view",
]
