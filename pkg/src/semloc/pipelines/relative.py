"""Pairwise relative-pose estimation from two frames via the essential matrix."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from ..errors import DegenerateGeometryError, EstimationFailedError, InsufficientDataError
from ..features.match import DEFAULT_RATIO, knn_ratio_match
from ..geometry.epipolar import RelativePose, decompose_essential
from ..geometry.pose import CameraIntrinsics
from ..geometry.ransac import RansacParams, ransac_essential
from ..semantics.filtering import filter_matches_by_class, match_per_class
from .frames import FrameFeatures, QueryFrame, extract_frame_features
from .modes import SemanticMode, derive_rng_seed

logger = logging.getLogger(__name__)

_MIN_PAIR_MATCHES = 5  # the essential-matrix solver needs five correspondences


@dataclass
class RelativePoseParams:
    match_ratio: float = DEFAULT_RATIO
    max_iterations: int = 1000
    sampson_threshold: float = 5e-4
    min_inliers: int = 15
    seed: int = 0
    min_features: int = 1000
    max_features: int = 5000


def _empty_points() -> np.ndarray:
    return np.empty((0, 2))


@dataclass(frozen=True)
class RelativePoseResult:
    frame_id_a: int
    frame_id_b: int
    mode: SemanticMode
    relative: "RelativePose | None"
    matches_used: int
    inlier_count: int
    pure_rotation: bool = False
    planar_suspected: bool = False
    failure_reason: "str | None" = None
    # normalized image coordinates of every pooled match (row-aligned pair)
    points_a: np.ndarray = field(default_factory=_empty_points)
    points_b: np.ndarray = field(default_factory=_empty_points)
    # pixel coordinates of the same matches, row-aligned with points_a/points_b
    pixels_a: np.ndarray = field(default_factory=_empty_points)
    pixels_b: np.ndarray = field(default_factory=_empty_points)
    match_indices: tuple = ()  # (feature index in a, feature index in b) pairs
    inlier_indices: tuple = ()  # row indices into points_a/points_b


def normalized_coordinates(pixels: np.ndarray, intrinsics: CameraIntrinsics) -> np.ndarray:
    """Pixel coordinates to normalized camera coordinates."""
    pixels = np.asarray(pixels, dtype=float).reshape(-1, 2)
    return (pixels - [intrinsics.cx, intrinsics.cy]) / [intrinsics.fx, intrinsics.fy]


def match_frames(
    features_a: FrameFeatures,
    features_b: FrameFeatures,
    mode: SemanticMode,
    ratio: float = DEFAULT_RATIO,
):
    """Mode-specific descriptor matching between two frames.

    Pre matches class-by-class over its masked features; post matches
    everything then keeps class-consistent pairs; baseline is unrestricted.
    """
    if mode is SemanticMode.PRE:
        return match_per_class(
            features_a.descriptors,
            features_a.labels,
            features_b.descriptors,
            features_b.labels,
            ratio,
        )
    matches = knn_ratio_match(features_a.descriptors, features_b.descriptors, ratio)
    if mode is SemanticMode.POST:
        matches = filter_matches_by_class(matches, features_a.labels, features_b.labels)
    return matches


def relative_pose(
    frame_a: QueryFrame,
    frame_b: QueryFrame,
    intrinsics: CameraIntrinsics,
    mode: "SemanticMode | str" = SemanticMode.BASELINE,
    params: "RelativePoseParams | None" = None,
) -> RelativePoseResult:
    """Estimate the up-to-scale relative motion between two frames.

    Matches per the semantic mode, robustly fits an essential matrix on the
    normalized correspondences, and decomposes it by cheirality voting.
    Degeneracies set the corresponding flags instead of raising.
    """
    params = params or RelativePoseParams()
    mode = SemanticMode.parse(mode)
    masked = mode is SemanticMode.PRE
    features_a = extract_frame_features(
        frame_a.observation, frame_a.detections, masked,
        params.min_features, params.max_features,
    )
    features_b = extract_frame_features(
        frame_b.observation, frame_b.detections, masked,
        params.min_features, params.max_features,
    )

    def result(
        relative=None,
        matches_used=0,
        inlier_count=0,
        reason=None,
        points_a=None,
        points_b=None,
        pixels_a=None,
        pixels_b=None,
        match_indices=(),
        inlier_indices=(),
        pure_rotation=False,
        planar_suspected=False,
    ):
        if reason is not None:
            logger.info(
                "pair (%d, %d) (%s): %s",
                frame_a.frame_id, frame_b.frame_id, mode.value, reason,
            )
        return RelativePoseResult(
            frame_id_a=frame_a.frame_id,
            frame_id_b=frame_b.frame_id,
            mode=mode,
            relative=relative,
            matches_used=matches_used,
            inlier_count=inlier_count,
            pure_rotation=pure_rotation,
            planar_suspected=planar_suspected,
            failure_reason=reason,
            points_a=points_a if points_a is not None else _empty_points(),
            points_b=points_b if points_b is not None else _empty_points(),
            pixels_a=pixels_a if pixels_a is not None else _empty_points(),
            pixels_b=pixels_b if pixels_b is not None else _empty_points(),
            match_indices=tuple(match_indices),
            inlier_indices=tuple(inlier_indices),
        )

    if masked and (len(features_a.coordinates) == 0 or len(features_b.coordinates) == 0):
        return result(reason="no semantic features")

    matches = match_frames(features_a, features_b, mode, params.match_ratio)
    match_indices = tuple((m.query_index, m.train_index) for m in matches)
    pixels_a = np.asarray(
        features_a.coordinates[[m.query_index for m in matches]], dtype=float
    ).reshape(-1, 2)
    pixels_b = np.asarray(
        features_b.coordinates[[m.train_index for m in matches]], dtype=float
    ).reshape(-1, 2)
    points_a = normalized_coordinates(pixels_a, intrinsics)
    points_b = normalized_coordinates(pixels_b, intrinsics)
    if len(matches) < _MIN_PAIR_MATCHES:
        return result(
            reason="insufficient matches",
            matches_used=len(matches),
            points_a=points_a,
            points_b=points_b,
            pixels_a=pixels_a,
            pixels_b=pixels_b,
            match_indices=match_indices,
        )

    ransac = RansacParams(
        max_iterations=params.max_iterations,
        inlier_threshold=params.sampson_threshold,
        min_inliers=params.min_inliers,
        rng_seed=derive_rng_seed(params.seed, frame_a.frame_id, frame_b.frame_id),
    )
    try:
        essential, inliers = ransac_essential(points_a, points_b, ransac)
    except (InsufficientDataError, EstimationFailedError) as exc:
        return result(
            reason=str(exc),
            matches_used=len(matches),
            points_a=points_a,
            points_b=points_b,
            pixels_a=pixels_a,
            pixels_b=pixels_b,
            match_indices=match_indices,
        )

    inlier_idx = np.asarray(inliers, dtype=int)
    try:
        relative = decompose_essential(
            essential, points_a[inlier_idx], points_b[inlier_idx]
        )
    except DegenerateGeometryError as exc:
        reason = str(exc)
        return result(
            reason=reason,
            matches_used=len(matches),
            inlier_count=int(len(inlier_idx)),
            points_a=points_a,
            points_b=points_b,
            pixels_a=pixels_a,
            pixels_b=pixels_b,
            match_indices=match_indices,
            inlier_indices=(int(i) for i in inlier_idx),
            pure_rotation="pure rotation" in reason,
            planar_suspected="ambiguous" in reason,
        )

    return result(
        relative=relative,
        matches_used=len(matches),
        inlier_count=int(len(inlier_idx)),
        points_a=points_a,
        points_b=points_b,
        pixels_a=pixels_a,
        pixels_b=pixels_b,
        match_indices=match_indices,
        inlier_indices=(int(i) for i in inlier_idx),
    )
