"""Map-based relocalization: BoW retrieval, 2d-3d matching, robust PnP."""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from ..errors import EstimationFailedError, InsufficientDataError
from ..features.match import DEFAULT_RATIO, knn_ratio_match
from ..geometry.pose import CameraIntrinsics, Pose
from ..geometry.ransac import RansacParams, ransac_pnp
from ..geometry.refine import refine_pose, reprojection_residuals
from ..mapping.sparse_map import SparseMap, query_candidates
from ..mapping.vocabulary import bow_vector
from ..semantics.filtering import filter_matches_by_class, match_per_class
from .frames import FrameFeatures, QueryFrame, extract_frame_features
from .modes import SemanticMode, derive_rng_seed

logger = logging.getLogger(__name__)

_MIN_PNP_MATCHES = 4  # the absolute-pose solver needs four correspondences


@dataclass
class RelocalizationParams:
    candidate_count: int = 3  # BoW candidates pooled before solving
    match_ratio: float = DEFAULT_RATIO
    max_iterations: int = 500
    inlier_threshold_px: float = 3.0
    min_inliers: int = 12
    seed: int = 0
    min_features: int = 1000
    max_features: int = 5000
    refine: bool = True


@dataclass(frozen=True)
class PooledMatch:
    """A 2d-3d correspondence: query feature index to map landmark id."""

    query_index: int
    landmark_id: int
    ratio: float


@dataclass(frozen=True)
class LocalizationResult:
    frame_id: int
    mode: SemanticMode
    pose: "Pose | None"
    inlier_count: int
    total_matches: int
    candidate_ids: tuple
    failure_reason: "str | None" = None
    matches: tuple = ()  # pooled 2d-3d matches, deduplicated
    inlier_indices: tuple = ()  # indices into `matches`
    map_fully_labeled: bool = False  # every map landmark carries a class id


def candidate_matches(
    sparse_map: SparseMap,
    features: FrameFeatures,
    mode: SemanticMode,
    ratio: float,
    candidate_ids,
) -> list[PooledMatch]:
    """Raw matches pooled across candidate keyframes, before deduplication.

    Post-mode output is, per candidate, the class-consistent subset of the
    baseline output for identical inputs (filter-only definition).
    """
    pairs: list[PooledMatch] = []
    for keyframe_id in candidate_ids:
        keyframe = sparse_map.keyframe_by_id(keyframe_id)
        landmark_ids = list(keyframe.landmark_ids)
        if not landmark_ids:
            continue
        train = np.array(
            [sparse_map.landmark_by_id(i).descriptor for i in landmark_ids]
        )
        classes = [sparse_map.landmark_by_id(i).class_id for i in landmark_ids]
        if mode is SemanticMode.PRE:
            matches = match_per_class(
                features.descriptors, features.labels, train, classes, ratio
            )
        else:
            matches = knn_ratio_match(features.descriptors, train, ratio)
            if mode is SemanticMode.POST:
                matches = filter_matches_by_class(matches, features.labels, classes)
        pairs.extend(
            PooledMatch(m.query_index, landmark_ids[m.train_index], m.ratio)
            for m in matches
        )
    return pairs


def dedup_matches(pairs: list[PooledMatch]) -> list[PooledMatch]:
    """Best-ratio entry per landmark id, ordered by landmark id."""
    best: dict[int, PooledMatch] = {}
    for pair in pairs:
        current = best.get(pair.landmark_id)
        if current is None or pair.ratio < current.ratio:
            best[pair.landmark_id] = pair
    return [best[key] for key in sorted(best)]


def relocalize(
    sparse_map: SparseMap,
    frame: QueryFrame,
    intrinsics: CameraIntrinsics,
    mode: "SemanticMode | str" = SemanticMode.BASELINE,
    params: "RelocalizationParams | None" = None,
) -> LocalizationResult:
    """Estimate the camera pose of a single frame against a prebuilt map.

    Stages: (pre mode: mask before detection) -> feature extraction ->
    BoW candidate retrieval -> per-candidate matching (pre: per class;
    post: unrestricted then class-filtered; baseline: unrestricted) ->
    pooled matches -> robust PnP -> refinement on the inliers.  Failures
    return a pose-free result carrying the reason.
    """
    params = params or RelocalizationParams()
    mode = SemanticMode.parse(mode)
    if not sparse_map.keyframes or not sparse_map.landmarks:
        raise InsufficientDataError("relocalization needs a non-empty map")
    map_fully_labeled = all(
        lm.class_id is not None for lm in sparse_map.landmarks
    )
    if mode is SemanticMode.BASELINE and map_fully_labeled:
        logger.info(
            "frame %d: baseline mode is matching against a fully labeled map",
            frame.frame_id,
        )

    features = extract_frame_features(
        frame.observation,
        frame.detections,
        masked=(mode is SemanticMode.PRE),
        min_features=params.min_features,
        max_features=params.max_features,
    )

    def failure(reason, total=0, candidates=(), matches=()):
        logger.info("frame %d (%s): %s", frame.frame_id, mode.value, reason)
        return LocalizationResult(
            frame_id=frame.frame_id,
            mode=mode,
            pose=None,
            inlier_count=0,
            total_matches=total,
            candidate_ids=tuple(candidates),
            failure_reason=reason,
            matches=tuple(matches),
            map_fully_labeled=map_fully_labeled,
        )

    if mode is SemanticMode.PRE and len(features.coordinates) == 0:
        return failure("no semantic features")

    bow = bow_vector(features.descriptors, sparse_map.vocabulary)
    candidate_ids = tuple(query_candidates(sparse_map, bow, params.candidate_count))
    if not candidate_ids:
        return failure("no candidates")

    pooled = dedup_matches(
        candidate_matches(sparse_map, features, mode, params.match_ratio, candidate_ids)
    )
    if len(pooled) < _MIN_PNP_MATCHES:
        return failure(
            "insufficient matches", total=len(pooled), candidates=candidate_ids,
            matches=pooled,
        )

    pixels = features.coordinates[[p.query_index for p in pooled]]
    points = np.array(
        [sparse_map.landmark_by_id(p.landmark_id).position for p in pooled]
    )
    ransac = RansacParams(
        max_iterations=params.max_iterations,
        inlier_threshold=params.inlier_threshold_px,
        min_inliers=params.min_inliers,
        rng_seed=derive_rng_seed(params.seed, frame.frame_id),
    )
    try:
        pose, inliers = ransac_pnp(pixels, points, intrinsics, ransac)
    except (InsufficientDataError, EstimationFailedError) as exc:
        return failure(
            str(exc), total=len(pooled), candidates=candidate_ids, matches=pooled
        )

    inlier_idx = np.asarray(inliers, dtype=int)
    if params.refine and len(inlier_idx):
        refined = refine_pose(pose, pixels[inlier_idx], points[inlier_idx], intrinsics)
        if not refined.failed:
            residuals = reprojection_residuals(
                refined.pose, intrinsics, points, pixels
            ).reshape(-1, 2)
            errors = np.linalg.norm(residuals, axis=1)
            updated = np.flatnonzero(errors < params.inlier_threshold_px)
            # keep the refined pose only while it preserves a full consensus
            if len(updated) >= params.min_inliers:
                pose, inlier_idx = refined.pose, updated

    return LocalizationResult(
        frame_id=frame.frame_id,
        mode=mode,
        pose=pose,
        inlier_count=int(len(inlier_idx)),
        total_matches=len(pooled),
        candidate_ids=candidate_ids,
        failure_reason=None,
        matches=tuple(pooled),
        inlier_indices=tuple(int(i) for i in inlier_idx),
        map_fully_labeled=map_fully_labeled,
    )
