"""Vocabulary, retrieval, map building, and map serialization."""

import json
import math

import numpy as np
import pytest

from semloc.errors import InsufficientDataError, MapFormatError
from semloc.geometry import CameraIntrinsics, Pose, project_points
from semloc.mapping import (
    FeatureObservation,
    Keyframe,
    Landmark,
    MapBuildConfig,
    MapFrameInput,
    SparseMap,
    Vocabulary,
    bow_vector,
    build_map,
    build_vocabulary,
    cosine_similarity,
    load_map,
    query_candidates,
    save_map,
)
from semloc.semantics import BoundingBox, ClassRegistry, DetectionSet

REGISTRY = ClassRegistry.default()


def _unit_rows(rows: np.ndarray) -> np.ndarray:
    return rows / np.linalg.norm(rows, axis=1, keepdims=True)


def _random_unit(rng, n, d=16):
    return _unit_rows(rng.normal(size=(n, d)))


# --------------------------------------------------------------------------
# vocabulary


def test_two_separated_clusters_recover_cluster_means():
    rng = np.random.default_rng(0)
    anchor_a = np.zeros(16)
    anchor_a[0] = 1.0
    anchor_b = np.zeros(16)
    anchor_b[8] = 1.0
    cluster_a = _unit_rows(anchor_a + rng.normal(scale=1e-3, size=(40, 16)))
    cluster_b = _unit_rows(anchor_b + rng.normal(scale=1e-3, size=(40, 16)))

    vocab = build_vocabulary([cluster_a, cluster_b], k=2, seed=1)

    # oracle: closed-form means of the generated clusters, unit-normalized
    expected = [m / np.linalg.norm(m) for m in (cluster_a.mean(axis=0), cluster_b.mean(axis=0))]
    for mean in expected:
        gap = min(np.linalg.norm(c - mean) for c in vocab.centroids)
        assert gap < 1e-6


def test_k_equal_to_training_size_gives_zero_quantization_error():
    rng = np.random.default_rng(1)
    data = _random_unit(rng, 12)
    vocab = build_vocabulary([data], k=12, seed=0)
    words = vocab.quantize(data)
    assert len(set(words.tolist())) == 12  # each descriptor its own word
    errors = np.linalg.norm(data - vocab.centroids[words], axis=1)
    assert errors.max() < 1e-12


def test_vocabulary_build_is_deterministic():
    rng = np.random.default_rng(2)
    frames = [_random_unit(rng, 30), _random_unit(rng, 25)]
    a = build_vocabulary(frames, k=8, seed=7)
    b = build_vocabulary(frames, k=8, seed=7)
    assert np.array_equal(a.centroids, b.centroids)
    assert np.array_equal(a.idf, b.idf)


def test_vocabulary_requires_enough_descriptors():
    rng = np.random.default_rng(3)
    with pytest.raises(InsufficientDataError, match="at least k"):
        build_vocabulary([_random_unit(rng, 5)], k=10)
    with pytest.raises(InsufficientDataError):
        build_vocabulary([], k=2)


def test_idf_rare_word_weighted_ubiquitous_word_zeroed():
    rng = np.random.default_rng(4)
    shared = np.zeros(16)
    shared[0] = 1.0
    rare = np.zeros(16)
    rare[8] = 1.0
    frames = [
        np.vstack([_unit_rows(shared + rng.normal(scale=1e-3, size=(10, 16))),
                   _unit_rows(rare + rng.normal(scale=1e-3, size=(10, 16)))]),
        _unit_rows(shared + rng.normal(scale=1e-3, size=(10, 16))),
        _unit_rows(shared + rng.normal(scale=1e-3, size=(10, 16))),
    ]
    vocab = build_vocabulary(frames, k=2, seed=0)
    rare_word = int(vocab.quantize(rare[None, :])[0])
    shared_word = 1 - rare_word
    assert vocab.idf[shared_word] == 0.0  # ln(3/4) clamped
    assert abs(vocab.idf[rare_word] - math.log(3 / 2)) < 1e-9
    assert (vocab.idf >= 0).all()


def _toy_vocabulary(k=4, d=8):
    centroids = np.zeros((k, d))
    for i in range(k):
        centroids[i, i] = 1.0
    return Vocabulary(centroids=centroids, idf=np.ones(k))


def test_bow_single_word_frame():
    vocab = _toy_vocabulary()
    rng = np.random.default_rng(5)
    descriptors = _unit_rows(
        np.eye(8)[3] + rng.normal(scale=1e-2, size=(6, 8))
    )
    vec = bow_vector(descriptors, vocab)
    assert set(vec) == {3}
    assert abs(vec[3] - 1.0) < 1e-12


def test_bow_empty_frame_and_self_similarity():
    vocab = _toy_vocabulary()
    assert bow_vector(np.zeros((0, 8)), vocab) == {}
    rng = np.random.default_rng(6)
    vec = bow_vector(_random_unit(rng, 20, 8), vocab)
    assert abs(cosine_similarity(vec, vec) - 1.0) < 1e-9


def test_bow_all_zero_idf_gives_empty_vector():
    vocab = Vocabulary(centroids=np.eye(4), idf=np.zeros(4))
    rng = np.random.default_rng(7)
    assert bow_vector(_random_unit(rng, 5, 4), vocab) == {}


# --------------------------------------------------------------------------
# retrieval


def _keyframe(kf_id, bow):
    return Keyframe(
        id=kf_id,
        quaternion=np.array([1.0, 0.0, 0.0, 0.0]),
        translation=np.zeros(3),
        landmark_ids=[],
        bow=bow,
    )


def _map_with_keyframes(keyframes, k=32):
    rng = np.random.default_rng(99)
    vocab = Vocabulary(centroids=_random_unit(rng, k, 8), idf=np.ones(k))
    return SparseMap(landmarks=[], keyframes=keyframes, vocabulary=vocab, registry=REGISTRY)


def _random_bow(rng, k, size):
    words = rng.choice(k, size=size, replace=False)
    weights = np.abs(rng.normal(size=size)) + 1e-3
    weights = weights / np.linalg.norm(weights)
    return {int(w): float(v) for w, v in zip(words, weights)}


def _exhaustive_ranking(sparse_map, query, n):
    scores = []
    for kf in sparse_map.keyframes:
        s = 0.0
        for word in sorted(query):
            if word in kf.bow:
                s += query[word] * kf.bow[word]
        scores.append((kf.id, s))
    scores.sort(key=lambda item: (-item[1], item[0]))
    return [kf_id for kf_id, _ in scores[:n]]


def test_query_own_bow_ranks_self_first():
    rng = np.random.default_rng(8)
    keyframes = [_keyframe(i, _random_bow(rng, 32, 5)) for i in range(10)]
    sparse_map = _map_with_keyframes(keyframes)
    result = query_candidates(sparse_map, keyframes[4].bow, n=3)
    assert result[0] == 4
    assert abs(cosine_similarity(keyframes[4].bow, keyframes[4].bow) - 1.0) < 1e-12


def test_query_n_larger_than_map_returns_all_ranked():
    rng = np.random.default_rng(9)
    keyframes = [_keyframe(i, _random_bow(rng, 32, 4)) for i in range(6)]
    sparse_map = _map_with_keyframes(keyframes)
    result = query_candidates(sparse_map, keyframes[0].bow, n=100)
    assert sorted(result) == list(range(6))
    assert result == _exhaustive_ranking(sparse_map, keyframes[0].bow, 100)


def test_query_matches_exhaustive_oracle_on_200_keyframes():
    rng = np.random.default_rng(10)
    keyframes = [
        _keyframe(i, _random_bow(rng, 64, int(rng.integers(1, 12)))) for i in range(200)
    ]
    sparse_map = _map_with_keyframes(keyframes, k=64)
    for _ in range(20):
        query = _random_bow(rng, 64, int(rng.integers(1, 12)))
        n = int(rng.integers(1, 20))
        assert query_candidates(sparse_map, query, n) == _exhaustive_ranking(
            sparse_map, query, n
        )


def test_query_empty_bow_and_ties():
    rng = np.random.default_rng(11)
    bow = _random_bow(rng, 32, 5)
    keyframes = [_keyframe(3, dict(bow)), _keyframe(1, dict(bow))]  # identical content
    sparse_map = _map_with_keyframes(keyframes)
    assert query_candidates(sparse_map, {}, n=5) == []
    assert query_candidates(sparse_map, bow, n=2) == [1, 3]  # tie -> lower id


# --------------------------------------------------------------------------
# map building


INTRINSICS = CameraIntrinsics(fx=400.0, fy=400.0, cx=320.0, cy=240.0, width=640, height=480)
FULL_BOX = [BoundingBox(REGISTRY.by_id(0), 0, 0, 639, 479, 0.9)]


def _shifted_pose(x: float) -> Pose:
    return Pose(np.eye(3), np.array([-x, 0.0, 0.0]))  # camera center at (x, 0, 0)


def _scene_points(rng, n):
    return np.column_stack(
        [
            rng.uniform(-1.8, 2.3, size=n),
            rng.uniform(-1.4, 1.4, size=n),
            rng.uniform(4.0, 8.0, size=n),
        ]
    )


def _synthetic_frame(frame_id, pose, points, descriptors, boxes):
    pixels, valid = project_points(pose, INTRINSICS, points)
    assert valid.all()
    return MapFrameInput(
        observation=FeatureObservation(keypoints=pixels, descriptors=descriptors),
        pose=pose,
        detections=DetectionSet(frame_id, list(boxes)),
        frame_id=frame_id,
    )


def test_two_frame_map_recovers_ground_truth_points():
    rng = np.random.default_rng(12)
    points = _scene_points(rng, 100)
    descriptors = _random_unit(rng, 100)
    frames = [
        _synthetic_frame(0, _shifted_pose(0.0), points, descriptors, FULL_BOX),
        _synthetic_frame(1, _shifted_pose(0.5), points, descriptors, FULL_BOX),
    ]
    sparse_map = build_map(frames, INTRINSICS, MapBuildConfig(vocabulary_k=16))

    assert len(sparse_map.landmarks) >= 95
    for lm in sparse_map.landmarks:
        source = int(np.argmin(np.linalg.norm(descriptors - lm.descriptor, axis=1)))
        assert np.linalg.norm(lm.position - points[source]) < 1e-3
        assert lm.class_id == 0
        assert lm.observation_count >= 2


def test_three_frame_chains_merge_into_single_landmarks():
    rng = np.random.default_rng(13)
    points = _scene_points(rng, 40)
    descriptors = _random_unit(rng, 40)
    frames = [
        _synthetic_frame(i, _shifted_pose(0.25 * i), points, descriptors, FULL_BOX)
        for i in range(3)
    ]
    sparse_map = build_map(frames, INTRINSICS, MapBuildConfig(vocabulary_k=16))
    assert len(sparse_map.landmarks) == 40  # merged, not duplicated
    assert all(lm.observation_count == 3 for lm in sparse_map.landmarks)
    for kf in sparse_map.keyframes:
        assert len(kf.landmark_ids) == 40


def test_landmarks_reproject_within_build_threshold():
    rng = np.random.default_rng(14)
    points = _scene_points(rng, 50)
    descriptors = _random_unit(rng, 50)
    config = MapBuildConfig(vocabulary_k=16)
    frames = [
        _synthetic_frame(i, _shifted_pose(0.3 * i), points, descriptors, FULL_BOX)
        for i in range(3)
    ]
    sparse_map = build_map(frames, INTRINSICS, config)
    from semloc.geometry import project

    for kf in sparse_map.keyframes:
        frame = frames[kf.id]
        obs = frame.observation.keypoints
        for lm_id in kf.landmark_ids:
            lm = sparse_map.landmark_by_id(lm_id)
            pixel = project(kf.pose, INTRINSICS, lm.position)
            source = int(np.argmin(np.linalg.norm(descriptors - lm.descriptor, axis=1)))
            assert np.linalg.norm(pixel - obs[source]) < config.max_reprojection_px


def test_semantic_map_not_larger_than_baseline_map():
    rng = np.random.default_rng(15)
    points = _scene_points(rng, 100)
    descriptors = _random_unit(rng, 100)
    # boxes cover only the left half of the image: ~half the points labeled
    half_box = [BoundingBox(REGISTRY.by_id(2), 0, 0, 319, 479, 0.9)]
    frames = [
        _synthetic_frame(i, _shifted_pose(0.4 * i), points, descriptors, half_box)
        for i in range(2)
    ]
    semantic = build_map(frames, INTRINSICS, MapBuildConfig(vocabulary_k=8))
    baseline = build_map(frames, INTRINSICS, MapBuildConfig(semantic=False, vocabulary_k=8))

    assert len(semantic.landmarks) <= len(baseline.landmarks)
    assert all(lm.class_id is not None for lm in semantic.landmarks)
    assert any(lm.class_id is None for lm in baseline.landmarks)
    assert 0 < len(semantic.landmarks) < len(baseline.landmarks)


def test_zero_detections_make_empty_semantic_map():
    rng = np.random.default_rng(16)
    points = _scene_points(rng, 30)
    descriptors = _random_unit(rng, 30)
    frames = [
        _synthetic_frame(i, _shifted_pose(0.5 * i), points, descriptors, []) for i in range(2)
    ]
    with pytest.raises(InsufficientDataError, match="empty map"):
        build_map(frames, INTRINSICS, MapBuildConfig(vocabulary_k=4))


def test_zero_baseline_means_no_triangulable_matches():
    rng = np.random.default_rng(17)
    points = _scene_points(rng, 30)
    descriptors = _random_unit(rng, 30)
    frames = [
        _synthetic_frame(i, _shifted_pose(0.0), points, descriptors, FULL_BOX)
        for i in range(2)
    ]
    with pytest.raises(InsufficientDataError, match="empty map"):
        build_map(frames, INTRINSICS, MapBuildConfig(vocabulary_k=16))


def test_build_map_is_deterministic(tmp_path):
    rng = np.random.default_rng(18)
    points = _scene_points(rng, 60)
    descriptors = _random_unit(rng, 60)
    frames = [
        _synthetic_frame(i, _shifted_pose(0.3 * i), points, descriptors, FULL_BOX)
        for i in range(3)
    ]
    paths = []
    for tag in ("a", "b"):
        sparse_map = build_map(frames, INTRINSICS, MapBuildConfig(vocabulary_k=16))
        path = tmp_path / f"map_{tag}.json"
        save_map(sparse_map, str(path))
        paths.append(path)
    assert paths[0].read_bytes() == paths[1].read_bytes()


# --------------------------------------------------------------------------
# serialization


def _small_map():
    rng = np.random.default_rng(19)
    points = _scene_points(rng, 30)
    descriptors = _random_unit(rng, 30)
    frames = [
        _synthetic_frame(i, _shifted_pose(0.4 * i), points, descriptors, FULL_BOX)
        for i in range(2)
    ]
    return build_map(frames, INTRINSICS, MapBuildConfig(vocabulary_k=8))


def test_map_round_trip_is_bitwise(tmp_path):
    sparse_map = _small_map()
    path = tmp_path / "map.json"
    save_map(sparse_map, str(path))
    loaded = load_map(str(path))

    assert loaded.version == sparse_map.version
    assert loaded.registry.to_list() == sparse_map.registry.to_list()
    assert np.array_equal(loaded.vocabulary.centroids, sparse_map.vocabulary.centroids)
    assert np.array_equal(loaded.vocabulary.idf, sparse_map.vocabulary.idf)
    assert len(loaded.landmarks) == len(sparse_map.landmarks)
    for a, b in zip(loaded.landmarks, sparse_map.landmarks):
        assert a.id == b.id and a.class_id == b.class_id
        assert a.observation_count == b.observation_count
        assert np.array_equal(a.position, b.position)
        assert np.array_equal(a.descriptor, b.descriptor)
    for a, b in zip(loaded.keyframes, sparse_map.keyframes):
        assert a.id == b.id and a.landmark_ids == b.landmark_ids
        assert np.array_equal(a.quaternion, b.quaternion)
        assert np.array_equal(a.translation, b.translation)
        assert a.bow == b.bow
    assert loaded.inverted_index == sparse_map.inverted_index

    again = tmp_path / "again.json"
    save_map(loaded, str(again))
    assert again.read_bytes() == path.read_bytes()


def test_load_rejects_other_versions(tmp_path):
    path = tmp_path / "old.json"
    path.write_text(json.dumps({"version": "0", "classes": [], "vocabulary": {},
                                "landmarks": [], "keyframes": []}))
    with pytest.raises(MapFormatError, match=r"'0'.*'1'"):
        load_map(str(path))


def test_load_rejects_empty_and_truncated_files(tmp_path):
    empty = tmp_path / "empty.json"
    empty.write_text("")
    with pytest.raises(MapFormatError, match="not a valid map file"):
        load_map(str(empty))

    sparse_map = _small_map()
    full = tmp_path / "full.json"
    save_map(sparse_map, str(full))
    data = full.read_bytes()
    cut = tmp_path / "cut.json"
    cut.write_bytes(data[: len(data) // 2])
    with pytest.raises(MapFormatError, match="not a valid map file"):
        load_map(str(cut))


def test_landmark_and_keyframe_invariants():
    with pytest.raises(MapFormatError, match="observations"):
        Landmark(0, np.zeros(3), np.ones(4), 1, observation_count=1)
    with pytest.raises(MapFormatError, match="negative"):
        _keyframe(0, {3: -0.5})
    with pytest.raises(MapFormatError, match="unknown landmark"):
        SparseMap(
            landmarks=[],
            keyframes=[
                Keyframe(0, np.array([1.0, 0, 0, 0]), np.zeros(3), [7], {})
            ],
            vocabulary=_toy_vocabulary(),
            registry=REGISTRY,
        )
