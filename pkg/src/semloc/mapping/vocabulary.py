"""Flat visual-word vocabulary: seeded k-means clustering plus TF-IDF weights."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import InsufficientDataError

DEFAULT_VOCABULARY_K = 256
_MAX_ITERATIONS = 50
_MOVEMENT_TOL = 1e-6


@dataclass
class Vocabulary:
    """k unit-normalized centroid descriptors with per-word idf weights."""

    centroids: np.ndarray  # (k, d)
    idf: np.ndarray  # (k,)

    def __post_init__(self):
        self.centroids = np.asarray(self.centroids, dtype=float)
        self.idf = np.asarray(self.idf, dtype=float)
        if self.centroids.ndim != 2 or len(self.centroids) < 2:
            raise InsufficientDataError("vocabulary needs at least 2 centroids")
        if self.idf.shape != (len(self.centroids),):
            raise InsufficientDataError("idf length must equal centroid count")
        if (self.idf < 0).any():
            raise InsufficientDataError("idf weights must be non-negative")

    @property
    def k(self) -> int:
        return len(self.centroids)

    def quantize(self, descriptors: np.ndarray) -> np.ndarray:
        """Nearest-centroid word index per descriptor (ties: lower index)."""
        descriptors = np.atleast_2d(np.asarray(descriptors, dtype=float))
        if descriptors.shape[0] == 0:
            return np.zeros(0, dtype=int)
        return cdist(descriptors, self.centroids).argmin(axis=1)


def _kmeans_pp_init(data: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    """D^2-weighted seeding: each new centroid drawn with probability
    proportional to squared distance from the nearest one chosen so far."""
    centroids = np.empty((k, data.shape[1]))
    centroids[0] = data[rng.integers(len(data))]
    d2 = np.sum((data - centroids[0]) ** 2, axis=1)
    for i in range(1, k):
        total = d2.sum()
        if total <= 0.0:  # all remaining points coincide with a centroid
            choice = rng.integers(len(data))
        else:
            choice = rng.choice(len(data), p=d2 / total)
        centroids[i] = data[choice]
        d2 = np.minimum(d2, np.sum((data - centroids[i]) ** 2, axis=1))
    return centroids


def _lloyd(data: np.ndarray, centroids: np.ndarray) -> np.ndarray:
    k = len(centroids)
    for _ in range(_MAX_ITERATIONS):
        assign = cdist(data, centroids).argmin(axis=1)
        updated = centroids.copy()
        for j in range(k):
            members = data[assign == j]
            if len(members):
                updated[j] = members.mean(axis=0)
            else:
                # revive an empty cluster at the point worst served by its own
                farthest = int(np.argmax(np.sum((data - centroids[assign]) ** 2, axis=1)))
                updated[j] = data[farthest]
        movement = np.max(np.linalg.norm(updated - centroids, axis=1))
        centroids = updated
        if movement < _MOVEMENT_TOL:
            break
    return centroids


def build_vocabulary(
    frame_descriptors: Sequence[np.ndarray], k: int, seed: int = 0
) -> Vocabulary:
    """Cluster all frames' descriptors into k words; idf is computed over the
    training frames as ln(frames / (1 + frames containing the word)), clamped
    at zero so ubiquitous words are simply ignored.
    """
    frames = [np.atleast_2d(np.asarray(d, dtype=float)) for d in frame_descriptors]
    frames = [f for f in frames if f.shape[0] > 0]
    if not frames:
        raise InsufficientDataError("no training descriptors")
    data = np.vstack(frames)
    if k < 2:
        raise InsufficientDataError("vocabulary needs k >= 2")
    if len(data) < k:
        raise InsufficientDataError(
            f"need at least k={k} training descriptors, got {len(data)}"
        )

    rng = np.random.default_rng(seed)
    centroids = _lloyd(data, _kmeans_pp_init(data, k, rng))
    norms = np.linalg.norm(centroids, axis=1, keepdims=True)
    norms[norms < 1e-12] = 1.0
    centroids = centroids / norms

    n_frames = len(frames)
    document_frequency = np.zeros(k)
    for frame in frames:
        words = np.unique(cdist(frame, centroids).argmin(axis=1))
        document_frequency[words] += 1
    idf = np.maximum(np.log(n_frames / (1.0 + document_frequency)), 0.0)
    return Vocabulary(centroids=centroids, idf=idf)


def bow_vector(descriptors: np.ndarray, vocab: Vocabulary) -> dict[int, float]:
    """Sparse L2-normalized tf-idf vector over visual words.

    Empty input — or a frame whose every word has zero idf — gives an empty
    vector; non-empty vectors have unit norm so cosine similarity is a plain
    dot product over shared words.
    """
    descriptors = np.atleast_2d(np.asarray(descriptors, dtype=float))
    if descriptors.shape[0] == 0:
        return {}
    words, counts = np.unique(vocab.quantize(descriptors), return_counts=True)
    tf = counts / counts.sum()
    weights = tf * vocab.idf[words]
    norm = float(np.linalg.norm(weights))
    if norm < 1e-12:
        return {}
    return {
        int(w): float(v / norm) for w, v in zip(words, weights) if v > 0.0
    }


def cosine_similarity(a: dict[int, float], b: dict[int, float]) -> float:
    """Dot product of two unit-normalized sparse vectors, iterated in sorted
    word order so repeated scoring of the same pair is bitwise stable."""
    if len(b) < len(a):
        a, b = b, a
    return sum(a[w] * b[w] for w in sorted(a) if w in b)
