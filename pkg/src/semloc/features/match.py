"""Exact nearest-neighbor descriptor matching with Lowe's ratio test."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

DEFAULT_RATIO = 0.7


@dataclass
class Match:
    query_index: int
    train_index: int
    distance: float
    ratio: float


def knn_ratio_match(
    query: np.ndarray, train: np.ndarray, ratio: float = DEFAULT_RATIO
) -> list[Match]:
    """One match per query descriptor passing the strict ratio test.

    A match is emitted iff d(best) / d(second best) < ratio; with fewer than
    two train descriptors no match can pass.  Distances are Euclidean and
    computed exhaustively.
    """
    query = np.asarray(query, dtype=float)
    train = np.asarray(train, dtype=float)
    if query.shape[0] == 0 or train.shape[0] < 2:
        return []

    dist = cdist(query, train)
    order = np.argsort(dist, axis=1, kind="stable")
    best = order[:, 0]
    second = order[:, 1]
    d1 = dist[np.arange(len(query)), best]
    d2 = dist[np.arange(len(query)), second]

    matches = []
    for qi in range(len(query)):
        if d2[qi] <= 0.0:
            continue  # identical duplicates: fully ambiguous
        r = d1[qi] / d2[qi]
        if r < ratio:
            matches.append(Match(qi, int(best[qi]), float(d1[qi]), float(r)))
    return matches
