"""Class-aware descriptor matching and match filtering."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from ..features.match import DEFAULT_RATIO, Match, knn_ratio_match


def match_per_class(
    query_descriptors: np.ndarray,
    query_labels: Sequence[int | None],
    train_descriptors: np.ndarray,
    train_labels: Sequence[int | None],
    ratio: float = DEFAULT_RATIO,
) -> list[Match]:
    """Run the ratio-test matcher independently inside each class.

    Unlabelled descriptors on either side never participate.  The ratio
    test's second-nearest neighbour therefore comes from the same class,
    which keeps repeated structure in *other* classes from suppressing a
    valid match.  Returned indices refer to the original arrays; results
    are sorted by query index, then train index.
    """
    query_descriptors = np.asarray(query_descriptors, dtype=float)
    train_descriptors = np.asarray(train_descriptors, dtype=float)
    if len(query_labels) != len(query_descriptors):
        raise ValueError("query labels and descriptors disagree in length")
    if len(train_labels) != len(train_descriptors):
        raise ValueError("train labels and descriptors disagree in length")

    classes = sorted(
        {c for c in query_labels if c is not None} & {c for c in train_labels if c is not None}
    )
    matches: list[Match] = []
    for class_id in classes:
        q_idx = np.flatnonzero([c == class_id for c in query_labels])
        t_idx = np.flatnonzero([c == class_id for c in train_labels])
        for m in knn_ratio_match(
            query_descriptors[q_idx], train_descriptors[t_idx], ratio=ratio
        ):
            matches.append(
                Match(
                    query_index=int(q_idx[m.query_index]),
                    train_index=int(t_idx[m.train_index]),
                    distance=m.distance,
                    ratio=m.ratio,
                )
            )
    matches.sort(key=lambda m: (m.query_index, m.train_index))
    return matches


def filter_matches_by_class(
    matches: Sequence[Match],
    query_labels: Sequence[int | None],
    train_labels: Sequence[int | None],
) -> list[Match]:
    """Keep only matches whose two endpoints are both labelled and agree.

    Order-preserving and idempotent; the output is always a subset of the
    input.
    """
    kept = []
    for m in matches:
        ql = query_labels[m.query_index]
        tl = train_labels[m.train_index]
        if ql is not None and ql == tl:
            kept.append(m)
    return kept
