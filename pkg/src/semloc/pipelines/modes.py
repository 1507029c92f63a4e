"""Semantic operating modes shared by the estimation pipelines."""

from __future__ import annotations

import enum

import numpy as np


class SemanticMode(enum.Enum):
    """How object detections participate in feature matching.

    BASELINE ignores semantics entirely; PRE masks the image to detected
    regions before feature detection and matches within each class; POST
    matches everything first and then discards class-inconsistent pairs.
    """

    BASELINE = "baseline"
    PRE = "pre"
    POST = "post"

    @classmethod
    def parse(cls, value: "SemanticMode | str") -> "SemanticMode":
        if isinstance(value, SemanticMode):
            return value
        try:
            return cls(value)
        except ValueError:
            raise ValueError(f"unknown semantic mode: {value!r}") from None


def derive_rng_seed(seed: int, *ids: int) -> int:
    """Stable per-item RNG seed so parallel and serial runs agree."""
    return int(np.random.SeedSequence([int(seed), *map(int, ids)]).generate_state(1)[0])
