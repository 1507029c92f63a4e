"""Patch descriptors: 4x4 spatial cells x 4 gradient statistics = 64 dims.

Each cell accumulates (sum dx, sum |dx|, sum dy, sum |dy|) of central
differences over the patch around the keypoint; the stacked vector is
L2-normalized, which cancels global illumination scaling.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DESCRIPTOR_DIM = 64
_GRID = 4


@dataclass
class DescribeResult:
    descriptors: np.ndarray        # (n_kept, 64) float64, unit L2 norm
    kept_indices: np.ndarray       # indices into the input keypoint list
    dropped_indices: np.ndarray    # keypoints too close to the border (or flat)


def describe(image: np.ndarray, keypoints: list) -> DescribeResult:
    img = np.asarray(image, dtype=float)
    h, w = img.shape
    descriptors = []
    kept, dropped = [], []

    for i, kp in enumerate(keypoints):
        half = int(round(kp.scale))
        side = 2 * half
        side -= side % _GRID
        if side < _GRID:
            side = _GRID
        half = side // 2
        cx, cy = int(round(kp.x)), int(round(kp.y))
        # central differences need one extra pixel on each side
        if cx - half < 1 or cy - half < 1 or cx + half >= w - 1 or cy + half >= h - 1:
            dropped.append(i)
            continue
        patch = img[cy - half - 1 : cy + half + 1, cx - half - 1 : cx + half + 1]
        dx = 0.5 * (patch[1:-1, 2:] - patch[1:-1, :-2])
        dy = 0.5 * (patch[2:, 1:-1] - patch[:-2, 1:-1])
        cell = side // _GRID
        vec = np.empty(DESCRIPTOR_DIM)
        idx = 0
        for gy in range(_GRID):
            for gx in range(_GRID):
                sl = (slice(gy * cell, (gy + 1) * cell), slice(gx * cell, (gx + 1) * cell))
                vec[idx : idx + 4] = (
                    dx[sl].sum(),
                    np.abs(dx[sl]).sum(),
                    dy[sl].sum(),
                    np.abs(dy[sl]).sum(),
                )
                idx += 4
        norm = np.linalg.norm(vec)
        if norm < 1e-12:
            dropped.append(i)
            continue
        descriptors.append(vec / norm)
        kept.append(i)

    desc = np.vstack(descriptors) if descriptors else np.empty((0, DESCRIPTOR_DIM))
    return DescribeResult(
        descriptors=desc,
        kept_indices=np.asarray(kept, dtype=int),
        dropped_indices=np.asarray(dropped, dtype=int),
    )
