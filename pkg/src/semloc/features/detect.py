"""Blob keypoint detection via the determinant of the Hessian.

The response map is det(H) of Gaussian second derivatives; keypoints are
strict 3x3 local maxima above threshold, localized to sub-pixel accuracy by
a separable quadratic fit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import ndimage

DEFAULT_SIGMA = 2.0
DEFAULT_SCALE = 8.0
_BORDER = 2


@dataclass
class Keypoint:
    x: float
    y: float
    response: float
    scale: float = DEFAULT_SCALE


@dataclass
class AdaptiveDetection:
    keypoints: list
    threshold: float
    in_range: bool


def _response_map(image: np.ndarray, sigma: float) -> np.ndarray:
    img = np.asarray(image, dtype=float) / 255.0
    ixx = ndimage.gaussian_filter(img, sigma, order=(0, 2))
    iyy = ndimage.gaussian_filter(img, sigma, order=(2, 0))
    ixy = ndimage.gaussian_filter(img, sigma, order=(1, 1))
    return ixx * iyy - ixy * ixy


def _local_maxima(image: np.ndarray, sigma: float) -> tuple[np.ndarray, np.ndarray]:
    """All strict-in-neighborhood positive maxima: (rows, cols) plus the response map."""
    resp = _response_map(image, sigma)
    footprint_max = ndimage.maximum_filter(resp, size=3, mode="nearest")
    peaks = (resp >= footprint_max) & (resp > 0.0)
    peaks[:_BORDER, :] = False
    peaks[-_BORDER:, :] = False
    peaks[:, :_BORDER] = False
    peaks[:, -_BORDER:] = False
    return np.argwhere(peaks), resp


def _subpixel(resp: np.ndarray, row: int, col: int) -> tuple[float, float]:
    def offset(m1: float, c0: float, p1: float) -> float:
        denom = m1 - 2.0 * c0 + p1
        if abs(denom) < 1e-18:
            return 0.0
        return float(np.clip(0.5 * (m1 - p1) / denom, -0.49, 0.49))

    dx = offset(resp[row, col - 1], resp[row, col], resp[row, col + 1])
    dy = offset(resp[row - 1, col], resp[row, col], resp[row + 1, col])
    return col + dx, row + dy


def detect(
    image: np.ndarray,
    threshold: float,
    mask: np.ndarray | None = None,
    sigma: float = DEFAULT_SIGMA,
    scale: float = DEFAULT_SCALE,
) -> list[Keypoint]:
    """Keypoints with response >= threshold, strongest first.

    mask: optional boolean array of the image shape; keypoints whose rounded
    center falls on a False pixel are discarded.
    """
    coords, resp = _local_maxima(image, sigma)
    return _collect(coords, resp, threshold, mask, scale)


def _collect(coords, resp, threshold, mask, scale) -> list[Keypoint]:
    keypoints = []
    for row, col in coords:
        r = resp[row, col]
        if r < threshold:
            continue
        x, y = _subpixel(resp, row, col)
        if mask is not None and not mask[int(round(y)), int(round(x))]:
            continue
        keypoints.append(Keypoint(x=x, y=y, response=float(r), scale=scale))
    keypoints.sort(key=lambda k: (-k.response, k.y, k.x))
    return keypoints


def detect_adaptive(
    image: np.ndarray,
    min_count: int = 1000,
    max_count: int = 5000,
    mask: np.ndarray | None = None,
    sigma: float = DEFAULT_SIGMA,
    scale: float = DEFAULT_SCALE,
    max_iterations: int = 20,
) -> AdaptiveDetection:
    """Bisect the detection threshold until the keypoint count lands in
    [min_count, max_count] (at most max_iterations probes).

    When the range is unreachable, the closest achievable count is returned
    with in_range=False.
    """
    coords, resp = _local_maxima(image, sigma)

    def count_at(th: float) -> int:
        if mask is None:
            return int(np.sum(resp[coords[:, 0], coords[:, 1]] >= th))
        n = 0
        for row, col in coords:
            if resp[row, col] < th:
                continue
            x, y = _subpixel(resp, row, col)
            if mask[int(round(y)), int(round(x))]:
                n += 1
        return n

    lo = 1e-12
    hi = float(resp.max()) * 2.0 + lo if resp.size else 1.0
    best_th = lo
    best_gap = None

    def gap(c: int) -> int:
        if c < min_count:
            return min_count - c
        if c > max_count:
            return c - max_count
        return 0

    th = lo
    for _ in range(max_iterations):
        th = 0.5 * (lo + hi)
        c = count_at(th)
        g = gap(c)
        if best_gap is None or g < best_gap:
            best_gap, best_th = g, th
        if g == 0:
            break
        if c > max_count:
            lo = th
        else:
            hi = th
    # the lowest threshold is the fallback when even it yields too few
    if best_gap and count_at(1e-12) < min_count:
        c_all = count_at(1e-12)
        if gap(c_all) <= best_gap:
            best_th, best_gap = 1e-12, gap(c_all)

    kps = _collect(coords, resp, best_th, mask, scale)
    return AdaptiveDetection(keypoints=kps, threshold=best_th, in_range=(gap(len(kps)) == 0))
