"""Grayscale image loading and saving in binary PGM (P5, maxval 255).

Images are plain 2-d uint8 numpy arrays of shape (height, width) throughout
the package.
"""

from __future__ import annotations

import numpy as np

from ..errors import AnnotationError


def read_pgm(path: str) -> np.ndarray:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"P5"):
        raise AnnotationError(f"{path}: not a binary PGM (P5) file")

    # header tokens: magic, width, height, maxval; '#' comments allowed
    tokens: list[bytes] = []
    pos = 2
    while len(tokens) < 3 and pos < len(data):
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        if data[pos : pos + 1] == b"#":
            while pos < len(data) and data[pos : pos + 1] != b"\n":
                pos += 1
            continue
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    pos += 1  # single whitespace after maxval

    try:
        width, height, maxval = (int(t) for t in tokens)
    except (ValueError, IndexError) as exc:
        raise AnnotationError(f"{path}: malformed PGM header") from exc
    if maxval != 255:
        raise AnnotationError(f"{path}: unsupported maxval {maxval}")
    pixels = np.frombuffer(data[pos : pos + width * height], dtype=np.uint8)
    if pixels.size != width * height:
        raise AnnotationError(f"{path}: truncated pixel data")
    return pixels.reshape(height, width).copy()


def write_pgm(path: str, image: np.ndarray) -> None:
    image = np.asarray(image)
    if image.ndim != 2:
        raise AnnotationError("image must be a 2-d array")
    img = np.clip(image, 0, 255).astype(np.uint8)
    header = f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode()
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(img.tobytes())
