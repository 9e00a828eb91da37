"""Binary PGM (P5, maxval 255) reading and writing.

Images are plain ``numpy.ndarray`` objects of dtype ``uint8`` and shape
``(M, N)``: M rows (height) by N columns (width).
"""
from __future__ import annotations

import os

import numpy as np

from .errors import BadHeaderError, BadMagicError, ConfigError, MaxvalError, TruncatedRasterError

_WHITESPACE = b" \t\n\r\v\f"


def check_image(img) -> np.ndarray:
    """Return `img` as a 2-D uint8 array, raising ConfigError if it is not one."""
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ConfigError(f"expected a 2-D grayscale image, got shape {arr.shape}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ConfigError(f"empty image {arr.shape}")
    if arr.dtype != np.uint8:
        if not np.issubdtype(arr.dtype, np.integer) or arr.min() < 0 or arr.max() > 255:
            raise ConfigError("pixel values must be integers in [0, 255]")
        arr = arr.astype(np.uint8)
    return arr


def _header_tokens(data: bytes, count: int):
    """Read `count` whitespace-separated header tokens, skipping '#' comments.

    Returns the tokens and the offset just past the single whitespace byte
    that terminates the last token.
    """
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos] in _WHITESPACE:
            pos += 1
        if pos < n and data[pos] == ord("#"):
            while pos < n and data[pos] not in b"\r\n":
                pos += 1
            continue
        start = pos
        while pos < n and data[pos] not in _WHITESPACE and data[pos] != ord("#"):
            pos += 1
        if start == pos:
            raise BadHeaderError("PGM header ended early")
        tokens.append(data[start:pos])
    if pos >= n or data[pos] not in _WHITESPACE:
        raise BadHeaderError("missing whitespace after PGM maxval")
    return tokens, pos + 1


def load_image(data) -> np.ndarray:
    """Decode a binary PGM stream (bytes or a binary file object)."""
    if hasattr(data, "read"):
        data = data.read()
    data = bytes(data)
    if data[:2] != b"P5":
        raise BadMagicError(f"not a binary PGM (magic {data[:2]!r})")
    if len(data) < 3 or data[2] not in _WHITESPACE:
        raise BadMagicError("magic number must be followed by whitespace")
    tokens, offset = _header_tokens(data[2:], 3)
    offset += 2
    try:
        width, height, maxval = (int(t) for t in tokens)
    except ValueError as exc:
        raise BadHeaderError(f"non-numeric PGM header field: {exc}") from None
    if width < 1 or height < 1:
        raise BadHeaderError(f"invalid dimensions {width}x{height}")
    if maxval != 255:
        raise MaxvalError(f"maxval {maxval} unsupported (only 255)")
    size = width * height
    raster = data[offset:offset + size]
    if len(raster) < size:
        raise TruncatedRasterError(f"raster has {len(raster)} of {size} bytes")
    return np.frombuffer(raster, dtype=np.uint8).reshape(height, width).copy()


def save_image(img) -> bytes:
    """Encode an image as canonical PGM: ``P5\\n<W> <H>\\n255\\n`` + raster."""
    arr = check_image(img)
    height, width = arr.shape
    return b"P5\n%d %d\n255\n" % (width, height) + arr.tobytes()


def read_pgm(path) -> np.ndarray:
    with open(path, "rb") as fh:
        return load_image(fh.read())


def write_pgm(path, img) -> None:
    """Write atomically: the target is replaced only once the data is complete."""
    blob = save_image(img)
    tmp = f"{os.fspath(path)}.part"
    with open(tmp, "wb") as fh:
        fh.write(blob)
    os.replace(tmp, path)
