"""Binary PPM (P6) reading and writing, 8-bit channels only."""

from __future__ import annotations

import os

import numpy as np

from .exceptions import MalformedHeader, UnsupportedFormat
from .validation import check_rgb_image

_WHITESPACE = b" \t\n\r\x0b\x0c"


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping ``#`` comments.

    Returns the tokens and the offset of the single whitespace byte that
    terminates the last one.
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
            raise MalformedHeader("PPM header ended early", section="header")
        tokens.append(data[start:pos])
    if pos >= n or data[pos] not in _WHITESPACE:
        raise MalformedHeader("PPM header must end with one whitespace byte", section="header")
    return tokens, pos


def parse_ppm(data: bytes) -> np.ndarray:
    if data[:2] != b"P6":
        raise UnsupportedFormat(f"not a binary P6 pixmap (magic {data[:2]!r})")
    tokens, end = _header_tokens(data, 4)
    try:
        width, height, maxval = (int(t) for t in tokens[1:])
    except ValueError:
        raise MalformedHeader(f"non-integer PPM header field in {tokens[1:]}",
                              section="header") from None
    if width <= 0 or height <= 0:
        raise MalformedHeader(f"bad PPM dimensions {width}x{height}", section="header")
    if maxval != 255:
        raise UnsupportedFormat(f"only maxval 255 is supported, got {maxval}")
    body = data[end + 1:]
    need = width * height * 3
    if len(body) < need:
        raise MalformedHeader(f"pixel data has {len(body)} bytes, expected {need}",
                              section="pixels")
    return np.frombuffer(body[:need], dtype=np.uint8).reshape(height, width, 3).copy()


def load_ppm(path: str | os.PathLike) -> np.ndarray:
    """Read a P6 file into an ``(height, width, 3)`` uint8 array."""
    with open(path, "rb") as f:
        return parse_ppm(f.read())


def format_ppm(pixels) -> bytes:
    rgb = check_rgb_image(pixels)
    height, width = rgb.shape[:2]
    return b"P6\n%d %d\n255\n" % (width, height) + rgb.tobytes()


def write_ppm(path: str | os.PathLike, pixels) -> None:
    data = format_ppm(pixels)
    with open(path, "wb") as f:
        f.write(data)
