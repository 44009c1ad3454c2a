"""Grayscale images, pixel noise and binary PGM (P5) I/O.

Intensities are float64 in [0, 1]; background is 0 and glyph ink is 1.
Quantization to 8 bits only happens when writing a file.
"""
from __future__ import annotations

import os
from dataclasses import dataclass

import numpy as np

from .exceptions import TruncatedPayloadError, UnsupportedFormatError

__all__ = [
    "Image",
    "new_image",
    "add_gaussian_noise",
    "mse",
    "write_pgm",
    "read_pgm",
]


@dataclass(frozen=True, eq=False)
class Image:
    """A rows x cols grayscale picture.

    ``pixels`` is stored as a read-only 2-D float64 array.
    """

    pixels: np.ndarray

    def __post_init__(self):
        px = np.array(self.pixels, dtype=np.float64)
        if px.ndim != 2 or px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError(f"image pixels must be a non-empty 2-D array, got shape {px.shape}")
        if not np.all(np.isfinite(px)) or px.min() < 0.0 or px.max() > 1.0:
            raise ValueError("image intensities must lie in [0, 1]")
        px.setflags(write=False)
        object.__setattr__(self, "pixels", px)

    @property
    def rows(self) -> int:
        return self.pixels.shape[0]

    @property
    def cols(self) -> int:
        return self.pixels.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.pixels.shape

    def ravel(self) -> np.ndarray:
        return self.pixels.ravel()

    def __eq__(self, other):
        if not isinstance(other, Image):
            return NotImplemented
        return self.shape == other.shape and bool(np.array_equal(self.pixels, other.pixels))

    def __repr__(self):
        return f"Image(rows={self.rows}, cols={self.cols})"


def new_image(rows: int, cols: int, fill: float = 0.0) -> Image:
    if rows < 1 or cols < 1:
        raise ValueError(f"image dimensions must be positive, got {rows}x{cols}")
    if not 0.0 <= fill <= 1.0:
        raise ValueError(f"fill intensity {fill} outside [0, 1]")
    return Image(np.full((rows, cols), float(fill)))


def add_gaussian_noise(img: Image, sigma: float, rng: np.random.Generator) -> Image:
    """Return ``clip(img + N(0, sigma^2), 0, 1)``; ``img`` is left untouched."""
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    if sigma == 0:
        return img
    noisy = img.pixels + rng.normal(0.0, sigma, size=img.shape)
    return Image(np.clip(noisy, 0.0, 1.0))


def mse(a: Image, b: Image) -> float:
    """Mean squared pixel difference."""
    if a.shape != b.shape:
        raise ValueError(f"image shapes differ: {a.shape} vs {b.shape}")
    return float(np.mean((a.pixels - b.pixels) ** 2))


def _to_bytes(img: Image) -> bytes:
    header = f"P5\n{img.cols} {img.rows}\n255\n".encode("ascii")
    body = np.rint(img.pixels * 255.0).astype(np.uint8).tobytes()
    return header + body


def write_pgm(img: Image, path: str | os.PathLike) -> None:
    with open(path, "wb") as fh:
        fh.write(_to_bytes(img))


def _header_tokens(data: bytes, count: int) -> tuple[list[bytes], int]:
    """Read ``count`` whitespace-separated header tokens, skipping comments."""
    tokens = []
    pos = 0
    n = len(data)
    while len(tokens) < count:
        while pos < n and data[pos:pos + 1].isspace():
            pos += 1
        if pos >= n:
            raise UnsupportedFormatError("PGM header ended early")
        if data[pos:pos + 1] == b"#":
            while pos < n and data[pos:pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < n and not data[pos:pos + 1].isspace():
            pos += 1
        tokens.append(data[start:pos])
    # exactly one whitespace byte separates maxval from the raster
    if pos >= n or not data[pos:pos + 1].isspace():
        raise UnsupportedFormatError("PGM header is not terminated")
    return tokens, pos + 1


def read_pgm(path: str | os.PathLike) -> Image:
    with open(path, "rb") as fh:
        data = fh.read()
    tokens, offset = _header_tokens(data, 4)
    magic, width, height, maxval = tokens
    if magic != b"P5":
        raise UnsupportedFormatError(f"not a binary PGM (magic {magic!r})")
    try:
        cols, rows, maxval = int(width), int(height), int(maxval)
    except ValueError as exc:
        raise UnsupportedFormatError("non-numeric PGM header field") from exc
    if maxval != 255:
        raise UnsupportedFormatError(f"only maxval 255 is supported, got {maxval}")
    if rows < 1 or cols < 1:
        raise UnsupportedFormatError(f"bad PGM dimensions {cols}x{rows}")
    body = data[offset:]
    if len(body) != rows * cols:
        raise TruncatedPayloadError(f"expected {rows * cols} raster bytes, found {len(body)}")
    raster = np.frombuffer(body, dtype=np.uint8).reshape(rows, cols)
    return Image(raster / 255.0)
