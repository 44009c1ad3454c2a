"""Bitmap font, fixed-cell number rendering and template-matching decoding.

Every number is drawn into a row of equal cells, one symbol per cell, always
at the same position in the picture. Decoding compares each cell with every
glyph template (plus an all-blank template) and keeps the closest one, which
makes the digit error metric deterministic.
"""
from __future__ import annotations

import itertools
import os
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from ._glyphs import GLYPH_ART
from .exceptions import UnsupportedFormatError
from .imaging import Image

__all__ = [
    "CELL_HEIGHT",
    "CELL_WIDTH",
    "DECIMAL_ALPHABET",
    "ROMAN_ALPHABET",
    "BLANK",
    "Glyph",
    "Font",
    "Layout",
    "builtin_font",
    "save_font",
    "load_font",
    "render_string",
    "render_decimal",
    "render_codes",
    "decode_image",
    "decode_batch",
    "digit_error_rate",
    "encode_strings",
    "pad_symbols",
]

CELL_HEIGHT = 15
CELL_WIDTH = 8
DECIMAL_ALPHABET = "0123456789"
ROMAN_ALPHABET = "IVXLCDMABEFGHJ"
BLANK = " "
MIN_HAMMING = 4


@dataclass(frozen=True, eq=False)
class Glyph:
    symbol: str
    bitmap: np.ndarray

    def __post_init__(self):
        bm = np.asarray(self.bitmap)
        if bm.shape != (CELL_HEIGHT, CELL_WIDTH):
            raise ValueError(f"glyph {self.symbol!r} must be {CELL_HEIGHT}x{CELL_WIDTH}, got {bm.shape}")
        if not np.isin(bm, (0, 1)).all():
            raise ValueError(f"glyph {self.symbol!r} is not binary")
        if bm.sum() == 0:
            raise ValueError(f"glyph {self.symbol!r} has no ink")
        bm = bm.astype(np.uint8)
        bm.setflags(write=False)
        object.__setattr__(self, "bitmap", bm)

    def __eq__(self, other):
        if not isinstance(other, Glyph):
            return NotImplemented
        return self.symbol == other.symbol and np.array_equal(self.bitmap, other.bitmap)

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Font:
    """The 24-symbol font: decimal digits and the 14 Roman numerals."""

    glyphs: Mapping[str, Glyph]
    cell_width: int = CELL_WIDTH
    cell_height: int = CELL_HEIGHT

    def __post_init__(self):
        expected = set(DECIMAL_ALPHABET + ROMAN_ALPHABET)
        if set(self.glyphs) != expected:
            missing = sorted(expected - set(self.glyphs))
            extra = sorted(set(self.glyphs) - expected)
            raise ValueError(f"font alphabet mismatch (missing {missing}, unexpected {extra})")
        for sym, g in self.glyphs.items():
            if g.symbol != sym:
                raise ValueError(f"glyph registered as {sym!r} carries symbol {g.symbol!r}")
        d, a, b = self.min_hamming_pair()
        if d < MIN_HAMMING:
            raise ValueError(f"glyphs {a!r} and {b!r} differ in only {d} pixels (need {MIN_HAMMING})")
        object.__setattr__(self, "glyphs", dict(self.glyphs))

    def __getitem__(self, symbol: str) -> Glyph:
        try:
            return self.glyphs[symbol]
        except KeyError:
            raise ValueError(f"symbol {symbol!r} is not in the font") from None

    def bitmap(self, symbol: str) -> np.ndarray:
        if symbol == BLANK:
            return np.zeros((self.cell_height, self.cell_width), dtype=np.uint8)
        return self[symbol].bitmap

    def min_hamming_pair(self) -> tuple[int, str, str]:
        return min(
            (int(np.count_nonzero(self.glyphs[a].bitmap != self.glyphs[b].bitmap)), a, b)
            for a, b in itertools.combinations(sorted(self.glyphs), 2)
        )

    def templates(self, alphabet: str) -> np.ndarray:
        """Stack of flattened templates, row 0 the blank cell, row k+1 ``alphabet[k]``."""
        bank = np.zeros((len(alphabet) + 1, self.cell_height * self.cell_width))
        for k, sym in enumerate(alphabet):
            bank[k + 1] = self[sym].bitmap.ravel()
        return bank

    def __eq__(self, other):
        if not isinstance(other, Font):
            return NotImplemented
        return self.glyphs.keys() == other.glyphs.keys() and all(
            self.glyphs[k] == other.glyphs[k] for k in self.glyphs
        )

    __hash__ = None


@dataclass(frozen=True)
class Layout:
    """Where the cells sit: ``num_cells`` side by side after ``left_margin`` columns."""

    num_cells: int
    left_margin: int = 2
    cell_width: int = field(default=CELL_WIDTH, repr=False)
    cell_height: int = field(default=CELL_HEIGHT, repr=False)

    def __post_init__(self):
        if self.num_cells < 1:
            raise ValueError("layout needs at least one cell")
        if self.left_margin < 0:
            raise ValueError("left margin must be non-negative")

    @property
    def rows(self) -> int:
        return self.cell_height

    @property
    def cols(self) -> int:
        return self.num_cells * self.cell_width + 2 * self.left_margin

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def size(self) -> int:
        return self.rows * self.cols

    def cell_slice(self, m: int) -> slice:
        """Column span of cell ``m`` counted from 1 at the left."""
        if not 1 <= m <= self.num_cells:
            raise ValueError(f"cell {m} outside 1..{self.num_cells}")
        start = self.left_margin + (m - 1) * self.cell_width
        return slice(start, start + self.cell_width)


def _parse_art(art: str) -> np.ndarray:
    rows = art.strip("\n").split("\n")
    return np.array([[ch == "#" for ch in row] for row in rows], dtype=np.uint8)


@lru_cache(maxsize=1)
def builtin_font() -> Font:
    return Font({sym: Glyph(sym, _parse_art(art)) for sym, art in GLYPH_ART.items()})


# Text format: one line per glyph, "<symbol> <30 hex digits>", the 120 bits
# taken row-major with the first pixel as the most significant bit.

def _bitmap_to_hex(bitmap: np.ndarray) -> str:
    bits = "".join(str(int(b)) for b in bitmap.ravel())
    return f"{int(bits, 2):030x}"


def _hex_to_bitmap(text: str) -> np.ndarray:
    if len(text) != 30:
        raise UnsupportedFormatError(f"glyph bitmap must be 30 hex digits, got {len(text)}")
    try:
        value = int(text, 16)
    except ValueError as exc:
        raise UnsupportedFormatError(f"bad hex bitmap {text!r}") from exc
    bits = f"{value:0120b}"
    return np.array([int(c) for c in bits], dtype=np.uint8).reshape(CELL_HEIGHT, CELL_WIDTH)


def save_font(font: Font, path: str | os.PathLike) -> None:
    with open(path, "w", encoding="ascii") as fh:
        for sym in DECIMAL_ALPHABET + ROMAN_ALPHABET:
            fh.write(f"{sym} {_bitmap_to_hex(font[sym].bitmap)}\n")


def load_font(path: str | os.PathLike) -> Font:
    glyphs = {}
    with open(path, encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2 or len(parts[0]) != 1:
                raise UnsupportedFormatError(f"{path}:{lineno}: expected '<symbol> <hex>'")
            sym, hexbits = parts
            if sym in glyphs:
                raise UnsupportedFormatError(f"{path}:{lineno}: duplicate symbol {sym!r}")
            glyphs[sym] = Glyph(sym, _hex_to_bitmap(hexbits))
    return Font(glyphs)


def _pad(s: str, width: int, align: str) -> str:
    if align == "right":
        return s.rjust(width, BLANK)
    if align == "left":
        return s.ljust(width, BLANK)
    raise ValueError(f"align must be 'right' or 'left', got {align!r}")


def render_codes(codes: np.ndarray, bank: np.ndarray, layout: Layout) -> np.ndarray:
    """Vectorised renderer.

    ``codes`` is an (N, num_cells) integer array of row indices into ``bank``
    (as produced by :meth:`Font.templates`, so 0 means blank). Returns an
    (N, rows, cols) float64 array.
    """
    codes = np.asarray(codes)
    if codes.ndim != 2 or codes.shape[1] != layout.num_cells:
        raise ValueError(f"codes must have shape (N, {layout.num_cells}), got {codes.shape}")
    n = codes.shape[0]
    cells = bank[codes].reshape(n, layout.num_cells, layout.cell_height, layout.cell_width)
    out = np.zeros((n, layout.rows, layout.cols))
    body = cells.transpose(0, 2, 1, 3).reshape(n, layout.rows, layout.num_cells * layout.cell_width)
    out[:, :, layout.left_margin:layout.left_margin + body.shape[2]] = body
    return out


def render_string(s: str, font: Font, layout: Layout, align: str = "right") -> Image:
    if len(s) > layout.num_cells:
        raise ValueError(f"{s!r} needs {len(s)} cells, layout has {layout.num_cells}")
    padded = _pad(s, layout.num_cells, align)
    img = np.zeros(layout.shape)
    for m, sym in enumerate(padded, 1):
        if sym != BLANK:
            img[:, layout.cell_slice(m)] = font[sym].bitmap
    return Image(img)


def render_decimal(value: int, M: int, font: Font, layout: Layout) -> Image:
    """Draw ``value`` zero-padded to exactly ``M`` digits."""
    if layout.num_cells != M:
        raise ValueError(f"layout has {layout.num_cells} cells, expected {M}")
    if not 0 <= value < 10**M:
        raise ValueError(f"{value} does not fit in {M} digits")
    return render_string(f"{value:0{M}d}", font, layout)


def _cells(images: np.ndarray, layout: Layout) -> np.ndarray:
    """(N, rows, cols) -> (N, num_cells, cell_height * cell_width)."""
    n = images.shape[0]
    body = images[:, :, layout.left_margin:layout.left_margin + layout.num_cells * layout.cell_width]
    cells = body.reshape(n, layout.rows, layout.num_cells, layout.cell_width).transpose(0, 2, 1, 3)
    return cells.reshape(n, layout.num_cells, -1)


def decode_batch(
    images: np.ndarray,
    font: Font,
    layout: Layout,
    alphabet: str = DECIMAL_ALPHABET,
) -> tuple[list[str], np.ndarray]:
    """Decode a stack of pictures; accepts (N, rows, cols) or flattened (N, rows*cols).

    Returns the decoded strings (blank cells as ``' '``) and an (N, num_cells)
    array of margins: second-best SSD minus best SSD.
    """
    images = np.asarray(images, dtype=np.float64)
    if images.ndim == 2 and images.shape[1] == layout.size:
        images = images.reshape(-1, *layout.shape)
    if images.ndim != 3 or images.shape[1:] != layout.shape:
        raise ValueError(f"images of shape {images.shape[1:]} do not match layout {layout.shape}")
    bank = font.templates(alphabet)
    cells = _cells(images, layout)
    # SSD(x, t) = |x|^2 - 2 x.t + |t|^2
    ssd = (
        np.einsum("nck,nck->nc", cells, cells)[:, :, None]
        - 2.0 * cells @ bank.T
        + np.einsum("tk,tk->t", bank, bank)[None, None, :]
    )
    order = np.argsort(ssd, axis=2, kind="stable")
    best = order[:, :, 0]
    ranked = np.take_along_axis(ssd, order[:, :, :2], axis=2)
    margins = ranked[:, :, 1] - ranked[:, :, 0]
    symbols = np.array([BLANK] + list(alphabet))
    strings = ["".join(row) for row in symbols[best]]
    return strings, margins


def decode_image(
    img: Image,
    font: Font,
    layout: Layout,
    alphabet: str = DECIMAL_ALPHABET,
) -> tuple[str, np.ndarray]:
    if img.shape != layout.shape:
        raise ValueError(f"image {img.shape} does not match layout {layout.shape}")
    strings, margins = decode_batch(img.pixels[None], font, layout, alphabet)
    return strings[0], margins[0]


def digit_error_rate(predicted: Sequence[str], truth: Sequence[str]) -> float:
    """Fraction of symbol positions where ``predicted`` disagrees with ``truth``."""
    if len(predicted) != len(truth):
        raise ValueError(f"{len(predicted)} predictions for {len(truth)} truths")
    wrong = total = 0
    for p, t in zip(predicted, truth):
        if len(p) != len(t):
            raise ValueError(f"string lengths differ: {p!r} vs {t!r}")
        wrong += sum(a != b for a, b in zip(p, t))
        total += len(t)
    return wrong / total if total else 0.0


def pad_symbols(s: str, width: int, align: str = "right") -> str:
    return _pad(s, width, align)


def encode_strings(strings: Iterable[str], alphabet: str, width: int, align: str = "right") -> np.ndarray:
    """Turn symbol strings into (N, width) code arrays for :func:`render_codes`."""
    lookup = {sym: k + 1 for k, sym in enumerate(alphabet)}
    lookup[BLANK] = 0
    rows = []
    for s in strings:
        if len(s) > width:
            raise ValueError(f"{s!r} needs {len(s)} cells, layout has {width}")
        try:
            rows.append([lookup[c] for c in _pad(s, width, align)])
        except KeyError as exc:
            raise ValueError(f"symbol {exc.args[0]!r} not in alphabet {alphabet!r}") from None
    return np.array(rows, dtype=np.intp).reshape(-1, width)
