"""Decimal digits, 1-hot vectors, and additive Roman numerals.

Roman numerals are written purely additively (4 is ``IIII``). Above M the
alphabet continues with invented symbols so every decade has a 1/5 pair:

    I=1 V=5 X=10 L=50 C=100 D=500 M=1000 A=5000 B=10^4 E=5*10^4
    F=10^5 G=5*10^5 H=10^6 J=5*10^6
"""
from __future__ import annotations

import numpy as np

from .font import BLANK, ROMAN_ALPHABET

__all__ = [
    "ROMAN_VALUES",
    "ROMAN_MAX",
    "digits_of",
    "one_hot_encode",
    "one_hot_decode",
    "to_roman",
    "from_roman",
    "roman_length_bound",
    "roman_one_hot_encode",
    "roman_one_hot_decode",
]

ROMAN_VALUES = {
    "I": 1,
    "V": 5,
    "X": 10,
    "L": 50,
    "C": 100,
    "D": 500,
    "M": 1000,
    "A": 5000,
    "B": 10_000,
    "E": 50_000,
    "F": 100_000,
    "G": 500_000,
    "H": 1_000_000,
    "J": 5_000_000,
}
ROMAN_MAX = 9_999_999
# largest symbol first
_DESCENDING = sorted(ROMAN_VALUES.items(), key=lambda kv: -kv[1])
_ROMAN_CLASSES = BLANK + ROMAN_ALPHABET


def digits_of(value: int, M: int) -> list[int]:
    """Digits of ``value``, least significant first, exactly ``M`` of them."""
    if not 0 <= value < 10**M:
        raise ValueError(f"{value} does not fit in {M} digits")
    out = []
    for _ in range(M):
        value, d = divmod(value, 10)
        out.append(d)
    return out


def one_hot_encode(value: int, M: int) -> np.ndarray:
    """Block m (from 0, least significant) holds the 1 at index ``10*m + digit``."""
    vec = np.zeros(10 * M)
    for m, d in enumerate(digits_of(value, M)):
        vec[10 * m + d] = 1.0
    return vec


def one_hot_decode(bits) -> int:
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size == 0 or bits.size % 10:
        raise ValueError(f"1-hot vector length must be a positive multiple of 10, got {bits.shape}")
    blocks = bits.reshape(-1, 10)
    if not (np.isin(blocks, (0, 1)).all() and (blocks.sum(axis=1) == 1).all()):
        raise ValueError("malformed 1-hot vector: need exactly one 1 per 10-block")
    digits = blocks.argmax(axis=1)
    return sum(int(d) * 10**m for m, d in enumerate(digits))


def to_roman(value: int) -> str:
    if not 0 <= value <= ROMAN_MAX:
        raise ValueError(f"{value} outside the Roman range [0, {ROMAN_MAX}]")
    out = []
    for sym, v in _DESCENDING:
        count, value = divmod(value, v)
        out.append(sym * count)
    return "".join(out)


def from_roman(s: str) -> int:
    """Parse an additive numeral, rejecting out-of-order or over-long runs."""
    total = 0
    prev = None
    run = 0
    for ch in s:
        try:
            v = ROMAN_VALUES[ch]
        except KeyError:
            raise ValueError(f"{ch!r} is not a Roman numeral symbol") from None
        if prev is not None and v > prev:
            raise ValueError(f"{s!r}: symbols must not increase in value")
        run = run + 1 if v == prev else 1
        limit = 1 if str(v)[0] == "5" else 4
        if run > limit:
            raise ValueError(f"{s!r}: {ch!r} repeated more than {limit} times")
        prev = v
        total += v
    return total


def roman_length_bound(M: int) -> int:
    """Longest numeral needed for any value below 10**M (5 symbols per decade)."""
    return 5 * M


def roman_one_hot_encode(value: int, L: int = 35) -> np.ndarray:
    """Right-aligned, one 15-way block per cell; class 0 is blank."""
    s = to_roman(value)
    if len(s) > L:
        raise ValueError(f"{value} needs {len(s)} Roman cells, only {L} available")
    vec = np.zeros(15 * L)
    for cell, ch in enumerate(s.rjust(L, BLANK)):
        vec[15 * cell + _ROMAN_CLASSES.index(ch)] = 1.0
    return vec


def roman_one_hot_decode(bits) -> int:
    bits = np.asarray(bits)
    if bits.ndim != 1 or bits.size == 0 or bits.size % 15:
        raise ValueError(f"Roman 1-hot length must be a positive multiple of 15, got {bits.shape}")
    blocks = bits.reshape(-1, 15)
    if not (np.isin(blocks, (0, 1)).all() and (blocks.sum(axis=1) == 1).all()):
        raise ValueError("malformed Roman 1-hot vector: need exactly one 1 per 15-block")
    s = "".join(_ROMAN_CLASSES[k] for k in blocks.argmax(axis=1))
    if s.lstrip(BLANK) != s.replace(BLANK, ""):
        raise ValueError(f"blank cells must only lead the numeral, got {s!r}")
    return from_roman(s.strip(BLANK))
