"""Operand sampling, sample assembly and dataset files.

A sample is two input numbers and their result, each either drawn into a
picture (``visual`` mode) or written as a 1-hot vector (``one_hot`` mode).
Sample ``i`` of a dataset draws everything it needs from its own generator
seeded with ``(seed, i)``.
"""
from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass, field

import numpy as np

from .exceptions import TruncatedPayloadError, UnsupportedFormatError
from .font import (
    BLANK,
    DECIMAL_ALPHABET,
    ROMAN_ALPHABET,
    Font,
    Layout,
    builtin_font,
    decode_batch,
    encode_strings,
    render_codes,
)
from .imaging import Image, add_gaussian_noise
from .net import Network, predict
from .numerals import roman_length_bound, to_roman

__all__ = [
    "OpKind",
    "VISUAL",
    "ONE_HOT",
    "Encoding",
    "Sample",
    "DatasetSpec",
    "Dataset",
    "operand_range",
    "apply_op",
    "sample_operands",
    "make_sample",
    "predict_vector",
    "predict_image",
    "generate_dataset",
    "write_dataset",
    "read_dataset",
]

VISUAL = "visual"
ONE_HOT = "one_hot"
MODES = (VISUAL, ONE_HOT)


class OpKind(enum.Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    ROMAN_ADD = "roman-add"

    @classmethod
    def parse(cls, text) -> "OpKind":
        if isinstance(text, cls):
            return text
        for op in cls:
            if text in (op.value, op.name):
                return op
        raise ValueError(f"unknown operation {text!r}")


def operand_range(op: OpKind, M: int) -> int:
    """Largest allowed operand; both operands are drawn from [0, bound]."""
    if M < 1:
        raise ValueError("digit count must be at least 1")
    if op in (OpKind.ADD, OpKind.ROMAN_ADD):
        return 5 * 10 ** (M - 1) - 1
    if op is OpKind.SUB:
        return 10**M - 1
    return math.isqrt(10**M - 1)


def _pool_size(op: OpKind, M: int) -> int:
    n = operand_range(op, M) + 1
    return n * (n + 1) // 2 if op is OpKind.SUB else n * n


def apply_op(op: OpKind, a, b):
    if op is OpKind.SUB:
        return a - b
    if op is OpKind.MUL:
        return a * b
    return a + b


def sample_operands(op: OpKind, M: int, rng: np.random.Generator) -> tuple[int, int]:
    hi = operand_range(op, M)
    while True:
        a, b = (int(v) for v in rng.integers(0, hi + 1, size=2))
        # rejection keeps the draw uniform over {a >= b}
        if op is not OpKind.SUB or a >= b:
            return a, b


@dataclass(frozen=True)
class Encoding:
    """How numbers of one experiment become network inputs and targets."""

    op: OpKind
    mode: str
    M: int
    font: Font = field(default_factory=builtin_font, repr=False, compare=False)
    left_margin: int = 2

    def __post_init__(self):
        object.__setattr__(self, "op", OpKind.parse(self.op))
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.M < 1:
            raise ValueError("digit count must be at least 1")

    @property
    def roman(self) -> bool:
        return self.op is OpKind.ROMAN_ADD

    @property
    def alphabet(self) -> str:
        return ROMAN_ALPHABET if self.roman else DECIMAL_ALPHABET

    @property
    def width(self) -> int:
        """Symbol positions per number."""
        return roman_length_bound(self.M) if self.roman else self.M

    @property
    def layout(self) -> Layout:
        return Layout(self.width, self.left_margin)

    @property
    def block(self) -> int:
        """1-hot classes per position (blank is a class for Roman numerals)."""
        return len(self.alphabet) + (1 if self.roman else 0)

    @property
    def shape(self) -> tuple[int, ...]:
        return self.layout.shape if self.mode == VISUAL else (self.width * self.block,)

    @property
    def dim(self) -> int:
        return int(np.prod(self.shape))

    def strings(self, values) -> list[str]:
        """Cell-by-cell symbols, left to right, padded to :attr:`width`."""
        if self.roman:
            return [to_roman(int(v)).rjust(self.width, BLANK) for v in values]
        limit = 10**self.M
        out = []
        for v in values:
            if not 0 <= v < limit:
                raise ValueError(f"{v} does not fit in {self.M} digits")
            out.append(f"{int(v):0{self.M}d}")
        return out

    def encode(self, values) -> np.ndarray:
        """(N, dim) float64 clean encodings."""
        strings = self.strings(values)
        if self.mode == VISUAL:
            codes = encode_strings(strings, self.alphabet, self.width)
            imgs = render_codes(codes, self.font.templates(self.alphabet), self.layout)
            return imgs.reshape(len(strings), self.dim)
        classes = (BLANK + self.alphabet) if self.roman else self.alphabet
        lookup = {c: k for k, c in enumerate(classes)}
        out = np.zeros((len(strings), self.width, self.block))
        for i, s in enumerate(strings):
            # 1-hot blocks run from the least significant (rightmost) position
            for m, ch in enumerate(reversed(s) if not self.roman else s):
                out[i, m, lookup[ch]] = 1.0
        return out.reshape(len(strings), self.dim)

    def decode(self, outputs) -> tuple[list[str], np.ndarray | None]:
        """Read symbols back from network outputs.

        Visual outputs go through the template decoder and also return its
        per-cell margins; 1-hot outputs take the argmax of every block.
        """
        outputs = np.asarray(outputs, dtype=np.float64).reshape(-1, self.dim)
        if self.mode == VISUAL:
            return decode_batch(outputs, self.font, self.layout, self.alphabet)
        classes = np.array(list((BLANK + self.alphabet) if self.roman else self.alphabet))
        best = outputs.reshape(len(outputs), self.width, self.block).argmax(axis=2)
        syms = classes[best]
        if not self.roman:
            syms = syms[:, ::-1]
        return ["".join(row) for row in syms], None


@dataclass(eq=False)
class Sample:
    input1: np.ndarray | Image
    input2: np.ndarray | Image
    target: np.ndarray | Image
    meta: tuple[int, int, int]
    clean_target: np.ndarray | Image | None = None


def make_sample(
    op: OpKind,
    a: int,
    b: int,
    mode: str,
    M: int,
    noise_sigma: float = 0.0,
    rng: np.random.Generator | None = None,
    font: Font | None = None,
    layout: Layout | None = None,
) -> Sample:
    """Assemble one example; noise, if any, is drawn for input1, input2, target in that order."""
    op = OpKind.parse(op)
    enc = Encoding(op, mode, M, font or builtin_font(), layout.left_margin if layout else 2)
    if layout is not None and layout.num_cells != enc.width:
        raise ValueError(f"layout has {layout.num_cells} cells, this experiment needs {enc.width}")
    hi = operand_range(op, M)
    if not (0 <= a <= hi and 0 <= b <= hi) or (op is OpKind.SUB and a < b):
        raise ValueError(f"operands ({a}, {b}) are not valid for {op.value} with M={M}")
    if noise_sigma < 0:
        raise ValueError("noise sigma must be non-negative")
    if noise_sigma > 0 and mode != VISUAL:
        raise ValueError("noise is only defined for visual samples")
    result = apply_op(op, a, b)
    clean = enc.encode([a, b, result])
    if mode == ONE_HOT:
        return Sample(clean[0], clean[1], clean[2], (a, b, result), clean[2])
    imgs = [Image(v.reshape(enc.shape)) for v in clean]
    if noise_sigma > 0:
        if rng is None:
            raise ValueError("a generator is required for noisy samples")
        noisy = [add_gaussian_noise(img, noise_sigma, rng) for img in imgs]
    else:
        noisy = imgs
    return Sample(noisy[0], noisy[1], noisy[2], (a, b, result), imgs[2])



def _flat(part) -> np.ndarray:
    return part.ravel() if isinstance(part, Image) else np.ravel(part).astype(np.float64)


def _sample_input(sample: Sample) -> np.ndarray:
    return np.concatenate([_flat(sample.input1), _flat(sample.input2)])


def predict_vector(net: Network, sample: Sample) -> np.ndarray:
    """Raw network output for one sample, shaped like its flattened target."""
    target = _flat(sample.target)
    out = predict(net, _sample_input(sample))
    if out.shape != target.shape:
        raise ValueError(f"network emits {out.size} values, the sample target has {target.size}")
    return out


def predict_image(net: Network, sample: Sample) -> Image:
    if not isinstance(sample.target, Image):
        raise ValueError("predict_image needs a visual sample")
    return Image(predict_vector(net, sample).reshape(sample.target.shape))


@dataclass
class DatasetSpec:
    op: OpKind = OpKind.ADD
    mode: str = VISUAL
    M: int = 7
    train_n: int = 150_000
    test_n: int = 30_000
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        self.op = OpKind.parse(self.op)
        if self.mode not in MODES:
            raise ValueError(f"mode must be one of {MODES}, got {self.mode!r}")
        if self.M < 1:
            raise ValueError("digit count must be at least 1")
        if self.train_n < 0 or self.test_n < 0:
            raise ValueError("sample counts must be non-negative")
        if self.noise_sigma < 0:
            raise ValueError("noise sigma must be non-negative")
        if self.noise_sigma > 0 and self.mode != VISUAL:
            raise ValueError("noise is only defined for visual samples")
        if self.train_n + self.test_n > _pool_size(self.op, self.M):
            raise ValueError(
                f"{self.train_n + self.test_n} distinct operand pairs requested, "
                f"only {_pool_size(self.op, self.M)} exist for {self.op.value} with M={self.M}"
            )


@dataclass(eq=False)
class Dataset:
    """Stacked samples: float32 rows for the three pictures/vectors, int64 meta."""

    op: OpKind
    mode: str
    M: int
    shape: tuple[int, ...]
    noise_sigma: float
    seed: int
    meta: np.ndarray  # (N, 3): a, b, result
    input1: np.ndarray
    input2: np.ndarray
    target: np.ndarray

    def __len__(self):
        return len(self.meta)

    @property
    def X(self) -> np.ndarray:
        return np.hstack([self.input1, self.input2])

    @property
    def Y(self) -> np.ndarray:
        return self.target

    def encoding(self, font: Font | None = None) -> Encoding:
        enc = Encoding(self.op, self.mode, self.M, font or builtin_font())
        if self.mode == VISUAL and enc.shape != tuple(self.shape):
            enc = Encoding(self.op, self.mode, self.M, enc.font, (self.shape[1] - enc.width * 8) // 2)
        return enc

    def pairs(self) -> set[tuple[int, int]]:
        return set(map(tuple, self.meta[:, :2].tolist()))

    def __eq__(self, other):
        if not isinstance(other, Dataset):
            return NotImplemented
        return (
            (self.op, self.mode, self.M, tuple(self.shape), self.noise_sigma, self.seed)
            == (other.op, other.mode, other.M, tuple(other.shape), other.noise_sigma, other.seed)
            and all(
                np.array_equal(getattr(self, k), getattr(other, k))
                for k in ("meta", "input1", "input2", "target")
            )
        )

    __hash__ = None


def _draw(spec: DatasetSpec, enc: Encoding, start: int, n: int, seen: set) -> Dataset:
    meta = np.zeros((n, 3), dtype=np.int64)
    rngs = []
    for k in range(n):
        rng = np.random.default_rng([spec.seed, start + k])
        while True:
            a, b = sample_operands(spec.op, spec.M, rng)
            if (a, b) not in seen:
                break
        seen.add((a, b))
        meta[k] = (a, b, apply_op(spec.op, a, b))
        rngs.append(rng)
    clean = [enc.encode(meta[:, j]) for j in range(3)]
    if spec.noise_sigma > 0:
        for k, rng in enumerate(rngs):
            for j in range(3):
                row = clean[j][k]
                row[:] = np.clip(row + rng.normal(0.0, spec.noise_sigma, size=row.shape), 0.0, 1.0)
    return Dataset(
        spec.op, spec.mode, spec.M, enc.shape, float(spec.noise_sigma), spec.seed, meta,
        *(c.astype(np.float32) for c in clean),
    )


def generate_dataset(spec: DatasetSpec, font: Font | None = None, left_margin: int = 2) -> tuple[Dataset, Dataset]:
    """Train and test sets whose (a, b) pairs never repeat or overlap.

    Test sample ``k`` uses generator index ``spec.train_n + k``.
    """
    enc = Encoding(spec.op, spec.mode, spec.M, font or builtin_font(), left_margin)
    seen: set = set()
    train = _draw(spec, enc, 0, spec.train_n, seen)
    test = _draw(spec, enc, spec.train_n, spec.test_n, seen)
    return train, test


# Dataset file: ASCII "key=value" header lines opened by the magic and
# closed by "end", then per sample: a, b, result as little-endian int64
# followed by input1, input2, target as little-endian float32.
_MAGIC = "VARITH1"


def write_dataset(ds: Dataset, path: str | os.PathLike) -> None:
    lines = [
        _MAGIC,
        f"op={ds.op.name}",
        f"mode={ds.mode}",
        f"M={ds.M}",
        f"count={len(ds)}",
    ]
    if ds.mode == VISUAL:
        lines += [f"rows={ds.shape[0]}", f"cols={ds.shape[1]}"]
    else:
        lines += [f"length={ds.shape[0]}"]
    lines += [f"sigma={ds.noise_sigma!r}", f"seed={ds.seed}", "end"]
    n = len(ds)
    record = np.empty(
        n,
        dtype=[("meta", "<i8", 3), ("input1", "<f4", ds.input1.shape[1]),
               ("input2", "<f4", ds.input2.shape[1]), ("target", "<f4", ds.target.shape[1])],
    )
    for key in ("meta", "input1", "input2", "target"):
        record[key] = getattr(ds, key)
    with open(path, "wb") as fh:
        fh.write(("\n".join(lines) + "\n").encode("ascii"))
        fh.write(record.tobytes())


def read_dataset(path: str | os.PathLike) -> Dataset:
    with open(path, "rb") as fh:
        data = fh.read()
    first, _, rest = data.partition(b"\n")
    if first != _MAGIC.encode():
        raise UnsupportedFormatError(f"{path}: unsupported dataset format {first[:16]!r}")
    fields = {}
    while True:
        line, sep, rest = rest.partition(b"\n")
        if not sep:
            raise UnsupportedFormatError(f"{path}: header is not terminated")
        if line == b"end":
            break
        key, eq, value = line.decode("ascii", "replace").partition("=")
        if not eq:
            raise UnsupportedFormatError(f"{path}: bad header line {line!r}")
        fields[key] = value
    try:
        op = OpKind[fields["op"]]
        mode = fields["mode"]
        M = int(fields["M"])
        count = int(fields["count"])
        shape = (int(fields["rows"]), int(fields["cols"])) if mode == VISUAL else (int(fields["length"]),)
        sigma = float(fields["sigma"])
        seed = int(fields["seed"])
    except (KeyError, ValueError) as exc:
        raise UnsupportedFormatError(f"{path}: incomplete or malformed header ({exc})") from exc
    if mode not in MODES:
        raise UnsupportedFormatError(f"{path}: unknown mode {mode!r}")
    dim = int(np.prod(shape))
    dtype = np.dtype([("meta", "<i8", 3), ("input1", "<f4", dim), ("input2", "<f4", dim), ("target", "<f4", dim)])
    if len(rest) != count * dtype.itemsize:
        raise TruncatedPayloadError(f"{path}: expected {count * dtype.itemsize} payload bytes, found {len(rest)}")
    record = np.frombuffer(rest, dtype=dtype)
    return Dataset(
        op, mode, M, shape, sigma, seed,
        record["meta"].astype(np.int64),
        *(record[k].astype(np.float32) for k in ("input1", "input2", "target")),
    )
