"""A hand-built visual adder: fixed weights, no training.

The network has three gate layers followed by a painter:

* detectors ``T_k[m, n]``: digit ``n`` sits at position ``m`` of picture ``k``
  (matched filter over the cell, thresholded);
* indicators ``v[m, i]``: the sum of both numbers restricted to their
  lowest ``m`` digits is at least ``i * 10**(m-1)``, for ``i`` in 0..19;
* output selectors ``o[m, n] = [v[m,n] - v[m,n+1] + v[m,n+10] - v[m,n+11] > 0]``
  with ``v[m, 20]`` fixed at 0;
* the painter draws the glyph of the selected digit in each output cell.

Each gate is a pair of ReLUs, ``(relu(x + delta) - relu(x)) / delta``, which
is 0 for ``x <= -delta`` and 1 for ``x >= 0``. Positions ``m`` count from 1 at
the least significant (rightmost) cell.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .font import DECIMAL_ALPHABET, Font, Layout, builtin_font, decode_batch, encode_strings, render_codes
from .net import RELU, SIGMOID, DenseLayer, Network, forward
from .numerals import digits_of

__all__ = [
    "GateParams",
    "ConstructivePlan",
    "threshold_gate",
    "threshold_gate_weights",
    "build_detector_layer",
    "build_indicator_layer",
    "build_output_layer",
    "build_painter",
    "build_full_adder",
    "gate_trace",
    "VerifyReport",
    "verify_constructive",
]


@dataclass(frozen=True)
class GateParams:
    delta: float = 0.01
    gain: float = 50.0
    normalize: bool = False

    def __post_init__(self):
        if not self.delta > 0:
            raise ValueError("gate delta must be positive")
        if not self.gain > 0:
            raise ValueError("painter gain must be positive")


@dataclass(frozen=True)
class ConstructivePlan:
    """Gate counts per layer; each gate occupies two ReLU units."""

    M: int
    layout: Layout

    @property
    def detectors(self) -> int:
        return 10 * self.M * 2

    @property
    def indicators(self) -> int:
        return 20 * self.M

    @property
    def selectors(self) -> int:
        return 10 * self.M

    @property
    def input_dim(self) -> int:
        return 2 * self.layout.size

    @property
    def output_dim(self) -> int:
        return self.layout.size

    @property
    def dims(self) -> list[int]:
        """Unit counts of the assembled network, input first."""
        return [self.input_dim, 2 * self.detectors, 2 * self.indicators, 2 * self.selectors, self.output_dim]


def threshold_gate_weights(delta: float) -> tuple[tuple[float, float], tuple[float, float]]:
    """``((shift_hi, shift_lo), (coef_hi, coef_lo))`` with gate = sum coef * relu(x + shift)."""
    if not delta > 0:
        raise ValueError("gate delta must be positive")
    return (delta, 0.0), (1.0 / delta, -1.0 / delta)


def threshold_gate(x, delta: float):
    (s_hi, s_lo), (c_hi, c_lo) = threshold_gate_weights(delta)
    x = np.asarray(x, dtype=np.float64)
    return c_hi * np.maximum(x + s_hi, 0.0) + c_lo * np.maximum(x + s_lo, 0.0)


def _cell_of(m: int, layout: Layout) -> slice:
    return layout.cell_slice(layout.num_cells - m + 1)


def build_detector_layer(font: Font, layout: Layout, M: int, alphabet: str = DECIMAL_ALPHABET):
    """Affine map from the two stacked pictures to the detector gate inputs.

    Gate ``((k * M) + (m - 1)) * 10 + n`` watches digit ``n`` at position ``m``
    of picture ``k`` (0 or 1). Its filter is +1 on the glyph's ink, -1 on the
    rest of the cell; the threshold sits halfway between the glyph's own
    response and the best response of any other glyph or a blank cell.
    Returns ``(A, c)`` with gate inputs ``A @ x + c``.
    """
    if layout.num_cells != M:
        raise ValueError(f"layout has {layout.num_cells} cells, expected {M}")
    size = layout.size
    A = np.zeros((20 * M, 2 * size))
    c = np.zeros(20 * M)
    bank = font.templates(alphabet)[1:]
    ink = bank.sum(axis=1)
    for n in range(10):
        others = np.delete(np.vstack([bank, np.zeros(bank.shape[1])]), n, axis=0)
        gap = np.abs(others - bank[n]).sum(axis=1).min()
        if gap < 2:
            raise ValueError(f"glyph {alphabet[n]!r} is too close to another template to detect")
        filt = (2.0 * bank[n] - 1.0).reshape(layout.cell_height, layout.cell_width)
        for k in range(2):
            for m in range(1, M + 1):
                row = (k * M + m - 1) * 10 + n
                w = np.zeros(layout.shape)
                w[:, _cell_of(m, layout)] = filt
                A[row, k * size:(k + 1) * size] = w.ravel()
                c[row] = -(ink[n] - gap / 2.0)
    return A, c


def _scale(m: int, normalize: bool) -> float:
    return 10.0 ** (m - 1) if normalize else 1.0


def build_indicator_layer(M: int, normalize: bool = False):
    """Affine map from detector gates to indicator gate inputs.

    ``v[m, i]`` (gate ``(m - 1) * 20 + i``) receives
    ``sum_{j<=m} sum_n n * 10**(j-1) * (T1[j,n] + T2[j,n]) - i * 10**(m-1) + 1/2``;
    the half keeps integer sums away from the gate's transition band. With
    ``normalize`` each position's row is divided by ``10**(m-1)``.
    """
    A = np.zeros((20 * M, 20 * M))
    c = np.zeros(20 * M)
    for m in range(1, M + 1):
        s = _scale(m, normalize)
        for i in range(20):
            row = (m - 1) * 20 + i
            for k in range(2):
                for j in range(1, m + 1):
                    for n in range(10):
                        A[row, (k * M + j - 1) * 10 + n] = n * 10.0 ** (j - 1) / s
            c[row] = (0.5 - i * 10.0 ** (m - 1)) / s
    return A, c


def build_output_layer(M: int):
    """Affine map from indicator gates to selector gate inputs ``o[m, n]`` (gate ``(m-1)*10 + n``)."""
    A = np.zeros((10 * M, 20 * M))
    c = np.full(10 * M, -0.5)
    for m in range(1, M + 1):
        base = (m - 1) * 20
        for n in range(10):
            row = (m - 1) * 10 + n
            A[row, base + n] += 1.0
            A[row, base + n + 10] += 1.0
            A[row, base + n + 1] -= 1.0
            if n + 11 < 20:  # v[m, 20] is identically 0
                A[row, base + n + 11] -= 1.0
    return A, c


def build_painter(font: Font, layout: Layout, M: int, gain: float = 50.0, alphabet: str = DECIMAL_ALPHABET):
    """Affine map from selector gates to output logits.

    A cell pixel gets ``gain * (2 * glyph(p) - 1)`` from the selected digit;
    pixels outside every cell get a constant ``-gain``.
    """
    if layout.num_cells != M:
        raise ValueError(f"layout has {layout.num_cells} cells, expected {M}")
    P = np.zeros((layout.size, 10 * M))
    q = np.full(layout.shape, -float(gain))
    bank = font.templates(alphabet)[1:]
    for m in range(1, M + 1):
        cell = _cell_of(m, layout)
        q[:, cell] = 0.0
        for n in range(10):
            w = np.zeros(layout.shape)
            w[:, cell] = gain * (2.0 * bank[n] - 1.0).reshape(layout.cell_height, layout.cell_width)
            P[:, (m - 1) * 10 + n] = w.ravel()
    return P, q.ravel()


def _gate_layer(A, c, deltas, prev_deltas=None) -> DenseLayer:
    """ReLU pair layer realising gates ``gate(A @ g + c)`` of the previous gates ``g``.

    Units ``[:n]`` carry ``x + delta``, units ``[n:]`` carry ``x``.
    """
    W, b = _fold(A, c, prev_deltas)
    return DenseLayer(np.vstack([W, W]), np.concatenate([b + deltas, b]), RELU)


def _fold(A, c, prev_deltas):
    # previous gates are (h[:k] - h[k:]) / delta, so fold that difference in
    if prev_deltas is None:
        return A, c
    scaled = A / prev_deltas
    return np.hstack([scaled, -scaled]), c


def build_full_adder(
    font: Font | None = None,
    layout: Layout | None = None,
    M: int = 3,
    params: GateParams = GateParams(),
) -> Network:
    font = font or builtin_font()
    layout = layout or Layout(M)
    d = params.delta
    A1, c1 = build_detector_layer(font, layout, M)
    A2, c2 = build_indicator_layer(M, params.normalize)
    A3, c3 = build_output_layer(M)
    P, q = build_painter(font, layout, M, params.gain)
    d1 = np.full(len(c1), d)
    d2 = np.array([d / _scale(m, params.normalize) for m in range(1, M + 1) for _ in range(20)])
    d3 = np.full(len(c3), d)
    W4, b4 = _fold(P, q, d3)
    return Network([
        _gate_layer(A1, c1, d1),
        _gate_layer(A2, c2, d2, d1),
        _gate_layer(A3, c3, d3, d2),
        DenseLayer(W4, b4, SIGMOID),
    ])


def gate_trace(net: Network, X: np.ndarray):
    """Gate inputs and gate outputs of every ReLU-pair layer of a constructed net.

    Returns the network output and a list of ``(x, g, delta)`` per gate layer;
    ``delta`` per gate is read back from the biases.
    """
    out, cache = forward(net, X)
    trace = []
    for layer, (_, z, h) in zip(net.layers, cache):
        if layer.activation != RELU:
            continue
        k = layer.out_dim // 2
        deltas = layer.bias[:k] - layer.bias[k:]
        x = z[..., k:]
        g = (h[..., :k] - h[..., k:]) / deltas
        trace.append((x, g, deltas))
    return out, trace


def _band_distance(x, deltas):
    """Distance of each gate input from the band (-delta, 0); negative inside it."""
    above = x
    below = -deltas - x
    inside = -np.minimum(-x, x + deltas)
    return np.where(x >= 0, above, np.where(x <= -deltas, below, inside))


@dataclass
class VerifyReport:
    M: int
    pairs: int
    errors: int
    min_margin: float
    min_margin_units: float  # min margin divided by each gate's delta, times the nominal delta
    onehot_max_dev: float
    indicator_monotone: bool
    carry_errors: int

    def to_text(self) -> str:
        return (
            f"digits: {self.M}\n"
            f"pairs: {self.pairs}\n"
            f"errors: {self.errors}\n"
            f"min_margin: {self.min_margin!r}\n"
            f"min_margin_scaled: {self.min_margin_units!r}\n"
            f"onehot_max_dev: {self.onehot_max_dev!r}\n"
            f"indicator_monotone: {self.indicator_monotone}\n"
            f"carry_errors: {self.carry_errors}\n"
        )


def verify_constructive(
    M: int = 3,
    params: GateParams = GateParams(),
    font: Font | None = None,
    layout: Layout | None = None,
    net: Network | None = None,
    chunk: int = 8192,
) -> VerifyReport:
    """Brute-force every pair ``a, b`` in ``[0, 5*10**(M-1) - 1]`` through the adder.

    The decoded output picture is compared with ``a + b`` from integer
    arithmetic. Failures are counted, never raised.
    """
    font = font or builtin_font()
    layout = layout or Layout(M)
    if net is None:
        net = build_full_adder(font, layout, M, params)
    hi = 5 * 10 ** (M - 1) - 1
    values = np.arange(hi + 1)
    bank = font.templates(DECIMAL_ALPHABET)
    pictures = render_codes(
        encode_strings([f"{v:0{M}d}" for v in values], DECIMAL_ALPHABET, M), bank, layout
    ).reshape(len(values), -1)
    a_all, b_all = np.divmod(np.arange(len(values) ** 2), len(values))
    errors = carry_errors = 0
    min_margin = min_scaled = np.inf
    onehot_dev = 0.0
    monotone = True
    place = 10 ** np.arange(M)
    for start in range(0, len(a_all), chunk):
        a = a_all[start:start + chunk]
        b = b_all[start:start + chunk]
        X = np.hstack([pictures[a], pictures[b]])
        out, trace = gate_trace(net, X)
        total = a + b
        truth = [f"{t:0{M}d}" for t in total]
        decoded, _ = decode_batch(out, font, layout)
        errors += sum(p != t for p, t in zip(decoded, truth))
        for x, _, deltas in trace:
            dist = _band_distance(x, deltas)
            min_margin = min(min_margin, float(dist.min()))
            min_scaled = min(min_scaled, float((dist / deltas).min()) * params.delta)
        v = trace[1][1].reshape(len(a), M, 20)
        monotone &= bool(np.all(np.diff(v, axis=2) <= 1e-6))
        o = trace[2][1].reshape(len(a), M, 10)
        onehot_dev = max(onehot_dev, float(np.abs(o.sum(axis=2) - 1.0).max()))
        expected = (total[:, None] // place[None, :]) % 10
        carry_errors += int(np.any(o.argmax(axis=2) != expected, axis=1).sum())
    return VerifyReport(M, len(a_all), errors, min_margin, min_scaled, onehot_dev, monotone, carry_errors)
