"""A small fully connected network written directly in numpy.

Hidden layers use ReLU, the output layer a sigmoid, and training minimises
the L2 loss ``0.5 * sum((pred - target)**2)`` per sample with mini-batch SGD
and classical momentum. Everything is float64 and, given a seed, bitwise
reproducible on a single thread.
"""
from __future__ import annotations

import os
import time
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .exceptions import TruncatedPayloadError, UnsupportedFormatError

__all__ = [
    "RELU",
    "SIGMOID",
    "IDENTITY",
    "DenseLayer",
    "Network",
    "TrainConfig",
    "TrainHistory",
    "build_network",
    "forward",
    "l2_loss",
    "backward",
    "sgd_momentum_step",
    "train",
    "predict",
    "numerical_gradients",
    "gradient_check",
    "save_net",
    "load_net",
]

RELU = "relu"
SIGMOID = "sigmoid"
IDENTITY = "identity"
ACTIVATIONS = (RELU, SIGMOID, IDENTITY)
INIT_SCHEMES = ("he_uniform", "glorot_uniform", "zeros")


@dataclass(eq=False)
class DenseLayer:
    weights: np.ndarray  # (out, in)
    bias: np.ndarray  # (out,)
    activation: str = RELU

    def __post_init__(self):
        self.weights = np.asarray(self.weights, dtype=np.float64)
        self.bias = np.asarray(self.bias, dtype=np.float64)
        if self.weights.ndim != 2:
            raise ValueError(f"weights must be 2-D, got shape {self.weights.shape}")
        if self.bias.shape != (self.weights.shape[0],):
            raise ValueError(f"bias shape {self.bias.shape} does not match {self.weights.shape[0]} outputs")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")

    @property
    def in_dim(self) -> int:
        return self.weights.shape[1]

    @property
    def out_dim(self) -> int:
        return self.weights.shape[0]

    @property
    def n_params(self) -> int:
        return self.weights.size + self.bias.size


@dataclass(eq=False)
class Network:
    layers: list[DenseLayer]

    def __post_init__(self):
        if not self.layers:
            raise ValueError("a network needs at least one layer")
        for i, (a, b) in enumerate(zip(self.layers, self.layers[1:])):
            if a.out_dim != b.in_dim:
                raise ValueError(f"layer {i} emits {a.out_dim} values, layer {i + 1} expects {b.in_dim}")

    @property
    def input_dim(self) -> int:
        return self.layers[0].in_dim

    @property
    def output_dim(self) -> int:
        return self.layers[-1].out_dim

    @property
    def dims(self) -> list[int]:
        return [self.input_dim] + [layer.out_dim for layer in self.layers]

    @property
    def n_params(self) -> int:
        return sum(layer.n_params for layer in self.layers)

    def params(self) -> list[np.ndarray]:
        """Parameter arrays in (weights, bias) order per layer; views, not copies."""
        out = []
        for layer in self.layers:
            out += [layer.weights, layer.bias]
        return out

    def copy(self) -> "Network":
        return Network([DenseLayer(l.weights.copy(), l.bias.copy(), l.activation) for l in self.layers])

    def __eq__(self, other):
        if not isinstance(other, Network):
            return NotImplemented
        return len(self.layers) == len(other.layers) and all(
            a.activation == b.activation
            and np.array_equal(a.weights, b.weights)
            and np.array_equal(a.bias, b.bias)
            for a, b in zip(self.layers, other.layers)
        )

    __hash__ = None


@dataclass
class TrainConfig:
    learning_rate: float = 0.1
    momentum: float = 0.9
    batch_size: int = 256
    epochs: int = 50
    seed: int = 0
    init_scheme: str = "he_uniform"

    def __post_init__(self):
        if not self.learning_rate > 0:
            raise ValueError("learning_rate must be positive")
        if not 0 <= self.momentum < 1:
            raise ValueError("momentum must lie in [0, 1)")
        if self.batch_size < 1:
            raise ValueError("batch_size must be at least 1")
        if self.epochs < 0:
            raise ValueError("epochs must be non-negative")
        if self.init_scheme not in INIT_SCHEMES:
            raise ValueError(f"unknown init scheme {self.init_scheme!r}")


@dataclass
class TrainHistory:
    loss: list[float] = field(default_factory=list)
    wall_time: list[float] = field(default_factory=list)


def build_network(
    input_dim: int,
    hidden_sizes: Sequence[int],
    output_dim: int,
    rng: np.random.Generator,
    init_scheme: str = "he_uniform",
) -> Network:
    """ReLU hidden layers and a sigmoid output, zero biases.

    Weights are drawn from U(-s, s) with ``s = sqrt(6 / fan_in)`` for
    ``he_uniform`` and ``s = sqrt(6 / (fan_in + fan_out))`` for
    ``glorot_uniform``.
    """
    dims = [input_dim, *hidden_sizes, output_dim]
    if any(d < 1 for d in dims):
        raise ValueError(f"all layer sizes must be positive, got {dims}")
    if init_scheme not in INIT_SCHEMES:
        raise ValueError(f"unknown init scheme {init_scheme!r}")
    layers = []
    for i, (fan_in, fan_out) in enumerate(zip(dims, dims[1:])):
        if init_scheme == "zeros":
            w = np.zeros((fan_out, fan_in))
        else:
            span = fan_in if init_scheme == "he_uniform" else fan_in + fan_out
            s = np.sqrt(6.0 / span)
            w = rng.uniform(-s, s, size=(fan_out, fan_in))
        act = SIGMOID if i == len(dims) - 2 else RELU
        layers.append(DenseLayer(w, np.zeros(fan_out), act))
    return Network(layers)


def _activate(z: np.ndarray, activation: str) -> np.ndarray:
    if activation == RELU:
        return np.maximum(z, 0.0)
    if activation == SIGMOID:
        # split by sign so exp never overflows
        out = np.empty_like(z)
        pos = z >= 0
        out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
        ez = np.exp(z[~pos])
        out[~pos] = ez / (1.0 + ez)
        return out
    return z


def forward(net: Network, x: np.ndarray) -> tuple[np.ndarray, list[tuple[np.ndarray, np.ndarray, np.ndarray]]]:
    """Run ``x`` (one vector or a batch of rows) through the network.

    The cache holds ``(input, pre_activation, output)`` for every layer.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1] != net.input_dim or x.ndim not in (1, 2):
        raise ValueError(f"expected input of width {net.input_dim}, got shape {x.shape}")
    cache = []
    a = x
    for layer in net.layers:
        z = a @ layer.weights.T + layer.bias
        out = _activate(z, layer.activation)
        cache.append((a, z, out))
        a = out
    return a, cache


def predict(net: Network, x: np.ndarray) -> np.ndarray:
    return forward(net, x)[0]


def l2_loss(pred: np.ndarray, target: np.ndarray) -> float:
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise ValueError(f"shape mismatch {pred.shape} vs {target.shape}")
    return 0.5 * float(np.sum((pred - target) ** 2))


def backward(net: Network, cache, target: np.ndarray) -> list[tuple[np.ndarray, np.ndarray]]:
    """Gradients of the L2 loss for every layer as ``(dW, db)`` pairs.

    For a batch the loss is the per-sample loss averaged over rows. The ReLU
    derivative at exactly zero is taken as 0.
    """
    out = cache[-1][2]
    target = np.asarray(target, dtype=np.float64)
    if target.shape != out.shape:
        raise ValueError(f"target shape {target.shape} does not match output {out.shape}")
    batched = out.ndim == 2
    scale = 1.0 / out.shape[0] if batched else 1.0
    grad_a = (out - target) * scale
    grads = [None] * len(net.layers)
    for i in range(len(net.layers) - 1, -1, -1):
        layer = net.layers[i]
        a_in, z, a_out = cache[i]
        if layer.activation == SIGMOID:
            delta = grad_a * a_out * (1.0 - a_out)
        elif layer.activation == RELU:
            delta = grad_a * (z > 0)
        else:
            delta = grad_a
        if batched:
            dw = delta.T @ a_in
            db = delta.sum(axis=0)
        else:
            dw = np.outer(delta, a_in)
            db = delta.copy()
        grads[i] = (dw, db)
        if i:
            grad_a = delta @ layer.weights
    return grads


def sgd_momentum_step(params, grads, velocity, lr: float, momentum: float):
    """Classical momentum, in place: ``v = momentum*v - lr*g; p += v``."""
    for p, g, v in zip(params, grads, velocity):
        v *= momentum
        v -= lr * g
        p += v
    return params, velocity


def _flat_grads(grads) -> list[np.ndarray]:
    return [g for pair in grads for g in pair]


def train(
    net: Network,
    X: np.ndarray,
    Y: np.ndarray,
    config: TrainConfig,
    *,
    callback=None,
) -> tuple[Network, TrainHistory]:
    """Mini-batch SGD with momentum; updates ``net`` in place and returns it.

    Each epoch visits a seeded permutation of the rows; the last, shorter
    batch is kept. ``history.loss`` is the squared error seen during the
    epoch, averaged over samples and output units.
    """
    n = len(X)
    if n == 0:
        raise ValueError("cannot train on an empty dataset")
    if X.shape[1] != net.input_dim or Y.shape[1] != net.output_dim or len(Y) != n:
        raise ValueError(
            f"data shapes {X.shape}/{Y.shape} do not fit a {net.input_dim}->{net.output_dim} network"
        )
    rng = np.random.default_rng(config.seed)
    params = net.params()
    velocity = [np.zeros_like(p) for p in params]
    history = TrainHistory()
    for epoch in range(config.epochs):
        t0 = time.perf_counter()
        order = rng.permutation(n)
        total = 0.0
        for start in range(0, n, config.batch_size):
            idx = order[start:start + config.batch_size]
            xb = X[idx].astype(np.float64, copy=False)
            yb = Y[idx].astype(np.float64, copy=False)
            pred, cache = forward(net, xb)
            total += l2_loss(pred, yb)
            grads = backward(net, cache, yb)
            sgd_momentum_step(params, _flat_grads(grads), velocity, config.learning_rate, config.momentum)
        history.loss.append(2.0 * total / (n * net.output_dim))
        history.wall_time.append(time.perf_counter() - t0)
        if callback is not None:
            callback(epoch, history)
    return net, history


def numerical_gradients(net: Network, x: np.ndarray, target: np.ndarray, eps: float = 1e-5):
    """Central finite differences of the L2 loss, for checking :func:`backward`.

    Uses only :func:`forward` and :func:`l2_loss`. For a batch the loss is
    averaged over rows, matching :func:`backward`.
    """
    x = np.asarray(x, dtype=np.float64)
    rows = x.shape[0] if x.ndim == 2 else 1

    def loss():
        return l2_loss(forward(net, x)[0], target) / rows

    out = []
    for layer in net.layers:
        pair = []
        for p in (layer.weights, layer.bias):
            g = np.zeros_like(p)
            for idx in np.ndindex(p.shape):
                orig = p[idx]
                p[idx] = orig + eps
                up = loss()
                p[idx] = orig - eps
                down = loss()
                p[idx] = orig
                g[idx] = (up - down) / (2 * eps)
            pair.append(g)
        out.append(tuple(pair))
    return out


def gradient_check(net: Network, x: np.ndarray, target: np.ndarray, eps: float = 1e-5, floor: float = 1e-8) -> float:
    """Max relative error between backprop and finite differences."""
    _, cache = forward(net, x)
    analytic = _flat_grads(backward(net, cache, target))
    numeric = _flat_grads(numerical_gradients(net, x, target, eps))
    worst = 0.0
    for a, n in zip(analytic, numeric):
        denom = np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)
        worst = max(worst, float(np.max(np.abs(a - n) / denom)))
    return worst


# Model file: "VNET1\n", "dims d0 d1 ... dk\n", "activations a1 ... ak\n",
# then for each layer its weights (row-major) and bias as little-endian float64.
_MAGIC = "VNET1"


def save_net(net: Network, path: str | os.PathLike) -> None:
    header = (
        f"{_MAGIC}\n"
        f"dims {' '.join(map(str, net.dims))}\n"
        f"activations {' '.join(l.activation for l in net.layers)}\n"
    )
    with open(path, "wb") as fh:
        fh.write(header.encode("ascii"))
        for layer in net.layers:
            fh.write(layer.weights.astype("<f8").tobytes())
            fh.write(layer.bias.astype("<f8").tobytes())


def load_net(path: str | os.PathLike) -> Network:
    with open(path, "rb") as fh:
        data = fh.read()
    lines = data.split(b"\n", 3)
    if len(lines) < 4 or lines[0] != _MAGIC.encode():
        raise UnsupportedFormatError(f"{path}: not a {_MAGIC} model file")
    try:
        key, *dims = lines[1].decode("ascii").split()
        akey, *acts = lines[2].decode("ascii").split()
        dims = [int(d) for d in dims]
    except (UnicodeDecodeError, ValueError) as exc:
        raise UnsupportedFormatError(f"{path}: malformed header") from exc
    if key != "dims" or akey != "activations" or len(dims) < 2 or len(acts) != len(dims) - 1:
        raise UnsupportedFormatError(f"{path}: malformed header")
    if any(d < 1 for d in dims) or any(a not in ACTIVATIONS for a in acts):
        raise UnsupportedFormatError(f"{path}: bad layer dims or activation tags")
    payload = lines[3]
    expected = 8 * sum(o * i + o for i, o in zip(dims, dims[1:]))
    if len(payload) != expected:
        raise TruncatedPayloadError(f"{path}: expected {expected} payload bytes, found {len(payload)}")
    values = np.frombuffer(payload, dtype="<f8").astype(np.float64)
    layers = []
    pos = 0
    for fan_in, fan_out, act in zip(dims, dims[1:], acts):
        w = values[pos:pos + fan_in * fan_out].reshape(fan_out, fan_in)
        pos += w.size
        b = values[pos:pos + fan_out]
        pos += fan_out
        layers.append(DenseLayer(w.copy(), b.copy(), act))
    return Network(layers)
