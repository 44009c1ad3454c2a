"""Experiment orchestration: configs, evaluation, the benchmark table and picture dumps."""
from __future__ import annotations

import dataclasses
import logging
import os
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from .datagen import ONE_HOT, VISUAL, Dataset, DatasetSpec, OpKind, generate_dataset
from .estimators import MLPImageRegressor
from .font import Font, builtin_font, digit_error_rate
from .imaging import Image, write_pgm
from .net import Network, TrainHistory, predict

log = logging.getLogger(__name__)

__all__ = [
    "ExperimentConfig",
    "MetricsReport",
    "ExperimentResult",
    "evaluate",
    "run_experiment",
    "PROFILES",
    "TABLE1_REFERENCE",
    "run_table1",
    "format_table1",
    "render_examples",
    "render_weights",
]

# A decoded cell whose best and second-best template SSDs are closer than
# this is counted as ambiguous (typically a blend of two digits).
AMBIGUOUS_MARGIN = 2.0
_MODE_NAMES = {"visual": VISUAL, "onehot": ONE_HOT, "one_hot": ONE_HOT}


def _parse_hidden(text) -> tuple[int, ...]:
    if isinstance(text, str):
        text = text.strip()
        return tuple(int(h) for h in text.split(",")) if text else ()
    return tuple(int(h) for h in text)


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one training run.

    Keys match the command-line flags (with ``-`` written as ``_``).
    """

    op: str = "add"
    mode: str = VISUAL
    digits: int = 3
    train_n: int = 50_000
    test_n: int = 5_000
    noise_sigma: float = 0.0
    seed: int = 1
    hidden: tuple[int, ...] = (256, 256, 256)
    lr: float = 0.1
    momentum: float = 0.9
    batch: int = 256
    epochs: int = 30
    init: str = "he_uniform"
    table1_row: str = ""

    def __post_init__(self):
        self.op = OpKind.parse(self.op).value
        try:
            self.mode = _MODE_NAMES[self.mode]
        except KeyError:
            raise ValueError(f"mode must be visual or onehot, got {self.mode!r}") from None
        self.hidden = _parse_hidden(self.hidden)
        for name in ("digits", "train_n", "test_n", "seed", "batch", "epochs"):
            setattr(self, name, int(getattr(self, name)))
        for name in ("noise_sigma", "lr", "momentum"):
            setattr(self, name, float(getattr(self, name)))

    def dataset_spec(self) -> DatasetSpec:
        return DatasetSpec(self.op, self.mode, self.digits, self.train_n, self.test_n, self.noise_sigma, self.seed)

    def estimator(self, verbose: bool = False) -> MLPImageRegressor:
        return MLPImageRegressor(
            hidden_layer_sizes=self.hidden,
            learning_rate=self.lr,
            momentum=self.momentum,
            batch_size=self.batch,
            epochs=self.epochs,
            random_state=self.seed,
            init_scheme=self.init,
            verbose=verbose,
        )

    def to_kv(self) -> str:
        lines = []
        for f in dataclasses.fields(self):
            value = getattr(self, f.name)
            if f.name == "hidden":
                value = ",".join(map(str, value))
            elif isinstance(value, float):
                value = repr(value)
            lines.append(f"{f.name}={value}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_kv(cls, text: str, **overrides) -> "ExperimentConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        values = {}
        for lineno, line in enumerate(text.splitlines(), 1):
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, eq, value = line.partition("=")
            key = key.strip().replace("-", "_")
            if not eq or key not in known:
                raise ValueError(f"config line {lineno}: unknown or malformed entry {line!r}")
            values[key] = value.strip()
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls(**values)


@dataclass
class MetricsReport:
    op: str
    mode: str
    digits: int
    samples: int
    digit_error: float
    position_error: list[float]
    mse_clean: float
    mse_noisy_target: float | None = None
    ambiguous_cells: float | None = None
    wall_time: float | None = None
    config: dict = field(default_factory=dict)

    def to_text(self, timing: bool = False) -> str:
        """``key: value`` lines. Wall time is left out unless ``timing`` so reruns compare equal."""
        lines = [
            f"op: {self.op}",
            f"mode: {self.mode}",
            f"digits: {self.digits}",
            f"samples: {self.samples}",
            f"digit_error: {self.digit_error!r}",
            f"position_error: {','.join(repr(float(p)) for p in self.position_error)}",
            f"mse_clean: {self.mse_clean!r}",
            f"mse_noisy_target: {'none' if self.mse_noisy_target is None else repr(self.mse_noisy_target)}",
            f"ambiguous_cells: {'none' if self.ambiguous_cells is None else repr(self.ambiguous_cells)}",
        ]
        if timing and self.wall_time is not None:
            lines.append(f"wall_time: {self.wall_time!r}")
        lines += [f"config.{k}: {v}" for k, v in self.config.items()]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "MetricsReport":
        raw = {}
        config = {}
        for line in text.splitlines():
            if not line.strip():
                continue
            key, sep, value = line.partition(": ")
            if not sep:
                key, value = line.rstrip(":"), ""
            if key.startswith("config."):
                config[key[len("config."):]] = value
            else:
                raw[key] = value

        def opt(v):
            return None if v in (None, "none") else float(v)

        pos = raw.get("position_error", "")
        return cls(
            op=raw["op"],
            mode=raw["mode"],
            digits=int(raw["digits"]),
            samples=int(raw["samples"]),
            digit_error=float(raw["digit_error"]),
            position_error=[float(p) for p in pos.split(",")] if pos else [],
            mse_clean=float(raw["mse_clean"]),
            mse_noisy_target=opt(raw.get("mse_noisy_target")),
            ambiguous_cells=opt(raw.get("ambiguous_cells")),
            wall_time=opt(raw.get("wall_time")),
            config=config,
        )


def _predict_chunked(net: Network, X: np.ndarray, chunk: int = 4096) -> np.ndarray:
    return np.vstack([predict(net, X[i:i + chunk].astype(np.float64)) for i in range(0, len(X), chunk)])


def evaluate(net: Network, test: Dataset, font: Font | None = None, config: dict | None = None) -> MetricsReport:
    """Score ``net`` on ``test`` against the exact arithmetic results in its meta.

    The (possibly noisy) stored targets are never decoded; clean targets are
    re-encoded from the true results.
    """
    t0 = time.perf_counter()
    enc = test.encoding(font)
    if net.input_dim != 2 * enc.dim or net.output_dim != enc.dim:
        raise ValueError(
            f"network {net.input_dim}->{net.output_dim} does not fit data {2 * enc.dim}->{enc.dim}"
        )
    pred = _predict_chunked(net, test.X)
    strings, margins = enc.decode(pred)
    truth = enc.strings(test.meta[:, 2])
    clean = enc.encode(test.meta[:, 2])
    wrong = np.array([[p != t for p, t in zip(ps, ts)] for ps, ts in zip(strings, truth)])
    noisy_mse = None
    if test.noise_sigma > 0:
        noisy_mse = float(np.mean((test.target.astype(np.float64) - clean) ** 2))
    return MetricsReport(
        op=test.op.value,
        mode=test.mode,
        digits=test.M,
        samples=len(test),
        digit_error=digit_error_rate(strings, truth),
        position_error=[float(v) for v in wrong.mean(axis=0)] if len(test) else [],
        mse_clean=float(np.mean((pred - clean) ** 2)),
        mse_noisy_target=noisy_mse,
        ambiguous_cells=None if margins is None else float(np.mean(margins < AMBIGUOUS_MARGIN)),
        wall_time=time.perf_counter() - t0,
        config=dict(config or {}),
    )


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    network: Network
    history: TrainHistory
    report: MetricsReport
    train: Dataset
    test: Dataset


def run_experiment(config: ExperimentConfig, font: Font | None = None, verbose: bool = False) -> ExperimentResult:
    """Generate data, train and evaluate one configuration."""
    t0 = time.perf_counter()
    train, test = generate_dataset(config.dataset_spec(), font)
    model = config.estimator(verbose=verbose).fit(train.X, train.Y)
    echo = dict(line.split("=", 1) for line in config.to_kv().splitlines())
    report = evaluate(model.network_, test, font, config=echo)
    report.wall_time = time.perf_counter() - t0
    log.info("%s/%s M=%d: digit error %.4f", config.op, config.mode, config.digits, report.digit_error)
    return ExperimentResult(config, model.network_, model.history_, report, train, test)


# Reference digit error rates (percent) reported for the original 7-digit runs.
TABLE1_REFERENCE = {
    "add": {"visual": (3, 1.9), "one_hot": (1, 1.7)},
    "sub": {"visual": (3, 3.2), "one_hot": (1, 2.1)},
    "mul": {"visual": (5, 71.5), "one_hot": (3, 37.6)},
    "roman-add": {"visual": (5, 74.3), "one_hot": (3, 0.7)},
}
_ROW_LABELS = {"add": "Add", "sub": "Subtract", "mul": "Multiply", "roman-add": "Roman"}


def _profile(kind: str) -> list[ExperimentConfig]:
    if kind == "paper":
        visual = dict(digits=7, train_n=150_000, test_n=30_000, epochs=50)
        visual_cells = {"add": visual, "sub": visual, "mul": visual, "roman-add": visual}
    elif kind == "desk":
        base = dict(digits=3, train_n=50_000, test_n=5_000, epochs=30)
        visual_cells = {
            "add": base,
            "sub": base,
            # operands up to 316: enough distinct pairs for 55k samples
            "mul": dict(base, digits=5),
            # operands up to 4999, numerals up to 20 symbols
            "roman-add": dict(base, digits=4),
        }
    else:
        raise ValueError(f"unknown profile {kind!r} (expected desk or paper)")
    onehot = dict(train_n=150_000, test_n=30_000, epochs=50)
    onehot_digits = {"add": 7, "sub": 7, "mul": 7, "roman-add": 4 if kind == "desk" else 7}
    configs = []
    for op, ref in TABLE1_REFERENCE.items():
        layers_v, _ = ref["visual"]
        layers_h, _ = ref["one_hot"]
        configs.append(ExperimentConfig(
            op=op, mode=VISUAL, hidden=(256,) * layers_v, table1_row=f"{op}/pictures", **visual_cells[op]))
        configs.append(ExperimentConfig(
            op=op, mode=ONE_HOT, digits=onehot_digits[op], hidden=(256,) * layers_h,
            table1_row=f"{op}/1-hot", **onehot))
    return configs


PROFILES = {"desk": _profile("desk"), "paper": _profile("paper")}


def format_table1(results: dict[tuple[str, str], float | None]) -> str:
    """Render measured error rates (fractions, keyed by ``(op, mode)``) beside the reference."""
    header = (
        f"{'Operation':<10} | {'Pictures':^27} | {'1-hot vectors':^27}\n"
        f"{'':<10} | {'layers':>6} {'measured':>9} {'reference':>9} | {'layers':>6} {'measured':>9} {'reference':>9}\n"
    )
    rule = "-" * len(header.splitlines()[0]) + "\n"
    body = []
    for op, ref in TABLE1_REFERENCE.items():
        cells = []
        for mode in (VISUAL, ONE_HOT):
            layers, reference = ref[mode]
            measured = results.get((op, mode))
            shown = "-" if measured is None else f"{100 * measured:.1f}%"
            cells.append(f"{layers:>6} {shown:>9} {f'{reference}%':>9}")
        body.append(f"{_ROW_LABELS[op]:<10} | {cells[0]} | {cells[1]}\n")
    return header + rule + "".join(body)


def run_table1(
    profile: str | Sequence[ExperimentConfig] = "desk",
    runner: Callable[[ExperimentConfig], MetricsReport] | None = None,
) -> str:
    """Run every cell of the benchmark table for a profile and return it formatted."""
    configs = PROFILES[profile] if isinstance(profile, str) and profile in PROFILES else profile
    if isinstance(configs, str):
        raise ValueError(f"unknown profile {profile!r} (expected one of {sorted(PROFILES)})")
    runner = runner or (lambda cfg: run_experiment(cfg).report)
    results = {}
    for cfg in configs:
        results[(cfg.op, cfg.mode)] = runner(cfg).digit_error
    return format_table1(results)


def render_examples(
    net: Network,
    dataset: Dataset,
    out_dir: str | os.PathLike,
    indices: Sequence[int] | None = None,
    font: Font | None = None,
) -> list[Path]:
    """Write input1 / input2 / prediction / truth pictures for selected samples.

    Noisy datasets additionally get the noisy training-style target.
    """
    if dataset.mode != VISUAL:
        raise ValueError("only visual datasets can be rendered as pictures")
    enc = dataset.encoding(font or builtin_font())
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    indices = list(range(min(3, len(dataset)))) if indices is None else list(indices)
    shape = enc.shape
    paths = []
    for i in indices:
        x = dataset.X[i].astype(np.float64)
        pred = predict(net, x)
        truth = enc.encode([dataset.meta[i, 2]])[0]
        pictures = {
            "input1": dataset.input1[i],
            "input2": dataset.input2[i],
            "prediction": pred,
            "truth": truth,
        }
        if dataset.noise_sigma > 0:
            pictures["noisy_target"] = dataset.target[i]
        for name, pixels in pictures.items():
            path = out / f"sample{i:05d}_{name}.pgm"
            write_pgm(Image(np.clip(np.asarray(pixels, dtype=np.float64), 0, 1).reshape(shape)), path)
            paths.append(path)
    return paths


def render_weights(net: Network, shape: tuple[int, ...], out_dir: str | os.PathLike, count: int = 16) -> list[Path]:
    """Dump the first ``count`` first-layer filters as pictures.

    Each filter is shown as its two operand halves side by side, min-max
    scaled to [0, 1] on its own.
    """
    if len(shape) != 2:
        raise ValueError("filters can only be drawn for picture inputs")
    W = net.layers[0].weights
    if W.shape[1] != 2 * shape[0] * shape[1]:
        raise ValueError(f"first layer takes {W.shape[1]} inputs, pictures give {2 * shape[0] * shape[1]}")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for k in range(min(count, W.shape[0])):
        halves = W[k].reshape(2, *shape)
        tile = np.hstack([halves[0], np.full((shape[0], 1), halves.min()), halves[1]])
        lo, hi = tile.min(), tile.max()
        tile = (tile - lo) / (hi - lo) if hi > lo else np.zeros_like(tile)
        path = out / f"filter{k:03d}.pgm"
        write_pgm(Image(tile), path)
        paths.append(path)
    return paths
