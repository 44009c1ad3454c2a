"""Command-line entry point: ``visarith <command> [flags]``.

Exit codes: 0 success, 1 invalid input or arguments, 2 file or format errors.
"""
from __future__ import annotations

import argparse
import dataclasses
import logging
import sys
from pathlib import Path


from . import harness
from .constructive import GateParams, build_full_adder, verify_constructive
from .datagen import VISUAL, generate_dataset, read_dataset, write_dataset
from .exceptions import UnsupportedFormatError
from .font import Font, Layout, builtin_font, load_font
from .net import load_net, save_net

log = logging.getLogger("visarith")

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2
TRAIN_FILE, TEST_FILE = "train.vds", "test.vds"
MODEL_FILE, ADDER_FILE = "model.vnet", "adder.vnet"
CONFIG_FILE, REPORT_FILE = "config.txt", "report.txt"

_CONFIG_KEYS = {f.name for f in dataclasses.fields(harness.ExperimentConfig)}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise UsageError(f"{self.prog}: error: {message}")


def _experiment_flags() -> argparse.ArgumentParser:
    p = _Parser(add_help=False)
    g = p.add_argument_group("experiment")
    # Defaults stay None so a --config file can fill them in.
    g.add_argument("--op", choices=["add", "sub", "mul", "roman-add"])
    g.add_argument("--mode", choices=["visual", "onehot"])
    g.add_argument("--digits", type=int, metavar="M")
    g.add_argument("--train-n", type=int)
    g.add_argument("--test-n", type=int)
    g.add_argument("--noise-sigma", type=float)
    g.add_argument("--hidden", metavar="SIZES", help='comma separated, e.g. "256,256,256"')
    g.add_argument("--lr", type=float)
    g.add_argument("--momentum", type=float)
    g.add_argument("--batch", type=int)
    g.add_argument("--epochs", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("--init", choices=["he_uniform", "glorot_uniform", "zeros"])
    g.add_argument("--out", metavar="DIR", default="out")
    g.add_argument("--font", metavar="FILE")
    g.add_argument("--config", metavar="FILE", help="key=value lines using the flag names")
    g.add_argument("-v", "--verbose", action="store_true")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _experiment_flags()
    parser = _Parser(prog="visarith", description="Arithmetic on digit pictures with MLPs.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    sub.add_parser("gen", parents=[common], help="write train/test datasets to DIR")
    p = sub.add_parser("train", parents=[common], help="train on DIR/train.vds, write DIR/model.vnet")
    p.add_argument("--data", metavar="FILE", help="training set (default DIR/train.vds)")
    p = sub.add_parser("eval", parents=[common], help="score DIR/model.vnet on DIR/test.vds")
    p.add_argument("--data", metavar="FILE", help="test set (default DIR/test.vds)")
    p.add_argument("--model", metavar="FILE")
    for name, text in (("construct", "build the hand-wired adder"), ("verify", "brute-force check the adder")):
        p = sub.add_parser(name, parents=[common], help=text)
        p.add_argument("--delta", type=float, default=GateParams.delta)
        p.add_argument("--gain", type=float, default=GateParams.gain)
        p.add_argument("--normalize", action="store_true")
    p = sub.add_parser("render", parents=[common], help="dump example pictures as PGM")
    p.add_argument("--model", metavar="FILE")
    p.add_argument("--data", metavar="FILE")
    p.add_argument("--count", type=int, default=3)
    p.add_argument("--constructive", action="store_true", help="render the hand-wired adder on fresh sums")
    p.add_argument("--weights", type=int, default=0, metavar="K", help="also dump K first-layer filters")
    p = sub.add_parser("report", parents=[common], help="run every benchmark table cell")
    p.add_argument("--profile", choices=sorted(harness.PROFILES), default="desk")
    return parser


def _config(args) -> harness.ExperimentConfig:
    values = {k: v for k, v in vars(args).items() if k in _CONFIG_KEYS and v is not None}
    if args.config:
        return harness.ExperimentConfig.from_kv(Path(args.config).read_text(), **values)
    return harness.ExperimentConfig(**values)


def _font(args) -> Font:
    return load_font(args.font) if args.font else builtin_font()


def _digits(args, cfg) -> int:
    return args.digits if args.digits is not None else cfg.digits


def cmd_gen(args) -> int:
    cfg = _config(args)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    train, test = generate_dataset(cfg.dataset_spec(), _font(args))
    write_dataset(train, out / TRAIN_FILE)
    write_dataset(test, out / TEST_FILE)
    (out / CONFIG_FILE).write_text(cfg.to_kv())
    print(f"train: {len(train)}\ntest: {len(test)}\nshape: {'x'.join(map(str, train.shape))}")
    return EXIT_OK


def cmd_train(args) -> int:
    cfg = _config(args)
    out = Path(args.out)
    data = read_dataset(args.data or out / TRAIN_FILE)
    model = cfg.estimator(verbose=args.verbose).fit(data.X, data.Y)
    out.mkdir(parents=True, exist_ok=True)
    save_net(model.network_, out / MODEL_FILE)
    with open(out / "history.txt", "w") as fh:
        for epoch, loss in enumerate(model.history_.loss, 1):
            fh.write(f"{epoch} {loss!r}\n")
    print(f"final_loss: {model.history_.loss[-1]!r}" if model.history_.loss else "final_loss: none")
    return EXIT_OK


def cmd_eval(args) -> int:
    out = Path(args.out)
    net = load_net(args.model or out / MODEL_FILE)
    test = read_dataset(args.data or out / TEST_FILE)
    config = {}
    if (out / CONFIG_FILE).exists():
        config = dict(line.split("=", 1) for line in (out / CONFIG_FILE).read_text().splitlines() if "=" in line)
    report = harness.evaluate(net, test, _font(args), config=config)
    text = report.to_text()
    (out / REPORT_FILE).write_text(text)
    print(text, end="")
    return EXIT_OK


def _gate_params(args) -> GateParams:
    return GateParams(delta=args.delta, gain=args.gain, normalize=args.normalize)


def cmd_construct(args) -> int:
    M = args.digits if args.digits is not None else 3
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    net = build_full_adder(_font(args), Layout(M), M, _gate_params(args))
    save_net(net, out / ADDER_FILE)
    print(f"layers: {' '.join(map(str, net.dims))}\nparams: {net.n_params}\nwritten: {out / ADDER_FILE}")
    return EXIT_OK


def cmd_verify(args) -> int:
    M = args.digits if args.digits is not None else 3
    path = Path(args.out) / ADDER_FILE
    net = load_net(path) if path.exists() else None
    report = verify_constructive(M, _gate_params(args), _font(args), Layout(M), net=net)
    text = report.to_text()
    print(text, end="")
    (Path(args.out)).mkdir(parents=True, exist_ok=True)
    (Path(args.out) / "verify.txt").write_text(text)
    return EXIT_OK if report.errors == 0 else EXIT_INVALID


def cmd_render(args) -> int:
    out = Path(args.out)
    font = _font(args)
    if args.constructive:
        cfg = _config(args)
        M = _digits(args, cfg)
        net = load_net(out / ADDER_FILE) if (out / ADDER_FILE).exists() else build_full_adder(font, Layout(M), M)
        spec = dataclasses.replace(cfg, op="add", mode=VISUAL, digits=M, train_n=0, test_n=args.count).dataset_spec()
        _, data = generate_dataset(spec, font)
    else:
        net = load_net(args.model or out / MODEL_FILE)
        data = read_dataset(args.data or out / TEST_FILE)
    paths = harness.render_examples(net, data, out / "examples", range(min(args.count, len(data))), font)
    if args.weights:
        paths += harness.render_weights(net, data.shape, out / "filters", args.weights)
    for path in paths:
        print(path)
    return EXIT_OK


def cmd_report(args) -> int:
    table = harness.run_table1(args.profile)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"table1_{args.profile}.txt").write_text(table)
    print(table, end="")
    return EXIT_OK


COMMANDS = {
    "gen": cmd_gen,
    "train": cmd_train,
    "eval": cmd_eval,
    "construct": cmd_construct,
    "verify": cmd_verify,
    "render": cmd_render,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_INVALID
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return COMMANDS[args.command](args)
    except (OSError, UnsupportedFormatError) as exc:
        print(f"visarith: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, TypeError) as exc:
        print(f"visarith: {exc}", file=sys.stderr)
        return EXIT_INVALID


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
