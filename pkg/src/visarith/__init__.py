"""Arithmetic on rendered digit images with fully connected networks."""
from .constructive import GateParams, VerifyReport, build_full_adder, verify_constructive
from .datagen import ONE_HOT, VISUAL, Dataset, DatasetSpec, Encoding, OpKind, generate_dataset, read_dataset, write_dataset
from .estimators import ConstructiveAdder, MLPImageRegressor, NumberEncoder, PairEncoder
from .exceptions import TruncatedPayloadError, UnsupportedFormatError
from .font import Font, Layout, builtin_font, decode_batch, render_decimal, render_string
from .harness import ExperimentConfig, MetricsReport, evaluate, run_experiment, run_table1
from .imaging import Image, read_pgm, write_pgm
from .net import Network, TrainConfig, build_network, load_net, predict, save_net, train
from .numerals import from_roman, one_hot_decode, one_hot_encode, to_roman

__version__ = "0.1.0"
