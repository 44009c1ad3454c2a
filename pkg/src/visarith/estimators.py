"""scikit-learn compatible wrappers around the numpy network and the codecs.

These let the pieces sit in a ``Pipeline`` or go through ``clone``,
``get_params`` and ``set_params`` like any other estimator.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, RegressorMixin, TransformerMixin
from sklearn.utils.validation import check_array, check_is_fitted, check_X_y

from .constructive import GateParams, build_full_adder
from .datagen import Encoding, OpKind
from .font import Layout, builtin_font
from .net import TrainConfig, build_network, predict, train


class MLPImageRegressor(RegressorMixin, BaseEstimator):
    """Fully connected ReLU network with a sigmoid output layer, trained on L2 loss.

    Targets must lie in [0, 1]: pixels of a picture or bits of a 1-hot code.

    Parameters
    ----------
    hidden_layer_sizes : tuple of int
    learning_rate, momentum : float
        Classical momentum SGD on the batch-averaged loss.
    batch_size, epochs : int
    random_state : int
        Seeds both the weight initialisation and the epoch shuffles.
    init_scheme : str
        ``"he_uniform"``, ``"glorot_uniform"`` or ``"zeros"``.
    """

    def __init__(
        self,
        hidden_layer_sizes=(256, 256, 256),
        learning_rate=0.1,
        momentum=0.9,
        batch_size=256,
        epochs=50,
        random_state=0,
        init_scheme="he_uniform",
        verbose=False,
    ):
        self.hidden_layer_sizes = hidden_layer_sizes
        self.learning_rate = learning_rate
        self.momentum = momentum
        self.batch_size = batch_size
        self.epochs = epochs
        self.random_state = random_state
        self.init_scheme = init_scheme
        self.verbose = verbose

    def _config(self) -> TrainConfig:
        return TrainConfig(
            learning_rate=self.learning_rate,
            momentum=self.momentum,
            batch_size=self.batch_size,
            epochs=self.epochs,
            seed=self.random_state,
            init_scheme=self.init_scheme,
        )

    def fit(self, X, y):
        X, y = check_X_y(X, y, multi_output=True, dtype=(np.float32, np.float64))
        if y.ndim == 1:
            y = y[:, None]
        if y.min() < 0 or y.max() > 1:
            raise ValueError("targets must lie in [0, 1] for a sigmoid output")
        config = self._config()
        rng = np.random.default_rng(config.seed)
        net = build_network(X.shape[1], list(self.hidden_layer_sizes), y.shape[1], rng, config.init_scheme)
        callback = None
        if self.verbose:
            def callback(epoch, history):
                print(f"epoch {epoch + 1}/{config.epochs} loss {history.loss[-1]:.5f} "
                      f"({history.wall_time[-1]:.1f}s)", flush=True)
        self.network_, self.history_ = train(net, X, y, config, callback=callback)
        self.n_features_in_ = X.shape[1]
        self.n_outputs_ = y.shape[1]
        return self

    def predict(self, X):
        check_is_fitted(self, "network_")
        X = check_array(X, dtype=np.float64)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} features, expected {self.n_features_in_}")
        return predict(self.network_, X)


class ConstructiveAdder(RegressorMixin, BaseEstimator):
    """The hand-wired visual adder; ``fit`` only builds the weights."""

    def __init__(self, n_digits=3, delta=0.01, gain=50.0, normalize=False, left_margin=2):
        self.n_digits = n_digits
        self.delta = delta
        self.gain = gain
        self.normalize = normalize
        self.left_margin = left_margin

    def fit(self, X=None, y=None):
        layout = Layout(self.n_digits, self.left_margin)
        params = GateParams(self.delta, self.gain, self.normalize)
        self.network_ = build_full_adder(builtin_font(), layout, self.n_digits, params)
        self.n_features_in_ = self.network_.input_dim
        return self

    def predict(self, X):
        check_is_fitted(self, "network_")
        X = check_array(X, dtype=np.float64)
        return predict(self.network_, X)


class NumberEncoder(TransformerMixin, BaseEstimator):
    """Integers -> flattened pictures (``mode="visual"``) or 1-hot codes."""

    def __init__(self, op="add", mode="visual", n_digits=3, left_margin=2):
        self.op = op
        self.mode = mode
        self.n_digits = n_digits
        self.left_margin = left_margin

    def _encoding(self) -> Encoding:
        return Encoding(OpKind.parse(self.op), self.mode, self.n_digits, builtin_font(), self.left_margin)

    def fit(self, X=None, y=None):
        self.encoding_ = self._encoding()
        return self

    def transform(self, X):
        check_is_fitted(self, "encoding_")
        values = np.asarray(X).ravel()
        if values.size and (values < 0).any():
            raise ValueError("only non-negative integers can be encoded")
        return self.encoding_.encode(values.astype(np.int64))

    def decode(self, outputs) -> np.ndarray:
        """Symbol strings for network outputs (inverse direction of :meth:`transform`)."""
        check_is_fitted(self, "encoding_")
        strings, _ = self.encoding_.decode(outputs)
        return np.array(strings, dtype=object)


class PairEncoder(NumberEncoder):
    """(N, 2) operand pairs -> concatenated encodings of both operands."""

    def transform(self, X):
        check_is_fitted(self, "encoding_")
        pairs = np.asarray(X)
        if pairs.ndim != 2 or pairs.shape[1] != 2:
            raise ValueError(f"expected (N, 2) operand pairs, got shape {pairs.shape}")
        return np.hstack([super().transform(pairs[:, 0]), super().transform(pairs[:, 1])])
