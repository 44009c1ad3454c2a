import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError
from sklearn.pipeline import make_pipeline

from visarith.estimators import ConstructiveAdder, MLPImageRegressor, NumberEncoder, PairEncoder


def test_params_round_trip_through_clone():
    est = MLPImageRegressor(hidden_layer_sizes=(8, 4), learning_rate=0.05, epochs=2, random_state=3)
    twin = clone(est)
    assert twin.get_params() == est.get_params()
    twin.set_params(epochs=5)
    assert twin.epochs == 5 and est.epochs == 2


def test_regressor_fit_predict_shapes(rng):
    X = rng.uniform(size=(64, 6))
    Y = rng.uniform(size=(64, 3))
    est = MLPImageRegressor(hidden_layer_sizes=(8,), learning_rate=0.05, batch_size=16, epochs=3, random_state=0)
    assert est.fit(X, Y) is est
    pred = est.predict(X)
    assert pred.shape == (64, 3)
    assert ((pred > 0) & (pred < 1)).all()
    assert len(est.history_.loss) == 3
    assert est.n_features_in_ == 6 and est.n_outputs_ == 3


def test_regressor_is_seeded(rng):
    X = rng.uniform(size=(40, 5))
    Y = rng.uniform(size=(40, 2))
    make = lambda: MLPImageRegressor(hidden_layer_sizes=(4,), epochs=2, random_state=7).fit(X, Y)
    assert make().network_ == make().network_


def test_regressor_validation(rng):
    est = MLPImageRegressor(epochs=1)
    with pytest.raises(NotFittedError):
        est.predict(np.zeros((1, 3)))
    with pytest.raises(ValueError):
        est.fit(np.zeros((4, 3)), np.full((4, 2), 2.0))
    est.set_params(hidden_layer_sizes=(2,)).fit(np.zeros((4, 3)), np.zeros((4, 2)))
    with pytest.raises(ValueError):
        est.predict(np.zeros((1, 5)))


def test_constructive_pipeline_adds():
    pipe = make_pipeline(PairEncoder(n_digits=3), ConstructiveAdder(n_digits=3))
    pairs = np.array([[0, 0], [499, 499], [123, 377], [250, 49]])
    pipe.fit(pairs)
    out = pipe.predict(pairs)
    decoded = NumberEncoder(n_digits=3).fit().decode(out)
    assert decoded.tolist() == ["000", "998", "500", "299"]


def test_number_encoder_one_hot():
    enc = NumberEncoder(mode="one_hot", n_digits=3).fit()
    vec = enc.transform([42])
    assert np.flatnonzero(vec[0]).tolist() == [2, 14, 20]
    assert enc.decode(vec).tolist() == ["042"]
    with pytest.raises(ValueError):
        enc.transform([-1])


def test_pair_encoder_shape():
    enc = PairEncoder(n_digits=2).fit()
    assert enc.transform(np.array([[1, 2], [3, 4]])).shape == (2, 2 * 15 * 20)
    with pytest.raises(ValueError):
        enc.transform(np.array([1, 2, 3]))
