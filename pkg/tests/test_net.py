import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from visarith.datagen import VISUAL, DatasetSpec, generate_dataset
from visarith.exceptions import TruncatedPayloadError, UnsupportedFormatError
from visarith.net import (
    DenseLayer,
    Network,
    TrainConfig,
    backward,
    build_network,
    forward,
    gradient_check,
    l2_loss,
    load_net,
    predict,
    save_net,
    sgd_momentum_step,
    train,
)


def small_net(rng, dims=(20, 10, 5)):
    return build_network(dims[0], list(dims[1:-1]), dims[-1], rng)


def test_build_full_size_network():
    net = build_network(1800, [256, 256, 256], 900, np.random.default_rng(0))
    assert len(net.layers) == 4
    assert net.n_params == 1800 * 256 + 256 + 2 * (256 * 256 + 256) + 256 * 900 + 900
    assert all(not layer.bias.any() for layer in net.layers)
    assert [l.activation for l in net.layers] == ["relu"] * 3 + ["sigmoid"]


@pytest.mark.parametrize("scheme", ["he_uniform", "glorot_uniform"])
def test_build_is_seeded(scheme):
    a = build_network(30, [16], 4, np.random.default_rng(3), scheme)
    b = build_network(30, [16], 4, np.random.default_rng(3), scheme)
    assert a == b
    bound = np.sqrt(6 / 30) if scheme == "he_uniform" else np.sqrt(6 / 46)
    assert np.abs(a.layers[0].weights).max() <= bound


def test_build_rejects_bad_args():
    with pytest.raises(ValueError):
        build_network(10, [0], 3, np.random.default_rng(0))
    with pytest.raises(ValueError):
        build_network(10, [4], 3, np.random.default_rng(0), "orthogonal")


def test_zero_network_outputs_half():
    net = build_network(6, [4, 4], 3, np.random.default_rng(0), "zeros")
    assert np.all(predict(net, np.ones(6)) == 0.5)


def test_relu_identity_layer():
    net = Network([DenseLayer(np.eye(2), np.zeros(2), "relu")])
    assert predict(net, np.array([-1.0, 2.0])).tolist() == [0.0, 2.0]


def test_sigmoid_monotone_in_logit():
    outs = []
    for scale in (0.5, 1.0, 2.0):
        net = Network([DenseLayer(np.array([[scale]]), np.zeros(1), "sigmoid")])
        outs.append(predict(net, np.array([1.0]))[0])
    assert outs[0] < outs[1] < outs[2]


def test_sigmoid_is_stable_for_large_logits():
    net = Network([DenseLayer(np.array([[1.0], [-1.0]]), np.zeros(2), "sigmoid")])
    with np.errstate(over="raise", invalid="raise"):
        out = predict(net, np.array([800.0]))
    assert out.tolist() == [1.0, 0.0]


def test_network_rejects_mismatched_layers():
    with pytest.raises(ValueError):
        Network([DenseLayer(np.zeros((3, 2)), np.zeros(3)), DenseLayer(np.zeros((1, 4)), np.zeros(1))])


def test_forward_batch_matches_rows(rng):
    net = small_net(rng)
    X = rng.normal(size=(7, 20))
    batch = predict(net, X)
    assert np.allclose(batch, np.stack([predict(net, x) for x in X]))


def test_l2_loss_values():
    assert l2_loss([1.0, 0.0], [1.0, 0.0]) == 0.0
    assert l2_loss([1.0, 0.0], [0.0, 0.0]) == 0.5
    with pytest.raises(ValueError):
        l2_loss([1.0], [1.0, 2.0])


@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3), st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_l2_loss_symmetric(a, b):
    assert l2_loss(a, b) == l2_loss(b, a)


def test_gradient_check_small_network(rng):
    net = small_net(rng)
    x = rng.normal(size=20)
    target = rng.uniform(size=5)
    assert gradient_check(net, x, target) < 1e-4


def test_gradient_check_batch(rng):
    net = build_network(8, [6, 5], 4, rng)
    for layer in net.layers:
        layer.bias[:] = rng.normal(scale=0.1, size=layer.bias.shape)
    X = rng.normal(size=(5, 8))
    Y = rng.uniform(size=(5, 4))
    assert gradient_check(net, X, Y) < 1e-4


def test_zero_gradient_at_target(rng):
    net = small_net(rng)
    x = rng.normal(size=20)
    pred, cache = forward(net, x)
    for dw, db in backward(net, cache, pred):
        assert not dw.any() and not db.any()


def test_dead_relu_gets_no_gradient(rng):
    net = small_net(rng)
    net.layers[0].bias[0] = -1e6
    x = rng.normal(size=20)
    _, cache = forward(net, x)
    dw, db = backward(net, cache, np.zeros(5))[0]
    assert not dw[0].any() and db[0] == 0.0


def test_sgd_plain_when_no_momentum():
    p, g, v = np.array([1.0, 2.0]), np.array([0.5, -1.0]), np.zeros(2)
    sgd_momentum_step([p], [g], [v], lr=0.1, momentum=0.0)
    assert np.allclose(p, [0.95, 2.1])


def test_sgd_coasts_on_velocity():
    p, v = np.zeros(2), np.array([1.0, -2.0])
    sgd_momentum_step([p], [np.zeros(2)], [v], lr=0.1, momentum=0.9)
    assert np.allclose(p, [0.9, -1.8])


def test_two_constant_gradient_steps():
    lr, mu, g = 0.1, 0.9, np.array([1.0, -3.0])
    p, v = np.zeros(2), np.zeros(2)
    for _ in range(2):
        sgd_momentum_step([p], [g], [v], lr, mu)
    assert np.allclose(p, -lr * g * (2 + mu))


def test_train_config_validation():
    for bad in ({"learning_rate": 0}, {"momentum": 1.0}, {"batch_size": 0}, {"epochs": -1}, {"init_scheme": "x"}):
        with pytest.raises(ValueError):
            TrainConfig(**bad)


def test_train_memorizes_small_set():
    train_set, _ = generate_dataset(DatasetSpec("add", VISUAL, 2, 100, 0, seed=1))
    net = build_network(train_set.X.shape[1], [256], train_set.Y.shape[1], np.random.default_rng(0))
    config = TrainConfig(learning_rate=0.01, momentum=0.9, batch_size=10, epochs=300, seed=0)
    net, history = train(net, train_set.X, train_set.Y, config)
    assert len(history.loss) == 300
    assert np.mean((predict(net, train_set.X.astype(np.float64)) - train_set.Y) ** 2) < 1e-3


def test_train_is_bitwise_deterministic(rng):
    X = rng.uniform(size=(300, 12))
    Y = rng.uniform(size=(300, 3))
    config = TrainConfig(learning_rate=0.05, batch_size=64, epochs=3, seed=11)
    nets = [train(build_network(12, [8], 3, np.random.default_rng(1)), X, Y, config) for _ in range(2)]
    assert nets[0][0] == nets[1][0]
    assert nets[0][1].loss == nets[1][1].loss


def test_epoch_loss_is_per_unit_mean(rng):
    X = rng.uniform(size=(50, 4))
    Y = rng.uniform(size=(50, 2))
    net = build_network(4, [3], 2, np.random.default_rng(0), "zeros")
    # with zero weights nothing moves during the first batch, so a single
    # full batch sees the initial predictions
    _, history = train(net, X, Y, TrainConfig(learning_rate=1e-12, batch_size=50, epochs=1))
    assert history.loss[0] == pytest.approx(np.mean((0.5 - Y) ** 2))


def test_train_rejects_bad_data(rng):
    net = build_network(4, [3], 2, rng)
    with pytest.raises(ValueError):
        train(net, np.zeros((0, 4)), np.zeros((0, 2)), TrainConfig())
    with pytest.raises(ValueError):
        train(net, np.zeros((5, 3)), np.zeros((5, 2)), TrainConfig())


def test_save_load_bitwise(tmp_path, rng):
    net = small_net(rng)
    save_net(net, tmp_path / "m.vnet")
    assert load_net(tmp_path / "m.vnet") == net


def test_header_lists_dims(tmp_path):
    net = build_network(1800, [256], 900, np.random.default_rng(0))
    save_net(net, tmp_path / "m.vnet")
    head = (tmp_path / "m.vnet").read_bytes()[:80].split(b"\n")
    assert head[0] == b"VNET1"
    assert head[1] == b"dims 1800 256 900"


def test_truncated_model(tmp_path, rng):
    path = tmp_path / "m.vnet"
    save_net(small_net(rng), path)
    path.write_bytes(path.read_bytes()[:-8])
    with pytest.raises(TruncatedPayloadError):
        load_net(path)


def test_wrong_magic(tmp_path):
    path = tmp_path / "m.vnet"
    path.write_bytes(b"VNET2\ndims 1 1\nactivations relu\n" + bytes(16))
    with pytest.raises(UnsupportedFormatError):
        load_net(path)
