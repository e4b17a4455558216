"""Tests for the network engine: init, forward, backprop, Adam, training loop, encoders."""

from __future__ import annotations

import math
from dataclasses import replace

import numpy as np
import pytest

from nbcoded.errors import FeatureError, NonFiniteLossError
from nbcoded.neuralnet import (
    AdamConfig,
    Encoder,
    Gradients,
    LayerSpec,
    Network,
    TrainConfig,
    adam_step,
    data_loss,
    encode,
    extract_encoder,
    forward,
    gradients,
    init_adam,
    init_network,
    l2_penalty,
    loss_and_gradients,
    mlp_spec,
    total_loss,
    train,
)


def zero_network(sizes) -> Network:
    spec = LayerSpec(tuple(sizes))
    return Network(
        spec=spec,
        weights=tuple(np.zeros((o, i)) for i, o in zip(sizes[:-1], sizes[1:])),
        biases=tuple(np.zeros(o) for o in sizes[1:]),
    )


def with_params(network: Network, weights, biases) -> Network:
    return Network(spec=network.spec, weights=tuple(weights), biases=tuple(biases))


# ---------------------------------------------------------------------------
# Specs and initialization
# ---------------------------------------------------------------------------


class TestInit:
    def test_autoencoder_shapes(self):
        net = init_network([9, 8, 6, 8, 9], seed=0)
        assert [w.shape for w in net.weights] == [(8, 9), (6, 8), (8, 6), (9, 8)]
        assert [b.shape for b in net.biases] == [(8,), (6,), (8,), (9,)]
        assert all((b == 0).all() for b in net.biases)
        assert net.n_parameters() == 271

    def test_same_seed_same_parameters(self):
        a, b = init_network([9, 8, 6, 8, 9], 42), init_network([9, 8, 6, 8, 9], 42)
        for wa, wb in zip(a.weights, b.weights):
            assert wa.tobytes() == wb.tobytes()

    def test_glorot_bound(self):
        bound = math.sqrt(6.0 / 17.0)
        samples = np.concatenate([init_network([9, 8], seed).weights[0].ravel() for seed in range(140)])
        assert samples.size >= 10_000
        assert np.abs(samples).max() <= bound
        # the draws fill the interval rather than collapsing near 0
        assert np.abs(samples).max() > 0.95 * bound

    def test_bad_specs(self):
        with pytest.raises(ValueError):
            LayerSpec((9,))
        with pytest.raises(ValueError):
            LayerSpec((9, 0, 9))
        with pytest.raises(ValueError, match="relu"):
            LayerSpec((2, 2), activation="relu")

    def test_parameter_shapes_checked(self):
        with pytest.raises(ValueError):
            Network(spec=LayerSpec((2, 3)), weights=(np.zeros((2, 3)),), biases=(np.zeros(3),))


# ---------------------------------------------------------------------------
# Forward pass
# ---------------------------------------------------------------------------


class TestForward:
    def test_zero_network(self):
        out = forward(zero_network([9, 8, 6, 8, 9]), np.ones((4, 9)))[-1]
        assert out.shape == (4, 9)
        assert (out == 0).all()

    def test_scalar(self):
        net = with_params(zero_network([1, 1]), [np.array([[0.7]])], [np.array([0.0])])
        assert forward(net, np.array([[2.0]]))[-1][0, 0] == pytest.approx(math.tanh(1.4), abs=1e-15)

    def test_loop_oracle(self, rng):
        net = init_network(LayerSpec((4, 3, 2), "tanh", "sigmoid"), seed=5)
        net = with_params(net, net.weights, [rng.normal(size=3), rng.normal(size=2)])
        X = rng.normal(size=(6, 4))
        got = forward(net, X)[-1]
        for r in range(6):
            a = list(X[r])
            for layer, (w, b) in enumerate(zip(net.weights, net.biases)):
                z = [b[j] + sum(w[j, i] * a[i] for i in range(len(a))) for j in range(len(b))]
                if layer == 0:
                    a = [math.tanh(v) for v in z]
                else:
                    a = [1.0 / (1.0 + math.exp(-v)) for v in z]
            np.testing.assert_allclose(got[r], a, rtol=0, atol=1e-12)

    def test_returns_every_layer(self):
        acts = forward(init_network([9, 8, 6, 8, 9], 0), np.zeros((2, 9)))
        assert [a.shape[1] for a in acts] == [9, 8, 6, 8, 9]

    def test_width_mismatch(self):
        with pytest.raises(FeatureError, match="width 9"):
            forward(init_network([9, 4, 9], 0), np.zeros((3, 8)))


# ---------------------------------------------------------------------------
# Gradients
# ---------------------------------------------------------------------------


def _numeric_gradients(net: Network, X, T, loss: str, l2: float, h: float = 1e-5) -> Gradients:
    def perturbed(kind: str, layer: int, idx, delta: float) -> float:
        weights = [w.copy() for w in net.weights]
        biases = [b.copy() for b in net.biases]
        (weights if kind == "w" else biases)[layer][idx] += delta
        return total_loss(with_params(net, weights, biases), X, T, loss, l2)

    grad_w, grad_b = [], []
    for layer, (w, b) in enumerate(zip(net.weights, net.biases)):
        gw = np.empty_like(w)
        for idx in np.ndindex(w.shape):
            gw[idx] = (perturbed("w", layer, idx, h) - perturbed("w", layer, idx, -h)) / (2 * h)
        gb = np.empty_like(b)
        for idx in np.ndindex(b.shape):
            gb[idx] = (perturbed("b", layer, idx, h) - perturbed("b", layer, idx, -h)) / (2 * h)
        grad_w.append(gw)
        grad_b.append(gb)
    return Gradients(weights=tuple(grad_w), biases=tuple(grad_b))


def _max_relative_error(a: Gradients, b: Gradients) -> float:
    worst = 0.0
    for ga, gb in zip((*a.weights, *a.biases), (*b.weights, *b.biases)):
        denom = np.maximum(np.maximum(np.abs(ga), np.abs(gb)), 1e-5)
        worst = max(worst, float((np.abs(ga - gb) / denom).max()))
    return worst


class TestGradients:
    @pytest.mark.parametrize("trial", range(20))
    def test_finite_differences(self, trial: int):
        specs = [(9, 8, 6, 8, 9), (9, 4, 9), (5, 3, 2, 3, 5)]
        rng = np.random.default_rng(100 + trial)
        sizes = specs[trial % 3]
        net = init_network(sizes, seed=trial)
        net = with_params(net, net.weights, [rng.normal(scale=0.1, size=b.shape) for b in net.biases])
        X = rng.random((5, sizes[0]))
        T = rng.random((5, sizes[-1]))
        l2 = 0.001 if trial % 2 else 0.0
        analytic = gradients(net, X, T, "mae", l2)
        assert _max_relative_error(analytic, _numeric_gradients(net, X, T, "mae", l2)) < 1e-4

    def test_cross_entropy_finite_differences(self, rng):
        net = init_network(mlp_spec(3, (4, 4)), seed=3)
        X = rng.random((6, 3))
        y = np.array([0, 1, 1, 0, 1, 0], dtype=float)
        analytic = gradients(net, X, y, "cross_entropy", 0.01)
        numeric = _numeric_gradients(net, X, y[:, None], "cross_entropy", 0.01)
        assert _max_relative_error(analytic, numeric) < 1e-4

    def test_l2_alone(self):
        net = init_network([4, 2, 4], seed=1)
        X = np.random.default_rng(0).random((3, 4))
        perfect = forward(net, X)[-1]
        grads = gradients(net, X, perfect, "mae", l2_factor=0.05)
        for g, w in zip(grads.weights, net.weights):
            np.testing.assert_allclose(g, 2 * 0.05 * w, rtol=0, atol=1e-15)
        assert all((g == 0).all() for g in grads.biases)

    def test_perfect_reconstruction_zero_gradient(self):
        net = init_network([4, 2, 4], seed=1)
        X = np.random.default_rng(0).random((3, 4))
        value, grads = loss_and_gradients(net, X, forward(net, X)[-1], "mae")
        assert value == 0.0
        assert grads.max_abs() == 0.0

    def test_penalty_skips_biases(self):
        net = zero_network([2, 2])
        net = with_params(net, [np.array([[1.0, 2.0], [0.0, 1.0]])], [np.array([5.0, 5.0])])
        assert l2_penalty(net, 0.5) == pytest.approx(3.0)

    def test_cross_entropy_needs_sigmoid(self):
        net = init_network([3, 1], 0)
        with pytest.raises(ValueError, match="sigmoid"):
            data_loss(net, np.zeros((2, 3)), np.zeros(2), "cross_entropy")

    def test_target_shape_checked(self):
        net = init_network([3, 2, 3], 0)
        with pytest.raises(FeatureError):
            gradients(net, np.zeros((2, 3)), np.zeros((2, 2)))


# ---------------------------------------------------------------------------
# Adam
# ---------------------------------------------------------------------------


def _scalar(w: float) -> Network:
    return with_params(zero_network([1, 1]), [np.array([[w]])], [np.array([0.0])])


def _scalar_grad(g: float) -> Gradients:
    return Gradients(weights=(np.array([[g]]),), biases=(np.array([0.0]),))


class TestAdam:
    def test_zero_gradient_first_step(self):
        net = init_network([3, 2], seed=0)
        zero = Gradients(weights=tuple(np.zeros_like(w) for w in net.weights),
                         biases=tuple(np.zeros_like(b) for b in net.biases))
        updated, state = adam_step(net, init_adam(net), zero)
        assert state.t == 1
        for a, b in zip(updated.weights, net.weights):
            assert a.tobytes() == b.tobytes()

    def test_constant_gradient_step_size(self):
        hyper = AdamConfig(lr=0.01)
        net = _scalar(0.0)
        state = init_adam(net)
        previous = 0.0
        for _ in range(200):
            net, state = adam_step(net, state, _scalar_grad(-3.0), hyper)
            current = float(net.weights[0][0, 0])
            step = current - previous
            previous = current
        assert step == pytest.approx(0.01, rel=1e-6)

    def test_scalar_recurrence(self):
        hyper = AdamConfig()
        grads = [0.5, -1.25, 2.0]
        net = _scalar(0.3)
        state = init_adam(net)
        w, m, v = 0.3, 0.0, 0.0
        for t, g in enumerate(grads, start=1):
            net, state = adam_step(net, state, _scalar_grad(g), hyper)
            m = hyper.beta1 * m + (1 - hyper.beta1) * g
            v = hyper.beta2 * v + (1 - hyper.beta2) * g * g
            m_hat = m / (1 - hyper.beta1**t)
            v_hat = v / (1 - hyper.beta2**t)
            w -= hyper.lr * m_hat / (math.sqrt(v_hat) + hyper.eps)
            assert float(net.weights[0][0, 0]) == pytest.approx(w, abs=1e-12)

    def test_inputs_untouched(self):
        net = init_network([3, 2], seed=0)
        before = net.weights[0].copy()
        grads = Gradients(weights=(np.ones((2, 3)),), biases=(np.ones(2),))
        adam_step(net, init_adam(net), grads)
        np.testing.assert_array_equal(net.weights[0], before)

    def test_state_mismatch(self):
        with pytest.raises(ValueError):
            adam_step(init_network([3, 2], 0), init_adam(init_network([4, 2], 0)),
                      Gradients(weights=(np.zeros((2, 3)),), biases=(np.zeros(2),)))

    def test_bad_hyper(self):
        with pytest.raises(ValueError):
            AdamConfig(lr=0.0)
        with pytest.raises(ValueError):
            AdamConfig(beta1=1.0)


# ---------------------------------------------------------------------------
# Training loop
# ---------------------------------------------------------------------------


class TestTrain:
    def test_patience_zero_runs_one_epoch(self, rng):
        X = rng.random((100, 4))
        result = train(init_network([4, 2, 4], 0), X, X, TrainConfig(epochs=10, patience=0, batch_size=16))
        assert result.epochs_run == 1
        assert result.stopped_early
        assert result.best_epoch == 1

    def test_identity_task_descends(self, rng):
        X = rng.uniform(-0.5, 0.5, size=(200, 1))
        net = init_network([1, 4, 1], seed=2)
        config = TrainConfig(epochs=60, batch_size=20, patience=60, l2_factor=0.0)
        result = train(net, X, X, config)
        assert data_loss(result.network, X, X) < data_loss(net, X, X)

    def test_deterministic(self, rng):
        X = rng.random((150, 5))
        config = TrainConfig(epochs=5, batch_size=32, patience=5, seed=9)
        a = train(init_network([5, 3, 2, 3, 5], 1), X, X, config)
        b = train(init_network([5, 3, 2, 3, 5], 1), X, X, config)
        assert a.history == b.history
        assert a.train_history == b.train_history
        for wa, wb in zip(a.network.weights, b.network.weights):
            assert wa.tobytes() == wb.tobytes()

    def test_best_epoch_restored(self, rng):
        X = rng.random((120, 4))
        result = train(init_network([4, 3, 4], 0), X, X, TrainConfig(epochs=8, batch_size=10, patience=8))
        assert result.best_loss == min(result.history)
        assert result.history[result.best_epoch - 1] == result.best_loss
        assert result.monitor == "validation"
        assert len(result.train_history) == result.epochs_run

    def test_no_validation_slice(self, rng):
        X = rng.random((40, 3))
        config = TrainConfig(epochs=2, batch_size=8, validation_fraction=0.0)
        assert train(init_network([3, 2, 3], 0), X, X, config).monitor == "train"

    def test_partial_last_batch(self, rng):
        X = rng.random((23, 3))
        config = TrainConfig(epochs=2, batch_size=250, patience=2)
        result = train(init_network([3, 2, 3], 0), X, X, config)
        assert result.epochs_run == 2

    def test_non_finite_loss(self):
        X = np.full((20, 3), np.nan)
        with pytest.raises(NonFiniteLossError, match="train") as exc:
            train(init_network([3, 2, 3], 0), X, np.zeros((20, 3)), TrainConfig(epochs=2))
        assert exc.value.stage == "train"

    def test_shape_checks(self):
        net = init_network([3, 2, 3], 0)
        with pytest.raises(FeatureError):
            train(net, np.zeros((5, 4)), np.zeros((5, 3)))
        with pytest.raises(FeatureError):
            train(net, np.zeros((0, 3)), np.zeros((0, 3)))

    def test_config_validation(self):
        base = TrainConfig()
        for changes in ({"epochs": 0}, {"batch_size": 0}, {"patience": -1}, {"l2_factor": -0.1},
                        {"validation_fraction": 1.0}, {"loss": "mse"}):
            with pytest.raises(ValueError):
                replace(base, **changes)


# ---------------------------------------------------------------------------
# Encoders
# ---------------------------------------------------------------------------


class TestEncoder:
    def test_default_autoencoder(self):
        enc = extract_encoder(init_network([9, 8, 6, 8, 9], 0))
        assert isinstance(enc, Encoder)
        assert enc.spec.sizes == (9, 8, 6)
        assert enc.bottleneck == 6

    def test_small_autoencoder(self):
        ae = init_network([4, 2, 4], 3)
        enc = extract_encoder(ae)
        assert enc.spec.sizes == (4, 2)
        np.testing.assert_array_equal(enc.weights[0], ae.weights[0])

    def test_copy_is_independent(self):
        ae = init_network([4, 2, 4], 3)
        assert not np.shares_memory(extract_encoder(ae).weights[0], ae.weights[0])

    @pytest.mark.parametrize("sizes", [(9, 8, 6, 7, 9), (4, 2, 2, 4), (4, 4)])
    def test_asymmetric_rejected(self, sizes):
        with pytest.raises(ValueError, match="symmetric"):
            extract_encoder(init_network(sizes, 0))

    def test_tanh_range(self, rng):
        enc = extract_encoder(init_network([9, 8, 6, 8, 9], 0))
        Z = encode(enc, rng.normal(scale=50.0, size=(200, 9)))
        assert Z.shape == (200, 6)
        assert (np.abs(Z) <= 1.0).all()
        assert (np.abs(encode(enc, rng.random((200, 9)))) < 1.0).all()

    def test_zero_encoder(self):
        enc = extract_encoder(zero_network([9, 8, 6, 8, 9]))
        assert (encode(enc, np.ones((3, 9))) == 0).all()

    def test_batch_matches_rows(self, rng):
        enc = extract_encoder(init_network([9, 8, 6, 8, 9], 4))
        X = rng.random((1000, 9))
        batch = encode(enc, X)
        for i in range(0, 1000, 37):
            np.testing.assert_allclose(batch[i], encode(enc, X[i : i + 1])[0], rtol=0, atol=1e-12)

    def test_width_mismatch(self):
        enc = extract_encoder(init_network([9, 8, 6, 8, 9], 0))
        with pytest.raises(FeatureError):
            encode(enc, np.zeros((2, 6)))
