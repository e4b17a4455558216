"""Losses, L2 penalty and exact backpropagated gradients."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nbcoded.errors import FeatureError

from .network import Network, activation_derivative, forward_with_logits

LOSSES: frozenset[str] = frozenset({"mae", "cross_entropy"})


@dataclass(frozen=True, eq=False)
class Gradients:
    """Same layout as the network's parameters."""

    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def max_abs(self) -> float:
        return max(float(np.abs(g).max(initial=0.0)) for g in (*self.weights, *self.biases))


def _check(network: Network, batch: np.ndarray, targets: np.ndarray, loss: str) -> np.ndarray:
    if loss not in LOSSES:
        raise ValueError(f"unknown loss {loss!r}; expected one of {sorted(LOSSES)}")
    if loss == "cross_entropy" and network.spec.layer_activation(network.spec.n_layers - 1) != "sigmoid":
        raise ValueError("cross_entropy needs a sigmoid output layer")
    t = np.asarray(targets, dtype=np.float64)
    if t.ndim == 1 and network.output_width == 1:
        t = t[:, None]
    if t.ndim != 2 or t.shape[1] != network.output_width:
        raise FeatureError(f"targets need width {network.output_width}, got shape {t.shape}")
    if t.shape[0] != np.shape(batch)[0]:
        raise FeatureError(f"{np.shape(batch)[0]} inputs but {t.shape[0]} targets")
    return t


def _data_loss(loss: str, logits: np.ndarray, output: np.ndarray, t: np.ndarray) -> float:
    if loss == "mae":
        return float(np.mean(np.abs(output - t)))
    # binary cross-entropy on logits: softplus(z) - t z
    return float(np.mean(np.logaddexp(0.0, logits) - t * logits))


def l2_penalty(network: Network, l2_factor: float) -> float:
    """l2_factor times the sum of squared weights; biases are not penalized."""
    if l2_factor == 0.0:
        return 0.0
    return l2_factor * float(sum(np.sum(w * w) for w in network.weights))


def data_loss(network: Network, batch: np.ndarray, targets: np.ndarray, loss: str = "mae") -> float:
    t = _check(network, batch, targets, loss)
    logits, acts = forward_with_logits(network, batch)
    return _data_loss(loss, logits[-1], acts[-1], t)


def total_loss(
    network: Network, batch: np.ndarray, targets: np.ndarray, loss: str = "mae", l2_factor: float = 0.0
) -> float:
    return data_loss(network, batch, targets, loss) + l2_penalty(network, l2_factor)


def loss_and_gradients(
    network: Network,
    batch: np.ndarray,
    targets: np.ndarray,
    loss: str = "mae",
    l2_factor: float = 0.0,
) -> tuple[float, Gradients]:
    """Total loss of the batch and its gradient with respect to every parameter."""
    t = _check(network, batch, targets, loss)
    logits, acts = forward_with_logits(network, batch)
    output = acts[-1]
    n_layers = network.spec.n_layers
    scale = 1.0 / output.size if output.size else 0.0

    if loss == "mae":
        # np.sign(0) == 0 gives the zero subgradient at a perfect fit
        delta = np.sign(output - t) * scale
        delta = delta * activation_derivative(network.spec.layer_activation(n_layers - 1), output)
    else:
        delta = (output - t) * scale

    grad_w: list[np.ndarray] = [np.empty(0)] * n_layers
    grad_b: list[np.ndarray] = [np.empty(0)] * n_layers
    for layer in range(n_layers - 1, -1, -1):
        w = network.weights[layer]
        grad_w[layer] = delta.T @ acts[layer] + 2.0 * l2_factor * w
        grad_b[layer] = delta.sum(axis=0)
        if layer > 0:
            below = network.spec.layer_activation(layer - 1)
            delta = (delta @ w) * activation_derivative(below, acts[layer])

    value = _data_loss(loss, logits[-1], output, t) + l2_penalty(network, l2_factor)
    return value, Gradients(weights=tuple(grad_w), biases=tuple(grad_b))


def gradients(
    network: Network,
    batch: np.ndarray,
    targets: np.ndarray,
    loss: str = "mae",
    l2_factor: float = 0.0,
) -> Gradients:
    return loss_and_gradients(network, batch, targets, loss, l2_factor)[1]
