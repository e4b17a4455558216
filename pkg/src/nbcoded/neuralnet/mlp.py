"""Two-hidden-layer perceptron classifier used as the heavyweight baseline."""

from __future__ import annotations

import logging
from collections.abc import Sequence
from dataclasses import replace

import numpy as np

from nbcoded.defaults import MLP_HIDDEN
from nbcoded.errors import FeatureError, FitError

from .network import LayerSpec, Network, init_network, predict_output
from .train import TrainConfig, TrainResult, train

log = logging.getLogger(__name__)


def mlp_spec(n_inputs: int, hidden: Sequence[int] = MLP_HIDDEN) -> LayerSpec:
    return LayerSpec((n_inputs, *hidden, 1), activation="tanh", output_activation="sigmoid")


def train_mlp(
    inputs: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig | None = None,
    hidden: Sequence[int] = MLP_HIDDEN,
) -> TrainResult:
    """Like train_mlp_classifier, but returns the full TrainResult."""
    X = np.asarray(inputs, dtype=np.float64)
    y = np.asarray(labels)
    if X.ndim != 2:
        raise FeatureError(f"expected a 2-D input matrix, got shape {X.shape}")
    if y.shape != (X.shape[0],):
        raise FitError(f"{X.shape[0]} rows but labels of shape {y.shape}")
    if not np.isin(y, (0, 1)).all():
        raise FitError("labels must be 0 or 1")
    present = np.unique(y)
    if len(present) < 2:
        raise FitError(f"both classes must be present to train the MLP, got only {present.tolist()}")
    config = replace(config or TrainConfig(), loss="cross_entropy")
    network = init_network(mlp_spec(X.shape[1], hidden), config.seed)
    return train(network, X, y.astype(np.float64), config)


def train_mlp_classifier(
    inputs: np.ndarray,
    labels: np.ndarray,
    config: TrainConfig | None = None,
    hidden: Sequence[int] = MLP_HIDDEN,
) -> Network:
    """[n_inputs, *hidden, 1] network, tanh hidden units, sigmoid output, cross-entropy."""
    return train_mlp(inputs, labels, config, hidden).network


def mlp_probability(network: Network, batch: np.ndarray) -> np.ndarray:
    return predict_output(network, np.asarray(batch, dtype=np.float64))[:, 0]


def predict_mlp(network: Network, batch: np.ndarray) -> np.ndarray:
    """Class 1 where the attack probability exceeds 0.5."""
    return (mlp_probability(network, batch) > 0.5).astype(np.int8)
