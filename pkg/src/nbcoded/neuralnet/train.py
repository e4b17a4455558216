"""Mini-batch training loop with early stopping."""

from __future__ import annotations

import logging
import math
import time
from dataclasses import dataclass, field

import numpy as np

from nbcoded.defaults import (
    BATCH_SIZE,
    DEFAULT_SEED,
    EPOCHS,
    L2_FACTOR,
    PATIENCE,
    VALIDATION_FRACTION,
)
from nbcoded.errors import FeatureError, NonFiniteLossError

from .adam import AdamConfig, adam_step, init_adam
from .backprop import LOSSES, loss_and_gradients, total_loss
from .network import Network

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = EPOCHS
    batch_size: int = BATCH_SIZE
    patience: int = PATIENCE
    l2_factor: float = L2_FACTOR
    adam: AdamConfig = field(default_factory=AdamConfig)
    seed: int = DEFAULT_SEED
    loss: str = "mae"
    validation_fraction: float = VALIDATION_FRACTION

    def __post_init__(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.patience < 0:
            raise ValueError(f"patience must be >= 0, got {self.patience}")
        if self.l2_factor < 0:
            raise ValueError(f"l2_factor must be >= 0, got {self.l2_factor}")
        if not 0.0 <= self.validation_fraction < 1.0:
            raise ValueError(f"validation_fraction must be in [0, 1), got {self.validation_fraction}")
        if self.loss not in LOSSES:
            raise ValueError(f"unknown loss {self.loss!r}; expected one of {sorted(LOSSES)}")


@dataclass(frozen=True, eq=False)
class TrainResult:
    """history[i] is the monitored loss after epoch i + 1."""

    network: Network
    history: tuple[float, ...]
    train_history: tuple[float, ...]
    best_epoch: int
    stopped_early: bool
    monitor: str
    seconds: float

    @property
    def epochs_run(self) -> int:
        return len(self.history)

    @property
    def best_loss(self) -> float:
        return self.history[self.best_epoch - 1]


def _holdout(n: int, fraction: float, rng: np.random.Generator) -> tuple[np.ndarray, np.ndarray]:
    """(fit rows, validation rows); validation is empty when it would leave nothing to fit."""
    n_val = int(math.floor(n * fraction))
    if n_val < 1 or n - n_val < 1:
        return np.arange(n), np.empty(0, dtype=np.int64)
    order = rng.permutation(n)
    return np.sort(order[n_val:]), np.sort(order[:n_val])


def train(network: Network, inputs: np.ndarray, targets: np.ndarray, config: TrainConfig | None = None) -> TrainResult:
    """Adam over seeded mini-batches; returns the best-monitored parameters.

    The monitored loss is the total loss (data + L2) on a held-out slice of
    the inputs, or on all inputs when validation_fraction is 0.
    """
    config = config or TrainConfig()
    X = np.asarray(inputs, dtype=np.float64)
    T = np.asarray(targets, dtype=np.float64)
    if T.ndim == 1:
        T = T[:, None]
    if X.ndim != 2 or X.shape[1] != network.input_width:
        raise FeatureError(f"inputs need width {network.input_width}, got shape {X.shape}")
    if T.shape != (X.shape[0], network.output_width):
        raise FeatureError(f"targets need shape ({X.shape[0]}, {network.output_width}), got {T.shape}")
    if X.shape[0] == 0:
        raise FeatureError("cannot train on zero rows")

    rng = np.random.default_rng(config.seed)
    fit_idx, val_idx = _holdout(X.shape[0], config.validation_fraction, rng)
    X_fit, T_fit = X[fit_idx], T[fit_idx]
    if len(val_idx):
        X_mon, T_mon, monitor = X[val_idx], T[val_idx], "validation"
    else:
        X_mon, T_mon, monitor = X_fit, T_fit, "train"

    state = init_adam(network)
    best_net, best_loss, best_epoch = network, math.inf, 0
    history: list[float] = []
    train_history: list[float] = []
    stale = 0
    stopped_early = False
    n_fit = X_fit.shape[0]
    start = time.perf_counter()

    for epoch in range(1, config.epochs + 1):
        order = rng.permutation(n_fit)
        batch_losses = 0.0
        for batch_no, lo in enumerate(range(0, n_fit, config.batch_size)):
            rows = order[lo : lo + config.batch_size]
            value, grads = loss_and_gradients(network, X_fit[rows], T_fit[rows], config.loss, config.l2_factor)
            if not math.isfinite(value):
                raise NonFiniteLossError(
                    f"loss became {value} at epoch {epoch}, batch {batch_no}", stage="train"
                )
            network, state = adam_step(network, state, grads, config.adam)
            batch_losses += value * len(rows)

        monitored = total_loss(network, X_mon, T_mon, config.loss, config.l2_factor)
        if not math.isfinite(monitored):
            raise NonFiniteLossError(f"{monitor} loss became {monitored} after epoch {epoch}", stage="train")
        history.append(monitored)
        train_history.append(batch_losses / n_fit)
        log.debug("epoch %d: train %.6f, %s %.6f", epoch, train_history[-1], monitor, monitored)

        if monitored < best_loss:
            best_net, best_loss, best_epoch = network, monitored, epoch
            stale = 0
        else:
            stale += 1
        if stale >= config.patience:
            stopped_early = epoch < config.epochs
            break

    seconds = time.perf_counter() - start
    if stopped_early:
        log.warning("early stop after %d epochs, restoring epoch %d (%s loss %.6f)", len(history), best_epoch, monitor, best_loss)
    log.info("trained %s in %.2fs: %d epochs, best %s loss %.6f", list(network.spec.sizes), seconds, len(history), monitor, best_loss)
    return TrainResult(
        network=best_net,
        history=tuple(history),
        train_history=tuple(train_history),
        best_epoch=best_epoch,
        stopped_early=stopped_early,
        monitor=monitor,
        seconds=seconds,
    )
