"""Adam optimizer with bias correction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from nbcoded.defaults import ADAM_BETA1, ADAM_BETA2, ADAM_EPS, ADAM_LR

from .backprop import Gradients
from .network import Network


@dataclass(frozen=True)
class AdamConfig:
    lr: float = ADAM_LR
    beta1: float = ADAM_BETA1
    beta2: float = ADAM_BETA2
    eps: float = ADAM_EPS

    def __post_init__(self) -> None:
        if self.lr <= 0:
            raise ValueError(f"lr must be > 0, got {self.lr}")
        if not (0.0 <= self.beta1 < 1.0 and 0.0 <= self.beta2 < 1.0):
            raise ValueError(f"betas must be in [0, 1), got {self.beta1}, {self.beta2}")
        if self.eps <= 0:
            raise ValueError(f"eps must be > 0, got {self.eps}")


@dataclass(frozen=True, eq=False)
class AdamState:
    """First/second moment estimates per parameter and the step counter."""

    m_w: tuple[np.ndarray, ...]
    v_w: tuple[np.ndarray, ...]
    m_b: tuple[np.ndarray, ...]
    v_b: tuple[np.ndarray, ...]
    t: int = 0


def init_adam(network: Network) -> AdamState:
    zeros_w = tuple(np.zeros_like(w) for w in network.weights)
    zeros_b = tuple(np.zeros_like(b) for b in network.biases)
    return AdamState(m_w=zeros_w, v_w=zeros_w, m_b=zeros_b, v_b=zeros_b, t=0)


def _update(
    param: np.ndarray, grad: np.ndarray, m: np.ndarray, v: np.ndarray, hyper: AdamConfig, t: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    m = hyper.beta1 * m + (1.0 - hyper.beta1) * grad
    v = hyper.beta2 * v + (1.0 - hyper.beta2) * (grad * grad)
    m_hat = m / (1.0 - hyper.beta1**t)
    v_hat = v / (1.0 - hyper.beta2**t)
    return param - hyper.lr * m_hat / (np.sqrt(v_hat) + hyper.eps), m, v


def adam_step(
    network: Network, state: AdamState, grads: Gradients, hyper: AdamConfig | None = None
) -> tuple[Network, AdamState]:
    """One Adam update. Returns the new network and state; inputs are untouched."""
    hyper = hyper or AdamConfig()
    if len(state.m_w) != network.spec.n_layers or any(
        m.shape != w.shape for m, w in zip(state.m_w, network.weights)
    ):
        raise ValueError("optimizer state does not match the network's parameters")
    t = state.t + 1
    new_w, m_w, v_w = [], [], []
    for w, g, m, v in zip(network.weights, grads.weights, state.m_w, state.v_w):
        p, m, v = _update(w, g, m, v, hyper, t)
        new_w.append(p)
        m_w.append(m)
        v_w.append(v)
    new_b, m_b, v_b = [], [], []
    for b, g, m, v in zip(network.biases, grads.biases, state.m_b, state.v_b):
        p, m, v = _update(b, g, m, v, hyper, t)
        new_b.append(p)
        m_b.append(m)
        v_b.append(v)
    updated = Network(spec=network.spec, weights=tuple(new_w), biases=tuple(new_b))
    return updated, AdamState(tuple(m_w), tuple(v_w), tuple(m_b), tuple(v_b), t)
