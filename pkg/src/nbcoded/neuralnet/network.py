"""Dense feedforward networks: specs, initialization, forward pass, encoders."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from nbcoded.errors import FeatureError

ACTIVATIONS: frozenset[str] = frozenset({"tanh", "sigmoid"})


@dataclass(frozen=True)
class LayerSpec:
    """Layer widths plus hidden activation; output_activation=None reuses it."""

    sizes: tuple[int, ...]
    activation: str = "tanh"
    output_activation: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))
        if len(self.sizes) < 2:
            raise ValueError(f"a network needs at least 2 layer sizes, got {list(self.sizes)}")
        if any(s < 1 for s in self.sizes):
            raise ValueError(f"layer sizes must be >= 1, got {list(self.sizes)}")
        for act in (self.activation, self.output_activation):
            if act is not None and act not in ACTIVATIONS:
                raise ValueError(f"unknown activation {act!r}; expected one of {sorted(ACTIVATIONS)}")

    @property
    def n_layers(self) -> int:
        return len(self.sizes) - 1

    def layer_activation(self, layer: int) -> str:
        if layer == self.n_layers - 1 and self.output_activation is not None:
            return self.output_activation
        return self.activation


@dataclass(frozen=True, eq=False)
class Network:
    """weights[l] has shape (sizes[l+1], sizes[l]); biases[l] has shape (sizes[l+1],)."""

    spec: LayerSpec
    weights: tuple[np.ndarray, ...]
    biases: tuple[np.ndarray, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "weights", tuple(np.asarray(w, dtype=np.float64) for w in self.weights))
        object.__setattr__(self, "biases", tuple(np.asarray(b, dtype=np.float64) for b in self.biases))
        sizes = self.spec.sizes
        if len(self.weights) != self.spec.n_layers or len(self.biases) != self.spec.n_layers:
            raise ValueError(f"spec {list(sizes)} needs {self.spec.n_layers} layers of parameters")
        for layer, (w, b) in enumerate(zip(self.weights, self.biases)):
            if w.shape != (sizes[layer + 1], sizes[layer]) or b.shape != (sizes[layer + 1],):
                raise ValueError(
                    f"layer {layer}: weight {w.shape} / bias {b.shape} do not match "
                    f"{sizes[layer]} -> {sizes[layer + 1]}"
                )

    @property
    def input_width(self) -> int:
        return self.spec.sizes[0]

    @property
    def output_width(self) -> int:
        return self.spec.sizes[-1]

    def n_parameters(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))


class Encoder(Network):
    """Prefix of a symmetric autoencoder, ending at the bottleneck."""

    @property
    def bottleneck(self) -> int:
        return self.output_width


# ---------------------------------------------------------------------------
# Activations
# ---------------------------------------------------------------------------


def activate(name: str, z: np.ndarray) -> np.ndarray:
    if name == "tanh":
        return np.tanh(z)
    # 0.5 * (1 + tanh(z/2)) is the overflow-free logistic
    return 0.5 * (1.0 + np.tanh(0.5 * z))


def activation_derivative(name: str, a: np.ndarray) -> np.ndarray:
    """Derivative expressed through the activation's output."""
    if name == "tanh":
        return 1.0 - a * a
    return a * (1.0 - a)


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def init_network(spec: LayerSpec | Sequence[int], seed: int, activation: str = "tanh") -> Network:
    """Glorot-uniform weights, zero biases; deterministic per seed."""
    if not isinstance(spec, LayerSpec):
        spec = LayerSpec(tuple(spec), activation)
    rng = np.random.default_rng(seed)
    weights = []
    for fan_in, fan_out in zip(spec.sizes[:-1], spec.sizes[1:]):
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        weights.append(rng.uniform(-limit, limit, size=(fan_out, fan_in)))
    biases = [np.zeros(fan_out) for fan_out in spec.sizes[1:]]
    return Network(spec=spec, weights=tuple(weights), biases=tuple(biases))


def forward_with_logits(network: Network, batch: np.ndarray) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """(pre-activations per layer, activations per layer including the input)."""
    a = np.asarray(batch, dtype=np.float64)
    if a.ndim != 2 or a.shape[1] != network.input_width:
        raise FeatureError(f"network expects width {network.input_width}, got shape {a.shape}")
    logits: list[np.ndarray] = []
    acts = [a]
    for layer, (w, b) in enumerate(zip(network.weights, network.biases)):
        z = a @ w.T + b
        a = activate(network.spec.layer_activation(layer), z)
        logits.append(z)
        acts.append(a)
    return logits, acts


def forward(network: Network, batch: np.ndarray) -> list[np.ndarray]:
    """Activations of every layer; element 0 is the input, element -1 the output."""
    return forward_with_logits(network, batch)[1]


def predict_output(network: Network, batch: np.ndarray) -> np.ndarray:
    return forward(network, batch)[-1]


def extract_encoder(autoencoder: Network) -> Encoder:
    """Copy the layers up to and including the bottleneck."""
    sizes = autoencoder.spec.sizes
    if len(sizes) % 2 == 0 or sizes != sizes[::-1]:
        raise ValueError(f"autoencoder spec {list(sizes)} is not symmetric with a single bottleneck")
    half = (len(sizes) - 1) // 2
    spec = LayerSpec(sizes[: half + 1], autoencoder.spec.activation)
    return Encoder(
        spec=spec,
        weights=tuple(w.copy() for w in autoencoder.weights[:half]),
        biases=tuple(b.copy() for b in autoencoder.biases[:half]),
    )


def encode(encoder: Encoder, batch: np.ndarray) -> np.ndarray:
    """Bottleneck activations for each row."""
    return forward(encoder, batch)[-1]
