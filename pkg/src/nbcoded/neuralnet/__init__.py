from .adam import AdamConfig, AdamState, adam_step, init_adam
from .backprop import LOSSES, Gradients, data_loss, gradients, l2_penalty, loss_and_gradients, total_loss
from .mlp import mlp_probability, mlp_spec, predict_mlp, train_mlp, train_mlp_classifier
from .network import (
    ACTIVATIONS,
    Encoder,
    LayerSpec,
    Network,
    encode,
    extract_encoder,
    forward,
    init_network,
    predict_output,
)
from .train import TrainConfig, TrainResult, train

__all__ = [
    "ACTIVATIONS", "LOSSES",
    "LayerSpec", "Network", "Encoder", "Gradients",
    "AdamConfig", "AdamState", "TrainConfig", "TrainResult",
    "init_network", "forward", "predict_output", "extract_encoder", "encode",
    "gradients", "loss_and_gradients", "data_loss", "l2_penalty", "total_loss",
    "init_adam", "adam_step", "train",
    "mlp_spec", "train_mlp", "train_mlp_classifier", "mlp_probability", "predict_mlp",
]
