"""Recurrent channel predictors trained with truncated BPTT.

The subpackage is self contained on numpy:

``layers``    gate equations and per-step backward passes
``network``   layer stack, windowed forward/backward, flop counts
``optim``     Adam with bias correction
``data``      tapped delay line features and window iteration
``train``     training loop, series prediction, correlation report
``model_io``  versioned npz serialization
"""

from .layers import LayerSpec
from .network import RecurrentNet, flops_per_step, flops_simplified
from .optim import AdamState, adam_step
from .data import build_dataset, complex_from_split, tapped_delay_vector
from .train import (HIGH_ACCURACY_TRAIN, TrainConfig, TrainReport, train,
                    train_link_predictor, predict_series,
                    prediction_correlation)
from .model_io import save_model, load_model

__all__ = [
    "LayerSpec",
    "RecurrentNet",
    "flops_per_step",
    "flops_simplified",
    "AdamState",
    "adam_step",
    "build_dataset",
    "complex_from_split",
    "tapped_delay_vector",
    "HIGH_ACCURACY_TRAIN",
    "TrainConfig",
    "TrainReport",
    "train",
    "train_link_predictor",
    "predict_series",
    "prediction_correlation",
    "save_model",
    "load_model",
]
