"""Surrogate networks, input derivatives, training and checkpoints."""

from .autodiff import (
    GradientReport,
    directional_derivative,
    input_jacobian,
    loss_gradient,
    mean_square,
    weighted_total,
)
from .checkpoint import (
    Checkpoint,
    CheckpointHeader,
    load_checkpoint,
    read_checkpoint_header,
    save_checkpoint,
)
from .mlp import DTYPE, Mlp, MlpSpec, build_mlp
from .optimizer import LossHistory, TrainingSchedule, optimize


__all__ = [
    "DTYPE",
    "Checkpoint",
    "CheckpointHeader",
    "GradientReport",
    "LossHistory",
    "Mlp",
    "MlpSpec",
    "TrainingSchedule",
    "build_mlp",
    "directional_derivative",
    "input_jacobian",
    "load_checkpoint",
    "loss_gradient",
    "mean_square",
    "optimize",
    "read_checkpoint_header",
    "save_checkpoint",
    "weighted_total",
]
