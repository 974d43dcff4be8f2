"""Structure- and asymptotic-preserving neural surrogates and their samplers."""

from .data import FieldCollocation, FieldPointSet, FieldTrainingData
from .euler_pinn import (
    EulerLossWeights,
    EulerPinnConfig,
    EulerSurrogate,
    EulerSurrogateSampler,
    euler_losses,
    train_euler_pinn,
)
from .homogeneous import (
    HomLossWeights,
    HomSapnnConfig,
    HomSurrogate,
    HomSurrogateSampler,
    HomTrainingData,
    hom_boundary_and_data_loss,
    hom_moment_loss,
    hom_residual_loss,
    hom_training_data,
    initial_log_ratio,
    train_hom,
)
from .io import load_surrogate, save_surrogate
from .nonhomogeneous import (
    NonhomLossWeights,
    NonhomPointSets,
    NonhomSapnnConfig,
    NonhomSurrogate,
    NonhomSurrogateSampler,
    nonhom_losses,
    train_nonhom,
)
from .physics import NodeTensors, node_tensors
from .sampler import SurrogateSampler, surrogate_evaluate


__all__ = [
    "EulerLossWeights",
    "EulerPinnConfig",
    "EulerSurrogate",
    "EulerSurrogateSampler",
    "FieldCollocation",
    "FieldPointSet",
    "FieldTrainingData",
    "HomLossWeights",
    "HomSapnnConfig",
    "HomSurrogate",
    "HomSurrogateSampler",
    "HomTrainingData",
    "NodeTensors",
    "NonhomLossWeights",
    "NonhomPointSets",
    "NonhomSapnnConfig",
    "NonhomSurrogate",
    "NonhomSurrogateSampler",
    "SurrogateSampler",
    "euler_losses",
    "hom_boundary_and_data_loss",
    "hom_moment_loss",
    "hom_residual_loss",
    "hom_training_data",
    "initial_log_ratio",
    "load_surrogate",
    "node_tensors",
    "nonhom_losses",
    "save_surrogate",
    "surrogate_evaluate",
    "train_euler_pinn",
    "train_hom",
    "train_nonhom",
]
