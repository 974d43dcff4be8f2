"""Feed-forward tanh network in float64 with affine input normalization."""

import math
from typing import Literal, Sequence

import numpy as np
import pydantic
import torch
from torch import nn

from ..errors import ConfigurationError, DimensionMismatchError


DTYPE = torch.float64

Activation = Literal["tanh"]


class MlpSpec(pydantic.BaseModel):
    """Architecture and input normalization of an ``Mlp``."""

    model_config = pydantic.ConfigDict(frozen=True)

    layer_dims: list[int]
    activation: Activation = "tanh"
    seed: int = 0
    input_shift: list[float] | None = None
    input_scale: list[float] | None = None

    @pydantic.field_validator("layer_dims")
    @classmethod
    def _check_dims(cls, value: list[int]) -> list[int]:
        if len(value) < 2 or any(dim < 1 for dim in value):
            raise ValueError(f"layer_dims must list at least two positive sizes: {value}")
        return value


class Mlp(nn.Module):
    """Affine layers with tanh on hidden layers and identity on the output.

    Inputs are normalized as ``(x - input_shift) / input_scale`` inside the
    network, so input derivatives are taken with respect to raw inputs.

    Parameters
    ----------
    spec
        Layer sizes ``[d_in, h_1, ..., d_out]``, seed and normalization.
    """

    def __init__(self, spec: MlpSpec) -> None:
        super().__init__()
        self.spec = spec
        dims = spec.layer_dims
        self.layers = nn.ModuleList(
            nn.Linear(d_in, d_out, dtype=DTYPE)
            for d_in, d_out in zip(dims[:-1], dims[1:], strict=True)
        )

        shift = spec.input_shift or [0.0] * dims[0]
        scale = spec.input_scale or [1.0] * dims[0]
        if len(shift) != dims[0] or len(scale) != dims[0]:
            raise ConfigurationError("input normalization must match d_in")
        if any(value <= 0 for value in scale):
            raise ConfigurationError("input scales must be positive")
        self.register_buffer("input_shift", torch.tensor(shift, dtype=DTYPE))
        self.register_buffer("input_scale", torch.tensor(scale, dtype=DTYPE))

        self.reset_parameters()

    @property
    def d_in(self) -> int:
        return self.spec.layer_dims[0]

    @property
    def d_out(self) -> int:
        return self.spec.layer_dims[-1]

    @property
    def n_parameters(self) -> int:
        return sum(p.numel() for p in self.parameters())

    def reset_parameters(self) -> None:
        """Glorot-uniform weights and zero biases from ``spec.seed``."""
        generator = torch.Generator().manual_seed(self.spec.seed)
        with torch.no_grad():
            for layer in self.layers:
                bound = math.sqrt(6.0 / (layer.in_features + layer.out_features))
                layer.weight.uniform_(-bound, bound, generator=generator)
                layer.bias.zero_()

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if x.shape[-1] != self.d_in:
            raise DimensionMismatchError(
                f"expected inputs with {self.d_in} features, got {x.shape[-1]}"
            )
        hidden = (x - self.input_shift) / self.input_scale
        for layer in self.layers[:-1]:
            hidden = torch.tanh(layer(hidden))
        return self.layers[-1](hidden)

    def parameter_vector(self) -> np.ndarray:
        """Flat copy of all parameters in layer order (weight, then bias)."""
        with torch.no_grad():
            flat = nn.utils.parameters_to_vector(self.parameters())
        return flat.cpu().numpy().copy()

    def load_parameter_vector(self, vector: Sequence[float] | np.ndarray) -> None:
        vector = np.asarray(vector, dtype=np.float64)
        if vector.shape != (self.n_parameters,):
            raise DimensionMismatchError(
                f"expected {self.n_parameters} parameters, got {vector.shape}"
            )
        with torch.no_grad():
            nn.utils.vector_to_parameters(
                torch.as_tensor(vector, dtype=DTYPE), self.parameters()
            )


def build_mlp(
    d_in: int,
    d_out: int,
    depth: int,
    width: int,
    seed: int = 0,
    input_shift: Sequence[float] | None = None,
    input_scale: Sequence[float] | None = None,
) -> Mlp:
    """``depth`` hidden layers of ``width`` units between ``d_in`` and ``d_out``."""
    spec = MlpSpec(
        layer_dims=[d_in, *([width] * depth), d_out],
        seed=seed,
        input_shift=None if input_shift is None else list(map(float, input_shift)),
        input_scale=None if input_scale is None else list(map(float, input_scale)),
    )
    return Mlp(spec)
