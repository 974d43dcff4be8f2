"""Physics-informed surrogate of the 1D Euler equations (the fluid fidelity).

A macro-net of ``(x, t, z)`` predicts ``(rho, u_x, u_y, T)`` with softplus
positivity. It is trained on the conservative Euler residual, the initial
state and snapshots of ``solve_euler_1d`` trajectories. As a kinetic
fidelity it emits the local Maxwellian of its fields.
"""

import logging
from typing import Any

import numpy as np
import pydantic
import torch
from numpy.typing import ArrayLike
from torch import nn

from ..errors import ConfigurationError
from ..grid import MacroState, SpatialGrid, VelocityGrid
from ..nn import DTYPE, LossHistory, Mlp, TrainingSchedule, build_mlp, optimize
from ..nn.autodiff import directional_derivative, mean_square
from ..solvers import GAMMA, KineticField
from ..uq import RandomInputSpec
from .data import (
    TIME_AXIS,
    X_AXIS,
    FieldCollocation,
    FieldPointSet,
    FieldTrainingData,
    input_normalization,
    query_inputs,
)
from .physics import conserved_from_macro, euler_flux, macro_from_raw
from .sampler import SurrogateSampler


logger = logging.getLogger(__name__)


class EulerLossWeights(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    residual: float = pydantic.Field(default=1.0, ge=0)
    boundary: float = pydantic.Field(default=10.0, ge=0)
    data: float = pydantic.Field(default=10.0, ge=0)

    def as_dict(self) -> dict[str, float]:
        return self.model_dump()


class EulerPinnConfig(pydantic.BaseModel):
    model_config = pydantic.ConfigDict(frozen=True, extra="forbid")

    horizon: float = pydantic.Field(default=0.0875, gt=0)
    data_fraction: float = pydantic.Field(default=0.6, ge=0, le=1)
    gamma: float = pydantic.Field(default=GAMMA, gt=1)
    weights: EulerLossWeights = EulerLossWeights()
    n_residual: int = pydantic.Field(default=512, ge=1)
    n_boundary: int = pydantic.Field(default=256, ge=0)
    n_data: int = pydantic.Field(default=256, ge=0)
    depth: int = pydantic.Field(default=6, ge=1)
    width: int = pydantic.Field(default=96, ge=1)
    schedule: TrainingSchedule = TrainingSchedule(steps=10000, learning_rate=1e-3)


class EulerSurrogate(nn.Module):
    def __init__(self, macro_net: Mlp) -> None:
        super().__init__()
        if macro_net.d_out != 4:
            raise ConfigurationError("Euler macro-net must have 4 outputs")
        self.macro_net = macro_net

    def macro(self, inputs: torch.Tensor) -> tuple[torch.Tensor, ...]:
        return macro_from_raw(self.macro_net(inputs))

    def conserved(self, inputs: torch.Tensor) -> torch.Tensor:
        return conserved_from_macro(*self.macro(inputs))

    def forward(self, inputs: torch.Tensor) -> torch.Tensor:
        return self.conserved(inputs)


def _conserved_mismatch(
    model: EulerSurrogate, points: FieldPointSet | None, term: str
) -> torch.Tensor:
    if points is None or points.u_target is None or len(points) == 0:
        return torch.zeros((), dtype=DTYPE)
    return mean_square(model.conserved(points.inputs) - points.u_target, term)


def euler_losses(
    model: EulerSurrogate,
    gamma: float,
    residual_points: torch.Tensor,
    boundary: FieldPointSet | None = None,
    data: FieldPointSet | None = None,
) -> dict[str, torch.Tensor]:
    """Residual of ``dU/dt + dF(U)/dx = 0`` plus initial and data mismatches."""
    _, du_dt = directional_derivative(model.conserved, residual_points, TIME_AXIS)
    _, dflux_dx = directional_derivative(
        lambda p: euler_flux(model.conserved(p), gamma), residual_points, X_AXIS
    )
    return {
        "residual": mean_square(du_dt + dflux_dx, "residual"),
        "boundary": _conserved_mismatch(model, boundary, "boundary"),
        "data": _conserved_mismatch(model, data, "data"),
    }


class EulerSurrogateSampler(SurrogateSampler):
    """Local Maxwellian of the predicted fields at every cell centre."""

    def __init__(
        self,
        model: EulerSurrogate,
        grid: VelocityGrid,
        spatial: SpatialGrid,
        box: RandomInputSpec,
        config: EulerPinnConfig,
        history: LossHistory | None = None,
    ) -> None:
        super().__init__(box, config.horizon)
        self.model = model
        self.grid = grid
        self.spatial = spatial
        self.config = config
        self.history = history

    def macro(self, z: ArrayLike, t: float) -> MacroState:
        z = self.check_query(z, t)
        with torch.no_grad():
            rho, u_x, u_y, temp = (
                item.numpy() for item in self.model.macro(query_inputs(self.spatial, t, z))
            )
        return MacroState(rho=rho, u=np.stack([u_x, u_y], axis=-1), temp=temp)

    def evaluate(self, z: ArrayLike, t: float) -> KineticField:
        return KineticField.from_macro(self.macro(z, t), self.spatial, self.grid)

    def metadata(self) -> dict[str, Any]:
        return {
            "kind": "euler",
            "grid": {"extent": self.grid.extent, "n_per_dim": self.grid.n_per_dim},
            "n_cells": self.spatial.n_cells,
            "box": [list(interval) for interval in self.box.box],
            "horizon": self.horizon,
            "config": self.config.model_dump(mode="json"),
        }


def build_euler_model(config: EulerPinnConfig, box: RandomInputSpec) -> EulerSurrogate:
    shift, scale = input_normalization(config.horizon, box)
    net = build_mlp(
        2 + box.dim, 4, config.depth, config.width, config.schedule.seed, shift, scale
    )
    return EulerSurrogate(net)


def train_euler_pinn(
    config: EulerPinnConfig,
    data: FieldTrainingData,
    grid: VelocityGrid,
    show_progress: bool = False,
) -> EulerSurrogateSampler:
    """Train the Euler surrogate on ``solve_euler_1d`` trajectories.

    ``grid`` is the velocity grid of the emitted Maxwellians.
    """
    restricted = data.restricted(config.data_fraction * config.horizon)
    collocation = FieldCollocation(restricted, config.horizon)
    model = build_euler_model(config, data.box)

    def _loss_terms(step: int, generator: torch.Generator) -> dict[str, torch.Tensor]:
        return euler_losses(
            model,
            config.gamma,
            collocation.uniform(generator, config.n_residual),
            collocation.initial(generator, config.n_boundary),
            collocation.data(generator, config.n_data),
        )

    logger.info(
        "Training Euler surrogate on %d samples, %d snapshots",
        restricted.n_samples,
        restricted.times.size,
    )
    history = optimize(
        model, _loss_terms, config.schedule, config.weights.as_dict(), show_progress
    )
    return EulerSurrogateSampler(model, grid, data.spatial, data.box, config, history)
